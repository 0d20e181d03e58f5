"""Monte-Carlo BER engine.

Each SNR point is simulated in blocks of frames.  Block ``b`` of point ``p``
draws from its own generator seeded by (seed, p, b), and blocks are reduced
in block order, stopping at the first block after which the error target is
met.  Results therefore depend only on (scheme, detector, seed, stop rule),
never on the number of worker threads.
"""

from __future__ import annotations

import functools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numba
import numpy as np

from . import channel
from .detect import detect_batch
from .modem import Scheme

log = logging.getLogger(__name__)

FIRST_BLOCK = 1 << 10
NUMPY_BLOCK_CAP = 1 << 15
KERNEL_BLOCK_CAP = 1 << 22
KERNEL_MAX_TABLE = 1024  # codewords x subcarriers


@dataclass(frozen=True)
class StopRule:
    min_bit_errors: int = 200
    max_frames: int = 10**7

    def __post_init__(self):
        if self.min_bit_errors < 1:
            raise ValueError(f"min_bit_errors must be >= 1, got {self.min_bit_errors}")
        if self.max_frames < 1:
            raise ValueError(f"max_frames must be >= 1, got {self.max_frames}")


@dataclass(frozen=True)
class BerPoint:
    snr_db: float
    bits_sent: int
    bit_errors: int
    frames: int
    seed: int
    detector: str

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_sent if self.bits_sent else math.nan


@numba.njit(nogil=True, cache=True)
def _ml_table_kernel(rng, groups, dre, dim, dmin2, n0):
    """Simulate ``groups`` transmissions with ML over a tabulated codebook.

    ``dre``/``dim`` hold Re/Im of c_i - c_j.  Returns the number of bit errors.

    Only |h_k| and the noise rotated by conj(h_k)/|h_k| enter the ML metric,
    and the rotated noise is again CN(0, N0) and independent of h.  The draw
    order is arranged so the common case costs 1 + N exponentials:

    * min_k |h_k|^2 ~ Exp(1)/N; the argmin is uniform and the other gains are
      the minimum plus fresh Exp(1) draws (memoryless property);
    * ||w||^2 ~ N0 * (sum of N Exp(1)) and the noise direction is uniform and
      independent of the norm.

    When min|h|^2 * dmin2 > 4 ||w||^2 every competitor's metric is strictly
    worse (Cauchy-Schwarz), so ML returns the sent codeword whatever it was
    and the remaining draws and the search are skipped.  Otherwise the
    frame is completed from the conditional laws above and searched.
    """
    size, _, n = dre.shape
    a = np.empty(n)
    wr = np.empty(n)
    wi = np.empty(n)
    errors = 0
    for _ in range(groups):
        gmin = rng.standard_exponential() / n
        r2 = 0.0
        for _k in range(n):
            r2 += rng.standard_exponential()
        r2 *= n0
        if gmin * dmin2 > 4.0 * r2:
            continue
        kmin = int(rng.random() * n)
        for k in range(n):
            g = gmin if k == kmin else gmin + rng.standard_exponential()
            a[k] = math.sqrt(g)
        norm = 0.0
        for k in range(n):
            wr[k] = rng.standard_normal()
            wi[k] = rng.standard_normal()
            norm += wr[k] * wr[k] + wi[k] * wi[k]
        scale = math.sqrt(r2 / norm)
        for k in range(n):
            wr[k] *= scale
            wi[k] *= scale
        tx = int(rng.random() * size)
        best = tx
        best_metric = r2
        for j in range(size):
            metric = 0.0
            for k in range(n):
                dr = a[k] * dre[tx, j, k] + wr[k]
                di = a[k] * dim[tx, j, k] + wi[k]
                metric += dr * dr + di * di
            if metric < best_metric:
                best_metric = metric
                best = j
        diff = best ^ tx
        while diff:
            errors += diff & 1
            diff >>= 1
    return errors


def uses_kernel(scheme: Scheme, detector: str) -> bool:
    return detector == "ml" and scheme.f <= 12 and (2**scheme.f) * scheme.n <= KERNEL_MAX_TABLE


def _difference_tables(scheme: Scheme):
    # Scheme equality ignores custom IQM level tables, so key on the codebook too.
    return _tables_for(scheme, id(scheme.codebook))


@functools.lru_cache(maxsize=32)
def _tables_for(scheme: Scheme, _codebook_id: int):
    cb = scheme.codebook
    d = cb[:, None, :] - cb[None, :, :]
    sq = (np.abs(d) ** 2).sum(axis=-1)
    np.fill_diagonal(sq, np.inf)
    return np.ascontiguousarray(d.real), np.ascontiguousarray(d.imag), float(sq.min())


def simulate_groups(scheme: Scheme, detector: str, n0: float, rng: np.random.Generator,
                    groups: int) -> int:
    """Bit errors over ``groups`` independently drawn subcarrier groups."""
    if uses_kernel(scheme, detector):
        dre, dim, dmin2 = _difference_tables(scheme)
        return int(_ml_table_kernel(rng, groups, dre, dim, dmin2, n0))
    bits = rng.integers(0, 2, size=(groups, scheme.f), dtype=np.uint8)
    s = scheme.encode(bits)
    h = channel.sample_realization(rng, s.shape)
    y = channel.apply(s, h, channel.sample_noise(rng, s.shape, n0))
    decided = scheme.bits_from_indices(detect_batch(y, h, scheme, detector))
    return int(np.count_nonzero(decided != bits))


def _block_frames(scheme: Scheme, detector: str, block: int) -> int:
    cap = KERNEL_BLOCK_CAP if uses_kernel(scheme, detector) else NUMPY_BLOCK_CAP
    return min(FIRST_BLOCK << min(block, 30), cap)


def simulate_point(scheme: Scheme, snr_db: float, detector: str = "ml",
                   stop: StopRule = StopRule(), seed: int = 0, point: int = 0,
                   threads: int = 1) -> BerPoint:
    n0 = channel.snr_to_n0(snr_db)

    def run_block(b: int, frames: int) -> int:
        rng = channel.derive_rng(seed, point, b)
        return simulate_groups(scheme, detector, n0, rng, frames * scheme.groups)

    frames = errors = 0
    block = 0
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        while errors < stop.min_bit_errors and frames < stop.max_frames:
            plan = []
            planned = frames
            for b in range(block, block + max(threads, 1)):
                size = min(_block_frames(scheme, detector, b), stop.max_frames - planned)
                if size <= 0:
                    break
                plan.append((b, size))
                planned += size
            if pool is None:
                results = (run_block(b, size) for b, size in plan)
            else:
                results = pool.map(lambda bs: run_block(*bs), plan)
            for (b, size), e in zip(plan, results):
                frames += size
                errors += e
                block = b + 1
                if errors >= stop.min_bit_errors:
                    break
    finally:
        if pool is not None:
            pool.shutdown()
    bits = frames * scheme.f * scheme.groups
    log.info("%s %s %.2f dB: %d errors / %d bits", scheme.name, detector, snr_db, errors, bits)
    return BerPoint(float(snr_db), bits, errors, frames, seed, detector)


def run_ber_sweep(scheme: Scheme, snrs, detector: str = "ml", stop: StopRule = StopRule(),
                  seed: int = 0, threads: int = 1) -> list[BerPoint]:
    snrs = [float(s) for s in snrs]
    if not snrs:
        raise ValueError("SNR list is empty")
    if detector not in ("ml", "lcml"):
        raise ValueError(f"unknown detector {detector!r}")
    return [
        simulate_point(scheme, s, detector, stop, seed, p, threads) for p, s in enumerate(snrs)
    ]


def snr_at_ber(points: list[BerPoint], target: float) -> float:
    """SNR (dB) where the curve crosses ``target``, by linear interpolation of
    log10(BER) between the bracketing points."""
    xs = [p.snr_db for p in points]
    ys = [math.log10(p.ber) if p.bit_errors else -math.inf for p in points]
    lt = math.log10(target)
    for (x0, y0), (x1, y1) in zip(zip(xs, ys), zip(xs[1:], ys[1:])):
        if y0 >= lt >= y1:
            if y1 == -math.inf:
                return x1
            return x0 + (lt - y0) * (x1 - x0) / (y1 - y0)
    raise ValueError(f"BER curve does not cross {target}")


def loglog_slope(points: list[BerPoint]) -> float:
    """Least-squares slope of log10(BER) against log10(SNR linear), i.e. per decade."""
    x = np.array([p.snr_db / 10 for p in points])
    y = np.log10([p.ber for p in points])
    return float(np.polyfit(x, y, 1)[0])

