"""Closed-form analysis: PEP, union-bound BER, achievable rate, complexity.

SNR convention: unit average symbol energy, so gamma = 1/N0 = 10**(snr_db/10).
The channel correlation matrix is the identity (i.i.d. Rayleigh subcarriers),
which turns every determinant in the PEP into a product over subcarriers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .detect import metric_count
from .modem import IqmScheme, Scheme

UNION_BOUND_MAX_BITS = 14
RATE_MAX_BITS = 12
_CHUNK_ELEMS = 2**22


class UnsupportedConfiguration(ValueError):
    """Raised when an exhaustive computation would be infeasibly large."""


def db_to_linear(snr_db):
    return np.power(10.0, np.asarray(snr_db, dtype=float) / 10)


@dataclass(frozen=True, eq=False)
class PairStats:
    pair: tuple[int, int]
    sq_diff: np.ndarray
    hamming: int

    def __post_init__(self):
        sq = np.asarray(self.sq_diff, dtype=float)
        if np.any(sq < 0):
            raise ValueError("squared differences must be nonnegative")
        if self.pair[0] != self.pair[1] and self.hamming < 1:
            raise ValueError("distinct codewords must differ in at least one bit")
        object.__setattr__(self, "sq_diff", sq)


def pair_stats(scheme: Scheme, i: int, j: int) -> PairStats:
    cb = scheme.codebook
    return PairStats((i, j), np.abs(cb[i] - cb[j]) ** 2, int(i ^ j).bit_count())


def pep_unconditional(pair, gamma):
    """Approximate PEP averaged over i.i.d. Rayleigh fading.

    ``pair`` is a PairStats or an array of squared distances (last axis runs
    over subcarriers).  Uses the two-exponential Q-function approximation,
    so the value at gamma = 0 is 1/3.
    """
    deltas = pair.sq_diff if isinstance(pair, PairStats) else np.asarray(pair, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma < 0):
        raise ValueError("gamma must be nonnegative")
    g = gamma[..., None] if gamma.ndim else gamma
    out = np.prod(1 / (1 + g * deltas / 4), axis=-1) / 12 + np.prod(
        1 / (1 + g * deltas / 3), axis=-1
    ) / 4
    return float(out) if np.ndim(out) == 0 else out


def _popcount(x: np.ndarray) -> np.ndarray:
    return np.bitwise_count(x.astype(np.uint64)).astype(float)


def union_bound_ber(scheme: Scheme, gamma) -> np.ndarray | float:
    """Union bound on the ML bit error rate at linear SNR ``gamma`` (scalar or array)."""
    f = scheme.f
    if f > UNION_BOUND_MAX_BITS:
        raise UnsupportedConfiguration(
            f"union bound needs f <= {UNION_BOUND_MAX_BITS}, {scheme.name} has f = {f}"
        )
    gammas = np.atleast_1d(np.asarray(gamma, dtype=float))
    if np.any(gammas < 0):
        raise ValueError("gamma must be nonnegative")
    cb = scheme.codebook
    size, n = cb.shape
    idx = np.arange(size)
    total = np.zeros(gammas.shape)
    step = max(1, _CHUNK_ELEMS // (size * n))
    for start in range(0, size, step):
        rows = idx[start:start + step]
        delta = np.abs(cb[rows, None, :] - cb[None, :, :]) ** 2
        weight = _popcount(rows[:, None] ^ idx[None, :])
        for g_i, g in enumerate(gammas):
            pep = np.prod(1 / (1 + g * delta / 4), axis=-1) / 12 + np.prod(
                1 / (1 + g * delta / 3), axis=-1
            ) / 4
            total[g_i] += float((pep * weight).sum())
    out = total / (f * 2**f)
    return float(out[0]) if np.ndim(gamma) == 0 else out


@dataclass(frozen=True)
class RateEstimate:
    snr_db: float
    rate: float
    stderr: float
    samples: int


def _log2_sum_exp(lam: np.ndarray, axis: int) -> np.ndarray:
    top = lam.max(axis=axis, keepdims=True)
    return (np.log(np.exp(lam - top).sum(axis=axis)) + np.squeeze(top, axis=axis)) / math.log(2)


def achievable_rate(scheme: Scheme, snr_db, num_samples: int, rng: np.random.Generator):
    """Monte-Carlo achievable rate in bits per subcarrier.

    Every sample draws one channel and one unit-variance noise vector and
    averages the inner term exactly over all 2**f transmitted codewords.  The
    same draws are reused at every SNR (common random numbers).  Returns a
    RateEstimate, or a list of them when ``snr_db`` is a sequence.
    """
    f = scheme.f
    if f > RATE_MAX_BITS:
        raise UnsupportedConfiguration(
            f"achievable rate needs f <= {RATE_MAX_BITS}, {scheme.name} has f = {f}"
        )
    if num_samples < 1:
        raise ValueError("num_samples must be >= 1")
    scalar = np.ndim(snr_db) == 0
    snrs = np.atleast_1d(np.asarray(snr_db, dtype=float))
    cb = scheme.codebook
    size, n = cb.shape
    diff = cb[:, None, :] - cb[None, :, :]  # s_i - s_j
    h = (rng.standard_normal((num_samples, n)) + 1j * rng.standard_normal((num_samples, n)))
    z = (rng.standard_normal((num_samples, n)) + 1j * rng.standard_normal((num_samples, n)))
    h *= math.sqrt(0.5)
    z *= math.sqrt(0.5)
    step = max(1, _CHUNK_ELEMS // (size * size * n))
    out = []
    for snr in snrs:
        scale = math.sqrt(10 ** (snr / 10))  # 1/sqrt(N0)
        inner = np.empty(num_samples)
        for start in range(0, num_samples, step):
            sl = slice(start, start + step)
            hh, zz = h[sl, None, None, :], z[sl, None, None, :]
            lam = (np.abs(zz) ** 2 - np.abs(hh * diff * scale + zz) ** 2).sum(axis=-1)
            inner[sl] = _log2_sum_exp(lam, axis=-1).mean(axis=-1)
        per_sample = (f - inner) / n
        stderr = float(per_sample.std(ddof=1) / math.sqrt(num_samples)) if num_samples > 1 else math.nan
        out.append(RateEstimate(float(snr), float(per_sample.mean()), stderr, num_samples))
    return out[0] if scalar else out


# Decoding complexity per bit at matched spectral efficiency.

COMPLEXITY_SCHEMES = ("mds-apm", "mm-ofdm-im", "ofdm-im", "ofdm")


def _log2_factorial(n: int) -> float:
    return math.lgamma(n + 1) / math.log(2)


def matched_se(n: int, m: int) -> float:
    """SE shared by all schemes in the comparison: log2(N!)/N + log2(M)."""
    return _log2_factorial(n) / n + math.log2(m)


def decoding_complexity_per_bit(n: int, m: int, scheme: str) -> float:
    """Metric calculations per subcarrier divided by the bits per subcarrier.

    APM uses KP = (N!)^(1/(N-1)) index symbols so its SE matches the
    permutation-based benchmark; OFDM-IM activates N-1 subcarriers.  Plain
    OFDM carries the same SE with a 2**eta-point alphabet.
    """
    if n < 2 or m < 1:
        raise ValueError("need N >= 2 and M >= 1")
    eta = matched_se(n, m)
    if scheme == "mds-apm":
        kp = 2 ** (_log2_factorial(n) / (n - 1))
        c = kp * m * (1 - 1 / n) + m / n
    elif scheme == "mm-ofdm-im":
        c = m * n / 2 + m / 2
    elif scheme == "ofdm-im":
        c = 2 ** ((n * math.log2(m) + _log2_factorial(n - 1)) / (n - 1))
    elif scheme == "ofdm":
        c = 2**eta
    else:
        raise ValueError(f"unknown scheme {scheme!r}; choose from {COMPLEXITY_SCHEMES}")
    return c / eta


def asymptotic_complexity(n: int, m2: int) -> dict[str, float]:
    """Large-N forms with KPM = M2*N/e: APM ~ M2 N/(e L), MM ~ M2 N/(2 L), L = log2(M2 N/e)."""
    x = m2 * n / math.e
    return {"mds-apm": m2 * n / (math.e * math.log2(x)), "mm-ofdm-im": m2 * n / (2 * math.log2(x))}


@dataclass(frozen=True)
class ComplexityRow:
    label: str
    ml: float
    lcml: float
    ofdm_im: float
    mm_ofdm_im: float
    ofdm: float


# (N, R, T, M, M1, M2, M3) for the detection-complexity table.
TABLE_IV_ROWS = (
    (4, 2, 2, 4, 102, 23, 46),
    (8, 2, 4, 4, 142, 27, 99),
    (16, 4, 4, 4, 256, 32, 216),
)


def benchmark_counts(n: int, m1: int, m2: int, m3: int) -> tuple[float, float, float]:
    """Per-subcarrier metric counts for OFDM-IM (LLR), MM-OFDM-IM, plain OFDM."""
    return float(m1), m2 * n / 2 + m2 / 2, float(m3)


def complexity_table() -> list[ComplexityRow]:
    rows = []
    for n, r, t, m, m1, m2, m3 in TABLE_IV_ROWS:
        scheme = IqmScheme(n, r, t, m)
        ml = metric_count(scheme, "ml").per_subcarrier
        lc = metric_count(scheme, "lcml").per_subcarrier
        rows.append(
            ComplexityRow(f"IQM({n},{r},{t},{m})", float(ml), float(lc), *benchmark_counts(n, m1, m2, m3))
        )
    return rows


# MED of size-M^2 alphabets versus equal-size PSK/QAM.

@dataclass(frozen=True)
class MedComparison:
    log2m: int
    apm: float
    iqm: float
    psk: float
    qam: float


def med_comparison(log2m: int) -> MedComparison:
    """Within-set MEDs of APM(N,M,M,M) and IQM(N,M,M,sqrt M) against M^2-PSK/QAM.

    Both coded schemes carry 2*log2(M) bits per subcarrier, like the M^2-point
    benchmarks.  M is 2**log2m; IQM needs even log2m for an integer sqrt(M).
    """
    m = 2**log2m
    apm = 2 * math.sqrt(2) * math.sin(math.pi / m) / math.sqrt(m + 1)
    iqm = math.sqrt(6 / (m - 1 / m**2))
    psk = 2 * math.sin(math.pi / m**2)
    qam = math.sqrt(6 / (m**2 - 1))
    return MedComparison(log2m, apm, iqm, psk, qam)


def apm_qam_crossover(max_log2m: int = 12) -> float:
    """log2(M), linearly interpolated, at which APM's MED falls below M^2-QAM's."""
    def gap(b):
        m = 2.0**b
        return 2 * math.sqrt(2) * math.sin(math.pi / m) / math.sqrt(m + 1) - math.sqrt(6 / (m * m - 1))

    grid = np.linspace(1, max_log2m, 1 + 100 * (max_log2m - 1))
    for b0, b1 in zip(grid, grid[1:]):
        g0, g1 = gap(b0), gap(b1)
        if g0 >= 0 > g1:
            return float(b0 + (b1 - b0) * g0 / (g0 - g1))
    raise ValueError("no crossover in range")
