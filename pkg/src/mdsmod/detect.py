"""Maximum-likelihood and low-complexity ML (LC-ML) detection.

All batch functions take ``y`` and ``h`` of shape (B, N) and return
``GroupIndices`` with the same leading shape.

ML searches the 2**f reachable codewords.  Small codebooks are scanned
exhaustively; larger ones use the exact factorisation: once the two index
tuples are fixed, the metric splits into independent per-subcarrier minima
over the points of each cell.

LC-ML decides every subcarrier except the weakest one on its own, forces the
weakest subcarrier's cell by MDS parity and then picks the best point in
that cell.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import mdscode
from .modem import ApmScheme, GroupIndices, IqmScheme, Scheme

EXHAUSTIVE_MAX_BITS = 12
_CHUNK_ELEMS = 2**22


@dataclass(frozen=True, eq=False)
class DetectionResult:
    indices: GroupIndices
    bits: np.ndarray
    metric_evaluations: int


@dataclass(frozen=True)
class MetricCount:
    per_group: int
    per_subcarrier: Fraction


def metric_count(scheme: Scheme, detector: str) -> MetricCount:
    """Closed-form number of metric calculations per subcarrier group."""
    if detector == "ml":
        total = 2**scheme.f
    elif detector == "lcml":
        cells = scheme.q1 * scheme.q2 * scheme.cell_size
        total = cells * (scheme.n - 1) + scheme.cell_size
    else:
        raise ValueError(f"unknown detector {detector!r}")
    return MetricCount(total, Fraction(total, scheme.n))


def _chunks(batch: int, per_row: int):
    step = max(1, _CHUNK_ELEMS // max(per_row, 1))
    for start in range(0, batch, step):
        yield slice(start, min(start + step, batch))


def ml_codeword_index(y: np.ndarray, h: np.ndarray, codebook: np.ndarray) -> np.ndarray:
    """Exhaustive ML over a tabulated codebook; returns row indices (lowest on ties).

    Uses ||y - c*h||^2 = ||y||^2 + sum |c|^2 |h|^2 - 2 Re sum c h conj(y), dropping
    the constant term, so the scan is two matrix products.
    """
    out = np.empty(y.shape[0], dtype=np.int64)
    energy = (np.abs(codebook) ** 2).T
    cbt = codebook.T
    for sl in _chunks(y.shape[0], codebook.shape[0]):
        hh = h[sl]
        metric = (np.abs(hh) ** 2) @ energy - 2 * ((hh * np.conj(y[sl])) @ cbt).real
        out[sl] = np.argmin(metric, axis=1)
    return out


def _cell_metrics(y, h, points):
    """|y_n - x h_n|^2 for every point x, shape (B, N, q1, q2, mc)."""
    return np.abs(y[..., None, None, None] - points * h[..., None, None, None]) ** 2


def _ml_factored(y, h, scheme: Scheme) -> GroupIndices:
    pts = scheme.points
    t1s, t2s = scheme.reachable()
    l1, l2, n = t1s.shape[0], t2s.shape[0], scheme.n
    b = y.shape[0]
    tuple1 = np.empty((b, n), np.int64)
    tuple2 = np.empty((b, n), np.int64)
    within = np.empty((b, n), np.int64)
    cols = np.arange(n)
    i1 = (t1s - 1)[:, None, :]
    i2 = (t2s - 1)[None, :, :]
    for sl in _chunks(b, l1 * l2 * n + pts.size * n):
        cm = _cell_metrics(y[sl], h[sl], pts)
        best = cm.argmin(axis=-1)
        cell_min = np.take_along_axis(cm, best[..., None], axis=-1)[..., 0]
        total = cell_min[:, cols, i1, i2].sum(axis=-1)
        flat = total.reshape(total.shape[0], -1).argmin(axis=1)
        a, c = np.divmod(flat, l2)
        tuple1[sl], tuple2[sl] = t1s[a], t2s[c]
        rows = np.arange(total.shape[0])[:, None]
        within[sl] = best[rows, cols, tuple1[sl] - 1, tuple2[sl] - 1]
    return GroupIndices(tuple1, tuple2, within)


def ml_indices(y: np.ndarray, h: np.ndarray, scheme: Scheme) -> GroupIndices:
    y, h = np.atleast_2d(y), np.atleast_2d(h)
    if scheme.f <= EXHAUSTIVE_MAX_BITS:
        idx = ml_codeword_index(y, h, scheme.codebook)
        return scheme.indices_from_bits(mdscode._unpack(idx, scheme.f))
    return _ml_factored(y, h, scheme)


def lcml_indices(y: np.ndarray, h: np.ndarray, scheme: Scheme) -> GroupIndices:
    y, h = np.atleast_2d(y), np.atleast_2d(h)
    pts = scheme.points
    q1, q2, mc = pts.shape
    b, n = y.shape
    rows = np.arange(b)
    tuple1 = np.empty((b, n), np.int64)
    tuple2 = np.empty((b, n), np.int64)
    within = np.empty((b, n), np.int64)
    for sl in _chunks(b, pts.size * n):
        yy, hh = y[sl], h[sl]
        r = rows[: yy.shape[0]]
        cm = _cell_metrics(yy, hh, pts).reshape(yy.shape[0], n, -1)
        flat = cm.argmin(axis=-1)
        t1 = flat // (q2 * mc) + 1
        t2 = (flat // mc) % q2 + 1
        w = flat % mc
        weakest = np.abs(hh).argmin(axis=1)
        t1[r, weakest] = mdscode.parity_symbol(t1.sum(axis=1) - t1[r, weakest], q1)
        t2[r, weakest] = mdscode.parity_symbol(t2.sum(axis=1) - t2[r, weakest], q2)
        cand = pts[t1[r, weakest] - 1, t2[r, weakest] - 1]
        w[r, weakest] = np.abs(yy[r, weakest, None] - cand * hh[r, weakest, None]).argmin(axis=1)
        tuple1[sl], tuple2[sl], within[sl] = t1, t2, w
    return GroupIndices(tuple1, tuple2, within)


def _single(y, h, scheme, finder, detector) -> DetectionResult:
    y, h = np.asarray(y, dtype=complex), np.asarray(h, dtype=complex)
    if y.shape != (scheme.n,) or h.shape != (scheme.n,):
        raise ValueError(f"y and h must have length N={scheme.n}")
    idx = finder(y[None], h[None], scheme)[0]
    return DetectionResult(
        idx, scheme.bits_from_indices(idx), metric_count(scheme, detector).per_group
    )


def ml_detect(y, h, scheme: Scheme) -> DetectionResult:
    return _single(y, h, scheme, ml_indices, "ml")


def lcml_detect(y, h, scheme: Scheme) -> DetectionResult:
    return _single(y, h, scheme, lcml_indices, "lcml")


def lcml_detect_apm(y, h, scheme: ApmScheme) -> DetectionResult:
    if not isinstance(scheme, ApmScheme):
        raise TypeError("expected an ApmScheme")
    return lcml_detect(y, h, scheme)


def lcml_detect_iqm(y, h, scheme: IqmScheme) -> DetectionResult:
    if not isinstance(scheme, IqmScheme):
        raise TypeError("expected an IqmScheme")
    return lcml_detect(y, h, scheme)


DETECTORS = {"ml": ml_indices, "lcml": lcml_indices}


def detect_batch(y, h, scheme: Scheme, detector: str) -> GroupIndices:
    try:
        finder = DETECTORS[detector]
    except KeyError:
        raise ValueError(f"unknown detector {detector!r}") from None
    return finder(y, h, scheme)
