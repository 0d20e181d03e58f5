"""Constellation geometry for MDS-APM (rings and disjoint phase sets) and
MDS-IQM (disjoint PAM sets), with analytic and brute-force MED calculators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True, eq=False)
class ApmConstellation:
    """K rings of radius sqrt(2k/(K+1)), each carrying P disjoint M-PSK sets.

    Set p is M-PSK rotated by 2(p-1)pi/(MP).  With ``ring_rotation`` ring k is
    additionally rotated by (k-1)pi/(PM).
    """

    k: int
    p: int
    m: int
    ring_rotation: bool = True
    radii: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        for name in ("k", "p", "m"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        ks = np.arange(1, self.k + 1)
        object.__setattr__(self, "radii", np.sqrt(2.0 * ks / (self.k + 1)))

    @property
    def rotation_step(self) -> float:
        return math.pi / (self.p * self.m)

    def angle(self, k: int, p: int, m: int) -> float:
        theta = 2 * math.pi * m / self.m + 2 * math.pi * (p - 1) / (self.m * self.p)
        if self.ring_rotation:
            theta += (k - 1) * self.rotation_step
        return theta

    def point(self, k: int, p: int, m: int) -> complex:
        if not (1 <= k <= self.k and 1 <= p <= self.p and 0 <= m < self.m):
            raise ValueError(f"(k={k}, p={p}, m={m}) out of range for {self}")
        return complex(self.radii[k - 1] * np.exp(1j * self.angle(k, p, m)))

    def points(self) -> np.ndarray:
        """All points as an array indexed [k-1, p-1, m]."""
        k, p, m = np.meshgrid(
            np.arange(1, self.k + 1), np.arange(1, self.p + 1), np.arange(self.m), indexing="ij"
        )
        theta = 2 * np.pi * m / self.m + 2 * np.pi * (p - 1) / (self.m * self.p)
        if self.ring_rotation:
            theta = theta + (k - 1) * self.rotation_step
        return self.radii[k - 1] * np.exp(1j * theta)


def build_apm(k: int, p: int, m: int, ring_rotation: bool = True) -> ApmConstellation:
    return ApmConstellation(k, p, m, ring_rotation)


def apm_point(c: ApmConstellation, k: int, p: int, m: int) -> complex:
    return c.point(k, p, m)


@dataclass(frozen=True, eq=False)
class IqmConstellation:
    """R in-phase and T quadrature PAM sets with M levels each.

    ``in_phase[r-1]`` and ``quadrature[t-1]`` hold the ascending levels of
    set r / set t.
    """

    in_phase: np.ndarray
    quadrature: np.ndarray
    energy: float = 1.0

    def __post_init__(self):
        for name in ("in_phase", "quadrature"):
            arr = np.atleast_2d(np.asarray(getattr(self, name), dtype=float))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.in_phase.shape[1] != self.quadrature.shape[1]:
            raise ValueError("in-phase and quadrature sets must have the same size M")

    @property
    def r(self) -> int:
        return self.in_phase.shape[0]

    @property
    def t(self) -> int:
        return self.quadrature.shape[0]

    @property
    def m(self) -> int:
        return self.in_phase.shape[1]

    def point(self, r: int, t: int, a: int, b: int) -> complex:
        if not (1 <= r <= self.r and 1 <= t <= self.t and 0 <= a < self.m and 0 <= b < self.m):
            raise ValueError(f"(r={r}, t={t}, a={a}, b={b}) out of range")
        return complex(self.in_phase[r - 1, a], self.quadrature[t - 1, b])

    def points(self) -> np.ndarray:
        """All points as an array indexed [r-1, t-1, a*M + b]."""
        x = self.in_phase[:, None, :, None]
        z = self.quadrature[None, :, None, :]
        return (x + 1j * z).reshape(self.r, self.t, self.m * self.m)


def pam_levels(size: int, energy: float = 0.5) -> np.ndarray:
    """Ascending equally spaced PAM levels with mean squared value ``energy``."""
    if size == 1:
        return np.array([math.sqrt(energy)])
    spacing = math.sqrt(12 * energy / (size * size - 1))
    return (2 * np.arange(size) - (size - 1)) * spacing / 2


def disjoint_pam_sets(num_sets: int, m: int, energy: float = 0.5) -> np.ndarray:
    """Deal a (num_sets*m)-PAM alphabet round-robin into ``num_sets`` sets."""
    levels = pam_levels(num_sets * m, energy)
    return np.stack([levels[r::num_sets] for r in range(num_sets)])


def build_iqm(r: int, t: int, m: int, energy: float = 1.0) -> IqmConstellation:
    for name, v in (("r", r), ("t", t), ("m", m)):
        if v < 1:
            raise ValueError(f"{name} must be >= 1, got {v}")
    return IqmConstellation(
        disjoint_pam_sets(r, m, energy / 2), disjoint_pam_sets(t, m, energy / 2), energy
    )


def iqm_from_levels(in_phase, quadrature, energy: float = 1.0) -> IqmConstellation:
    """Custom level tables.  A flat sequence means one level per set (M = 1)."""
    in_phase = np.asarray(in_phase, dtype=float)
    quadrature = np.asarray(quadrature, dtype=float)
    if in_phase.ndim == 1:
        in_phase = in_phase[:, None]
    if quadrature.ndim == 1:
        quadrature = quadrature[:, None]
    return IqmConstellation(in_phase, quadrature, energy)


@dataclass(frozen=True)
class ApmMed:
    """Analytic APM distances; ``None`` marks a distance that does not exist."""

    d1: float | None
    d2: float | None
    d3: float | None
    d4: float | None
    d_min: float | None


@dataclass(frozen=True)
class IqmMed:
    d_min: float | None
    d1: float | None


def analytic_med_apm(c: ApmConstellation) -> ApmMed:
    """Closed-form MEDs of a ring-rotated APM constellation.

    d1: within the innermost ring; d2: between rings 1 and 2; d3: between
    rings K-2 and K (which share phases after rotation); d4: between points of
    one phase set on the innermost ring; d_min: sqrt(2) times the smallest of
    d1..d3, the codebook lower bound.
    """
    k, pm = c.k, c.p * c.m
    scale = 2 * math.sqrt(2) / math.sqrt(k + 1)
    d1 = scale * math.sin(math.pi / pm) if pm > 1 else None
    d2 = math.sqrt((6 - 4 * math.sqrt(2) * math.cos(math.pi / pm)) / (k + 1)) if k >= 2 else None
    d3 = math.sqrt(2 / (k + 1)) * (math.sqrt(k) - math.sqrt(k - 2)) if k >= 3 else None
    d4 = scale * math.sin(math.pi / c.m) if c.m > 1 else None
    candidates = [d for d in (d1, d2, d3) if d is not None]
    d_min = math.sqrt(2) * min(candidates) if candidates else None
    return ApmMed(d1, d2, d3, d4, d_min)


def analytic_med_iqm(c: IqmConstellation) -> IqmMed:
    xi, m = max(c.r, c.t), c.m
    d_min = 2 * math.sqrt(3 / ((xi * m) ** 2 - 1)) if xi * m > 1 else None
    d1 = math.sqrt(6 / (m * m - xi ** -2)) if m > 1 else None
    return IqmMed(d_min, d1)


@dataclass(frozen=True)
class MedResult:
    value: float
    pair: tuple[int, int]


def brute_force_med(points) -> MedResult:
    """Exact minimum pairwise distance by exhaustive scan.

    ``points`` is a 1-D array of constellation points or a 2-D array whose
    rows are codewords (Euclidean distance over the whole row).
    """
    x = np.asarray(points, dtype=complex)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[0] < 2:
        raise ValueError("need at least two elements")
    chunk = max(1, 2**22 // (x.shape[0] * x.shape[1]))
    best, pair = math.inf, (0, 0)
    for start in range(0, x.shape[0] - 1, chunk):
        block = x[start:start + chunk]
        d2 = (np.abs(block[:, None, :] - x[None, :, :]) ** 2).sum(axis=-1)
        rows = np.arange(block.shape[0])[:, None] + start
        d2[np.arange(x.shape[0])[None, :] <= rows] = np.inf
        flat = int(np.argmin(d2))
        i, j = divmod(flat, x.shape[0])
        if d2[i, j] < best:
            best, pair = float(d2[i, j]), (i + start, j)
    return MedResult(math.sqrt(best), pair)
