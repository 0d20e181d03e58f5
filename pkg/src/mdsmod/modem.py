"""Bit <-> symbol-vector mapping for OFDM-MDS-APM, OFDM-MDS-IQM and plain OFDM.

Every scheme is described per subcarrier by two index alphabets and a set of
points inside each (index1, index2) cell:

* APM: index1 = amplitude ring (q1 = K), index2 = phase set (q2 = P), and the
  within-cell index is one of M phases.
* IQM: index1 = in-phase PAM set (q1 = R), index2 = quadrature PAM set
  (q2 = T), and the within-cell index is a*M + b for PAM levels a and b.
* Plain OFDM: q1 = q2 = 1 and the within-cell index is the symbol label.

The index tuples across the N subcarriers of a group are MDS codewords, which
is what the detectors exploit.  All array functions broadcast over leading
batch axes; the last axis runs over bits or subcarriers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import mdscode
from .constellation import IqmConstellation, build_apm, build_iqm, iqm_from_levels, pam_levels

MAX_TABULATED_BITS = 20


def _log2_exact(m: int, what: str) -> int:
    if m < 1 or m & (m - 1):
        raise ValueError(f"{what} must be a power of two, got {m}")
    return m.bit_length() - 1


@dataclass(frozen=True)
class BitLayout:
    parts: tuple[tuple[str, int], ...]

    @property
    def total(self) -> int:
        return sum(w for _, w in self.parts)

    def __getitem__(self, name: str) -> int:
        return dict(self.parts)[name]

    def slices(self) -> dict[str, slice]:
        out, start = {}, 0
        for name, width in self.parts:
            out[name] = slice(start, start + width)
            start += width
        return out


@dataclass(frozen=True, eq=False)
class GroupIndices:
    """Which cell and which point each subcarrier of a group uses.

    tuple1/tuple2 are 1-based MDS tuples; within is 0-based.
    """

    tuple1: np.ndarray
    tuple2: np.ndarray
    within: np.ndarray

    def __getitem__(self, item) -> "GroupIndices":
        return GroupIndices(self.tuple1[item], self.tuple2[item], self.within[item])

    def __eq__(self, other):
        if not isinstance(other, GroupIndices):
            return NotImplemented
        return all(
            np.array_equal(a, b)
            for a, b in zip(
                (self.tuple1, self.tuple2, self.within), (other.tuple1, other.tuple2, other.within)
            )
        )


@dataclass(frozen=True, eq=False)
class SymbolVector:
    values: np.ndarray
    indices: GroupIndices


def _pack_fields(bits: np.ndarray, count: int, width: int) -> np.ndarray:
    if width == 0:
        return np.zeros(bits.shape[:-1] + (count,), dtype=np.int64)
    b = bits.reshape(bits.shape[:-1] + (count, width)).astype(np.int64)
    return b @ (1 << np.arange(width - 1, -1, -1, dtype=np.int64))


def _unpack_fields(values: np.ndarray, width: int) -> np.ndarray:
    values = np.asarray(values, dtype=np.int64)
    shifts = np.arange(width - 1, -1, -1, dtype=np.int64)
    b = (values[..., None] >> shifts) & 1
    return b.reshape(values.shape[:-1] + (values.shape[-1] * width,)).astype(np.uint8)


class _Scheme:
    """Shared machinery; concrete schemes define q1, q2, points and layout."""

    n: int
    groups: int
    q1: int
    q2: int

    @property
    def name(self) -> str:
        raise NotImplementedError

    @property
    def layout(self) -> BitLayout:
        raise NotImplementedError

    @property
    def points(self) -> np.ndarray:
        """Cell points indexed [index1-1, index2-1, within]."""
        raise NotImplementedError

    @property
    def f(self) -> int:
        return self.layout.total

    @property
    def cell_size(self) -> int:
        return self.points.shape[2]

    @property
    def subcarriers(self) -> int:
        return self.n * self.groups

    def spectral_efficiency(self) -> Fraction:
        return Fraction(self.f, self.n)

    def reachable(self) -> tuple[np.ndarray, np.ndarray]:
        """Reachable tuple lists for index1 and index2, in bit-pattern order."""
        return (
            mdscode.reachable_tuples(self.q1, self.n),
            mdscode.reachable_tuples(self.q2, self.n),
        )

    def indices_from_bits(self, bits: np.ndarray) -> GroupIndices:
        raise NotImplementedError

    def bits_from_indices(self, idx: GroupIndices) -> np.ndarray:
        raise NotImplementedError

    def symbols(self, idx: GroupIndices) -> np.ndarray:
        return self.points[idx.tuple1 - 1, idx.tuple2 - 1, idx.within]

    def encode(self, bits: np.ndarray) -> np.ndarray:
        return self.symbols(self.indices_from_bits(bits))

    @cached_property
    def codebook(self) -> np.ndarray:
        """All 2**f symbol vectors; row i encodes the bit pattern of integer i."""
        if self.f > MAX_TABULATED_BITS:
            raise ValueError(f"codebook of 2**{self.f} words is too large to tabulate")
        bits = mdscode._unpack(np.arange(2**self.f, dtype=np.int64), self.f)
        cb = self.encode(bits)
        cb.setflags(write=False)
        return cb

    def _check_m(self, m: int) -> int:
        if m > 1:
            return _log2_exact(m, "M")
        if m < 1:
            raise ValueError(f"M must be >= 1, got {m}")
        return 0


@dataclass(frozen=True)
class ApmScheme(_Scheme):
    """OFDM-MDS-APM(N, K, P, M); M = 1 is the index-only special case."""

    n: int
    k: int
    p: int
    m: int = 1
    groups: int = 1
    ring_rotation: bool = True

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"N must be >= 2, got {self.n}")
        if min(self.k, self.p) < 1 or self.groups < 1:
            raise ValueError("K, P and G must be >= 1")
        self._check_m(self.m)

    @property
    def name(self) -> str:
        return f"APM({self.n},{self.k},{self.p},{self.m})"

    @property
    def q1(self) -> int:
        return self.k

    @property
    def q2(self) -> int:
        return self.p

    @cached_property
    def constellation(self):
        return build_apm(self.k, self.p, self.m, self.ring_rotation)

    @cached_property
    def points(self) -> np.ndarray:
        return self.constellation.points()

    @cached_property
    def layout(self) -> BitLayout:
        return BitLayout((
            ("f1", mdscode.index_bits(self.k, self.n)),
            ("f2", mdscode.index_bits(self.p, self.n)),
            ("f3", self.n * self._check_m(self.m)),
        ))

    def indices_from_bits(self, bits):
        bits = np.asarray(bits)
        s = self.layout.slices()
        return GroupIndices(
            mdscode.bits_to_tuples(bits[..., s["f1"]], self.k, self.n),
            mdscode.bits_to_tuples(bits[..., s["f2"]], self.p, self.n),
            _pack_fields(bits[..., s["f3"]], self.n, self._check_m(self.m)),
        )

    def bits_from_indices(self, idx):
        return np.concatenate([
            mdscode.tuples_to_bits(idx.tuple1, self.k, self.n),
            mdscode.tuples_to_bits(idx.tuple2, self.p, self.n),
            _unpack_fields(idx.within, self._check_m(self.m)),
        ], axis=-1)


@dataclass(frozen=True)
class IqmScheme(_Scheme):
    """OFDM-MDS-IQM(N, R, T, M); M = 1 is the index-only special case.

    ``levels`` overrides the default disjoint PAM sets (used to reproduce
    hand-picked level tables).
    """

    n: int
    r: int
    t: int
    m: int = 1
    groups: int = 1
    levels: IqmConstellation | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"N must be >= 2, got {self.n}")
        if min(self.r, self.t) < 1 or self.groups < 1:
            raise ValueError("R, T and G must be >= 1")
        self._check_m(self.m)
        if self.levels is not None and (self.levels.r, self.levels.t, self.levels.m) != (
            self.r, self.t, self.m
        ):
            raise ValueError("custom level table does not match (R, T, M)")

    @classmethod
    def with_levels(cls, n: int, in_phase, quadrature, groups: int = 1) -> "IqmScheme":
        c = iqm_from_levels(in_phase, quadrature)
        return cls(n, c.r, c.t, c.m, groups, c)

    @property
    def name(self) -> str:
        return f"IQM({self.n},{self.r},{self.t},{self.m})"

    @property
    def q1(self) -> int:
        return self.r

    @property
    def q2(self) -> int:
        return self.t

    @cached_property
    def constellation(self) -> IqmConstellation:
        return self.levels if self.levels is not None else build_iqm(self.r, self.t, self.m)

    @cached_property
    def points(self) -> np.ndarray:
        return self.constellation.points()

    @cached_property
    def layout(self) -> BitLayout:
        w = self.n * self._check_m(self.m)
        return BitLayout((
            ("f11", mdscode.index_bits(self.r, self.n)),
            ("f12", w),
            ("f21", mdscode.index_bits(self.t, self.n)),
            ("f22", w),
        ))

    def indices_from_bits(self, bits):
        bits = np.asarray(bits)
        s = self.layout.slices()
        w = self._check_m(self.m)
        a = _pack_fields(bits[..., s["f12"]], self.n, w)
        b = _pack_fields(bits[..., s["f22"]], self.n, w)
        return GroupIndices(
            mdscode.bits_to_tuples(bits[..., s["f11"]], self.r, self.n),
            mdscode.bits_to_tuples(bits[..., s["f21"]], self.t, self.n),
            a * self.m + b,
        )

    def bits_from_indices(self, idx):
        w = self._check_m(self.m)
        a, b = np.divmod(np.asarray(idx.within, dtype=np.int64), self.m)
        return np.concatenate([
            mdscode.tuples_to_bits(idx.tuple1, self.r, self.n),
            _unpack_fields(a, w),
            mdscode.tuples_to_bits(idx.tuple2, self.t, self.n),
            _unpack_fields(b, w),
        ], axis=-1)


def gray(i):
    return i ^ (i >> 1)


def psk_points(m: int) -> np.ndarray:
    """M-PSK indexed by natural-binary label."""
    return np.exp(2j * np.pi * np.arange(m) / m)


def qam_points(m: int) -> np.ndarray:
    """Square Gray-labelled QAM with unit average energy, indexed by label.

    The first half of a label's bits selects the in-phase level, the second
    half the quadrature level; each half is Gray coded along its axis.
    """
    bits = _log2_exact(m, "QAM order")
    if bits % 2:
        raise ValueError(f"only square QAM is supported, got M={m}")
    side = 1 << (bits // 2)
    levels = pam_levels(side, 0.5)
    pos = np.empty(side, dtype=np.int64)
    pos[gray(np.arange(side))] = np.arange(side)
    labels = np.arange(m)
    return levels[pos[labels >> (bits // 2)]] + 1j * levels[pos[labels & (side - 1)]]


@dataclass(frozen=True)
class PlainScheme(_Scheme):
    """Conventional OFDM with M-PSK or square M-QAM on every subcarrier."""

    m: int
    family: str = "qam"
    n: int = 1
    groups: int = 1

    def __post_init__(self):
        if self.family not in ("psk", "qam"):
            raise ValueError(f"family must be 'psk' or 'qam', got {self.family!r}")
        if self.m < 2:
            raise ValueError(f"M must be >= 2, got {self.m}")
        _log2_exact(self.m, "M")
        if self.n < 1 or self.groups < 1:
            raise ValueError("N and G must be >= 1")
        self.points  # validates square QAM

    @property
    def name(self) -> str:
        return f"OFDM({self.m}-{self.family.upper()})"

    q1 = 1
    q2 = 1

    @cached_property
    def points(self) -> np.ndarray:
        pts = psk_points(self.m) if self.family == "psk" else qam_points(self.m)
        return pts.reshape(1, 1, self.m)

    @cached_property
    def layout(self) -> BitLayout:
        return BitLayout((("f3", self.n * _log2_exact(self.m, "M")),))

    def reachable(self):
        ones = np.ones((1, self.n), dtype=np.int64)
        return ones, ones

    def indices_from_bits(self, bits):
        bits = np.asarray(bits)
        within = _pack_fields(bits, self.n, _log2_exact(self.m, "M"))
        ones = np.ones_like(within)
        return GroupIndices(ones, ones, within)

    def bits_from_indices(self, idx):
        return _unpack_fields(idx.within, _log2_exact(self.m, "M"))


Scheme = ApmScheme | IqmScheme | PlainScheme


def spectral_efficiency(scheme: Scheme) -> Fraction:
    """Information bits per subcarrier, f / N."""
    return scheme.spectral_efficiency()


def _as_bits(bits, f: int) -> np.ndarray:
    bits = np.asarray(bits)
    if bits.shape[-1:] != (f,):
        raise ValueError(f"expected {f} bits, got shape {bits.shape}")
    if np.any((bits != 0) & (bits != 1)):
        raise ValueError("bits must be 0/1")
    return bits.astype(np.uint8)


def encode_group(bits, scheme: Scheme) -> SymbolVector:
    bits = _as_bits(bits, scheme.f)
    idx = scheme.indices_from_bits(bits)
    return SymbolVector(scheme.symbols(idx), idx)


def demap_group(indices: GroupIndices, scheme: Scheme) -> np.ndarray:
    return scheme.bits_from_indices(indices)


def make_indices(tuple1, tuple2, within=None) -> GroupIndices:
    t1 = np.asarray(tuple1, dtype=np.int64)
    t2 = np.asarray(tuple2, dtype=np.int64)
    w = np.zeros_like(t1) if within is None else np.asarray(within, dtype=np.int64)
    return GroupIndices(t1, t2, w)


def describe(scheme: Scheme) -> dict:
    """Flat description used in CSV/JSON metadata."""
    d = {"scheme": scheme.name, "f": scheme.f, "se": float(scheme.spectral_efficiency())}
    d.update(dict(scheme.layout.parts))
    return d
