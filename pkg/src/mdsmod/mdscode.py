"""Single-parity MDS code over the integer alphabet {1..q}.

A codeword is an n-tuple whose entries sum to 0 modulo q.  The first n-1
entries are free, the last one is the parity symbol, which gives q**(n-1)
codewords at minimum Hamming distance two.

Bits are mapped to tuples by reading them as an unsigned integer (MSB first)
and writing that integer in base q with n-1 digits, most significant digit
first.  Only the first 2**f tuples in lexicographic order are reachable from
f = floor(log2(q**(n-1))) bits; any other tuple demaps to the f low-order bits
of its integer value.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class MdsParams:
    q: int
    n: int

    def __post_init__(self):
        if self.q < 1:
            raise ValueError(f"alphabet size must be >= 1, got q={self.q}")
        if self.n < 2:
            raise ValueError(f"tuple length must be >= 2, got n={self.n}")

    @property
    def size(self) -> int:
        return self.q ** (self.n - 1)

    @property
    def bits(self) -> int:
        return index_bits(self.q, self.n)


def index_bits(q: int, n: int) -> int:
    """floor(log2(q**(n-1))), computed exactly on integers."""
    return (q ** (n - 1)).bit_length() - 1


def _check_symbols(values: Sequence[int], q: int) -> None:
    for v in values:
        if not 1 <= v <= q:
            raise ValueError(f"symbol {v} outside alphabet 1..{q}")


def parity_symbol(prefix_sum, q):
    """Symbol in 1..q that brings ``prefix_sum`` to 0 mod q. Works on arrays."""
    r = np.mod(prefix_sum, q)
    return np.where(r == 0, q, q - r)


def complete_tuple(prefix: Sequence[int], params: MdsParams) -> tuple[int, ...]:
    if len(prefix) != params.n - 1:
        raise ValueError(f"prefix must have {params.n - 1} symbols, got {len(prefix)}")
    prefix = [int(v) for v in prefix]
    _check_symbols(prefix, params.q)
    return (*prefix, int(parity_symbol(sum(prefix), params.q)))


def is_codeword(t: Sequence[int], params: MdsParams) -> bool:
    return (
        len(t) == params.n
        and all(1 <= v <= params.q for v in t)
        and sum(t) % params.q == 0
    )


def enumerate_codewords(params: MdsParams) -> list[tuple[int, ...]]:
    """All q**(n-1) codewords, ordered lexicographically by their prefix."""
    alphabet = range(1, params.q + 1)
    return [
        complete_tuple(prefix, params)
        for prefix in itertools.product(alphabet, repeat=params.n - 1)
    ]


def bits_to_tuple(bits: Sequence[int], params: MdsParams) -> tuple[int, ...]:
    f = params.bits
    if len(bits) != f:
        raise ValueError(f"expected {f} bits for q={params.q}, n={params.n}, got {len(bits)}")
    d = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"bit value {b!r} is not 0/1")
        d = (d << 1) | int(b)
    digits = []
    for _ in range(params.n - 1):
        d, a = divmod(d, params.q)
        digits.append(a)
    return complete_tuple([a + 1 for a in reversed(digits)], params)


def tuple_to_bits(t: Sequence[int], params: MdsParams) -> list[int]:
    t = [int(v) for v in t]
    if not is_codeword(t, params):
        raise ValueError(f"{tuple(t)} is not a codeword for q={params.q}, n={params.n}")
    d = 0
    for v in t[:-1]:
        d = d * params.q + (v - 1)
    f = params.bits
    d %= 1 << f
    return [(d >> (f - 1 - i)) & 1 for i in range(f)]


# Vectorised forms. Leading axes are batch axes; the last axis holds bits or symbols.

def _pack(bits: np.ndarray) -> np.ndarray:
    f = bits.shape[-1]
    if f > 62:
        raise ValueError("bit fields wider than 62 bits are not supported")
    weights = np.left_shift(np.int64(1), np.arange(f - 1, -1, -1, dtype=np.int64))
    return bits.astype(np.int64) @ weights if f else np.zeros(bits.shape[:-1], np.int64)


def _unpack(values: np.ndarray, f: int) -> np.ndarray:
    shifts = np.arange(f - 1, -1, -1, dtype=np.int64)
    return ((values[..., None] >> shifts) & 1).astype(np.uint8)


def bits_to_tuples(bits: np.ndarray, q: int, n: int) -> np.ndarray:
    bits = np.asarray(bits)
    if bits.shape[-1] != index_bits(q, n):
        raise ValueError(f"expected {index_bits(q, n)} bits, got {bits.shape[-1]}")
    d = _pack(bits)
    powers = q ** np.arange(n - 2, -1, -1, dtype=np.int64)
    prefix = (d[..., None] // powers) % q + 1
    last = parity_symbol(prefix.sum(axis=-1), q)
    return np.concatenate([prefix, last[..., None]], axis=-1)


def tuples_to_bits(tuples: np.ndarray, q: int, n: int) -> np.ndarray:
    """Inverse of :func:`bits_to_tuples`; unreachable tuples keep their low bits.

    Tuples are trusted to be codewords (no validation on this path).
    """
    tuples = np.asarray(tuples, dtype=np.int64)
    f = index_bits(q, n)
    if q ** (n - 1) >= 2**62:
        raise ValueError("codebook too large for int64 arithmetic")
    powers = q ** np.arange(n - 2, -1, -1, dtype=np.int64)
    d = (tuples[..., :-1] - 1) @ powers
    return _unpack(d & ((1 << f) - 1), f)


def reachable_tuples(q: int, n: int) -> np.ndarray:
    """The 2**f tuples reachable from f index bits, in bit-pattern order."""
    f = index_bits(q, n)
    return bits_to_tuples(_unpack(np.arange(2**f, dtype=np.int64), f), q, n)


def hamming_distance(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x != y for x, y in zip(a, b, strict=True))
