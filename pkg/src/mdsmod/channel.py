"""Frequency-domain Rayleigh fading with AWGN: y = diag(s) h + n.

Subcarriers are assumed ideally interleaved, so every tap is an independent
CN(0, 1) draw.  Noise is CN(0, N0) with N0 = 10**(-snr_db/10) for unit
average symbol energy.
"""

from __future__ import annotations

import numpy as np

_HALF = np.sqrt(0.5)


def snr_to_n0(snr_db) -> float | np.ndarray:
    n0 = np.power(10.0, -np.asarray(snr_db, dtype=float) / 10.0)
    return float(n0) if n0.ndim == 0 else n0


def complex_normal(rng: np.random.Generator, shape, variance: float = 1.0) -> np.ndarray:
    """Circularly-symmetric CN(0, variance) draws (variance/2 per real dimension)."""
    z = rng.standard_normal(tuple(np.atleast_1d(shape)) + (2,))
    return (z[..., 0] + 1j * z[..., 1]) * (_HALF * np.sqrt(variance))


def sample_realization(rng: np.random.Generator, n) -> np.ndarray:
    return complex_normal(rng, n)


def sample_noise(rng: np.random.Generator, n, n0: float) -> np.ndarray:
    if n0 <= 0:
        raise ValueError(f"noise variance must be positive, got {n0}")
    return complex_normal(rng, n, n0)


def apply(s, h, noise) -> np.ndarray:
    s, h, noise = (np.asarray(a) for a in (s, h, noise))
    if not (s.shape == h.shape == noise.shape):
        raise ValueError(f"shape mismatch: s{s.shape}, h{h.shape}, noise{noise.shape}")
    return s * h + noise


def derive_rng(seed: int, *path: int) -> np.random.Generator:
    """Independent generator for a position in the (seed, point, block, ...) tree."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *path])))
