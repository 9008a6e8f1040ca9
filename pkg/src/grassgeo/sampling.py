"""Seeded random inputs.

All sweeps draw from ``numpy.random.Generator(Philox(seed))``, a
counter-based generator, so a given seed yields the same inputs on every
platform.  Complex Gaussians take the real parts first, then the imaginary
parts, each as one ``standard_normal`` call in C order.
"""

from __future__ import annotations

import numpy as np


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return re + 1j * im


def random_unitary(rng: np.random.Generator, k: int) -> np.ndarray:
    """Haar-distributed ``k x k`` unitary (QR with phase correction)."""
    q, r = np.linalg.qr(complex_normal(rng, (k, k)))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_frame(rng: np.random.Generator, n: int, m: int) -> np.ndarray:
    q, _ = np.linalg.qr(complex_normal(rng, (n + m, n)))
    return q


def random_tangent(rng: np.random.Generator, n: int, m: int, unit: bool = True) -> np.ndarray:
    b = complex_normal(rng, (n, m))
    if unit:
        b = b / np.linalg.norm(b)
    return b


def random_block_unitary(rng: np.random.Generator, n: int, m: int) -> np.ndarray:
    k = np.zeros((n + m, n + m), dtype=complex)
    k[:n, :n] = random_unitary(rng, n)
    k[n:, n:] = random_unitary(rng, m)
    return k
