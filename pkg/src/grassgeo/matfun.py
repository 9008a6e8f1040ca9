"""Dense complex matrix functions driven by the SVD.

Everything here works on plain ``numpy`` arrays.  An "odd" matrix function
of a rectangular ``B = U diag(s) V^H`` is ``U diag(g(s)) V^H`` with ``g`` odd,
which is the same thing as ``B f(sqrt(B^H B)) / sqrt(B^H B)`` for
``g(s) = s f(s) / s``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import EvaluationFailure, KernelPole, ShapeMismatch

SMALL_SIGMA = 1e-7
TOL_POLE = 1e-9


class ScalarKernel(enum.Enum):
    """Scalar functions applied to singular values.

    The ``*C`` members are the divided forms ``f(s)/s``; their value at zero
    is the analytic limit, used whenever ``s < SMALL_SIGMA``.
    """

    TAN = "tan"
    ARCTAN = "arctan"
    SIN = "sin"
    COS = "cos"
    SINC = "sinc"
    TANC = "tanc"
    ARCTANC = "arctanc"

    @property
    def value_at_zero(self) -> float:
        return _AT_ZERO[self]

    @property
    def is_divided(self) -> bool:
        return self in (ScalarKernel.SINC, ScalarKernel.TANC, ScalarKernel.ARCTANC)

    @property
    def is_odd(self) -> bool:
        return self is not ScalarKernel.COS

    def has_pole(self) -> bool:
        return self in (ScalarKernel.TAN, ScalarKernel.TANC)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        if self.has_pole():
            _check_poles(s)
        if self is ScalarKernel.TAN:
            return np.tan(s)
        if self is ScalarKernel.ARCTAN:
            return np.arctan(s)
        if self is ScalarKernel.SIN:
            return np.sin(s)
        if self is ScalarKernel.COS:
            return np.cos(s)
        base = {
            ScalarKernel.SINC: np.sin,
            ScalarKernel.TANC: np.tan,
            ScalarKernel.ARCTANC: np.arctan,
        }[self]
        small = np.abs(s) < SMALL_SIGMA
        safe = np.where(small, 1.0, s)
        return np.where(small, self.value_at_zero, base(safe) / safe)


_AT_ZERO = {
    ScalarKernel.TAN: 0.0,
    ScalarKernel.ARCTAN: 0.0,
    ScalarKernel.SIN: 0.0,
    ScalarKernel.COS: 1.0,
    ScalarKernel.SINC: 1.0,
    ScalarKernel.TANC: 1.0,
    ScalarKernel.ARCTANC: 1.0,
}


def _check_poles(s: np.ndarray) -> None:
    # poles of tan at pi/2 + k pi
    offset = np.abs(np.remainder(s, np.pi) - np.pi / 2)
    if np.any(offset < TOL_POLE):
        raise KernelPole(f"singular value within {TOL_POLE} of a pole of tan: {s}")


@dataclass(frozen=True)
class SpectralFactorization:
    """Full SVD ``B = U @ Sigma @ V^H`` with ``singulars`` sorted descending."""

    left_factors: np.ndarray
    singulars: np.ndarray
    right_factors: np.ndarray

    @property
    def rank_bound(self) -> int:
        return len(self.singulars)

    def sigma(self) -> np.ndarray:
        n = self.left_factors.shape[0]
        m = self.right_factors.shape[0]
        out = np.zeros((n, m))
        r = self.rank_bound
        out[:r, :r] = np.diag(self.singulars)
        return out

    def reconstruct(self) -> np.ndarray:
        return self.left_factors @ self.sigma() @ self.right_factors.conj().T


def spectral_factorization(b) -> SpectralFactorization:
    b = np.asarray(b, dtype=complex)
    if b.ndim != 2:
        raise ShapeMismatch(f"expected a matrix, got shape {b.shape}")
    u, s, vh = np.linalg.svd(b, full_matrices=True)
    return SpectralFactorization(u, s, vh.conj().T)


def apply_odd_kernel(b, f: ScalarKernel) -> np.ndarray:
    """Return ``B f(sqrt(B^H B)) / sqrt(B^H B)`` for an odd or divided kernel.

    ``TAN`` and ``TANC`` give the same matrix (likewise ``SIN``/``SINC`` and
    ``ARCTAN``/``ARCTANC``); the divided form is what the formula reads.
    """
    if not f.is_odd:
        raise ValueError(f"{f.value} is not an odd kernel; use hermitian_kernel")
    fac = spectral_factorization(b)
    s = fac.singulars
    g = s * f(s) if f.is_divided else f(s)
    r = fac.rank_bound
    u = fac.left_factors[:, :r]
    v = fac.right_factors[:, :r]
    return (u * g) @ v.conj().T


def hermitian_kernel(b, f: ScalarKernel) -> np.ndarray:
    """Return ``f(sqrt(B B^H))`` as an ``n x n`` Hermitian matrix.

    Singular values are zero-padded to length ``n``, so e.g. ``COS`` yields
    the identity on the null space of ``B^H``.
    """
    fac = spectral_factorization(b)
    n = fac.left_factors.shape[0]
    s = np.zeros(n)
    s[: fac.rank_bound] = fac.singulars
    u = fac.left_factors
    return (u * f(s)) @ u.conj().T


def principal_angles(p, q) -> np.ndarray:
    """Principal angles between the column spans of two orthonormal frames.

    Returned nondecreasing in ``[0, pi/2]``.  Small angles come from the
    sines of the residual ``Q - P P^H Q``, the rest from the cosines of
    ``P^H Q``; arccos alone loses half the digits near zero.
    """
    p = np.asarray(p, dtype=complex)
    q = np.asarray(q, dtype=complex)
    if p.shape != q.shape:
        raise ShapeMismatch(f"frames of shapes {p.shape} and {q.shape}")
    cross = p.conj().T @ q
    cos = np.clip(np.linalg.svd(cross, compute_uv=False), 0.0, 1.0)
    sin = np.clip(np.linalg.svd(q - p @ cross, compute_uv=False)[::-1], 0.0, 1.0)
    angles = np.where(sin**2 < 0.5, np.arcsin(sin), np.arccos(cos))
    return np.sort(angles)


def central_jacobian(fn: Callable[[np.ndarray], np.ndarray], point, step: float) -> np.ndarray:
    point = np.asarray(point, dtype=float)
    cols = []
    for k in range(point.size):
        e = np.zeros_like(point)
        e[k] = step
        try:
            fp = np.asarray(fn(point + e), dtype=float)
            fm = np.asarray(fn(point - e), dtype=float)
        except Exception as exc:
            raise EvaluationFailure(f"map failed near coordinate {k}") from exc
        cols.append((fp - fm).ravel() / (2 * step))
    return np.stack(cols, axis=1)


def differential_rank(
    fn: Callable[[np.ndarray], np.ndarray],
    point,
    step: float | None = None,
    tol: float = 1e-6,
) -> tuple[int, np.ndarray]:
    """Numerical rank of the differential of ``fn`` at ``point``.

    Returns ``(rank, singulars)`` where ``singulars`` are all Jacobian
    singular values sorted ascending; a value counts toward the rank when it
    exceeds ``tol`` times the largest one.
    """
    point = np.asarray(point, dtype=float).ravel()
    if step is None:
        step = 1e-5 * max(1.0, float(np.linalg.norm(point)))
    jac = central_jacobian(fn, point, step)
    s = np.linalg.svd(jac, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0, np.sort(s)
    rank = int(np.count_nonzero(s > tol * s[0]))
    return rank, np.sort(s)
