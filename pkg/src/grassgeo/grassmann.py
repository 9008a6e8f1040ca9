"""The complex Grassmannian of n-planes in C^(n+m).

Conventions
-----------
* The base point ``O`` is ``span(e_1, ..., e_n)``.
* A tangent (normal-coordinate) vector is an ``n x m`` complex matrix ``B``;
  it generates the antihermitian ``(0 B; -B^H 0)``.  The first ``n`` columns
  of its exponential are the geodesic frame, so the chart coordinate of the
  endpoint is ``Z = B tan(sqrt(B^H B)) / sqrt(B^H B)``.
* The chart cell holds every plane whose top ``n x n`` block is invertible;
  the chart point ``Z`` is the span of ``(I; -Z^H)``.
* Metric scale: a unit-Frobenius ``B`` gives a unit-speed geodesic, and the
  distance is the 2-norm of the principal angles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ChartEscape, OnPolarDivisor, ShapeMismatch
from .matfun import (
    TOL_POLE,
    ScalarKernel,
    apply_odd_kernel,
    principal_angles,
    spectral_factorization,
)

ORTHONORMAL_TOL = 1e-10
PLANE_EQ_TOL = 1e-8
POLAR_TOL = 1e-8


@dataclass(frozen=True)
class Shape:
    n: int
    m: int

    def __post_init__(self):
        if int(self.n) < 1 or int(self.m) < 1:
            raise ValueError(f"n and m must be positive, got ({self.n}, {self.m})")

    @property
    def r(self) -> int:
        return min(self.n, self.m)

    @property
    def N(self) -> int:
        return self.n + self.m

    @property
    def real_dim(self) -> int:
        return 2 * self.n * self.m


class Plane:
    """An n-plane in C^(n+m), held as an orthonormal ``(n+m) x n`` frame.

    The frame is one representative; two planes compare equal through
    principal angles (see :meth:`isclose`), never entrywise.
    """

    __slots__ = ("frame",)

    def __init__(self, frame, check: bool = True):
        frame = np.array(frame, dtype=complex)
        if frame.ndim != 2 or frame.shape[0] <= frame.shape[1]:
            raise ShapeMismatch(f"frame must be tall (n+m) x n, got {frame.shape}")
        if check:
            gram = frame.conj().T @ frame
            err = np.abs(gram - np.eye(frame.shape[1])).max()
            if err > ORTHONORMAL_TOL:
                raise ValueError(f"frame is not orthonormal (error {err:.2e})")
        frame.setflags(write=False)
        self.frame = frame

    @classmethod
    def from_span(cls, vectors) -> "Plane":
        q, _ = np.linalg.qr(np.asarray(vectors, dtype=complex))
        return cls(q)

    @property
    def shape(self) -> Shape:
        big, n = self.frame.shape
        return Shape(n, big - n)

    @property
    def top(self) -> np.ndarray:
        return self.frame[: self.frame.shape[1]]

    @property
    def bottom(self) -> np.ndarray:
        return self.frame[self.frame.shape[1]:]

    def projector(self) -> np.ndarray:
        return self.frame @ self.frame.conj().T

    def transform(self, k) -> "Plane":
        return Plane(np.asarray(k) @ self.frame)

    def isclose(self, other: "Plane", tol: float = PLANE_EQ_TOL) -> bool:
        return bool(np.all(principal_angles(self.frame, other.frame) <= tol))

    def __repr__(self):
        s = self.shape
        return f"Plane(n={s.n}, m={s.m})"


def base_point(shape: Shape) -> Plane:
    return Plane(np.eye(shape.N, shape.n, dtype=complex))


def exp_map(b) -> np.ndarray:
    """Chart coordinate of the geodesic endpoint: ``Z = B tanc(sqrt(B^H B))``."""
    b = np.asarray(b, dtype=complex)
    s = spectral_factorization(b).singulars
    if s.size and s[0] >= np.pi / 2 - TOL_POLE:
        raise ChartEscape(f"largest singular value {s[0]:.6g} reaches pi/2")
    return apply_odd_kernel(b, ScalarKernel.TANC)


def log_map(z) -> np.ndarray:
    return apply_odd_kernel(np.asarray(z, dtype=complex), ScalarKernel.ARCTANC)


def frame_from_z(z) -> Plane:
    """Orthonormal frame ``(I; -Z^H) (I + Z Z^H)^(-1/2)`` of a chart point."""
    z = np.asarray(z, dtype=complex)
    n = z.shape[0]
    w, v = np.linalg.eigh(np.eye(n) + z @ z.conj().T)
    inv_sqrt = (v / np.sqrt(w)) @ v.conj().T
    return Plane(np.vstack([inv_sqrt, -z.conj().T @ inv_sqrt]))


def top_block_floor(p: Plane) -> float:
    """Smallest singular value of the top block, i.e. cos of the largest angle to O."""
    return float(np.linalg.svd(p.top, compute_uv=False)[-1])


def in_chart(p: Plane, tol: float = POLAR_TOL) -> bool:
    return top_block_floor(p) > tol


def z_from_plane(p: Plane, tol: float = POLAR_TOL) -> np.ndarray:
    if not in_chart(p, tol):
        raise OnPolarDivisor(
            f"top block is singular (smallest singular value {top_block_floor(p):.3e})"
        )
    # z = -(L T^-1)^H = -T^-H L^H, i.e. solve T^H z = -L^H
    return np.linalg.solve(p.top.conj().T, -p.bottom.conj().T)


def geodesic(b, t: float) -> Plane:
    """Frame of ``exp(t (0 B; -B^H 0)) O`` via the SVD ``B = U S V^H``.

    Top block ``U cos(tS) U^H``; bottom block ``-V sin(tS) U^H`` restricted
    to the ``r`` singular directions.
    """
    fac = spectral_factorization(b)
    u = fac.left_factors
    v = fac.right_factors
    n = u.shape[0]
    r = fac.rank_bound
    ts = t * fac.singulars
    cos = np.ones(n)
    cos[:r] = np.cos(ts)
    top = (u * cos) @ u.conj().T
    bottom = -(v[:, :r] * np.sin(ts)) @ u[:, :r].conj().T
    return Plane(np.vstack([top, bottom]))


def distance(p: Plane, q: Plane) -> float:
    return float(np.linalg.norm(principal_angles(p.frame, q.frame)))
