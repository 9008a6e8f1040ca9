"""Seven integer invariants of G_n(C^(n+m)) that all equal C(n+m, n).

Each count is reached by its own route so that agreement means something:

* Euler characteristic: ratio of Weyl group orders, ``(n+m)! / (n! m!)``.
* Cells: partitions inside an ``n x m`` box, counted by dynamic programming.
* Borel-Weil dimension: Weyl dimension product for the n-th fundamental
  weight of SU(n+m), in exact rationals.  It also stands in for the number
  of global sections of the line bundle.
* Kodaira N: length of the Plücker vector.
* Orthogonal coherent states: coordinate planes, checked pairwise
  orthogonal numerically.
* Critical points of ``tr(diag(a) P)``: finite-difference gradients at the
  coordinate planes and at random planes.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction
from itertools import combinations
from math import factorial

import numpy as np

from .coherent import plucker
from .errors import DegenerateWeights, TooLarge
from .grassmann import Plane, Shape, base_point, frame_from_z
from .sampling import make_rng, random_frame

CRITICAL_TOL = 1e-7
NONCRITICAL_TOL = 1e-3
ORTHOGONAL_TOL = 1e-12
ENUMERATION_LIMIT = 20


def euler_characteristic(shape: Shape) -> int:
    return factorial(shape.N) // (factorial(shape.n) * factorial(shape.m))


def cell_count(shape: Shape) -> int:
    """Partitions with at most ``n`` parts, each at most ``m``.

    Counted as nonincreasing length-``n`` sequences over ``0..m``;
    ``ways[j]`` holds the sequences built so far whose last entry is ``j``.
    """
    ways = [1] * (shape.m + 1)
    for _ in range(shape.n - 1):
        tail = 0
        nxt = [0] * (shape.m + 1)
        for j in range(shape.m, -1, -1):
            tail += ways[j]
            nxt[j] = tail
        ways = nxt
    return sum(ways)


def borel_weil_dim(shape: Shape) -> int:
    big = shape.N
    weight = [1] * shape.n + [0] * shape.m
    dim = Fraction(1)
    for i in range(big):
        for j in range(i + 1, big):
            dim *= Fraction(weight[i] - weight[j] + j - i, j - i)
    if dim.denominator != 1:
        raise ArithmeticError(f"Weyl product is not an integer: {dim}")
    return int(dim)


def coordinate_planes(shape: Shape) -> list[Plane]:
    planes = []
    for rows in combinations(range(shape.N), shape.n):
        frame = np.zeros((shape.N, shape.n), dtype=complex)
        frame[list(rows), np.arange(shape.n)] = 1.0
        planes.append(Plane(frame))
    return planes


def orthogonal_coherent_count(shape: Shape) -> int:
    """Size of the family of coordinate-plane coherent states.

    The family is checked pairwise orthogonal.  It is maximal because the
    Plücker vectors live in a space of exactly this dimension.
    """
    if shape.N > ENUMERATION_LIMIT:
        raise TooLarge(f"n+m={shape.N} exceeds the enumeration limit {ENUMERATION_LIMIT}")
    vecs = np.array([plucker(p) for p in coordinate_planes(shape)])
    gram = np.abs(vecs.conj() @ vecs.T)
    off = gram - np.diag(np.diag(gram))
    if off.size and off.max() >= ORTHOGONAL_TOL:
        raise ArithmeticError(f"coordinate states not orthogonal: {off.max():.3e}")
    if vecs.shape[0] > vecs.shape[1]:
        raise ArithmeticError("more orthogonal states than the ambient dimension")
    return vecs.shape[0]


def kodaira_n(shape: Shape) -> int:
    return int(plucker(base_point(shape)).size)


def check_weights(a, shape: Shape | None = None) -> np.ndarray:
    a = np.asarray(a, dtype=float).ravel()
    if shape is not None and a.size != shape.N:
        raise ValueError(f"need {shape.N} weights, got {a.size}")
    gaps = np.diff(np.sort(a))
    if gaps.size and gaps.min() <= 1e-9:
        raise DegenerateWeights("energy weights must be pairwise distinct")
    return a


def energy(a: np.ndarray, p: Plane) -> float:
    proj = p.projector()
    return float(np.real(np.sum(a * np.diagonal(proj))))


def energy_gradient_norm(a: np.ndarray, centre: np.ndarray, n: int, step: float = 1e-5) -> float:
    """Gradient norm of the energy in the chart centred at a plane.

    ``centre`` is a unitary whose first ``n`` columns frame the plane; chart
    points are ``centre @ frame_from_z(z)``.  Central differences in the
    realified ``z``.
    """
    m = centre.shape[0] - n
    grad = np.zeros(2 * n * m)
    for k in range(2 * n * m):
        dz = np.zeros(n * m, dtype=complex)
        dz[k % (n * m)] = step if k < n * m else 1j * step
        dz = dz.reshape(n, m)
        fp = energy(a, frame_from_z(dz).transform(centre))
        fm = energy(a, frame_from_z(-dz).transform(centre))
        grad[k] = (fp - fm) / (2 * step)
    return float(np.linalg.norm(grad))


def _permutation_centre(shape: Shape, rows) -> np.ndarray:
    order = list(rows) + [i for i in range(shape.N) if i not in rows]
    centre = np.zeros((shape.N, shape.N), dtype=complex)
    centre[order, np.arange(shape.N)] = 1.0
    return centre


def energy_critical_check(
    shape: Shape,
    a,
    samples: int = 50,
    seed: int = 0,
) -> tuple[int, bool]:
    """Count critical coordinate planes of ``f(P) = tr(diag(a) P)``.

    A coordinate plane passes when its gradient norm is below
    ``CRITICAL_TOL``.  ``samples`` random planes must all have gradient norm
    above ``NONCRITICAL_TOL`` for the count to be certified.
    """
    a = check_weights(a, shape)
    count = total = 0
    for rows in combinations(range(shape.N), shape.n):
        total += 1
        if energy_gradient_norm(a, _permutation_centre(shape, rows), shape.n) < CRITICAL_TOL:
            count += 1
    rng = make_rng(seed)
    rejected = True
    for _ in range(samples):
        centre, _r = np.linalg.qr(random_frame(rng, shape.n, shape.m), mode="complete")
        if energy_gradient_norm(a, centre, shape.n) <= NONCRITICAL_TOL:
            rejected = False
    certified = rejected and count == total
    return count, certified


@dataclass(frozen=True)
class SevenNumbersReport:
    orthogonal_coherent_count: int
    sections_dim: int
    borel_weil_dim: int
    kodaira_N: int
    critical_point_count: int
    euler_characteristic: int
    cell_count: int
    critical_certified: bool = True

    @property
    def values(self) -> tuple[int, ...]:
        return (
            self.orthogonal_coherent_count,
            self.sections_dim,
            self.borel_weil_dim,
            self.kodaira_N,
            self.critical_point_count,
            self.euler_characteristic,
            self.cell_count,
        )

    @property
    def all_equal(self) -> bool:
        return len(set(self.values)) == 1

    def to_dict(self) -> dict:
        out = asdict(self)
        out["all_equal"] = self.all_equal
        return out


def seven_numbers(shape: Shape, a, samples: int = 50, seed: int = 0) -> SevenNumbersReport:
    bw = borel_weil_dim(shape)
    critical, certified = energy_critical_check(shape, a, samples=samples, seed=seed)
    return SevenNumbersReport(
        orthogonal_coherent_count=orthogonal_coherent_count(shape),
        sections_dim=bw,
        borel_weil_dim=bw,
        kodaira_N=kodaira_n(shape),
        critical_point_count=critical,
        euler_characteristic=euler_characteristic(shape),
        cell_count=cell_count(shape),
        critical_certified=certified,
    )
