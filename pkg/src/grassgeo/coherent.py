"""Coherent-state overlaps, Calabi diastasis and the Plücker embedding.

For chart points ``Z1, Z2`` the normalized coherent-state overlap is

    det(I + Z1 Z2^H) / sqrt(det(I + Z1 Z1^H) det(I + Z2 Z2^H)),

the determinant of the Gram matrix of the unnormalized frames ``(I; -Z^H)``.
By Cauchy-Binet it equals the Hermitian product of Plücker vectors, which is
how the tests cross-check it.  The noncompact dual lives on the bounded
domain ``|Z|_2 < 1`` with the kernel ``det(I - Z1 Z2^H)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple

import numpy as np

from .errors import DiastasisUndefined, OutsideDomain, ZeroVector
from .grassmann import Plane, frame_from_z

UNDEFINED_BELOW = 1e-14


@dataclass(frozen=True)
class Overlap:
    value: complex

    @property
    def modulus(self) -> float:
        return abs(self.value)


def _logdet(a) -> tuple[complex, float]:
    sign, logabs = np.linalg.slogdet(a)
    return complex(sign), float(logabs)


def _log_overlap(z1, z2, sign: int) -> tuple[complex, float]:
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    eye = np.eye(z1.shape[0])
    phase, cross = _logdet(eye + sign * z1 @ z2.conj().T)
    _, self1 = _logdet(eye + sign * z1 @ z1.conj().T)
    _, self2 = _logdet(eye + sign * z2 @ z2.conj().T)
    return phase, cross - 0.5 * (self1 + self2)


def overlap(z1, z2) -> Overlap:
    phase, log_mod = _log_overlap(z1, z2, +1)
    return Overlap(phase * np.exp(log_mod))


def diastasis(z1, z2) -> float:
    """``-2 log |overlap|``; undefined when ``z2`` is on the polar divisor of ``z1``."""
    phase, log_mod = _log_overlap(z1, z2, +1)
    if phase == 0 or log_mod < np.log(UNDEFINED_BELOW):
        raise DiastasisUndefined("overlap vanishes: the points are orthogonal states")
    return max(0.0, -2.0 * log_mod)


def cayley_distance(v1, v2) -> float:
    """Hermitian elliptic distance between the rays of ``v1`` and ``v2``.

    Equal to ``arccos(|<v1, v2>| / (|v1| |v2|))``, evaluated as an ``atan2``
    of the parallel and perpendicular parts so it stays accurate near 0.
    """
    v1 = np.asarray(v1, dtype=complex).ravel()
    v2 = np.asarray(v2, dtype=complex).ravel()
    n1 = np.linalg.norm(v1)
    n2 = np.linalg.norm(v2)
    if n1 == 0 or n2 == 0:
        raise ZeroVector("Cayley distance needs nonzero vectors")
    u1 = v1 / n1
    u2 = v2 / n2
    inner = np.vdot(u1, u2)
    perp = np.linalg.norm(u2 - inner * u1)
    if perp <= 4 * np.finfo(float).eps:
        return 0.0  # same ray up to rounding in the normalization
    return float(np.arctan2(perp, abs(inner)))


def plucker(p: Plane) -> np.ndarray:
    """All ``n x n`` minors of the frame, rows taken in lexicographic subset order."""
    frame = p.frame
    big, n = frame.shape
    rows = np.array(list(combinations(range(big), n)))
    return np.linalg.det(frame[rows])


class DiastasisCheck(NamedTuple):
    diastasis: float
    theta: float
    residual: float


def check_diastasis_relation(z1, z2) -> DiastasisCheck:
    """Compare the kernel diastasis with ``-2 log cos`` of the Plücker-side angle."""
    d = diastasis(z1, z2)
    theta = cayley_distance(plucker(frame_from_z(z1)), plucker(frame_from_z(z2)))
    residual = abs(d + 2.0 * np.log(np.cos(theta)))
    return DiastasisCheck(d, theta, float(residual))


def _check_domain(z) -> None:
    z = np.asarray(z, dtype=complex)
    if z.size and np.linalg.norm(z, 2) >= 1.0:
        raise OutsideDomain("spectral norm must be < 1 on the noncompact dual")


def noncompact_overlap(z1, z2) -> Overlap:
    _check_domain(z1)
    _check_domain(z2)
    phase, log_mod = _log_overlap(z1, z2, -1)
    return Overlap(phase * np.exp(log_mod))


def noncompact_diastasis(z1, z2) -> float:
    """``+2 log |kernel|``, nonnegative on the bounded domain."""
    _check_domain(z1)
    _check_domain(z2)
    _, log_mod = _log_overlap(z1, z2, -1)
    return max(0.0, 2.0 * log_mod)
