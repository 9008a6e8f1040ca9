"""Conjugate and cut loci of the base point O.

Predicted conjugate times along the geodesic with initial velocity
``H = [diag(h) | 0]`` (``|h| = 1``) come in four families, ``lam >= 1``:

    T1+  lam pi / |h_p + h_q|   multiplicity 2       (p < q)
    T1-  lam pi / |h_p - h_q|   multiplicity 2       (p < q)
    T2   lam pi / (2 |h_p|)     multiplicity 1
    T3   lam pi / |h_p|         multiplicity 2|m - n|  (m != n only)

Detection is chart-free: the differential of ``B -> projector(Exp B)`` loses
rank exactly at conjugate parameters, and its kernel dimension is the
multiplicity.  The chart map ``Z(B)`` cannot see the T2/T3 points because
they sit on the polar divisor where ``Z`` blows up.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from . import kernels
from .errors import KNotBlockDiagonal, ZeroTangent
from .grassmann import POLAR_TOL, Plane, Shape, base_point, geodesic, top_block_floor
from .matfun import principal_angles

MERGE_TOL = 1e-12
RANK_TOL = 1e-6
TOL_ANGLE = 1e-6
SCAN_STEP = 1e-2
MATCH_WINDOW = 1e-2
EDGE_TOL = 1e-6  # refined points this far past t_max still count as inside
STRATUM_TOL = 1e-8


class Family(enum.Enum):
    T1_PLUS = "T1+"
    T1_MINUS = "T1-"
    T2 = "T2"
    T3 = "T3"

    @property
    def stratum(self) -> str:
        return "I_stratum" if self in (Family.T1_PLUS, Family.T1_MINUS) else "W_stratum"


@dataclass(frozen=True)
class ConjugateTimeRecord:
    """One predicted conjugate time.

    Indices ``p``, ``q`` are 1-based.  When several families land on the same
    time (always the case for T2 with even ``lam`` and T3 with ``lam/2``) the
    record is merged: ``multiplicity`` is the sum and ``components`` lists the
    constituent records.
    """

    t: float
    family: Family
    multiplicity: int
    p: int
    q: int | None
    lam: int
    components: tuple["ConjugateTimeRecord", ...] = field(default=(), compare=False)

    @property
    def families(self) -> tuple[Family, ...]:
        parts = self.components or (self,)
        return tuple(c.family for c in parts)

    @property
    def expected_strata(self) -> frozenset[str]:
        return frozenset(f.stratum for f in self.families)


def check_direction(h, r: int | None = None) -> np.ndarray:
    h = np.asarray(h, dtype=float).ravel()
    if r is not None and h.size != r:
        raise ValueError(f"direction must have length r={r}, got {h.size}")
    if abs(float(h @ h) - 1.0) > 1e-12:
        raise ValueError(f"direction must be unit length, |h|^2 = {float(h @ h)!r}")
    return h


def direction_tangent(shape: Shape, h) -> np.ndarray:
    """The tangent ``sum h_i D_{i, n+i}`` as an ``n x m`` matrix ``[diag(h) | 0]``."""
    h = check_direction(h, shape.r)
    b = np.zeros((shape.n, shape.m), dtype=complex)
    idx = np.arange(shape.r)
    b[idx, idx] = h
    return b


def _raw_times(shape: Shape, h: np.ndarray, t_max: float) -> list[ConjugateTimeRecord]:
    out = []
    r = shape.r

    def emit(rate, family, mult, p, q):
        if rate <= 0:
            return
        lam = 1
        while lam * np.pi / rate <= t_max:
            out.append(ConjugateTimeRecord(lam * np.pi / rate, family, mult, p, q, lam))
            lam += 1

    for p in range(r):
        for q in range(p + 1, r):
            emit(abs(h[p] + h[q]), Family.T1_PLUS, 2, p + 1, q + 1)
            emit(abs(h[p] - h[q]), Family.T1_MINUS, 2, p + 1, q + 1)
    for p in range(r):
        emit(2 * abs(h[p]), Family.T2, 1, p + 1, None)
        if shape.m != shape.n:
            emit(abs(h[p]), Family.T3, 2 * abs(shape.m - shape.n), p + 1, None)
    return out


def conjugate_times(shape: Shape, h, t_max: float) -> list[ConjugateTimeRecord]:
    """Predicted conjugate times in ``(0, t_max]``, ascending, coincident ones merged."""
    h = check_direction(h, shape.r)
    raw = sorted(_raw_times(shape, h, t_max), key=lambda rec: (rec.t, list(Family).index(rec.family)))
    merged: list[list[ConjugateTimeRecord]] = []
    for rec in raw:
        if merged and rec.t - merged[-1][0].t <= MERGE_TOL:
            merged[-1].append(rec)
        else:
            merged.append([rec])
    result = []
    for group in merged:
        if len(group) == 1:
            result.append(group[0])
            continue
        head = group[0]
        result.append(
            ConjugateTimeRecord(
                t=head.t,
                family=head.family,
                multiplicity=sum(g.multiplicity for g in group),
                p=head.p,
                q=head.q,
                lam=head.lam,
                components=tuple(group),
            )
        )
    return result


def _check_block_diagonal(k: np.ndarray, n: int) -> None:
    if max(np.abs(k[:n, n:]).max(initial=0.0), np.abs(k[n:, :n]).max(initial=0.0)) > 1e-10:
        raise KNotBlockDiagonal("k must be diag(k1, k2) with k1 in U(n), k2 in U(m)")


def direction_plane(shape: Shape, h, t: float, k=None) -> Plane:
    plane = geodesic(direction_tangent(shape, h), t)
    if k is None:
        return plane
    k = np.asarray(k, dtype=complex)
    if k.shape != (shape.N, shape.N):
        raise KNotBlockDiagonal(f"k must be {shape.N}x{shape.N}, got {k.shape}")
    _check_block_diagonal(k, shape.n)
    return plane.transform(k)


def projector_map(shape: Shape):
    """Realified ``R^{2nm} -> R^{2 N^2}``, ``B -> projector(Exp B)``.

    Plain numpy, independent of the batched kernels; pairs with
    :func:`grassgeo.matfun.differential_rank`.
    """
    nm = shape.n * shape.m

    def fn(x):
        x = np.asarray(x, dtype=float)
        b = (x[:nm] + 1j * x[nm:]).reshape(shape.n, shape.m)
        proj = geodesic(b, 1.0).projector()
        return np.concatenate([proj.real.ravel(), proj.imag.ravel()])

    return fn


def realify(b) -> np.ndarray:
    b = np.asarray(b, dtype=complex).ravel()
    return np.concatenate([b.real, b.imag])


def _relative_singulars(b, ts) -> np.ndarray:
    jac = kernels.projector_jacobians(b, np.atleast_1d(ts))
    s = np.linalg.svd(jac, compute_uv=False)
    top = s[:, :1]
    return np.divide(s, top, out=np.zeros_like(s), where=top > 0)


def conjugacy_multiplicity(b, t: float, rank_tol: float = RANK_TOL) -> int:
    """Kernel dimension of the projector-map differential at ``t b``."""
    rel = _relative_singulars(b, [t])[0]
    return int(np.count_nonzero(rel <= rank_tol))


@dataclass(frozen=True)
class Detection:
    t: float
    multiplicity: int
    singulars: tuple[float, ...]


def detect_conjugate_points(
    b,
    t_max: float,
    step: float = SCAN_STEP,
    rank_tol: float = RANK_TOL,
) -> list[Detection]:
    """Scan ``t`` on a grid, refine each dip of the smallest singular value.

    Every local minimum of the smallest relative singular value is polished
    with bounded Brent minimization; it counts as a detection when at least
    one singular value falls below ``rank_tol`` there.
    """
    b = np.asarray(b, dtype=complex)
    ts = np.arange(1, int(np.floor(t_max / step)) + 3) * step
    low = _relative_singulars(b, ts)[:, -1]
    found = []
    for i in range(1, len(ts) - 1):
        if not (low[i] <= low[i - 1] and low[i] < low[i + 1]):
            continue
        res = minimize_scalar(
            lambda t: _relative_singulars(b, [t])[0, -1],
            bounds=(ts[i - 1], ts[i + 1]),
            method="bounded",
            options={"xatol": 1e-12},
        )
        t_star = float(res.x)
        rel = _relative_singulars(b, [t_star])[0]
        mult = int(np.count_nonzero(rel <= rank_tol))
        if mult and t_star <= t_max + EDGE_TOL:
            found.append(Detection(t_star, mult, tuple(np.sort(rel)[: mult + 1].tolist())))
    return found


@dataclass(frozen=True)
class Match:
    record: ConjugateTimeRecord
    detection: Detection | None

    @property
    def ok(self) -> bool:
        return (
            self.detection is not None
            and abs(self.detection.t - self.record.t) <= MATCH_WINDOW
            and self.detection.multiplicity == self.record.multiplicity
        )


@dataclass(frozen=True)
class ScanComparison:
    matches: tuple[Match, ...]
    spurious: tuple[Detection, ...]

    @property
    def agreement(self) -> bool:
        return all(m.ok for m in self.matches) and not self.spurious


def compare_detections(
    predicted: Sequence[ConjugateTimeRecord],
    detected: Sequence[Detection],
    window: float = MATCH_WINDOW,
) -> ScanComparison:
    used: set[int] = set()
    matches = []
    for rec in predicted:
        best = None
        for j, det in enumerate(detected):
            gap = abs(det.t - rec.t)
            if j in used or gap > window:
                continue
            if best is None or gap < abs(detected[best].t - rec.t):
                best = j
        if best is not None:
            used.add(best)
        matches.append(Match(rec, None if best is None else detected[best]))
    spurious = tuple(d for j, d in enumerate(detected) if j not in used)
    return ScanComparison(tuple(matches), spurious)


@dataclass(frozen=True)
class ConjugateClass:
    flags: frozenset[str]
    witness: tuple[float, ...]


def stationary_angles(p: Plane) -> np.ndarray:
    """The ``r`` principal angles with O that can move; for ``n > m`` the
    ``n - m`` forced zeros are dropped."""
    s = p.shape
    angles = principal_angles(p.frame, base_point(s).frame)
    return angles[s.n - s.r:]


def classify_conjugate(p: Plane, tol_angle: float = TOL_ANGLE) -> ConjugateClass:
    angles = stationary_angles(p)
    flags = set()
    if angles.size > 1 and np.min(np.diff(np.sort(angles))) <= tol_angle:
        flags.add("I_stratum")
    if np.any(angles <= tol_angle) or np.any(angles >= np.pi / 2 - tol_angle):
        flags.add("W_stratum")
    return ConjugateClass(frozenset(flags), tuple(float(a) for a in angles))


def stratum_intersection_dim(p: Plane, dim: int, tail: bool = False, tol: float = STRATUM_TOL) -> int:
    """``dim(P ∩ C^dim)`` with ``C^dim`` spanned by the first ``dim`` basis
    vectors, or the last ``dim`` when ``tail`` is set."""
    s = p.shape
    if not 1 <= dim <= s.N:
        raise ValueError(f"subspace dimension must lie in [1, {s.N}], got {dim}")
    residual = np.array(p.frame)
    if tail:
        residual[s.N - dim:] = 0
    else:
        residual[:dim] = 0
    sv = np.linalg.svd(residual, compute_uv=False)
    return s.n - int(np.count_nonzero(sv > tol))


def in_stratum_v(p: Plane, dim: int, level: int, tail: bool = False) -> bool:
    return stratum_intersection_dim(p, dim, tail) >= level


def in_stratum_w(p: Plane, dim: int, level: int, tail: bool = False) -> bool:
    return stratum_intersection_dim(p, dim, tail) == level


def cw_components(p: Plane) -> frozenset[str]:
    """Which pieces of the W-part of the conjugate locus contain ``p``.

    ``V^m`` is taken over ``O^perp`` (the last m coordinates) at level 1;
    ``V^n`` over ``O`` itself at level 1 when ``n <= m`` and ``n - m + 1``
    otherwise.
    """
    s = p.shape
    out = set()
    if stratum_intersection_dim(p, s.m, tail=True) >= 1:
        out.add("V^m_1")
    level = 1 if s.n <= s.m else s.n - s.m + 1
    if stratum_intersection_dim(p, s.n) >= level:
        out.add(f"V^n_{level}")
    return frozenset(out)


def cut_time(b) -> float:
    """First time the largest principal angle with O reaches pi/2."""
    b = np.asarray(b, dtype=complex)
    smax = float(np.linalg.norm(b, 2)) if b.size else 0.0
    if smax == 0.0:
        raise ZeroTangent("cut time of the zero tangent is undefined")
    return np.pi / (2 * smax)


def is_cut_locus(p: Plane, tol: float = POLAR_TOL) -> bool:
    """Membership in the polar divisor of O, which is the cut locus of O."""
    return top_block_floor(p) <= tol


def random_generic_direction(
    rng: np.random.Generator,
    shape: Shape,
    min_component: float = 0.25,
    min_gap: float = 0.05,
    horizon: float = 1.1,
    max_tries: int = 10_000,
) -> tuple[np.ndarray, float]:
    """Draw ``h`` whose predicted times up to ``horizon * pi / min|h_i|`` are
    well separated; returns ``(h, t_max)``."""
    for _ in range(max_tries):
        h = rng.standard_normal(shape.r)
        h /= np.linalg.norm(h)
        h /= np.sqrt(h @ h)  # second pass brings |h|^2 to within rounding of 1
        if np.min(np.abs(h)) < min_component:
            continue
        t_max = horizon * np.pi / np.min(np.abs(h))
        # the first time past t_max must also stay clear of the window edge
        times = np.array([rec.t for rec in conjugate_times(shape, h, t_max + min_gap)])
        gaps = np.diff(np.sort(np.concatenate([[0.0], times, [t_max]])))
        if np.any(times <= t_max) and gaps.min() >= min_gap:
            return h, t_max
    raise RuntimeError("could not draw a generic direction")
