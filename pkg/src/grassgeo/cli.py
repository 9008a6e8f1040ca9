"""Command-line drivers: ``grassgeo <command> [options]``.

Exit codes: 0 when every check passes, 1 when a mathematical check fails,
2 on a usage error.  JSON reports carry ``schema_version``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import coherent, grassmann, loci, topology
from .errors import DegenerateWeights, GrassgeoError, OnPolarDivisor
from .grassmann import Shape
from .sampling import complex_normal, make_rng, random_frame, random_tangent

SCHEMA_VERSION = "1"
CUT_MARGIN = 1e-4


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    n: int
    m: int
    seed: int = 0
    tol: float = 1e-9
    t_max: float | None = None
    samples: int = 1
    output_format: str = "json"

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise UsageError(f"--n and --m must be >= 1, got n={self.n}, m={self.m}")
        if self.samples < 1:
            raise UsageError(f"--samples must be >= 1, got {self.samples}")
        if not self.tol > 0:
            raise UsageError(f"--tol must be > 0, got {self.tol}")
        if not 0 <= self.seed < 2**64:
            raise UsageError("--seed must be an unsigned 64-bit integer")
        if self.t_max is not None and not self.t_max > 0:
            raise UsageError(f"--t-max must be > 0, got {self.t_max}")

    @property
    def shape(self) -> Shape:
        return Shape(self.n, self.m)


def thread_count() -> int:
    raw = os.environ.get("GRASSGEO_THREADS")
    cap = os.cpu_count() or 1
    if raw:
        try:
            cap = max(1, int(raw))
        except ValueError:
            raise UsageError(f"GRASSGEO_THREADS must be an integer, got {raw!r}")
    return cap


def ordered_map(fn: Callable, items: Sequence) -> list:
    """Map in parallel; results come back in input order."""
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def encode_matrix(a) -> list:
    a = np.asarray(a, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in a]


def decode_matrix(text: str, n: int, m: int) -> np.ndarray:
    try:
        data = json.loads(text)
        arr = np.array(data, dtype=float)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"cannot parse matrix: {exc}")
    if arr.shape != (n, m, 2):
        raise UsageError(f"matrix must be {n}x{m} of [re, im] pairs, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise UsageError("matrix entries must be finite")
    return arr[..., 0] + 1j * arr[..., 1]


def decode_vector(text: str, length: int | None = None) -> np.ndarray:
    try:
        arr = np.array(json.loads(text), dtype=float)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"cannot parse vector: {exc}")
    if arr.ndim != 1 or (length is not None and arr.size != length):
        raise UsageError(f"expected a flat list of {length} numbers")
    if not np.all(np.isfinite(arr)):
        raise UsageError("vector entries must be finite")
    return arr


def _f(x) -> float | None:
    if x is None:
        return None
    return float(x)


# --- commands -------------------------------------------------------------


def cmd_geodesic(cfg: RunConfig, args) -> tuple[dict, list[list], int]:
    shape = cfg.shape
    if args.random == (args.b is not None):
        raise UsageError("give exactly one of --b or --random")
    if args.random:
        b = random_tangent(make_rng(cfg.seed), shape.n, shape.m, unit=True)
    else:
        b = decode_matrix(args.b, shape.n, shape.m)
    t_max = cfg.t_max if cfg.t_max is not None else 2.0
    grid = np.linspace(0.0, t_max, cfg.samples + 1)
    o = grassmann.base_point(shape)

    def point(t):
        plane = grassmann.geodesic(b, t)
        try:
            z = encode_matrix(grassmann.z_from_plane(plane))
        except OnPolarDivisor:
            z = None
        return z, grassmann.distance(o, plane)

    rows = ordered_map(point, list(grid))
    sigmas = np.linalg.svd(b, compute_uv=False)
    smax = float(sigmas[0]) if sigmas.size else 0.0
    fro = float(np.linalg.norm(b))
    escapes = []
    for s in sigmas:
        if s <= 0:
            continue
        k = 0
        while (2 * k + 1) * math.pi / (2 * s) <= t_max:
            escapes.append((2 * k + 1) * math.pi / (2 * s))
            k += 1
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "geodesic",
        "n": shape.n,
        "m": shape.m,
        "seed": cfg.seed,
        "b": encode_matrix(b),
        "t_grid": [float(t) for t in grid],
        "z": [z for z, _ in rows],
        "distance": [float(d) for _, d in rows],
        "cut_time": math.pi * fro / (2 * smax) if smax > 0 else None,
        "cut_parameter": loci.cut_time(b) if smax > 0 else None,
        "chart_escape_times": sorted(escapes),
    }
    table = [["t", "distance", "in_chart"]] + [
        [float(t), float(d), int(z is not None)] for t, (z, d) in zip(grid, rows)
    ]
    return report, table, 0


def cmd_conjugate_scan(cfg: RunConfig, args) -> tuple[dict, list[list], int]:
    shape = cfg.shape
    if args.random == (args.h is not None):
        raise UsageError("give exactly one of --h or --random")
    if args.random:
        h, default_t_max = loci.random_generic_direction(make_rng(cfg.seed), shape)
    else:
        h = decode_vector(args.h, shape.r)
        try:
            h = loci.check_direction(h, shape.r)
        except ValueError as exc:
            raise UsageError(str(exc))
        if np.min(np.abs(h)) == 0:
            raise UsageError("every component of h must be nonzero")
        default_t_max = 1.1 * math.pi / float(np.min(np.abs(h)))
    t_max = cfg.t_max if cfg.t_max is not None else default_t_max
    b = loci.direction_tangent(shape, h)
    predicted = loci.conjugate_times(shape, h, t_max)
    detected = loci.detect_conjugate_points(b, t_max, rank_tol=args.rank_tol)
    comparison = loci.compare_detections(predicted, detected)

    points = []
    classification_ok = True
    for match in comparison.matches:
        t = match.detection.t if match.detection is not None else match.record.t
        cls = loci.classify_conjugate(grassmann.geodesic(b, t), args.tol_angle)
        ok = match.record.expected_strata <= cls.flags
        classification_ok &= ok
        rec = match.record
        points.append(
            {
                "t_predicted": float(rec.t),
                "family": rec.family.value,
                "families": [f.value for f in rec.families],
                "multiplicity": rec.multiplicity,
                "p": rec.p,
                "q": rec.q,
                "lambda": rec.lam,
                "t_detected": _f(match.detection.t) if match.detection else None,
                "multiplicity_detected": match.detection.multiplicity if match.detection else None,
                "matched": match.ok,
                "flags": sorted(cls.flags),
                "stationary_angles": list(cls.witness),
                "classification_ok": ok,
            }
        )
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "conjugate-scan",
        "n": shape.n,
        "m": shape.m,
        "seed": cfg.seed,
        "h": [float(x) for x in h],
        "t_max": float(t_max),
        "predicted": points,
        "detected": [{"t": d.t, "multiplicity": d.multiplicity} for d in detected],
        "spurious": [{"t": d.t, "multiplicity": d.multiplicity} for d in comparison.spurious],
        "agreement": comparison.agreement,
        "classification_ok": classification_ok,
    }
    table = [["t_predicted", "families", "multiplicity", "t_detected", "multiplicity_detected", "flags"]]
    for p in points:
        table.append(
            [
                p["t_predicted"],
                "+".join(p["families"]),
                p["multiplicity"],
                "" if p["t_detected"] is None else p["t_detected"],
                "" if p["multiplicity_detected"] is None else p["multiplicity_detected"],
                "+".join(p["flags"]),
            ]
        )
    code = 0 if comparison.agreement and classification_ok else 1
    return report, table, code


def cmd_seven(cfg: RunConfig, args) -> tuple[dict, list[list], int]:
    shape = cfg.shape
    if args.auto == (args.weights is not None):
        raise UsageError("give exactly one of --weights or --auto")
    if args.auto:
        weights = np.arange(1, shape.N + 1, dtype=float)
    else:
        weights = decode_vector(args.weights, shape.N)
    try:
        report = topology.seven_numbers(shape, weights, samples=args.random_planes, seed=cfg.seed)
    except DegenerateWeights as exc:
        raise UsageError(str(exc))
    out = {
        "schema_version": SCHEMA_VERSION,
        "command": "seven",
        "n": shape.n,
        "m": shape.m,
        "weights": [float(w) for w in weights],
        **report.to_dict(),
    }
    table = [["invariant", "value"]] + [[k, v] for k, v in report.to_dict().items()]
    code = 0 if report.all_equal and report.critical_certified else 1
    return out, table, code


def cmd_diastasis_sweep(cfg: RunConfig, args) -> tuple[dict, list[list], int]:
    shape = cfg.shape
    rng = make_rng(cfg.seed)
    pairs = [
        (complex_normal(rng, (shape.n, shape.m)), complex_normal(rng, (shape.n, shape.m)))
        for _ in range(cfg.samples)
    ]
    checks = ordered_map(lambda zz: coherent.check_diastasis_relation(*zz), pairs)
    worst = max(c.residual for c in checks)
    table = [["pair", "D", "theta", "residual"]]
    for i, c in enumerate(checks):
        table.append([i, c.diastasis, c.theta, c.residual])
    table.append(["max", "", "", worst])
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "diastasis-sweep",
        "n": shape.n,
        "m": shape.m,
        "seed": cfg.seed,
        "samples": cfg.samples,
        "rows": [
            {"pair": i, "D": c.diastasis, "theta": c.theta, "residual": c.residual}
            for i, c in enumerate(checks)
        ],
        "max_residual": worst,
        "tol": cfg.tol,
        "pass": worst <= cfg.tol,
    }
    return report, table, 0 if worst <= cfg.tol else 1


def cmd_cut_test(cfg: RunConfig, args) -> tuple[dict, list[list], int]:
    shape = cfg.shape
    o = grassmann.base_point(shape)
    rng = make_rng(cfg.seed)
    tangents = [random_tangent(rng, shape.n, shape.m, unit=True) for _ in range(cfg.samples)]
    frames = [random_frame(rng, shape.n, shape.m) for _ in range(cfg.samples)]

    def tangent_check(b):
        tc = loci.cut_time(b)
        before = 0.95 * tc
        after = 1.05 * tc
        d_before = grassmann.distance(o, grassmann.geodesic(b, before))
        d_after = grassmann.distance(o, grassmann.geodesic(b, after))
        problems = []
        if abs(d_before - before) > cfg.tol:
            problems.append("not minimizing before cut time")
        if not d_after < after - CUT_MARGIN:
            problems.append("still minimizing after cut time")
        if not loci.is_cut_locus(grassmann.geodesic(b, tc)):
            problems.append("cut point off the polar divisor")
        return {
            "cut_time": tc,
            "distance_before_error": abs(d_before - before),
            "distance_after_gap": after - d_after,
            "problems": problems,
        }

    def plane_check(frame):
        plane = grassmann.Plane(frame)
        cut = loci.is_cut_locus(plane)
        try:
            z = grassmann.z_from_plane(plane)
            chart = grassmann.frame_from_z(z).isclose(plane)
        except OnPolarDivisor:
            chart = False
        return {"in_chart": chart, "on_polar_divisor": cut, "exclusive": chart != cut}

    tangent_rows = ordered_map(tangent_check, tangents)
    plane_rows = ordered_map(plane_check, frames)
    counter = sum(1 for r in tangent_rows if r["problems"]) + sum(
        1 for r in plane_rows if not r["exclusive"]
    )
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "cut-test",
        "n": shape.n,
        "m": shape.m,
        "seed": cfg.seed,
        "samples": cfg.samples,
        "tol": cfg.tol,
        "tangents": tangent_rows,
        "planes": {
            "in_chart": sum(1 for r in plane_rows if r["in_chart"]),
            "on_polar_divisor": sum(1 for r in plane_rows if r["on_polar_divisor"]),
            "non_exclusive": sum(1 for r in plane_rows if not r["exclusive"]),
        },
        "counterexamples": counter,
    }
    table = [["check", "value"], ["counterexamples", counter]] + [
        ["tangent", "; ".join(r["problems"]) or "ok"] for r in tangent_rows
    ]
    return report, table, 0 if counter == 0 else 1


COMMANDS = {
    "geodesic": (cmd_geodesic, "json", 20),
    "conjugate-scan": (cmd_conjugate_scan, "json", 1),
    "seven": (cmd_seven, "json", 1),
    "diastasis-sweep": (cmd_diastasis_sweep, "csv", 100),
    "cut-test": (cmd_cut_test, "json", 50),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grassgeo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--m", type=int, required=True)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--t-max", type=float, default=None)
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--format", choices=["json", "csv"], default=None)
        p.add_argument("--output", default=None)

    p = sub.add_parser("geodesic", help="sample a geodesic from the base point")
    common(p)
    p.add_argument("--b", default=None, help="n x m matrix as nested [re, im] pairs")
    p.add_argument("--random", action="store_true")

    p = sub.add_parser("conjugate-scan", help="predicted vs detected conjugate times")
    common(p)
    p.add_argument("--h", default=None, help="unit direction of length min(n, m)")
    p.add_argument("--random", action="store_true")
    p.add_argument("--rank-tol", type=float, default=loci.RANK_TOL)
    p.add_argument("--tol-angle", type=float, default=loci.TOL_ANGLE)

    p = sub.add_parser("seven", help="the seven equal invariants")
    common(p)
    p.add_argument("--weights", default=None)
    p.add_argument("--auto", action="store_true")
    p.add_argument("--random-planes", type=int, default=50)

    p = sub.add_parser("diastasis-sweep", help="diastasis vs Plücker angle on random pairs")
    common(p)

    p = sub.add_parser("cut-test", help="cut locus and chart decomposition checks")
    common(p)
    return parser


def render(report: dict, table: list[list], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in table:
        writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def run(argv: Iterable[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fn, default_format, default_samples = COMMANDS[args.command]
    try:
        cfg = RunConfig(
            n=args.n,
            m=args.m,
            seed=args.seed,
            tol=args.tol,
            t_max=args.t_max,
            samples=default_samples if args.samples is None else args.samples,
            output_format=args.format or default_format,
        )
        report, table, code = fn(cfg, args)
    except UsageError as exc:
        print(f"grassgeo {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except GrassgeoError as exc:
        print(f"grassgeo {args.command}: check failed: {exc}", file=sys.stderr)
        return 1
    text = render(report, table, cfg.output_format)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
