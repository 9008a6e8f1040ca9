"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Times the batched projector Jacobians on a t-grid and a full conjugate scan
for each backend, and reports the largest disagreement between them.
"""

import argparse
import time

import numpy as np

from grassgeo import _fallback, kernels
from grassgeo.grassmann import Shape
from grassgeo.loci import conjugate_times, detect_conjugate_points, direction_tangent, random_generic_direction
from grassgeo.sampling import complex_normal, make_rng

try:
    from grassgeo import _core
except ImportError:
    _core = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def scan_all(shapes, draws):
    for shape, hs in zip(shapes, draws):
        for h, t_max in hs:
            detect_conjugate_points(direction_tangent(shape, h), t_max)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--grid", type=int, default=600, help="t-grid length for the Jacobian timing")
    args = parser.parse_args()

    backends = {"python": _fallback}
    if _core is not None:
        backends["compiled"] = _core
    else:
        print("compiled extension not built; timing the fallback only")

    rng = make_rng(0)
    ts = np.linspace(0.01, 6.0, args.grid)
    print(f"{'shape':>8} {'backend':>9} {'jacobians [ms]':>15} {'max diff':>10}")
    for n, m in [(1, 1), (2, 2), (2, 3), (3, 3)]:
        b = complex_normal(rng, (n, m))
        ref = _fallback.projector_jacobians(b, ts)
        for name, impl in backends.items():
            elapsed = best_of(lambda: impl.projector_jacobians(b, ts), args.repeat)
            diff = np.abs(impl.projector_jacobians(b, ts) - ref).max()
            print(f"{f'({n},{m})':>8} {name:>9} {1e3 * elapsed:15.2f} {diff:10.1e}")

    shapes = [Shape(*s) for s in [(1, 1), (1, 2), (2, 2), (2, 3)]]
    draws = [[random_generic_direction(rng, s) for _ in range(20)] for s in shapes]
    predicted = sum(len(conjugate_times(s, h, t)) for s, hs in zip(shapes, draws) for h, t in hs)
    print(f"\nfull conjugate scan, 80 directions, {predicted} predicted times")
    original = kernels.projector_jacobians
    try:
        for name, impl in backends.items():
            kernels.projector_jacobians = impl.projector_jacobians
            elapsed = best_of(lambda: scan_all(shapes, draws), max(1, args.repeat // 2))
            print(f"{name:>9}: {elapsed:.2f} s")
    finally:
        kernels.projector_jacobians = original


if __name__ == "__main__":
    main()
