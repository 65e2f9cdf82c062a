"""Benchmark: compiled sweep kernel versus the NumPy reference backend.

Runs identical Jacobi and Gauss-Seidel sweeps on a mid-size radial problem
with both backends, reports per-sweep times and the maximum value
discrepancy after one identical sweep. Usage:

    python bench/bench_sweep.py [--size N] [--sweeps K]
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from frontgame import directions  # noqa: E402
from frontgame.anisotropy import make_model  # noqa: E402
from frontgame.grid import GridSpec, TargetSet  # noqa: E402
from frontgame.kernels import HAVE_COMPILED, build_plan, run_sweep  # noqa: E402
from frontgame.kernels.plan import MODE_GS_FORWARD, MODE_JACOBI  # noqa: E402
from frontgame.solver import ProblemConfig, initial_field  # noqa: E402


def time_backend(plan, field, backend, mode, sweeps):
    src = field.values.copy()
    out = np.empty_like(src)
    start = time.perf_counter()
    for _ in range(sweeps):
        if mode == MODE_JACOBI:
            run_sweep(plan, src, field.target_mask, out, mode, backend)
            src, out = out, src
        else:
            run_sweep(plan, src, field.target_mask, src, mode, backend)
    return (time.perf_counter() - start) / sweeps


def one_sweep(plan, field, backend, mode):
    vals = field.values.copy()
    out = vals.copy() if mode != MODE_JACOBI else np.empty_like(vals)
    if mode == MODE_JACOBI:
        run_sweep(plan, vals, field.target_mask, out, mode, backend)
        return out
    run_sweep(plan, out, field.target_mask, out, mode, backend)
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--size", type=int, default=121, help="nodes per axis")
    parser.add_argument("--sweeps", type=int, default=10)
    parser.add_argument("--n-dir", type=int, default=32)
    args = parser.parse_args()

    h = 6.0 / (args.size - 1)
    eps = max(0.1, 2.0 * h / np.sqrt(2.0) + 1e-9)
    model = make_model(directions.constant(1.0), directions.constant(2.0), 2)
    target = TargetSet("ball", center=[0.0, 0.0], radius=1.0, boundary_value=0.0)
    grid = GridSpec([-3.0, -3.0], h, (args.size, args.size))
    config = ProblemConfig(model, target, grid, epsilon=eps, n_dir=args.n_dir)
    config.validate()
    plan = build_plan(config)
    field = initial_field(config)

    n_samples = plan.disp.shape[0] * plan.disp.shape[1] + 8
    print(f"grid {args.size}x{args.size}, eps={eps:.3f}, n_dir={args.n_dir}, "
          f"~{n_samples} samples/node")
    print(f"compiled kernel available: {HAVE_COMPILED}")
    print()
    print(f"{'mode':<14} {'backend':<10} {'s/sweep':>10} {'speedup':>9}")

    for mode, name in ((MODE_JACOBI, "jacobi"), (MODE_GS_FORWARD, "gauss_seidel")):
        py_sweeps = max(1, args.sweeps if mode == MODE_JACOBI else args.sweeps // 10)
        py_time = time_backend(plan, field, "python", mode, py_sweeps)
        print(f"{name:<14} {'python':<10} {py_time:>10.4f} {'1.0x':>9}")
        if HAVE_COMPILED:
            c_time = time_backend(plan, field, "compiled", mode, args.sweeps)
            print(f"{name:<14} {'compiled':<10} {c_time:>10.4f} {py_time / c_time:>8.1f}x")
            diff = float(np.max(np.abs(
                one_sweep(plan, field, "compiled", mode) - one_sweep(plan, field, "python", mode)
            )))
            print(f"{'':<14} max |compiled - python| after one sweep: {diff:.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
