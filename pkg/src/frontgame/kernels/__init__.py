"""Sweep backend selection: compiled extension when available, NumPy otherwise.

The compiled kernel covers the hot configuration class (2-D, descriptor-backed
coefficients, constant boundary data); anything else runs on the reference
backend. Set FRONTGAME_PURE_PYTHON=1 to force the fallback.
"""

from __future__ import annotations

import os

import numpy as np

from . import _ref
from .plan import MODE_GS_FORWARD, MODE_GS_REVERSE, MODE_JACOBI, SweepPlan, build_plan

try:
    from . import _sweep as _compiled

    HAVE_COMPILED = True
except ImportError:  # pragma: no cover - depends on build environment
    _compiled = None
    HAVE_COMPILED = False

__all__ = [
    "MODE_JACOBI",
    "MODE_GS_FORWARD",
    "MODE_GS_REVERSE",
    "SweepPlan",
    "build_plan",
    "compiled_available",
    "backend_for",
    "run_sweep",
    "HAVE_COMPILED",
]


def _disabled():
    return os.environ.get("FRONTGAME_PURE_PYTHON", "") not in ("", "0")


def compiled_available():
    return HAVE_COMPILED and not _disabled()


def backend_for(plan):
    """'compiled' when the plan fits the extension, else 'python'."""
    return "compiled" if (plan.kernel_ok and compiled_available()) else "python"


def run_sweep(plan, src, mask, out, mode, backend=None):
    """Execute one sweep with the chosen backend.

    Jacobi (mode 0) reads only `src` and fills `out`; Gauss-Seidel modes
    copy `src` into `out` (when distinct) and update in place.
    """
    if backend is None:
        backend = backend_for(plan)
    if backend == "compiled":
        _run_compiled(plan, src, mask, out, mode)
    else:
        _ref.sweep(plan, src, mask, out, mode)


def _run_compiled(plan, src, mask, out, mode):
    b_code, b_params = plan.b_pack
    c_code, c_params = plan.c_pack
    t_code, t_params, g_const = plan.target_pack
    sdf = plan.target.table if plan.target.kind == "sdf" else np.zeros((1, 1))
    if mode != MODE_JACOBI and out is not src:
        out[...] = src
    _compiled.sweep2d(
        np.ascontiguousarray(src) if mode == MODE_JACOBI else out,
        out,
        np.ascontiguousarray(mask.astype(np.uint8)),
        float(plan.grid.origin[0]),
        float(plan.grid.origin[1]),
        float(plan.grid.spacing),
        plan.disp,
        plan.seeds,
        float(plan.sqrt2eps),
        float(plan.eps2),
        float(plan.discount),
        float(plan.one_minus),
        int(b_code),
        b_params,
        int(c_code),
        c_params,
        int(t_code),
        t_params,
        float(g_const),
        np.ascontiguousarray(sdf),
        int(mode),
    )
