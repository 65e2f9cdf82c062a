"""Pure-NumPy sweep backend.

Jacobi sweeps are vectorized over the whole grid; Gauss-Seidel sweeps visit
nodes one at a time (freshest values) and are intended for modest grids when
the compiled kernel is unavailable. The arithmetic mirrors the compiled
kernel expression for expression: nested-lerp interpolation, max over signs,
min over candidates in fixed order, then one discounted affine step.
"""

from __future__ import annotations

import numpy as np

from .. import anisotropy
from ..game import sign_matrix
from ..grid import multilinear
from .plan import MODE_GS_REVERSE, MODE_JACOBI, SEED_VALID_MIN_NORM2


def _sample_many(plan, values, pts):
    """Game sampler over an (N, n) batch: box truncation + target branch."""
    out = multilinear(plan.grid, values, pts)
    hit = plan.target.contains(pts)
    if np.any(hit):
        out[hit] = plan.target.g_transformed(pts[hit])
    out[~plan.grid.contains(pts)] = 1.0
    return out


def _seed_frames(plan, v1):
    """Scaled tangent frame columns sqrt(b) * T(v1) for a batch of units."""
    n = plan.dimension
    root_b = np.sqrt(np.asarray(plan.model.mobility(v1), dtype=float))
    if n == 2:
        return [np.stack([-v1[:, 1], v1[:, 0]], axis=1) * root_b[:, None]]
    if n == 3:
        npts = v1.shape[0]
        pivot = np.argmin(np.abs(v1), axis=1)
        e = np.zeros((npts, 3))
        e[np.arange(npts), pivot] = 1.0
        t1 = e - np.sum(e * v1, axis=1, keepdims=True) * v1
        t1 /= np.linalg.norm(t1, axis=1, keepdims=True)
        t2 = np.cross(v1, t1)
        return [t1 * root_b[:, None], t2 * root_b[:, None]]
    frames = np.stack([anisotropy.tangent_frame(v) for v in v1])
    return [frames[:, :, i] * root_b[:, None] for i in range(frames.shape[2])]


def _seed_minmax(plan, values, pts, best):
    """Fold the per-node seed candidates (both drift orientations) into best."""
    sign_rows = sign_matrix(plan.dimension - 1)
    for k in range(plan.seeds.shape[1]):
        v1 = plan.seeds[:, k, :]
        valid = np.sum(v1 * v1, axis=1) >= SEED_VALID_MIN_NORM2
        if not np.any(valid):
            continue
        cols = _seed_frames(plan, v1)
        c_vals = np.asarray(plan.model.forcing(v1), dtype=float)
        t1 = plan.eps2 * c_vals
        for orient in (-1.0, 1.0):
            drift = t1[:, None] * (orient * v1)
            worst = None
            for signs in sign_rows:
                diff = np.zeros_like(v1)
                for i, col in enumerate(cols):
                    diff += signs[i] * col
                sampled = _sample_many(plan, values, pts + plan.sqrt2eps * diff + drift)
                worst = sampled if worst is None else np.maximum(worst, sampled)
            best = np.where(valid, np.minimum(best, worst), best)
    return best


def _jacobi(plan, src, mask, out):
    pts = plan.node_points()
    best = None
    n_cand, n_sign, _ = plan.disp.shape
    for c in range(n_cand):
        worst = None
        for s in range(n_sign):
            sampled = _sample_many(plan, src, pts + plan.disp[c, s])
            worst = sampled if worst is None else np.maximum(worst, sampled)
        best = worst if best is None else np.minimum(best, worst)
    best = _seed_minmax(plan, src, pts, best)
    new = plan.one_minus + plan.discount * best
    flat_mask = mask.ravel()
    out.ravel()[:] = np.where(flat_mask, src.ravel(), new)


def _gauss_seidel(plan, values, mask, mode):
    """In-place sweep reading freshest values, fixed node order."""
    counts = plan.grid.counts
    order = np.arange(int(np.prod(counts)))
    if mode == MODE_GS_REVERSE:
        order = order[::-1]
    flat_mask = mask.ravel()
    h = plan.grid.spacing
    origin = plan.grid.origin
    n = plan.dimension
    n_cand, n_sign, _ = plan.disp.shape
    batch = plan.disp.reshape(n_cand * n_sign, n)
    sign_rows = sign_matrix(n - 1)
    for flat in order:
        if flat_mask[flat]:
            continue
        idx = np.unravel_index(flat, counts)
        x = origin + h * np.array(idx, dtype=float)
        sampled = _sample_many(plan, values, x[None, :] + batch)
        best = sampled.reshape(n_cand, n_sign).max(axis=1).min()
        for k in range(plan.seeds.shape[1]):
            v1 = plan.seeds[flat, k]
            if float(v1 @ v1) < SEED_VALID_MIN_NORM2:
                continue
            root_b = np.sqrt(float(plan.model.mobility(v1)))
            c_val = float(plan.model.forcing(v1))
            frame = anisotropy.tangent_frame(v1) * root_b
            t1 = plan.eps2 * c_val
            for orient in (-1.0, 1.0):
                drift = t1 * (orient * v1)
                hpts = np.array(
                    [x + plan.sqrt2eps * (frame @ signs) + drift for signs in sign_rows]
                )
                worst = float(_sample_many(plan, values, hpts).max())
                if worst < best:
                    best = worst
        values[idx] = plan.one_minus + plan.discount * best


def sweep(plan, src, mask, out, mode):
    """One sweep; Jacobi writes `out` from `src`, Gauss-Seidel updates in place."""
    if mode == MODE_JACOBI:
        _jacobi(plan, src, mask, out)
    else:
        if out is not src:
            out[...] = src
        _gauss_seidel(plan, out, mask, mode)
