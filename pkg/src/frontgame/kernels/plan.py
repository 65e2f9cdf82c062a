"""Precomputed state for one value-iteration sweep.

Everything the per-node min-max needs is frozen here once per solve: the
displacement table of the uniform candidates (candidate x sign x component),
per-node seed directions, discount constants, and the packed coefficient and
target descriptors for the compiled kernel. Both backends consume the same
plan, so their arithmetic inputs are identical.

The candidate set is a function of the node only, never of the field being
swept; this keeps every sweep an exact sup-norm contraction (factor
exp(-eps^2)) and exactly monotone. Per-node accuracy comes from two seed
directions that realize the analytically optimal direction choice for the
front geometries of interest: the away-from-target direction (the value
gradient direction for radially expanding fronts) and the gauge-maximizing
direction of the forcing's Wulff set (the asymptotic front normal).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .. import directions, game

MODE_JACOBI = 0
MODE_GS_FORWARD = 1
MODE_GS_REVERSE = 2

SEED_GAUGE_DIRECTIONS = 256
SEED_VALID_MIN_NORM2 = 0.25


@dataclass
class SweepPlan:
    model: object
    target: object
    grid: object
    eps: float
    eps2: float
    sqrt2eps: float
    discount: float
    one_minus: float
    disp: np.ndarray  # (C, S, n) uniform-candidate displacements
    seeds: np.ndarray  # (prod(counts), K, n) unit seed directions (0 = invalid)
    kernel_ok: bool = False
    b_pack: Optional[tuple] = None
    c_pack: Optional[tuple] = None
    target_pack: Optional[tuple] = None
    _points: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def dimension(self):
        return self.grid.dimension

    def node_points(self):
        if self._points is None:
            self._points = self.grid.points()
        return self._points


def uniform_displacements(model, eps, n_dir, n_basis):
    """Displacement table for the fixed candidate dictionary.

    Half-sphere v1 samples (evenness makes antipodes redundant for sigma and
    c) paired with both drift orientations v2 = -v1 and v2 = +v1, times the
    sampled bases; deterministic order, signs enumerated as in sign_set.
    """
    candidates = []
    for base in game.strategy_candidates(model, None, n_dir, n_basis):
        candidates.append(base)
        candidates.append(game.StrategyI(base.v1, -base.v2, base.w))
    signs = game.sign_set(model.dimension - 1)
    disp = np.empty((len(candidates), len(signs), model.dimension))
    for i, cand in enumerate(candidates):
        for j, s in enumerate(signs):
            disp[i, j] = game.step_delta(model, eps, cand, s)
    return np.ascontiguousarray(disp)


def seed_directions(model, target, grid):
    """Per-node unit seed directions, zero rows marking invalid seeds."""
    pts = grid.points()
    n = grid.dimension
    seeds = np.zeros((pts.shape[0], 2, n))

    away = pts - target.nearest_boundary(pts)
    norm = np.linalg.norm(away, axis=1)
    ok = norm > 1e-12
    seeds[ok, 0, :] = away[ok] / norm[ok, None]

    if model.c_min > 0.0:
        units = directions.unit_sphere_sample(n, SEED_GAUGE_DIRECTIONS)
        cvals = np.asarray(model.forcing(units), dtype=float)
        pick = np.argmax(pts @ units.T / cvals, axis=1)
        seeds[:, 1, :] = units[pick]
    return np.ascontiguousarray(seeds)


def build_plan(config):
    """Freeze per-solve state for the sweep backends."""
    model, grid, eps = config.model, config.grid, config.epsilon
    plan = SweepPlan(
        model=model,
        target=config.target,
        grid=grid,
        eps=eps,
        eps2=eps * eps,
        sqrt2eps=eps * math.sqrt(2.0),
        discount=math.exp(-eps * eps),
        one_minus=-math.expm1(-eps * eps),
        disp=uniform_displacements(model, eps, config.n_dir, config.n_basis),
        seeds=seed_directions(model, config.target, grid),
    )

    tpack = config.target.kernel_pack()
    sdf_ok = config.target.kind != "sdf" or _same_grid(config.target.table_grid, grid)
    if (
        model.dimension == 2
        and model.kernel_compatible
        and tpack is not None
        and sdf_ok
    ):
        plan.kernel_ok = True
        plan.b_pack = model.b_spec.kernel_pack()
        plan.c_pack = model.c_spec.kernel_pack()
        plan.target_pack = tpack
    return plan


def _same_grid(a, b):
    return (
        a is not None
        and a.counts == b.counts
        and a.spacing == b.spacing
        and np.array_equal(a.origin, b.origin)
    )
