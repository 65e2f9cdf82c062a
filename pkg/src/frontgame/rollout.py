"""Explicit game trajectories over a solved value field.

Two constructions: near-optimal play for Player I with a per-step slack
budget alpha/2^j (Player II answers with the value-maximizing signs), and the
concentric capture strategy that aims both direction choices at the origin
and shrinks the radius by at least eps^2 c0 / 2 per step once the radius
exceeds R = 2 C0^2 / c0 + 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import game
from .errors import (
    DegenerateForcing,
    InvariantViolation,
    RadiusTooSmall,
    StartInsideTarget,
    StartOutsideBox,
)
from .grid import GameSampler

HIT_TARGET = "hit_target"
EXITED_BOX = "exited_box"
STEP_LIMIT = "step_limit"


@dataclass
class Trajectory:
    """Marker path y_0..y_N with per-step strategies and realized payoff."""

    points: list
    strategies: list
    terminated: str
    payoff_transformed: float
    payoff_time: float
    final_boundary_time: Optional[float] = None
    final_boundary_transformed: Optional[float] = None
    alpha: float = 0.0
    interp_slack: float = 0.0
    start_value: float = math.nan

    @property
    def steps(self):
        return len(self.points) - 1


def _finish(points, strategies, terminated, eps, g_time, g_trans, **extra):
    n_steps = len(points) - 1
    if terminated == HIT_TARGET:
        transformed = -math.expm1(-n_steps * eps * eps) + math.exp(-n_steps * eps * eps) * g_trans
        time_payoff = eps * eps * n_steps + g_time
    else:
        transformed = 1.0
        time_payoff = math.inf
    return Trajectory(
        points=points,
        strategies=strategies,
        terminated=terminated,
        payoff_transformed=transformed,
        payoff_time=time_payoff,
        final_boundary_time=g_time if terminated == HIT_TARGET else None,
        final_boundary_transformed=g_trans if terminated == HIT_TARGET else None,
        **extra,
    )


def _boundary_data(target, y):
    g_trans = float(target.g_transformed(y[None, :])[0])
    if callable(target.boundary_value):
        g_time = float(target.boundary_value(target.nearest_boundary(y[None, :]))[0])
    else:
        g_time = float(target.boundary_value)
    return g_time, g_trans


def default_step_cap(model, eps, x):
    """4x the capture-time bound in steps when min c > 0, else 10^6."""
    if model.c_min > 0.0:
        c0 = model.c_min
        bound_time = (2.0 / c0) * float(np.linalg.norm(x))
        return max(1000, 4 * math.ceil(bound_time / (eps * eps)))
    return 10**6


def epsilon_optimal_rollout(config, solved, x, alpha, step_cap=None):
    """Play Player I within alpha/2^j of the one-round optimum at each step.

    The returned trajectory records, alongside the realized payoff, the exact
    discounted bookkeeping gap between the sampled field value and the chosen
    one-round value (interp_slack), so that on hit_target

        payoff_transformed - alpha - slack <= u(x) <= payoff_transformed + slack

    holds with slack = interp_slack. Player II always picks the
    value-maximizing sign vector, ties to the first.
    """
    if alpha <= 0.0:
        raise InvariantViolation("alpha must be positive")
    x = np.asarray(x, dtype=float)
    grid, target, model = config.grid, config.target, config.model
    if not bool(grid.contains(x[None, :])[0]):
        raise StartOutsideBox(f"start point {x} outside the grid box")
    if bool(target.contains(x[None, :])[0]):
        raise StartInsideTarget(f"start point {x} inside the target closure")
    if step_cap is None:
        step_cap = default_step_cap(model, config.epsilon, x)

    eps = config.epsilon
    discount = math.exp(-eps * eps)
    one_minus = -math.expm1(-eps * eps)
    sampler = GameSampler(solved, target)
    signs = game.sign_set(model.dimension - 1)
    h = grid.spacing

    points = [x.copy()]
    strategies = []
    slack = 0.0
    start_value = sampler(x)
    y = x.copy()
    terminated = STEP_LIMIT
    g_time = g_trans = 0.0
    j = 0
    while j < step_cap:
        j += 1
        grad = _sampler_gradient(sampler, y, h)
        candidates = game.strategy_candidates(model, grad, config.n_dir, config.n_basis)
        # cover both drift orientations so inward progress never depends on
        # the (kink-sensitive) gradient seed alone
        candidates += [game.StrategyI(c.v1, -c.v2, c.w) for c in candidates]
        best_val = math.inf
        best = None
        for cand in candidates:
            worst = -math.inf
            worst_sign = signs[0]
            for s in signs:
                val = sampler(y + game.step_delta(model, eps, cand, s))
                if val > worst:
                    worst = val
                    worst_sign = s
            if worst < best_val:
                best_val = worst
                best = (cand, worst_sign)
        cand, sign = best
        one_round = one_minus + discount * best_val
        slack += discount ** (j - 1) * abs(sampler(y) - one_round)
        y = y + game.step_delta(model, eps, cand, sign)
        points.append(y.copy())
        strategies.append((cand, sign))
        if bool(target.contains(y[None, :])[0]):
            terminated = HIT_TARGET
            g_time, g_trans = _boundary_data(target, y)
            break
        if not bool(grid.contains(y[None, :])[0]):
            terminated = EXITED_BOX
            break
    return _finish(
        points,
        strategies,
        terminated,
        eps,
        g_time,
        g_trans,
        alpha=alpha,
        interp_slack=slack,
        start_value=start_value,
    )


def _sampler_gradient(sampler, y, h):
    n = y.size
    g = np.empty(n)
    for a in range(n):
        e = np.zeros(n)
        e[a] = h
        g[a] = (sampler(y + e) - sampler(y - e)) / (2.0 * h)
    if np.linalg.norm(g) == 0.0:
        return None
    return g


def concentric_rollout(model, target_radius, x, eps, step_cap=None):
    """Capture strategy of the radius-shrinkage bound, adversarial signs.

    Player I aims both direction choices at the origin with the canonical
    basis; Player II maximizes the next radius over all sign vectors. While
    the radius stays >= R = 2 C0^2/c0 + 1 every step shrinks it by at least
    eps^2 c0 / 2, so capture takes at most
    ceil((|x| - target_radius) / (eps^2 c0 / 2)) steps.
    """
    if model.c_min <= 0.0:
        raise DegenerateForcing("capture strategy needs min c > 0")
    c0 = model.c_min
    big_r = 2.0 * model.sigma_frobenius_max**2 / c0 + 1.0
    if target_radius < big_r:
        raise RadiusTooSmall(
            f"target_radius = {target_radius:g} below R = 2*C0^2/c0 + 1 = {big_r:g}"
        )
    x = np.asarray(x, dtype=float)
    if np.linalg.norm(x) <= target_radius:
        raise StartInsideTarget("start point already inside the target radius")
    shrink = eps * eps * c0 / 2.0
    guaranteed = math.ceil((np.linalg.norm(x) - target_radius) / shrink)
    if step_cap is None:
        step_cap = guaranteed + 10

    n = model.dimension
    basis = np.eye(n - 1)
    signs = game.sign_set(n - 1)
    points = [x.copy()]
    strategies = []
    y = x.copy()
    terminated = STEP_LIMIT
    for _ in range(step_cap):
        radial = -y / np.linalg.norm(y)
        cand = game.StrategyI(radial, radial, basis)
        best_radius = -math.inf
        best_sign = signs[0]
        for s in signs:
            r_next = float(np.linalg.norm(y + game.step_delta(model, eps, cand, s)))
            if r_next > best_radius:
                best_radius = r_next
                best_sign = s
        y = y + game.step_delta(model, eps, cand, best_sign)
        points.append(y.copy())
        strategies.append((cand, best_sign))
        if np.linalg.norm(y) <= target_radius:
            terminated = HIT_TARGET
            break
    return _finish(points, strategies, terminated, eps, 0.0, 0.0)


def payoff(traj, eps):
    """(transformed, time) payoff; psi-consistent on finite games."""
    n_steps = traj.steps
    if traj.terminated != HIT_TARGET:
        return 1.0, math.inf
    g_time = traj.final_boundary_time or 0.0
    g_trans = traj.final_boundary_transformed or 0.0
    transformed = -math.expm1(-n_steps * eps * eps) + math.exp(-n_steps * eps * eps) * g_trans
    return transformed, eps * eps * n_steps + g_time
