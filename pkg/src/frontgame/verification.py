"""Oracles and property checks for the solver.

Independent references: a quadrature oracle for radially symmetric isotropic
fronts (dr/dt = gamma - beta (n-1)/r), the closed-form capture bound
(2/c0)|x| - 4 C0^2/c0^2, and direct Taylor-expansion checks of the one-round
min-max against phi - eps^2 F(Dphi, D^2phi) on exact quadratics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.integrate import quad

from . import anisotropy, game
from .errors import DegenerateForcing, BadT0, StalledFront, ZeroGradient
from .grid import ValueField, rasterize_target
from .solver import apply_R, solve


# ---------------------------------------------------------------------------
# oracles


def radial_arrival_oracle(r0, r, beta, gamma, n):
    """Arrival time of an expanding sphere: integral of ds/(gamma - beta(n-1)/s).

    Quadrature to 1e-10 absolute; requires the front to expand at r0.
    """
    if gamma - beta * (n - 1) / r0 <= 0.0:
        raise StalledFront(
            f"gamma - beta*(n-1)/r0 = {gamma - beta * (n - 1) / r0:g} <= 0: front stalls"
        )
    if r < r0:
        raise ValueError("r must be >= r0")
    if r == r0:
        return 0.0
    value, _ = quad(lambda s: 1.0 / (gamma - beta * (n - 1) / s), r0, r, epsabs=1e-12, limit=200)
    return float(value)


def upper_bound_oracle(model, x):
    """Capture-time bound: (R, (2/c0)|x| - 4 C0^2/c0^2), Frobenius C0."""
    c0 = model.c_min
    if c0 <= 0.0:
        raise DegenerateForcing(f"min c = {c0:g}; the capture bound needs min c > 0")
    c_big = model.sigma_frobenius_max
    big_r = 2.0 * c_big * c_big / c0 + 1.0
    bound = (2.0 / c0) * float(np.linalg.norm(x)) - 4.0 * c_big * c_big / (c0 * c0)
    return big_r, bound


# ---------------------------------------------------------------------------
# consistency of the one-round min-max on exact quadratics


@dataclass
class ConsistencyReport:
    """Per-quadratic expansion errors across step scales."""

    eps_values: list
    errors_part1: list
    errors_part3: list

    @property
    def ratios_part1(self):
        return [e / (eps * eps) for e, eps in zip(self.errors_part1, self.eps_values)]

    @property
    def ratios_part3(self):
        return [e / (eps * eps) for e, eps in zip(self.errors_part3, self.eps_values)]

    def as_dict(self):
        return {
            "eps_values": list(self.eps_values),
            "errors_part1": list(self.errors_part1),
            "errors_part3": list(self.errors_part3),
            "ratios_part1": self.ratios_part1,
            "ratios_part3": self.ratios_part3,
        }


def _quadratic_fn(value, grad, hess, x):
    grad = np.asarray(grad, dtype=float)
    hess = np.asarray(hess, dtype=float)

    def phi(y):
        d = y - x
        return value + grad @ d + 0.5 * d @ hess @ d

    return phi


def _max_over_signs(model, eps, phi, x, cand, signs):
    return max(phi(x + game.step_delta(model, eps, cand, s)) for s in signs)


def consistency_error(model, quadratic, x, eps, n_dir, n_basis=1):
    """(upper_err, lower_err) of the one-round min-max on an exact quadratic.

    upper_err uses the analytically optimal candidate (gradient direction,
    eigenbasis of sigma^T H sigma) and measures its max-over-signs value
    against phi - eps^2 F; lower_err measures the full candidate-set min
    against the same expansion from below. Both vanish at order o(eps^2).
    """
    value, grad, hess = quadratic
    x = np.asarray(x, dtype=float)
    grad = np.asarray(grad, dtype=float)
    hess = np.asarray(hess, dtype=float)
    if np.linalg.norm(grad) == 0.0:
        raise ZeroGradient("consistency check needs a nonzero gradient")
    phi = _quadratic_fn(value, grad, hess, x)
    signs = game.sign_set(model.dimension - 1)

    ghat = grad / np.linalg.norm(grad)
    sig = anisotropy.sigma_of(model, ghat)
    _, eigvecs = np.linalg.eigh(sig.T @ hess @ sig)
    analytic = game.StrategyI(ghat, -ghat, eigvecs)

    target = phi(x) - eps * eps * anisotropy.F_eval(model, grad, hess)
    upper_err = _max_over_signs(model, eps, phi, x, analytic, signs) - target

    candidates = game.strategy_candidates(model, grad, n_dir, n_basis)
    candidates.append(analytic)
    minmax = min(_max_over_signs(model, eps, phi, x, cand, signs) for cand in candidates)
    lower_err = target - minmax
    return upper_err, lower_err


def consistency_study(model, quadratic, x, eps_values, n_dir_rule, n_basis=1):
    """ConsistencyReport across step scales; n_dir_rule maps eps -> n_dir."""
    part1, part3 = [], []
    for eps in eps_values:
        up, low = consistency_error(model, quadratic, x, eps, n_dir_rule(eps), n_basis)
        part1.append(up)
        part3.append(low)
    return ConsistencyReport(list(eps_values), part1, part3)


# ---------------------------------------------------------------------------
# operator properties on random and structured field pairs


def _field_from_values(config, values):
    mask, gvals = rasterize_target(config.grid, config.target)
    vals = np.where(mask, gvals, values)
    return ValueField(config.grid, vals, mask, config.epsilon)


def random_field(config, rng, lo=0.0, hi=1.0):
    """I.i.d. uniform node values with target data on masked nodes."""
    return _field_from_values(config, rng.uniform(lo, hi, size=config.grid.counts))


def _structured_pairs(config):
    counts = config.grid.counts
    axes = config.grid.axes()
    span = axes[0][-1] - axes[0][0]
    ramp = (axes[0][:, None] - axes[0][0]) / span * np.ones(counts)
    pairs = [
        (np.full(counts, 0.25), np.full(counts, 0.75)),
        (np.zeros(counts), np.ones(counts)),
        (0.5 * ramp + 0.25, 0.5 * ramp + 0.45),
        (0.5 * ramp, np.full(counts, 0.5)),
    ]
    return [
        (_field_from_values(config, a), _field_from_values(config, b)) for a, b in pairs
    ]


def contraction_test(config, trials, seed=0):
    """Max of sup|R u1 - R u2| / sup|u1 - u2| over random + structured pairs."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    pairs = _structured_pairs(config)
    for _ in range(trials):
        pairs.append((random_field(config, rng), random_field(config, rng)))
    for u1, u2 in pairs:
        denom = float(np.max(np.abs(u1.values - u2.values)))
        if denom == 0.0:
            continue
        r1 = apply_R(config, u1)
        r2 = apply_R(config, u2)
        num = float(np.max(np.abs(r1.values - r2.values)))
        worst = max(worst, num / denom)
    return worst


def monotonicity_test(config, trials, seed=0):
    """(all order-preserving, worst violation) over random ordered pairs.

    Pairs are built by adding a nonnegative field; structured pairs
    (constant shifts of constants and ramps) are always included.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    pairs = []
    for a, b in _structured_pairs(config):
        lowv = np.minimum(a.values, b.values)
        pairs.append((_field_from_values(config, lowv), _field_from_values(config, lowv + 0.2)))
    for _ in range(trials):
        base = rng.uniform(0.0, 0.6, size=config.grid.counts)
        bump = rng.uniform(0.0, 0.4, size=config.grid.counts)
        pairs.append((_field_from_values(config, base), _field_from_values(config, base + bump)))
    for low, high in pairs:
        r_low = apply_R(config, low)
        r_high = apply_R(config, high)
        worst = max(worst, float(np.max(r_low.values - r_high.values)))
    return worst <= 1e-12, worst


# ---------------------------------------------------------------------------
# Wulff inclusion and refinement studies


def wulff_inclusion_test(arrival, model, t, t0, n_dirs=360):
    """Check every node with U < t has gauge <= t + t0 + h/c0 slack."""
    gauge_lip = 1.0 / model.c_min if model.c_min > 0 else math.inf
    slack = arrival.grid.spacing * gauge_lip
    pts = arrival.grid.points()
    gauges = gauge_many(model, pts, n_dirs)
    target_gauges = gauges[arrival.target_mask.ravel()]
    if np.any(target_gauges > t0 + 1e-12):
        raise BadT0(
            f"target node gauge max = {target_gauges.max():g} exceeds t0 = {t0:g}"
        )
    sub = (arrival.U.ravel() < t) & ~arrival.target_mask.ravel()
    excess = gauges[sub] - (t + t0 + slack)
    violations = int(np.sum(excess > 0.0))
    return {
        "test": "wulff_inclusion",
        "params": {"t": t, "t0": t0, "n_dirs": n_dirs, "slack": slack},
        "metrics": {
            "checked": int(np.sum(sub)),
            "violations": violations,
            "max_excess": float(excess.max()) if excess.size else 0.0,
            "max_gauge": float(gauges[sub].max()) if np.any(sub) else 0.0,
        },
        "pass": violations == 0,
    }


def gauge_many(model, pts, n_dirs):
    from . import directions

    units = directions.unit_sphere_sample(model.dimension, int(n_dirs))
    cvals = np.asarray(model.forcing(units), dtype=float)
    if np.any(cvals <= 0.0):
        raise DegenerateForcing("gauge needs c > 0 on all sampled directions")
    return np.max(pts @ units.T / cvals, axis=1)


@dataclass
class RefinementReport:
    levels: list = dc_field(default_factory=list)
    sup_errors: list = dc_field(default_factory=list)
    runtimes: list = dc_field(default_factory=list)

    def as_dict(self):
        return {
            "levels": [list(level) for level in self.levels],
            "sup_errors": list(self.sup_errors),
            "runtimes": list(self.runtimes),
        }


@dataclass(frozen=True)
class RadialOracleParams:
    r0: float
    beta: float
    gamma: float


def radial_error(arrival, oracle, r_lo, r_hi):
    """Sup abs/rel error of U against the radial oracle on an annulus."""
    pts = arrival.grid.points()
    radii = np.linalg.norm(pts, axis=1)
    sel = (radii >= r_lo) & (radii <= r_hi) & ~arrival.target_mask.ravel()
    if not np.any(sel):
        from .errors import InvariantViolation

        raise InvariantViolation(
            f"empty comparison annulus [{r_lo:g}, {r_hi:g}]: enlarge the box or shrink eps"
        )
    n = arrival.grid.dimension
    exact = np.array(
        [radial_arrival_oracle(oracle.r0, r, oracle.beta, oracle.gamma, n) for r in radii[sel]]
    )
    got = arrival.U.ravel()[sel]
    abs_err = np.abs(got - exact)
    return {
        "count": int(sel.sum()),
        "sup_abs": float(abs_err.max()),
        "sup_rel": float(np.max(abs_err / exact)),
    }


def refinement_study(base, levels, oracle):
    """Solve at each (eps, h, n_dir) level; sup error vs the radial oracle.

    The error annulus excludes a two-step collar around the target boundary
    and around the box. The expected monotone decrease is reported, never
    asserted here.
    """
    from dataclasses import replace

    from . import solver as solver_mod
    from .grid import GridSpec

    report = RefinementReport()
    for eps, h, n_dir in levels:
        extent = base.grid.upper - base.grid.origin
        counts = tuple(int(round(e / h)) + 1 for e in extent)
        grid = GridSpec(base.grid.origin, h, counts)
        config = replace(base, grid=grid, epsilon=eps, n_dir=n_dir)
        field, diag = solver_mod.solve(config)
        arr = solver_mod.arrival_field(field)
        collar = 2.0 * base.model.max_step_length(eps)
        r_hi = float(min(np.min(-grid.origin), np.min(grid.upper))) - collar
        err = radial_error(arr, oracle, oracle.r0 + collar, r_hi)
        report.levels.append((eps, h, n_dir))
        report.sup_errors.append(err["sup_abs"])
        report.runtimes.append(diag.wall_time)
    return report
