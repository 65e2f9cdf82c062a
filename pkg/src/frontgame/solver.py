"""Grid fixed-point solver for the discounted min-max value of the game.

One sweep applies, at every unmasked node, one discounted round of play
against the interpolated field (Jacobi reads the previous snapshot;
Gauss-Seidel reads freshest values in alternating node order). Starting from
1 off-target the iterates decrease monotonically, and each sweep contracts
distances by exp(-eps^2), so the stopping rule

    sup |u_k - u_{k-1}| <= tolerance * (1 - exp(-eps^2))

bounds the distance to the exact grid fixed point by the tolerance.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvariantViolation
from .game import psi_inv_array
from .grid import GridSpec, TargetSet, ValueField, rasterize_target
from .kernels.plan import MODE_GS_FORWARD, MODE_GS_REVERSE, MODE_JACOBI

SWEEP_MODES = ("jacobi", "gauss_seidel")


@dataclass
class ProblemConfig:
    """Everything one solve needs; validated before any sweep runs."""

    model: object
    target: TargetSet
    grid: GridSpec
    epsilon: float
    n_dir: int = 16
    n_basis: int = 1
    tolerance: float = 1e-6
    max_iterations: int = 200_000
    sweep_mode: str = "jacobi"
    seed: int = 0

    def validate(self):
        if self.epsilon <= 0.0:
            raise InvariantViolation("epsilon must be positive")
        if self.tolerance <= 0.0:
            raise InvariantViolation("tolerance must be positive")
        if self.max_iterations < 1:
            raise InvariantViolation("max_iterations must be >= 1")
        if self.sweep_mode not in SWEEP_MODES:
            raise InvariantViolation(f"sweep_mode must be one of {SWEEP_MODES}")
        if self.n_dir < 4:
            raise InvariantViolation("n_dir must be >= 4")
        if self.grid.dimension != self.model.dimension:
            raise InvariantViolation("grid and model dimensions differ")
        limit = 0.5 * self.epsilon * math.sqrt(2.0 * self.model.b_min)
        if self.grid.spacing > limit:
            raise InvariantViolation(
                "step resolvability violated: grid spacing h = "
                f"{self.grid.spacing:g} exceeds 0.5 * epsilon * sqrt(2 * min b) = {limit:g}"
            )
        return self


@dataclass
class SolveDiagnostics:
    iterations: int = 0
    final_residual: float = math.inf
    contraction_factor_observed: float = 0.0
    wall_time: float = 0.0
    converged: bool = False
    backend: str = "python"

    def as_dict(self):
        return dict(self.__dict__)


@dataclass
class ArrivalField:
    """Arrival times U = psi^{-1}(u) on the grid; +inf where u >= 1 - eta."""

    grid: GridSpec
    U: np.ndarray
    target_mask: np.ndarray


def initial_field(config):
    """Transformed boundary data on the target, 1 everywhere else."""
    mask, gvals = rasterize_target(config.grid, config.target)
    values = np.where(mask, gvals, 1.0)
    return ValueField(config.grid, values, mask, config.epsilon)


def apply_R(config, field, order="forward"):
    """One application of the sweep operator; Jacobi is the plain operator.

    In Jacobi mode only the input snapshot is read, so this is exactly the
    discounted min-max operator on fields. Gauss-Seidel mode performs one
    in-place sweep in the requested node order.
    """
    if field.grid.counts != config.grid.counts or field.epsilon != config.epsilon:
        raise InvariantViolation("field does not match the configuration grid/epsilon")
    plan = kernels.build_plan(config)
    return _apply(plan, config, field, order)


def _apply(plan, config, field, order="forward", backend=None):
    out = field.values.copy()
    if config.sweep_mode == "jacobi":
        mode = MODE_JACOBI
        kernels.run_sweep(plan, field.values, field.target_mask, out, mode, backend)
    else:
        mode = MODE_GS_REVERSE if order == "reverse" else MODE_GS_FORWARD
        kernels.run_sweep(plan, out, field.target_mask, out, mode, backend)
    return ValueField(field.grid, out, field.target_mask.copy(), field.epsilon)


def solve(config):
    """Iterate sweeps to the fixed point; never raises on non-convergence.

    Returns (field, diagnostics); diagnostics.converged is False when the
    iteration budget ran out, in which case the best field so far is returned.
    """
    config.validate()
    start = time.perf_counter()
    plan = kernels.build_plan(config)
    backend = kernels.backend_for(plan)
    field = initial_field(config)
    threshold = config.tolerance * plan.one_minus
    diag = SolveDiagnostics(backend=backend)
    previous_residual = None
    for k in range(1, config.max_iterations + 1):
        order = "forward" if k % 2 == 1 else "reverse"
        new = _apply(plan, config, field, order, backend)
        residual = float(np.max(np.abs(new.values - field.values)))
        field = new
        diag.iterations = k
        diag.final_residual = residual
        if previous_residual is not None and previous_residual > 0.0:
            diag.contraction_factor_observed = max(
                diag.contraction_factor_observed, residual / previous_residual
            )
        previous_residual = residual
        if residual <= threshold:
            diag.converged = True
            break
    diag.wall_time = time.perf_counter() - start
    return field, diag


def arrival_field(field, eta=1e-9):
    """Nodewise U = psi^{-1}(u); nodes with u >= 1 - eta become +inf."""
    if not 0.0 < eta < 1.0:
        raise InvariantViolation("eta must lie in (0, 1)")
    u = np.minimum(field.values, 1.0)
    U = psi_inv_array(u)
    U[field.values >= 1.0 - eta] = np.inf
    return ArrivalField(field.grid, U, field.target_mask.copy())


def sublevel_set(arrival, t):
    """Nodes reached strictly before time t, always including the target."""
    if not t > 0.0:
        raise InvariantViolation("t must be positive")
    return (arrival.U < t) | arrival.target_mask
