import math

import numpy as np
import pytest

from frontgame import directions
from frontgame.anisotropy import make_model
from frontgame.errors import InvariantViolation
from frontgame.game import psi
from frontgame.grid import GridSpec, TargetSet, ValueField, rasterize_target
from frontgame.solver import (
    ProblemConfig,
    apply_R,
    arrival_field,
    initial_field,
    solve,
    sublevel_set,
)


def radial_config(**kw):
    model = make_model(directions.constant(1.0), directions.constant(2.0), 2)
    target = TargetSet("ball", center=[0.0, 0.0], radius=1.0, boundary_value=0.0)
    grid = GridSpec([-3.0, -3.0], kw.pop("h", 0.1), kw.pop("counts", (61, 61)))
    defaults = dict(epsilon=0.2, n_dir=16, tolerance=1e-6, sweep_mode="jacobi")
    defaults.update(kw)
    return ProblemConfig(model, target, grid, **defaults)


def capture_config():
    # strong drift and a large step so one round reaches the target from
    # the node (1.2, 0) for every sign choice
    model = make_model(directions.constant(1.0), directions.constant(2.4), 2)
    target = TargetSet("ball", center=[0.0, 0.0], radius=1.0, boundary_value=0.0)
    grid = GridSpec([-3.0, -3.0], 0.2, (31, 31))
    return ProblemConfig(model, target, grid, epsilon=0.4, n_dir=8, tolerance=1e-6)


class TestConfigValidation:
    def test_step_resolvability_rule(self):
        with pytest.raises(InvariantViolation, match="sqrt"):
            radial_config(h=0.2, counts=(31, 31), epsilon=0.1).validate()

    def test_valid_config_passes(self):
        radial_config().validate()

    def test_bad_sweep_mode(self):
        with pytest.raises(InvariantViolation):
            radial_config(sweep_mode="chaotic").validate()


class TestApplyR:
    def test_one_round_capture_value_is_exact(self):
        cfg = capture_config()
        field = initial_field(cfg)
        new = apply_R(cfg, field)
        i = int(round((1.2 + 3.0) / 0.2))
        j = int(round((0.0 + 3.0) / 0.2))
        assert new.values[i, j] == -math.expm1(-cfg.epsilon**2)

    def test_masked_nodes_unchanged(self):
        cfg = radial_config()
        field = initial_field(cfg)
        new = apply_R(cfg, field)
        np.testing.assert_array_equal(
            new.values[field.target_mask], field.values[field.target_mask]
        )

    def test_constant_fields_contract_exactly(self):
        cfg = radial_config()
        mask, gvals = rasterize_target(cfg.grid, cfg.target)
        mk = lambda k: ValueField(
            cfg.grid, np.where(mask, gvals, k), mask, cfg.epsilon
        )
        r0 = apply_R(cfg, mk(0.0))
        r1 = apply_R(cfg, mk(1.0))
        # far from both the target and the box, the gap is exactly the discount
        i = int(round((0.0 + 3.0) / 0.1))
        j = int(round((2.0 + 3.0) / 0.1))
        gap = r1.values[j, i] - r0.values[j, i]
        assert gap == pytest.approx(math.exp(-cfg.epsilon**2), rel=1e-14)

    def test_fixed_point_residual(self):
        cfg = radial_config(tolerance=1e-8)
        field, diag = solve(cfg)
        assert diag.converged
        again = apply_R(cfg, field)
        assert np.max(np.abs(again.values - field.values)) <= 1e-8

    def test_gauss_seidel_same_fixed_point(self):
        cfg_j = radial_config(tolerance=1e-9)
        cfg_g = radial_config(tolerance=1e-9, sweep_mode="gauss_seidel")
        fj, _ = solve(cfg_j)
        fg, _ = solve(cfg_g)
        assert np.max(np.abs(fj.values - fg.values)) < 1e-7


class TestSolve:
    def test_converged_annulus_below_one(self):
        cfg = radial_config()
        field, diag = solve(cfg)
        assert diag.converged
        pts = cfg.grid.points()
        radii = np.linalg.norm(pts, axis=1).reshape(cfg.grid.counts)
        annulus = (radii > 1.2) & (radii < 2.0)
        assert np.all(field.values[annulus] < 1.0)
        assert np.all(field.values >= 0.0)

    def test_curvature_only_ball_never_captures(self):
        # with zero forcing, both sign outcomes inside a convex target would
        # put their midpoint inside too; the value off a ball target stays 1
        model = make_model(directions.constant(1.0), directions.constant(0.0), 2)
        target = TargetSet("ball", center=[0.0, 0.0], radius=1.0, boundary_value=0.0)
        grid = GridSpec([-3.0, -3.0], 0.1, (61, 61))
        cfg = ProblemConfig(model, target, grid, epsilon=0.3, n_dir=16, tolerance=1e-6)
        field, diag = solve(cfg)
        assert diag.converged
        assert np.all(field.values[~field.target_mask] == 1.0)

    def test_curvature_only_capture_in_a_neck(self):
        # a non-convex target: the node between the two lobes is captured by
        # the pure diffusion step (the neck pinches at game scale)
        model = make_model(directions.constant(1.0), directions.constant(0.0), 2)
        eps = 0.2
        reach = eps * math.sqrt(2.0)
        target = TargetSet(
            "balls",
            centers=[[-reach, 0.0], [reach, 0.0]],
            radii=[0.15, 0.15],
            boundary_value=0.0,
        )
        grid = GridSpec([-1.5, -1.5], 0.05, (61, 61))
        cfg = ProblemConfig(model, target, grid, epsilon=eps, n_dir=16, tolerance=1e-6)
        field, diag = solve(cfg)
        assert diag.converged
        i = j = 30  # the origin, outside both lobes
        assert not field.target_mask[i, j]
        assert field.values[i, j] == pytest.approx(-math.expm1(-eps * eps), abs=1e-12)

    def test_iteration_budget_exhaustion(self):
        cfg = radial_config(max_iterations=1)
        field, diag = solve(cfg)
        assert not diag.converged
        assert diag.iterations == 1
        assert field.values.shape == cfg.grid.counts

    def test_monotone_nonincreasing_iterates(self):
        cfg = radial_config()
        field = initial_field(cfg)
        for _ in range(12):
            new = apply_R(cfg, field)
            assert np.all(new.values <= field.values + 1e-15)
            field = new

    def test_range_preservation(self):
        cfg = radial_config()
        field = initial_field(cfg)
        lo = psi(0.0)
        for _ in range(8):
            field = apply_R(cfg, field)
            assert np.all(field.values >= lo - 1e-15)
            assert np.all(field.values <= 1.0 + 1e-15)

    def test_contraction_factor_below_discount(self):
        cfg = radial_config()
        _, diag = solve(cfg)
        assert diag.contraction_factor_observed <= math.exp(-cfg.epsilon**2) + 1e-9

    def test_three_dimensional_smoke(self):
        # expanding front: forcing beats the curvature (n-1) b / r at the
        # target radius, and the drift step reaches inside at game scale
        model = make_model(directions.constant(1.0), directions.constant(4.0), 3)
        target = TargetSet("ball", center=[0.0, 0.0, 0.0], radius=1.2, boundary_value=0.0)
        grid = GridSpec([-2.0, -2.0, -2.0], 0.2, (21, 21, 21))
        cfg = ProblemConfig(model, target, grid, epsilon=0.3, n_dir=6, n_basis=2,
                            tolerance=1e-3)
        field, diag = solve(cfg)
        assert diag.converged
        assert diag.backend == "python"
        pts = grid.points()
        radii = np.linalg.norm(pts, axis=1).reshape(grid.counts)
        near = (radii > 1.2) & (radii < 1.7)
        assert np.all(field.values[near] < 1.0)


class TestBoundaryDataLocality:
    def test_deep_interior_perturbation_is_invisible(self):
        # two boundary data functions agreeing near the target boundary
        model = make_model(directions.constant(1.0), directions.constant(2.0), 2)
        grid = GridSpec([-3.0, -3.0], 0.15, (41, 41))
        eps = 0.25
        step = model.max_step_length(eps)

        def g_base(pts):
            return 0.1 * np.ones(pts.shape[0])

        def g_perturbed(pts):
            # differs only deeper inside the target than one game step
            depth = 1.5 - np.linalg.norm(pts, axis=1)
            return 0.1 + np.where(depth > 1.2 * step, 5.0, 0.0)

        fields = []
        for g in (g_base, g_perturbed):
            target = TargetSet("ball", center=[0.0, 0.0], radius=1.5, boundary_value=g)
            cfg = ProblemConfig(model, target, grid, epsilon=eps, n_dir=12, tolerance=1e-7)
            field, diag = solve(cfg)
            assert diag.converged
            fields.append(field.values)
        np.testing.assert_array_equal(fields[0], fields[1])


class TestArrival:
    def test_transform_values(self):
        grid = GridSpec([0.0, 0.0], 1.0, (2, 2))
        values = np.array([[0.0, 0.5], [1.0, 0.9999999999]])
        mask = np.zeros((2, 2), dtype=bool)
        arr = arrival_field(ValueField(grid, values, mask, 0.1), eta=1e-9)
        assert arr.U[0, 0] == 0.0
        assert arr.U[0, 1] == pytest.approx(math.log(2.0), abs=1e-12)
        assert np.isinf(arr.U[1, 0])
        assert np.isinf(arr.U[1, 1])  # within eta of 1

    def test_sublevel_sets(self):
        cfg = radial_config()
        field, _ = solve(cfg)
        arr = arrival_field(field)
        tiny = sublevel_set(arr, 1e-12)
        np.testing.assert_array_equal(tiny, field.target_mask)
        small = sublevel_set(arr, 0.3)
        large = sublevel_set(arr, 0.8)
        assert np.all(large[small])
        everything = sublevel_set(arr, np.inf)
        np.testing.assert_array_equal(everything, np.isfinite(arr.U) | field.target_mask)
