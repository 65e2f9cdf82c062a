import math

import numpy as np
import pytest

from frontgame import directions
from frontgame.anisotropy import make_model
from frontgame.errors import BadT0, DegenerateForcing, StalledFront, ZeroGradient
from frontgame.grid import GridSpec, TargetSet
from frontgame.solver import ProblemConfig, arrival_field, solve
from frontgame.verification import (
    RadialOracleParams,
    consistency_error,
    consistency_study,
    contraction_test,
    monotonicity_test,
    radial_arrival_oracle,
    radial_error,
    refinement_study,
    upper_bound_oracle,
    wulff_inclusion_test,
)


class TestRadialOracle:
    def test_closed_form_anchor(self):
        # dr/dt = 2 - 1/r from r0 = 1: antiderivative s/2 + ln(2s - 1)/4
        want = 0.5 + 0.25 * math.log(3.0)
        assert radial_arrival_oracle(1.0, 2.0, 1.0, 2.0, 2) == pytest.approx(want, abs=1e-9)

    def test_closed_form_along_radii(self):
        anti = lambda s: s / 2.0 + 0.25 * math.log(2.0 * s - 1.0)
        for r in (1.2, 1.7, 2.6):
            assert radial_arrival_oracle(1.0, r, 1.0, 2.0, 2) == pytest.approx(
                anti(r) - anti(1.0), abs=1e-9
            )

    def test_zero_distance(self):
        assert radial_arrival_oracle(1.0, 1.0, 1.0, 5.0, 3) == 0.0

    def test_eikonal_limit(self):
        got = radial_arrival_oracle(1.0, 3.0, 1e-12, 1.0, 2)
        assert got == pytest.approx(2.0, abs=1e-6)

    def test_stalled_front(self):
        with pytest.raises(StalledFront):
            radial_arrival_oracle(1.0, 2.0, 1.0, 1.0, 2)  # gamma = (n-1) b / r0


class TestUpperBoundOracle:
    def test_unit_coefficients(self):
        model = make_model(directions.constant(1.0), directions.constant(1.0), 2)
        big_r, bound = upper_bound_oracle(model, np.array([5.0, 0.0]))
        assert big_r == pytest.approx(3.0, abs=1e-12)
        assert bound == pytest.approx(6.0, abs=1e-12)

    def test_stronger_forcing(self):
        model = make_model(directions.constant(1.0), directions.constant(2.0), 2)
        big_r, bound = upper_bound_oracle(model, np.array([4.0, 0.0]))
        assert big_r == pytest.approx(2.0, abs=1e-12)
        assert bound == pytest.approx(3.0, abs=1e-12)

    def test_degenerate_forcing(self):
        model = make_model(directions.constant(1.0), directions.constant(0.0), 2)
        with pytest.raises(DegenerateForcing):
            upper_bound_oracle(model, np.array([1.0, 0.0]))


@pytest.fixture(scope="module")
def flat():
    return make_model(directions.constant(1.0), directions.constant(0.0), 2)


@pytest.fixture(scope="module")
def forced():
    return make_model(directions.constant(1.0), directions.constant(1.0), 2)


class TestConsistency:
    def test_linear_profile_exact(self, flat):
        # phi linear, no forcing: the aligned candidate cancels the diffusion
        quad = (0.3, (0.8, -0.6), ((0.0, 0.0), (0.0, 0.0)))
        up, low = consistency_error(flat, quad, np.zeros(2), 0.2, 16)
        assert abs(up) <= 1e-14
        assert abs(low) <= 1e-14

    def test_pure_quadratic_exact(self, flat):
        # phi = |y|^2/2 at x = (1,0): F = -1 and the tangential move is exact
        quad = (0.5, (1.0, 0.0), ((1.0, 0.0), (0.0, 1.0)))
        up, low = consistency_error(flat, quad, np.array([1.0, 0.0]), 0.1, 16)
        assert abs(up) <= 1e-13
        assert abs(low) <= 1e-13

    def test_forcing_term_enters_linearly(self, forced):
        # linear phi with |Dphi| = 1: the drift contributes exactly -eps^2
        quad = (0.0, (1.0, 0.0), ((0.0, 0.0), (0.0, 0.0)))
        eps = 0.15
        up, low = consistency_error(forced, quad, np.zeros(2), eps, 16)
        assert abs(up) <= 1e-14
        assert abs(low) <= 1e-14

    def test_order_improves_with_eps(self, forced):
        quad = (0.2, (1.0, 0.0), ((0.5, 0.7), (0.7, -0.3)))
        rep = consistency_study(
            forced, quad, np.zeros(2), (0.2, 0.1, 0.05, 0.025), lambda e: round(3.2 / e)
        )
        r1 = [abs(v) for v in rep.ratios_part1]
        r3 = [abs(v) for v in rep.ratios_part3]
        assert r1[0] >= 2.0 * r1[-1]
        assert r3[0] >= 2.0 * r3[-1]

    def test_zero_gradient_rejected(self, forced):
        with pytest.raises(ZeroGradient):
            consistency_error(forced, (0.0, (0.0, 0.0), np.eye(2)), np.zeros(2), 0.1, 8)


def small_config(**kw):
    model = kw.pop(
        "model", make_model(directions.constant(1.0), directions.constant(1.0), 2)
    )
    target = TargetSet("ball", center=[0.0, 0.0], radius=0.8, boundary_value=0.0)
    grid = GridSpec([-2.0, -2.0], 0.125, (33, 33))
    defaults = dict(epsilon=0.2, n_dir=8, tolerance=1e-6)
    defaults.update(kw)
    return ProblemConfig(model, target, grid, **defaults)


class TestOperatorProperties:
    def test_contraction_ratio(self):
        cfg = small_config()
        ratio = contraction_test(cfg, trials=20, seed=1)
        assert ratio <= math.exp(-cfg.epsilon**2) + 1e-12
        # the constant structured pair attains the bound where no one-step
        # capture or box exit is possible
        assert ratio >= math.exp(-cfg.epsilon**2) - 1e-12

    def test_monotonicity(self):
        cfg = small_config()
        ok, worst = monotonicity_test(cfg, trials=20, seed=2)
        assert ok
        assert worst <= 1e-12


class TestWulffInclusion:
    def test_isotropic_desk_run(self):
        cfg = small_config(epsilon=0.25, n_dir=16)
        field, _ = solve(cfg)
        arr = arrival_field(field)
        report = wulff_inclusion_test(arr, cfg.model, t=1.0, t0=0.8, n_dirs=360)
        assert report["pass"]
        assert report["metrics"]["violations"] == 0

    def test_t_to_zero_reduces_to_target_check(self):
        cfg = small_config(epsilon=0.25, n_dir=16)
        field, _ = solve(cfg)
        arr = arrival_field(field)
        report = wulff_inclusion_test(arr, cfg.model, t=1e-9, t0=0.8, n_dirs=360)
        assert report["pass"]

    def test_bad_t0(self):
        cfg = small_config(epsilon=0.25, n_dir=16)
        field, _ = solve(cfg)
        arr = arrival_field(field)
        with pytest.raises(BadT0):
            wulff_inclusion_test(arr, cfg.model, t=1.0, t0=0.1, n_dirs=360)


class TestRefinement:
    def test_single_level_report(self):
        cfg = small_config(model=make_model(directions.constant(1.0), directions.constant(2.0), 2))
        oracle = RadialOracleParams(r0=0.8, beta=1.0, gamma=2.0)
        report = refinement_study(cfg, [(0.15, 0.1, 8)], oracle)
        assert len(report.levels) == 1
        assert len(report.sup_errors) == 1
        assert report.sup_errors[0] < 0.5

    def test_oracle_errors_propagate(self):
        cfg = small_config()
        oracle = RadialOracleParams(r0=0.8, beta=1.0, gamma=1.0)  # stalls at r0
        with pytest.raises(StalledFront):
            refinement_study(cfg, [(0.15, 0.1, 8)], oracle)

    def test_radial_error_metric(self):
        cfg = small_config(model=make_model(directions.constant(1.0), directions.constant(2.0), 2))
        field, _ = solve(cfg)
        arr = arrival_field(field)
        err = radial_error(arr, RadialOracleParams(0.8, 1.0, 2.0), 1.1, 1.6)
        assert err["count"] > 0
        assert err["sup_abs"] >= 0.0
        assert err["sup_rel"] < 0.5
