import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from frontgame.errors import EmptyTarget, FrontGameError, TargetOutsideBox
from frontgame.game import psi
from frontgame.grid import (
    GameSampler,
    GridSpec,
    TargetSet,
    ValueField,
    interpolate,
    interpolate_many,
    multilinear,
    rasterize_target,
)


def unit_ball(g_value=0.0):
    return TargetSet("ball", center=[0.0, 0.0], radius=1.0, boundary_value=g_value)


@pytest.fixture
def small_grid():
    return GridSpec([-3.0, -3.0], 0.5, (13, 13))


class TestGridSpec:
    def test_geometry(self, small_grid):
        np.testing.assert_allclose(small_grid.upper, [3.0, 3.0])
        assert small_grid.dimension == 2
        assert small_grid.points().shape == (169, 2)

    def test_contains_closed_box(self, small_grid):
        pts = np.array([[3.0, 3.0], [3.0001, 0.0], [-3.0, 2.9], [0.0, -3.1]])
        np.testing.assert_array_equal(small_grid.contains(pts), [True, False, True, False])

    def test_node_cap(self):
        with pytest.raises(FrontGameError):
            GridSpec([0.0, 0.0], 1e-5, (10_000, 10_000))

    def test_bad_spacing(self):
        with pytest.raises(FrontGameError):
            GridSpec([0.0], -1.0, (4,))


class TestTargetGeometry:
    def test_ball_membership(self):
        t = unit_ball()
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0001, 0.0]])
        np.testing.assert_array_equal(t.contains(pts), [True, True, False])

    def test_ball_projection(self):
        t = unit_ball()
        proj = t.nearest_boundary(np.array([[2.0, 0.0], [0.0, 0.0], [0.0, -0.25]]))
        np.testing.assert_allclose(proj[0], [1.0, 0.0])
        np.testing.assert_allclose(proj[1], [1.0, 0.0])  # deterministic center rule
        np.testing.assert_allclose(proj[2], [0.0, -1.0])

    def test_box_projection_from_inside_and_outside(self):
        t = TargetSet("box", lo=[-1.0, -2.0], hi=[1.0, 2.0])
        proj = t.nearest_boundary(np.array([[0.9, 0.0], [3.0, 0.5]]))
        np.testing.assert_allclose(proj[0], [1.0, 0.0])
        np.testing.assert_allclose(proj[1], [1.0, 0.5])

    def test_union_of_balls(self):
        t = TargetSet("balls", centers=[[0.0, 0.0], [3.0, 0.0]], radii=[1.0, 0.5])
        pts = np.array([[2.6, 0.0], [1.5, 0.0], [0.5, 0.5]])
        np.testing.assert_array_equal(t.contains(pts), [True, False, True])

    def test_level_table_membership(self):
        grid = GridSpec([-2.0, -2.0], 0.25, (17, 17))
        pts = grid.points()
        table = (np.linalg.norm(pts, axis=1) - 1.0).reshape(grid.counts)
        t = TargetSet("sdf", table=table, table_grid=grid)
        inside = t.contains(np.array([[0.0, 0.0], [0.5, 0.5], [1.5, 0.0]]))
        np.testing.assert_array_equal(inside, [True, True, False])

    def test_transformed_boundary_data_callable(self):
        t = unit_ball(g_value=0.0)
        t2 = TargetSet(
            "ball",
            center=[0.0, 0.0],
            radius=1.0,
            boundary_value=lambda pts: pts[:, 0] + 1.0,
        )
        g = t2.g_transformed(np.array([[2.0, 0.0], [-0.5, 0.0]]))
        assert g[0] == pytest.approx(psi(2.0), abs=1e-15)
        assert g[1] == pytest.approx(psi(0.0), abs=1e-15)
        assert np.all(t.g_transformed(np.array([[2.0, 0.0]])) == 0.0)


class TestRasterize:
    def test_mask_matches_closed_ball(self):
        grid = GridSpec([-3.0, -3.0], 0.5, (13, 13))
        mask, gvals = rasterize_target(grid, unit_ball())
        pts = grid.points()
        want = (np.linalg.norm(pts, axis=1) <= 1.0).reshape(grid.counts)
        np.testing.assert_array_equal(mask, want)
        assert np.all(gvals[mask] == 0.0)

    def test_transformed_boundary_value(self):
        grid = GridSpec([-3.0, -3.0], 0.5, (13, 13))
        mask, gvals = rasterize_target(grid, unit_ball(math.log(2.0)))
        np.testing.assert_allclose(gvals[mask], 0.5, atol=1e-15)

    def test_target_outside_box(self):
        grid = GridSpec([-3.0, -3.0], 0.5, (13, 13))
        with pytest.raises(TargetOutsideBox):
            rasterize_target(grid, TargetSet("ball", center=[4.0, 0.0], radius=1.0))

    def test_empty_target(self):
        grid = GridSpec([-3.0, -3.0], 1.0, (7, 7))
        with pytest.raises(EmptyTarget):
            rasterize_target(grid, TargetSet("ball", center=[0.5, 0.5], radius=0.1))


class TestInterpolate:
    def _field(self, values, h=1.0):
        values = np.asarray(values, dtype=float)
        grid = GridSpec([0.0, 0.0], h, values.shape)
        return ValueField(grid, values, np.zeros(values.shape, dtype=bool), 0.1)

    def test_constant_reproduced_exactly(self):
        field = self._field(np.full((4, 4), 0.3737123))
        rng = np.random.default_rng(0)
        for _ in range(25):
            x = rng.uniform(0.0, 3.0, size=2)
            assert interpolate(field, x) == 0.3737123

    def test_outside_box_is_one(self):
        field = self._field(np.zeros((4, 4)))
        assert interpolate(field, np.array([-0.001, 1.0])) == 1.0
        assert interpolate(field, np.array([1.0, 3.0001])) == 1.0
        assert interpolate(field, np.array([3.0, 3.0])) == 0.0  # boundary is inside

    def test_bilinear_center_value(self):
        vals = np.zeros((2, 2))
        vals[0, 1] = 1.0
        vals[1, 1] = 1.0
        field = self._field(vals)
        assert interpolate(field, np.array([0.5, 0.5])) == pytest.approx(0.5, abs=1e-15)

    @settings(max_examples=50, deadline=None)
    @given(data=st.data())
    def test_monotone_and_nonexpansive(self, data):
        rng = np.random.default_rng(data.draw(st.integers(0, 2**31)))
        low = rng.uniform(0.0, 1.0, size=(5, 5))
        bump = rng.uniform(0.0, 0.5, size=(5, 5))
        f_low = self._field(low)
        f_high = self._field(low + bump)
        pts = rng.uniform(-0.5, 4.5, size=(40, 2))
        a = interpolate_many(f_low, pts)
        b = interpolate_many(f_high, pts)
        assert np.all(a <= b + 1e-15)
        inside = f_low.grid.contains(pts)
        assert np.all((b - a)[inside] <= bump.max() + 1e-15)

    def test_multilinear_three_dimensional(self):
        grid = GridSpec([0.0, 0.0, 0.0], 1.0, (3, 3, 3))
        vals = np.zeros((3, 3, 3))
        vals[1, 1, 1] = 8.0
        got = multilinear(grid, vals, np.array([[0.5, 0.5, 0.5]]))
        assert got[0] == pytest.approx(1.0, abs=1e-15)


class TestGameSampler:
    def test_branch_priority(self):
        grid = GridSpec([-2.0, -2.0], 0.5, (9, 9))
        target = unit_ball(math.log(2.0))
        mask, gvals = rasterize_target(grid, target)
        values = np.where(mask, gvals, 0.8)
        sampler = GameSampler(ValueField(grid, values, mask, 0.1), target)
        assert sampler(np.array([5.0, 0.0])) == 1.0  # outside the box
        assert sampler(np.array([0.3, 0.2])) == pytest.approx(0.5, abs=1e-15)  # target branch
        assert sampler(np.array([1.75, 1.75])) == pytest.approx(0.8, abs=1e-15)

    def test_target_branch_uses_true_geometry(self):
        # a point inside the ball but off every masked node still reads g
        grid = GridSpec([-2.0, -2.0], 0.5, (9, 9))
        target = unit_ball(0.0)
        mask, gvals = rasterize_target(grid, target)
        values = np.where(mask, gvals, 1.0)
        sampler = GameSampler(ValueField(grid, values, mask, 0.1), target)
        assert sampler(np.array([0.99, 0.05])) == 0.0
