"""Rectilinear grids, target sets, transformed value fields, interpolation.

Grid values live on nodes origin + h * index (uniform spacing, C order).
Interpolation is multilinear in nested-lerp form a + t*(b - a), which
reproduces constants exactly, is monotone in the node values, and is
sup-norm nonexpansive; points outside the box evaluate to exactly 1
(the transformed stand-in for "arrival time +infinity").
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .errors import EmptyTarget, FrontGameError, TargetOutsideBox
from .game import psi

MAX_NODES = 20_000_000

TARGET_KIND_CODES = {"ball": 0, "box": 1, "balls": 2, "sdf": 3}


@dataclass(frozen=True)
class GridSpec:
    """Uniform rectilinear grid: origin, spacing h, per-axis node counts."""

    origin: np.ndarray
    spacing: float
    counts: tuple

    def __post_init__(self):
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=float))
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        if self.spacing <= 0.0:
            raise FrontGameError("grid spacing must be positive")
        if any(c < 2 for c in self.counts):
            raise FrontGameError("each axis needs at least 2 nodes")
        if int(np.prod(self.counts)) > MAX_NODES:
            raise FrontGameError(f"grid exceeds the {MAX_NODES} node cap")

    @property
    def dimension(self):
        return len(self.counts)

    @property
    def upper(self):
        return self.origin + self.spacing * (np.array(self.counts) - 1)

    def axes(self):
        return [self.origin[a] + self.spacing * np.arange(self.counts[a]) for a in range(self.dimension)]

    def points(self):
        """All node coordinates, shape (prod(counts), n), C order."""
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def contains(self, pts):
        """Closed-box membership per point."""
        pts = np.atleast_2d(pts)
        lo, hi = self.origin, self.upper
        return np.all((pts >= lo) & (pts <= hi), axis=1)


@dataclass(frozen=True)
class TargetSet:
    """Initial region D0 with boundary data G (time units, psi-transformed).

    kind 'ball'  : params center, radius
    kind 'box'   : params lo, hi (axis-aligned)
    kind 'balls' : params centers (K, n), radii (K,)
    kind 'sdf'   : level-function table sampled on the solver grid
                   (membership = interpolated table <= 0)

    boundary_value is a constant G or a callable of boundary points; interior
    evaluation points are projected to the nearest boundary point first, so
    only the trace of G on the target boundary ever matters.
    """

    kind: str
    center: Optional[np.ndarray] = None
    radius: Optional[float] = None
    lo: Optional[np.ndarray] = None
    hi: Optional[np.ndarray] = None
    centers: Optional[np.ndarray] = None
    radii: Optional[np.ndarray] = None
    table: Optional[np.ndarray] = None
    table_grid: Optional[GridSpec] = None
    boundary_value: Union[float, Callable] = 0.0

    def __post_init__(self):
        if self.kind not in TARGET_KIND_CODES:
            raise FrontGameError(f"unknown target kind {self.kind!r}")
        for name in ("center", "lo", "hi"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, np.asarray(v, dtype=float))
        if self.centers is not None:
            object.__setattr__(self, "centers", np.atleast_2d(np.asarray(self.centers, dtype=float)))
            object.__setattr__(self, "radii", np.atleast_1d(np.asarray(self.radii, dtype=float)))
        if self.table is not None:
            object.__setattr__(self, "table", np.ascontiguousarray(self.table, dtype=float))

    # -- geometry ------------------------------------------------------------
    def contains(self, pts):
        """Membership in the closed target region."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.kind == "ball":
            return np.linalg.norm(pts - self.center, axis=1) <= self.radius
        if self.kind == "box":
            return np.all((pts >= self.lo) & (pts <= self.hi), axis=1)
        if self.kind == "balls":
            d = np.linalg.norm(pts[:, None, :] - self.centers[None, :, :], axis=2)
            return np.any(d <= self.radii, axis=1)
        return multilinear(self.table_grid, self.table, pts, clamp=True) <= 0.0

    def nearest_boundary(self, pts):
        """Deterministic nearest-boundary projection used to evaluate G."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.kind == "ball":
            return _project_sphere(pts, self.center, self.radius)
        if self.kind == "box":
            return _project_box(pts, self.lo, self.hi)
        if self.kind == "balls":
            # closest individual sphere by unsigned distance to its surface
            d = np.abs(
                np.linalg.norm(pts[:, None, :] - self.centers[None, :, :], axis=2) - self.radii
            )
            pick = np.argmin(d, axis=1)
            out = np.empty_like(pts)
            for k in range(self.centers.shape[0]):
                sel = pick == k
                if np.any(sel):
                    out[sel] = _project_sphere(pts[sel], self.centers[k], self.radii[k])
            return out
        # sdf: one Newton step along the table gradient
        phi = multilinear(self.table_grid, self.table, pts, clamp=True)
        grad = _table_gradient(self.table_grid, self.table, pts)
        norm2 = np.maximum(np.sum(grad * grad, axis=1), 1e-30)
        return pts - (phi / norm2)[:, None] * grad

    def g_transformed(self, pts):
        """psi(G) at the nearest boundary point of each query point."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if callable(self.boundary_value):
            g = np.asarray(self.boundary_value(self.nearest_boundary(pts)), dtype=float)
        else:
            g = np.full(pts.shape[0], float(self.boundary_value))
        return -np.expm1(-g)

    def bounding_box(self):
        if self.kind == "ball":
            return self.center - self.radius, self.center + self.radius
        if self.kind == "box":
            return self.lo.copy(), self.hi.copy()
        if self.kind == "balls":
            return (
                np.min(self.centers - self.radii[:, None], axis=0),
                np.max(self.centers + self.radii[:, None], axis=0),
            )
        return None  # sdf extent is checked on the rasterized mask instead

    def min_boundary_value(self):
        if callable(self.boundary_value):
            return None
        return float(self.boundary_value)

    def kernel_pack(self):
        """(kind_code, flat params, g_const) for the compiled kernel.

        Only constant boundary data is compiled; callable G routes the solve
        through the pure-Python sampler.
        """
        if callable(self.boundary_value):
            return None
        g_const = psi(float(self.boundary_value))
        code = TARGET_KIND_CODES[self.kind]
        if self.kind == "ball":
            params = np.concatenate([self.center, [self.radius]])
        elif self.kind == "box":
            params = np.concatenate([self.lo, self.hi])
        elif self.kind == "balls":
            params = np.concatenate([[len(self.radii)], self.centers.ravel(), self.radii])
        else:
            params = np.zeros(0)
        return code, np.ascontiguousarray(params, dtype=float), g_const


def _project_sphere(pts, center, radius):
    rel = pts - center
    norm = np.linalg.norm(rel, axis=1)
    out = np.empty_like(pts)
    deg = norm < 1e-14
    if np.any(deg):
        e = np.zeros(pts.shape[1])
        e[0] = 1.0
        out[deg] = center + radius * e
    ok = ~deg
    out[ok] = center + radius * rel[ok] / norm[ok, None]
    return out


def _project_box(pts, lo, hi):
    clipped = np.clip(pts, lo, hi)
    inside = np.all((pts > lo) & (pts < hi), axis=1)
    if np.any(inside):
        # push interior points to the closest face
        sub = clipped[inside]
        d_lo = sub - lo
        d_hi = hi - sub
        axis_lo = np.argmin(d_lo, axis=1)
        axis_hi = np.argmin(d_hi, axis=1)
        use_lo = d_lo[np.arange(len(sub)), axis_lo] <= d_hi[np.arange(len(sub)), axis_hi]
        for r in range(len(sub)):
            if use_lo[r]:
                sub[r, axis_lo[r]] = lo[axis_lo[r]]
            else:
                sub[r, axis_hi[r]] = hi[axis_hi[r]]
        clipped[inside] = sub
    return clipped


def _table_gradient(grid, table, pts):
    h = grid.spacing
    out = np.empty_like(np.atleast_2d(pts))
    for a in range(grid.dimension):
        e = np.zeros(grid.dimension)
        e[a] = 0.5 * h
        out[:, a] = (
            multilinear(grid, table, pts + e, clamp=True)
            - multilinear(grid, table, pts - e, clamp=True)
        ) / h
    return out


@dataclass
class ValueField:
    """Transformed game value on a grid: u in [psi(min G), 1], 1 off-frontier.

    Masked (target) nodes carry psi(G) and are never overwritten.
    """

    grid: GridSpec
    values: np.ndarray
    target_mask: np.ndarray
    epsilon: float

    def copy(self):
        return ValueField(self.grid, self.values.copy(), self.target_mask.copy(), self.epsilon)


def rasterize_target(grid, target):
    """Flag nodes inside the closed target; carry transformed boundary data.

    Returns (mask, gvals) with gvals = psi(G at nearest boundary point) on
    masked nodes and NaN elsewhere.
    """
    bbox = target.bounding_box()
    lo, hi = grid.origin, grid.upper
    if bbox is not None:
        if np.any(bbox[0] <= lo) or np.any(bbox[1] >= hi):
            raise TargetOutsideBox(
                f"target bounding box {bbox[0]}..{bbox[1]} not strictly inside {lo}..{hi}"
            )
    pts = grid.points()
    mask = target.contains(pts).reshape(grid.counts)
    if not np.any(mask):
        raise EmptyTarget("no grid node lies inside the target")
    if bbox is None:
        edge = np.zeros(grid.counts, dtype=bool)
        for a in range(grid.dimension):
            edge[tuple(0 if i == a else slice(None) for i in range(grid.dimension))] = True
            edge[tuple(-1 if i == a else slice(None) for i in range(grid.dimension))] = True
        if np.any(mask & edge):
            raise TargetOutsideBox("rasterized target touches the grid boundary layer")
    gvals = np.full(grid.counts, np.nan)
    flat = mask.ravel()
    gvals.ravel()[flat] = target.g_transformed(pts[flat])
    return mask, gvals


def _locate(grid, pts):
    """Per-axis cell index and fractional coordinate, clamped to the box."""
    rel = (pts - grid.origin) / grid.spacing
    idx = np.empty(pts.shape, dtype=np.intp)
    frac = np.empty(pts.shape)
    for a in range(grid.dimension):
        i = np.floor(rel[:, a]).astype(np.intp)
        i = np.clip(i, 0, grid.counts[a] - 2)
        idx[:, a] = i
        frac[:, a] = np.clip(rel[:, a] - i, 0.0, 1.0)
    return idx, frac


def multilinear(grid, values, pts, clamp=False):
    """Multilinear interpolation in nested-lerp form; clamped at the box edge.

    With clamp=False the caller is responsible for points outside the box
    (they are evaluated on the clamped cell).
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    idx, frac = _locate(grid, pts)
    n = grid.dimension
    corner_vals = np.empty((pts.shape[0],) + (2,) * n)
    for corner in np.ndindex(*(2,) * n):
        gather = tuple(idx[:, a] + corner[a] for a in range(n))
        corner_vals[(slice(None),) + corner] = values[gather]
    out = corner_vals
    for a in range(n - 1, -1, -1):
        t = frac[:, a].reshape((-1,) + (1,) * a)
        lowv = out[..., 0]
        out = lowv + t * (out[..., 1] - lowv)
    return out


def interpolate_many(field, pts):
    """Field interpolation with the truncation rule: exactly 1 outside the box."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    out = multilinear(field.grid, field.values, pts)
    out[~field.grid.contains(pts)] = 1.0
    return out


def interpolate(field, x):
    """Scalar interpolation of a value field (1 outside the box)."""
    return float(interpolate_many(field, np.asarray(x, dtype=float)[None, :])[0])


class GameSampler:
    """Total sampler realizing the play branches of one game round.

    outside the box      -> 1 (never-arrives stand-in)
    inside the target    -> psi(G at nearest boundary point), by true geometry
    otherwise            -> multilinear interpolation of the value field
    """

    def __init__(self, field, target):
        self.field = field
        self.target = target

    def many(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        out = multilinear(self.field.grid, self.field.values, pts)
        hit = self.target.contains(pts)
        if np.any(hit):
            out[hit] = self.target.g_transformed(pts[hit])
        out[~self.field.grid.contains(pts)] = 1.0
        return out

    def __call__(self, x):
        return float(self.many(np.asarray(x, dtype=float)[None, :])[0])
