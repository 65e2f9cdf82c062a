"""Surface-evolution data: mobility b, forcing c, diffusion factor, and gauge.

The normal velocity law V = -b(n) kappa + c(n) enters the level-set operator

    F(p, X) = -tr(sigma(p) sigma(p)^T X) + |p| c(p/|p|),

with sigma(p) = sqrt(b(p/|p|)) T(p/|p|) for an orthonormal tangent frame T,
so that sigma sigma^T = b (I - phat phat^T). The frame itself never affects
F or the game value, only the parametrization of the direction search.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import directions
from .directions import DirectionSpec
from .errors import (
    AsymmetricMatrix,
    DegenerateForcing,
    NegativeForcing,
    NonPositiveMobility,
    UnsupportedDimension,
    ZeroGradient,
)

ZERO_GRADIENT_TOL = 1e-14
DENSE_SAMPLE = 10_000


@dataclass(frozen=True)
class AnisotropyModel:
    """Mobility/forcing pair on the unit sphere plus derived constants.

    mobility and forcing are vectorized maps from unit directions to reals,
    already evenness-averaged. The extrema and Lipschitz estimates come from
    a dense deterministic sphere sample; the Lipschitz numbers are diagnostics
    only and never enter any computation.
    """

    dimension: int
    mobility: Callable
    forcing: Callable
    b_spec: Optional[DirectionSpec]
    c_spec: Optional[DirectionSpec]
    lipschitz_estimate_b_sqrt: float
    lipschitz_estimate_c: float
    b_min: float
    b_max: float
    c_min: float
    c_max: float
    digest: str

    @property
    def kernel_compatible(self):
        """True when both coefficients are descriptor-backed (compiled path)."""
        return self.b_spec is not None and self.c_spec is not None

    @property
    def sigma_frobenius_max(self):
        """max over directions of ||sigma||_F; equals sqrt(b_max * (n-1))."""
        return float(np.sqrt(self.b_max * (self.dimension - 1)))

    def max_step_length(self, eps):
        """Upper bound for one game displacement at step scale eps."""
        m = self.dimension - 1
        return eps * np.sqrt(2.0) * np.sqrt(m * self.b_max) + eps * eps * self.c_max


def make_model(b_spec, c_spec, n, sample_count=DENSE_SAMPLE):
    """Build a model from direction-function descriptors (or callables).

    Coefficients are evenness-averaged, validated on a dense sphere sample
    (b > 0, c >= 0), and cheap aggregate constants are cached.
    """
    if n < 2:
        raise UnsupportedDimension(f"dimension must be >= 2, got {n}")
    b_fn, b_s = directions.as_direction_function(b_spec)
    c_fn, c_s = directions.as_direction_function(c_spec)

    units = directions.unit_sphere_sample(n, sample_count)
    b_vals = np.asarray(b_fn(units), dtype=float)
    c_vals = np.asarray(c_fn(units), dtype=float)
    if not np.all(b_vals > 0.0):
        raise NonPositiveMobility(
            f"min sampled b = {b_vals.min():g} (must be > 0 on the unit sphere)"
        )
    if not np.all(c_vals >= 0.0):
        raise NegativeForcing(
            f"min sampled c = {c_vals.min():g} (must be >= 0 on the unit sphere)"
        )

    lip_sqrt_b = _lipschitz_estimate(units, np.sqrt(b_vals), n)
    lip_c = _lipschitz_estimate(units, c_vals, n)

    h = hashlib.sha256()
    h.update(np.int64(n).tobytes())
    h.update(b_vals.tobytes())
    h.update(c_vals.tobytes())

    return AnisotropyModel(
        dimension=n,
        mobility=b_fn,
        forcing=c_fn,
        b_spec=b_s,
        c_spec=c_s,
        lipschitz_estimate_b_sqrt=lip_sqrt_b,
        lipschitz_estimate_c=lip_c,
        b_min=float(b_vals.min()),
        b_max=float(b_vals.max()),
        c_min=float(c_vals.min()),
        c_max=float(c_vals.max()),
        digest=h.hexdigest(),
    )


def _lipschitz_estimate(units, vals, n):
    """Finite-difference Lipschitz estimate over near-neighbor sample pairs."""
    if n == 2:
        # consecutive angles on the circle
        dv = np.abs(np.diff(np.append(vals, vals[0])))
        arc = 2.0 * np.pi / len(vals)
        return float(dv.max() / arc)
    best = 0.0
    for shift in (1, 2, 3):
        du = units[shift:] - units[:-shift]
        dist = np.linalg.norm(du, axis=1)
        ok = dist > 1e-12
        if np.any(ok):
            best = max(best, float(np.max(np.abs(vals[shift:] - vals[:-shift])[ok] / dist[ok])))
    return best


def _unit(p):
    p = np.asarray(p, dtype=float)
    norm = np.linalg.norm(p)
    if norm < ZERO_GRADIENT_TOL:
        raise ZeroGradient(f"|p| = {norm:g} below {ZERO_GRADIENT_TOL:g}")
    return p / norm


def tangent_frame(p_hat):
    """Orthonormal basis of <p>^perp as the columns of an n x (n-1) matrix.

    n = 2 uses the 90-degree counterclockwise rotation of p_hat; n >= 3 uses
    Gram-Schmidt seeded by the coordinate axes least aligned with p_hat
    (for n = 3 the second column is the cross product, keeping the frame
    right-handed and deterministic).
    """
    p_hat = np.asarray(p_hat, dtype=float)
    n = p_hat.size
    if n == 2:
        return np.array([[-p_hat[1]], [p_hat[0]]])
    if n == 3:
        k = int(np.argmin(np.abs(p_hat)))
        e = np.zeros(3)
        e[k] = 1.0
        t1 = e - (e @ p_hat) * p_hat
        t1 /= np.linalg.norm(t1)
        t2 = np.cross(p_hat, t1)
        return np.stack([t1, t2], axis=1)
    cols = []
    order = np.argsort(np.abs(p_hat), kind="stable")
    for k in order:
        e = np.zeros(n)
        e[k] = 1.0
        v = e - (e @ p_hat) * p_hat
        for c in cols:
            v -= (v @ c) * c
        norm = np.linalg.norm(v)
        if norm > 1e-10:
            cols.append(v / norm)
        if len(cols) == n - 1:
            break
    return np.stack(cols, axis=1)


def sigma_of(model, p):
    """Diffusion factor sqrt(b(phat)) T(phat), an n x (n-1) matrix.

    0-homogeneous by construction: only phat = p/|p| enters.
    """
    p_hat = _unit(p)
    return np.sqrt(model.mobility(p_hat)) * tangent_frame(p_hat)


def forcing_of(model, p):
    """Positively 1-homogeneous forcing |p| c(p/|p|)."""
    p = np.asarray(p, dtype=float)
    norm = np.linalg.norm(p)
    if norm < ZERO_GRADIENT_TOL:
        raise ZeroGradient(f"|p| = {norm:g} below {ZERO_GRADIENT_TOL:g}")
    return norm * model.forcing(p / norm)


def F_eval(model, p, X):
    """Degenerate-elliptic operator -tr(sigma sigma^T X) + |p| c(phat)."""
    X = np.asarray(X, dtype=float)
    scale = 1.0 + np.abs(X).max()
    if np.abs(X - X.T).max() > 1e-12 * scale:
        raise AsymmetricMatrix("second-order argument is not symmetric within 1e-12")
    sig = sigma_of(model, p)
    return float(-np.trace(sig @ sig.T @ X) + forcing_of(model, p))


@dataclass(frozen=True)
class AssumptionReport:
    """Max violations of the structural assumptions over random samples."""

    samples: int
    homogeneity_sigma: float
    homogeneity_forcing: float
    evenness_b: float
    evenness_c: float
    tangency: float
    rank_defect: float
    sigma_product: float
    geometricity: float

    def max_violation(self):
        return max(
            self.homogeneity_sigma,
            self.homogeneity_forcing,
            self.evenness_b,
            self.evenness_c,
            self.tangency,
            self.rank_defect,
            self.sigma_product,
            self.geometricity,
        )

    def as_dict(self):
        return dict(self.__dict__)


def validate_assumptions(model, sample_count, seed=0):
    """Report-only check of homogeneity, evenness, tangency, rank, geometricity."""
    n = model.dimension
    rng = np.random.default_rng(seed)
    report = dict.fromkeys(
        (
            "homogeneity_sigma",
            "homogeneity_forcing",
            "evenness_b",
            "evenness_c",
            "tangency",
            "rank_defect",
            "sigma_product",
            "geometricity",
        ),
        0.0,
    )
    for _ in range(sample_count):
        p = rng.standard_normal(n)
        while np.linalg.norm(p) < 1e-3:
            p = rng.standard_normal(n)
        lam = float(rng.uniform(0.25, 4.0))
        mu = float(rng.uniform(-2.0, 2.0))
        X = rng.standard_normal((n, n))
        X = 0.5 * (X + X.T)

        sig = sigma_of(model, p)
        p_hat = p / np.linalg.norm(p)

        report["homogeneity_sigma"] = max(
            report["homogeneity_sigma"], np.abs(sigma_of(model, lam * p) - sig).max()
        )
        fp = forcing_of(model, p)
        report["homogeneity_forcing"] = max(
            report["homogeneity_forcing"],
            abs(forcing_of(model, lam * p) - lam * fp) / (1.0 + abs(lam * fp)),
        )
        report["evenness_b"] = max(
            report["evenness_b"], abs(model.mobility(-p_hat) - model.mobility(p_hat))
        )
        report["evenness_c"] = max(
            report["evenness_c"], abs(model.forcing(-p_hat) - model.forcing(p_hat))
        )
        report["tangency"] = max(report["tangency"], np.abs(sig.T @ p_hat).max())
        svals = np.linalg.svd(sig, compute_uv=False)
        report["rank_defect"] = max(report["rank_defect"], float(svals.min() <= 1e-12))
        prod = sig @ sig.T
        want = model.mobility(p_hat) * (np.eye(n) - np.outer(p_hat, p_hat))
        report["sigma_product"] = max(
            report["sigma_product"],
            np.linalg.norm(prod - want) / model.mobility(p_hat),
        )
        lhs = F_eval(model, lam * p, lam * X + mu * np.outer(p, p))
        rhs = lam * F_eval(model, p, X)
        report["geometricity"] = max(
            report["geometricity"], abs(lhs - rhs) / (1.0 + abs(rhs))
        )
    return AssumptionReport(samples=sample_count, **report)


def wulff_gauge(model, x, n_dirs):
    """Sampled gauge of the Wulff set of c: max over directions of x.n / c(n).

    Sampling is deterministic (uniform circle in 2-D, Fibonacci sphere in 3-D),
    nested under doubling of n_dirs in 2-D, and always underestimates the true
    gauge, so the value is nondecreasing along nested refinements.
    """
    if model.c_min <= 0.0:
        raise DegenerateForcing(f"min c = {model.c_min:g}; gauge needs min c > 0")
    x = np.asarray(x, dtype=float)
    units = directions.unit_sphere_sample(model.dimension, int(n_dirs))
    cvals = np.asarray(model.forcing(units), dtype=float)
    return float(np.max(units @ x / cvals))
