"""Single-point machinery of the two-person game.

Player I picks directions (v1, v2) and an orthonormal basis w of R^(n-1);
Player II answers with a sign vector in {+-1}^(n-1). The marker then moves by

    delta = eps*sqrt(2) * sum_i b_i sigma(v1) w_i + eps^2 c(v1) v2,

and one round of play discounts the continuation value by exp(-eps^2). The
value transform psi(r) = 1 - exp(-r) maps arrival times (possibly +inf) into
(-inf, 1] and back.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import anisotropy, directions
from .errors import OutOfRange, TooManySigns

SQRT2 = math.sqrt(2.0)
MAX_SIGN_BITS = 12


def psi(r):
    """1 - exp(-r), extended by psi(+inf) = 1. Strictly increasing."""
    return -math.expm1(-r)


def psi_inv(u):
    """Inverse transform; psi_inv(1) = +inf. Raises OutOfRange for u > 1."""
    if u > 1.0:
        raise OutOfRange(f"transformed value {u!r} exceeds 1")
    if u == 1.0:
        return math.inf
    return -math.log1p(-u)


def psi_array(r):
    return -np.expm1(-np.asarray(r, dtype=float))


def psi_inv_array(u):
    u = np.asarray(u, dtype=float)
    if np.any(u > 1.0):
        raise OutOfRange("transformed value exceeds 1")
    out = np.full(u.shape, np.inf)
    finite = u < 1.0
    out[finite] = -np.log1p(-u[finite])
    return out


@dataclass(frozen=True)
class StrategyI:
    """Player I's move: unit vectors v1, v2 and an orthonormal basis w."""

    v1: np.ndarray
    v2: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "v1", np.asarray(self.v1, dtype=float))
        object.__setattr__(self, "v2", np.asarray(self.v2, dtype=float))
        object.__setattr__(self, "w", np.asarray(self.w, dtype=float))
        for v in (self.v1, self.v2):
            if abs(np.linalg.norm(v) - 1.0) > 1e-12:
                raise ValueError("strategy directions must be unit vectors (1e-12)")
        m = self.w.shape[0]
        if self.w.shape != (m, m) or np.abs(self.w.T @ self.w - np.eye(m)).max() > 1e-10:
            raise ValueError("strategy basis must be orthogonal (1e-10)")


@dataclass(frozen=True)
class StrategyII:
    """Player II's move: a sign vector in {+1, -1}^(n-1)."""

    signs: np.ndarray

    def __post_init__(self):
        signs = np.asarray(self.signs, dtype=float)
        if not np.all(np.abs(signs) == 1.0):
            raise ValueError("sign entries must be exactly +-1")
        object.__setattr__(self, "signs", signs)


def sign_set(m):
    """All 2^m sign vectors, deterministic lexicographic order (+1 first)."""
    if m > MAX_SIGN_BITS:
        raise TooManySigns(f"m = {m} exceeds {MAX_SIGN_BITS}")
    if m < 1:
        raise ValueError("m must be >= 1")
    return [StrategyII(np.array(bits, dtype=float)) for bits in itertools.product((1.0, -1.0), repeat=m)]


def sign_matrix(m):
    """Same enumeration as sign_set, stacked into a (2^m, m) array."""
    return np.array([s.signs for s in sign_set(m)])


def step_delta(model, eps, strategy_i, strategy_ii):
    """Marker displacement for one round of play."""
    sig = anisotropy.sigma_of(model, strategy_i.v1)
    drift = anisotropy.forcing_of(model, strategy_i.v1) * strategy_i.v2
    return eps * SQRT2 * (sig @ (strategy_i.w @ strategy_ii.signs)) + eps * eps * drift


def _bases(n, n_basis):
    """Sampled orthonormal bases of R^(n-1): rotations by k*pi/n_basis in 3-D."""
    if n == 2:
        return [np.array([[1.0]])]
    if n == 3:
        out = []
        for k in range(max(1, n_basis)):
            a = k * np.pi / n_basis
            out.append(np.array([[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]]))
        return out
    return [np.eye(n - 1)]


def strategy_candidates(model, grad_hint, n_dir, n_basis=1):
    """Player I candidate list: uniform half-sphere directions plus a seed.

    Uniform candidates pair each sampled v1 with v2 = -v1 (evenness makes
    antipodal v1 redundant for sigma and c, and the two v2 seeds jointly cover
    both drift orientations). When grad_hint is present the analytically
    optimal candidate v1 = ghat, v2 = -ghat is appended with the identity
    basis. Output order is deterministic for fixed inputs.
    """
    n = model.dimension
    if n == 2:
        v1s = directions.half_circle(n_dir)
    elif n == 3:
        v1s = directions.fibonacci_hemisphere(n_dir)
    else:
        full = directions.unit_sphere_sample(n, 2 * n_dir)
        v1s = full[full[:, -1] > 0.0][:n_dir]
    bases = _bases(n, n_basis)
    out = [StrategyI(v1, -v1, w) for v1 in v1s for w in bases]
    if grad_hint is not None:
        g = np.asarray(grad_hint, dtype=float)
        norm = np.linalg.norm(g)
        if norm > 0.0:
            ghat = g / norm
            out.append(StrategyI(ghat, -ghat, np.eye(n - 1)))
    return out


def inner_minmax(model, eps, x, sampler, candidates):
    """One discounted round: min over candidates, max over all sign vectors.

    Returns 1 - exp(-eps^2) + exp(-eps^2) * (min max sampler(x + delta));
    ties are broken by candidate order.
    """
    x = np.asarray(x, dtype=float)
    signs = sign_set(model.dimension - 1)
    best = math.inf
    for cand in candidates:
        worst = -math.inf
        for s in signs:
            val = sampler(x + step_delta(model, eps, cand, s))
            if val > worst:
                worst = val
        if worst < best:
            best = worst
    discount = math.exp(-eps * eps)
    return -math.expm1(-eps * eps) + discount * best
