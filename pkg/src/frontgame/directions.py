"""Direction samplers and descriptors for coefficients defined on the unit sphere.

A descriptor is a small, serializable recipe for a function of the unit normal:
constant, 2-D trigonometric polynomial, ellipsoidal norm, or a 2-D angle table.
Descriptors evaluate vectorized over arrays of unit vectors and are the only
coefficient forms the compiled sweep kernel understands; arbitrary callables
are accepted everywhere else and routed through the pure-Python path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

TWO_PI = 2.0 * np.pi
GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))

# Numeric codes used by the compiled kernel.
KIND_CODES = {"constant": 0, "trig2d": 1, "ellipsoid": 2, "table2d": 3}


def full_circle(count):
    """`count` unit vectors at angles 2*pi*k/count, k = 0..count-1."""
    theta = TWO_PI * np.arange(count) / count
    return np.stack([np.cos(theta), np.sin(theta)], axis=1)


def half_circle(count):
    """`count` unit vectors at angles pi*k/count covering one half-circle."""
    theta = np.pi * np.arange(count) / count
    return np.stack([np.cos(theta), np.sin(theta)], axis=1)


def fibonacci_sphere(count):
    """Quasi-uniform deterministic sample of the full unit sphere in 3-D."""
    k = np.arange(count)
    z = 1.0 - (2.0 * k + 1.0) / count
    rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = GOLDEN_ANGLE * k
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)


def fibonacci_hemisphere(count):
    """Quasi-uniform sample of the upper half-sphere (z > 0) in 3-D."""
    k = np.arange(count)
    z = (k + 0.5) / count
    rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = GOLDEN_ANGLE * k
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)


def unit_sphere_sample(n, count, seed=0):
    """Deterministic dense sample of the unit sphere in dimension n."""
    if n == 2:
        return full_circle(count)
    if n == 3:
        return fibonacci_sphere(count)
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((count, n))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


@dataclass(frozen=True)
class DirectionSpec:
    """Serializable function of the unit direction.

    kind 'constant'  : params = [value]
    kind 'trig2d'    : cos_coeffs = [a0, a1, ...], sin_coeffs = [b1, ...];
                       f(theta) = a0 + sum a_k cos(k theta) + b_k sin(k theta)
    kind 'ellipsoid' : semiaxes  = [a_1 .. a_n]; f(n) = |diag(a) n|
    kind 'table2d'   : values at uniform angles 2*pi*j/M, linear in angle

    Evaluation is evenness-averaged, f~(n) = (f(n) + f(-n))/2, so that
    f~(-n) == f~(n) holds bit-exactly for every kind.
    """

    kind: str
    params: np.ndarray = field(default_factory=lambda: np.zeros(0))
    sin_params: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        object.__setattr__(self, "params", np.asarray(self.params, dtype=float))
        object.__setattr__(self, "sin_params", np.asarray(self.sin_params, dtype=float))
        if self.kind not in KIND_CODES:
            raise ConfigError(f"unknown direction-function kind {self.kind!r}")

    # -- raw (un-symmetrized) evaluation ------------------------------------
    def _raw(self, units):
        if self.kind == "constant":
            return np.full(units.shape[0], self.params[0])
        if self.kind == "ellipsoid":
            return np.sqrt(np.sum((units * self.params) ** 2, axis=1))
        theta = np.arctan2(units[:, 1], units[:, 0])
        if self.kind == "trig2d":
            out = np.full(theta.shape, self.params[0])
            for k in range(1, self.params.size):
                out += self.params[k] * np.cos(k * theta)
            for k in range(self.sin_params.size):
                out += self.sin_params[k] * np.sin((k + 1) * theta)
            return out
        # table2d: periodic linear interpolation of M uniform samples
        vals = self.params
        m = vals.size
        pos = np.mod(theta, TWO_PI) / TWO_PI * m
        j0 = np.floor(pos).astype(np.intp) % m
        t = pos - np.floor(pos)
        j1 = (j0 + 1) % m
        a = vals[j0]
        return a + t * (vals[j1] - a)

    def __call__(self, units):
        """Evenness-averaged evaluation on an (N, n) or (n,) array of units."""
        u = np.atleast_2d(np.asarray(units, dtype=float))
        out = 0.5 * (self._raw(u) + self._raw(-u))
        return out if np.asarray(units).ndim > 1 else float(out[0])

    # -- serialization -------------------------------------------------------
    def kernel_pack(self):
        """(kind_code, flat parameter vector) consumed by the compiled kernel."""
        code = KIND_CODES[self.kind]
        if self.kind == "trig2d":
            flat = np.concatenate(
                [[self.params.size, self.sin_params.size], self.params, self.sin_params]
            )
        elif self.kind == "table2d":
            flat = np.concatenate([[self.params.size], self.params])
        else:
            flat = self.params
        return code, np.ascontiguousarray(flat, dtype=float)

    def config_items(self, prefix):
        """key/value pairs for the flat config-file format."""
        items = [(f"{prefix}.kind", self.kind)]
        if self.kind == "constant":
            items.append((f"{prefix}.value", _fmt(self.params)))
        elif self.kind == "trig2d":
            items.append((f"{prefix}.cos", _fmt(self.params)))
            if self.sin_params.size:
                items.append((f"{prefix}.sin", _fmt(self.sin_params)))
        elif self.kind == "ellipsoid":
            items.append((f"{prefix}.semiaxes", _fmt(self.params)))
        else:
            items.append((f"{prefix}.values", _fmt(self.params)))
        return items


def _fmt(arr):
    return " ".join(repr(float(v)) for v in np.atleast_1d(arr))


def constant(value):
    return DirectionSpec("constant", [float(value)])


def trig2d(cos_coeffs, sin_coeffs=()):
    return DirectionSpec("trig2d", cos_coeffs, sin_coeffs)


def ellipsoid(semiaxes):
    return DirectionSpec("ellipsoid", semiaxes)


def table2d(values):
    return DirectionSpec("table2d", values)


def spec_from_config(prefix, entries):
    """Rebuild a DirectionSpec from flat config entries."""
    kind = entries.get(f"{prefix}.kind")
    if kind is None:
        raise ConfigError(f"missing {prefix}.kind")
    try:
        if kind == "constant":
            return constant(float(entries[f"{prefix}.value"]))
        if kind == "trig2d":
            cos = [float(v) for v in entries[f"{prefix}.cos"].split()]
            sin = [float(v) for v in entries.get(f"{prefix}.sin", "").split()]
            return trig2d(cos, sin)
        if kind == "ellipsoid":
            return ellipsoid([float(v) for v in entries[f"{prefix}.semiaxes"].split()])
        if kind == "table2d":
            return table2d([float(v) for v in entries[f"{prefix}.values"].split()])
    except KeyError as exc:
        raise ConfigError(f"missing parameter for {prefix}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"bad numeric value for {prefix}: {exc}") from exc
    raise ConfigError(f"unknown direction-function kind {kind!r} for {prefix}")


def as_direction_function(spec):
    """Accept a DirectionSpec or a plain callable; always evenness-average.

    Returns (vectorized function, spec-or-None). The spec is None for custom
    callables, which disqualifies the compiled kernel but nothing else.
    """
    if isinstance(spec, DirectionSpec):
        return spec, spec

    def averaged(units):
        u = np.atleast_2d(np.asarray(units, dtype=float))
        vals = 0.5 * (_apply(spec, u) + _apply(spec, -u))
        return vals if np.asarray(units).ndim > 1 else float(vals[0])

    return averaged, None


def _apply(fn, units):
    out = fn(units)
    out = np.asarray(out, dtype=float)
    if out.shape != (units.shape[0],):
        # permit scalar-only callables
        out = np.array([float(fn(u)) for u in units])
    return out
