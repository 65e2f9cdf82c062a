"""Flat key=value configuration files.

One `key = value` per line, `#` starts a comment, keys are dotted paths.
Vector values are space separated; the list of ball centers uses `;` between
points. See README for the full key reference. The run digest is the sha256
of the raw file bytes, so identical files always map to identical digests.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np

from . import directions
from .anisotropy import make_model
from .errors import ConfigError
from .grid import GridSpec, TargetSet
from .solver import ProblemConfig


def parse_entries(text):
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        entries[key] = value.strip()
    return entries


def _floats(text):
    return np.array([float(v) for v in text.split()])


def _require(entries, key):
    if key not in entries:
        raise ConfigError(f"missing required key {key!r}")
    return entries[key]


def build_target(entries):
    shape = _require(entries, "target.shape")
    g_value = float(entries.get("target.G", "0.0"))
    try:
        if shape == "ball":
            return TargetSet(
                "ball",
                center=_floats(_require(entries, "target.center")),
                radius=float(_require(entries, "target.radius")),
                boundary_value=g_value,
            )
        if shape == "box":
            return TargetSet(
                "box",
                lo=_floats(_require(entries, "target.lo")),
                hi=_floats(_require(entries, "target.hi")),
                boundary_value=g_value,
            )
        if shape == "balls":
            centers = [
                _floats(part) for part in _require(entries, "target.centers").split(";")
            ]
            return TargetSet(
                "balls",
                centers=np.stack(centers),
                radii=_floats(_require(entries, "target.radii")),
                boundary_value=g_value,
            )
    except ValueError as exc:
        raise ConfigError(f"bad target value: {exc}") from exc
    raise ConfigError(f"unsupported target.shape {shape!r} (ball | box | balls)")


def build_config(entries):
    try:
        n = int(_require(entries, "model.n"))
        b_spec = directions.spec_from_config("model.b", entries)
        c_spec = directions.spec_from_config("model.c", entries)
        model = make_model(b_spec, c_spec, n)
        target = build_target(entries)
        grid = GridSpec(
            _floats(_require(entries, "grid.origin")),
            float(_require(entries, "grid.h")),
            tuple(int(v) for v in _require(entries, "grid.counts").split()),
        )
        return ProblemConfig(
            model=model,
            target=target,
            grid=grid,
            epsilon=float(_require(entries, "game.epsilon")),
            n_dir=int(entries.get("game.n_dir", "16")),
            n_basis=int(entries.get("game.n_basis", "1")),
            tolerance=float(entries.get("solve.tolerance", "1e-6")),
            max_iterations=int(entries.get("solve.max_iterations", "200000")),
            sweep_mode=entries.get("solve.sweep_mode", "jacobi"),
            seed=int(entries.get("seed", "0")),
        )
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad configuration value: {exc}") from exc


def load(path):
    """(ProblemConfig, digest) from a config file."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    entries = parse_entries(raw.decode())
    return build_config(entries), hashlib.sha256(raw).hexdigest()


def dump(config_obj, extra=()):
    """Render a ProblemConfig back to the flat file format (ball/box/balls only)."""
    model = config_obj.model
    if model.b_spec is None or model.c_spec is None:
        raise ConfigError("only descriptor-backed models serialize to config files")
    items = [("model.n", str(model.dimension))]
    items += model.b_spec.config_items("model.b")
    items += model.c_spec.config_items("model.c")
    target = config_obj.target
    items.append(("target.shape", target.kind))
    if target.kind == "ball":
        items.append(("target.center", " ".join(repr(float(v)) for v in target.center)))
        items.append(("target.radius", repr(float(target.radius))))
    elif target.kind == "box":
        items.append(("target.lo", " ".join(repr(float(v)) for v in target.lo)))
        items.append(("target.hi", " ".join(repr(float(v)) for v in target.hi)))
    elif target.kind == "balls":
        items.append(
            ("target.centers", " ; ".join(" ".join(repr(float(v)) for v in c) for c in target.centers))
        )
        items.append(("target.radii", " ".join(repr(float(r)) for r in target.radii)))
    else:
        raise ConfigError("level-table targets do not serialize to config files")
    if callable(target.boundary_value):
        raise ConfigError("callable boundary data does not serialize to config files")
    items.append(("target.G", repr(float(target.boundary_value))))
    items += [
        ("grid.origin", " ".join(repr(float(v)) for v in config_obj.grid.origin)),
        ("grid.h", repr(float(config_obj.grid.spacing))),
        ("grid.counts", " ".join(str(c) for c in config_obj.grid.counts)),
        ("game.epsilon", repr(float(config_obj.epsilon))),
        ("game.n_dir", str(config_obj.n_dir)),
        ("game.n_basis", str(config_obj.n_basis)),
        ("solve.tolerance", repr(float(config_obj.tolerance))),
        ("solve.max_iterations", str(config_obj.max_iterations)),
        ("solve.sweep_mode", config_obj.sweep_mode),
        ("seed", str(config_obj.seed)),
    ]
    items += list(extra)
    return "".join(f"{k} = {v}\n" for k, v in items)
