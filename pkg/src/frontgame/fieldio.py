"""Field, trajectory, and report serialization.

Field exports:
  CSV    header x0,...,x{n-1},u,U; one node per row in C order; the +inf
         arrival sentinel is written as `inf`.
  binary raw little-endian float64 node values in C order, followed by the
         target mask as bytes 0/1, with a JSON sidecar
         {dims, origin, spacing, epsilon, model_digest, mask_offset}.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .grid import GridSpec, ValueField
from .solver import arrival_field


def _fmt(v):
    if np.isposinf(v):
        return "inf"
    return repr(float(v))


def field_csv_bytes(field, eta=1e-9):
    """Deterministic CSV encoding of a value field and its arrival times."""
    n = field.grid.dimension
    arr = arrival_field(field, eta)
    header = ",".join([f"x{a}" for a in range(n)] + ["u", "U"])
    rows = [header]
    pts = field.grid.points()
    flat_u = field.values.ravel()
    flat_big_u = arr.U.ravel()
    for row in range(pts.shape[0]):
        cells = [_fmt(c) for c in pts[row]]
        cells.append(_fmt(flat_u[row]))
        cells.append(_fmt(flat_big_u[row]))
        rows.append(",".join(cells))
    return ("\n".join(rows) + "\n").encode()


def write_field_csv(path, field, eta=1e-9):
    Path(path).write_bytes(field_csv_bytes(field, eta))


def write_field_binary(bin_path, sidecar_path, field, model_digest):
    values = np.ascontiguousarray(field.values, dtype="<f8")
    mask = np.ascontiguousarray(field.target_mask, dtype=np.uint8)
    payload = values.tobytes() + mask.tobytes()
    Path(bin_path).write_bytes(payload)
    sidecar = {
        "dims": list(field.grid.counts),
        "origin": [float(v) for v in field.grid.origin],
        "spacing": float(field.grid.spacing),
        "epsilon": float(field.epsilon),
        "model_digest": model_digest,
        "mask_offset": int(values.nbytes),
    }
    Path(sidecar_path).write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")


def read_field_binary(bin_path, sidecar_path):
    """Returns (ValueField, model_digest)."""
    try:
        sidecar = json.loads(Path(sidecar_path).read_text())
        dims = tuple(int(d) for d in sidecar["dims"])
        grid = GridSpec(np.array(sidecar["origin"]), float(sidecar["spacing"]), dims)
        raw = Path(bin_path).read_bytes()
        offset = int(sidecar["mask_offset"])
        count = int(np.prod(dims))
        values = np.frombuffer(raw[:offset], dtype="<f8", count=count).reshape(dims).copy()
        mask = np.frombuffer(raw[offset : offset + count], dtype=np.uint8).reshape(dims) != 0
    except (KeyError, ValueError, OSError) as exc:
        raise ConfigError(f"unreadable field files: {exc}") from exc
    return ValueField(grid, values, mask.copy(), float(sidecar["epsilon"])), sidecar["model_digest"]


def write_trajectory_csv(path, traj):
    """One row per step: step,x0,...,v1...,signs (row 0 is the start point)."""
    n = traj.points[0].size
    head = ["step"] + [f"x{a}" for a in range(n)]
    head += [f"v1_{a}" for a in range(n)] + [f"v2_{a}" for a in range(n)]
    head += [f"sign_{i}" for i in range(n - 1)]
    rows = [",".join(head)]
    blank = [""] * (2 * n + (n - 1))
    first = [_fmt(c) for c in traj.points[0]]
    rows.append(",".join(["0"] + first + blank))
    for j, (cand, sign) in enumerate(traj.strategies, start=1):
        cells = [str(j)] + [_fmt(c) for c in traj.points[j]]
        cells += [_fmt(c) for c in cand.v1] + [_fmt(c) for c in cand.v2]
        cells += [_fmt(s) for s in sign.signs]
        rows.append(",".join(cells))
    Path(path).write_text("\n".join(rows) + "\n")


def _jsonify(obj):
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def write_json(path, payload):
    Path(path).write_text(
        json.dumps(payload, indent=2, sort_keys=True, default=_jsonify) + "\n"
    )
