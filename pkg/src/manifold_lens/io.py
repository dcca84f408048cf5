"""CSV and JSON serialization for point clouds, per-point tables and reports."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .geometry import PointCloud

CLOUD_SCHEMA = "manifold-lens/cloud/1"
POINTS_SCHEMA = "manifold-lens/points/1"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, fixed indentation, non-finite floats as strings."""
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def cloud_header(D: int, d: int) -> list[str]:
    cols = ["idx"]
    cols += [f"noisy_{j}" for j in range(D)]
    cols += [f"clean_{j}" for j in range(D)]
    cols += [f"foot_{j}" for j in range(D)]
    cols += [f"tangent_{k}_{j}" for k in range(d) for j in range(D)]
    return cols


def write_cloud(cloud: PointCloud, path) -> tuple[Path, Path]:
    """Write ``path`` (CSV) and ``path`` with suffix ``.json`` (metadata sidecar)."""
    path = Path(path)
    m, D, d = cloud.m, cloud.D, cloud.d
    # tangent columns are flattened column by column
    tangent_cols = np.transpose(cloud.tangents, (0, 2, 1)).reshape(m, d * D)
    table = np.hstack([np.arange(m)[:, None], cloud.points, cloud.clean, cloud.foot, tangent_cols])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(cloud_header(D, d))
        for row in table:
            writer.writerow([str(int(row[0]))] + [repr(float(v)) for v in row[1:]])
    sidecar = path.with_suffix(".json")
    sidecar.write_text(dumps({"schema": CLOUD_SCHEMA, "seed": cloud.seed, "D": D, "d": d,
                              "metadata": cloud.metadata}))
    return path, sidecar


def read_cloud(path) -> PointCloud:
    """Read a cloud CSV.  A plain CSV of coordinates is accepted as points only."""
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float)
    sidecar = path.with_suffix(".json")
    meta = json.loads(sidecar.read_text()) if sidecar.exists() else {}
    if header and header[0] == "idx":
        D = sum(h.startswith("noisy_") for h in header)
        d = sum(h.startswith("tangent_") for h in header) // D
        m = body.shape[0]
        points = body[:, 1:1 + D]
        clean = body[:, 1 + D:1 + 2 * D]
        foot = body[:, 1 + 2 * D:1 + 3 * D]
        tangents = body[:, 1 + 3 * D:].reshape(m, d, D).transpose(0, 2, 1)
        metadata = meta.get("metadata", {})
        return PointCloud(points, clean, foot, tangents, int(meta.get("seed", 0)), metadata)
    try:
        [float(h) for h in header]
        body = np.vstack([np.array(header, dtype=float), body])
    except ValueError:
        pass
    return PointCloud.from_points(body)


def points_header(D: int) -> list[str]:
    return ["i", "neighbor_count", "d_hat", "angle"] + [f"lambda_{j}" for j in range(D)] + ["warn_tie"]


def write_point_table(estimates, D: int, path):
    """Per-point estimator results; missing values are left empty."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(points_header(D))
        for e in estimates:
            lam = [repr(float(v)) for v in e.eigvals] if e.eigvals is not None else [""] * D
            writer.writerow([e.index, e.neighbor_count,
                             "" if e.d_hat is None else e.d_hat,
                             "" if e.angle is None else repr(float(e.angle)),
                             *lam, int(bool(e.warn_tie))])


def read_measure(path):
    """Read a discrete measure from CSV rows ``x_0..x_{D-1}[,weight]``.

    A header row is optional; a final column named ``weight`` holds weights,
    otherwise atoms are equally weighted.
    """
    from .measures import DiscreteMeasure

    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    header = None
    try:
        [float(v) for v in rows[0]]
    except ValueError:
        header, rows = rows[0], rows[1:]
    data = np.array([[float(v) for v in r] for r in rows], dtype=float)
    if header is not None and header[-1].strip().lower() == "weight":
        return DiscreteMeasure(data[:, :-1], data[:, -1])
    return DiscreteMeasure.empirical(data)
