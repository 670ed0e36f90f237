"""Bit-stable result export: long-format CSV plus a JSON sidecar.

The CSV holds one row per (t, r) pair in time-outer order with columns
t, r, u, U (= u^eta) and the elliptic scalar curvature, all printed with
17 significant digits so equal runs produce byte-identical files.  The
sidecar carries the run configuration, the data bounds, and whatever
diagnostics the run produced, under a versioned schema.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .geometry import Background, RadialMesh
from .initial_data import DataBounds
from .operators import scalar_curvature
from .solver import FlowTrajectory

SCHEMA_VERSION = 1
CSV_HEADER = "t,r,u,U,R_elliptic"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def export_trajectory(
    traj: FlowTrajectory,
    path: str | Path,
    *,
    config: dict | None = None,
    bounds: DataBounds | None = None,
    diagnostics: dict | None = None,
) -> tuple[Path, Path]:
    """Write `<path>` as CSV and `<path stem>.json` as the sidecar.

    Returns the two paths written.  Identical inputs produce byte-equal
    outputs; an empty trajectory yields a header-only CSV.
    """
    csv_path = Path(path)
    json_path = csv_path.with_suffix(".json")
    eta = (traj.mesh.m - 2) / 4.0

    lines = [CSV_HEADER]
    for k in range(traj.n_states):
        t = float(traj.times[k])
        u = traj.fields[k]
        curv = scalar_curvature(u, traj.mesh)
        big_u = u**eta
        for r, uu, bu, rr in zip(traj.mesh.nodes, u, big_u, curv):
            lines.append(",".join((_fmt(t), _fmt(r), _fmt(uu), _fmt(bu), _fmt(rr))))
    try:
        csv_path.write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise ConfigurationError(f"cannot write CSV to {csv_path}: {exc}") from exc

    sidecar = {
        "schema_version": SCHEMA_VERSION,
        "mesh": {
            "background": traj.mesh.background.value,
            "m": traj.mesh.m,
            "r_min": traj.mesh.r_min,
            "r_max": traj.mesh.r_max,
            "n": traj.mesh.n,
        },
        "n_states": traj.n_states,
        "config": config or {},
        "data_bounds": None
        if bounds is None
        else {
            "C0": bounds.C0,
            "K0": bounds.K0,
            "kappa": bounds.kappa,
            "eps_floor": bounds.eps_floor,
        },
        "diagnostics": diagnostics,
    }
    try:
        json_path.write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise ConfigurationError(f"cannot write JSON to {json_path}: {exc}") from exc
    return csv_path, json_path


def import_trajectory(path: str | Path) -> FlowTrajectory:
    """Rebuild a trajectory from an exported CSV plus its sidecar."""
    csv_path = Path(path)
    json_path = csv_path.with_suffix(".json")
    sidecar = json.loads(json_path.read_text())
    mesh_info = sidecar["mesh"]
    mesh = RadialMesh(
        Background(mesh_info["background"]),
        mesh_info["m"],
        mesh_info["r_min"],
        mesh_info["r_max"],
        mesh_info["n"],
    )
    raw = csv_path.read_text().strip().splitlines()
    if raw[0] != CSV_HEADER:
        raise ConfigurationError(f"unexpected CSV header {raw[0]!r}")
    body = raw[1:]
    n = mesh.n
    if len(body) % n:
        raise ConfigurationError("CSV row count is not a multiple of the mesh size")
    n_states = len(body) // n
    times = np.empty(n_states)
    fields = np.empty((n_states, n))
    for k in range(n_states):
        rows = [line.split(",") for line in body[k * n : (k + 1) * n]]
        times[k] = float(rows[0][0])
        fields[k] = [float(r[2]) for r in rows]
    return FlowTrajectory(mesh=mesh, times=times, fields=fields)
