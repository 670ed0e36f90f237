"""Command-line driver.

Subcommands
-----------
run             solve one preset and export the trajectory
barriers        run + full barrier/curvature report
compare         solve two presets on one mesh and report ordering
exhaust         ladder of nested-ball solves with convergence report
incompleteness  radial length scan over growing domains

Runs are configured by flags, optionally seeded from a flat key=value
config file (flags override the file).  Everything is deterministic:
equal configurations produce byte-identical outputs.  The exit code is
0 iff every check the command performed passed.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, YamabeFlowError
from .geometry import Background, RadialMesh
from .initial_data import (
    InitialPreset,
    PowerLaw,
    PuncturedSphere,
    data_bounds,
    initial_scalar_curvature,
    make_initial,
    preset_from_spec,
)
from .boundary_data import check_profile_bounds, frozen_boundary, profile_from_data
from .solver import SolveConfig, solve
from .diagnostics import (
    DiagnosticsReport,
    check_barriers,
    compare_flows,
    completeness_scan,
)
from .exhaustion import ExhaustionPlan, run_exhaustion
from .export import export_trajectory

DEFAULTS = {
    "dimension": 3,
    "ell": 6.0,
    "r_min": 0.0,
    "nodes": 400,
    "dt": 1e-3,
    "t_final": 0.5,
    "theta": 1.0,
    "gradient": "implicit-linearized",
}

_CONFIG_KEYS = {
    "dimension": int,
    "preset": str,
    "preset_b": str,
    "ell": float,
    "r_min": float,
    "nodes": int,
    "dt": float,
    "t_final": float,
    "theta": float,
    "gradient": str,
    "ladder": str,
    "b_flat": float,
    "output": str,
    "sizes": str,
}


@dataclass
class RunConfig:
    """Validated configuration of one CLI invocation."""

    command: str
    dimension: int
    preset: InitialPreset
    ell: float
    r_min: float
    nodes: int
    dt: float
    t_final: float
    theta: float
    gradient: str
    preset_b: InitialPreset | None = None
    ladder: tuple[float, ...] = ()
    sizes: tuple[float, ...] = ()
    b_flat: float | None = None
    output: str | None = None

    def __post_init__(self):
        if self.dimension < 3:
            raise ConfigurationError(
                "dimension must be >= 3 (the flow is considered on m >= 3 only)"
            )
        if self.nodes < 16:
            raise ConfigurationError("need at least 16 nodes")
        if self.dt <= 0.0:
            raise ConfigurationError("dt must be positive")


def _read_config_file(path: str) -> dict:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().lower().replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise ConfigurationError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _CONFIG_KEYS[key](value.strip())
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="yamabeflow",
        description="Rotationally symmetric conformal curvature flow on a radial mesh",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, with_mesh: bool = True):
        p.add_argument("--config", help="flat key=value config file (flags override)")
        p.add_argument("--dimension", type=int, help="spatial dimension m >= 3")
        p.add_argument("--preset", help="initial data, e.g. constant:1.0 or bump:1,1,2,0.5")
        if with_mesh:
            p.add_argument("--ell", type=float, help="outer radius of the domain")
            p.add_argument("--r-min", type=float, dest="r_min", help="inner radius")
            p.add_argument("--nodes", type=int, help="number of mesh nodes")
        p.add_argument("--dt", type=float, help="time step")
        p.add_argument("--t-final", type=float, dest="t_final", help="horizon")
        p.add_argument("--theta", type=float, help="implicitness weight in [0.5, 1]")
        p.add_argument(
            "--gradient",
            choices=("implicit-linearized", "explicit"),
            help="treatment of the quadratic gradient term",
        )
        p.add_argument("--output", help="output CSV path (JSON sidecar alongside)")

    p_run = sub.add_parser("run", help="solve one preset")
    add_common(p_run)

    p_bar = sub.add_parser("barriers", help="solve and check every barrier")
    add_common(p_bar)
    p_bar.add_argument("--b-flat", type=float, dest="b_flat", help="flat upper-barrier scale")

    p_cmp = sub.add_parser("compare", help="ordering of two flows on one mesh")
    add_common(p_cmp)
    p_cmp.add_argument("--preset-b", dest="preset_b", help="second (lower) preset")

    p_exh = sub.add_parser("exhaust", help="nested-ball convergence run")
    add_common(p_exh, with_mesh=False)
    p_exh.add_argument("--ladder", help="comma-separated ball radii, e.g. 3,4,5,6")
    p_exh.add_argument("--nodes-per-unit", type=int, default=64, dest="nodes_per_unit")

    p_inc = sub.add_parser("incompleteness", help="radial length scan over domain sizes")
    add_common(p_inc)
    p_inc.add_argument("--sizes", help="comma-separated domain sizes, e.g. 50,100")
    return parser


def parse_config(argv: list[str]) -> RunConfig:
    """Parse flags (plus optional config file) into a validated RunConfig."""
    args = _build_parser().parse_args(argv)
    file_values = _read_config_file(args.config) if getattr(args, "config", None) else {}

    def pick(key, fallback=None):
        flag = getattr(args, key, None)
        if flag is not None:
            return flag
        if key in file_values:
            return file_values[key]
        return DEFAULTS.get(key, fallback)

    preset_spec = pick("preset")
    if preset_spec is None:
        raise ConfigurationError("a --preset is required (e.g. constant:1.0)")
    preset = preset_from_spec(preset_spec)
    preset_b_spec = pick("preset_b")
    ladder_spec = pick("ladder") or ""
    sizes_spec = pick("sizes") or ""
    return RunConfig(
        command=args.command,
        dimension=int(pick("dimension")),
        preset=preset,
        ell=float(pick("ell")),
        r_min=float(pick("r_min")),
        nodes=int(pick("nodes")),
        dt=float(pick("dt")),
        t_final=float(pick("t_final")),
        theta=float(pick("theta")),
        gradient=str(pick("gradient")),
        preset_b=preset_from_spec(preset_b_spec) if preset_b_spec else None,
        ladder=tuple(float(x) for x in str(ladder_spec).split(",") if x.strip()),
        sizes=tuple(float(x) for x in str(sizes_spec).split(",") if x.strip()),
        b_flat=pick("b_flat"),
        output=pick("output"),
    )


def _mesh_for(cfg: RunConfig) -> RadialMesh:
    euclidean = isinstance(cfg.preset, (PowerLaw, PuncturedSphere))
    background = Background.EUCLIDEAN if euclidean else Background.HYPERBOLIC
    return RadialMesh(background, cfg.dimension, cfg.r_min, cfg.ell, cfg.nodes)


def _solve_preset(cfg: RunConfig, preset: InitialPreset):
    """Shared setup: mesh, data, boundary curve, solve."""
    mesh = _mesh_for(cfg)
    u0 = make_initial(preset, mesh)
    curv = initial_scalar_curvature(u0)
    bounds = data_bounds(u0, curv)
    if mesh.background is Background.EUCLIDEAN:
        boundary = frozen_boundary(float(u0.values[-1]))
        profile_report = None
    else:
        profile = profile_from_data(u0, curv, bounds)
        t_grid = np.linspace(0.0, cfg.t_final, 1001)
        profile_report = check_profile_bounds(profile, bounds.K0, bounds.eps_floor, t_grid)
        boundary = profile
    config = SolveConfig(
        dt=cfg.dt, t_final=cfg.t_final, gradient_treatment=cfg.gradient, theta=cfg.theta
    )
    traj = solve(u0, boundary, config)
    return traj, u0, bounds, profile_report


def _config_dict(cfg: RunConfig) -> dict:
    return {
        "command": cfg.command,
        "dimension": cfg.dimension,
        "preset": repr(cfg.preset),
        "preset_b": repr(cfg.preset_b) if cfg.preset_b else None,
        "ell": cfg.ell,
        "r_min": cfg.r_min,
        "nodes": cfg.nodes,
        "dt": cfg.dt,
        "t_final": cfg.t_final,
        "theta": cfg.theta,
        "gradient": cfg.gradient,
        "ladder": list(cfg.ladder),
        "sizes": list(cfg.sizes),
        "b_flat": cfg.b_flat,
    }


def _emit(cfg: RunConfig, traj, bounds, diagnostics: dict | None):
    if cfg.output:
        csv_path, json_path = export_trajectory(
            traj, cfg.output, config=_config_dict(cfg), bounds=bounds, diagnostics=diagnostics
        )
        print(f"wrote {csv_path} and {json_path}")


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
        return _dispatch(cfg)
    except YamabeFlowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _dispatch(cfg: RunConfig) -> int:
    if cfg.command == "run":
        traj, u0, bounds, profile_report = _solve_preset(cfg, cfg.preset)
        ok = traj.min_u() > 0.0 and (profile_report is None or profile_report.passed)
        print(
            f"run: {traj.n_states} states to t={traj.times[-1]:g}, "
            f"min u = {traj.min_u():.6g}"
        )
        _emit(cfg, traj, bounds, {"passed": ok})
        return 0 if ok else 1

    if cfg.command == "barriers":
        traj, u0, bounds, profile_report = _solve_preset(cfg, cfg.preset)
        report = check_barriers(traj, bounds, b_flat=cfg.b_flat)
        for check in report.checks.values():
            print(
                f"{check.name}: worst slack {check.worst_slack:.3e} at "
                f"r={check.worst_radius:.4g}, t={check.worst_time:.4g} "
                f"[{'pass' if check.passed else 'FAIL'}]"
            )
        diag = DiagnosticsReport(barriers=report)
        _emit(cfg, traj, bounds, diag.to_dict())
        return 0 if report.passed else 1

    if cfg.command == "compare":
        if cfg.preset_b is None:
            raise ConfigurationError("compare needs --preset-b (the lower flow)")
        traj_a, _, bounds_a, _ = _solve_preset(cfg, cfg.preset)
        cfg_b = RunConfig(**{**cfg.__dict__, "preset": cfg.preset_b, "preset_b": None})
        traj_b, _, _, _ = _solve_preset(cfg_b, cfg.preset_b)
        report = compare_flows(traj_a, traj_b)
        print(
            f"compare: ordering violation {report.ordering_violation:.3e}, "
            f"initially ordered: {report.initially_ordered}, "
            f"max J = {np.nanmax(report.J_series):.3e}"
        )
        diag = DiagnosticsReport(comparison=report)
        _emit(cfg, traj_a, bounds_a, diag.to_dict())
        return 0 if report.passed else 1

    if cfg.command == "exhaust":
        if len(cfg.ladder) < 3:
            raise ConfigurationError("exhaust needs --ladder with >= 3 radii")
        plan = ExhaustionPlan(
            ladder=cfg.ladder,
            dt=cfg.dt,
            t_final=cfg.t_final,
            gradient_treatment=cfg.gradient,
            theta=cfg.theta,
        )
        result = run_exhaustion(cfg.preset, plan, m=cfg.dimension)
        rep = result.report
        print(f"exhaust: ladder {rep.ladder}, horizon {rep.horizon:g}")
        print(f"  d per rung: {[f'{x:.3e}' for x in rep.d]}")
        print(f"  gradient sup per level: {[f'{x:.4g}' for x in rep.gradient_sup_per_level]}")
        ok = bool(np.all(np.diff(rep.d) < 0.0) and rep.sandwich_worst_per_level.min() > -1e-8)
        if cfg.output:
            Path(cfg.output).write_text(
                json.dumps(
                    {"schema_version": 1, "config": _config_dict(cfg), "report": rep.to_dict()},
                    indent=2,
                    sort_keys=True,
                )
                + "\n"
            )
            print(f"wrote {cfg.output}")
        return 0 if ok else 1

    if cfg.command == "incompleteness":
        sizes = cfg.sizes or (50.0, 100.0)
        t_samples = [cfg.t_final / 4.0, cfg.t_final / 2.0, cfg.t_final]
        report = completeness_scan(
            cfg.preset,
            sizes,
            t_samples,
            m=cfg.dimension,
            dt=cfg.dt,
            base_radius=max(cfg.r_min, 1.0),
        )
        for row in report.rows:
            ref = "-" if row["reference"] is None else f"{row['reference']:.6g}"
            print(
                f"size {row['size']:g}  t={row['t']:g}  length {row['length']:.6g}"
                f"  reference {ref}"
            )
        print(f"verdict: {report.verdict}")
        if cfg.output:
            Path(cfg.output).write_text(
                json.dumps(
                    {
                        "schema_version": 1,
                        "config": _config_dict(cfg),
                        "report": report.to_dict(),
                    },
                    indent=2,
                    sort_keys=True,
                )
                + "\n"
            )
            print(f"wrote {cfg.output}")
        expected = (
            "UniformlyBounded"
            if isinstance(cfg.preset, (PowerLaw, PuncturedSphere))
            else "DivergingWithDomain"
        )
        return 0 if report.verdict == expected else 1

    raise ConfigurationError(f"unknown command {cfg.command!r}")


if __name__ == "__main__":
    sys.exit(main())
