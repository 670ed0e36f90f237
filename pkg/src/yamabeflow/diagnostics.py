"""Quantitative checks on computed trajectories.

Each check reports its worst slack (nonnegative when the inequality
holds) together with where and when it occurred, so failures point at
the offending node and time instead of a bare boolean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np
from scipy.integrate import simpson

from .errors import ConfigurationError
from .geometry import (
    Background,
    RadialField,
    RadialMesh,
    flat_conformal_factor,
    log_polar_from_radius,
    log_polar_values,
    radial_length,
    sphere_area,
)
from .initial_data import (
    DataBounds,
    InitialPreset,
    PowerLaw,
    PuncturedSphere,
    data_bounds,
    initial_scalar_curvature,
    make_initial,
)
from .boundary_data import frozen_boundary, profile_from_data
from .operators import radial_derivative, scalar_curvature
from .solver import FlowTrajectory, SolveConfig, interior_slice, solve


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one inequality scan."""

    name: str
    worst_slack: float
    worst_radius: float
    worst_time: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "worst_slack": self.worst_slack,
            "worst_radius": self.worst_radius,
            "worst_time": self.worst_time,
            "passed": self.passed,
        }


class _Worst:
    """Track the minimum slack and its location across scans."""

    def __init__(self):
        self.slack = math.inf
        self.radius = math.nan
        self.time = math.nan

    def update(self, slacks: np.ndarray, radii: np.ndarray, t: float):
        k = int(np.argmin(slacks))
        if slacks[k] < self.slack:
            self.slack = float(slacks[k])
            self.radius = float(radii[k])
            self.time = float(t)

    def result(self, name: str, tolerance: float) -> CheckResult:
        return CheckResult(
            name=name,
            worst_slack=self.slack,
            worst_radius=self.radius,
            worst_time=self.time,
            passed=bool(self.slack >= -tolerance),
        )


@dataclass(frozen=True)
class BarrierReport:
    """Slack report for the pointwise barrier and curvature bounds."""

    checks: dict[str, CheckResult]
    tolerance: float
    eps: float
    K0: float
    b_flat: float | None
    note: str = "lower barrier check applies in the rotationally symmetric case"

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def to_dict(self) -> dict:
        return {
            "tolerance": self.tolerance,
            "eps": self.eps,
            "K0": self.K0,
            "b_flat": self.b_flat,
            "note": self.note,
            "passed": self.passed,
            "checks": {k: v.to_dict() for k, v in self.checks.items()},
        }


def check_barriers(
    traj: FlowTrajectory,
    bounds: DataBounds,
    b_flat: float | None = None,
    tolerance: float = 1e-8,
) -> BarrierReport:
    """Scan the two-sided sandwich, curvature bounds, and both barriers.

    The sandwich and the lower barrier are checked at every node of every
    state.  Curvature bounds use the elliptic formula on midpoint fields
    (plus the initial state) at interior nodes, restricted to times below
    1/K0 when K0 > 0.  The flat upper barrier is checked only when b_flat
    is supplied; the initial ordering below b * g_eucl is verified first.
    """
    mesh = traj.mesh
    if mesh.background is not Background.HYPERBOLIC:
        raise ConfigurationError("barrier checks apply to hyperbolic trajectories")
    m = mesh.m
    mm = m * (m - 1)
    eta = (m - 2) / 4.0
    nodes = mesh.nodes
    u0 = traj.fields[0]
    u0_min, u0_max = float(u0.min()), float(u0.max())

    flat = None
    if b_flat is not None:
        flat = flat_conformal_factor(nodes, b_flat)
        gap0 = flat - u0
        if gap0.min() < -1e-12 * max(1.0, b_flat):
            raise ConfigurationError(
                "initial data is not dominated by the flat reference "
                f"(deficit {gap0.min():.3e}); choose a larger b_flat"
            )

    w14_lo, w14_hi = _Worst(), _Worst()
    w23 = _Worst()
    w21 = _Worst()
    for k in range(traj.n_states):
        t = float(traj.times[k])
        u = traj.fields[k]
        w14_lo.update(u - (mm * t + u0_min / 3.0), nodes, t)
        w14_hi.update((mm * t + 5.0 * u0_max / 3.0) - u, nodes, t)
        w23.update(u - mm * t, nodes, t)
        if flat is not None:
            w21.update((mm * t) ** eta + flat**eta - u**eta, nodes, t)

    w13_lo, w13_hi = _Worst(), _Worst()
    itr = interior_slice(mesh)
    t_cap = math.inf if bounds.K0 == 0.0 else (1.0 - 1e-9) / bounds.K0

    def scan_curvature(r_vals: np.ndarray, t: float):
        if t > t_cap:
            return
        ri = r_vals[itr]
        radii = nodes[itr]
        w13_lo.update(ri + 1.0 / (t + bounds.eps_floor), radii, t)
        upper = bounds.K0 / (1.0 - bounds.K0 * t) if bounds.K0 > 0.0 else 0.0
        w13_hi.update(upper - ri, radii, t)

    scan_curvature(scalar_curvature(traj.fields[0], mesh), 0.0)
    for k in range(traj.n_states - 1):
        u_mid = 0.5 * (traj.fields[k] + traj.fields[k + 1])
        t_mid = 0.5 * float(traj.times[k] + traj.times[k + 1])
        scan_curvature(scalar_curvature(u_mid, mesh), t_mid)

    checks = {
        "sandwich_lower": w14_lo.result("sandwich_lower", tolerance),
        "sandwich_upper": w14_hi.result("sandwich_upper", tolerance),
        "curvature_lower": w13_lo.result("curvature_lower", tolerance),
        "curvature_upper": w13_hi.result("curvature_upper", tolerance),
        "lower_barrier": w23.result("lower_barrier", tolerance),
    }
    if flat is not None:
        checks["flat_upper_barrier"] = w21.result("flat_upper_barrier", tolerance)
    return BarrierReport(
        checks=checks, tolerance=tolerance, eps=bounds.eps_floor, K0=bounds.K0, b_flat=b_flat
    )


def cutoff_bridge(s, lo: float, hi: float):
    """C^2 cutoff: 0 below lo, 1 above hi, quintic bridge in between.

    The bridge is the unique quintic with value 0/1 and vanishing first
    and second derivatives at both ends; it is concave on the upper half
    of the bridge.
    """
    s = np.asarray(s, dtype=float)
    x = np.clip((s - lo) / (hi - lo), 0.0, 1.0)
    out = x**3 * (10.0 - 15.0 * x + 6.0 * x * x)
    return out if out.ndim else float(out)


def area_difference_J(
    u_upper: RadialField,
    v_lower: RadialField,
    S: float,
    s0: float,
    *,
    num_s: int = 4097,
    s_max: float | None = None,
) -> float:
    """Cutoff-weighted area-difference functional between two factors.

    Converts both radial fields to their cylinder (log-polar) conformal
    factors U, V and integrates the positive part of V^(eta+1)-U^(eta+1)
    against the cutoff and the product measure |S^(m-1)| ds on [S, s_max].
    Admissible window: 0 < S <= s0/3 and s0 <= log 2.
    """
    if not (0.0 < S <= s0 / 3.0 + 1e-12 and s0 <= math.log(2.0) + 1e-12):
        raise ConfigurationError("need 0 < S <= s0/3 and s0 <= log 2")
    mesh = u_upper.mesh
    if not mesh.same_grid(v_lower.mesh):
        raise ConfigurationError("fields must share one mesh")
    if mesh.background is not Background.HYPERBOLIC:
        raise ConfigurationError("the area functional lives on the hyperbolic background")
    r_pos = float(mesh.nodes[1] if mesh.has_origin else mesh.nodes[0])
    s_reach = float(log_polar_from_radius(r_pos))
    if s_max is None:
        s_max = max(min(s_reach, 40.0), 2.0 * s0)
    if s_max > s_reach + 1e-12 or s_max <= s0:
        raise ConfigurationError(
            f"integration window [S, {s_max:.3f}] not covered by the mesh "
            f"(fields reach s = {s_reach:.3f}; need s_max in ({s0}, {s_reach:.3f}])"
        )
    eta = (mesh.m - 2) / 4.0
    s_grid = np.linspace(S, s_max, num_s)
    big_u = log_polar_values(u_upper, s_grid)
    big_v = log_polar_values(v_lower, s_grid)
    diff = np.maximum(big_v ** (eta + 1.0) - big_u ** (eta + 1.0), 0.0)
    integrand = diff * cutoff_bridge(s_grid, S, s0)
    return float(sphere_area(mesh.m) * simpson(integrand, x=s_grid))


@dataclass(frozen=True)
class ComparisonReport:
    """Ordering diagnostics for a pair of flows (expected lower <= upper)."""

    ordering_violation: float
    initially_ordered: bool
    J_times: np.ndarray
    J_series: np.ndarray
    S: float
    s0: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.initially_ordered and self.ordering_violation <= self.tolerance)

    def to_dict(self) -> dict:
        return {
            "ordering_violation": self.ordering_violation,
            "initially_ordered": self.initially_ordered,
            "label": None if self.initially_ordered else "unordered-initial",
            "J_times": list(map(float, self.J_times)),
            "J_series": list(map(float, self.J_series)),
            "S": self.S,
            "s0": self.s0,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def compare_flows(
    traj_upper: FlowTrajectory,
    traj_lower: FlowTrajectory,
    *,
    S: float = 0.15,
    s0: float = 0.6,
    j_samples: int = 9,
    tolerance: float = 1e-10,
) -> ComparisonReport:
    """Pointwise ordering violation and area-difference series for a pair.

    The violation is the max over all nodes and common times of the
    positive part of (lower - upper).  The area functional is sampled at
    j_samples states; it vanishes identically for ordered pairs.
    """
    if not traj_upper.mesh.same_grid(traj_lower.mesh):
        raise ConfigurationError("flows live on different meshes")
    if traj_upper.n_states != traj_lower.n_states or not np.allclose(
        traj_upper.times, traj_lower.times, atol=1e-12
    ):
        raise ConfigurationError("flows use different time grids")
    gap0 = traj_upper.fields[0] - traj_lower.fields[0]
    initially_ordered = bool(gap0.min() >= -1e-12 * max(1.0, float(np.abs(gap0).max())))
    violation = max(0.0, float((traj_lower.fields - traj_upper.fields).max()))

    idx = np.unique(np.linspace(0, traj_upper.n_states - 1, j_samples).round().astype(int))
    j_vals = []
    if traj_upper.mesh.background is Background.HYPERBOLIC:
        for k in idx:
            j_vals.append(
                area_difference_J(traj_upper.field_at(k), traj_lower.field_at(k), S, s0)
            )
    else:
        j_vals = [math.nan] * len(idx)
    return ComparisonReport(
        ordering_violation=violation,
        initially_ordered=initially_ordered,
        J_times=traj_upper.times[idx],
        J_series=np.asarray(j_vals),
        S=S,
        s0=s0,
        tolerance=tolerance,
    )


def gradient_quantity_sup(
    traj: FlowTrajectory, margin: float = 1.0
) -> tuple[np.ndarray, np.ndarray]:
    """Per-time sup of the gradient quantity |grad U|^2 / sqrt(U), U = u^eta.

    The sup is taken over the ball of radius r_max - margin, the region
    where interior gradient control is uniform in the domain size.
    """
    if traj.mesh.background is not Background.HYPERBOLIC:
        raise ConfigurationError("gradient diagnostics apply to hyperbolic runs")
    if margin < 1.0:
        raise ConfigurationError("margin must be >= 1")
    mesh = traj.mesh
    eta = (mesh.m - 2) / 4.0
    mask = mesh.nodes <= mesh.r_max - margin + 1e-12
    if not mask.any():
        raise ConfigurationError("margin leaves no nodes to scan")
    sups = np.empty(traj.n_states)
    for k in range(traj.n_states):
        big_u = traj.fields[k] ** eta
        du = radial_derivative(big_u, mesh)
        w = du * du / np.sqrt(big_u)
        sups[k] = float(w[mask].max())
    return traj.times.copy(), sups


@dataclass(frozen=True)
class CompletenessReport:
    """Radial length table over domain sizes and times, with a verdict."""

    rows: list[dict]
    verdict: str
    thresholds: dict
    notes: str
    m: int

    def to_dict(self) -> dict:
        return {
            "rows": self.rows,
            "verdict": self.verdict,
            "thresholds": self.thresholds,
            "notes": self.notes,
            "m": self.m,
        }


def completeness_scan(
    preset: InitialPreset,
    sizes: Sequence[float],
    t_samples: Sequence[float],
    *,
    m: int = 3,
    nodes_per_unit: int = 40,
    dt: float = 1e-3,
    base_radius: float = 1.0,
    gradient_treatment: str = "implicit-linearized",
) -> CompletenessReport:
    """Measure radial lengths from base_radius to the domain edge.

    Euclidean presets run on annuli [base_radius, size] with both
    Dirichlet values frozen at the initial data; hyperbolic presets run
    on balls [0, size] with the constructed boundary curve.  Lengths are
    reported per (size, t) next to the relevant reference value: the
    static power-law bound sqrt(b) (1/base - 1/size) for Euclidean
    power-law data, the big-bang floor sqrt(m(m-1)t) (size - base) for
    hyperbolic runs.
    """
    sizes = sorted(float(s) for s in sizes)
    t_samples = sorted(float(t) for t in t_samples)
    if sizes[0] <= base_radius:
        raise ConfigurationError("domain sizes must exceed the base radius")
    if t_samples[-1] <= 0.0:
        raise ConfigurationError("need at least one positive time sample")
    euclidean = isinstance(preset, (PowerLaw, PuncturedSphere))
    background = Background.EUCLIDEAN if euclidean else Background.HYPERBOLIC
    t_final = t_samples[-1]
    rows: list[dict] = []
    mm = m * (m - 1)

    for size in sizes:
        if euclidean:
            span = size - base_radius
            n = int(round(span * nodes_per_unit)) + 1
            mesh = RadialMesh(background, m, base_radius, size, n)
        else:
            n = int(round(size * nodes_per_unit)) + 1
            mesh = RadialMesh(background, m, 0.0, size, n)
        u0 = make_initial(preset, mesh)
        config = SolveConfig(dt=dt, t_final=t_final, gradient_treatment=gradient_treatment)
        if euclidean:
            boundary = frozen_boundary(float(u0.values[-1]))
        else:
            curv = initial_scalar_curvature(u0)
            bounds = data_bounds(u0, curv)
            boundary = profile_from_data(u0, curv, bounds)
        traj = solve(u0, boundary, config)
        for t in t_samples:
            k = int(np.argmin(np.abs(traj.times - t)))
            length = radial_length(traj.field_at(k), base_radius, size)
            if isinstance(preset, PowerLaw):
                reference = math.sqrt(preset.scale) * (1.0 / base_radius - 1.0 / size)
            elif euclidean:
                reference = None
            else:
                reference = math.sqrt(mm * float(traj.times[k])) * (size - base_radius)
            rows.append(
                {
                    "size": size,
                    "t": float(traj.times[k]),
                    "length": length,
                    "reference": reference,
                }
            )

    thresholds = {
        "bounded_rel_slack": 0.05,
        "bounded_abs_slack": 1e-3,
        "diverging_fraction": 0.5,
    }
    if euclidean:
        ok = True
        for row in rows:
            if row["reference"] is not None and row["t"] > 0.0:
                ok = ok and row["length"] <= row["reference"] * (
                    1.0 + thresholds["bounded_rel_slack"]
                ) + thresholds["bounded_abs_slack"]
        verdict = "UniformlyBounded" if ok else "DivergingWithDomain"
        notes = (
            "Euclidean annulus; inner and outer Dirichlet values frozen at the "
            "initial data (the static power-law barrier is insensitive to this choice)"
        )
    else:
        t_big = max(t for t in t_samples if t > 0.0)
        by_size = {
            row["size"]: row["length"] for row in rows if abs(row["t"] - t_big) < 1e-9
        }
        lo, hi = sizes[0], sizes[-1]
        growth = by_size[hi] - by_size[lo]
        needed = thresholds["diverging_fraction"] * math.sqrt(mm * t_big) * (hi - lo)
        verdict = "DivergingWithDomain" if growth >= needed else "UniformlyBounded"
        notes = "hyperbolic ball; constructed boundary curve at the outer radius"
    return CompletenessReport(rows=rows, verdict=verdict, thresholds=thresholds, notes=notes, m=m)


@dataclass(frozen=True)
class DiagnosticsReport:
    """Bundle of the structured reports a run produced."""

    barriers: BarrierReport | None = None
    comparison: ComparisonReport | None = None
    completeness: CompletenessReport | None = None
    extras: dict = dc_field(default_factory=dict)

    @property
    def passed(self) -> bool:
        parts = [r for r in (self.barriers, self.comparison) if r is not None]
        return all(r.passed for r in parts)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "barriers": self.barriers.to_dict() if self.barriers else None,
            "comparison": self.comparison.to_dict() if self.comparison else None,
            "completeness": self.completeness.to_dict() if self.completeness else None,
            "extras": self.extras,
        }
