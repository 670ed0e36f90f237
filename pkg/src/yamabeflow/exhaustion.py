"""Nested-ball solves, interior convergence, and time extension.

The existence construction is run numerically: solve on an increasing
ladder of balls with the constructed boundary data (whose scale constant
is recomputed per ball), measure how much the solutions move on a fixed
inner ball, and restart the flow from a slightly rewound state to push
past the first guaranteed horizon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import ConfigurationError
from .geometry import Background, RadialField, RadialMesh
from .initial_data import InitialPreset, data_bounds, initial_scalar_curvature, make_initial
from .boundary_data import profile_from_data
from .operators import scalar_curvature
from .solver import FlowTrajectory, SolveConfig, solve
from .diagnostics import gradient_quantity_sup


@dataclass(frozen=True)
class ExhaustionPlan:
    """Ladder of ball radii plus shared solve parameters.

    The first leg horizon is horizon_factor / K0 (K0 from the coarsest
    data bounds across levels), capped by t_final.  nodes_per_unit fixes
    a common grid spacing so nodes on the inner ball coincide exactly
    across levels.
    """

    ladder: tuple[float, ...]
    dt: float = 1e-3
    t_final: float = 0.5
    inner_radius: float | None = None
    nodes_per_unit: int = 64
    horizon_factor: float = 0.9
    checkpoints: int = 10
    gradient_treatment: str = "implicit-linearized"
    theta: float = 1.0

    def __post_init__(self):
        ladder = tuple(float(x) for x in self.ladder)
        object.__setattr__(self, "ladder", ladder)
        if len(ladder) < 3 or any(b <= a for a, b in zip(ladder, ladder[1:])):
            raise ConfigurationError("ladder must be strictly increasing with >= 3 levels")
        inner = ladder[0] if self.inner_radius is None else float(self.inner_radius)
        if not 0.0 < inner <= ladder[0]:
            raise ConfigurationError("inner radius must lie in (0, ladder[0]]")
        object.__setattr__(self, "inner_radius", inner)
        for radius in ladder + (inner,):
            steps = radius * self.nodes_per_unit
            if abs(steps - round(steps)) > 1e-9:
                raise ConfigurationError(
                    f"radius {radius} is not a whole number of grid cells; "
                    f"adjust nodes_per_unit"
                )


@dataclass(frozen=True)
class ConvergenceReport:
    """Level-to-level movement on the inner ball plus per-level diagnostics."""

    ladder: tuple[float, ...]
    inner_radius: float
    horizon: float
    checkpoint_times: np.ndarray
    d: np.ndarray  # d[k] = sup |u_k - u_{k+1}| on the inner ball
    kappa_per_level: np.ndarray
    K0_per_level: np.ndarray
    gradient_sup_per_level: np.ndarray
    sandwich_worst_per_level: np.ndarray

    def to_dict(self) -> dict:
        return {
            "ladder": list(self.ladder),
            "inner_radius": self.inner_radius,
            "horizon": self.horizon,
            "checkpoint_times": list(map(float, self.checkpoint_times)),
            "d": list(map(float, self.d)),
            "kappa_per_level": list(map(float, self.kappa_per_level)),
            "K0_per_level": list(map(float, self.K0_per_level)),
            "gradient_sup_per_level": list(map(float, self.gradient_sup_per_level)),
            "sandwich_worst_per_level": list(map(float, self.sandwich_worst_per_level)),
        }


@dataclass
class ExhaustionResult:
    """Finest-level approximation restricted to the inner ball, plus report."""

    inner_times: np.ndarray
    inner_mesh: RadialMesh
    inner_fields: np.ndarray
    report: ConvergenceReport
    trajectories: list[FlowTrajectory] = dc_field(default_factory=list)


def _sandwich_worst(traj: FlowTrajectory) -> float:
    """Worst slack of the two-sided barrier sandwich over a trajectory."""
    m = traj.mesh.m
    mm = m * (m - 1)
    u0_min = float(traj.fields[0].min())
    u0_max = float(traj.fields[0].max())
    worst = math.inf
    for k in range(traj.n_states):
        t = float(traj.times[k])
        u = traj.fields[k]
        worst = min(worst, float((u - (mm * t + u0_min / 3.0)).min()))
        worst = min(worst, float(((mm * t + 5.0 * u0_max / 3.0) - u).min()))
    return worst


def run_exhaustion(preset: InitialPreset, plan: ExhaustionPlan, m: int = 3) -> ExhaustionResult:
    """Solve the ladder and measure interior convergence.

    Every level gets its own boundary curve built from its own data
    bounds (the scale constant is a max over that level's closed ball).
    All levels share one time grid so states can be compared directly.
    """
    levels = []
    for radius in plan.ladder:
        n = int(round(radius * plan.nodes_per_unit)) + 1
        mesh = RadialMesh(Background.HYPERBOLIC, m, 0.0, radius, n)
        u0 = make_initial(preset, mesh)
        curv = initial_scalar_curvature(u0)
        bounds = data_bounds(u0, curv)
        profile = profile_from_data(u0, curv, bounds)
        levels.append((mesh, u0, bounds, profile))

    k0_max = max(bounds.K0 for _, _, bounds, _ in levels)
    horizon = plan.t_final if k0_max == 0.0 else min(plan.t_final, plan.horizon_factor / k0_max)
    if horizon < plan.dt:
        raise ConfigurationError("horizon shorter than one step; reduce dt")
    config = SolveConfig(
        dt=plan.dt,
        t_final=horizon,
        gradient_treatment=plan.gradient_treatment,
        theta=plan.theta,
    )

    trajectories: list[FlowTrajectory] = []
    for index, (mesh, u0, bounds, profile) in enumerate(levels):
        try:
            trajectories.append(solve(u0, profile, config))
        except Exception as exc:
            raise ConfigurationError(f"exhaustion level {index} (radius "
                                     f"{plan.ladder[index]}) failed: {exc}") from exc

    n_inner = int(round(plan.inner_radius * plan.nodes_per_unit)) + 1
    n_states = trajectories[0].n_states
    checkpoint_idx = np.unique(
        np.linspace(0, n_states - 1, plan.checkpoints).round().astype(int)
    )
    checkpoint_times = trajectories[0].times[checkpoint_idx]

    d = np.empty(len(levels) - 1)
    for k in range(len(levels) - 1):
        a = trajectories[k].fields[np.ix_(checkpoint_idx, np.arange(n_inner))]
        b = trajectories[k + 1].fields[np.ix_(checkpoint_idx, np.arange(n_inner))]
        d[k] = float(np.abs(a - b).max())

    grad_sups = np.empty(len(levels))
    for k, traj in enumerate(trajectories):
        _, sups = gradient_quantity_sup(traj, margin=1.0)
        grad_sups[k] = float(sups.max())

    report = ConvergenceReport(
        ladder=plan.ladder,
        inner_radius=plan.inner_radius,
        horizon=horizon,
        checkpoint_times=checkpoint_times,
        d=d,
        kappa_per_level=np.array([b.kappa for _, _, b, _ in levels]),
        K0_per_level=np.array([b.K0 for _, _, b, _ in levels]),
        gradient_sup_per_level=grad_sups,
        sandwich_worst_per_level=np.array([_sandwich_worst(t) for t in trajectories]),
    )
    finest = trajectories[-1]
    inner_mesh = RadialMesh(Background.HYPERBOLIC, m, 0.0, plan.inner_radius, n_inner)
    return ExhaustionResult(
        inner_times=finest.times.copy(),
        inner_mesh=inner_mesh,
        inner_fields=finest.fields[:, :n_inner].copy(),
        report=report,
        trajectories=trajectories,
    )


@dataclass(frozen=True)
class ExtensionResult:
    """Concatenated flow after a restart, with consistency diagnostics."""

    trajectory: FlowTrajectory
    restart_time: float
    previous_end: float
    K1: float
    leg_horizon: float
    overlap_difference: float

    @property
    def made_progress(self) -> bool:
        """Whether the restart pushed the flow strictly past its old end."""
        return bool(self.trajectory.times[-1] > self.previous_end + 1e-12)


def extend_time(
    traj: FlowTrajectory,
    next_horizon: float,
    restart_epsilon: float | None = None,
    horizon_factor: float = 0.9,
) -> ExtensionResult:
    """Restart the flow shortly before its end and continue in time.

    The restart state u(T - eps) becomes fresh initial data: its
    curvature bound K1 caps the new leg at horizon_factor / K1, and a
    new boundary curve is built from the restart data.  The overlap
    window [T - eps, T] is solved twice; the sup difference between old
    and new states there is reported, not asserted.
    """
    if traj.config is None:
        raise ConfigurationError("trajectory carries no solve configuration")
    t_end = float(traj.times[-1])
    eps = t_end / 10.0 if restart_epsilon is None else float(restart_epsilon)
    if not 0.0 < eps < t_end / 5.0:
        raise ConfigurationError("restart epsilon must lie in (0, T/5)")
    k_restart = int(np.argmin(np.abs(traj.times - (t_end - eps))))
    if k_restart == traj.n_states - 1:
        k_restart -= 1
    t_restart = float(traj.times[k_restart])

    mesh = traj.mesh
    u1 = RadialField(mesh, traj.fields[k_restart])
    curv1 = RadialField(mesh, scalar_curvature(u1))
    bounds1 = data_bounds(u1, curv1)
    profile1 = profile_from_data(u1, curv1, bounds1)
    leg = next_horizon if bounds1.K0 == 0.0 else min(next_horizon, horizon_factor / bounds1.K0)
    config1 = SolveConfig(
        dt=traj.config.dt,
        t_final=leg,
        gradient_treatment=traj.config.gradient_treatment,
        theta=traj.config.theta,
        max_retries=traj.config.max_retries,
    )
    leg_traj = solve(u1, profile1, config1)

    overlap = 0.0
    for k, t_local in enumerate(leg_traj.times):
        t_global = t_restart + float(t_local)
        if t_global > t_end + 1e-12:
            break
        j = int(np.argmin(np.abs(traj.times - t_global)))
        if abs(float(traj.times[j]) - t_global) < 1e-9:
            overlap = max(overlap, float(np.abs(traj.fields[j] - leg_traj.fields[k]).max()))

    times = np.concatenate((traj.times[:k_restart], t_restart + leg_traj.times))
    fields = np.vstack((traj.fields[:k_restart], leg_traj.fields))
    meta = list(traj.step_meta[:k_restart]) + list(leg_traj.step_meta)
    combined = FlowTrajectory(
        mesh=mesh, times=times, fields=fields, step_meta=meta, config=traj.config
    )
    return ExtensionResult(
        trajectory=combined,
        restart_time=t_restart,
        previous_end=t_end,
        K1=bounds1.K0,
        leg_horizon=leg,
        overlap_difference=overlap,
    )
