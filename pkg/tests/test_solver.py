import numpy as np
import pytest

import yamabeflow as yf
from yamabeflow.solver import FlowState, step

from conftest import closed_form_constant_trajectory, solve_preset


def hyper(n, ell=3.0, m=3):
    return yf.RadialMesh(yf.Background.HYPERBOLIC, m, 0.0, ell, n)


# --- exactness on spatially constant data ------------------------------------

def test_constant_flow_exact():
    mesh = hyper(65)
    cfg = yf.SolveConfig(dt=1e-3, t_final=0.05)
    traj = solve_preset(yf.Constant(1.0), mesh, cfg)
    for k in range(traj.n_states):
        expected = 1.0 + 6.0 * traj.times[k]
        assert np.abs(traj.fields[k] - expected).max() < 1e-12


def test_partial_final_step_keeps_exactness():
    # t_final not a multiple of dt: grid ends with a shorter step
    mesh = hyper(65)
    cfg = yf.SolveConfig(dt=3e-3, t_final=0.01)
    traj = solve_preset(yf.Constant(1.0), mesh, cfg)
    assert traj.times[-1] == pytest.approx(0.01, abs=1e-15)
    assert traj.times[-1] - traj.times[-2] == pytest.approx(1e-3, abs=1e-12)
    err = max(
        np.abs(traj.fields[k] - (1.0 + 6.0 * traj.times[k])).max()
        for k in range(traj.n_states)
    )
    assert err < 1e-12


def test_constant_flow_exact_other_dimension():
    mesh = hyper(65, m=5)
    cfg = yf.SolveConfig(dt=2e-3, t_final=0.1, theta=0.5)
    traj = solve_preset(yf.Constant(2.0), mesh, cfg)
    mm = 20.0
    err = max(
        np.abs(traj.fields[k] - (2.0 + mm * traj.times[k])).max()
        for k in range(traj.n_states)
    )
    assert err < 1e-11


# --- static solution ------------------------------------------------------------

def test_flat_static_single_step_rate():
    rates = {}
    for n in (100, 200):
        mesh = hyper(n + 1, ell=4.0)
        u0 = yf.make_initial(yf.FlatStatic(1.0), mesh)
        cfg = yf.SolveConfig(dt=1e-3, t_final=1e-3)
        st = FlowState(mesh, u0.values.copy(), 0.0)
        nxt = step(st, float(u0.values[-1]), cfg)
        rates[n] = np.abs(nxt.u - u0.values).max() / cfg.dt
    assert rates[100] < 0.1
    assert rates[100] / rates[200] == pytest.approx(4.0, rel=0.5)


# --- sign of the initial motion ---------------------------------------------------

def test_punctured_sphere_contracts_at_origin():
    mesh = yf.RadialMesh(yf.Background.EUCLIDEAN, 3, 0.0, 6.0, 301)
    u0 = yf.make_initial(yf.PuncturedSphere(), mesh)
    curv = yf.initial_scalar_curvature(u0)
    assert -float(u0.values[0]) * float(curv.values[0]) < 0.0
    cfg = yf.SolveConfig(dt=1e-4, t_final=1e-4)
    nxt = step(FlowState(mesh, u0.values.copy(), 0.0), float(u0.values[-1]), cfg)
    assert nxt.u[0] < u0.values[0]


# --- failure paths ----------------------------------------------------------------

def test_step_positivity_failure_carries_location():
    mesh = yf.RadialMesh(yf.Background.EUCLIDEAN, 3, 0.0, 8.0, 161)
    u0 = yf.make_initial(yf.PuncturedSphere(), mesh)
    cfg = yf.SolveConfig(dt=1.0, t_final=1.0, gradient_treatment="explicit")
    with pytest.raises(yf.StepFailureError) as err:
        step(FlowState(mesh, u0.values.copy(), 0.0), float(u0.values[-1]), cfg)
    assert err.value.value <= 0.0
    assert 0.0 <= err.value.radius <= 8.0


def test_solve_retries_recover_positivity():
    mesh = yf.RadialMesh(yf.Background.EUCLIDEAN, 3, 0.0, 8.0, 161)
    u0 = yf.make_initial(yf.PuncturedSphere(), mesh)
    cfg = yf.SolveConfig(dt=1.0, t_final=1.0, gradient_treatment="explicit")
    traj = yf.solve(u0, yf.frozen_boundary(float(u0.values[-1])), cfg)
    assert traj.min_u() > 0.0
    assert traj.step_meta[0].retries > 0
    assert traj.step_meta[0].substeps > 1


def test_solve_rejects_incompatible_boundary():
    mesh = hyper(65)
    u0 = yf.make_initial(yf.Constant(1.0), mesh)
    cfg = yf.SolveConfig(dt=1e-3, t_final=0.01)
    with pytest.raises(yf.ConfigurationError):
        yf.solve(u0, yf.frozen_boundary(1.5), cfg)


def test_step_rejects_nonpositive_boundary():
    mesh = hyper(65)
    u0 = yf.make_initial(yf.Constant(1.0), mesh)
    cfg = yf.SolveConfig(dt=1e-3, t_final=0.01)
    with pytest.raises(yf.ConfigurationError):
        step(FlowState(mesh, u0.values.copy(), 0.0), -1.0, cfg)


def test_config_validation():
    with pytest.raises(yf.ConfigurationError):
        yf.SolveConfig(dt=0.0, t_final=1.0)
    with pytest.raises(yf.ConfigurationError):
        yf.SolveConfig(dt=1e-3, t_final=1.0, theta=0.2)
    with pytest.raises(yf.ConfigurationError):
        yf.SolveConfig(dt=1e-3, t_final=1.0, gradient_treatment="upwind")
    with pytest.raises(yf.ConfigurationError):
        yf.SolveConfig(dt=1.0, t_final=0.5)


# --- positivity along shipped presets ----------------------------------------------

@pytest.mark.parametrize(
    "preset",
    [yf.Constant(0.5), yf.FlatStatic(1.0), yf.Bump(1.0, 1.0, 2.0, 0.5)],
)
def test_positivity_preserved(preset):
    mesh = hyper(161, ell=4.0)
    cfg = yf.SolveConfig(dt=1e-3, t_final=0.2)
    traj = solve_preset(preset, mesh, cfg)
    assert traj.min_u() > 0.0
    assert all(meta.min_u > 0.0 for meta in traj.step_meta)


# --- discrete comparison principle ---------------------------------------------------

def test_discrete_comparison_ordered_bumps():
    # explicit gradient treatment, ordered data and ordered boundary curves
    mesh = yf.RadialMesh(yf.Background.HYPERBOLIC, 3, 0.0, 6.0, 301)
    cfg = yf.SolveConfig(dt=1e-3, t_final=0.25, gradient_treatment="explicit")
    lower = solve_preset(yf.Bump(1.0, 1.0, 2.0, 0.5), mesh, cfg)
    upper = solve_preset(yf.Bump(1.15, 1.0, 2.0, 0.5), mesh, cfg)
    assert np.all(lower.fields[0] <= upper.fields[0])
    violation = float((lower.fields - upper.fields).max())
    assert violation <= 1e-10


def test_high_dimension_positive_gradient_coefficient():
    # m > 6 flips the sign of the quadratic gradient term; ordering and
    # the sandwich must survive without upwinding
    mesh = yf.RadialMesh(yf.Background.HYPERBOLIC, 7, 0.0, 4.0, 201)
    cfg = yf.SolveConfig(dt=1e-3, t_final=0.1, gradient_treatment="explicit")
    lower = solve_preset(yf.Bump(1.0, 1.0, 2.0, 0.5), mesh, cfg)
    upper = solve_preset(yf.Bump(1.15, 1.0, 2.0, 0.5), mesh, cfg)
    assert lower.min_u() > 0.0
    assert float((lower.fields - upper.fields).max()) <= 1e-10
    mm = 42.0
    for traj in (lower, upper):
        u0_min = float(traj.fields[0].min())
        worst = min(
            float((traj.fields[k] - (mm * traj.times[k] + u0_min / 3.0)).min())
            for k in range(traj.n_states)
        )
        assert worst > -1e-8


# --- convergence orders ----------------------------------------------------------------

def test_temporal_order_at_least_one():
    mesh = hyper(201, ell=6.0)
    finals = {}
    for dt in (4e-3, 2e-3, 1e-3):
        cfg = yf.SolveConfig(dt=dt, t_final=0.2)
        finals[dt] = solve_preset(yf.Bump(1.0, 1.0, 2.0, 0.5), mesh, cfg).fields[-1]
    coarse = np.abs(finals[4e-3] - finals[2e-3]).max()
    fine = np.abs(finals[2e-3] - finals[1e-3]).max()
    assert coarse / fine == pytest.approx(2.0, rel=0.35)


def test_spatial_order_two_on_static():
    drifts = {}
    for n in (200, 400):
        mesh = hyper(n + 1, ell=5.0)
        cfg = yf.SolveConfig(dt=1e-3, t_final=0.1)
        traj = solve_preset(yf.FlatStatic(1.0), mesh, cfg, frozen=True)
        drifts[n] = max(
            np.abs(traj.fields[k] - traj.fields[0]).max() for k in range(traj.n_states)
        )
    assert drifts[200] / drifts[400] == pytest.approx(4.0, rel=0.4)


# --- curvature from two routes ----------------------------------------------------------

def test_curvature_pair_constant_flow():
    mesh = hyper(201)
    cfg = yf.SolveConfig(dt=1e-4, t_final=0.02)
    traj = solve_preset(yf.Constant(1.0), mesh, cfg)
    worst = max(traj.curvature_pair(k).discrepancy for k in range(traj.n_states - 1))
    assert worst < 1e-6
    pair = traj.curvature_pair(0)
    expected = -6.0 / (1.0 + 6.0 * pair.t_mid)
    assert pair.elliptic == pytest.approx(np.full(mesh.n, expected), abs=1e-9)


def test_curvature_pair_discrepancy_first_order_in_dt():
    mesh = hyper(401, ell=6.0)
    worst = {}
    for dt in (2e-3, 1e-3):
        cfg = yf.SolveConfig(dt=dt, t_final=0.04)
        traj = solve_preset(yf.Bump(1.0, 1.0, 2.0, 0.5), mesh, cfg)
        worst[dt] = max(
            traj.curvature_pair(k).discrepancy for k in range(traj.n_states - 1)
        )
    assert worst[2e-3] / worst[1e-3] == pytest.approx(2.0, rel=0.3)


# --- curvature evolution identity ---------------------------------------------------------

def test_evolution_residual_closed_form_constant():
    mesh = hyper(101)
    traj = closed_form_constant_trajectory(mesh, 1.0, 1e-3, 0.2)
    res = yf.evolution_residual(traj)
    assert res.sup_per_step.max() < 1e-8


def test_evolution_residual_flat_static_small():
    # static data: residual is pure discretization noise and shrinks with n
    sups = {}
    for n in (101, 201):
        mesh = hyper(n, ell=2.0)
        cfg = yf.SolveConfig(dt=1e-3, t_final=0.02)
        traj = solve_preset(yf.FlatStatic(4.0), mesh, cfg, frozen=True)
        sups[n] = yf.evolution_residual(traj).sup_per_step.max()
    assert sups[201] < 0.5
    assert sups[201] < 0.5 * sups[101]


def test_evolution_residual_refines_on_bump():
    sups = []
    for npu, dt in [(50, 4e-3), (100, 2e-3), (200, 1e-3)]:
        mesh = yf.RadialMesh(yf.Background.HYPERBOLIC, 3, 0.0, 6.0, 6 * npu + 1)
        cfg = yf.SolveConfig(dt=dt, t_final=0.048)
        traj = solve_preset(yf.Bump(1.0, 1.0, 2.0, 0.5), mesh, cfg)
        sups.append(yf.evolution_residual(traj).sup_per_step.max())
    assert sups[0] > sups[1] > sups[2]
