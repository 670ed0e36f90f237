import numpy as np
import pytest

import yamabeflow as yf


def solve_preset(preset, mesh, config, frozen=False):
    """Build data, boundary curve, and run one solve."""
    u0 = yf.make_initial(preset, mesh)
    if frozen:
        return yf.solve(u0, yf.frozen_boundary(float(u0.values[-1])), config)
    curv = yf.initial_scalar_curvature(u0)
    bounds = yf.data_bounds(u0, curv)
    profile = yf.profile_from_data(u0, curv, bounds)
    return yf.solve(u0, profile, config)


def closed_form_constant_trajectory(mesh, c, dt, t_final):
    """Exact flow from constant data: u(t) = c + m(m-1) t at every node."""
    mm = mesh.m * (mesh.m - 1)
    times = np.arange(0.0, t_final + dt / 2, dt)
    fields = np.array([np.full(mesh.n, c + mm * t) for t in times])
    return yf.FlowTrajectory(mesh=mesh, times=times, fields=fields)


@pytest.fixture
def hyper_mesh():
    return yf.RadialMesh(yf.Background.HYPERBOLIC, 3, 0.0, 3.0, 121)
