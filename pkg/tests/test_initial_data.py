import numpy as np
import pytest

import yamabeflow as yf


def hyper(n=161, ell=4.0, m=3):
    return yf.RadialMesh(yf.Background.HYPERBOLIC, m, 0.0, ell, n)


def eucl(r_min, ell, n, m=3):
    return yf.RadialMesh(yf.Background.EUCLIDEAN, m, r_min, ell, n)


ALL_PRESETS = [
    (yf.Constant(1.0), hyper()),
    (yf.Constant(2.5), eucl(0.5, 5.0, 100)),
    (yf.FlatStatic(1.0), hyper()),
    (yf.Bump(1.0, 1.0, 2.0, 0.5), hyper()),
    (yf.PuncturedSphere(), eucl(0.0, 6.0, 200)),
    (yf.PowerLaw(1.0), eucl(1.0, 20.0, 400)),
]


@pytest.mark.parametrize("preset,mesh", ALL_PRESETS)
def test_presets_positive_finite(preset, mesh):
    u0 = yf.make_initial(preset, mesh)
    assert np.all(u0.values > 0.0)
    assert np.all(np.isfinite(u0.values))


def test_preset_point_values():
    mesh = eucl(0.0, 4.0, 401)
    sphere = yf.make_initial(yf.PuncturedSphere(), mesh)
    k = np.argmin(np.abs(mesh.nodes - 1.0))
    assert sphere.values[k] == pytest.approx(1.0, abs=1e-14)

    mesh2 = eucl(1.0, 4.0, 301)
    power = yf.make_initial(yf.PowerLaw(1.0), mesh2)
    k = np.argmin(np.abs(mesh2.nodes - 2.0))
    assert power.values[k] == pytest.approx(1.0 / 16.0, abs=1e-14)

    const = yf.make_initial(yf.Constant(1.0), hyper())
    assert np.all(const.values == 1.0)


def test_preset_background_mismatch():
    with pytest.raises(yf.ConfigurationError):
        yf.make_initial(yf.FlatStatic(1.0), eucl(0.5, 3.0, 50))
    with pytest.raises(yf.ConfigurationError):
        yf.make_initial(yf.PowerLaw(1.0), hyper())
    # power law needs a positive inner radius away from the singularity
    with pytest.raises(yf.ConfigurationError):
        yf.make_initial(yf.PowerLaw(1.0), eucl(0.05, 3.0, 50))


def test_preset_parameter_validation():
    with pytest.raises(yf.DomainError):
        yf.Constant(0.0)
    with pytest.raises(yf.DomainError):
        yf.Bump(1.0, -1.0, 2.0, 0.5)
    with pytest.raises(yf.DomainError):
        yf.PowerLaw(-2.0)


def test_preset_from_spec():
    assert yf.preset_from_spec("constant:1.5") == yf.Constant(1.5)
    assert yf.preset_from_spec("bump:1,1,2,0.5") == yf.Bump(1.0, 1.0, 2.0, 0.5)
    assert yf.preset_from_spec("puncturedsphere") == yf.PuncturedSphere()
    with pytest.raises(yf.ConfigurationError):
        yf.preset_from_spec("vortex:1")
    with pytest.raises(yf.ConfigurationError):
        yf.preset_from_spec("bump:1,2")


# --- initial curvature -------------------------------------------------------

@pytest.mark.parametrize("m,c", [(3, 1.0), (4, 2.0), (5, 0.5)])
def test_curvature_of_constant(m, c):
    mesh = hyper(m=m)
    u0 = yf.make_initial(yf.Constant(c), mesh)
    curv = yf.initial_scalar_curvature(u0)
    assert curv.values == pytest.approx(np.full(mesh.n, -m * (m - 1) / c), abs=1e-10)


def test_curvature_of_flat_static_second_order():
    worst = {}
    for n in (200, 400):
        mesh = yf.RadialMesh(yf.Background.HYPERBOLIC, 3, 0.0, 5.0, n + 1)
        u0 = yf.make_initial(yf.FlatStatic(1.0), mesh)
        worst[n] = np.abs(yf.initial_scalar_curvature(u0).values).max()
    assert worst[200] / worst[400] == pytest.approx(4.0, rel=0.3)


def test_curvature_of_punctured_sphere():
    # stereographic sphere factor has curvature m(m-1)
    for m in (3, 4):
        mesh = eucl(0.0, 6.0, 601, m=m)
        u0 = yf.make_initial(yf.PuncturedSphere(), mesh)
        curv = yf.initial_scalar_curvature(u0)
        inner = mesh.nodes <= 3.0
        assert curv.values[inner] == pytest.approx(m * (m - 1), abs=5e-3)


# --- data bounds ----------------------------------------------------------------

def test_data_bounds_constant_case():
    mesh = hyper()
    u0 = yf.make_initial(yf.Constant(1.0), mesh)
    curv = yf.initial_scalar_curvature(u0)
    b = yf.data_bounds(u0, curv)
    assert b.C0 == 1.0
    assert b.K0 == 0.0
    assert b.kappa == pytest.approx(6.0, abs=1e-9)
    assert b.eps_floor == pytest.approx(1.0 / 6.0, abs=1e-9)
    assert b.first_leg_horizon == np.inf


def test_data_bounds_direct_fields():
    mesh = hyper()
    u0 = yf.RadialField(mesh, np.full(mesh.n, 2.0))
    curv = yf.RadialField(mesh, np.full(mesh.n, -3.0))
    b = yf.data_bounds(u0, curv)
    assert b.kappa == pytest.approx(3.0)
    assert b.K0 == 0.0
    assert b.eps_floor == pytest.approx(1.0 / 3.0)


def test_data_bounds_eps_cap():
    mesh = hyper()
    u0 = yf.RadialField(mesh, np.full(mesh.n, 1.0))
    curv = yf.RadialField(mesh, np.full(mesh.n, 2.0))  # nonnegative curvature
    b = yf.data_bounds(u0, curv)
    assert b.K0 == pytest.approx(2.0)
    assert b.eps_floor == 10.0  # capped
    assert b.kappa >= b.K0


def test_data_bounds_kappa_dominates_k0():
    mesh = hyper()
    rng = np.random.default_rng(7)
    u0 = yf.RadialField(mesh, 1.0 + 0.5 * rng.random(mesh.n))
    curv = yf.RadialField(mesh, 4.0 * rng.standard_normal(mesh.n))
    b = yf.data_bounds(u0, curv)
    assert b.kappa >= b.K0
    assert b.kappa >= 6.0 / u0.values.min() - 1e-12
