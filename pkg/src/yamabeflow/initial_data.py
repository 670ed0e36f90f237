"""Preset initial conformal factors and the constants derived from them.

A run is parameterized by the initial field u0, its scalar curvature,
and the constants extracted from them: the supremum C0 of u0, the
positive part K0 of the curvature supremum (whose reciprocal bounds the
first guaranteed leg of the flow), the boundary-data scale kappa, and
the curvature floor eps_floor used by the lower curvature check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError
from . import operators
from .geometry import Background, RadialField, RadialMesh, flat_conformal_factor


@dataclass(frozen=True)
class Constant:
    """Spatially constant initial factor u0 = value (any background)."""

    value: float

    def __post_init__(self):
        if self.value <= 0.0:
            raise DomainError("Constant preset requires value > 0")

    def compatible(self, mesh: RadialMesh) -> bool:
        return True

    def evaluate(self, r: np.ndarray) -> np.ndarray:
        return np.full_like(np.asarray(r, dtype=float), self.value)


@dataclass(frozen=True)
class FlatStatic:
    """Hyperbolic-background factor with u0 * g_hyp = scale * g_eucl.

    This metric is flat, hence a static solution of the flow; it is the
    workhorse steady-state oracle.
    """

    scale: float

    def __post_init__(self):
        if self.scale <= 0.0:
            raise DomainError("FlatStatic preset requires scale > 0")

    def compatible(self, mesh: RadialMesh) -> bool:
        return mesh.background is Background.HYPERBOLIC

    def evaluate(self, r: np.ndarray) -> np.ndarray:
        return flat_conformal_factor(np.asarray(r, dtype=float), self.scale)


@dataclass(frozen=True)
class Bump:
    """Gaussian bump over a constant base (hyperbolic or Euclidean).

    The profile carries the mirror image of the bump at -center as well,
    which keeps it exactly even in r: a radial profile with nonzero slope
    at the origin is not a smooth function on the ball, and the origin
    stencil amplifies such a defect.  For the usual parameters the mirror
    term changes values by less than 1e-6.
    """

    base: float
    amplitude: float
    center: float
    width: float

    def __post_init__(self):
        if min(self.base, self.amplitude, self.center, self.width) <= 0.0:
            raise DomainError("Bump preset requires positive parameters")

    def compatible(self, mesh: RadialMesh) -> bool:
        return True

    def evaluate(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        main = np.exp(-(((r - self.center) / self.width) ** 2))
        mirror = np.exp(-(((r + self.center) / self.width) ** 2))
        return self.base + self.amplitude * (main + mirror)


@dataclass(frozen=True)
class PuncturedSphere:
    """Round-sphere factor 4/(1+r^2)^2 on a Euclidean mesh.

    Stereographic image of the unit sphere metric; its scalar curvature
    is m(m-1) and it decays like 4 r^-4, the borderline incomplete rate.
    """

    def compatible(self, mesh: RadialMesh) -> bool:
        return mesh.background is Background.EUCLIDEAN

    def evaluate(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return 4.0 / (1.0 + r * r) ** 2


@dataclass(frozen=True)
class PowerLaw:
    """Inverse-fourth-power factor scale * r^-4 on a Euclidean annulus.

    Flat (it is the inversion image of scale * g_eucl), static, and the
    canonical incomplete-for-all-time datum.  Needs r_min >= 0.1 to stay
    away from the origin singularity.
    """

    scale: float

    def __post_init__(self):
        if self.scale <= 0.0:
            raise DomainError("PowerLaw preset requires scale > 0")

    def compatible(self, mesh: RadialMesh) -> bool:
        return mesh.background is Background.EUCLIDEAN and mesh.r_min >= 0.1

    def evaluate(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return self.scale * r**-4.0


InitialPreset = Constant | FlatStatic | Bump | PuncturedSphere | PowerLaw

_PRESET_FACTORIES = {
    "constant": (Constant, 1),
    "flatstatic": (FlatStatic, 1),
    "bump": (Bump, 4),
    "puncturedsphere": (PuncturedSphere, 0),
    "powerlaw": (PowerLaw, 1),
}


def preset_from_spec(text: str) -> InitialPreset:
    """Build a preset from a CLI spec like ``bump:1,1,2,0.5``."""
    name, _, argtext = text.partition(":")
    key = name.strip().lower()
    if key not in _PRESET_FACTORIES:
        raise ConfigurationError(
            f"unknown preset '{name}' (choose from {sorted(_PRESET_FACTORIES)})"
        )
    factory, arity = _PRESET_FACTORIES[key]
    args = [a for a in argtext.split(",") if a.strip()] if argtext else []
    if len(args) != arity:
        raise ConfigurationError(f"preset '{key}' takes {arity} parameter(s), got {len(args)}")
    try:
        return factory(*(float(a) for a in args))
    except ValueError as exc:
        raise ConfigurationError(f"bad parameter for preset '{key}': {exc}") from exc


def make_initial(preset: InitialPreset, mesh: RadialMesh) -> RadialField:
    """Sample a preset on a mesh, enforcing background compatibility."""
    if not preset.compatible(mesh):
        raise ConfigurationError(
            f"preset {preset!r} is not compatible with a {mesh.background.value} "
            f"mesh on [{mesh.r_min}, {mesh.r_max}]"
        )
    values = preset.evaluate(mesh.nodes)
    if np.any(values <= 0.0) or not np.all(np.isfinite(values)):
        raise ConfigurationError("initial data must be positive and finite")
    return RadialField(mesh, values)


def initial_scalar_curvature(u0: RadialField) -> RadialField:
    """Scalar curvature of u0 * g_background on the full closed domain."""
    return RadialField(u0.mesh, operators.scalar_curvature(u0))


@dataclass(frozen=True)
class DataBounds:
    """Run constants extracted from the initial data.

    C0 = sup u0; K0 = positive part of sup R; kappa bounds both |R| and
    m(m-1)/u0 over the closed domain; eps_floor is the reciprocal of the
    curvature infimum magnitude (capped), so R >= -1/eps_floor initially.
    """

    C0: float
    K0: float
    kappa: float
    eps_floor: float

    def __post_init__(self):
        if self.C0 <= 0.0 or self.kappa <= 0.0 or self.K0 < 0.0 or self.eps_floor <= 0.0:
            raise ConfigurationError("invalid data bounds")
        if self.kappa < self.K0:
            raise ConfigurationError("kappa must dominate K0")

    @property
    def first_leg_horizon(self) -> float:
        """1/K0, the guaranteed existence time of the first solve leg."""
        return np.inf if self.K0 == 0.0 else 1.0 / self.K0


def data_bounds(u0: RadialField, curvature: RadialField, eps_cap: float = 10.0) -> DataBounds:
    """Extract (C0, K0, kappa, eps_floor) from the initial data.

    kappa is the max over all nodes of max(|R|, m(m-1)/u0), taken on the
    closed domain.  eps_floor = 1 / max(1e-12, -min R), capped at eps_cap.
    """
    if u0.mesh is not curvature.mesh and not u0.mesh.same_grid(curvature.mesh):
        raise ConfigurationError("u0 and curvature live on different meshes")
    m = u0.mesh.m
    r_vals = curvature.values
    c0 = u0.max()
    k0 = max(0.0, float(r_vals.max()))
    kappa = float(np.maximum(np.abs(r_vals), m * (m - 1) / u0.values).max())
    eps_floor = min(eps_cap, 1.0 / max(1e-12, -float(r_vals.min())))
    return DataBounds(C0=c0, K0=k0, kappa=kappa, eps_floor=eps_floor)
