"""Explicit Dirichlet boundary data for the bounded-domain flow.

The boundary curve is assembled from the initial value at the outer
radius, the relative initial velocity against the reference big-bang
flow m(m-1)t * g_hyp, and a saturating cubic ramp that switches that
velocity off by time 1/kappa:

    phi(t) = u0(l) + m(m-1) t + v(l) * ramp(kappa t) / kappa.

By construction phi matches the initial data to first order at t = 0,
stays inside the sandwich u0/3 + m(m-1)t <= phi <= 5 u0/3 + m(m-1)t,
and its logarithmic slope -phi'/phi (the scalar curvature the flow
attains on the boundary) obeys two-sided curvature bounds.  All slopes
are evaluated analytically; differencing would blur exact identities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError
from .geometry import RadialField
from .initial_data import DataBounds


def ramp(s):
    """Saturating cubic ramp: 1/3 + (s-1)^3/3 on [0, 1], then constant 1/3.

    Starts at 0 with unit slope and flattens at 1/3; values lie in
    [0, 1/3] for all s >= 0.
    """
    s = np.asarray(s, dtype=float)
    if np.any(s < 0.0):
        raise DomainError("ramp requires s >= 0")
    out = np.where(s < 1.0, (1.0 + (s - 1.0) ** 3) / 3.0, 1.0 / 3.0)
    return out if out.ndim else float(out)


def ramp_slope(s):
    """Derivative of :func:`ramp`: (s-1)^2 on [0, 1], zero afterwards."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0.0):
        raise DomainError("ramp_slope requires s >= 0")
    out = np.where(s < 1.0, (s - 1.0) ** 2, 0.0)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class BoundaryProfile:
    """Dirichlet data at the outer radius of a bounded-domain solve.

    Attributes
    ----------
    u0_boundary : float
        Initial conformal factor at the boundary, > 0.
    v_boundary : float
        Relative initial velocity -u0 R0 - m(m-1) at the boundary.
    kappa : float
        Scale constant dominating |R0| and m(m-1)/u0 over the domain.
    m : int
        Dimension.
    """

    u0_boundary: float
    v_boundary: float
    kappa: float
    m: int

    def __post_init__(self):
        if self.u0_boundary <= 0.0 or self.kappa <= 0.0:
            raise ConfigurationError("boundary profile requires u0 > 0 and kappa > 0")
        # the construction guarantees |v| <= 2 u0 kappa; allow rounding slack
        if abs(self.v_boundary) > 2.0 * self.u0_boundary * self.kappa * (1.0 + 1e-12):
            raise ConfigurationError(
                "relative velocity exceeds 2 * u0 * kappa; kappa was not "
                "computed over the closed domain"
            )

    def value(self, t):
        """phi(t) = u0 + m(m-1) t + v * ramp(kappa t) / kappa."""
        t = np.asarray(t, dtype=float)
        mm = self.m * (self.m - 1)
        bump = np.asarray(ramp(self.kappa * t))
        out = self.u0_boundary + mm * t + self.v_boundary * bump / self.kappa
        return out if out.ndim else float(out)

    __call__ = value

    def rate(self, t):
        """Analytic slope phi'(t) = m(m-1) + v * ramp_slope(kappa t)."""
        t = np.asarray(t, dtype=float)
        slope = np.asarray(ramp_slope(self.kappa * t))
        out = self.m * (self.m - 1) + self.v_boundary * slope
        return out if out.ndim else float(out)

    def curvature(self, t):
        """Scalar curvature -phi'(t)/phi(t) the flow attains on the boundary."""
        phi = self.value(t)
        if np.any(np.asarray(phi) <= 0.0):
            raise ConfigurationError("boundary value must stay positive")
        out = -np.asarray(self.rate(t)) / np.asarray(phi)
        return out if out.ndim else float(out)


def profile_from_data(
    u0: RadialField, curvature: RadialField, bounds: DataBounds
) -> BoundaryProfile:
    """Assemble the boundary profile from initial data on a mesh.

    The velocity is evaluated at the outer node; kappa comes from the
    global bounds so the |v| <= 2 u0 kappa estimate holds.
    """
    m = u0.mesh.m
    u_b = float(u0.values[-1])
    r_b = float(curvature.values[-1])
    v_b = -u_b * r_b - m * (m - 1)
    return BoundaryProfile(u0_boundary=u_b, v_boundary=v_b, kappa=bounds.kappa, m=m)


def frozen_boundary(value: float):
    """Constant-in-time Dirichlet curve (static runs, Euclidean annuli)."""
    if value <= 0.0:
        raise ConfigurationError("frozen boundary value must be positive")

    def phi(t):
        t = np.asarray(t, dtype=float)
        out = np.full_like(t, float(value))
        return out if out.ndim else float(out)

    return phi


@dataclass(frozen=True)
class ProfileBoundsReport:
    """Worst slacks of the four boundary-curve inequalities on a t grid.

    Slacks are >= 0 when the inequality holds; `passed` allows a
    tolerance of -1e-12 for float cancellation.
    """

    sandwich_lower: float
    sandwich_upper: float
    curvature_lower: float
    curvature_upper: float
    tolerance: float = 1e-12

    @property
    def passed(self) -> bool:
        worst = min(
            self.sandwich_lower,
            self.sandwich_upper,
            self.curvature_lower,
            self.curvature_upper,
        )
        return bool(worst >= -self.tolerance)


def check_profile_bounds(
    profile: BoundaryProfile, K0: float, eps: float, t_grid
) -> ProfileBoundsReport:
    """Verify the boundary-curve inequalities on a time grid.

    Checks the two-sided sandwich around u0/3 resp. 5 u0/3 plus m(m-1)t,
    the lower curvature bound -phi'/phi >= -1/(t+eps), and the upper
    bound -phi'/phi <= K0/(1-K0 t) (interpreted as 0 when K0 = 0; grid
    points at or past 1/K0 are excluded from the upper check).
    """
    t = np.asarray(t_grid, dtype=float)
    if np.any(t < 0.0):
        raise DomainError("t grid must be nonnegative")
    mm = profile.m * (profile.m - 1)
    phi = np.asarray(profile.value(t))
    rate = np.asarray(profile.rate(t))
    curv = -rate / phi

    lower_env = profile.u0_boundary / 3.0 + mm * t
    upper_env = 5.0 * profile.u0_boundary / 3.0 + mm * t
    s_lo = float((phi - lower_env).min())
    s_hi = float((upper_env - phi).min())

    c_lo = float((curv + 1.0 / (t + eps)).min())
    if K0 > 0.0:
        mask = t < 1.0 / K0
        c_hi = float((K0 / (1.0 - K0 * t[mask]) - curv[mask]).min()) if mask.any() else np.inf
    else:
        c_hi = float((-curv).min())
    return ProfileBoundsReport(
        sandwich_lower=s_lo, sandwich_upper=s_hi, curvature_lower=c_lo, curvature_upper=c_hi
    )


def largest_admissible_eps(profile: BoundaryProfile, t_grid, cap: float = 10.0) -> float:
    """Largest eps with phi - (t+eps) phi' >= 0 on the grid (capped).

    This is the widest curvature floor -1/(t+eps) the boundary curve
    supports; where phi' <= 0 the constraint is vacuous.
    """
    t = np.asarray(t_grid, dtype=float)
    phi = np.asarray(profile.value(t))
    rate = np.asarray(profile.rate(t))
    active = rate > 0.0
    if not active.any():
        return cap
    return float(min(cap, (phi[active] / rate[active] - t[active]).min()))
