"""Second-order finite-difference operators on a RadialMesh.

The radial Laplacian lap u = u_rr + c(r) u_r (c = (m-1)coth r or (m-1)/r)
is discretized in finite-volume form,

    lap u |_i  ~  [ W_{i+1/2} (u_{i+1}-u_i) - W_{i-1/2} (u_i-u_{i-1}) ]
                  / (dr^2 Vbar_i),

with face weights W = sinh^(m-1) r (hyperbolic) or r^(m-1) (Euclidean)
and Vbar_i the exact average of the same density over the cell around
node i (a 5-point Gauss rule; positive, no cancellation).  The cell
average rather than the nodal value is what keeps the stencil consistent
at the first node beside the origin, where the density varies by O(1)
across one cell.  The flux form also keeps all off-diagonal entries
nonnegative in every dimension, so implicit steps built from it are
monotone; a plain central discretization of c(r) u_r loses that property
next to the origin.

An origin node (r = 0) uses the even-symmetry limit lap u(0) = m u_rr(0);
outer (and inner, for annuli) boundary nodes use one-sided second-order
stencils, written in pure difference form so constants map to exact zero.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidFieldError
from .geometry import Background, RadialField, RadialMesh, laplacian_coefficient


def volume_weight(r, mesh: RadialMesh):
    """Radial volume density: sinh^(m-1) r (hyperbolic) or r^(m-1) (Euclidean)."""
    r = np.asarray(r, dtype=float)
    if mesh.background is Background.HYPERBOLIC:
        return np.sinh(r) ** (mesh.m - 1)
    return r ** (mesh.m - 1)


# 5-point Gauss-Legendre rule on [-1, 1]; exact through degree 9, so the
# cell averages of r^(m-1) are exact for every shipped dimension
_GAUSS_X = np.array(
    [-0.906179845938664, -0.5384693101056831, 0.0, 0.5384693101056831, 0.906179845938664]
)
_GAUSS_W = np.array(
    [
        0.23692688505618908,
        0.47862867049936647,
        0.5688888888888889,
        0.47862867049936647,
        0.23692688505618908,
    ]
)


def cell_average_weight(mesh: RadialMesh) -> np.ndarray:
    """Average of the volume density over each interior node's cell."""
    r = mesh.nodes[1:-1]
    half = 0.5 * mesh.dr
    samples = r[:, None] + half * _GAUSS_X[None, :]
    return 0.5 * (volume_weight(samples, mesh) @ _GAUSS_W)


def laplacian_bands(mesh: RadialMesh):
    """Tridiagonal stencil (lower, diag, upper) of the radial Laplacian.

    Rows are valid at indices 1..n-2 and, when the mesh starts at the
    origin, also at index 0 (regularized stencil).  Boundary rows used as
    Dirichlet rows by the solver are left as zeros.
    """
    n, dr = mesh.n, mesh.dr
    r = mesh.nodes
    lower = np.zeros(n)
    diag = np.zeros(n)
    upper = np.zeros(n)

    w_minus = volume_weight(r[1:-1] - 0.5 * dr, mesh)
    w_plus = volume_weight(r[1:-1] + 0.5 * dr, mesh)
    v_bar = cell_average_weight(mesh)
    lower[1:-1] = w_minus / (dr * dr * v_bar)
    upper[1:-1] = w_plus / (dr * dr * v_bar)
    diag[1:-1] = -(lower[1:-1] + upper[1:-1])

    if mesh.has_origin:
        # lap u(0) = m * u_rr(0) with the even ghost u(-dr) = u(dr)
        upper[0] = 2.0 * mesh.m / (dr * dr)
        diag[0] = -upper[0]
    return lower, diag, upper


def apply_laplacian(values: np.ndarray, mesh: RadialMesh) -> np.ndarray:
    """Radial Laplacian on all nodes, one-sided at Dirichlet boundaries."""
    u = np.asarray(values, dtype=float)
    n, dr = mesh.n, mesh.dr
    lower, diag, upper = laplacian_bands(mesh)
    out = np.empty(n)
    # interior rows in difference form so constants yield exact zeros
    out[1:-1] = upper[1:-1] * (u[2:] - u[1:-1]) - lower[1:-1] * (u[1:-1] - u[:-2])
    if mesh.has_origin:
        out[0] = upper[0] * (u[1] - u[0])
    else:
        out[0] = _one_sided_laplacian(u, mesh, inner=True)
    out[-1] = _one_sided_laplacian(u, mesh, inner=False)
    return out


def _one_sided_laplacian(u: np.ndarray, mesh: RadialMesh, inner: bool) -> float:
    """Second-order one-sided u_rr + c(r) u_r at a boundary node."""
    dr = mesh.dr
    if inner:
        a, b, c, d = u[0], u[1], u[2], u[3]
        r_b = mesh.nodes[0]
        sign = -1.0
    else:
        a, b, c, d = u[-1], u[-2], u[-3], u[-4]
        r_b = mesh.nodes[-1]
        sign = 1.0
    # second difference (1,-2,1) at the adjacent node plus a third
    # difference gives the (2,-5,4,-1) one-sided u_rr stencil
    d2 = (a - b) - (b - c)
    d3 = (a - b) - 2.0 * (b - c) + (c - d)
    u_rr = (d2 + d3) / (dr * dr)
    u_r = sign * (2.0 * (a - b) + d2) / (2.0 * dr)
    coeff = laplacian_coefficient(r_b, mesh.m, mesh.background)
    return u_rr + coeff * u_r


def radial_derivative(values: np.ndarray, mesh: RadialMesh) -> np.ndarray:
    """Radial derivative: centered inside, one-sided second order at ends.

    At an origin node the derivative of an even field vanishes.
    """
    u = np.asarray(values, dtype=float)
    dr = mesh.dr
    out = np.empty(mesh.n)
    out[1:-1] = (u[2:] - u[:-2]) / (2.0 * dr)
    if mesh.has_origin:
        out[0] = 0.0
    else:
        out[0] = -(2.0 * (u[0] - u[1]) + (u[0] - u[1]) - (u[1] - u[2])) / (2.0 * dr)
    out[-1] = (2.0 * (u[-1] - u[-2]) + (u[-1] - u[-2]) - (u[-2] - u[-3])) / (2.0 * dr)
    return out


def scalar_curvature(u: RadialField | np.ndarray, mesh: RadialMesh | None = None) -> np.ndarray:
    """Scalar curvature of the metric u * g_background.

    With eta = (m-2)/4 and U = u^eta,

        hyperbolic:  R = -(m-1) u^(-eta-1) ( lap U / eta + m U )
        Euclidean:   R = -(m-1) u^(-eta-1) ( lap U / eta )

    evaluated with the discrete Laplacian (one-sided at boundaries, so the
    field is defined on the full closed domain).
    """
    if isinstance(u, RadialField):
        mesh = u.mesh
        vals = u.values
    else:
        vals = np.asarray(u, dtype=float)
    if np.any(vals <= 0.0):
        raise InvalidFieldError("scalar curvature requires u > 0")
    m = mesh.m
    eta = (m - 2) / 4.0
    big_u = vals**eta
    lap = apply_laplacian(big_u, mesh)
    bracket = lap / eta
    if mesh.background is Background.HYPERBOLIC:
        bracket = bracket + m * big_u
    return -(m - 1) * vals ** (-eta - 1.0) * bracket


def conformal_laplacian(f: np.ndarray, u: np.ndarray, mesh: RadialMesh) -> np.ndarray:
    """Laplacian of f in the conformal metric u * g_background.

    Uses the identity lap_g f = u^-1 ( lap f + (m-2)/2 <grad log u, grad f> )
    for g = u * g_background in dimension m; returned on all nodes, with
    boundary values from one-sided stencils.
    """
    lap = apply_laplacian(f, mesh)
    du = radial_derivative(u, mesh)
    df = radial_derivative(f, mesh)
    m = mesh.m
    return (lap + 0.5 * (m - 2) * (du / u) * df) / u
