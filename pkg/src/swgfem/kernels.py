"""Element-local kernels of the simplified weak Galerkin discretization.

Local vectors hold one value per edge in the fixed ordering (left, right,
bottom, top).  On a rectangle the weak gradient of an edge-value vector is
the constant

    grad_w v = ((v2 - v1)/hx, (v4 - v3)/hy),

and the linear extension fitted to the edge values by the moment
conditions has the closed form

    s(v)(x, y) = gamma0 + gamma1*(x - xT) + gamma2*(y - yT),
    gamma0 = (hy*(v1 + v2) + hx*(v3 + v4)) / (2*(hx + hy)),
    gamma1 = (v2 - v1)/hx,   gamma2 = (v4 - v3)/hy.

All variable-coefficient integrals use a fixed 2x2 tensor Gauss rule,
exact for integrands of coordinate degree <= 3, which covers every
polynomial pairing of weak gradients with linear extensions.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NegativeReaction, NonPositiveDiffusion, NonPositiveMeshsize
from .mesh import ElementGeom

#: Sign pattern of the stabilizer's rank-1 direction (left, right, bottom, top).
STAB_SIGNS = np.array([1.0, 1.0, -1.0, -1.0])

_GAUSS_OFFSET = 1.0 / np.sqrt(3.0)
_GAUSS_SX = np.array([-1.0, 1.0, -1.0, 1.0]) * _GAUSS_OFFSET
_GAUSS_SY = np.array([-1.0, -1.0, 1.0, 1.0]) * _GAUSS_OFFSET


@dataclass(frozen=True)
class ExtensionCoeffs:
    """Coefficients of a linear extension about the element center."""

    gamma0: float
    gamma1: float
    gamma2: float

    def evaluate(self, geom: ElementGeom, x, y):
        cx, cy = geom.center
        return self.gamma0 + self.gamma1 * (np.asarray(x) - cx) + self.gamma2 * (
            np.asarray(y) - cy
        )


def gauss_points(geom: ElementGeom):
    """2x2 tensor Gauss rule: points (4, 2) and weights summing to |T|."""
    cx, cy = geom.center
    pts = np.column_stack(
        [cx + 0.5 * geom.hx * _GAUSS_SX, cy + 0.5 * geom.hy * _GAUSS_SY]
    )
    w = np.full(4, 0.25 * geom.area)
    return pts, w


def weak_gradient(geom: ElementGeom, v):
    """Constant weak gradient of the edge-value vector ``v``."""
    v = np.asarray(v, dtype=float)
    return (v[1] - v[0]) / geom.hx, (v[3] - v[2]) / geom.hy


def extension_coeffs(geom: ElementGeom, v) -> ExtensionCoeffs:
    """Linear extension of ``v``; reproduces midpoint-sampled linears exactly."""
    v = np.asarray(v, dtype=float)
    denom = 2.0 * (geom.hx + geom.hy)
    return ExtensionCoeffs(
        gamma0=(geom.hy * (v[0] + v[1]) + geom.hx * (v[2] + v[3])) / denom,
        gamma1=(v[1] - v[0]) / geom.hx,
        gamma2=(v[3] - v[2]) / geom.hy,
    )


def midpoint_defects(geom: ElementGeom, v):
    """Vector of v_i - s(v)(M_i) over the four edge midpoints.

    The defect is +hx*D/(2(hx+hy)) on the vertical edges and
    -hy*D/(2(hx+hy)) on the horizontal ones, with D = v1+v2-v3-v4.
    """
    v = np.asarray(v, dtype=float)
    d = (v[0] + v[1] - v[2] - v[3]) / (2.0 * (geom.hx + geom.hy))
    return np.array([geom.hx * d, geom.hx * d, -geom.hy * d, -geom.hy * d])


def basis_extensions(geom: ElementGeom):
    """Linear extensions of the four edge indicator functions."""
    g_v = geom.hy / (2.0 * (geom.hx + geom.hy))
    g_h = geom.hx / (2.0 * (geom.hx + geom.hy))
    return (
        ExtensionCoeffs(g_v, -1.0 / geom.hx, 0.0),
        ExtensionCoeffs(g_v, +1.0 / geom.hx, 0.0),
        ExtensionCoeffs(g_h, 0.0, -1.0 / geom.hy),
        ExtensionCoeffs(g_h, 0.0, +1.0 / geom.hy),
    )


def _basis_values(geom: ElementGeom, x, y):
    """Values of the four basis extensions at points, shape (4, npts)."""
    cx, cy = geom.center
    xi = (np.asarray(x, dtype=float) - cx) / geom.hx
    eta = (np.asarray(y, dtype=float) - cy) / geom.hy
    g_v = geom.hy / (2.0 * (geom.hx + geom.hy))
    g_h = geom.hx / (2.0 * (geom.hx + geom.hy))
    return np.stack([g_v - xi, g_v + xi, g_h - eta, g_h + eta])


def _weak_gradient_basis(geom: ElementGeom):
    gx = np.array([-1.0 / geom.hx, 1.0 / geom.hx, 0.0, 0.0])
    gy = np.array([0.0, 0.0, -1.0 / geom.hy, 1.0 / geom.hy])
    return gx, gy


def stabilizer_matrix(geom: ElementGeom, h_global: float):
    """Rank-1 stabilizer matrix mu * d d^T with d = (1, 1, -1, -1).

    mu = hx*hy / (2*h_global*(hx+hy)); on a square with h_global = hx this
    is exactly 1/4.
    """
    if h_global <= 0:
        raise NonPositiveMeshsize(f"h_global must be positive, got {h_global}")
    mu = geom.hx * geom.hy / (2.0 * h_global * (geom.hx + geom.hy))
    return mu * np.outer(STAB_SIGNS, STAB_SIGNS)


def diffusion_matrix(geom: ElementGeom, alpha):
    """Diffusion matrix; entry (i, j) integrates grad_w phi_j . alpha grad_w phi_i.

    ``alpha(x, y)`` returns the diagonal pair (a11, a22); both components
    must be positive at every quadrature point.
    """
    pts, w = gauss_points(geom)
    a11, a22 = alpha(pts[:, 0], pts[:, 1])
    a11 = np.broadcast_to(np.asarray(a11, dtype=float), (4,))
    a22 = np.broadcast_to(np.asarray(a22, dtype=float), (4,))
    if min(a11.min(), a22.min()) <= 0:
        raise NonPositiveDiffusion(
            "diffusion tensor not positive at a quadrature point"
        )
    gx, gy = _weak_gradient_basis(geom)
    return float(w @ a11) * np.outer(gx, gx) + float(w @ a22) * np.outer(gy, gy)


def convection_matrix(geom: ElementGeom, beta):
    """Convection matrix; entry (i, j) integrates (beta . grad_w phi_j) s(phi_i)."""
    pts, w = gauss_points(geom)
    b1, b2 = beta(pts[:, 0], pts[:, 1])
    b1 = np.broadcast_to(np.asarray(b1, dtype=float), (4,))
    b2 = np.broadcast_to(np.asarray(b2, dtype=float), (4,))
    gx, gy = _weak_gradient_basis(geom)
    s = _basis_values(geom, pts[:, 0], pts[:, 1])  # (4 basis, 4 pts)
    flux = np.outer(gx, b1) + np.outer(gy, b2)  # (4 trial, 4 pts)
    return (s * w) @ flux.T


def reaction_matrix(geom: ElementGeom, c_value: float):
    """Reaction mass matrix c * (s(phi_i), s(phi_j)); requires c >= 0."""
    if c_value < 0:
        raise NegativeReaction(f"reaction coefficient must be >= 0, got {c_value}")
    pts, w = gauss_points(geom)
    s = _basis_values(geom, pts[:, 0], pts[:, 1])
    return c_value * ((s * w) @ s.T)


def load_vector(geom: ElementGeom, f):
    """Quadrature load (f, s(phi_i)) with midpoint/Simpson product accuracy.

    entry_i = |T|/6 * f(M_i) + |T|/(6(1+sigma)) * w_i * f(center), where
    sigma = hx/hy and w = (2-sigma, 2-sigma, 2*sigma-1, 2*sigma-1).  For
    constant f the entries sum to |T| exactly.
    """
    mids = geom.edge_midpoints()
    fm = np.asarray(f(mids[:, 0], mids[:, 1]), dtype=float)
    fm = np.broadcast_to(fm, (4,))
    fc = float(f(geom.center[0], geom.center[1]))
    sigma = geom.sigma
    wgt = np.array([2.0 - sigma, 2.0 - sigma, 2.0 * sigma - 1.0, 2.0 * sigma - 1.0])
    return geom.area / 6.0 * fm + geom.area / (6.0 * (1.0 + sigma)) * wgt * fc


def local_operator(geom: ElementGeom, kappa, h_global, alpha, beta, c_value):
    """Full local matrix kappa*S + A + B + C used by the scheme."""
    return (
        kappa * stabilizer_matrix(geom, h_global)
        + diffusion_matrix(geom, alpha)
        + convection_matrix(geom, beta)
        + reaction_matrix(geom, c_value)
    )
