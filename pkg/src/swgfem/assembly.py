"""Global system assembly over edge midpoints with Dirichlet data.

The equation attached to an interior edge is the sum of the local-operator
rows contributed by its (at most two) adjacent elements, so every row
couples at most 7 unknowns.  Dirichlet data enters either by elimination
(default: boundary unknowns substituted and moved to the right-hand side)
or by a large diagonal penalty.

Boundary values are per-edge averages of g.  Two quadrature rules are
available: ``midpoint`` (the default; reproduces midpoint-sampled
quadratics exactly at kappa = 4) and the more accurate ``simpson``.
"""

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp

from . import kernels
from .errors import NonPositiveDiffusion, SingularConfig
from .mesh import DofMap, EdgeDof, TensorMesh, element_arrays, enumerate_dofs

QB_RULES = ("midpoint", "simpson")
BC_MODES = ("eliminate", "penalty")
MIN_PENALTY_WEIGHT = 1e8


@dataclass(frozen=True)
class ProblemSpec:
    """Coefficients and data of one convection-diffusion-reaction problem.

    All callables are vectorized over numpy coordinate arrays.  ``alpha``
    returns the diagonal pair (a11, a22) of the diffusion tensor (scalar
    diffusion passes a11 = a22); off-diagonal tensors are not representable
    by construction.  ``exact``/``exact_grad`` are optional and enable
    error studies.
    """

    name: str
    domain: tuple  # (x0, x1, y0, y1)
    alpha: Callable
    beta: Callable
    c: Callable
    f: Callable
    g: Callable
    exact: Callable | None = None
    exact_grad: Callable | None = None
    alpha0: float = 0.0
    c_is_zero: bool = True
    description: str = ""

    @property
    def pure_unit_diffusion(self) -> bool:
        """True when alpha = I, beta = 0, c = 0 (sampled on a coarse grid)."""
        x0, x1, y0, y1 = self.domain
        xs = np.linspace(x0, x1, 5)
        ys = np.linspace(y0, y1, 5)
        xg, yg = np.meshgrid(xs, ys)
        a11, a22 = self.alpha(xg, yg)
        b1, b2 = self.beta(xg, yg)
        cc = self.c(xg, yg)
        return bool(
            np.all(np.asarray(a11) == 1.0)
            and np.all(np.asarray(a22) == 1.0)
            and np.all(np.asarray(b1) == 0.0)
            and np.all(np.asarray(b2) == 0.0)
            and np.all(np.asarray(cc) == 0.0)
        )


@dataclass(frozen=True)
class AssemblyConfig:
    """Stabilization parameter and boundary treatment."""

    kappa: float
    bc_mode: str = "eliminate"
    penalty_weight: float = 1e10
    qb_rule: str = "midpoint"

    def __post_init__(self):
        if self.kappa <= 0:
            raise SingularConfig(f"kappa must be positive, got {self.kappa}")
        if self.bc_mode not in BC_MODES:
            raise ValueError(f"bc_mode must be one of {BC_MODES}")
        if self.qb_rule not in QB_RULES:
            raise ValueError(f"qb_rule must be one of {QB_RULES}")
        if self.bc_mode == "penalty" and self.penalty_weight < MIN_PENALTY_WEIGHT:
            raise SingularConfig(
                f"penalty weight must be >= {MIN_PENALTY_WEIGHT:g}"
            )


@dataclass(frozen=True)
class SparseSystem:
    """Assembled sparse system over the free edge dofs.

    In ``eliminate`` mode the matrix covers interior dofs only and
    ``boundary_values`` holds the imposed averages of g (aligned with
    ``dof_map.boundary``).  In ``penalty`` mode the matrix covers all dofs.
    """

    matrix: sp.csr_matrix
    rhs: np.ndarray
    dof_map: DofMap
    boundary_values: np.ndarray
    bc_mode: str
    mesh: TensorMesh

    @property
    def free_dofs(self) -> np.ndarray:
        if self.bc_mode == "eliminate":
            return self.dof_map.interior
        return np.arange(self.dof_map.count)


def edge_average(g, edge: EdgeDof, rule: str = "simpson") -> float:
    """Approximate average of ``g`` over one edge.

    ``simpson`` uses the 3-point rule (exact for cubics along the edge);
    ``midpoint`` samples g at the edge midpoint.
    """
    if rule == "midpoint":
        return float(g(edge.midpoint[0], edge.midpoint[1]))
    if rule != "simpson":
        raise ValueError(f"rule must be one of {QB_RULES}")
    (x0, y0), (x1, y1) = edge.endpoints()
    xm, ym = edge.midpoint
    return float(g(x0, y0) + 4.0 * g(xm, ym) + g(x1, y1)) / 6.0


def boundary_averages(mesh: TensorMesh, dof_map: DofMap, g, rule: str) -> np.ndarray:
    """Averages of g over all boundary edges, aligned with dof_map.boundary."""
    b = dof_map.boundary
    mx, my = dof_map.midpoints[b, 0], dof_map.midpoints[b, 1]
    if rule == "midpoint":
        return np.asarray(g(mx, my), dtype=float) + np.zeros(b.size)
    if rule != "simpson":
        raise ValueError(f"rule must be one of {QB_RULES}")
    half = 0.5 * dof_map.lengths[b]
    vert = dof_map.is_vertical[b]
    x0 = np.where(vert, mx, mx - half)
    x1 = np.where(vert, mx, mx + half)
    y0 = np.where(vert, my - half, my)
    y1 = np.where(vert, my + half, my)
    vals = (
        np.asarray(g(x0, y0), dtype=float)
        + 4.0 * np.asarray(g(mx, my), dtype=float)
        + np.asarray(g(x1, y1), dtype=float)
    ) / 6.0
    return vals + np.zeros(b.size)


def _local_matrices(mesh, problem, kappa):
    """All element-local operator matrices, shape (n_elements, 4, 4)."""
    hx, hy, cx, cy, conn = element_arrays(mesh)
    nel = hx.size
    area = hx * hy
    h = mesh.h

    # stabilizer
    mu = area / (2.0 * h * (hx + hy))
    dd = np.outer(kernels.STAB_SIGNS, kernels.STAB_SIGNS)
    local = kappa * mu[:, None, None] * dd[None, :, :]

    # quadrature points (4 per element)
    qx = cx[:, None] + 0.5 * hx[:, None] * kernels._GAUSS_SX[None, :]
    qy = cy[:, None] + 0.5 * hy[:, None] * kernels._GAUSS_SY[None, :]
    wq = 0.25 * area

    a11, a22 = problem.alpha(qx, qy)
    a11 = np.broadcast_to(np.asarray(a11, dtype=float), qx.shape)
    a22 = np.broadcast_to(np.asarray(a22, dtype=float), qx.shape)
    amin = min(a11.min(), a22.min())
    if amin < 0:
        raise NonPositiveDiffusion("diffusion tensor negative at a quadrature point")
    if amin == 0:
        # tolerate degeneracy confined to elements touching the domain boundary
        el_min = np.minimum(a11.min(axis=1), a22.min(axis=1))
        nx, ny = mesh.nx, mesh.ny
        ii = np.arange(nel) % nx
        jj = np.arange(nel) // nx
        at_boundary = (ii == 0) | (ii == nx - 1) | (jj == 0) | (jj == ny - 1)
        if np.any((el_min <= 0) & ~at_boundary):
            raise NonPositiveDiffusion(
                "diffusion tensor vanishes at an interior quadrature point"
            )
        warnings.warn(
            "diffusion tensor vanishes at boundary-adjacent quadrature points",
            RuntimeWarning,
            stacklevel=3,
        )

    gxs = np.zeros((nel, 4))
    gys = np.zeros((nel, 4))
    gxs[:, 0], gxs[:, 1] = -1.0 / hx, 1.0 / hx
    gys[:, 2], gys[:, 3] = -1.0 / hy, 1.0 / hy

    ia11 = wq * a11.sum(axis=1)
    ia22 = wq * a22.sum(axis=1)
    local += ia11[:, None, None] * gxs[:, :, None] * gxs[:, None, :]
    local += ia22[:, None, None] * gys[:, :, None] * gys[:, None, :]

    # basis extension values at quadrature points: (nel, 4 basis, 4 pts)
    gv = (hy / (2.0 * (hx + hy)))[:, None]
    gh = (hx / (2.0 * (hx + hy)))[:, None]
    xi = (qx - cx[:, None]) / hx[:, None]
    eta = (qy - cy[:, None]) / hy[:, None]
    sbas = np.stack([gv - xi, gv + xi, gh - eta, gh + eta], axis=1)

    b1, b2 = problem.beta(qx, qy)
    b1 = np.broadcast_to(np.asarray(b1, dtype=float), qx.shape)
    b2 = np.broadcast_to(np.asarray(b2, dtype=float), qx.shape)
    # flux of trial basis j at point q: (nel, 4, 4)
    flux = gxs[:, :, None] * b1[:, None, :] + gys[:, :, None] * b2[:, None, :]
    local += wq[:, None, None] * np.einsum("kiq,kjq->kij", sbas, flux)

    cval = np.asarray(problem.c(cx, cy), dtype=float)
    cval = np.broadcast_to(cval, cx.shape)
    if cval.min() < 0:
        warnings.warn(
            "reaction coefficient negative on some elements; "
            "maximum-principle guarantees do not apply",
            RuntimeWarning,
            stacklevel=3,
        )
    mass = np.einsum("kiq,kjq->kij", sbas, sbas)
    local += (wq * cval)[:, None, None] * mass

    return local, conn


def _load_entries(mesh, problem, dof_map):
    """Per-element load vectors (n_elements, 4) from the product quadrature."""
    hx, hy, cx, cy, conn = element_arrays(mesh)
    area = hx * hy
    f_mid = np.asarray(
        problem.f(dof_map.midpoints[:, 0], dof_map.midpoints[:, 1]), dtype=float
    ) + np.zeros(dof_map.count)
    fc = np.asarray(problem.f(cx, cy), dtype=float) + np.zeros(cx.size)
    sigma = hx / hy
    wgt = np.stack(
        [2.0 - sigma, 2.0 - sigma, 2.0 * sigma - 1.0, 2.0 * sigma - 1.0], axis=1
    )
    return (area / 6.0)[:, None] * f_mid[conn] + (
        area / (6.0 * (1.0 + sigma))
    )[:, None] * wgt * fc[:, None]


def assemble(mesh: TensorMesh, problem: ProblemSpec, config: AssemblyConfig) -> SparseSystem:
    """Assemble the global system for ``problem`` on ``mesh``.

    Element contributions are accumulated in a fixed row-major order, so
    single-threaded assembly is bit-reproducible.
    """
    dof_map = enumerate_dofs(mesh)
    local, conn = _local_matrices(mesh, problem, config.kappa)
    loads = _load_entries(mesh, problem, dof_map)

    count = dof_map.count
    rows = np.broadcast_to(conn[:, :, None], local.shape)
    cols = np.broadcast_to(conn[:, None, :], local.shape)
    full = sp.coo_matrix(
        (local.ravel(), (rows.ravel(), cols.ravel())), shape=(count, count)
    ).tocsr()
    rhs = np.zeros(count)
    np.add.at(rhs, conn.ravel(), loads.ravel())

    g_b = boundary_averages(mesh, dof_map, problem.g, config.qb_rule)

    if config.bc_mode == "eliminate":
        interior, boundary = dof_map.interior, dof_map.boundary
        a_ii = full[interior][:, interior].tocsr()
        rhs_free = rhs[interior] - full[interior][:, boundary] @ g_b
        return SparseSystem(a_ii, rhs_free, dof_map, g_b, "eliminate", mesh)

    weight = config.penalty_weight
    pen = sp.coo_matrix(
        (np.full(dof_map.boundary.size, weight), (dof_map.boundary, dof_map.boundary)),
        shape=(count, count),
    ).tocsr()
    rhs_pen = rhs.copy()
    rhs_pen[dof_map.boundary] += weight * g_b
    return SparseSystem(full + pen, rhs_pen, dof_map, g_b, "penalty", mesh)


def dump_matrix(system: SparseSystem, path) -> None:
    """Write the matrix in coordinate text format (row col value per line)."""
    coo = system.matrix.tocoo()
    with open(path, "w") as fh:
        for r, c, v in zip(coo.row, coo.col, coo.data):
            fh.write("%d %d %.17g\n" % (r, c, v))
