"""Error norms, convergence tables, and maximum-principle verification.

The discrete norms are defined on uniform square meshes only: the L2 norm
sums squared midpoint errors over every edge (boundary included) and the
H1 norm sums squared errors of the per-element difference quotients
against the exact gradient at element centers, both scaled by h.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .assembly import AssemblyConfig, ProblemSpec, assemble
from .errors import NonUniformMesh
from .mesh import ElementGeom, TensorMesh, element_arrays, enumerate_dofs
from .problems import mesh_for
from .solver import Solution, solve

#: Errors at or below this floor are treated as exact reproduction and
#: produce no convergence rate (printed as "-").
EXACT_FLOOR = 1e-12

#: Absolute slack absorbing solver residual in maximum-principle checks.
DMP_SLACK = 1e-12


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    l2_error: float
    l2_rate: float | None
    h1_error: float
    h1_rate: float | None


@dataclass(frozen=True)
class DmpReport:
    interior_max: float
    boundary_max: float
    clipped_boundary_max: float
    c_nonneg: bool
    satisfied: bool
    margin: float


@dataclass(frozen=True)
class KappaConditionReport:
    """Per-element slacks of the stabilization-parameter condition.

    With eta = kappa*|T| / (2h(hx+hy)) and rhs_bound = C0*|beta|_inf*h +
    C1*|c|_inf*h^2, the three slacks are eta - rhs_bound,
    alpha_min*hy/hx - eta - rhs_bound and alpha_min*hx/hy - eta - rhs_bound;
    the aspect test requires sigma = hx/hy in [0.5, 2].
    """

    eta: np.ndarray
    slack1: np.ndarray
    slack2: np.ndarray
    slack3: np.ndarray
    aspect_ok: np.ndarray
    all_ok: bool


def _values_of(solution):
    return solution.values if isinstance(solution, Solution) else np.asarray(solution)


def _uniform_h(mesh: TensorMesh) -> float:
    if not mesh.is_uniform:
        raise NonUniformMesh("discrete norms are defined on uniform square meshes")
    return float(mesh.dx[0])


def discrete_l2_error(solution, mesh: TensorMesh, u_exact) -> float:
    """h * sqrt(sum over all edge midpoints of |u_b - u|^2)."""
    h = _uniform_h(mesh)
    dm = enumerate_dofs(mesh)
    vals = _values_of(solution)
    diff = vals - np.asarray(u_exact(dm.midpoints[:, 0], dm.midpoints[:, 1]))
    return float(h * np.sqrt(np.sum(diff * diff)))


def discrete_h1_error(solution, mesh: TensorMesh, grad_exact) -> float:
    """h * sqrt(sum over elements of squared difference-quotient errors)."""
    h = _uniform_h(mesh)
    vals = _values_of(solution)
    hx, hy, cx, cy, conn = element_arrays(mesh)
    gx_exact, gy_exact = grad_exact(cx, cy)
    qx = (vals[conn[:, 1]] - vals[conn[:, 0]]) / hx - np.asarray(gx_exact)
    qy = (vals[conn[:, 3]] - vals[conn[:, 2]]) / hy - np.asarray(gy_exact)
    return float(h * np.sqrt(np.sum(qx * qx) + np.sum(qy * qy)))


def solve_problem(problem: ProblemSpec, n: int, kappa: float, *,
                  bc_mode="eliminate", qb_rule="midpoint",
                  penalty_weight=1e10, solve_config=None):
    """Assemble and solve ``problem`` at resolution n (h = 1/n).

    Returns (mesh, system, solution).
    """
    mesh = mesh_for(problem, n)
    config = AssemblyConfig(
        kappa=kappa, bc_mode=bc_mode, penalty_weight=penalty_weight, qb_rule=qb_rule
    )
    system = assemble(mesh, problem, config)
    return mesh, system, solve(system, solve_config)


def _rate(prev_err, err, prev_n, n):
    if prev_err is None or prev_err <= EXACT_FLOOR or err <= EXACT_FLOOR:
        return None
    return math.log(prev_err / err) / math.log(n / prev_n)


def _thread_map(fn, items):
    workers = int(os.environ.get("SWG_THREADS", "1"))
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def convergence_table(problem: ProblemSpec, kappa: float, ns, *,
                      bc_mode="eliminate", qb_rule="midpoint",
                      penalty_weight=1e10, solve_config=None,
                      solver_fn=None) -> list:
    """One solve per resolution; rates from successive error ratios.

    ``solver_fn(problem, n)`` may replace the weak Galerkin pipeline (the
    finite-difference path uses this); it must return (mesh, solution).
    """
    ns = list(ns)
    if any(n < 2 for n in ns) or any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError(f"resolutions must be increasing and >= 2, got {ns}")
    if problem.exact is None or problem.exact_grad is None:
        raise ValueError(f"problem {problem.name!r} has no exact solution")

    def run(n):
        if solver_fn is not None:
            mesh, sol = solver_fn(problem, n)
        else:
            mesh, _, sol = solve_problem(
                problem, n, kappa,
                bc_mode=bc_mode, qb_rule=qb_rule,
                penalty_weight=penalty_weight, solve_config=solve_config,
            )
        return (
            discrete_l2_error(sol, mesh, problem.exact),
            discrete_h1_error(sol, mesh, problem.exact_grad),
        )

    errors = _thread_map(run, ns)
    rows = []
    prev = (None, None, None)
    for n, (l2, h1) in zip(ns, errors):
        rows.append(
            ConvergenceRow(
                n=n,
                l2_error=l2,
                l2_rate=_rate(prev[0], l2, prev[2], n),
                h1_error=h1,
                h1_rate=_rate(prev[1], h1, prev[2], n),
            )
        )
        prev = (l2, h1, n)
    return rows


def dmp_check(solution, mesh: TensorMesh, c_nonneg: bool) -> DmpReport:
    """Compare the interior midpoint maximum against the boundary bound.

    The bound is the boundary maximum, clipped at zero when the reaction
    coefficient is nonnegative rather than identically zero.
    """
    dm = enumerate_dofs(mesh)
    vals = _values_of(solution)
    interior_max = float(np.max(vals[dm.interior])) if dm.interior.size else -np.inf
    boundary_max = float(np.max(vals[dm.boundary]))
    clipped = max(boundary_max, 0.0)
    bound = clipped if c_nonneg else boundary_max
    return DmpReport(
        interior_max=interior_max,
        boundary_max=boundary_max,
        clipped_boundary_max=clipped,
        c_nonneg=c_nonneg,
        satisfied=bool(interior_max <= bound + DMP_SLACK),
        margin=float(bound - interior_max),
    )


def split_pos_neg(v):
    """Componentwise split v = v_plus + v_minus with v_plus >= 0 >= v_minus."""
    v = np.asarray(v, dtype=float)
    return np.clip(v, 0.0, None), np.clip(v, None, 0.0)


def sign_inequality_value(geom: ElementGeom, kappa, h_global, problem: ProblemSpec, v) -> float:
    """kappa*S(v-, v+) + a(v-, v+) + b(v-, v+) + c(v-, v+) on one element.

    Nonnegative whenever the element satisfies the stabilization-parameter
    condition (see :func:`kappa_condition`).
    """
    v_plus, v_minus = split_pos_neg(v)
    c_val = float(problem.c(geom.center[0], geom.center[1]))
    op = (
        kappa * kernels.stabilizer_matrix(geom, h_global)
        + kernels.diffusion_matrix(geom, problem.alpha)
        + kernels.convection_matrix(geom, problem.beta)
        + kernels.reaction_matrix(geom, c_val)
    )
    # rows are test functions, columns trial: B(v-, v+) = v+^T Op v-
    return float(v_plus @ op @ v_minus)


def kappa_condition(mesh: TensorMesh, problem: ProblemSpec, kappa: float,
                    C0: float = 1.0, C1: float = 1.0,
                    h: float | None = None) -> KappaConditionReport:
    """Evaluate the per-element stabilization condition and aspect test.

    ``h`` defaults to the meshsize the stabilizer actually uses
    (max element extent); passing 2|T|/(hx+hy) instead reproduces the
    square-element reduction kappa <= 4*alpha*min(sigma, 1/sigma) when
    beta and c vanish.
    """
    hx, hy, cx, cy, _ = element_arrays(mesh)
    h_eff = mesh.h if h is None else float(h)
    area = hx * hy

    qx = cx[:, None] + 0.5 * hx[:, None] * kernels._GAUSS_SX[None, :]
    qy = cy[:, None] + 0.5 * hy[:, None] * kernels._GAUSS_SY[None, :]
    a11, a22 = problem.alpha(qx, qy)
    a11 = np.broadcast_to(np.asarray(a11, dtype=float), qx.shape)
    a22 = np.broadcast_to(np.asarray(a22, dtype=float), qx.shape)
    alpha_min = np.minimum(a11.min(axis=1), a22.min(axis=1))

    b1, b2 = problem.beta(qx, qy)
    beta_inf = max(
        float(np.max(np.abs(np.broadcast_to(np.asarray(b1, dtype=float), qx.shape)))),
        float(np.max(np.abs(np.broadcast_to(np.asarray(b2, dtype=float), qx.shape)))),
    )
    c_inf = float(np.max(np.abs(np.broadcast_to(
        np.asarray(problem.c(cx, cy), dtype=float), cx.shape
    ))))

    rhs_bound = C0 * beta_inf * h_eff + C1 * c_inf * h_eff * h_eff
    eta = kappa * area / (2.0 * h_eff * (hx + hy))
    slack1 = eta - rhs_bound
    slack2 = alpha_min * hy / hx - eta - rhs_bound
    slack3 = alpha_min * hx / hy - eta - rhs_bound
    sigma = hx / hy
    aspect_ok = (sigma >= 0.5) & (sigma <= 2.0)
    all_ok = bool(
        np.all(slack1 >= 0)
        and np.all(slack2 >= 0)
        and np.all(slack3 >= 0)
        and np.all(aspect_ok)
    )
    return KappaConditionReport(
        eta=eta, slack1=slack1, slack2=slack2, slack3=slack3,
        aspect_ok=aspect_ok, all_ok=all_ok,
    )


def f_nonpositive(problem: ProblemSpec, mesh: TensorMesh) -> bool:
    """True when f <= 0 at every midpoint and element center the load uses."""
    dm = enumerate_dofs(mesh)
    hx, hy, cx, cy, _ = element_arrays(mesh)
    f_mid = np.asarray(problem.f(dm.midpoints[:, 0], dm.midpoints[:, 1]))
    f_cen = np.asarray(problem.f(cx, cy))
    return bool(np.all(f_mid <= 0) and np.all(f_cen <= 0))
