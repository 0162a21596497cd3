import numpy as np
import pytest
import scipy.sparse as sp

from swgfem.analysis import solve_problem
from swgfem.assembly import AssemblyConfig, SparseSystem, assemble
from swgfem.errors import SingularMatrix
from swgfem.mesh import enumerate_dofs, uniform_mesh
from swgfem.problems import get_problem, make_custom, mesh_for
from swgfem.solver import SolveConfig, solve


def identity_system(rhs):
    mesh = uniform_mesh(2)
    dm = enumerate_dofs(mesh)
    assert dm.interior.size == rhs.size
    return SparseSystem(
        matrix=sp.identity(rhs.size, format="csr"),
        rhs=rhs,
        dof_map=dm,
        boundary_values=np.zeros(dm.boundary.size),
        bc_mode="eliminate",
        mesh=mesh,
    )


class TestSolve:
    def test_identity(self):
        rhs = np.array([1.0, -2.0, 3.0, 0.5])
        sol = solve(identity_system(rhs))
        np.testing.assert_allclose(sol.values[identity_system(rhs).dof_map.interior], rhs)
        assert sol.iterations == 0
        assert sol.residual_norm <= 1e-14

    def test_single_cell_returns_boundary_values(self):
        problem = make_custom(f=-1.0, g=2.5)
        system = assemble(uniform_mesh(1), problem, AssemblyConfig(kappa=1.0))
        sol = solve(system)
        np.testing.assert_allclose(sol.values, 2.5)

    def test_quadratic_reproduced_to_machine_precision(self):
        # kappa = 4 reproduces the midpoint samples of u = x^2 + 2xy
        problem = get_problem("tc1")
        mesh, system, sol = solve_problem(problem, 8, 4.0)
        dm = enumerate_dofs(mesh)
        exact_mid = problem.exact(dm.midpoints[:, 0], dm.midpoints[:, 1])
        assert sol.residual_norm <= 1e-12
        assert np.max(np.abs(sol.values - exact_mid)) <= 1e-12

    @pytest.mark.parametrize("pid", ["tc1", "tc2", "tc3", "fd1", "fd2"])
    def test_direct_vs_iterative(self, pid):
        problem = get_problem(pid)
        mesh = mesh_for(problem, 16)
        system = assemble(mesh, problem, AssemblyConfig(kappa=4.0))
        direct = solve(system, SolveConfig(method="direct"))
        iterative = solve(system, SolveConfig(method="iterative", tol=1e-12))
        assert np.max(np.abs(direct.values - iterative.values)) <= 1e-10
        assert iterative.iterations > 0

    def test_posthoc_residual_contract(self):
        problem = get_problem("tc3")
        _, system, sol = solve_problem(problem, 8, 0.7)
        r = system.matrix @ sol.values[system.dof_map.interior] - system.rhs
        assert np.linalg.norm(r) / np.linalg.norm(system.rhs) <= 10 * 1e-12

    def test_singular_matrix(self):
        mesh = uniform_mesh(2)
        dm = enumerate_dofs(mesh)
        singular = sp.csr_matrix((4, 4))
        system = SparseSystem(singular, np.ones(4), dm,
                              np.zeros(dm.boundary.size), "eliminate", mesh)
        with pytest.raises(SingularMatrix):
            solve(system, SolveConfig(method="direct"))

    def test_bad_config(self):
        with pytest.raises(ValueError):
            SolveConfig(method="magic")
        with pytest.raises(ValueError):
            SolveConfig(tol=0.0)

    def test_penalty_solution_close_to_eliminate(self):
        problem = get_problem("tc1")
        _, _, sol_e = solve_problem(problem, 8, 0.7)
        _, _, sol_p = solve_problem(problem, 8, 0.7, bc_mode="penalty")
        assert np.max(np.abs(sol_e.values - sol_p.values)) <= 1e-8
