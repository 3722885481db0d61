import numpy as np
import pytest

from evmfem.errors import DataError
from evmfem.harness.cases import CASES
from evmfem.mesh import W, DomainSpec, build_mesh
from evmfem.mfem_core import (PermeabilityField, assemble, build_dofmap, cell_net_flux,
                              check_interface_orientation, evaluate_velocity, local_div_matrix,
                              local_mass_matrix, source_integrals)
from evmfem.solver import solve

from .conftest import side_by_side_spec

IDENTITY = PermeabilityField.identity()


def _fig2_mesh():
    return build_mesh(DomainSpec(cells=((2, 2), (1, 1)), blocks=(2, 1), extent=(2.0, 1.0)))


def test_unit_cell_mass_matrix():
    mesh = build_mesh(DomainSpec.uniform(1))
    m, dofs = local_mass_matrix(mesh, 0, IDENTITY)
    a, b = 1 / 3, 1 / 6
    expected = np.array([[a, b, 0, 0], [b, a, 0, 0], [0, 0, a, b], [0, 0, b, a]])
    np.testing.assert_allclose(m, expected, atol=1e-15)
    assert len(dofs) == 4


def test_mass_scales_with_inverse_permeability():
    mesh = build_mesh(DomainSpec.uniform(1))
    m1, _ = local_mass_matrix(mesh, 0, IDENTITY)
    m2, _ = local_mass_matrix(mesh, 0, PermeabilityField.scalar(lambda x, y: 2.0 + 0 * x))
    np.testing.assert_allclose(m2, 0.5 * m1, atol=1e-15)


def test_split_face_cell_mass_matrix():
    mesh = _fig2_mesh()
    cell = mesh.n_cells - 1
    m, dofs = local_mass_matrix(mesh, cell, IDENTITY)
    # two west sub-edges plus E, S, N
    assert m.shape == (5, 5)
    assert m[0, 1] == 0.0
    np.testing.assert_allclose(m, m.T, atol=1e-14)
    assert np.all(np.linalg.eigvalsh(m) > 0)
    # each strip carries half of the standard west-west entry
    np.testing.assert_allclose([m[0, 0], m[1, 1]], [1 / 6, 1 / 6], atol=1e-15)


def test_unit_cell_div_row():
    mesh = build_mesh(DomainSpec.uniform(1))
    row, _ = local_div_matrix(mesh, 0)
    np.testing.assert_allclose(row, [-1, 1, -1, 1])


def test_split_face_div_row():
    mesh = _fig2_mesh()
    cell = mesh.n_cells - 1
    row, dofs = local_div_matrix(mesh, cell)
    np.testing.assert_allclose(row, [-0.5, -0.5, 1, -1, 1])
    # constant field (1, 0) has zero net flux
    u = np.zeros(mesh.n_edges)
    u[mesh.edge_axis == 0] = 1.0
    assert abs(row @ u[dofs]) < 1e-15


def test_raster_and_nonpositive_permeability():
    K = PermeabilityField.raster(np.array([[1.0, 2.0], [3.0, 4.0]]))
    kx, _ = K(np.array([0.25, 0.75, 0.25]), np.array([0.25, 0.25, 0.75]))
    assert list(kx) == [1.0, 2.0, 3.0]
    bad = PermeabilityField.scalar(lambda x, y: x - 0.5)
    mesh = build_mesh(DomainSpec.uniform(2))
    with pytest.raises(DataError):
        assemble(mesh, build_dofmap(mesh), bad)


def test_source_of_one_gives_cell_areas(small_mesh):
    sysm = assemble(small_mesh, build_dofmap(small_mesh), IDENTITY, lambda x, y: 1.0 + 0 * x)
    np.testing.assert_allclose(sysm.F, small_mesh.cell_area, rtol=1e-14)
    np.testing.assert_allclose(-sysm.rhs[sysm.n_u:], small_mesh.cell_area, rtol=1e-14)


def test_homogeneous_problem(small_mesh):
    sysm = assemble(small_mesh, build_dofmap(small_mesh), IDENTITY)
    assert not np.any(sysm.rhs)
    sol = solve(sysm)
    assert not np.any(sol.u) and not np.any(sol.p)


@pytest.mark.parametrize("spec", [side_by_side_spec(2), DomainSpec.uniform(3, (2, 2))],
                         ids=["nonmatching-2x1", "matching-2x2"])
def test_constant_velocity_reproduced(spec):
    case = CASES["patch"]
    mesh = build_mesh(spec)
    sol = solve(assemble(mesh, build_dofmap(mesh), IDENTITY, None, case.pressure))
    ux, uy = evaluate_velocity(mesh, sol.u, *np.random.default_rng(0).random((2, 50)))
    np.testing.assert_allclose(ux, 1.0, atol=1e-10)
    np.testing.assert_allclose(uy, 0.0, atol=1e-10)
    xc = 0.5 * (mesh.cell_rect[:, 0] + mesh.cell_rect[:, 2])
    np.testing.assert_allclose(sol.p, 1.0 - xc, atol=1e-10)


def test_assembly_order_independent(small_mesh, rng):
    case = CASES["example2"]
    dm = build_dofmap(small_mesh)
    a = assemble(small_mesh, dm, case.permeability, case.source, case.pressure)
    order = rng.permutation(small_mesh.n_pieces)
    b = assemble(small_mesh, dm, case.permeability, case.source, case.pressure, order=order)
    assert abs(a.matrix - b.matrix).max() <= 1e-14
    np.testing.assert_allclose(a.rhs, b.rhs, atol=1e-14)


def test_mass_symmetric_positive_definite(small_mesh, rng):
    case = CASES["example2"]
    sysm = assemble(small_mesh, build_dofmap(small_mesh), case.permeability)
    M = sysm.M
    assert abs(M - M.T).max() <= 1e-14
    for _ in range(20):
        v = rng.standard_normal(M.shape[0])
        assert v @ (M @ v) > 0


def test_interface_orientation_opposite(small_mesh):
    assert check_interface_orientation(small_mesh, build_dofmap(small_mesh))


def test_dof_counts(small_mesh):
    dm = build_dofmap(small_mesh)
    assert dm.n_p == small_mesh.n_cells
    n_iface = small_mesh.interface_edges.size
    assert dm.n_u == np.sum(small_mesh.edge_kind != 2) + n_iface


def test_local_conservation_after_solve():
    case = CASES["example1"]
    mesh = build_mesh(DomainSpec.checkerboard(6, 2, (2, 2)))
    sol = solve(assemble(mesh, build_dofmap(mesh), IDENTITY, case.source, case.pressure))
    fint = source_integrals(mesh, case.source)
    defect = np.abs(fint - cell_net_flux(mesh, sol.u))
    assert np.all(defect <= 1e-8 * np.maximum(1.0, np.abs(fint)))
