import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evmfem.harness.cases import CASES
from evmfem.mesh import DomainSpec, build_mesh
from evmfem.mfem_core import PermeabilityField, build_dofmap
from evmfem.postprocess import (PostprocessedPressure, compute_multipliers, continuity_defect,
                                oswald_average, postprocess, postprocess_ptilde, ptilde_defects)
from evmfem.solver import MixedSolution

IDENTITY = PermeabilityField.identity()


def _state(mesh, u, p):
    return MixedSolution(np.asarray(u, float), np.asarray(p, float), 0.0, 0)


def _linear_state(mesh):
    """Exact RT0 x P0 representation of p = 1 - x, u = (1, 0)."""
    u = np.where(mesh.edge_axis == 0, 1.0, 0.0)
    xc = 0.5 * (mesh.cell_rect[:, 0] + mesh.cell_rect[:, 2])
    return _state(mesh, u, 1.0 - xc)


def test_constant_state_multipliers(small_mesh):
    sol = _state(small_mesh, np.zeros(small_mesh.n_edges), np.full(small_mesh.n_cells, 2.5))
    lam = compute_multipliers(sol, small_mesh, build_dofmap(small_mesh), IDENTITY)
    np.testing.assert_allclose(lam.values, 2.5, atol=1e-14)
    pt = postprocess_ptilde(lam, sol, small_mesh)
    np.testing.assert_allclose(pt.coeffs, np.tile([2.5, 0, 0, 0, 0], (small_mesh.n_cells, 1)),
                               atol=1e-13)
    s = oswald_average(pt, small_mesh, lambda x, y: 2.5 + 0 * x)
    np.testing.assert_allclose(s.nodal, 2.5, atol=1e-13)


def test_linear_field_multipliers_at_face_midpoints():
    mesh = build_mesh(DomainSpec.uniform(4))
    sol = _linear_state(mesh)
    lam = compute_multipliers(sol, mesh, build_dofmap(mesh), IDENTITY)
    r = mesh.cell_rect
    xm = np.column_stack([r[:, 0], r[:, 2], 0.5 * (r[:, 0] + r[:, 2]), 0.5 * (r[:, 0] + r[:, 2])])
    interior = mesh.locate(0.375, 0.375)[0]
    np.testing.assert_allclose(lam.values[interior], 1.0 - xm[interior], atol=1e-14)
    np.testing.assert_allclose(lam.values, 1.0 - xm, atol=1e-14)


def test_linear_field_ptilde_is_exact():
    mesh = build_mesh(DomainSpec.uniform(4))
    sol = _linear_state(mesh)
    lam = compute_multipliers(sol, mesh, build_dofmap(mesh), IDENTITY)
    pt = postprocess_ptilde(lam, sol, mesh)
    X, Y = np.meshgrid(np.linspace(0, 1, 5), np.linspace(0, 1, 5))
    cells = np.arange(mesh.n_cells)
    r = mesh.cell_rect
    Xc = r[:, 0:1] + (r[:, 2:3] - r[:, 0:1]) * X.ravel()[None, :]
    Yc = r[:, 1:2] + (r[:, 3:4] - r[:, 1:2]) * Y.ravel()[None, :]
    val, gx, gy = pt.evaluate(cells, Xc, Yc)
    np.testing.assert_allclose(val, 1.0 - Xc, atol=1e-13)
    np.testing.assert_allclose(gx, -1.0, atol=1e-12)
    np.testing.assert_allclose(gy, 0.0, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.floats(-50, 50).filter(lambda a: abs(a) > 1e-3))
def test_multipliers_are_linear(alpha):
    mesh = build_mesh(DomainSpec.checkerboard(2, 2, (2, 2)))
    rng = np.random.default_rng(1)
    sol = _state(mesh, rng.standard_normal(mesh.n_edges), rng.standard_normal(mesh.n_cells))
    dm = build_dofmap(mesh)
    lam = compute_multipliers(sol, mesh, dm, IDENTITY)
    lam_a = compute_multipliers(sol.scaled(alpha), mesh, dm, IDENTITY)
    np.testing.assert_allclose(lam_a.values, alpha * lam.values, rtol=1e-12, atol=1e-12)


def _piecewise_constant(mesh, values):
    coeffs = np.zeros((mesh.n_cells, 5))
    coeffs[:, 0] = values
    return PostprocessedPressure(coeffs, mesh.cell_rect)


def test_two_cell_average():
    mesh = build_mesh(DomainSpec(cells=((2, 1),), blocks=(1, 1)))
    s = oswald_average(_piecewise_constant(mesh, [1.0, 3.0]), mesh)
    # node (a=2, b=1) of the left cell is the midpoint of the shared edge
    assert s.nodal[0, 5] == pytest.approx(2.0)
    assert s.nodal[1, 3] == pytest.approx(2.0)


def test_four_cell_average():
    mesh = build_mesh(DomainSpec.uniform(2))
    s = oswald_average(_piecewise_constant(mesh, [0.0, 1.0, 2.0, 3.0]), mesh)
    centre = mesh.locate(0.25, 0.25)[0]
    assert s.nodal[centre, 8] == pytest.approx(1.5)


@settings(max_examples=25, deadline=None)
@given(st.floats(-1e3, 1e3))
def test_averaging_preserves_constants(c):
    mesh = build_mesh(DomainSpec.checkerboard(2, 2, (2, 2)))
    s = oswald_average(_piecewise_constant(mesh, np.full(mesh.n_cells, c)), mesh,
                       lambda x, y: c + 0 * x)
    np.testing.assert_allclose(s.nodal, c, atol=1e-12 * max(1.0, abs(c)))


def test_centre_node_equals_ptilde_centre(ex1_coarse):
    post = ex1_coarse.post
    np.testing.assert_allclose(post.s.nodal[:, 4], post.ptilde.at_local(0.5, 0.5), atol=1e-14)


def test_zero_boundary_mode(ex3_coarse):
    r = ex3_coarse
    case = CASES["example3"]
    K = case.permeability
    s0 = postprocess(r.solution, r.mesh, r.dofmap, K, None).s
    left = np.flatnonzero(np.isclose(r.mesh.cell_rect[:, 0], 0.0))
    np.testing.assert_array_equal(s0.nodal[left][:, [0, 3, 6]], 0.0)
    # with data the boundary nodes carry g; example 3's g vanishes too
    np.testing.assert_allclose(r.post.s.nodal[left][:, [0, 3, 6]], 0.0, atol=1e-15)


def test_ptilde_conditions_and_continuity(ex1_coarse):
    d_cell, d_face = ptilde_defects(ex1_coarse.post, ex1_coarse.solution, ex1_coarse.mesh)
    assert d_cell <= 1e-12 and d_face <= 1e-12
    assert continuity_defect(ex1_coarse.post.s, ex1_coarse.mesh) <= 1e-12


def test_recovered_pressure_may_jump_across_interface(ex1_coarse):
    m, s = ex1_coarse.mesh, ex1_coarse.post.s
    e = m.interface_edges
    p0, p1 = m.edge_endpoints(e)
    mid = 0.5 * (p0 + p1)
    vm, _, _ = s.evaluate(m.edge_minus[e], mid[:, 0:1], mid[:, 1:2])
    vp, _, _ = s.evaluate(m.edge_plus[e], mid[:, 0:1], mid[:, 1:2])
    assert np.max(np.abs(vm - vp)) > 1e-8
