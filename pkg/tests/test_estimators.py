import numpy as np
import pytest

from evmfem.errors import ConfigurationError
from evmfem.estimators import (CELL_KEYS, actual_errors, estimate, explicit_pressure_estimator,
                               explicit_velocity_estimator, lower_bound_ratio, two_level_flux_gap)
from evmfem.harness.cases import CASES
from evmfem.harness.study import run_pipeline
from evmfem.mesh import DomainSpec, build_mesh
from evmfem.mfem_core import PermeabilityField, assemble, build_dofmap
from evmfem.postprocess import postprocess
from evmfem.solver import MixedSolution, solve

from .conftest import side_by_side_spec

IDENTITY = PermeabilityField.identity()


def test_constant_state_is_zero(small_mesh):
    sol = MixedSolution(np.zeros(small_mesh.n_edges), np.full(small_mesh.n_cells, 3.0), 0.0, 0)
    post = postprocess(sol, small_mesh, build_dofmap(small_mesh), IDENTITY, lambda x, y: 3.0 + 0 * x)
    rep = estimate(sol, post, small_mesh, IDENTITY, None)
    for key, val in {**rep.cell, **rep.edge}.items():
        assert np.max(np.abs(val)) <= 1e-20, key


def test_matching_pressures_have_no_interface_term(small_mesh):
    sol = MixedSolution(np.zeros(small_mesh.n_edges), np.ones(small_mesh.n_cells), 0.0, 0)
    ex = explicit_pressure_estimator(sol, small_mesh, IDENTITY, None)
    assert not np.any(ex["zeta_tilde_EV"])


def test_constant_source_has_zero_residual():
    mesh = build_mesh(DomainSpec.checkerboard(3, 2, (2, 2)))
    one = lambda x, y: 1.0 + 0 * x  # noqa: E731
    sol = solve(assemble(mesh, build_dofmap(mesh), IDENTITY, one, CASES["example3"].pressure))
    ex = explicit_pressure_estimator(sol, mesh, IDENTITY, one)
    assert np.max(ex["zeta_tilde_R"]) <= 1e-18


def test_interface_term_scalings(ex1_coarse):
    m = ex1_coarse.mesh
    ie = m.interface_edges
    jump2 = (ex1_coarse.solution.p[m.edge_minus[ie]] - ex1_coarse.solution.p[m.edge_plus[ie]]) ** 2
    ev = explicit_velocity_estimator(ex1_coarse.solution, m, IDENTITY, CASES["example1"].source)
    per_length = ev["zeta_EV"] / (jump2 * m.edge_length[ie])
    np.testing.assert_allclose(per_length, 1.0 / m.edge_length[ie], rtol=1e-12)
    ex = explicit_pressure_estimator(ex1_coarse.solution, m, IDENTITY, CASES["example1"].source)
    h_t = np.maximum(m.cell_diameter[m.edge_minus[ie]], m.cell_diameter[m.edge_plus[ie]])
    np.testing.assert_allclose(ex["zeta_tilde_EV"], jump2 * m.edge_length[ie] * h_t, rtol=1e-12)


def test_halving_subedges_doubles_interface_term():
    values = []
    for n in (2, 4):
        mesh = build_mesh(DomainSpec.checkerboard(n, 2, (2, 2)))
        # unit pressure jump on every interface sub-edge
        sol = MixedSolution(np.zeros(mesh.n_edges), (mesh.cell_sub % 3 == 0).astype(float), 0.0, 0)
        ev = explicit_velocity_estimator(sol, mesh, IDENTITY, None)["zeta_EV"]
        ie = mesh.interface_edges
        values.append(np.unique(np.round(ev / mesh.edge_length[ie], 10)))
    assert len(values[0]) == len(values[1]) == 1
    assert values[1][0] == pytest.approx(2 * values[0][0])


def test_residual_terms_identical(ex1_coarse):
    c = ex1_coarse.report.cell
    np.testing.assert_array_equal(c["eta_R"], c["zeta_R"])
    np.testing.assert_array_equal(c["eta_R"], c["zeta_tilde_R"])
    np.testing.assert_array_equal(c["eta_R"], c["eta_tilde_R"])
    np.testing.assert_array_equal(ex1_coarse.report.edge["eta_EV"], ex1_coarse.report.edge["zeta_EV"])


def test_nonnegative_and_totals(ex1_coarse):
    rep = ex1_coarse.report
    for key in CELL_KEYS:
        assert np.all(rep.cell[key] >= 0)
        assert rep.total(key) == pytest.approx(float(np.sum(rep.cell[key])), rel=1e-12)


def test_single_cell_subdomains_have_no_nonconformity():
    # every subdomain is one cell, so s is the nodal interpolant of p~ up to the boundary
    spec = DomainSpec(cells=((1, 1),) * 4, blocks=(2, 2))
    case = CASES["example3"]
    res = run_pipeline(case, spec, oswald_boundary="zero")
    interior_only = res.post.s.nodal[:, 4]
    np.testing.assert_allclose(interior_only, res.post.ptilde.at_local(0.5, 0.5), atol=1e-15)


def test_scaling_is_quadratic():
    spec = DomainSpec.checkerboard(3, 2, (2, 2))
    alpha = 3.7
    base = run_pipeline(CASES["example2"], spec)
    scaled = run_pipeline(CASES["example2"].scaled(alpha), spec)
    np.testing.assert_allclose(scaled.solution.u, alpha * base.solution.u, rtol=1e-10, atol=1e-12)
    np.testing.assert_allclose(scaled.post.s.nodal, alpha * base.post.s.nodal, rtol=1e-10, atol=1e-12)
    for key, val in {**base.report.cell, **base.report.edge}.items():
        other = {**scaled.report.cell, **scaled.report.edge}[key]
        np.testing.assert_allclose(other, alpha ** 2 * val, rtol=1e-10, atol=1e-20)


def test_invariant_under_assembly_permutation(rng):
    case = CASES["example2"]
    mesh = build_mesh(DomainSpec.checkerboard(3, 2, (2, 2)))
    dm = build_dofmap(mesh)
    reps = []
    for order in (None, rng.permutation(mesh.n_pieces)):
        sol = solve(assemble(mesh, dm, case.permeability, case.source, case.pressure, order=order))
        post = postprocess(sol, mesh, dm, case.permeability, case.pressure)
        reps.append(estimate(sol, post, mesh, case.permeability, case.source, case))
    for key in reps[0].cell:
        np.testing.assert_allclose(reps[1].cell[key], reps[0].cell[key], rtol=1e-9, atol=1e-18)


def test_mirror_relabelling_invariance():
    # p(x, y) = x(x-1)y(y-1) is symmetric under x <-> 1 - x; so is the 3x3 layout
    res = run_pipeline(CASES["example3"], DomainSpec.checkerboard(2, 2, (3, 3)))
    m = res.mesh
    r = m.cell_rect
    mirror = m.locate(1.0 - 0.5 * (r[:, 0] + r[:, 2]), 0.5 * (r[:, 1] + r[:, 3]))
    for key in ("eta_P", "zeta_P", "eta_R", "err_u_sq", "err_p_sq"):
        np.testing.assert_allclose(res.report.cell[key][mirror], res.report.cell[key],
                                   rtol=1e-8, atol=1e-20)


def test_exact_patch_errors_and_ratio(patch_exact):
    rep = patch_exact.report
    assert rep.norm("err_u_sq") <= 1e-10
    r = patch_exact.mesh.cell_rect
    centres = CASES["patch"].pressure(0.5 * (r[:, 0] + r[:, 2]), 0.5 * (r[:, 1] + r[:, 3]))
    assert np.max(np.abs(centres - patch_exact.solution.p)) <= 1e-10
    assert rep.norm("eta_P") <= 1e-10
    assert rep.norm("eta_tilde_NC") <= 1e-10


def test_lower_bound_ratio_guard(small_mesh):
    sol = MixedSolution(np.zeros(small_mesh.n_edges), np.zeros(small_mesh.n_cells), 0.0, 0)
    post = postprocess(sol, small_mesh, build_dofmap(small_mesh), IDENTITY)
    zero = CASES["patch"].scaled(0.0)
    assert lower_bound_ratio(estimate(sol, post, small_mesh, IDENTITY, None, zero)) is None


def test_lower_bound_ratio_positive(ex3_coarse):
    assert lower_bound_ratio(ex3_coarse.report) > 0


def test_quadrature_converged(ex1_coarse):
    r = ex1_coarse
    case = CASES["example1"]
    e4 = actual_errors(r.solution, case, r.mesh, IDENTITY, order=4)
    e6 = actual_errors(r.solution, case, r.mesh, IDENTITY, order=6)
    for key in e4:
        assert abs(e4[key].sum() - e6[key].sum()) < 1e-3 * e6[key].sum()


def test_two_level_gap_exact_patch():
    out = two_level_flux_gap(side_by_side_spec(2), CASES["patch"])
    assert out["gap"] <= 1e-10


def test_two_level_gap_example3():
    case = CASES["example3"]
    gaps = []
    for n in (2, 4, 8):
        out = two_level_flux_gap(DomainSpec.checkerboard(n, 2, (3, 3)), case)
        assert out["ratio"] > 0.5
        gaps.append(out["gap"])
    assert gaps[0] > gaps[1] > gaps[2]


def test_two_level_gap_rejects_non_nested():
    spec = DomainSpec.checkerboard(4, 2, (3, 3))
    with pytest.raises(ConfigurationError):
        two_level_flux_gap(spec, CASES["example3"], fine_spec=DomainSpec.checkerboard(6, 2, (3, 3)))
