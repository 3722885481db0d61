"""A posteriori error indicators, actual errors and derived diagnostics.

Per-cell squared contributions (``h_T`` is the cell diameter):

==================  =============================================
``zeta_tilde_P``    ``||K^-1 u_h + grad p_h||_T^2 h_T^2``
``zeta_P``          ``||K^-1 u_h + grad p_h||_T^2``
``zeta_R``          ``||f - div u_h||_T^2 h_T^2`` (also ``eta_R``)
``eta_tilde_P``     ``||K^-1 u_h + grad s||_T^2 h_T^2``
``eta_P``           ``||K^-1 u_h + grad s||_T^2``
``eta_tilde_NC``    ``||grad(s - p~)||_T^2 h_T^2``
==================  =============================================

Per interface sub-edge ``e`` with pressure jump ``[p_h]``:
``zeta_tilde_EV = [p_h]^2 |e| h_T`` (``h_T`` the larger adjacent diameter) and
``zeta_EV = eta_EV = [p_h]^2 |e| / |e|``.

``p_h`` is piecewise constant, so its elementwise gradient is zero.  The
divergence entering the residual terms is the cell mean of ``div u_h``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .mesh import build_mesh
from .mfem_core import (assemble, build_dofmap, cell_divergence, velocity_on_pieces,
                        evaluate_velocity)
from .quadrature import rect_points
from .solver import solve

ESTIMATOR_ORDER = 3
ERROR_ORDER = 4

CELL_KEYS = ("zeta_tilde_P", "zeta_tilde_R", "zeta_P", "zeta_R", "eta_tilde_P",
             "eta_tilde_R", "eta_tilde_NC", "eta_P", "eta_R", "err_p_sq", "err_u_sq",
             "err_u_l2_sq")
EDGE_KEYS = ("zeta_tilde_EV", "zeta_EV", "eta_EV")


def _piece_quadrature(mesh, order):
    X, Y, Wq = rect_points(mesh.piece_rect, order)
    return X, Y, Wq


def _to_cells(mesh, per_piece):
    return np.bincount(mesh.piece_cell, weights=per_piece, minlength=mesh.n_cells)


def _flux_residual(mesh, solution, K, order, grad=None):
    """Per-cell ``||K^-1 u_h + grad||^2`` with ``grad`` a callable on (pieces, X, Y)."""
    X, Y, Wq = _piece_quadrature(mesh, order)
    ux, uy = velocity_on_pieces(mesh, solution.u, X, Y)
    kix, kiy = K.inverse(X, Y)
    rx, ry = kix * ux, kiy * uy
    if grad is not None:
        gx, gy = grad(mesh.piece_cell, X, Y)
        rx, ry = rx + gx, ry + gy
    return _to_cells(mesh, np.sum(Wq * (rx ** 2 + ry ** 2), axis=1))


def _source_residual(mesh, solution, f, order):
    """Per-cell ``||f - div u_h||^2``."""
    div = cell_divergence(mesh, solution.u)
    X, Y, Wq = _piece_quadrature(mesh, order)
    fv = f(X, Y) if f is not None else np.zeros_like(X)
    r = fv - div[mesh.piece_cell][:, None]
    return _to_cells(mesh, np.sum(Wq * r ** 2, axis=1))


def interface_jumps(solution, mesh):
    """Interface sub-edge ids, squared pressure jumps, lengths and max diameters."""
    ie = mesh.interface_edges
    jump = solution.p[mesh.edge_minus[ie]] - solution.p[mesh.edge_plus[ie]]
    diam = mesh.cell_diameter
    h_t = np.maximum(diam[mesh.edge_minus[ie]], diam[mesh.edge_plus[ie]])
    return ie, jump ** 2, mesh.edge_length[ie], h_t


def explicit_pressure_estimator(solution, mesh, K, f, order=ESTIMATOR_ORDER):
    """zeta_tilde_P, zeta_tilde_R per cell and zeta_tilde_EV per interface sub-edge."""
    h2 = mesh.cell_diameter ** 2
    _, jsq, length, h_t = interface_jumps(solution, mesh)
    return {
        "zeta_tilde_P": _flux_residual(mesh, solution, K, order) * h2,
        "zeta_tilde_R": _source_residual(mesh, solution, f, order) * h2,
        "zeta_tilde_EV": jsq * length * h_t,
    }


def explicit_velocity_estimator(solution, mesh, K, f, order=ESTIMATOR_ORDER):
    """zeta_P, zeta_R per cell and zeta_EV per interface sub-edge."""
    h2 = mesh.cell_diameter ** 2
    _, jsq, length, _ = interface_jumps(solution, mesh)
    return {
        "zeta_P": _flux_residual(mesh, solution, K, order),
        "zeta_R": _source_residual(mesh, solution, f, order) * h2,
        "zeta_EV": jsq * length / length,
    }


def implicit_pressure_estimator(solution, ptilde, s, mesh, K, f, order=ESTIMATOR_ORDER):
    """eta_tilde_P, eta_tilde_R, eta_tilde_NC per cell."""
    h2 = mesh.cell_diameter ** 2

    def grad_s(cells, X, Y):
        _, gx, gy = s.evaluate(cells, X, Y)
        return gx, gy

    X, Y, Wq = _piece_quadrature(mesh, order)
    _, sx, sy = s.evaluate(mesh.piece_cell, X, Y)
    _, px, py = ptilde.evaluate(mesh.piece_cell, X, Y)
    nc = _to_cells(mesh, np.sum(Wq * ((sx - px) ** 2 + (sy - py) ** 2), axis=1))
    return {
        "eta_tilde_P": _flux_residual(mesh, solution, K, order, grad_s) * h2,
        "eta_tilde_R": _source_residual(mesh, solution, f, order) * h2,
        "eta_tilde_NC": nc * h2,
    }


def implicit_velocity_estimator(solution, s, mesh, K, f, order=ESTIMATOR_ORDER):
    """eta_P, eta_R per cell."""
    def grad_s(cells, X, Y):
        _, gx, gy = s.evaluate(cells, X, Y)
        return gx, gy

    return {
        "eta_P": _flux_residual(mesh, solution, K, order, grad_s),
        "eta_R": _source_residual(mesh, solution, f, order) * mesh.cell_diameter ** 2,
    }


def actual_errors(solution, case, mesh, K, order=ERROR_ORDER):
    """Per-cell ``||p - p_h||^2``, ``|||u - u_h|||_*^2`` and ``||u - u_h||^2``."""
    X, Y, Wq = _piece_quadrature(mesh, order)
    p = case.pressure(X, Y)
    ep = p - solution.p[mesh.piece_cell][:, None]
    ux, uy = case.velocity(X, Y)
    uhx, uhy = velocity_on_pieces(mesh, solution.u, X, Y)
    kix, kiy = K.inverse(X, Y)
    dx, dy = ux - uhx, uy - uhy
    return {
        "err_p_sq": _to_cells(mesh, np.sum(Wq * ep ** 2, axis=1)),
        "err_u_sq": _to_cells(mesh, np.sum(Wq * (kix * dx ** 2 + kiy * dy ** 2), axis=1)),
        "err_u_l2_sq": _to_cells(mesh, np.sum(Wq * (dx ** 2 + dy ** 2), axis=1)),
    }


@dataclass
class EstimatorReport:
    """Local and global estimator values for one discrete solution."""

    cell: dict
    edge: dict
    interface_edges: np.ndarray
    h_max: float
    meta: dict = field(default_factory=dict)

    def total(self, key):
        src = self.cell if key in self.cell else self.edge
        return float(np.sum(src[key]))

    def norm(self, key):
        return float(np.sqrt(self.total(key)))

    @property
    def totals(self):
        out = {k: self.total(k) for k in self.cell}
        out.update({k: self.total(k) for k in self.edge})
        return out

    @property
    def flux_estimate(self):
        return float(np.sqrt(self.total("eta_P") + self.total("eta_R") + self.total("eta_EV")))

    @property
    def effectivity_flux(self):
        err = self.norm("err_u_sq") if "err_u_sq" in self.cell else 0.0
        return self.flux_estimate / err if err > 0 else float("nan")

    def eta_cell_with_interface(self, mesh):
        """eta_P + eta_R per cell plus eta_EV shared equally by the two adjacent cells."""
        out = self.cell["eta_P"] + self.cell["eta_R"]
        ie = self.interface_edges
        half = 0.5 * self.edge["eta_EV"]
        out = out + np.bincount(mesh.edge_minus[ie], weights=half, minlength=mesh.n_cells)
        out = out + np.bincount(mesh.edge_plus[ie], weights=half, minlength=mesh.n_cells)
        return out


def estimate(solution, post, mesh, K, f, case=None):
    """Compute every estimator (and actual errors when ``case`` is given)."""
    cell, edge = {}, {}
    ex_p = explicit_pressure_estimator(solution, mesh, K, f)
    ex_u = explicit_velocity_estimator(solution, mesh, K, f)
    im_p = implicit_pressure_estimator(solution, post.ptilde, post.s, mesh, K, f)
    im_u = implicit_velocity_estimator(solution, post.s, mesh, K, f)
    for d in (ex_p, ex_u, im_p, im_u):
        for k, v in d.items():
            (edge if k.endswith("_EV") else cell)[k] = v
    edge["eta_EV"] = edge["zeta_EV"].copy()
    if case is not None:
        cell.update(actual_errors(solution, case, mesh, K))
    return EstimatorReport(cell=cell, edge=edge, interface_edges=mesh.interface_edges,
                           h_max=float(np.max(mesh.cell_diameter)))


def lower_bound_ratio(report, floor=1e-14):
    """``(sqrt(sum zeta_tilde_P) + sqrt(sum zeta_R)) / (||p - p_h|| + h ||u - u_h||)``.

    Returns None when the denominator vanishes (exactly represented solution).
    """
    num = report.norm("zeta_tilde_P") + report.norm("zeta_R")
    den = report.norm("err_p_sq") + report.h_max * report.norm("err_u_l2_sq")
    if den <= floor:
        return None
    return num / den


def two_level_flux_gap(spec, case, cfg=None, fine_spec=None, order=ERROR_ORDER):
    """Two-level flux difference ``||u_hf - u_h||`` against the actual coarse error.

    The fine level defaults to ``spec.refined(2)``; any fine level must refine
    every subdomain grid by an integer factor.

    Returns:
        dict with ``gap``, ``error`` (``||u - u_h||``), ``error_fine`` and ``ratio``.
    """
    fine_spec = fine_spec or spec.refined(2)
    if (tuple(fine_spec.blocks) != tuple(spec.blocks) or len(fine_spec.cells) != len(spec.cells)
            or any(fx % cx or fy % cy for (cx, cy), (fx, fy) in zip(spec.cells, fine_spec.cells))
            or fine_spec.extent != spec.extent or fine_spec.origin != spec.origin
            or fine_spec.x_breaks != spec.x_breaks or fine_spec.y_breaks != spec.y_breaks):
        raise ConfigurationError("fine level is not nested in the coarse level")
    K = case.permeability
    levels = []
    for sp_ in (spec, fine_spec):
        mesh = build_mesh(sp_)
        sol = solve(assemble(mesh, build_dofmap(mesh), K, case.source, case.pressure), cfg)
        levels.append((mesh, sol))
    (cm, cs), (fm, fs) = levels
    X, Y, Wq = rect_points(fm.piece_rect, order)
    ufx, ufy = velocity_on_pieces(fm, fs.u, X, Y)
    ucx, ucy = evaluate_velocity(cm, cs.u, X.ravel(), Y.ravel())
    ucx, ucy = ucx.reshape(X.shape), ucy.reshape(X.shape)
    gap = np.sqrt(np.sum(Wq * ((ufx - ucx) ** 2 + (ufy - ucy) ** 2)))
    err_c = np.sqrt(np.sum(actual_errors(cs, case, cm, K, order)["err_u_l2_sq"]))
    err_f = np.sqrt(np.sum(actual_errors(fs, case, fm, K, order)["err_u_l2_sq"]))
    return {"gap": float(gap), "error": float(err_c), "error_fine": float(err_f),
            "ratio": float(gap / err_c) if err_c > 0 else float("nan")}
