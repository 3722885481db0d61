"""Pressure postprocessing: edge multipliers, local quadratic pressure, nodal averaging.

Pipeline per cell ``T``:

1. ``lambda`` -- one constant per face, from
   ``lambda_e |e| = (p_h, div v_e)_T - (K^-1 u_h, v_e)_T`` with ``v_e`` the
   face-wide outward RT0 function.  Split faces enter through their mean flux.
2. ``p~`` in span{1, x, y, x^2, y^2} (cell-local coordinates on [0, 1]^2)
   matching the cell mean of ``p_h`` and the four face means of ``lambda``.
3. ``s`` -- biquadratic, obtained by averaging ``p~`` at the 9 Lagrange nodes of
   every cell over all cells of the same subdomain sharing the node.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import E, EDGE_INTERIOR, N, S, W
from .mfem_core import FACE_SIGN
from .quadrature import rect_points

# rows: cell mean, then W, E, S, N face means of (1, xi, eta, xi^2, eta^2)
_PTILDE_MATRIX = np.array([
    [1.0, 0.5, 0.5, 1 / 3, 1 / 3],
    [1.0, 0.0, 0.5, 0.0, 1 / 3],
    [1.0, 1.0, 0.5, 1.0, 1 / 3],
    [1.0, 0.5, 0.0, 1 / 3, 0.0],
    [1.0, 0.5, 1.0, 1 / 3, 1.0],
])

_Q2_NODES = np.array([0.0, 0.5, 1.0])


def _q2_1d(t):
    """Lagrange basis on nodes {0, 1/2, 1} and derivatives, stacked on axis 0."""
    t = np.asarray(t, dtype=float)
    val = np.stack([2 * (t - 0.5) * (t - 1.0), -4 * t * (t - 1.0), 2 * t * (t - 0.5)])
    der = np.stack([4 * t - 3.0, 4.0 - 8 * t, 4 * t - 1.0])
    return val, der


def _local_coords(rect, X, Y):
    hx = (rect[:, 2] - rect[:, 0])[:, None]
    hy = (rect[:, 3] - rect[:, 1])[:, None]
    return (X - rect[:, 0:1]) / hx, (Y - rect[:, 1:2]) / hy, hx, hy


@dataclass(frozen=True)
class LagrangeMultipliers:
    """Face multipliers, shape (n_cells, 4) in face order W, E, S, N."""

    values: np.ndarray

    def scaled(self, alpha):
        return LagrangeMultipliers(self.values * alpha)


@dataclass(frozen=True)
class PostprocessedPressure:
    """Per-cell coefficients of ``c0 + c1 xi + c2 eta + c3 xi^2 + c4 eta^2``."""

    coeffs: np.ndarray
    cell_rect: np.ndarray

    def evaluate(self, cells, X, Y):
        """Values and physical gradients at points (m, q) inside ``cells`` (m,)."""
        c = self.coeffs[cells]
        xi, eta, hx, hy = _local_coords(self.cell_rect[cells], X, Y)
        val = (c[:, 0:1] + c[:, 1:2] * xi + c[:, 2:3] * eta
               + c[:, 3:4] * xi ** 2 + c[:, 4:5] * eta ** 2)
        gx = (c[:, 1:2] + 2 * c[:, 3:4] * xi) / hx
        gy = (c[:, 2:3] + 2 * c[:, 4:5] * eta) / hy
        return val, gx, gy

    def at_local(self, xi, eta):
        """Values at the same local point (xi, eta) for every cell."""
        c = self.coeffs
        return c[:, 0] + c[:, 1] * xi + c[:, 2] * eta + c[:, 3] * xi ** 2 + c[:, 4] * eta ** 2


@dataclass(frozen=True)
class RecoveredPressure:
    """Biquadratic ``s``: 9 nodal values per cell, node k = 3 * b + a at (a/2, b/2)."""

    nodal: np.ndarray
    cell_rect: np.ndarray

    def evaluate(self, cells, X, Y):
        v = self.nodal[cells].reshape(-1, 3, 3)  # [cell, b, a]
        xi, eta, hx, hy = _local_coords(self.cell_rect[cells], X, Y)
        lx, dlx = _q2_1d(xi)
        ly, dly = _q2_1d(eta)
        val = np.einsum("mba,amq,bmq->mq", v, lx, ly)
        gx = np.einsum("mba,amq,bmq->mq", v, dlx, ly) / hx
        gy = np.einsum("mba,amq,bmq->mq", v, lx, dly) / hy
        return val, gx, gy


def face_mean_flux(mesh, u):
    """(n_cells, 4) mean normal flux (global orientation) over each full face."""
    owner_face = np.repeat(np.arange(4 * mesh.n_cells), np.diff(mesh.face_ptr))
    lengths = mesh.edge_length[mesh.face_edges]
    total = np.bincount(owner_face, weights=u[mesh.face_edges] * lengths,
                        minlength=4 * mesh.n_cells)
    face_len = np.bincount(owner_face, weights=lengths, minlength=4 * mesh.n_cells)
    return (total / face_len).reshape(-1, 4)


def _cell_rt0_mass(mesh, K):
    """(n_cells, 4, 4) standard RT0 mass matrix of every full cell (2x2 Gauss)."""
    rect = mesh.cell_rect
    X, Y, Wq = rect_points(rect, 2)
    kix, kiy = K.inverse(X, Y)
    xi, eta, _, _ = _local_coords(rect, X, Y)
    psi = [1 - xi, xi, 1 - eta, eta]
    m = np.zeros((mesh.n_cells, 4, 4))
    for a in (W, E):
        for b in (W, E):
            m[:, a, b] = np.sum(Wq * kix * psi[a] * psi[b], axis=1)
    for a in (S, N):
        for b in (S, N):
            m[:, a, b] = np.sum(Wq * kiy * psi[a] * psi[b], axis=1)
    return m


def compute_multipliers(solution, mesh, dofmap, K) -> LagrangeMultipliers:
    """Edge multipliers approximating the pressure trace on each cell face."""
    q = face_mean_flux(mesh, solution.u)
    m = _cell_rt0_mass(mesh, K)
    mq = np.einsum("cab,cb->ca", m, q)
    face_len = np.stack([mesh.cell_hy, mesh.cell_hy, mesh.cell_hx, mesh.cell_hx], axis=1)
    lam = solution.p[:, None] - FACE_SIGN[None, :] * mq / face_len
    return LagrangeMultipliers(lam)


def postprocess_ptilde(lam, solution, mesh) -> PostprocessedPressure:
    """Solve the 5x5 mean-matching system on every cell."""
    rhs = np.column_stack([solution.p, lam.values])
    coeffs = np.linalg.solve(_PTILDE_MATRIX, rhs.T).T
    return PostprocessedPressure(coeffs, mesh.cell_rect)


def oswald_average(ptilde, mesh, g=None) -> RecoveredPressure:
    """Average ``p~`` at biquadratic Lagrange nodes, separately in each subdomain.

    Nodes on the outer boundary take ``g(V)``, or zero when ``g`` is None.
    """
    nbx, nby = mesh.spec.blocks
    node_off = np.zeros(len(mesh.subdomains) + 1, dtype=int)
    for sd in mesh.subdomains:
        node_off[sd.id + 1] = node_off[sd.id] + (2 * sd.nx + 1) * (2 * sd.ny + 1)
    sub = mesh.cell_sub
    nxs = np.array([sd.nx for sd in mesh.subdomains])[sub]
    nys = np.array([sd.ny for sd in mesh.subdomains])[sub]
    i, j = mesh.cell_ij[:, 0], mesh.cell_ij[:, 1]

    node_ids = np.empty((mesh.n_cells, 9), dtype=int)
    values = np.empty((mesh.n_cells, 9))
    on_boundary = np.zeros((mesh.n_cells, 9), dtype=bool)
    bi = np.array([sd.bi for sd in mesh.subdomains])[sub]
    bj = np.array([sd.bj for sd in mesh.subdomains])[sub]
    for b in range(3):
        for a in range(3):
            k = 3 * b + a
            I, J = 2 * i + a, 2 * j + b
            node_ids[:, k] = node_off[sub] + J * (2 * nxs + 1) + I
            values[:, k] = ptilde.at_local(_Q2_NODES[a], _Q2_NODES[b])
            on_boundary[:, k] = (((bi == 0) & (I == 0)) | ((bi == nbx - 1) & (I == 2 * nxs))
                                 | ((bj == 0) & (J == 0)) | ((bj == nby - 1) & (J == 2 * nys)))

    n_nodes = node_off[-1]
    sums = np.bincount(node_ids.ravel(), weights=values.ravel(), minlength=n_nodes)
    counts = np.bincount(node_ids.ravel(), minlength=n_nodes)
    nodal = sums[node_ids] / counts[node_ids]

    if np.any(on_boundary):
        rect = mesh.cell_rect
        xs = rect[:, 0:1] + (rect[:, 2:3] - rect[:, 0:1]) * np.tile(_Q2_NODES, 3)[None, :]
        ys = rect[:, 1:2] + (rect[:, 3:4] - rect[:, 1:2]) * np.repeat(_Q2_NODES, 3)[None, :]
        bval = g(xs[on_boundary], ys[on_boundary]) if g is not None else 0.0
        nodal[on_boundary] = bval
    return RecoveredPressure(nodal, mesh.cell_rect)


@dataclass(frozen=True)
class Postprocessed:
    lam: LagrangeMultipliers
    ptilde: PostprocessedPressure
    s: RecoveredPressure


def postprocess(solution, mesh, dofmap, K, g=None):
    """Run the three postprocessing steps."""
    lam = compute_multipliers(solution, mesh, dofmap, K)
    pt = postprocess_ptilde(lam, solution, mesh)
    return Postprocessed(lam, pt, oswald_average(pt, mesh, g))


def ptilde_defects(post, solution, mesh, order=3):
    """Max relative defects of the cell-mean and face-mean conditions of ``p~``.

    Means are recomputed by Gauss quadrature in physical coordinates, which is
    independent of the local 5x5 solve.
    """
    cells = np.arange(mesh.n_cells)
    X, Y, Wq = rect_points(mesh.cell_rect, order)
    val, _, _ = post.ptilde.evaluate(cells, X, Y)
    cell_mean = np.sum(Wq * val, axis=1) / mesh.cell_area
    scale = max(np.max(np.abs(solution.p)), np.max(np.abs(post.lam.values)), 1e-300)
    d_cell = np.max(np.abs(cell_mean - solution.p)) / scale

    t, w = np.polynomial.legendre.leggauss(order)
    t, w = 0.5 * (t + 1), 0.5 * w
    r = mesh.cell_rect
    d_face = 0.0
    for f in (W, E, S, N):
        if f in (W, E):
            xf = r[:, 0] if f == W else r[:, 2]
            Xf = np.repeat(xf[:, None], len(t), 1)
            Yf = r[:, 1:2] + (r[:, 3:4] - r[:, 1:2]) * t[None, :]
        else:
            yf = r[:, 1] if f == S else r[:, 3]
            Yf = np.repeat(yf[:, None], len(t), 1)
            Xf = r[:, 0:1] + (r[:, 2:3] - r[:, 0:1]) * t[None, :]
        val, _, _ = post.ptilde.evaluate(cells, Xf, Yf)
        mean = val @ w
        d_face = max(d_face, np.max(np.abs(mean - post.lam.values[:, f])) / scale)
    return d_cell, d_face


def continuity_defect(s, mesh, samples=5):
    """Max jump of ``s`` across interior (same-subdomain) edges at sample points."""
    edges = np.flatnonzero(mesh.edge_kind == EDGE_INTERIOR)
    if edges.size == 0:
        return 0.0
    t = np.linspace(0.0, 1.0, samples)
    p0, p1 = mesh.edge_endpoints(edges)
    X = p0[:, 0:1] + (p1[:, 0:1] - p0[:, 0:1]) * t[None, :]
    Y = p0[:, 1:2] + (p1[:, 1:2] - p0[:, 1:2]) * t[None, :]
    vm, _, _ = s.evaluate(mesh.edge_minus[edges], X, Y)
    vp, _, _ = s.evaluate(mesh.edge_plus[edges], X, Y)
    scale = max(np.max(np.abs(s.nodal)), 1e-300)
    return float(np.max(np.abs(vm - vp)) / scale)
