"""RT0 x P0 enhanced-velocity spaces and saddle-point assembly.

Velocity degrees of freedom coincide with mesh edges: one per standard edge
and one per interface sub-edge.  A coefficient is the normal flux per unit
length across its edge in the global +x / +y direction, so on a piece with
parent cell ``[x0, x1] x [y0, y1]`` the velocity reads::

    u_x = u_W (x1 - x) / hx + u_E (x - x0) / hx
    u_y = u_S (y1 - y) / hy + u_N (y - y0) / hy

where ``u_W`` ... are the coefficients of the edges active on that piece.

The assembled system is the symmetric indefinite block matrix
``[[M, B^T], [B, 0]]`` with ``B = -D`` (``D`` the cell divergence matrix) and
right-hand side ``(-G, -F)``, which is exactly

    (K^-1 u_h, v) - (p_h, div v) = -<g, v.nu>,    (div u_h, w) = (f, w).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import DataError
from .mesh import E, EDGE_BOUNDARY, EDGE_INTERFACE, N, S, W
from .quadrature import rect_points, segment_points

# orientation of the global edge normal relative to the outward cell normal
FACE_SIGN = np.array([-1.0, 1.0, -1.0, 1.0])

MASS_ORDER = 2
SOURCE_ORDER = 3
BOUNDARY_ORDER = 3


class PermeabilityField:
    """Diagonal permeability ``K(x, y) = diag(kxx, kyy)``.

    Args:
        func: callable ``(x, y) -> kxx`` or ``(x, y) -> (kxx, kyy)``; ``None``
            means the identity tensor.
        name: label used in reports.
    """

    def __init__(self, func=None, name="custom"):
        self._func = func
        self.name = name

    @classmethod
    def identity(cls):
        return cls(None, name="identity")

    @classmethod
    def scalar(cls, func, name="scalar"):
        return cls(func, name=name)

    @classmethod
    def diagonal(cls, fxx, fyy, name="diagonal"):
        return cls(lambda x, y: (fxx(x, y), fyy(x, y)), name=name)

    @classmethod
    def raster(cls, values, origin=(0.0, 0.0), extent=(1.0, 1.0)):
        """Piecewise constant K on a uniform raster.

        ``values`` has shape ``(ny, nx)`` (isotropic) or ``(ny, nx, 2)``.
        """
        vals = np.asarray(values, dtype=float)
        ny, nx = vals.shape[:2]

        def lookup(x, y):
            i = np.clip(((x - origin[0]) / extent[0] * nx).astype(int), 0, nx - 1)
            j = np.clip(((y - origin[1]) / extent[1] * ny).astype(int), 0, ny - 1)
            v = vals[j, i]
            if vals.ndim == 3:
                return v[..., 0], v[..., 1]
            return v

        return cls(lookup, name="raster")

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self._func is None:
            one = np.ones(np.broadcast(x, y).shape)
            return one, one
        k = self._func(x, y)
        if isinstance(k, tuple):
            kxx, kyy = k
        else:
            kxx = kyy = k
        shape = np.broadcast(x, y).shape
        return (np.broadcast_to(np.asarray(kxx, dtype=float), shape),
                np.broadcast_to(np.asarray(kyy, dtype=float), shape))

    def inverse(self, x, y):
        """Return ``(1/kxx, 1/kyy)``; raises DataError on non-positive values."""
        kxx, kyy = self(x, y)
        if not (np.all(kxx > 0) and np.all(kyy > 0) and np.all(np.isfinite(kxx))
                and np.all(np.isfinite(kyy))):
            raise DataError(f"permeability '{self.name}' is not positive definite "
                            "at some quadrature point")
        return 1.0 / kxx, 1.0 / kyy


@dataclass
class DofMap:
    """Velocity (edge) and pressure (cell) numbering."""

    n_u: int
    n_p: int
    piece_dofs: np.ndarray
    face_ptr: np.ndarray
    face_dofs: np.ndarray

    def cell_dofs(self, cell):
        """Flux DOFs of a cell in face order W, E, S, N and their outward signs."""
        lo, hi = self.face_ptr[4 * cell], self.face_ptr[4 * cell + 4]
        dofs = self.face_dofs[lo:hi]
        faces = np.repeat(np.arange(4), np.diff(self.face_ptr[4 * cell:4 * cell + 5]))
        return dofs, FACE_SIGN[faces]


def build_dofmap(mesh) -> DofMap:
    return DofMap(n_u=mesh.n_edges, n_p=mesh.n_cells, piece_dofs=mesh.piece_edges,
                  face_ptr=mesh.face_ptr, face_dofs=mesh.face_edges)


def piece_geometry(mesh, pieces=None):
    """Parent-cell bounds ``(x0, y0, x1, y1)`` for the requested pieces."""
    idx = slice(None) if pieces is None else pieces
    return mesh.cell_rect[mesh.piece_cell[idx]]


def velocity_on_pieces(mesh, u, X, Y, pieces=None):
    """Evaluate u_h at points ``X, Y`` of shape (m, q) lying in the given pieces."""
    idx = np.arange(mesh.n_pieces) if pieces is None else np.asarray(pieces)
    cell = mesh.cell_rect[mesh.piece_cell[idx]]
    dofs = mesh.piece_edges[idx]
    hx = (cell[:, 2] - cell[:, 0])[:, None]
    hy = (cell[:, 3] - cell[:, 1])[:, None]
    uw, ue, us, un = (u[dofs[:, k]][:, None] for k in range(4))
    ux = uw * (cell[:, 2:3] - X) / hx + ue * (X - cell[:, 0:1]) / hx
    uy = us * (cell[:, 3:4] - Y) / hy + un * (Y - cell[:, 1:2]) / hy
    return ux, uy


def divergence_on_pieces(mesh, u):
    """Piecewise-constant divergence of u_h on every piece."""
    cell = mesh.cell_rect[mesh.piece_cell]
    dofs = mesh.piece_edges
    hx = cell[:, 2] - cell[:, 0]
    hy = cell[:, 3] - cell[:, 1]
    return (u[dofs[:, E]] - u[dofs[:, W]]) / hx + (u[dofs[:, N]] - u[dofs[:, S]]) / hy


def cell_divergence(mesh, u):
    """Net outward flux of u_h divided by the cell area (mean divergence)."""
    return cell_net_flux(mesh, u) / mesh.cell_area


def cell_net_flux(mesh, u):
    """Net outward flux ``sum_a sign_a u_a |e_a|`` of each cell."""
    sign = FACE_SIGN[np.repeat(np.tile(np.arange(4), mesh.n_cells), np.diff(mesh.face_ptr))]
    contrib = sign * u[mesh.face_edges] * mesh.edge_length[mesh.face_edges]
    owner = np.repeat(np.arange(mesh.n_cells), np.diff(mesh.face_ptr[::4]))
    return np.bincount(owner, weights=contrib, minlength=mesh.n_cells)


def evaluate_velocity(mesh, u, x, y):
    """Point evaluation of u_h (vectorized over points)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    pieces = mesh.locate_piece(x, y)
    ux, uy = velocity_on_pieces(mesh, u, x[:, None], y[:, None], pieces)
    return ux[:, 0], uy[:, 0]


def _piece_mass(mesh, K, pieces):
    """(m, 4, 4) mass contributions of pieces in local slot order W, E, S, N."""
    rects = mesh.piece_rect[pieces]
    cell = mesh.cell_rect[mesh.piece_cell[pieces]]
    X, Y, Wq = rect_points(rects, MASS_ORDER)
    kix, kiy = K.inverse(X, Y)
    hx = (cell[:, 2] - cell[:, 0])[:, None]
    hy = (cell[:, 3] - cell[:, 1])[:, None]
    psi = [(cell[:, 2:3] - X) / hx, (X - cell[:, 0:1]) / hx,
           (cell[:, 3:4] - Y) / hy, (Y - cell[:, 1:2]) / hy]
    local = np.zeros((len(rects), 4, 4))
    for a, b in ((W, W), (W, E), (E, E)):
        v = np.sum(Wq * kix * psi[a] * psi[b], axis=1)
        local[:, a, b] = v
        local[:, b, a] = v
    for a, b in ((S, S), (S, N), (N, N)):
        v = np.sum(Wq * kiy * psi[a] * psi[b], axis=1)
        local[:, a, b] = v
        local[:, b, a] = v
    return local


def _piece_div(mesh, pieces):
    """(m, 4) integrals of div phi over each piece, slot order W, E, S, N."""
    rects = mesh.piece_rect[pieces]
    cell = mesh.cell_rect[mesh.piece_cell[pieces]]
    area = (rects[:, 2] - rects[:, 0]) * (rects[:, 3] - rects[:, 1])
    hx = cell[:, 2] - cell[:, 0]
    hy = cell[:, 3] - cell[:, 1]
    return np.stack([-area / hx, area / hx, -area / hy, area / hy], axis=1)


def local_mass_matrix(mesh, cell, K):
    """Dense mass matrix of one cell over its flux DOFs.

    Returns:
        (matrix, dofs) with dofs ordered as :meth:`DofMap.cell_dofs`.
    """
    dofs = mesh.face_edges[mesh.face_ptr[4 * cell]:mesh.face_ptr[4 * cell + 4]]
    pos = {d: k for k, d in enumerate(dofs)}
    pieces = mesh.pieces_of(cell)
    contrib = _piece_mass(mesh, K, pieces)
    m = np.zeros((len(dofs), len(dofs)))
    for p, loc in zip(pieces, contrib):
        idx = [pos[d] for d in mesh.piece_edges[p]]
        m[np.ix_(idx, idx)] += loc
    return m, dofs


def local_div_matrix(mesh, cell):
    """Row vector of ``int_T div phi_a`` over the cell's flux DOFs."""
    dofs = mesh.face_edges[mesh.face_ptr[4 * cell]:mesh.face_ptr[4 * cell + 4]]
    pos = {d: k for k, d in enumerate(dofs)}
    pieces = mesh.pieces_of(cell)
    row = np.zeros(len(dofs))
    for p, loc in zip(pieces, _piece_div(mesh, pieces)):
        for slot in range(4):
            row[pos[mesh.piece_edges[p, slot]]] += loc[slot]
    return row, dofs


@dataclass
class SaddleSystem:
    matrix: sp.csr_matrix
    rhs: np.ndarray
    M: sp.csr_matrix
    B: sp.csr_matrix
    F: np.ndarray
    G: np.ndarray
    n_u: int
    n_p: int

    @property
    def size(self):
        return self.n_u + self.n_p


def source_integrals(mesh, f):
    """``(f, 1)_T`` for every cell by 3x3 Gauss."""
    X, Y, Wq = rect_points(mesh.cell_rect, SOURCE_ORDER)
    return np.sum(Wq * f(X, Y), axis=1)


def boundary_integrals(mesh, g):
    """``<g, phi_a . nu>`` for every boundary edge DOF (zero elsewhere)."""
    G = np.zeros(mesh.n_edges)
    if g is None:
        return G
    be = mesh.boundary_edges
    p0, p1 = mesh.edge_endpoints(be)
    X, Y, Wq = segment_points(p0, p1, BOUNDARY_ORDER)
    # outward normal opposes the global one on the left/bottom boundary
    sign = np.where(mesh.edge_minus[be] < 0, -1.0, 1.0)
    G[be] = sign * np.sum(Wq * g(X, Y), axis=1)
    return G


def assemble(mesh, dofmap, K, f=None, g=None, order=None):
    """Assemble the global saddle-point system.

    Args:
        mesh: MultiblockMesh.
        dofmap: DofMap from :func:`build_dofmap`.
        K: PermeabilityField.
        f: source ``(x, y) -> array`` or None for zero.
        g: Dirichlet pressure ``(x, y) -> array`` or None for zero.
        order: optional permutation of the piece traversal.
    """
    pieces = np.arange(mesh.n_pieces) if order is None else np.asarray(order)
    dofs = dofmap.piece_dofs[pieces]
    assert dofs.min() >= 0 and dofs.max() < dofmap.n_u, "unmapped velocity DOF"
    local = _piece_mass(mesh, K, pieces)
    blocks = [(a, b) for a in (W, E) for b in (W, E)] + [(a, b) for a in (S, N) for b in (S, N)]
    rows = np.concatenate([dofs[:, a] for a, _ in blocks])
    cols = np.concatenate([dofs[:, b] for _, b in blocks])
    vals = np.concatenate([local[:, a, b] for a, b in blocks])
    M = sp.coo_matrix((vals, (rows, cols)), shape=(dofmap.n_u, dofmap.n_u)).tocsr()
    M.sum_duplicates()

    div = _piece_div(mesh, pieces)
    prow = np.repeat(mesh.piece_cell[pieces], 4)
    D = sp.coo_matrix((div.ravel(), (prow, dofs.ravel())),
                      shape=(dofmap.n_p, dofmap.n_u)).tocsr()
    D.sum_duplicates()
    D.eliminate_zeros()
    B = -D

    F = source_integrals(mesh, f) if f is not None else np.zeros(dofmap.n_p)
    G = boundary_integrals(mesh, g)
    A = sp.bmat([[M, B.T], [B, None]], format="csr")
    rhs = np.concatenate([-G, -F])
    return SaddleSystem(matrix=A, rhs=rhs, M=M, B=B.tocsr(), F=F, G=G,
                        n_u=dofmap.n_u, n_p=dofmap.n_p)


def check_interface_orientation(mesh, dofmap):
    """Each interface DOF must be seen with opposite outward signs by its two cells."""
    for e in mesh.interface_edges:
        signs = []
        for c in (mesh.edge_minus[e], mesh.edge_plus[e]):
            dofs, sg = dofmap.cell_dofs(c)
            hit = np.flatnonzero(dofs == e)
            if len(hit) != 1:
                return False
            signs.append(sg[hit[0]])
        if signs[0] != -signs[1]:
            return False
    return True


__all__ = [
    "EDGE_BOUNDARY", "EDGE_INTERFACE", "FACE_SIGN", "PermeabilityField", "DofMap",
    "SaddleSystem", "assemble", "build_dofmap", "cell_divergence", "cell_net_flux",
    "check_interface_orientation",
    "divergence_on_pieces", "evaluate_velocity", "local_div_matrix", "local_mass_matrix",
    "source_integrals", "velocity_on_pieces",
]
