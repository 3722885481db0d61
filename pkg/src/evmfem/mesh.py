"""Multiblock Cartesian meshes with non-matching subdomain interfaces.

The domain is a rectangle split into ``nbx x nby`` blocks (subdomains).  Each
block carries its own uniform Cartesian grid.  Where two blocks meet, the two
traces are merged into a common refinement; every interval of that merged
trace is an interface *sub-edge* that carries exactly one velocity degree of
freedom shared by the cells on both sides.

Numbering conventions
---------------------
* subdomain id ``s = bj * nbx + bi``;
* cell id ``cell_offset[s] + j * nx + i``;
* edges: for every subdomain its non-interface x-normal edges (row by row),
  then its y-normal edges, then all interface sub-edges (vertical interfaces
  first, then horizontal ones).  Edge normals always point in +x or +y;
* faces of a cell are indexed ``W, E, S, N = 0, 1, 2, 3``.

Cells whose faces touch the interface are split into *pieces*: the tensor
grid spanned by the breakpoints of the split faces.  On each piece the
enhanced velocity is an ordinary RT0 field with exactly one active edge per
face, which is what the assembly and the estimators iterate over.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, GeometryError

W, E, S, N = 0, 1, 2, 3
FACE_NAMES = ("W", "E", "S", "N")

EDGE_INTERIOR, EDGE_BOUNDARY, EDGE_INTERFACE = 0, 1, 2

_REL_TOL = 1e-12


@dataclass(frozen=True)
class DomainSpec:
    """Layout of a multiblock rectangular domain.

    Attributes:
        cells: per-block cell counts ``(nx, ny)`` ordered by block id
            ``bj * nbx + bi``.
        blocks: ``(nbx, nby)``.
        origin: lower-left corner.
        extent: ``(width, height)``.
        x_breaks, y_breaks: optional explicit block boundaries; uniform
            blocks when omitted.
        pattern: free-form tag recorded for reporting (``"checkerboard"``...).
    """

    cells: tuple
    blocks: tuple = (1, 1)
    origin: tuple = (0.0, 0.0)
    extent: tuple = (1.0, 1.0)
    x_breaks: tuple | None = None
    y_breaks: tuple | None = None
    pattern: str = "custom"

    @classmethod
    def uniform(cls, n, blocks=(1, 1), origin=(0.0, 0.0), extent=(1.0, 1.0)):
        """Every block gets ``n x n`` cells (``n`` may also be a pair)."""
        nx, ny = (n, n) if np.isscalar(n) else n
        nb = int(blocks[0]) * int(blocks[1])
        return cls(cells=((int(nx), int(ny)),) * nb, blocks=tuple(blocks),
                   origin=tuple(origin), extent=tuple(extent), pattern="uniform")

    @classmethod
    def checkerboard(cls, coarse_n, ratio=2, blocks=(2, 2), origin=(0.0, 0.0),
                     extent=(1.0, 1.0)):
        """Alternating coarse/fine blocks; block (bi, bj) is coarse when bi+bj is even."""
        nbx, nby = int(blocks[0]), int(blocks[1])
        cells = []
        for bj in range(nby):
            for bi in range(nbx):
                n = coarse_n if (bi + bj) % 2 == 0 else coarse_n * ratio
                cells.append((int(n), int(n)))
        return cls(cells=tuple(cells), blocks=(nbx, nby), origin=tuple(origin),
                   extent=tuple(extent), pattern=f"checkerboard:{ratio}")

    def refined(self, factor=2):
        """Same layout with every cell count multiplied by ``factor``."""
        cells = tuple((nx * factor, ny * factor) for nx, ny in self.cells)
        return DomainSpec(cells=cells, blocks=self.blocks, origin=self.origin,
                          extent=self.extent, x_breaks=self.x_breaks,
                          y_breaks=self.y_breaks, pattern=self.pattern)

    def block_breaks(self):
        nbx, nby = self.blocks
        x0, y0 = self.origin
        lx, ly = self.extent
        if self.x_breaks is None:
            xb = x0 + lx * np.arange(nbx + 1) / nbx
        else:
            xb = np.asarray(self.x_breaks, dtype=float)
        if self.y_breaks is None:
            yb = y0 + ly * np.arange(nby + 1) / nby
        else:
            yb = np.asarray(self.y_breaks, dtype=float)
        return xb, yb

    def validate(self):
        try:
            nbx, nby = (int(b) for b in self.blocks)
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(f"blocks must be a pair of integers, got {self.blocks!r}") from exc
        if nbx < 1 or nby < 1:
            raise ConfigurationError(f"block grid must be at least 1x1, got {nbx}x{nby}")
        lx, ly = self.extent
        if not (lx > 0 and ly > 0):
            raise ConfigurationError(f"extent must be strictly positive, got {self.extent}")
        if len(self.cells) != nbx * nby:
            raise ConfigurationError(
                f"expected {nbx * nby} per-block cell counts, got {len(self.cells)}")
        for k, (nx, ny) in enumerate(self.cells):
            if int(nx) < 1 or int(ny) < 1:
                raise ConfigurationError(f"block {k} has zero cells ({nx}x{ny})")
        xb, yb = self.block_breaks()
        tol = _REL_TOL * max(lx, ly)
        for name, br, n, lo, length in (("x", xb, nbx, self.origin[0], lx),
                                        ("y", yb, nby, self.origin[1], ly)):
            if len(br) != n + 1:
                raise ConfigurationError(f"{name}_breaks needs {n + 1} entries, got {len(br)}")
            if abs(br[0] - lo) > tol or abs(br[-1] - (lo + length)) > tol:
                raise ConfigurationError(f"{name} blocks do not tile the domain: {list(br)}")
            if np.any(np.diff(br) <= 0):
                raise ConfigurationError(f"{name} block boundaries must increase: {list(br)}")


@dataclass(frozen=True)
class SubdomainGrid:
    id: int
    bi: int
    bj: int
    x0: float
    y0: float
    x1: float
    y1: float
    nx: int
    ny: int
    cell_offset: int

    @property
    def hx(self):
        return (self.x1 - self.x0) / self.nx

    @property
    def hy(self):
        return (self.y1 - self.y0) / self.ny

    @property
    def n_cells(self):
        return self.nx * self.ny

    def cell_id(self, i, j):
        return self.cell_offset + j * self.nx + i

    def x_nodes(self):
        return self.x0 + self.hx * np.arange(self.nx + 1)

    def y_nodes(self):
        return self.y0 + self.hy * np.arange(self.ny + 1)


@dataclass(frozen=True)
class InterfaceSegment:
    """One shared block side Gamma_{i,j}.

    ``axis`` is the direction of the normal: 0 for a vertical segment
    (x = position), 1 for a horizontal one.  ``minus`` is the block on the
    left/below, ``plus`` the one on the right/above.
    """

    index: int
    axis: int
    position: float
    lo: float
    hi: float
    minus: int
    plus: int
    breaks: np.ndarray
    edges: np.ndarray

    @property
    def length(self):
        return self.hi - self.lo


def intersect_traces(left_breaks, right_breaks, tol=_REL_TOL):
    """Common refinement of two 1D traces of the same segment.

    Both inputs must be sorted and share their first and last entries.
    Breakpoints closer than ``tol * segment length`` are merged.
    """
    a = np.asarray(left_breaks, dtype=float)
    b = np.asarray(right_breaks, dtype=float)
    if a.size < 2 or b.size < 2:
        raise GeometryError("a trace needs at least two breakpoints")
    length = a[-1] - a[0]
    atol = tol * abs(length)
    if abs(a[0] - b[0]) > atol or abs(a[-1] - b[-1]) > atol:
        raise GeometryError(
            f"trace endpoints differ: [{a[0]}, {a[-1]}] vs [{b[0]}, {b[-1]}]")
    merged = np.sort(np.concatenate([a, b]))
    keep = np.concatenate([[True], np.diff(merged) > atol])
    out = merged[keep]
    # pin the endpoints to the first trace
    out[0], out[-1] = a[0], a[-1]
    return out


@dataclass
class MultiblockMesh:
    spec: DomainSpec
    subdomains: list
    x_block_breaks: np.ndarray
    y_block_breaks: np.ndarray
    # cells
    cell_sub: np.ndarray
    cell_ij: np.ndarray
    cell_rect: np.ndarray
    # edges
    edge_axis: np.ndarray
    edge_pos: np.ndarray
    edge_lo: np.ndarray
    edge_hi: np.ndarray
    edge_minus: np.ndarray
    edge_plus: np.ndarray
    edge_kind: np.ndarray
    # cell -> face -> edges (CSR over cell*4 + face)
    face_ptr: np.ndarray
    face_edges: np.ndarray
    # pieces (common-refinement sub-rectangles of each cell)
    piece_cell: np.ndarray
    piece_rect: np.ndarray
    piece_edges: np.ndarray
    piece_ptr: np.ndarray
    interfaces: list = field(default_factory=list)

    @property
    def n_cells(self):
        return len(self.cell_sub)

    @property
    def n_edges(self):
        return len(self.edge_axis)

    @property
    def n_pieces(self):
        return len(self.piece_cell)

    @property
    def cell_hx(self):
        return self.cell_rect[:, 2] - self.cell_rect[:, 0]

    @property
    def cell_hy(self):
        return self.cell_rect[:, 3] - self.cell_rect[:, 1]

    @property
    def cell_area(self):
        return self.cell_hx * self.cell_hy

    @property
    def cell_diameter(self):
        return np.hypot(self.cell_hx, self.cell_hy)

    @property
    def edge_length(self):
        return self.edge_hi - self.edge_lo

    @property
    def interface_edges(self):
        return np.flatnonzero(self.edge_kind == EDGE_INTERFACE)

    @property
    def boundary_edges(self):
        return np.flatnonzero(self.edge_kind == EDGE_BOUNDARY)

    @property
    def coarse_size(self):
        return max(max(sd.hx, sd.hy) for sd in self.subdomains)

    @property
    def fine_size(self):
        return min(max(sd.hx, sd.hy) for sd in self.subdomains)

    def face(self, cell, face):
        """Edge ids on one face of a cell, sorted along the face."""
        k = 4 * cell + face
        return self.face_edges[self.face_ptr[k]:self.face_ptr[k + 1]]

    def face_counts(self):
        """(n_cells, 4) number of edges on each face."""
        return np.diff(self.face_ptr).reshape(-1, 4)

    def pieces_of(self, cell):
        return np.arange(self.piece_ptr[cell], self.piece_ptr[cell + 1])

    def enhanced_cells(self):
        """Cells with at least one face split into several sub-edges."""
        return np.flatnonzero(np.diff(self.piece_ptr) > 1)

    def edge_endpoints(self, edges=None):
        """(p0, p1) arrays of edge endpoints."""
        idx = np.arange(self.n_edges) if edges is None else np.asarray(edges)
        ax = self.edge_axis[idx]
        pos, lo, hi = self.edge_pos[idx], self.edge_lo[idx], self.edge_hi[idx]
        p0 = np.where(ax[:, None] == 0, np.stack([pos, lo], 1), np.stack([lo, pos], 1))
        p1 = np.where(ax[:, None] == 0, np.stack([pos, hi], 1), np.stack([hi, pos], 1))
        return p0, p1

    def locate(self, x, y):
        """Cell ids containing the points (points on cell boundaries go to the upper cell)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        nbx, nby = self.spec.blocks
        bi = np.clip(np.searchsorted(self.x_block_breaks, x, side="right") - 1, 0, nbx - 1)
        bj = np.clip(np.searchsorted(self.y_block_breaks, y, side="right") - 1, 0, nby - 1)
        sid = bj * nbx + bi
        x0 = np.array([sd.x0 for sd in self.subdomains])[sid]
        y0 = np.array([sd.y0 for sd in self.subdomains])[sid]
        hx = np.array([sd.hx for sd in self.subdomains])[sid]
        hy = np.array([sd.hy for sd in self.subdomains])[sid]
        nx = np.array([sd.nx for sd in self.subdomains])[sid]
        ny = np.array([sd.ny for sd in self.subdomains])[sid]
        off = np.array([sd.cell_offset for sd in self.subdomains])[sid]
        i = np.clip(np.floor((x - x0) / hx).astype(int), 0, nx - 1)
        j = np.clip(np.floor((y - y0) / hy).astype(int), 0, ny - 1)
        return off + j * nx + i

    def locate_piece(self, x, y):
        """Piece ids containing the points."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        cells = self.locate(x, y)
        pieces = self.piece_ptr[cells].copy()
        multi = np.flatnonzero(np.diff(self.piece_ptr)[cells] > 1)
        for k in multi:
            cand = self.pieces_of(cells[k])
            r = self.piece_rect[cand]
            inside = (x[k] >= r[:, 0]) & (x[k] <= r[:, 2]) & (y[k] >= r[:, 1]) & (y[k] <= r[:, 3])
            pieces[k] = cand[np.flatnonzero(inside)[-1]]
        return pieces


def induced_subpartition(mesh, cell, face):
    """Strips of ``cell`` induced by the sub-edges on one of its faces.

    Returns a list of ``(x0, y0, x1, y1)`` rectangles, one per sub-edge in the
    order of :meth:`MultiblockMesh.face`.
    """
    x0, y0, x1, y1 = mesh.cell_rect[cell]
    strips = []
    for e in mesh.face(cell, face):
        lo, hi = mesh.edge_lo[e], mesh.edge_hi[e]
        if face in (W, E):
            strips.append((x0, lo, x1, hi))
        else:
            strips.append((lo, y0, hi, y1))
    return strips


def cell_subrectangles(mesh, cell):
    """Common refinement of all strip families of a cell (its pieces)."""
    return [tuple(r) for r in mesh.piece_rect[mesh.pieces_of(cell)]]


def _subdomain_edges(sd, nbx, nby):
    """Non-interface edges of one subdomain.

    Returns a list of column arrays (axis, pos, lo, hi, minus, plus, kind).
    """
    nx, ny = sd.nx, sd.ny
    xs, ys = sd.x_nodes(), sd.y_nodes()
    cols = []
    # x-normal edges: node column i in 0..nx, row j
    i, j = np.meshgrid(np.arange(nx + 1), np.arange(ny), indexing="xy")
    i, j = i.ravel(), j.ravel()
    keep = np.ones(i.size, dtype=bool)
    if sd.bi > 0:
        keep &= i > 0
    if sd.bi < nbx - 1:
        keep &= i < nx
    i, j = i[keep], j[keep]
    minus = np.where(i > 0, sd.cell_offset + j * nx + (i - 1), -1)
    plus = np.where(i < nx, sd.cell_offset + j * nx + i, -1)
    kind = np.where((i == 0) | (i == nx), EDGE_BOUNDARY, EDGE_INTERIOR)
    cols.append((np.zeros(i.size, int), xs[i], ys[j], ys[j + 1], minus, plus, kind))
    # y-normal edges
    i, j = np.meshgrid(np.arange(nx), np.arange(ny + 1), indexing="xy")
    i, j = i.ravel(), j.ravel()
    keep = np.ones(i.size, dtype=bool)
    if sd.bj > 0:
        keep &= j > 0
    if sd.bj < nby - 1:
        keep &= j < ny
    i, j = i[keep], j[keep]
    minus = np.where(j > 0, sd.cell_offset + (j - 1) * nx + i, -1)
    plus = np.where(j < ny, sd.cell_offset + j * nx + i, -1)
    kind = np.where((j == 0) | (j == ny), EDGE_BOUNDARY, EDGE_INTERIOR)
    cols.append((np.ones(i.size, int), ys[j], xs[i], xs[i + 1], minus, plus, kind))
    return cols


def _interface_edges(seg_index, axis, a, b, first_edge):
    """Sub-edges of the interface between blocks ``a`` (minus) and ``b`` (plus)."""
    if axis == 0:
        pos, lo, hi = a.x1, a.y0, a.y1
        ta, tb = a.y_nodes(), b.y_nodes()
    else:
        pos, lo, hi = a.y1, a.x0, a.x1
        ta, tb = a.x_nodes(), b.x_nodes()
    breaks = intersect_traces(ta, tb)
    mid = 0.5 * (breaks[:-1] + breaks[1:])
    ka = np.clip(np.searchsorted(ta, mid) - 1, 0, len(ta) - 2)
    kb = np.clip(np.searchsorted(tb, mid) - 1, 0, len(tb) - 2)
    if axis == 0:
        minus = a.cell_offset + ka * a.nx + (a.nx - 1)
        plus = b.cell_offset + kb * b.nx
    else:
        minus = a.cell_offset + (a.ny - 1) * a.nx + ka
        plus = b.cell_offset + kb
    n = len(mid)
    seg = InterfaceSegment(index=seg_index, axis=axis, position=pos, lo=lo, hi=hi,
                           minus=a.id, plus=b.id, breaks=breaks,
                           edges=np.arange(first_edge, first_edge + n))
    cols = (np.full(n, axis), np.full(n, pos), breaks[:-1], breaks[1:], minus, plus,
            np.full(n, EDGE_INTERFACE))
    return seg, cols


def _build_pieces(cell_rect, face_ptr, face_edges, edge_lo, edge_hi):
    n_cells = len(cell_rect)
    counts = np.diff(face_ptr).reshape(-1, 4)
    first = face_edges[face_ptr[:-1]].reshape(-1, 4)
    enhanced = np.any(counts > 1, axis=1)
    n_pieces = np.ones(n_cells, dtype=int)
    per_cell = {}
    for c in np.flatnonzero(enhanced):
        faces = [face_edges[face_ptr[4 * c + f]:face_ptr[4 * c + f + 1]] for f in range(4)]
        x0, y0, x1, y1 = cell_rect[c]
        xbr = np.unique(np.concatenate([[x0, x1], edge_lo[faces[S]], edge_hi[faces[S]],
                                        edge_lo[faces[N]], edge_hi[faces[N]]]))
        ybr = np.unique(np.concatenate([[y0, y1], edge_lo[faces[W]], edge_hi[faces[W]],
                                        edge_lo[faces[E]], edge_hi[faces[E]]]))
        xbr = intersect_traces(xbr, [x0, x1])
        ybr = intersect_traces(ybr, [y0, y1])
        rects, edges = [], []
        for jj in range(len(ybr) - 1):
            ym = 0.5 * (ybr[jj] + ybr[jj + 1])
            for ii in range(len(xbr) - 1):
                xm = 0.5 * (xbr[ii] + xbr[ii + 1])
                row = []
                for f, t in ((W, ym), (E, ym), (S, xm), (N, xm)):
                    fe = faces[f]
                    k = np.searchsorted(edge_hi[fe], t)
                    row.append(fe[min(k, len(fe) - 1)])
                rects.append((xbr[ii], ybr[jj], xbr[ii + 1], ybr[jj + 1]))
                edges.append(row)
        per_cell[c] = (np.array(rects), np.array(edges, dtype=int))
        n_pieces[c] = len(rects)
    piece_ptr = np.concatenate([[0], np.cumsum(n_pieces)])
    total = piece_ptr[-1]
    piece_cell = np.repeat(np.arange(n_cells), n_pieces)
    piece_rect = np.empty((total, 4))
    piece_edges = np.empty((total, 4), dtype=int)
    std = ~enhanced
    piece_rect[piece_ptr[:-1][std]] = cell_rect[std]
    piece_edges[piece_ptr[:-1][std]] = first[std]
    for c, (rects, edges) in per_cell.items():
        piece_rect[piece_ptr[c]:piece_ptr[c + 1]] = rects
        piece_edges[piece_ptr[c]:piece_ptr[c + 1]] = edges
    return piece_cell, piece_rect, piece_edges, piece_ptr


def build_mesh(spec: DomainSpec) -> MultiblockMesh:
    """Build subdomain grids, global numbering and the interface grid."""
    spec.validate()
    nbx, nby = (int(b) for b in spec.blocks)
    xb, yb = spec.block_breaks()

    subdomains = []
    offset = 0
    for bj in range(nby):
        for bi in range(nbx):
            sid = bj * nbx + bi
            nx, ny = (int(v) for v in spec.cells[sid])
            sd = SubdomainGrid(id=sid, bi=bi, bj=bj, x0=float(xb[bi]), y0=float(yb[bj]),
                               x1=float(xb[bi + 1]), y1=float(yb[bj + 1]), nx=nx, ny=ny,
                               cell_offset=offset)
            subdomains.append(sd)
            offset += nx * ny

    cell_sub, cell_ij, cell_rect = [], [], []
    for sd in subdomains:
        i, j = np.meshgrid(np.arange(sd.nx), np.arange(sd.ny), indexing="xy")
        i, j = i.ravel(), j.ravel()
        xs, ys = sd.x_nodes(), sd.y_nodes()
        cell_sub.append(np.full(i.size, sd.id))
        cell_ij.append(np.stack([i, j], 1))
        cell_rect.append(np.stack([xs[i], ys[j], xs[i + 1], ys[j + 1]], 1))
    cell_sub = np.concatenate(cell_sub)
    cell_ij = np.concatenate(cell_ij)
    cell_rect = np.concatenate(cell_rect)

    columns = []
    for sd in subdomains:
        columns.extend(_subdomain_edges(sd, nbx, nby))
    n_edges = sum(len(c[0]) for c in columns)
    interfaces = []
    pairs = [(0, subdomains[bj * nbx + bi], subdomains[bj * nbx + bi + 1])
             for bj in range(nby) for bi in range(nbx - 1)]
    pairs += [(1, subdomains[bj * nbx + bi], subdomains[(bj + 1) * nbx + bi])
              for bj in range(nby - 1) for bi in range(nbx)]
    for axis, a, b in pairs:
        seg, cols = _interface_edges(len(interfaces), axis, a, b, n_edges)
        interfaces.append(seg)
        columns.append(cols)
        n_edges += len(cols[0])

    edge_axis, edge_pos, edge_lo, edge_hi, edge_minus, edge_plus, edge_kind = (
        np.concatenate([c[k] for c in columns]) for k in range(7))
    edge_axis = edge_axis.astype(int)
    edge_minus = edge_minus.astype(int)
    edge_plus = edge_plus.astype(int)
    edge_kind = edge_kind.astype(int)

    # incidence: minus cell sees the edge on its E/N face, plus cell on W/S
    eid = np.arange(n_edges)
    inc_cell = np.concatenate([edge_minus, edge_plus])
    inc_face = np.concatenate([np.where(edge_axis == 0, E, N), np.where(edge_axis == 0, W, S)])
    inc_edge = np.concatenate([eid, eid])
    inc_t = np.concatenate([edge_lo, edge_lo])
    ok = inc_cell >= 0
    inc_cell, inc_face, inc_edge, inc_t = inc_cell[ok], inc_face[ok], inc_edge[ok], inc_t[ok]
    key = 4 * inc_cell + inc_face
    order = np.lexsort((inc_t, key))
    face_edges = inc_edge[order]
    face_ptr = np.concatenate([[0], np.cumsum(np.bincount(key, minlength=4 * len(cell_sub)))])

    counts = np.diff(face_ptr).reshape(-1, 4)
    if np.any(counts == 0):
        raise GeometryError("a cell face is not covered by any edge")
    on_gamma = np.zeros(4 * len(cell_sub), dtype=bool)
    gam = edge_kind[face_edges] == EDGE_INTERFACE
    np.logical_or.at(on_gamma, np.repeat(np.arange(4 * len(cell_sub)), np.diff(face_ptr)), gam)
    n_gamma_faces = on_gamma.reshape(-1, 4).sum(axis=1)
    if np.any(n_gamma_faces > 2):
        bad = int(np.flatnonzero(n_gamma_faces > 2)[0])
        raise ConfigurationError(
            f"cell {bad} touches the interface on more than two faces; "
            "use at least 2 cells per block direction")

    piece_cell, piece_rect, piece_edges, piece_ptr = _build_pieces(
        cell_rect, face_ptr, face_edges, edge_lo, edge_hi)

    mesh = MultiblockMesh(
        spec=spec, subdomains=subdomains, x_block_breaks=xb, y_block_breaks=yb,
        cell_sub=cell_sub, cell_ij=cell_ij, cell_rect=cell_rect,
        edge_axis=edge_axis, edge_pos=edge_pos, edge_lo=edge_lo, edge_hi=edge_hi,
        edge_minus=edge_minus, edge_plus=edge_plus, edge_kind=edge_kind,
        face_ptr=face_ptr, face_edges=face_edges, piece_cell=piece_cell,
        piece_rect=piece_rect, piece_edges=piece_edges, piece_ptr=piece_ptr,
        interfaces=interfaces)
    for name in ("cell_sub", "cell_ij", "cell_rect", "edge_axis", "edge_pos", "edge_lo",
                 "edge_hi", "edge_minus", "edge_plus", "edge_kind", "face_ptr", "face_edges",
                 "piece_cell", "piece_rect", "piece_edges", "piece_ptr"):
        getattr(mesh, name).setflags(write=False)
    return mesh
