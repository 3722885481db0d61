"""CSV and legacy VTK writers."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

SUMMARY_COLUMNS = ("case", "level", "H", "h_fine", "n_u", "n_p", "err_p", "err_u_energy",
                   "zeta_tilde_P", "zeta_tilde_R", "zeta_tilde_EV", "zeta_P", "zeta_EV",
                   "eta_tilde_P", "eta_NC", "eta_P", "eta_R", "eta_EV", "effectivity_flux")
ELEMENT_COLUMNS = ("cell_id", "subdomain", "x0", "y0", "x1", "y1", "eta_P", "eta_R",
                   "err_p_sq", "err_u_sq")
RATE_COLUMNS = ("quantity", "slope", "intercept", "r2", "n_points")

# summary column -> estimator key whose global sum is square-rooted
_SUMMARY_KEYS = {
    "err_p": "err_p_sq", "err_u_energy": "err_u_sq", "zeta_tilde_P": "zeta_tilde_P",
    "zeta_tilde_R": "zeta_tilde_R", "zeta_tilde_EV": "zeta_tilde_EV", "zeta_P": "zeta_P",
    "zeta_EV": "zeta_EV", "eta_tilde_P": "eta_tilde_P", "eta_NC": "eta_tilde_NC",
    "eta_P": "eta_P", "eta_R": "eta_R", "eta_EV": "eta_EV",
}


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return "" if v is None else str(v)


def summary_row(case_name, level, mesh, dofmap, report) -> dict:
    row = {"case": case_name, "level": int(level), "H": float(mesh.coarse_size),
           "h_fine": float(mesh.fine_size), "n_u": int(dofmap.n_u), "n_p": int(dofmap.n_p)}
    for col, key in _SUMMARY_KEYS.items():
        row[col] = report.norm(key)
    row["effectivity_flux"] = report.effectivity_flux
    return row


def write_summary(path, rows):
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in SUMMARY_COLUMNS])
    return path


def read_summary(path):
    with Path(path).open() as fh:
        return list(csv.DictReader(fh))


def write_elements(path, mesh, report):
    path = Path(path)
    r = mesh.cell_rect
    cols = [np.arange(mesh.n_cells), mesh.cell_sub, r[:, 0], r[:, 1], r[:, 2], r[:, 3],
            report.cell["eta_P"], report.cell["eta_R"], report.cell["err_p_sq"],
            report.cell["err_u_sq"]]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ELEMENT_COLUMNS)
        for k in range(mesh.n_cells):
            w.writerow([_fmt(c[k]) for c in cols])
    return path


def write_rates(path, fits):
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RATE_COLUMNS)
        for name, fit in fits.items():
            if fit is None:
                w.writerow([name, "n/a", "n/a", "n/a", 0])
            else:
                w.writerow([name, _fmt(fit.slope), _fmt(fit.intercept), _fmt(fit.r2), fit.n])
    return path


def write_vtk(path, mesh, solution, post, report):
    """Legacy ASCII unstructured grid of quads; corner points are duplicated per
    cell so the subdomain-wise (discontinuous across interfaces) ``s`` is exact."""
    path = Path(path)
    n = mesh.n_cells
    r = mesh.cell_rect
    corners = np.stack([np.column_stack([r[:, 0], r[:, 1]]), np.column_stack([r[:, 2], r[:, 1]]),
                        np.column_stack([r[:, 2], r[:, 3]]), np.column_stack([r[:, 0], r[:, 3]])],
                       axis=1)
    cells = np.arange(n)
    s_val = np.column_stack([post.s.evaluate(cells, corners[:, k, 0:1], corners[:, k, 1:2])[0][:, 0]
                             for k in range(4)])
    lines = ["# vtk DataFile Version 3.0", "evmfem fields", "ASCII", "DATASET UNSTRUCTURED_GRID",
             f"POINTS {4 * n} double"]
    lines += [f"{_fmt(x)} {_fmt(y)} 0" for x, y in corners.reshape(-1, 2)]
    lines.append(f"CELLS {n} {5 * n}")
    lines += [f"4 {4 * k} {4 * k + 1} {4 * k + 2} {4 * k + 3}" for k in range(n)]
    lines.append(f"CELL_TYPES {n}")
    lines += ["9"] * n
    lines.append(f"CELL_DATA {n}")
    fields = {"p_h": solution.p, "subdomain": mesh.cell_sub}
    for key in ("eta_P", "eta_R", "eta_tilde_P", "eta_tilde_NC", "zeta_P", "zeta_tilde_P",
                "zeta_R", "err_p_sq", "err_u_sq"):
        if key in report.cell:
            fields[key] = report.cell[key]
    for name, vals in fields.items():
        lines += [f"SCALARS {name} double 1", "LOOKUP_TABLE default"]
        lines += [_fmt(float(v)) for v in vals]
    lines += [f"POINT_DATA {4 * n}", "SCALARS s double 1", "LOOKUP_TABLE default"]
    lines += [_fmt(float(v)) for v in s_val.ravel()]
    path.write_text("\n".join(lines) + "\n")
    return path
