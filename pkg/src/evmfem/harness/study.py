"""End-to-end pipeline, single runs and convergence studies."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ConfigurationError, EvmfemError
from ..estimators import EstimatorReport, estimate
from ..mesh import build_mesh
from ..mfem_core import assemble, build_dofmap
from ..postprocess import postprocess
from ..solver import solve
from . import output
from .cases import get_case
from .config import RunConfig

log = logging.getLogger(__name__)

RATE_QUANTITIES = ("err_p", "err_u_energy", "eta_P", "eta_R", "eta_EV", "eta_NC",
                   "zeta_tilde_P", "zeta_tilde_R", "zeta_tilde_EV", "zeta_P")


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r2: float
    n: int


def fit_rate(pairs, floor=0.0):
    """Least-squares fit of ``log(value) = slope * log(H) + intercept``.

    Pairs with ``value <= floor`` are dropped with a warning.  Returns None when
    fewer than two pairs remain (fit not applicable).
    """
    pairs = [(float(h), float(v)) for h, v in pairs]
    kept = [(h, v) for h, v in pairs if h > 0 and v > floor and np.isfinite(v)]
    if len(kept) < len(pairs):
        warnings.warn(f"excluded {len(pairs) - len(kept)} non-positive pair(s) from rate fit",
                      RuntimeWarning, stacklevel=2)
    if len(kept) < 2 or len({h for h, _ in kept}) < 2:
        return None
    x = np.log([h for h, _ in kept])
    y = np.log([v for _, v in kept])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return RateFit(float(slope), float(intercept), r2, len(kept))


@dataclass
class LevelResult:
    level: int
    mesh: object
    dofmap: object
    solution: object
    post: object
    report: EstimatorReport
    row: dict


def run_pipeline(case, spec, solver_cfg=None, oswald_boundary="dirichlet-data", level=0):
    """mesh -> assembly -> solve -> postprocess -> estimators + actual errors."""
    mesh = build_mesh(spec)
    dofmap = build_dofmap(mesh)
    K = case.permeability
    system = assemble(mesh, dofmap, K, case.source, case.boundary)
    solution = solve(system, solver_cfg)
    g = case.boundary if oswald_boundary == "dirichlet-data" else None
    post = postprocess(solution, mesh, dofmap, K, g)
    report = estimate(solution, post, mesh, K, case.source, case)
    row = output.summary_row(case.name, level, mesh, dofmap, report)
    return LevelResult(level, mesh, dofmap, solution, post, report, row)


def _context(config: RunConfig, exc: EvmfemError):
    where = f"config {config.source}, " if config.source else ""
    if exc.args:
        exc.args = (f"[{where}case {config.case}] {exc.args[0]}",) + exc.args[1:]
    return exc


def _run_level(config, case, coarse_n, level):
    try:
        spec = config.spec(coarse_n, config.blocks or case.blocks)
        return run_pipeline(case, spec, config.solver, config.oswald_boundary, level)
    except EvmfemError as exc:
        raise _context(config, exc)


def _write_level_files(out, res, config, tag=""):
    files = {}
    if config.csv:
        files["elements"] = output.write_elements(out / f"elements{tag}.csv", res.mesh, res.report)
    if config.vtk:
        files["vtk"] = output.write_vtk(out / f"fields{tag}.vtk", res.mesh, res.solution,
                                        res.post, res.report)
    return files


@dataclass
class CaseResult:
    result: LevelResult
    files: dict = field(default_factory=dict)

    @property
    def report(self):
        return self.result.report


def run_case(config: RunConfig, out=None) -> CaseResult:
    """Single run at ``config.coarse_n``; writes files into ``out`` if given."""
    try:
        case = get_case(config.case, config.custom)
    except EvmfemError as exc:
        raise _context(config, exc)
    res = _run_level(config, case, config.coarse_n, 0)
    files = {}
    if out is not None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        if config.csv:
            files["summary"] = output.write_summary(out / "summary.csv", [res.row])
        files.update(_write_level_files(out, res, config))
    log.info("case %s H=%.4g effectivity %.3f", case.name, res.row["H"], res.row["effectivity_flux"])
    return CaseResult(res, files)


@dataclass
class ConvergenceTable:
    rows: list
    slopes: dict
    results: list = field(default_factory=list, repr=False)
    files: dict = field(default_factory=dict)

    def column(self, name):
        return np.array([r[name] for r in self.rows], dtype=float)

    def slope(self, name):
        fit = self.slopes.get(name)
        return None if fit is None else fit.slope


def run_convergence(config: RunConfig, out=None, keep_results=False, floor=1e-13) -> ConvergenceTable:
    """Run every level in ``config.levels`` (strictly increasing coarse cell counts)."""
    levels = list(config.levels)
    if len(levels) < 2:
        raise _context(config, ConfigurationError("a convergence study needs at least 2 levels"))
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise _context(config, ConfigurationError(
            f"levels must be strictly increasing (decreasing H), got {levels}"))
    try:
        case = get_case(config.case, config.custom)
    except EvmfemError as exc:
        raise _context(config, exc)
    out = Path(out) if out is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    rows, results, files = [], [], {}
    for k, n in enumerate(levels):
        res = _run_level(config, case, n, k)
        rows.append(res.row)
        if out is not None:
            for key, path in _write_level_files(out, res, config, tag=f"_L{k}").items():
                files[f"{key}_L{k}"] = path
        if keep_results:
            results.append(res)
        log.info("level %d H=%.4g err_u %.4e", k, res.row["H"], res.row["err_u_energy"])
    slopes = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for q in RATE_QUANTITIES:
            slopes[q] = fit_rate([(r["H"], r[q]) for r in rows], floor=floor)
    if out is not None and config.csv:
        files["summary"] = output.write_summary(out / "summary.csv", rows)
        files["rates"] = output.write_rates(out / "rates.csv", slopes)
    return ConvergenceTable(rows, slopes, results, files)
