"""Run configuration: a single JSON document, validated into :class:`RunConfig`."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ConfigurationError
from ..mesh import DomainSpec
from ..solver import SolverConfig
from .cases import CASES

OSWALD_MODES = ("dirichlet-data", "zero")
_KNOWN_KEYS = {"case", "custom", "blocks", "coarse_n", "ratio", "levels", "solver",
               "oswald_boundary", "outputs"}


@dataclass(frozen=True)
class RunConfig:
    case: str
    coarse_n: int
    blocks: tuple | None = None
    ratio: int = 2
    levels: tuple = ()
    solver: SolverConfig = field(default_factory=SolverConfig)
    oswald_boundary: str = "dirichlet-data"
    csv: bool = True
    vtk: bool = False
    custom: str | None = None
    source: str | None = None

    def spec(self, coarse_n=None, blocks=None) -> DomainSpec:
        """Checkerboard layout for ``coarse_n`` (defaults to this config's value)."""
        blocks = blocks or self.blocks or (2, 2)
        spec = DomainSpec.checkerboard(int(coarse_n or self.coarse_n), self.ratio, blocks)
        spec.validate()
        return spec

    @property
    def level_list(self):
        return tuple(self.levels) if self.levels else (self.coarse_n,)


def _positive_int(value, name):
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigurationError(f"{name} must be a positive integer, got {value!r}")
    return value


def parse_config(data: dict, source=None) -> RunConfig:
    """Validate a decoded JSON mapping."""
    if not isinstance(data, dict):
        raise ConfigurationError("configuration must be a JSON object")
    unknown = set(data) - _KNOWN_KEYS
    if unknown:
        raise ConfigurationError(f"unknown configuration keys: {sorted(unknown)}")
    case = data.get("case")
    if case is None:
        raise ConfigurationError("configuration needs a 'case' entry")
    if case != "custom" and case not in CASES:
        known = ", ".join(sorted(CASES) + ["custom"])
        raise ConfigurationError(f"unknown case {case!r}; known cases: {known}")

    levels = data.get("levels") or []
    if not isinstance(levels, list):
        raise ConfigurationError("levels must be a list of coarse cell counts")
    levels = tuple(_positive_int(v, "each level") for v in levels)
    coarse_n = data.get("coarse_n", levels[0] if levels else None)
    if coarse_n is None:
        raise ConfigurationError("configuration needs 'coarse_n' or 'levels'")
    coarse_n = _positive_int(coarse_n, "coarse_n")
    ratio = _positive_int(data.get("ratio", 2), "ratio")

    blocks = data.get("blocks")
    if blocks is not None:
        if not isinstance(blocks, dict) or set(blocks) - {"nbx", "nby"}:
            raise ConfigurationError("blocks must be an object {nbx, nby}")
        blocks = (_positive_int(blocks.get("nbx", 1), "blocks.nbx"),
                  _positive_int(blocks.get("nby", 1), "blocks.nby"))

    sol = data.get("solver", {}) or {}
    if not isinstance(sol, dict) or set(sol) - {"method", "tol", "max_iter"}:
        raise ConfigurationError("solver must be an object {method, tol, max_iter}")
    solver = SolverConfig(method=sol.get("method", "direct"), tol=float(sol.get("tol", 1e-10)),
                          max_iter=_positive_int(sol.get("max_iter", 2000), "solver.max_iter"))

    mode = data.get("oswald_boundary", "dirichlet-data")
    if mode not in OSWALD_MODES:
        raise ConfigurationError(f"oswald_boundary must be one of {OSWALD_MODES}, got {mode!r}")

    outputs = data.get("outputs", {}) or {}
    if not isinstance(outputs, dict) or set(outputs) - {"csv", "vtk"}:
        raise ConfigurationError("outputs must be an object {csv, vtk}")
    for key in ("csv", "vtk"):
        if key in outputs and not isinstance(outputs[key], bool):
            raise ConfigurationError(f"outputs.{key} must be true or false")

    return RunConfig(case=case, coarse_n=coarse_n, blocks=blocks, ratio=ratio, levels=levels,
                     solver=solver, oswald_boundary=mode, csv=outputs.get("csv", True),
                     vtk=outputs.get("vtk", False), custom=data.get("custom"),
                     source=str(source) if source else None)


def load_config(path) -> RunConfig:
    """Read and validate a JSON config file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON ({exc})") from exc
    return parse_config(data, source=path)
