"""Manufactured cases, study driver, writers and CLI."""

from .cases import CASES, ManufacturedCase, get_case
from .config import RunConfig, load_config, parse_config
from .study import ConvergenceTable, fit_rate, run_case, run_convergence, run_pipeline

__all__ = ["CASES", "ConvergenceTable", "ManufacturedCase", "RunConfig", "fit_rate", "get_case",
           "load_config", "parse_config", "run_case", "run_convergence", "run_pipeline"]
