"""Enhanced velocity mixed finite elements on non-matching multiblock grids,
with explicit and implicit a posteriori error estimators."""

from .errors import (ConfigurationError, ConvergenceFailure, DataError, EvmfemError,
                     GeometryError, SolverSetupError)
from .estimators import EstimatorReport, estimate, lower_bound_ratio, two_level_flux_gap
from .mesh import DomainSpec, MultiblockMesh, build_mesh, intersect_traces
from .mfem_core import PermeabilityField, assemble, build_dofmap
from .postprocess import postprocess
from .solver import MixedSolution, SolverConfig, solve

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError", "ConvergenceFailure", "DataError", "DomainSpec", "EstimatorReport",
    "EvmfemError", "GeometryError", "MixedSolution", "MultiblockMesh", "PermeabilityField",
    "SolverConfig", "SolverSetupError", "assemble", "build_dofmap", "build_mesh", "estimate",
    "intersect_traces", "lower_bound_ratio", "postprocess", "solve", "two_level_flux_gap",
]
