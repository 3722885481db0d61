"""Exception hierarchy shared by all evmfem modules."""


class EvmfemError(Exception):
    """Base class for every error raised by the package."""


class ConfigurationError(EvmfemError, ValueError):
    """Invalid domain, solver or run configuration."""


class GeometryError(EvmfemError, ValueError):
    """Inconsistent interface geometry (trace endpoints do not match)."""


class DataError(EvmfemError, ValueError):
    """Problem data outside its admissible range, e.g. non-positive K."""


class SolverSetupError(EvmfemError, RuntimeError):
    """The saddle-point system could not be factorized."""


class ConvergenceFailure(EvmfemError, RuntimeError):
    """Iteration budget exhausted before reaching the tolerance.

    Attributes:
        residual: best relative residual reached.
        iterations: number of iterations performed.
    """

    def __init__(self, message, residual, iterations):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
