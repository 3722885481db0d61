"""Direct and Schur-complement solvers for the mixed saddle-point system."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ConfigurationError, ConvergenceFailure, SolverSetupError

METHODS = ("direct", "schur")


@dataclass(frozen=True)
class SolverConfig:
    method: str = "direct"
    tol: float = 1e-10
    max_iter: int = 2000

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigurationError(f"unknown solver method {self.method!r}; expected one of {METHODS}")
        if not (0.0 < self.tol <= 1e-4):
            raise ConfigurationError(f"solver tolerance must lie in (0, 1e-4], got {self.tol}")
        if int(self.max_iter) < 1:
            raise ConfigurationError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass(frozen=True)
class MixedSolution:
    u: np.ndarray
    p: np.ndarray
    residual: float
    iterations: int
    method: str = "direct"

    def scaled(self, alpha):
        return MixedSolution(self.u * alpha, self.p * alpha, self.residual, self.iterations,
                             self.method)


def relative_residual(system, z):
    r = system.matrix @ z - system.rhs
    nb = np.linalg.norm(system.rhs)
    nr = np.linalg.norm(r)
    return nr / nb if nb > 0 else nr


def _factorize(A):
    try:
        return spla.splu(A.tocsc())
    except RuntimeError as exc:  # SuperLU reports singular matrices this way
        raise SolverSetupError(f"factorization failed: {exc}") from exc


def _solve_direct(system, cfg):
    lu = _factorize(system.matrix)
    z = lu.solve(system.rhs)
    if not np.all(np.isfinite(z)):
        raise SolverSetupError("direct solve produced non-finite values (singular system)")
    return z, 1


def _solve_schur(system, cfg):
    """CG on the pressure Schur complement ``S = B M^-1 B^T``."""
    n_u = system.n_u
    r1, r2 = system.rhs[:n_u], system.rhs[n_u:]
    M, B = system.M, system.B
    m_lu = _factorize(M)
    S = spla.LinearOperator((system.n_p, system.n_p),
                            matvec=lambda q: B @ m_lu.solve(B.T @ q), dtype=float)
    diag = np.asarray((B.multiply(B) @ sp.diags(1.0 / M.diagonal())).sum(axis=1)).ravel()
    precond = spla.LinearOperator(S.shape, matvec=lambda q: q / diag, dtype=float)
    rhs = B @ m_lu.solve(r1) - r2
    count = [0]

    def tick(_):
        count[0] += 1

    p, info = spla.cg(S, rhs, rtol=cfg.tol * 1e-2, atol=0.0, maxiter=int(cfg.max_iter),
                      M=precond, callback=tick)
    u = m_lu.solve(r1 - B.T @ p)
    z = np.concatenate([u, p])
    if info > 0:
        raise ConvergenceFailure(
            f"Schur CG stopped after {count[0]} iterations",
            residual=relative_residual(system, z), iterations=count[0])
    return z, count[0]


def solve(system, cfg: SolverConfig | None = None) -> MixedSolution:
    """Solve ``system`` and check the relative algebraic residual against ``cfg.tol``."""
    cfg = cfg or SolverConfig()
    if not np.any(system.rhs):
        return MixedSolution(np.zeros(system.n_u), np.zeros(system.n_p), 0.0, 0, cfg.method)
    if cfg.method == "direct":
        z, its = _solve_direct(system, cfg)
    else:
        z, its = _solve_schur(system, cfg)
    res = relative_residual(system, z)
    if res > cfg.tol:
        raise ConvergenceFailure(f"relative residual {res:.3e} above tolerance {cfg.tol:.1e}",
                                 residual=res, iterations=its)
    return MixedSolution(z[:system.n_u].copy(), z[system.n_u:].copy(), res, its, cfg.method)
