"""Command line entry point: ``evmfem run|convergence|validate``."""

from __future__ import annotations

import argparse
import logging
import sys

from ..errors import ConfigurationError, ConvergenceFailure, EvmfemError, SolverSetupError
from .config import load_config
from .study import run_case, run_convergence

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2


def _parser():
    p = argparse.ArgumentParser(prog="evmfem", description="Enhanced velocity mixed FEM runs "
                                "with a posteriori error estimation.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in (("run", "single run at coarse_n"),
                           ("convergence", "run every level and fit rates")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--config", required=True)
        s.add_argument("--out", required=True)
    s = sub.add_parser("validate", help="check a config file without running")
    s.add_argument("--config", required=True)
    return p


def _print_rows(rows):
    cols = ("level", "H", "err_u_energy", "eta_P", "eta_R", "eta_EV", "effectivity_flux")
    print("  ".join(f"{c:>14s}" for c in cols))
    for r in rows:
        print("  ".join(f"{r[c]:>14d}" if isinstance(r[c], int) else f"{r[c]:>14.6e}" for c in cols))


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        if args.command == "validate":
            for n in cfg.level_list:
                cfg.spec(n)
            print(f"{args.config}: ok (case {cfg.case}, levels {list(cfg.level_list)})")
            return EXIT_OK
        if args.command == "run":
            res = run_case(cfg, args.out)
            _print_rows([res.result.row])
        else:
            table = run_convergence(cfg, args.out)
            _print_rows(table.rows)
            for q, fit in table.slopes.items():
                print(f"slope {q:>14s}: " + ("n/a" if fit is None else f"{fit.slope:.3f}"))
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceFailure, SolverSetupError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except EvmfemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
