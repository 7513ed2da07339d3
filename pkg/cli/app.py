"""
abc-control Entry Point
Parses the command line, runs the requested workflow and maps failures to exit codes
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from adjoint_control import PreconditionError, optimize
from config import Config
from forward_solver import NumericalError, apriori_check, apriori_constants, initial_jump, residual, solve_forward
from mittag_leffler import MlfAccuracyError

from .errors import ScenarioError
from .scenario import ScenarioConfig, load_scenario
from .suites import SUITES, run_convergence, run_suite
from .writers import write_diagnostics, write_field, write_modal, write_optimize_log

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_ACCURACY = 3
EXIT_NOT_CONVERGED = 4


def _output_dir(config: ScenarioConfig, override: Optional[str]) -> Path:
    out = Path(override or config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def run_solve(config: ScenarioConfig, out_dir: Path) -> int:
    """Forward solve with modal, physical and diagnostic output"""
    ctx, grid, y0 = config.ctx(), config.grid(), config.y0()
    f = config.forcing(grid)
    y = solve_forward(y0, f, ctx, grid)

    constants = apriori_constants(ctx, y0.basis, grid)
    report = apriori_check(y, y0, f, constants)
    entries = [
        ("residual", residual(y, f, ctx), ""),
        ("max_initial_jump", float(abs(initial_jump(y)).max()), ""),
        ("mlf_bound_constant", constants.c_mlf, ""),
    ]
    entries.extend((f"apriori_{check.name}", check.measured, check.bound) for check in report.checks)

    write_modal(out_dir / "modal.csv", y)
    write_field(out_dir / "field.csv", y, "y")
    write_diagnostics(out_dir / "diagnostics.csv", entries)
    return EXIT_OK


def run_optimize(config: ScenarioConfig, out_dir: Path) -> int:
    """Optimal control solve; history is written even when the optimizer does not converge"""
    problem = config.control_problem()
    settings = config.control
    result = optimize(problem, tol=settings.cg_tol, max_iter=settings.max_iter, method=settings.method)

    write_field(out_dir / "control.csv", result.u_hat, "u_hat")
    write_field(out_dir / "state.csv", result.y_hat, "y_hat")
    write_field(out_dir / "adjoint.csv", result.eta, "eta")
    write_optimize_log(out_dir / "optimize_log.csv", result)
    print(f"J = {result.j_value:.17g}")
    print(f"iterations = {result.iterations}")
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def run_verify(suite: str) -> int:
    if suite != "all" and suite not in SUITES:
        raise ScenarioError(f"unknown suite {suite!r}, expected one of {sorted(SUITES) + ['all']}", key="suite")
    checks = run_suite(suite)
    return EXIT_OK if all(check.passed for check in checks) else EXIT_VERIFY_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abc-control",
        description="Atangana-Baleanu fractional diffusion: forward solves, optimal control and verification",
    )
    parser.add_argument("command", choices=["solve", "optimize", "verify", "convergence"])
    parser.add_argument("--config", help="scenario INI file")
    parser.add_argument("--out", help="output directory (overrides [output] dir)")
    parser.add_argument("--suite", default="all", help="verification suite: mlf, fracops, duality, adjoint, gradient, all")
    parser.add_argument("--refinements", type=int, default=3, help="number of dt halvings for convergence")
    return parser


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "verify":
        return run_verify(args.suite)

    if not args.config:
        raise ScenarioError(f"--config is required for {args.command}", key="config")
    config = load_scenario(args.config)
    out_dir = _output_dir(config, args.out)

    if args.command == "solve":
        return run_solve(config, out_dir)
    if args.command == "optimize":
        return run_optimize(config, out_dir)
    if args.refinements < 2:
        raise ScenarioError(f"refinements must be >= 2, got {args.refinements}", key="refinements")
    run_convergence(config, args.refinements, out_dir)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """
    Console entry point.

    Returns:
        0 success, 1 verification failure, 2 configuration error,
        3 solver accuracy error, 4 optimizer non-convergence
    """
    Config.reload()
    logging.basicConfig(level=getattr(logging, Config.LOG_LEVEL.upper(), logging.INFO))

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_CONFIG

    try:
        Config.validate()
        return _dispatch(args)

    except ScenarioError as e:
        logger.error(f"Configuration error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    except (MlfAccuracyError, NumericalError) as e:
        logger.error(f"Solver accuracy error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ACCURACY

    except (PreconditionError, ValueError) as e:
        logger.error(f"Invalid input: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    except Exception as e:
        logger.error(f"Unexpected error: {str(e)}", exc_info=True)
        return EXIT_VERIFY_FAILED
