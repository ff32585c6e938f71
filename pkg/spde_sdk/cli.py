"""
Command-Line Interface

    spde-sdk [--log-level LEVEL] COMMAND [options]

Commands:
    solve               one sample path; final field as CSV
    converge-space      spatial convergence table
    converge-time       temporal convergence table
    diagnose-noise      closed-form noise diagnostics
    diagnose-solution   Monte Carlo regularity and stability diagnostics
    mesh-dump           graded mesh as CSV

Exit codes: 0 success, 1 invalid input or I/O failure, 2 numeric failure.

Author: graded-spde-sdk developers
"""

import argparse
import logging
import os
import sys
from typing import List, Optional

from . import __version__
from .config import ExperimentConfig, load_config
from .diagnostics import (
    besov_sobolev_contrast,
    default_t_grid,
    inverse_inequality_check,
    ito_isometry_check,
    sharpness_probe,
    verify_assumption3,
)
from .errors import DomainError, NumericError, ReportError, ValidationError
from .field_store import (
    write_diagnostic_csv,
    write_field_csv,
    write_nodal_csv,
    write_summary,
    write_trajectory_csv,
)
from .harness import (
    dump_mesh,
    emit_report,
    record_output,
    reference_mesh,
    regularity_scan,
    run_spatial_convergence,
    run_temporal_convergence,
    solve_single,
    stability_scan,
)
from .run_ledger import RunLedger

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERIC = 2

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with the invalid-input code."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value configuration file")
    common.add_argument("--seed", type=lambda s: int(s, 0), dest="master_seed", metavar="U64",
                        help="master seed (overrides SPDE_SEED)")
    common.add_argument("--samples", type=int, help="Monte Carlo samples")
    common.add_argument("--gamma", help="grading exponent")
    common.add_argument("--T", dest="T", help="final time")
    common.add_argument("--spectrum", help="white | power:DELTA | trace:DELTA")
    common.add_argument("--datum", help="sine | dirac | mode:K | zero")
    common.add_argument("--variant", choices=("galerkin", "collocation"))
    common.add_argument("--drift", help="registered drift name")
    common.add_argument("--modes", metavar="LIST", help="comma-separated mode counts")
    common.add_argument("--taus", metavar="LIST", help="comma-separated step sizes, e.g. 1/16,1/32")
    common.add_argument("--beta", help="initial-data regularity")
    common.add_argument("--workers", type=int, help="worker processes")
    common.add_argument("--override-gamma", action="store_true", default=None,
                        help="warn instead of failing on a violated gamma bound")
    common.add_argument("--standard-first-step", action="store_true", default=None,
                        help="full exponential Euler first step")
    common.add_argument("--out", metavar="PATH", help="output path")
    common.add_argument("--ledger", metavar="PATH", help="JSON-lines run ledger to append to")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spde-sdk",
                     description="Graded-mesh solver for the stochastic heat equation.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default="INFO",
                        choices=("DEBUG", "INFO", "WARNING", "ERROR"))
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_options()

    solve = sub.add_parser("solve", parents=[common], help="solve one sample path")
    solve.add_argument("--sample-index", type=int, default=0)
    solve.add_argument("--trajectory", action="store_true", help="also write every level")
    sub.add_parser("converge-space", parents=[common], help="spatial convergence table")
    sub.add_parser("converge-time", parents=[common], help="temporal convergence table")
    sub.add_parser("diagnose-noise", parents=[common], help="closed-form noise diagnostics")
    sub.add_parser("diagnose-solution", parents=[common], help="Monte Carlo solution diagnostics")
    mesh = sub.add_parser("mesh-dump", parents=[common], help="write a graded mesh")
    mesh.add_argument("--steps", type=int, help="number of steps N")
    return parser


_CONFIG_FLAGS = ("master_seed", "samples", "gamma", "T", "spectrum", "datum", "variant", "drift",
                 "modes", "taus", "beta", "workers", "override_gamma", "standard_first_step", "out")


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    overrides = {key: getattr(args, key) for key in _CONFIG_FLAGS}
    return load_config(args.config, **overrides)


def _stem(path: str) -> str:
    root, ext = os.path.splitext(path)
    return root if ext.lower() == ".csv" else path


def _cmd_solve(cfg: ExperimentConfig, args, ledger: Optional[RunLedger]) -> None:
    result = solve_single(cfg, sample_index=args.sample_index, keep_trajectory=args.trajectory)
    final = result.final if args.trajectory else result
    write_field_csv(final, cfg.out)
    nodal = f"{_stem(cfg.out)}.nodal.csv"
    write_nodal_csv(final, nodal)
    if args.trajectory:
        write_trajectory_csv(result, f"{_stem(cfg.out)}.trajectory.csv")
    record_output(cfg, cfg.out, "solve", ledger, extra={"sample_index": args.sample_index})
    logger.info("Final field written to %s and %s", cfg.out, nodal)


def _write_reports(cfg: ExperimentConfig, reports, ledger: Optional[RunLedger], entry_type: str) -> None:
    stem = _stem(cfg.out)
    for i, report in enumerate(reports):
        path = f"{stem}.{i:02d}.csv"
        write_diagnostic_csv(report, path)
        record_output(cfg, path, entry_type, ledger, extra={"report": report.name,
                                                            "passed": report.passed})
        level = logging.INFO if report.passed else logging.WARNING
        logger.log(level, "%s: %s", report.name, "pass" if report.passed else "FAIL")
    summary = f"{stem}.summary.txt"
    write_summary(reports, summary)
    logger.info("Summary written to %s", summary)


def _cmd_diagnose_noise(cfg: ExperimentConfig, args, ledger: Optional[RunLedger]) -> None:
    spectrum = cfg.noise_spectrum()
    t_grid = default_t_grid(cfg.T, cfg.probe_levels)
    mesh = reference_mesh(cfg)
    reports = [
        verify_assumption3(spectrum, t_grid, K=cfg.probe_modes, J=cfg.probe_blocks),
        sharpness_probe(spectrum, t_grid=t_grid, K=cfg.probe_modes, J=cfg.probe_blocks),
    ]
    # the Sobolev series converges for trace-class noise
    if spectrum.is_trace_class:
        logger.info("Besov-Sobolev contrast not applicable to trace-class noise %s", spectrum.label())
    else:
        reports.append(besov_sobolev_contrast(
            spectrum, spectrum.alpha, t=cfg.T,
            J_list=range(max(1, cfg.probe_blocks - 6), cfg.probe_blocks + 1)))
    reports.extend([
        ito_isometry_check(spectrum, mesh, max(cfg.modes), mesh.N, samples=cfg.ito_samples,
                           seed=cfg.master_seed),
        inverse_inequality_check(cfg.modes, trials=cfg.samples, seed=cfg.master_seed),
    ])
    _write_reports(cfg, reports, ledger, "noise_diagnostic")


def _cmd_diagnose_solution(cfg: ExperimentConfig, args, ledger: Optional[RunLedger]) -> None:
    reports = [regularity_scan(cfg), stability_scan(cfg)]
    _write_reports(cfg, reports, ledger, "solution_diagnostic")


def _cmd_converge(cfg: ExperimentConfig, args, ledger: Optional[RunLedger]) -> None:
    if args.command == "converge-space":
        table = run_spatial_convergence(cfg)
    else:
        table = run_temporal_convergence(cfg)
    emit_report(table, cfg, cfg.out, ledger)


def _cmd_mesh_dump(cfg: ExperimentConfig, args, ledger: Optional[RunLedger]) -> None:
    mesh = dump_mesh(cfg, cfg.out, N=args.steps)
    record_output(cfg, cfg.out, "mesh", ledger, extra={"N": mesh.N})


COMMANDS = {
    "solve": _cmd_solve,
    "converge-space": _cmd_converge,
    "converge-time": _cmd_converge,
    "diagnose-noise": _cmd_diagnose_noise,
    "diagnose-solution": _cmd_diagnose_solution,
    "mesh-dump": _cmd_mesh_dump,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Run the command line; returns the process exit code."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format=LOG_FORMAT)
    try:
        cfg = _config_from_args(args)
        ledger = RunLedger.load(args.ledger) if args.ledger else None
        COMMANDS[args.command](cfg, args, ledger)
        if ledger is not None:
            ledger.save()
    except NumericError as exc:
        logger.error("Numeric failure: %s", exc)
        return EXIT_NUMERIC
    except (ValidationError, DomainError, ReportError) as exc:
        logger.error("%s", exc)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
