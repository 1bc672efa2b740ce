"""
Command-line translation layer – only argument parsing, exit codes and printing.
No rate, coding or simulation logic lives here.
"""
import argparse
import sys
from typing import TextIO

import structlog
from pydantic import ValidationError

from app.core.config import Settings
from app.core.exceptions import (
    AlphabetMismatchError,
    BudgetViolationError,
    CapacityError,
    CodeConstructionError,
    ConfigurationError,
    DistortionAuditError,
    DistributionError,
    InfeasibleSpecError,
    SearchSpaceError,
    SolverError,
    SpecMismatchError,
)
from app.core.logging import setup_logging
from app.services.run_config import Workflow, build_run_config, load_run_config
from app.services.workflows import WorkflowResult, run_workflow

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INFEASIBLE = 2
EXIT_AUDIT = 3

# ---------- Error → exit code ----------
EXIT_CODES: list[tuple[type[CapacityError], int]] = [
    (ConfigurationError, EXIT_CONFIG),
    (DistortionAuditError, EXIT_AUDIT),
    (BudgetViolationError, EXIT_AUDIT),
    (SolverError, EXIT_AUDIT),
    (InfeasibleSpecError, EXIT_INFEASIBLE),
    (SpecMismatchError, EXIT_INFEASIBLE),
    (SearchSpaceError, EXIT_INFEASIBLE),
    (CodeConstructionError, EXIT_INFEASIBLE),
    (AlphabetMismatchError, EXIT_INFEASIBLE),
    (DistributionError, EXIT_INFEASIBLE),
]


def exit_code_for(error: CapacityError) -> int:
    for kind, code in EXIT_CODES:
        if isinstance(error, kind):
            return code
    return EXIT_CONFIG


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="advcap",
        description="Capacity formulas, codes and Monte Carlo runs for multi-route channels with modifying adversaries.",
    )
    parser.add_argument("--config", help="run config file (.toml or .json)")
    parser.add_argument(
        "--workflow", choices=[w.value for w in Workflow] + ["table1"], help="override the config's workflow"
    )
    parser.add_argument("--seed", type=int, help="master seed for stochastic workflows")
    parser.add_argument("--out-dir", dest="out_dir", help="directory for artifacts")
    parser.add_argument("--trials", type=int, help="Monte Carlo trials per placement")
    parser.add_argument("--n", type=int, help="block length")
    parser.add_argument("--quiet", action="store_true", help="no progress bar and no summary on stdout")
    parser.add_argument("--log-level", dest="log_level", help="DEBUG, INFO, WARNING or ERROR")
    return parser


class CommandLine:
    """Parses flags, loads the run config and maps domain errors to exit codes."""

    def __init__(self, settings: Settings, stdout: TextIO | None = None, stderr: TextIO | None = None):
        self._settings = settings
        self._stdout = stdout or sys.stdout
        self._stderr = stderr or sys.stderr

    def run(self, argv: list[str] | None = None) -> int:
        args = build_parser().parse_args(argv)
        if args.log_level:
            setup_logging(args.log_level, self._settings.log_format)

        overrides = {
            "workflow": args.workflow,
            "seed": args.seed,
            "out_dir": args.out_dir,
            "trials": args.trials,
            "n": args.n,
        }
        try:
            if args.config:
                config = load_run_config(args.config, **overrides)
            elif args.workflow:
                config = build_run_config({}, **overrides)
            else:
                raise ConfigurationError("give --config or --workflow")
            result = run_workflow(config, progress=not args.quiet)
        except ValidationError as exc:
            return self._fail(ConfigurationError(f"invalid input: {exc}"))
        except CapacityError as e:
            return self._fail(e)

        if not args.quiet:
            self._print(result)
        return EXIT_OK

    def _fail(self, error: CapacityError) -> int:
        code = exit_code_for(error)
        logger.error("workflow_failed", error=str(error), kind=type(error).__name__, exit_code=code)
        print(f"error: {error}", file=self._stderr)
        return code

    def _print(self, result: WorkflowResult) -> None:
        for line in result.summary:
            print(line, file=self._stdout)
        for path in result.files:
            print(f"wrote {path}", file=self._stdout)
