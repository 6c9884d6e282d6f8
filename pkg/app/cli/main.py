"""
Argument parsing and dispatch for the qpt command
"""

import argparse
import logging
import sys
from typing import Any, Dict, List, Optional

from app.cli.commands import COMMANDS
from app.core.errors import QptError
from app.schemas.run_config import RunConfig
from app.services.export_service import ExportService
from app.services.golden_service import GoldenService
from app.utils.responses import error_from_exception

logger = logging.getLogger(__name__)

GOLDEN_MISMATCH_EXIT = 3
GOLDEN_MISSING_EXIT = 4


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    model = common.add_argument_group("model")
    model.add_argument("--delta", type=float, help="bare tunneling (units of omega_c)")
    model.add_argument("--epsilon", type=float, help="bias, 0 <= epsilon <= 1e-3")
    model.add_argument("--k", dest="k_ising", type=float, help="direct Ising coupling K")
    model.add_argument("--alpha", type=float, help="dissipation strength")
    model.add_argument("--s", type=float, help="bath exponent, 0 < s <= 1")
    model.add_argument("--omega-c", dest="omega_c", type=float, help="cutoff frequency")

    grid = common.add_argument_group("grid")
    grid.add_argument("--start", type=float, help="first grid value (default 0)")
    grid.add_argument("--stop", type=float, help="last grid value; giving it turns on the grid")
    grid.add_argument("--count", type=int, help="grid points (>= 2)")
    grid.add_argument("--scale", choices=["linear", "log"])

    output = common.add_argument_group("output")
    output.add_argument("--config", help="JSON run configuration; flags override its values")
    output.add_argument("--output", "-o", help="output file (default stdout)")
    output.add_argument("--format", choices=["csv", "json"])
    output.add_argument("--threads", type=int, help="worker cap (default QPT_THREADS)")

    numerics = common.add_argument_group("numerics")
    numerics.add_argument("--quad-rel-tol", type=float)
    numerics.add_argument("--quad-abs-tol", type=float)
    numerics.add_argument("--quad-max-subdivisions", type=int)
    numerics.add_argument("--max-iter", type=int)
    numerics.add_argument("--fp-tol", type=float)
    numerics.add_argument("--damping", type=float)
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qpt",
        description="Ground state and localization transition of two qubits in a common bath",
    )
    parser.add_argument("--golden", action="store_true",
                        help="run the acceptance suite against the golden files and exit")
    parser.add_argument("--golden-dir", help="golden file directory (default GOLDEN_DIR)")
    parser.add_argument("--record", action="store_true",
                        help="with --golden, write golden files that do not exist yet")
    commands = parser.add_subparsers(dest="command")
    common = _common_flags()

    solve = commands.add_parser("solve", parents=[common], help="single point or alpha scan")
    solve.add_argument("--chi", action="store_true", default=None, help="also compute the susceptibility")
    solve.add_argument("--pinned", action="store_true", default=None,
                       help="also solve with sigma0 = 0 and report the energy gain")
    solve.add_argument("--branches", action="store_true", default=None,
                       help="solve from both sides and report every self-consistent branch")

    phase = commands.add_parser("phase", parents=[common], help="phase boundary alpha_c")
    phase.add_argument("--axis", choices=["delta", "k"], help="axis of the boundary grid")
    phase.add_argument("--s-values", type=float, nargs="+")

    for name, text in (("entropy", "entanglement entropy along alpha"),
                       ("corr", "qubit-qubit correlation along alpha")):
        sub = commands.add_parser(name, parents=[common], help=text)
        sub.add_argument("--k-values", type=float, nargs="+", help="one curve per K")
        sub.add_argument("--s-values", type=float, nargs="+", help="one curve per s")
        sub.add_argument("--delta-values", type=float, nargs="+", help="one curve per delta")

    exponents = commands.add_parser("exponents", parents=[common], help="critical exponents")
    exponents.add_argument("--s-values", type=float, nargs="+")
    exponents.add_argument("--data", action="store_true", default=None,
                           help="emit the log-log points behind the fits instead of the summary")

    oracle = commands.add_parser("oracle", parents=[common], help="exact diagonalization check")
    oracle.add_argument("--modes", dest="n_modes", type=int, help="discretized modes (<= 8)")
    oracle.add_argument("--n-max", type=int, help="bosons per mode")
    oracle.add_argument("--total-cap", type=int, help="cap on the total boson number")
    oracle.add_argument("--sweep", type=int, nargs="+", help="n_max values for a truncation sweep")
    return parser


def to_flags(args: argparse.Namespace) -> Dict[str, Any]:
    """Namespace -> RunConfig fields, leaving out flags that were not given"""
    flags = {key: value for key, value in vars(args).items()
             if key not in ("config", "golden", "golden_dir", "record", "start", "stop", "count", "scale")}
    if flags.get("axis") == "k":
        flags["axis"] = "k_ising"
    if args.stop is not None:
        flags["grid"] = {key: value for key, value in {
            "start": args.start if args.start is not None else 0.0,
            "stop": args.stop,
            "count": args.count,
            "scale": args.scale,
        }.items() if value is not None}
    return flags


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.golden:
        results = GoldenService.run(args.golden_dir, record=args.record)
        ExportService.write(ExportService.table_to_csv(results))
        if (results["status"] == "mismatch").any():
            return GOLDEN_MISMATCH_EXIT
        if (results["status"] == "missing").any():
            return GOLDEN_MISSING_EXIT
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1

    try:
        config = RunConfig.build(to_flags(args), args.config)
        text = COMMANDS[config.command](config)
        ExportService.write(text, config.output)
        return 0
    except QptError as exc:
        logger.debug("command failed", exc_info=True)
        sys.stderr.write(error_from_exception(exc).model_dump_json() + "\n")
        return exc.exit_code
