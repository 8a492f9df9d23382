"""
ballotree - Main Entry Point
"""
import argparse
import logging
import sys
from typing import List, Optional

from ballotree.core.errors import BallotreeError, ParseError
from ballotree.utils.config import get_config
from ballotree.utils.logger import setup_logging

logger = logging.getLogger("ballotree")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ballotree",
        description="Voting trees on tournaments: constructions, evaluation and exhaustive verification",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  ballotree build baseline --n 8
  ballotree build omega --k 3 --output omega3.tree
  ballotree eval omega3.tree tournament.txt
  ballotree eval add.tree --direction clockwise --bind X=1 --bind Y=2
  ballotree verify manipulator --n 8 --jobs 8
  ballotree verify theorem1 --kmax 4 --samples 1000000 --seed 7 --json
  ballotree compile "x^2 + 2*x*y + y^2" --table
  ballotree stats omega3.tree
"""
    )
    parser.add_argument("--log-level", default=None, help="Logging level (default from config: INFO)")
    parser.add_argument("--progress", action="store_true", help="Show progress bars for long sweeps")

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    # --- BUILD command ---
    from ballotree.core.cli_handler import CHECKS, CONSTRUCTIONS
    build_cmd = subparsers.add_parser("build", help="Build a named construction")
    build_cmd.add_argument("name", choices=CONSTRUCTIONS, help="Construction name")
    build_cmd.add_argument("--n", type=int, help="Number of candidates")
    build_cmd.add_argument("--k", type=int, help="Guarantee level (omega)")
    build_cmd.add_argument("--i", type=int, help="Distinguished candidate (match, lambda, lambda2)")
    build_cmd.add_argument("--j", type=int, help="Second candidate (match)")
    build_cmd.add_argument("--against", help="Opponent set for lambda, e.g. 2,4,6")
    build_cmd.add_argument("--anchor", type=int, help="Literal candidate placeholder for psi")
    build_cmd.add_argument("--output", "-o", help="Write the tree to a file instead of stdout")
    build_cmd.add_argument("--share", action=argparse.BooleanOptionalAction, default=None,
                           help="Force the shared (def) form on or off")

    # --- EVAL command ---
    eval_parser = subparsers.add_parser("eval", help="Evaluate a tree on a tournament")
    eval_parser.add_argument("tree", help="Tree file ('-' for stdin)")
    eval_parser.add_argument("tournament", nargs="?", help="Tournament file: 'n=<k>' line then the bits")
    eval_parser.add_argument("--direction", choices=["clockwise", "counterclockwise"],
                             help="Use a cyclic 3-vertex tournament instead of a file")
    eval_parser.add_argument("--bind", action="append", metavar="VAR=VALUE", help="Bind a variable leaf")

    # --- VERIFY command ---
    verify_parser = subparsers.add_parser("verify", help="Run a verification check")
    verify_parser.add_argument("check", choices=CHECKS, help="Check name")
    verify_parser.add_argument("--n", type=int, help="Number of candidates")
    verify_parser.add_argument("--k", type=int, help="Guarantee level")
    verify_parser.add_argument("--kmax", type=int, default=4, help="Highest omega level for theorem1")
    verify_parser.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
    verify_parser.add_argument("--samples", type=int, help="Sample count for sampled sweeps")
    verify_parser.add_argument("--seed", type=int, help="Seed for sampled sweeps")
    verify_parser.add_argument("--jobs", type=int, help="Worker processes (default: all CPUs)")
    verify_parser.add_argument("--anchor", type=int, help="Check the literal candidate-placeholder psi")
    verify_parser.add_argument("--tree", dest="tree_file", help="Tree file for 'guarantee'")
    verify_parser.add_argument("--bind", action="append", metavar="VAR=VALUE", help="Bind a variable leaf")
    verify_parser.add_argument("--force", action="store_true", help="Lift the exhaustive enumeration limit")
    verify_parser.add_argument("--json", action="store_true", dest="as_json", help="Print the JSON report")
    verify_parser.add_argument("--output", "-o", help="Also write the JSON report to a file")

    # --- COMPILE command ---
    compile_parser = subparsers.add_parser("compile", help="Compile an F3 expression to a voting tree")
    compile_parser.add_argument("expression", help='Infix expression, e.g. "x*y + 2"')
    compile_parser.add_argument("--table", action="store_true", help="Print the full truth table")
    compile_parser.add_argument("--vars", dest="variables", help="Declared variables, e.g. x,y")
    compile_parser.add_argument("--output", "-o", help="Write the tree to a file")
    compile_parser.add_argument("--share", action=argparse.BooleanOptionalAction, default=None)

    # --- STATS command ---
    stats_parser = subparsers.add_parser("stats", help="Leaf count, depth and DAG size of a tree")
    stats_parser.add_argument("tree", help="Tree file ('-' for stdin)")
    stats_parser.add_argument("--json", action="store_true", dest="as_json")

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Application entry point. Returns 0 on success, 1 on a failed check, 2 on usage or format errors."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help(sys.stderr)
        return 2

    config = get_config()
    setup_logging(config.log_dir, args.log_level or config.get('log_level'))
    logger.debug(f"ballotree {' '.join(argv)}")

    from ballotree.core import cli_handler

    try:
        if args.command == "build":
            return cli_handler.run_build(args.name, args.n, args.k, args.i, args.j,
                                         args.against, args.anchor, args.output, args.share)
        if args.command == "eval":
            return cli_handler.run_eval(args.tree, args.tournament, args.direction, args.bind)
        if args.command == "verify":
            return cli_handler.run_verify(
                args.check, n=args.n, k=args.k, kmax=args.kmax, mode=args.mode,
                samples=args.samples, seed=args.seed, jobs=args.jobs, anchor=args.anchor,
                tree_file=args.tree_file, bind=args.bind, force=args.force,
                progress=args.progress, as_json=args.as_json, output=args.output,
                argv=["ballotree", *argv],
            )
        if args.command == "compile":
            return cli_handler.run_compile(args.expression, args.table, args.output, args.share, args.variables)
        if args.command == "stats":
            return cli_handler.run_stats(args.tree, args.as_json)
    except ParseError as e:
        print(f"❌ {e.annotate()}", file=sys.stderr)
        return 2
    except (BallotreeError, OSError) as e:
        logger.debug(f"{args.command} failed", exc_info=True)
        print(f"❌ {e}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
