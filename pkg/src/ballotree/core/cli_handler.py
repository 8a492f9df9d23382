"""
CLI Handler for ballotree.
Each run_* function backs one subcommand and returns the process exit status.
Data (trees, winners, JSON reports) goes to stdout; status lines go to stderr.
"""
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from .constructions import (
    baseline,
    lambda_against,
    lambda_full,
    lambda_sq,
    omega,
    omega_candidates,
    omega_for,
    phi_tree,
    psi,
    psi_anchored,
)
from .errors import DomainError, FormatError
from .expression_parser import parse_expression
from .f3_circuits import GATES, compile_expr, expr_variables, truth_table
from .tournament import Direction, Tournament
from .tree_format import parse, serialize
from .verification import LEMMAS, Verifier
from .voting_tree import VotingTree, evaluate, match, stats
from ..models.report import SweepMode, TreeStatsReport, VerificationReport
from ..utils.system import format_count, format_duration

logger = logging.getLogger(__name__)

CONSTRUCTIONS = ("match", "baseline", "lambda", "lambda2", "phi", "psi", "omega", *GATES)
CHECKS = ("gates", "theorem1", "guarantee", "baseline", "manipulator", *LEMMAS)


def _status(message: str):
    print(message, file=sys.stderr)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _emit(text: str, output: Optional[str]):
    if output:
        Path(output).write_text(text, encoding="utf-8")
        _status(f"💾 Written to {output}")
    else:
        sys.stdout.write(text)


def _require(value: Optional[int], flag: str, name: str) -> int:
    if value is None:
        raise DomainError(f"'{name}' needs {flag}")
    return value


def parse_bindings(pairs: Optional[Sequence[str]]) -> Dict[str, int]:
    """VAR=value pairs from --bind."""
    bindings: Dict[str, int] = {}
    for item in pairs or []:
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise FormatError(f"bindings look like VAR=value, got {item!r}")
        try:
            bindings[name.strip()] = int(value)
        except ValueError:
            raise FormatError(f"binding value for {name.strip()} must be an integer, got {value!r}") from None
    return bindings


def parse_candidate_list(text: Optional[str]) -> Optional[List[int]]:
    if text is None:
        return None
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise FormatError(f"expected a comma-separated candidate list, got {text!r}") from None


def build_construction(name: str, n: Optional[int] = None, k: Optional[int] = None,
                       i: Optional[int] = None, j: Optional[int] = None,
                       against: Optional[List[int]] = None, anchor: Optional[int] = None) -> VotingTree:
    """Resolve a construction name and its parameters to a tree."""
    if name == "match":
        return match(_require(i, "--i", name), _require(j, "--j", name))
    if name == "baseline":
        return baseline(_require(n, "--n", name))
    if name == "lambda":
        if against is not None:
            return lambda_against(_require(i, "--i", name), against)
        return lambda_full(_require(i, "--i", name), _require(n, "--n", name))
    if name == "lambda2":
        return lambda_sq(_require(i, "--i", name), _require(n, "--n", name))
    if name == "phi":
        return phi_tree(_require(n, "--n", name))
    if name == "psi":
        n = _require(n, "--n", name)
        return psi(n) if anchor is None else psi_anchored(n, anchor)
    if name == "omega":
        if k is not None:
            return omega(k)
        return omega_for(_require(n, "--k or --n", name))[1]
    if name in GATES:
        return GATES[name].tree()
    raise DomainError(f"unknown construction '{name}', expected one of {', '.join(CONSTRUCTIONS)}")


def run_build(name: str, n: Optional[int] = None, k: Optional[int] = None, i: Optional[int] = None,
              j: Optional[int] = None, against: Optional[str] = None, anchor: Optional[int] = None,
              output: Optional[str] = None, share: Optional[bool] = None) -> int:
    """Build a named construction and write it in tree text format."""
    tree = build_construction(name, n, k, i, j, parse_candidate_list(against), anchor)
    _emit(serialize(tree, share=share), output)
    _status(f"🌳 {name}: {format_count(tree.leaf_count)} leaves, depth {tree.depth}")
    return 0


def run_eval(tree_file: str, tournament_file: Optional[str] = None, direction: Optional[str] = None,
             bind: Optional[Sequence[str]] = None) -> int:
    """Print the winner of a tree on a tournament file or one of the two cyclic tournaments."""
    if (tournament_file is None) == (direction is None):
        raise DomainError("give exactly one of a tournament file or --direction")
    tree = parse(_read_text(tree_file))
    if direction is not None:
        tournament = Direction(direction).tournament
    else:
        tournament = Tournament.from_text(_read_text(tournament_file))
    winner = evaluate(tree, tournament, parse_bindings(bind))
    print(winner)
    return 0


def _print_report(report: VerificationReport, indent: str = ""):
    icon = "✅" if report.passed else "❌"
    mode = report.mode.value
    if report.mode is SweepMode.SAMPLED:
        mode += f", seed {report.seed}"
    print(f"{indent}{icon} {report.check} {report.params} [{mode}]")
    print(f"{indent}   {'Cases:':<10} {format_count(report.cases_run)}"
          + (f" / {format_count(report.expected_cases)}" if report.expected_cases is not None else ""))
    for key, value in report.observed.items():
        print(f"{indent}   {key + ':':<10} {value}")
    print(f"{indent}   {'Time:':<10} {format_duration(report.wall_time)}")
    if not report.passed and report.witness is not None:
        w = report.witness
        print(f"{indent}   ⚠️ Witness: {w.detail or ''}")
        if w.pm_spec:
            print(f"{indent}      {w.pm_spec}")
        if w.tournament:
            print(f"{indent}      " + w.tournament.strip().replace("\n", " "))
        if w.bindings:
            print(f"{indent}      bindings {w.bindings}")
    for sub in report.sub_reports:
        _print_report(sub, indent + "  ")


def run_verify(check: str, n: Optional[int] = None, k: Optional[int] = None, kmax: int = 4,
               mode: str = "exhaustive", samples: Optional[int] = None, seed: Optional[int] = None,
               jobs: Optional[int] = None, anchor: Optional[int] = None, tree_file: Optional[str] = None,
               bind: Optional[Sequence[str]] = None, force: bool = False, progress: bool = False,
               as_json: bool = False, output: Optional[str] = None, argv: Optional[List[str]] = None) -> int:
    """Run one check; exit status 0 on pass, 1 on failure."""
    verifier = Verifier(jobs=jobs, progress=progress, force=force, seed=seed)
    if check == "gates":
        report = verifier.check_gates(samples)
    elif check == "theorem1":
        report = verifier.check_theorem1(kmax, samples)
    elif check == "guarantee":
        k = _require(k, "--k", check)
        if tree_file is not None:
            tree = parse(_read_text(tree_file))
            report = verifier.check_guarantee(tree, _require(n, "--n", check), k, mode, samples,
                                              parse_bindings(bind))
        else:
            report = verifier.check_guarantee(omega(k), omega_candidates(k), k, mode, samples)
    elif check == "baseline":
        report = verifier.check_baseline(_require(n, "--n", check), mode, samples)
    elif check == "manipulator":
        report = verifier.check_manipulator(_require(n, "--n", check), mode, samples, anchor)
    elif check in LEMMAS:
        report = verifier.check_lemma(check, _require(n, "--n", check), mode, samples)
    else:
        raise DomainError(f"unknown check '{check}', expected one of {', '.join(CHECKS)}")

    report.argv = list(argv or [])
    if output:
        Path(output).write_text(report.to_json() + "\n", encoding="utf-8")
        _status(f"💾 Report written to {output}")
    if as_json:
        print(report.to_json())
    else:
        _print_report(report)
    return 0 if report.passed else 1


def run_compile(expression: str, table: bool = False, output: Optional[str] = None,
                share: Optional[bool] = None, variables: Optional[str] = None) -> int:
    """
    Compile an F3 expression to a voting tree. With --table the truth table
    takes stdout and the tree is only written when --output is given.
    """
    e = parse_expression(expression)
    names = sorted(expr_variables(e)) if variables is None else [v.strip() for v in variables.split(",") if v.strip()]
    tree = compile_expr(e, names)
    if not table or output:
        _emit(serialize(tree, share=share), output)
    _status(f"🧮 {e}: {format_count(tree.leaf_count)} leaves, depth {tree.depth}")
    if table:
        print(truth_table(tree, names).to_string(index=False))
    return 0


def run_stats(tree_file: str, as_json: bool = False) -> int:
    """Leaf count, depth and DAG node count of a tree file."""
    s = stats(parse(_read_text(tree_file)))
    if as_json:
        print(TreeStatsReport(leaf_count=str(s.leaf_count), depth=s.depth, dag_nodes=s.dag_nodes).model_dump_json())
        return 0
    print(f"{'Leaves:':<12} {s.leaf_count}")
    print(f"{'Depth:':<12} {s.depth}")
    print(f"{'DAG nodes:':<12} {s.dag_nodes}")
    return 0
