#!/usr/bin/env python3
"""
Command-line interface for QMetric, quantum metrics on finite spaces.

Exit codes: 0 success or pass, 1 mathematically negative result (an axiom
fails, no certified candidate, the no-go is not reproduced), 2 usage, parse or
precondition error.
"""

import argparse
import json
import os
import sys
import time
import traceback
from typing import Any, Dict, Optional, Sequence, cast

import numpy as np

from . import __version__
from .algebra import AlgebraElement, AlgebraShape, BiElement, diag_projector
from .axioms import verify
from .config import load_env, tolerances_from_env, validate_config
from .constants import SEARCH_EPS, SEARCH_MAX_ITER, SEARCH_RESIDUAL_TOL, SEARCH_RESTARTS
from .construct import conic_combine, direct_sum, from_finite_metric, tensor_product
from .exceptions import QMetricError
from .exchange import (
    dump_bracket,
    dump_candidate,
    dump_element,
    dump_nogo,
    dump_outcome,
    dump_report,
    load_element,
    load_metric,
    load_metric_space,
    load_state,
)
from .lipschitz import check_leibniz, lip_seminorm, mk_distance
from .models import AxiomReport, MetricCandidate, SearchConfig, State, ToleranceConfig
from .modes import axiom_statement, get_available_mode_names, get_default_mode
from .nogo import DEFAULT_LAMBDAS, run_nogo_m2
from .search import feasibility_search

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2


def _common_parser() -> argparse.ArgumentParser:
    """Flags shared by every subcommand."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--mode",
        "-m",
        type=str,
        choices=get_available_mode_names(),
        default=get_default_mode().mode,
        help=f"Definition mode (default: {get_default_mode().mode}).",
    )
    common.add_argument(
        "--output", "-o", type=str, help="Write the JSON result to this file."
    )
    common.add_argument(
        "--json", action="store_true", help="Print machine output only."
    )
    common.add_argument("--quiet", "-q", action="store_true", help="No tables.")
    common.add_argument(
        "--verbose", "-v", action="store_true", help="Show detailed output."
    )
    common.add_argument("--seed", type=int, help="Seed of every random draw.")
    common.add_argument("--eq-tol", type=float, help="Equality tolerance.")
    common.add_argument("--psd-tol", type=float, help="Positivity tolerance.")
    common.add_argument("--strict-floor", type=float, help="(iii)' floor.")
    common.add_argument(
        "--sample-count", type=int, help="Test elements for the (iii)'' check."
    )
    return common


def create_parser() -> argparse.ArgumentParser:
    """Create the argument parser."""
    parser = argparse.ArgumentParser(
        prog="qmetric",
        description="Quantum metrics on finite-dimensional C*-algebras.",
        epilog="""
Examples:
  qmetric pdelta --shape 2

  # Verify a candidate metric
  qmetric verify rho.json --mode representation

  # Constructions
  qmetric construct classical space.json -o a.json
  qmetric construct direct-sum a.json b.json --r 1

  # Search and transport
  qmetric search --shape 3 --eps 1e-6 --trace-target 9 --restarts 8 --seed 42
  qmetric distance --classical space.json --phi 0 --psi 2

  # The no-go computation on M_2
  qmetric nogo-m2 --lambdas 0.1 1 10
        """,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument(
        "--version", action="version", version=f"qmetric v{__version__}"
    )
    common = _common_parser()
    commands = parser.add_subparsers(dest="command", required=True)

    verify_parser = commands.add_parser(
        "verify", parents=[common], help="Check the axioms of a candidate metric."
    )
    verify_parser.add_argument("path", help="Matrix document of rho.")

    construct = commands.add_parser(
        "construct", parents=[common], help="Build a metric from simpler ones."
    )
    construct.add_argument(
        "kind", choices=["classical", "conic", "direct-sum", "tensor"]
    )
    construct.add_argument(
        "inputs",
        nargs="+",
        help="A metric space file for classical, two metric documents otherwise.",
    )
    construct.add_argument("--r", type=float, help="Weight of conic and direct-sum.")

    search = commands.add_parser(
        "search", parents=[common], help="Search for a metric on a shape."
    )
    search.add_argument("--shape", type=str, required=True, help="Blocks, e.g. 2,1.")
    search.add_argument("--eps", type=float, default=SEARCH_EPS)
    search.add_argument("--trace-target", type=float)
    search.add_argument("--restarts", type=int, default=SEARCH_RESTARTS)
    search.add_argument("--max-iter", type=int, default=SEARCH_MAX_ITER)
    search.add_argument("--residual-tol", type=float, default=SEARCH_RESIDUAL_TOL)
    search.add_argument(
        "--drop-triangle",
        action="store_true",
        help="Diagnostic: leave out the triangle inequality (v)'.",
    )
    search.add_argument("--gauge", choices=["trace", "norm"], default="trace")

    lipschitz = commands.add_parser(
        "lipschitz", parents=[common], help="Lipschitz seminorm of an element."
    )
    lipschitz.add_argument("metric", help="Matrix document of rho.")
    lipschitz.add_argument("--a", required=True, help="Matrix document of a.")
    lipschitz.add_argument(
        "--leibniz", metavar="B", help="Also check the Leibniz estimate with b."
    )

    distance = commands.add_parser(
        "distance", parents=[common], help="Monge-Kantorovich distance of states."
    )
    distance.add_argument("metric", nargs="?", help="Matrix document of rho.")
    distance.add_argument(
        "--classical", metavar="SPACE", help="Metric space file; points as states."
    )
    distance.add_argument("--phi", required=True, help="State file or point index.")
    distance.add_argument("--psi", required=True, help="State file or point index.")

    nogo = commands.add_parser(
        "nogo-m2", parents=[common], help="Reproduce the no-go computation on M_2."
    )
    nogo.add_argument(
        "--lambdas", type=float, nargs="+", default=list(DEFAULT_LAMBDAS)
    )

    pdelta = commands.add_parser(
        "pdelta", parents=[common], help="The diagonal projector P_delta."
    )
    pdelta.add_argument("--shape", type=str, required=True, help="Blocks, e.g. 2.")

    return parser


def read_text(file_path: str) -> str:
    """
    Read an input file.

    Raises:
        FileNotFoundError: If the file does not exist.
    """
    with open(file_path, "r", encoding="utf-8") as f:
        return f.read()


def save_text(text: str, file_path: str, announce: bool = True) -> None:
    """Write a result document, creating parent directories."""
    output_path = os.path.abspath(file_path)
    os.makedirs(os.path.dirname(output_path), exist_ok=True)
    with open(output_path, "w", encoding="utf-8") as f:
        f.write(text)
    if announce:
        print(f"✓ Result saved to: {output_path}")


def format_matrix(data: np.ndarray) -> str:
    """Real matrices print as reals, others with complex entries."""
    values = data.real if np.allclose(data.imag, 0.0) else data
    return np.array2string(values, precision=6, suppress_small=True, max_line_width=120)


def format_report(report: AxiomReport) -> str:
    lines = [f"Axioms ({report.mode} mode) on shape {report.shape}:"]
    for record in report.records:
        verdict = "pass" if record.passed else "FAIL"
        if record.indeterminate:
            verdict = "n/a"
        note = f"  {record.note}" if record.note else ""
        lines.append(
            f"  ({record.axiom:<7}) {verdict:<4}  margin {record.margin: .6e}{note}"
        )
    for axiom in report.skipped:
        lines.append(f"  ({axiom:<7}) skipped  {axiom_statement(axiom)}")
    return "\n".join(lines)


class Output:
    """Routes results to stdout, files and tables according to the flags."""

    def __init__(self, args: argparse.Namespace):
        self.json = args.json
        self.quiet = args.quiet or args.json
        self.path = args.output

    def say(self, text: str) -> None:
        if not self.quiet:
            print(text)

    def emit(self, document: str, table: Optional[str] = None) -> None:
        if self.path:
            save_text(document, self.path, announce=not self.quiet)
        if self.json:
            print(document)
        elif table is not None:
            self.say(table)


def _tolerances(args: argparse.Namespace) -> ToleranceConfig:
    return tolerances_from_env(
        {
            "eq_tol": args.eq_tol,
            "psd_tol": args.psd_tol,
            "strict_floor": args.strict_floor,
            "sample_count": args.sample_count,
            "seed": args.seed,
        }
    )


def _load_candidate(path: str) -> MetricCandidate:
    return MetricCandidate.from_rho(load_metric(read_text(path)))


def cmd_verify(args: argparse.Namespace, out: Output) -> int:
    rho = load_metric(read_text(args.path))
    report = verify(rho, cfg=_tolerances(args), mode=args.mode, verbose=args.verbose)
    out.emit(dump_report(report), format_report(report))
    return EXIT_OK if report.passed else EXIT_NEGATIVE


def cmd_construct(args: argparse.Namespace, out: Output) -> int:
    cfg = _tolerances(args)
    expected = 1 if args.kind == "classical" else 2
    if len(args.inputs) != expected:
        raise QMetricError(f"construct {args.kind} takes {expected} input file(s).")
    if args.kind in ("conic", "direct-sum"):
        if args.r is None:
            raise QMetricError(f"construct {args.kind} needs --r.")
        validate_config({"r": args.r})

    if args.kind == "classical":
        space = load_metric_space(read_text(args.inputs[0]))
        candidate = from_finite_metric(space, args.mode, cfg)
    else:
        m1, m2 = (_load_candidate(path) for path in args.inputs)
        if args.kind == "conic":
            candidate = conic_combine(m1, m2, args.r, args.mode, cfg)
        elif args.kind == "direct-sum":
            candidate = direct_sum(m1, m2, args.r, args.mode, cfg)
        else:
            candidate = tensor_product(m1, m2, args.mode, cfg)

    table = (
        f"Constructed rho on shape {candidate.shape}, "
        f"diameter {candidate.diameter:.6g}."
    )
    if candidate.report is not None:
        table += "\n" + format_report(candidate.report)
    out.emit(dump_candidate(candidate), table)
    return EXIT_OK if candidate.verified else EXIT_NEGATIVE


def cmd_search(args: argparse.Namespace, out: Output) -> int:
    validate_config({"mode": args.mode, "gauge": args.gauge, "eps": args.eps})
    cfg = SearchConfig(
        shape=AlgebraShape.parse(args.shape),
        eps=args.eps,
        trace_target=args.trace_target,
        max_iter=args.max_iter,
        restarts=args.restarts,
        seed=args.seed if args.seed is not None else 0,
        residual_tol=args.residual_tol,
        drop_triangle=args.drop_triangle,
        gauge=args.gauge,
    )
    outcome = feasibility_search(cfg, args.mode, verbose=args.verbose)
    lines = [
        f"Search on shape {cfg.shape} ({args.mode} mode): {outcome.status}.",
        f"  best residual {outcome.best_residual:.3e} at restart "
        f"{outcome.restart_index}, {outcome.iterations} iterations.",
    ]
    if outcome.candidate is not None and outcome.candidate.report is not None:
        lines.append(format_report(outcome.candidate.report))
    out.emit(dump_outcome(outcome), "\n".join(lines))
    return EXIT_OK if outcome.status == "candidate_found" else EXIT_NEGATIVE


def cmd_lipschitz(args: argparse.Namespace, out: Output) -> int:
    candidate = _load_candidate(args.metric)
    a = cast(AlgebraElement, load_element(read_text(args.a), order=1))
    result: Dict[str, Any] = {"lip": lip_seminorm(a, candidate)}
    lines = [f"||a||_Lip = {result['lip']:.10g}"]
    holds = True
    if args.leibniz:
        b = cast(AlgebraElement, load_element(read_text(args.leibniz), order=1))
        check = check_leibniz(a, b, candidate)
        holds = check.holds
        result["leibniz"] = check.model_dump()
        verdict = "holds" if holds else "FAILS"
        lines.append(f"Leibniz estimate: {verdict}, slack {check.slack:.6g}")
    out.emit(json.dumps(result, indent=2), "\n".join(lines))
    return EXIT_OK if holds else EXIT_NEGATIVE


def _state_argument(value: str, shape: AlgebraShape, classical: bool) -> State:
    if classical:
        try:
            return State.from_point(shape, int(value))
        except (IndexError, ValueError) as e:
            raise QMetricError(f"Invalid point '{value}': {e}") from e
    return load_state(read_text(value))


def cmd_distance(args: argparse.Namespace, out: Output) -> int:
    cfg = _tolerances(args)
    if args.classical:
        space = load_metric_space(read_text(args.classical))
        candidate = from_finite_metric(space, args.mode, cfg)
    elif args.metric:
        candidate = _load_candidate(args.metric)
    else:
        raise QMetricError("distance needs a metric document or --classical SPACE.")
    phi = _state_argument(args.phi, candidate.shape, bool(args.classical))
    psi = _state_argument(args.psi, candidate.shape, bool(args.classical))
    bracket = mk_distance(phi, psi, candidate, cfg, verbose=args.verbose)
    table = (
        f"d(phi, psi) in [{bracket.lower:.10g}, {bracket.upper:.10g}] "
        f"({bracket.method}, converged: {bracket.converged}, "
        f"{bracket.iterations} iterations)"
    )
    out.emit(dump_bracket(bracket), table)
    return EXIT_OK


def cmd_nogo_m2(args: argparse.Namespace, out: Output) -> int:
    report = run_nogo_m2(args.lambdas, _tolerances(args), verbose=args.verbose)
    lines = ["lambda      defect err  identity err  witness     lambda_min  failing"]
    for entry in report.entries:
        lines.append(
            f"{entry.lam:<11g} {entry.defect_max_error:<11.1e} "
            f"{entry.identity_max_error:<13.1e} {entry.witness_value:<11g} "
            f"{entry.min_eigenvalue:<11.6g} {','.join(entry.failing_axioms)}"
        )
    verdict = "reproduced" if report.reproduced else "NOT reproduced"
    lines.append(f"No quantum metric on M_2: {verdict}.")
    out.emit(dump_nogo(report), "\n".join(lines))
    return EXIT_OK if report.reproduced else EXIT_NEGATIVE


def cmd_pdelta(args: argparse.Namespace, out: Output) -> int:
    projector: BiElement = diag_projector(AlgebraShape.parse(args.shape))
    out.emit(dump_element(projector), format_matrix(projector.data))
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "construct": cmd_construct,
    "search": cmd_search,
    "lipschitz": cmd_lipschitz,
    "distance": cmd_distance,
    "nogo-m2": cmd_nogo_m2,
    "pdelta": cmd_pdelta,
}


def main(argv: Optional[Sequence[str]] = None) -> None:
    """Main entry point for the CLI."""
    parser = create_parser()
    args = parser.parse_args(argv)
    out = Output(args)
    try:
        out.say(f"🔧 Starting QMetric {args.command} run now.")
        start_time = time.time()
        load_env(verbose=args.verbose and not out.quiet)

        code = COMMANDS[args.command](args, out)

        duration = time.time() - start_time
        out.say(f"🎉 QMetric {args.command} run complete in {duration:.2f} seconds.")
        if not args.output and not out.quiet:
            print("💡 Tip: Use --output to save the JSON result to a file.")
        sys.exit(code)
    except (QMetricError, ValueError, FileNotFoundError) as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(EXIT_ERROR)
    except Exception as e:
        print("Error: QMetric run failed: " + str(e) + ".", file=sys.stderr)
        traceback.print_exc()
        sys.exit(EXIT_ERROR)


if __name__ == "__main__":
    main()
