"""Command-line entry point.

Exit codes: 0 success, 1 failing tests / non-equivalence / not ready,
2 usage or input error, 3 internal error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .applications import classify_try_contracts, repair_readiness
from .metrics import improvement_report, purity_report, render_report
from .splitter import refactor_suite
from .testlang.corpus import load_paths, write_files
from .testlang.interpreter import DEFAULT_BUDGET
from .testlang.nodes import ElementId
from .testlang.parser import TLSyntaxError
from .testlang.results import dump_jsonl
from .testlang.runner import run_suite
from .trace import TraceAnalysis, dump_purity, tracked_elements
from .validator import ALL_OPERATORS, compare_matrices, generate_mutants, kill_matrix

BUDGET_ENV = "BREFACTOR_BUDGET"
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class CliConfig:
    subcommand: str
    paths: list = field(default_factory=list)
    element_kind: Optional[str] = None
    output: Optional[str] = None
    seed: int = 0
    budget: int = DEFAULT_BUDGET
    max_mutants: Optional[int] = None
    format: str = "text"


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"{BUDGET_ENV} must be a positive integer, got {raw!r}") from None
    if value <= 0:
        raise UsageError(f"{BUDGET_ENV} must be a positive integer, got {raw!r}")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _element(text: str) -> ElementId:
    try:
        return ElementId.parse(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected kind:file:function:ordinal, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="brefactor", description="Detect impure tests and split them into pure fragments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("paths", nargs="+", help=".tl files or directories")
    common.add_argument("--budget", type=_positive, default=None, help=f"step budget per test (default {DEFAULT_BUDGET}, or ${BUDGET_ENV})")
    common.add_argument("--format", choices=("text", "json"), default="text")
    kind = argparse.ArgumentParser(add_help=False)
    kind.add_argument("--elements", required=True, choices=("if", "try"), help="element kind to track")
    kind.add_argument("--only", type=_element, action="append", metavar="ELEMENT", help="track only this element (repeatable)")

    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="COMMAND")
    sub.add_parser("run", parents=[common], help="run the tests")
    p = sub.add_parser("trace", parents=[common, kind], help="trace and classify tests")
    p.add_argument("-o", "--output", help="also write the trace events as JSON lines to this file")
    p = sub.add_parser("refactor", parents=[common, kind], help="split impure tests")
    p.add_argument("-o", "--output", required=True, help="output directory for the refactored suite and plan.json")
    p = sub.add_parser("metrics", parents=[common, kind], help="purity statistics")
    p.add_argument("--compare", metavar="DIR", help="refactored suite to compare against")
    p = sub.add_parser("mutate", parents=[common], help="compare kill matrices of original and refactored suites")
    p.add_argument("--against", required=True, metavar="DIR", help="refactored suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max", type=_positive, default=None, dest="max_mutants", help="sample at most this many mutants")
    p.add_argument("--jobs", type=int, default=1, help="worker processes; 0 means one per CPU")
    p = sub.add_parser("contracts", parents=[common], help="classify try/catch contracts")
    p.add_argument("--refactored", metavar="DIR", help="refactored suite to compare against")
    p = sub.add_parser("repair-check", parents=[common], help="repair readiness of an if element")
    p.add_argument("--element", type=_element, required=True, help="kind:file:function:ordinal")
    return parser


def _config(args) -> CliConfig:
    return CliConfig(
        subcommand=args.subcommand,
        paths=list(args.paths),
        element_kind=getattr(args, "elements", None),
        output=getattr(args, "output", None),
        seed=getattr(args, "seed", 0),
        budget=args.budget if args.budget is not None else default_budget(),
        max_mutants=getattr(args, "max_mutants", None),
        format=args.format,
    )


def _dump(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def cmd_run(cfg: CliConfig, args, out) -> int:
    suite = run_suite(load_paths(cfg.paths), None, cfg.budget)
    failed = sum(1 for r in suite if r.outcome.status.failed)
    if cfg.format == "json":
        out.write(_dump(suite.to_json()))
    else:
        for r in suite:
            detail = f"  {r.outcome.failure_detail}" if r.outcome.failure_detail else ""
            out.write(f"{r.outcome.status.value:<18} {r.file}::{r.test}{detail}\n")
        out.write(f"{len(suite)} tests, {failed} failed\n")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_trace(cfg: CliConfig, args, out) -> int:
    files = load_paths(cfg.paths)
    suite = run_suite(files, cfg.element_kind, cfg.budget)
    analysis = TraceAnalysis(suite, tracked_elements(files, cfg.element_kind, args.only))
    if cfg.output:
        Path(cfg.output).write_text(dump_jsonl(suite.events))
    if cfg.format == "json":
        out.write(dump_purity(analysis, cfg.element_kind))
    else:
        for key, cls in analysis.classes().items():
            out.write(f"{cls.value:<22} {key[0]}::{key[1]}\n")
    return EXIT_OK


def cmd_refactor(cfg: CliConfig, args, out) -> int:
    plan = refactor_suite(load_paths(cfg.paths), cfg.element_kind, cfg.budget, args.only)
    outdir = Path(cfg.output)
    write_files(plan.output_files, outdir)
    (outdir / "plan.json").write_text(plan.dumps())
    if cfg.format == "json":
        out.write(plan.dumps())
    else:
        for key in plan.kept:
            out.write(f"kept   {key[0]}::{key[1]}\n")
        for key, frags in plan.split.items():
            names = ", ".join(f.name for f in frags)
            out.write(f"split  {key[0]}::{key[1]} -> {names}\n")
        out.write(f"{len(plan.split)} tests split into {plan.fragment_count} fragments\n")
    return EXIT_OK


def cmd_metrics(cfg: CliConfig, args, out) -> int:
    files = load_paths(cfg.paths)
    report = purity_report(run_suite(files, cfg.element_kind, cfg.budget), files, cfg.element_kind, args.only)
    if args.compare:
        refactored = load_paths([args.compare])
        after = purity_report(run_suite(refactored, cfg.element_kind, cfg.budget), refactored, cfg.element_kind, args.only)
        report = improvement_report(report, after)
    out.write(render_report(report, cfg.format))
    return EXIT_OK


def cmd_mutate(cfg: CliConfig, args, out) -> int:
    files = load_paths(cfg.paths)
    refactored = load_paths([args.against])
    mutants = generate_mutants(files, ALL_OPERATORS, cfg.seed, cfg.max_mutants)
    jobs = args.jobs if args.jobs > 0 else (os.cpu_count() or 1)
    original = kill_matrix(files, mutants, cfg.budget, jobs)
    after = kill_matrix(refactored, mutants, cfg.budget, jobs)
    report = compare_matrices(original, after)
    if cfg.format == "json":
        out.write(_dump({
            "seed": cfg.seed,
            "mutants": [m.to_json() for m in mutants],
            "original": original.to_json(),
            "refactored": after.to_json(),
            "equivalence": report.to_json(),
        }))
    else:
        out.write(f"{len(mutants)} mutants (seed {cfg.seed})\n")
        out.write(report.to_text())
    return EXIT_OK if report.equivalent else EXIT_FAIL


def cmd_contracts(cfg: CliConfig, args, out) -> int:
    refactored = load_paths([args.refactored]) if args.refactored else None
    report = classify_try_contracts(load_paths(cfg.paths), refactored, cfg.budget)
    out.write(render_report(report, cfg.format))
    return EXIT_OK


def cmd_repair_check(cfg: CliConfig, args, out) -> int:
    report = repair_readiness(load_paths(cfg.paths), args.element, cfg.budget)
    out.write(render_report(report, cfg.format))
    return EXIT_OK if report.ready else EXIT_FAIL


COMMANDS = {
    "run": cmd_run,
    "trace": cmd_trace,
    "refactor": cmd_refactor,
    "metrics": cmd_metrics,
    "mutate": cmd_mutate,
    "contracts": cmd_contracts,
    "repair-check": cmd_repair_check,
}


def dispatch(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = _config(args)
        return COMMANDS[cfg.subcommand](cfg, args, out)
    except (UsageError, TLSyntaxError, FileNotFoundError, ValueError, KeyError) as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        err.write(f"brefactor: error: {message}\n")
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - reported as an internal error
        err.write(f"brefactor: internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(dispatch())
