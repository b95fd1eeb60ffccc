"""Downstream analyses: repair readiness of ifs and exception contracts of tries."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

from .metrics import format_percent
from .testlang.interpreter import DEFAULT_BUDGET, InjectionConfig
from .testlang.nodes import ElementId, ElementKind, ParsedFile
from .testlang.results import THEN, Status, SuiteResult
from .testlang.runner import execute_test, run_suite
from .trace import TraceAnalysis, tracked_elements


def _key(k) -> str:
    return f"{k[0]}::{k[1]}"


@dataclass
class RepairReadiness:
    element: ElementId
    purely_covered: bool
    then_pure_tests: list = field(default_factory=list)
    else_pure_tests: list = field(default_factory=list)
    discarded: list = field(default_factory=list)
    has_failing: bool = False
    has_passing: bool = False

    @property
    def ready(self) -> bool:
        return bool(self.then_pure_tests and self.else_pure_tests and self.has_failing and self.has_passing)

    def to_json(self) -> dict:
        return {
            "element": str(self.element),
            "ready": self.ready,
            "purely_covered": self.purely_covered,
            "then_pure_tests": [_key(k) for k in self.then_pure_tests],
            "else_pure_tests": [_key(k) for k in self.else_pure_tests],
            "discarded": [_key(k) for k in self.discarded],
            "has_failing": self.has_failing,
            "has_passing": self.has_passing,
        }

    def to_text(self) -> str:
        def names(keys):
            return ", ".join(_key(k) for k in keys) or "-"

        return (
            f"element        {self.element}\n"
            f"then (pure)    {names(self.then_pure_tests)}\n"
            f"else (pure)    {names(self.else_pure_tests)}\n"
            f"discarded      {names(self.discarded)}\n"
            f"failing/passing {'yes' if self.has_failing else 'no'}/{'yes' if self.has_passing else 'no'}\n"
            f"{'ready' if self.ready else 'not ready'}\n"
        )


def _traced(files_or_suite, kind, budget) -> tuple[list[ParsedFile], SuiteResult]:
    files, suite = files_or_suite if isinstance(files_or_suite, tuple) else (files_or_suite, None)
    files = list(files)
    if suite is None:
        suite = run_suite(files, kind, budget)
    return files, suite


def repair_readiness(files, e: ElementId, budget: int = DEFAULT_BUDGET) -> RepairReadiness:
    """Whether the suite lets a repair tool tell the two branches of ``e`` apart.

    ``files`` is a list of parsed files, or a ``(files, suite)`` pair when an
    if-traced run is already available. Impure tests are discarded.
    """
    if e.kind is not ElementKind.IF:
        raise ValueError(f"{e} is not an if element")
    files, suite = _traced(files, ElementKind.IF, budget)
    analysis = TraceAnalysis(suite, [e])
    report = RepairReadiness(element=e, purely_covered=False)
    pure = []
    for key, sig in analysis.coverage(e).per_test.items():
        if sig.is_impure:
            report.discarded.append(key)
            continue
        pure.append(key)
        (report.then_pure_tests if sig.value == THEN else report.else_pure_tests).append(key)
    report.purely_covered = bool(pure) and not report.discarded
    for key in pure:
        if suite.outcome(*key).status.failed:
            report.has_failing = True
        else:
            report.has_passing = True
    return report


class InjectionVerdict(str, Enum):
    PASSES = "passes"
    FAILS = "fails"


def inject_and_run(files: Sequence[ParsedFile], e: ElementId, test: str, budget: int = DEFAULT_BUDGET) -> InjectionVerdict:
    """Rerun ``test`` with an exception thrown at entry of ``e``'s try body."""
    if e.kind is not ElementKind.TRY:
        raise ValueError(f"{e} is not a try element")
    target = next((f for f in files if f.path == e.file), None)
    if target is None:
        raise ValueError(f"no file {e.file} in suite")
    _, events = execute_test(target, test, ElementKind.TRY, budget)
    values = {ev.value for ev in events if ev.element == e and ev.constituent > 0}
    if not values:
        raise ValueError(f"test {test} does not execute {e}")
    if len(values) > 1:
        raise ValueError(f"test {test} is impure on {e}")
    outcome, _ = execute_test(target, test, None, budget, InjectionConfig(e))
    return InjectionVerdict.PASSES if outcome.status is Status.PASSED else InjectionVerdict.FAILS


class ContractClass(str, Enum):
    SOURCE_INDEPENDENT = "source-independent"
    SOURCE_DEPENDENT = "source-dependent"
    UNKNOWN = "unknown"


def classify_suite_contracts(files: Sequence[ParsedFile], budget: int = DEFAULT_BUDGET) -> dict[ElementId, ContractClass]:
    """Contract class of every executed try element; unexecuted tries are left out."""
    files = list(files)
    suite = run_suite(files, ElementKind.TRY, budget)
    analysis = TraceAnalysis(suite, tracked_elements(files, ElementKind.TRY))
    by_path = {f.path: f for f in files}
    out = {}
    for e in analysis.elements:
        cov = analysis.coverage(e)
        if not cov.executed:
            continue
        pure = [k for k, sig in cov.per_test.items() if sig.is_pure]
        if not pure:
            out[e] = ContractClass.UNKNOWN
            continue
        failing = any(
            execute_test(by_path[k[0]], k[1], None, budget, InjectionConfig(e))[0].status is not Status.PASSED
            for k in pure
        )
        out[e] = ContractClass.SOURCE_DEPENDENT if failing else ContractClass.SOURCE_INDEPENDENT
    return out


def _totals(classes: dict) -> dict[str, int]:
    counts = {c.value: 0 for c in ContractClass}
    for c in classes.values():
        counts[c.value] += 1
    return counts


@dataclass
class ContractReport:
    before: dict
    after: Optional[dict] = None

    @property
    def totals_before(self) -> dict[str, int]:
        return _totals(self.before)

    @property
    def totals_after(self) -> Optional[dict[str, int]]:
        return None if self.after is None else _totals(self.after)

    @property
    def unknown_reduction(self) -> Optional[int]:
        if self.after is None:
            return None
        return self.totals_before["unknown"] - self.totals_after["unknown"]

    @property
    def improvement(self) -> Optional[str]:
        if self.after is None:
            return None
        return format_percent(self.unknown_reduction, self.totals_before["unknown"])

    def to_json(self) -> dict:
        doc = {
            "before": {str(e): c.value for e, c in self.before.items()},
            "totals_before": self.totals_before,
        }
        if self.after is not None:
            doc["after"] = {str(e): c.value for e, c in self.after.items()}
            doc["totals_after"] = self.totals_after
            doc["unknown_reduction"] = self.unknown_reduction
            doc["improvement"] = self.improvement
        return doc

    def to_text(self) -> str:
        cols = ["Source-independent", "Source-dependent", "Unknown"]
        header = ["", *(f"#{c}" for c in cols)]
        rows = [["Before", *(str(v) for v in self.totals_before.values())]]
        if self.after is not None:
            rows.append(["After", *(str(v) for v in self.totals_after.values())])
            header += ["Improvement #", "Improvement %"]
            rows[0] += ["", ""]
            rows[1] += [str(self.unknown_reduction), self.improvement]
        widths = [max(len(r[i]) for r in [header, *rows]) for i in range(len(header))]
        lines = [" | ".join(c.rjust(w) if i else c.ljust(w) for i, (c, w) in enumerate(zip(r, widths))) for r in [header, *rows]]
        lines.insert(1, "-+-".join("-" * w for w in widths))
        body = "\n".join(line.rstrip() for line in lines) + "\n"
        detail = [f"{e}  {c.value}" for e, c in self.before.items()]
        if self.after is not None:
            detail = [f"{e}  {c.value} -> {self.after.get(e, c).value}" for e, c in self.before.items()]
        return body + "\n" + "\n".join(detail) + ("\n" if detail else "")


def classify_try_contracts(
    files: Sequence[ParsedFile],
    refactored: Optional[Sequence[ParsedFile]] = None,
    budget: int = DEFAULT_BUDGET,
) -> ContractReport:
    """Classify every executed try of ``files`` and optionally of a refactored copy."""
    before = classify_suite_contracts(files, budget)
    after = None if refactored is None else classify_suite_contracts(refactored, budget)
    return ContractReport(before, after)


def dumps(report) -> str:
    return json.dumps(report.to_json(), indent=2) + "\n"
