from __future__ import annotations

import sys
from typing import Iterable, Optional

from .interpreter import DEFAULT_BUDGET, InjectionConfig, Interpreter
from .nodes import ElementKind, ParsedFile, TestCase
from .results import Status, SuiteResult, TestOutcome, TestResult, TraceEvent

# deep user-level recursion nests many Python frames per call
sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


def _predecessors(file: ParsedFile, test: TestCase) -> list[TestCase]:
    """Earlier fragments of the same origin, in order."""
    if test.origin_meta is None:
        return []
    origin = test.origin_meta.origin
    earlier = [
        t for t in file.tests
        if t.origin_meta is not None and t.origin_meta.origin == origin and t.origin_meta.order < test.origin_meta.order
    ]
    return sorted(earlier, key=lambda t: t.origin_meta.order)


def execute_test(
    file: ParsedFile,
    test: str,
    element_kind=None,
    budget: int = DEFAULT_BUDGET,
    injection: Optional[InjectionConfig] = None,
) -> tuple[TestOutcome, list[TraceEvent]]:
    """Run one test and return its outcome with the trace events it produced.

    A fragment with order > 1 first replays its predecessors (untraced and
    without injection) so that it sees the state they leave behind. If a
    predecessor does not pass, the fragment is reported as skipped.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    case = file.test(test)
    kind = ElementKind.parse(element_kind)
    state = None
    preds = _predecessors(file, case)
    if preds:
        warmup = Interpreter(file, None, budget)
        for pred in preds:
            outcome, _ = warmup.run_test(pred, state)
            state = warmup.globals
            if outcome.status is not Status.PASSED:
                return TestOutcome(Status.SKIPPED, f"earlier fragment {pred.name} did not pass"), []
    interp = Interpreter(file, kind, budget, injection)
    return interp.run_test(case, state)


def run_file(
    file: ParsedFile,
    element_kind=None,
    budget: int = DEFAULT_BUDGET,
    injection: Optional[InjectionConfig] = None,
) -> list[TestResult]:
    kind = ElementKind.parse(element_kind)
    interp = Interpreter(file, kind, budget, injection)
    results = []
    # per origin: shared globals of the running fragment chain, or None after a failure
    chains: dict[str, Optional[dict]] = {}
    for test in file.tests:
        n = len(test.constituents)
        meta = test.origin_meta
        if meta is not None and meta.order > 1:
            if meta.origin not in chains or chains[meta.origin] is None:
                detail = f"an earlier fragment of {meta.origin} did not pass"
                results.append(TestResult(file.path, test.name, TestOutcome(Status.SKIPPED, detail), [], n))
                continue
            state = chains[meta.origin]
        else:
            state = None
        outcome, events = interp.run_test(test, state)
        if meta is not None:
            chains[meta.origin] = interp.globals if outcome.status is Status.PASSED else None
        results.append(TestResult(file.path, test.name, outcome, list(events), n))
    return results


def run_suite(
    files: Iterable[ParsedFile],
    element_kind=None,
    budget: int = DEFAULT_BUDGET,
    injection: Optional[InjectionConfig] = None,
) -> SuiteResult:
    """Run every test of every file, in file order then declaration order."""
    results = []
    for file in files:
        results.extend(run_file(file, element_kind, budget, injection))
    return SuiteResult(results)
