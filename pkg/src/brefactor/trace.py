"""Execution signatures and purity classification over trace logs.

A signature summarizes how an element was executed by a constituent or by a
whole test: not at all, always with the same domain value, or with several
values (impure). Events attributed to constituent 0 come from hooks and
file-binding initialization and never enter a signature.
"""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence, Union

from .testlang.nodes import ElementId, ElementKind, ParsedFile
from .testlang.results import SuiteResult, TraceEvent

TestKey = tuple  # (file, test name)


@dataclass(frozen=True)
class Signature:
    variant: str  # "bottom", "pure" or "impure"
    value: Optional[str] = None

    @classmethod
    def pure(cls, value: str) -> "Signature":
        return cls("pure", value)

    @property
    def is_bottom(self) -> bool:
        return self.variant == "bottom"

    @property
    def is_pure(self) -> bool:
        return self.variant == "pure"

    @property
    def is_impure(self) -> bool:
        return self.variant == "impure"

    def merge(self, other: "Signature") -> "Signature":
        if self.is_bottom:
            return other
        if other.is_bottom:
            return self
        if self.is_impure or other.is_impure or self.value != other.value:
            return IMPURE
        return self

    def __str__(self) -> str:
        if self.is_bottom:
            return "⊥"
        if self.is_impure:
            return "impure"
        return self.value


BOTTOM = Signature("bottom")
IMPURE = Signature("impure")


def signature_of(values: Iterable[str]) -> Signature:
    distinct = set(values)
    if not distinct:
        return BOTTOM
    if len(distinct) == 1:
        return Signature.pure(distinct.pop())
    return IMPURE


def fold(signatures: Iterable[Signature]) -> Signature:
    acc = BOTTOM
    for sig in signatures:
        acc = acc.merge(sig)
    return acc


class PurityClass(str, Enum):
    PURE = "pure"
    NON_ABSOLUTELY_IMPURE = "non-absolutely-impure"
    ABSOLUTELY_IMPURE = "absolutely-impure"
    NOT_COVERING = "not-covering"


@dataclass
class ElementCoverage:
    element: ElementId
    executed: bool
    purely_covered: bool
    at_least_one_pure: bool
    # only tests that execute the element appear here
    per_test: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "element": str(self.element),
            "executed": self.executed,
            "purely_covered": self.purely_covered,
            "at_least_one_pure": self.at_least_one_pure,
            "per_test": {f"{k[0]}::{k[1]}": str(v) for k, v in self.per_test.items()},
        }


def _matches(ev: TraceEvent, t: Union[str, TestKey]) -> bool:
    if isinstance(t, tuple):
        return ev.element.file == t[0] and ev.test == t[1]
    return ev.test == t


def constituent_signature(events: Iterable[TraceEvent], e: ElementId, t: Union[str, TestKey], c: int) -> Signature:
    """Signature of element ``e`` over constituent ``c`` of test ``t``."""
    return signature_of(ev.value for ev in events if ev.element == e and ev.constituent == c and _matches(ev, t))


def test_signature(events: Iterable[TraceEvent], e: ElementId, t: Union[str, TestKey]) -> Signature:
    """Signature of element ``e`` over the whole of test ``t``."""
    per_constituent: dict[int, list[str]] = defaultdict(list)
    for ev in events:
        if ev.element == e and ev.constituent > 0 and _matches(ev, t):
            per_constituent[ev.constituent].append(ev.value)
    return fold(signature_of(vals) for _, vals in sorted(per_constituent.items()))


def _classify_table(table: Mapping[ElementId, Sequence[Signature]]) -> PurityClass:
    executed = False
    impure = False
    for sigs in table.values():
        if any(s.is_impure for s in sigs):
            return PurityClass.ABSOLUTELY_IMPURE
        whole = fold(sigs)
        executed = executed or not whole.is_bottom
        impure = impure or whole.is_impure
    if impure:
        return PurityClass.NON_ABSOLUTELY_IMPURE
    return PurityClass.PURE if executed else PurityClass.NOT_COVERING


def classify_test(events: Iterable[TraceEvent], elements: Iterable[ElementId], t: Union[str, TestKey]) -> PurityClass:
    elements = list(elements)
    if not elements:
        raise ValueError("element set must be nonempty")
    wanted = set(elements)
    values: dict = defaultdict(lambda: defaultdict(list))
    for ev in events:
        if ev.element in wanted and ev.constituent > 0 and _matches(ev, t):
            values[ev.element][ev.constituent].append(ev.value)
    table = {e: [signature_of(v) for _, v in sorted(values[e].items())] for e in elements}
    return _classify_table(table)


def element_coverage(events: Iterable[TraceEvent], suite: Iterable[Union[str, TestKey]], e: ElementId) -> ElementCoverage:
    events = list(events)
    per_test = {}
    for t in suite:
        sig = test_signature(events, e, t)
        if not sig.is_bottom:
            per_test[t] = sig
    return _coverage_from(e, per_test)


def _coverage_from(e: ElementId, per_test: dict) -> ElementCoverage:
    executed = bool(per_test)
    any_impure = any(s.is_impure for s in per_test.values())
    return ElementCoverage(
        element=e,
        executed=executed,
        purely_covered=executed and not any_impure,
        at_least_one_pure=any(s.is_pure for s in per_test.values()),
        per_test=per_test,
    )


class TraceAnalysis:
    """Indexed view of a traced suite run over a fixed element set."""

    def __init__(self, suite: SuiteResult, elements: Iterable[ElementId]):
        self.suite = suite
        self.elements = list(elements)
        wanted = set(self.elements)
        self.tests: list[TestKey] = [r.key for r in suite]
        self.sizes = {r.key: r.constituents for r in suite}
        self.by_file: dict[str, list[ElementId]] = defaultdict(list)
        for e in self.elements:
            self.by_file[e.file].append(e)
        # (test key) -> element -> constituent -> values
        self._values: dict = {}
        for r in suite:
            bucket: dict = defaultdict(lambda: defaultdict(set))
            for ev in r.events:
                if ev.constituent > 0 and ev.element in wanted:
                    bucket[ev.element][ev.constituent].add(ev.value)
            self._values[r.key] = bucket

    def table(self, key: TestKey) -> dict[ElementId, list[Signature]]:
        """Per element of the test's file, the signature of each constituent (index 0 = c1)."""
        n = self.sizes[key]
        bucket = self._values[key]
        return {
            e: [signature_of(bucket[e].get(c, ())) if e in bucket else BOTTOM for c in range(1, n + 1)]
            for e in self.by_file.get(key[0], [])
        }

    def signature(self, key: TestKey, e: ElementId) -> Signature:
        bucket = self._values[key]
        if e not in bucket:
            return BOTTOM
        return fold(signature_of(vals) for _, vals in sorted(bucket[e].items()))

    def classify(self, key: TestKey) -> PurityClass:
        return _classify_table(self.table(key))

    def impure_constituents(self, key: TestKey) -> list[int]:
        table = self.table(key)
        return [c for c in range(1, self.sizes[key] + 1) if any(sigs[c - 1].is_impure for sigs in table.values())]

    def coverage(self, e: ElementId) -> ElementCoverage:
        per_test = {}
        for key in self.tests:
            if key[0] != e.file:
                continue
            sig = self.signature(key, e)
            if not sig.is_bottom:
                per_test[key] = sig
        return _coverage_from(e, per_test)

    def classes(self) -> dict[TestKey, PurityClass]:
        return {key: self.classify(key) for key in self.tests}


def tracked_elements(files: Iterable[ParsedFile], kind, only: Optional[Iterable[ElementId]] = None) -> list[ElementId]:
    """All elements of ``kind`` in ``files``, optionally restricted to ``only``."""
    kind = ElementKind.parse(kind)
    found = [e for f in files for e in f.elements(kind)]
    if only is not None:
        keep = set(only)
        found = [e for e in found if e in keep]
    return found


def purity_document(analysis: TraceAnalysis, kind) -> dict:
    """The purity JSON document: per-test class and per-element coverage."""
    kind = ElementKind.parse(kind)
    return {
        "element_kind": kind.value,
        "tests": [
            {"file": key[0], "test": key[1], "class": analysis.classify(key).value}
            for key in analysis.tests
        ],
        "elements": [analysis.coverage(e).to_json() for e in analysis.elements],
    }


def dump_purity(analysis: TraceAnalysis, kind) -> str:
    return json.dumps(purity_document(analysis, kind), indent=2) + "\n"
