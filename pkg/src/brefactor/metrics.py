"""Purity statistics of a traced suite and before/after improvement."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from typing import Optional, Sequence

from .testlang.nodes import ElementKind, ParsedFile
from .testlang.results import SuiteResult
from .trace import PurityClass, TraceAnalysis

NA = "n/a"


def format_percent(part: int, whole: int) -> str:
    """``part/whole`` as a percentage with two decimals, rounded half up."""
    if whole == 0:
        return NA
    value = Fraction(100 * part, whole)
    sign = "-" if value < 0 else ""
    hundredths = (abs(value) * 100 + Fraction(1, 2)).__floor__()
    return f"{sign}{hundredths // 100}.{hundredths % 100:02d}%"


@dataclass(frozen=True)
class PurityReport:
    element_kind: str
    tests: int = 0
    pure: int = 0
    non_absolutely_impure: int = 0
    absolutely_impure: int = 0
    not_covering: int = 0
    constituents: int = 0
    impure_constituents: int = 0
    elements: int = 0
    executed: int = 0
    purely_covered: int = 0
    at_least_one_pure: int = 0

    def percentages(self) -> dict[str, str]:
        return {
            "pure": format_percent(self.pure, self.tests),
            "non_absolutely_impure": format_percent(self.non_absolutely_impure, self.tests),
            "absolutely_impure": format_percent(self.absolutely_impure, self.tests),
            "not_covering": format_percent(self.not_covering, self.tests),
            "impure_constituents": format_percent(self.impure_constituents, self.constituents),
            "purely_covered": format_percent(self.purely_covered, self.executed),
            "at_least_one_pure": format_percent(self.at_least_one_pure, self.executed),
        }

    def to_json(self) -> dict:
        return {"counts": asdict(self), "percentages": self.percentages()}


COUNT_FIELDS = tuple(f.name for f in fields(PurityReport) if f.name != "element_kind")


def report_from_analysis(analysis: TraceAnalysis, kind, total_elements: Optional[int] = None) -> PurityReport:
    kind = ElementKind.parse(kind)
    classes = analysis.classes()
    counts = {c: 0 for c in PurityClass}
    for cls in classes.values():
        counts[cls] += 1
    coverage = [analysis.coverage(e) for e in analysis.elements]
    return PurityReport(
        element_kind=kind.value,
        tests=len(classes),
        pure=counts[PurityClass.PURE],
        non_absolutely_impure=counts[PurityClass.NON_ABSOLUTELY_IMPURE],
        absolutely_impure=counts[PurityClass.ABSOLUTELY_IMPURE],
        not_covering=counts[PurityClass.NOT_COVERING],
        constituents=sum(analysis.sizes.values()),
        impure_constituents=sum(len(analysis.impure_constituents(k)) for k in analysis.tests),
        elements=len(analysis.elements) if total_elements is None else total_elements,
        executed=sum(c.executed for c in coverage),
        purely_covered=sum(c.purely_covered for c in coverage),
        at_least_one_pure=sum(c.at_least_one_pure for c in coverage),
    )


def purity_report(suite: SuiteResult, files: Sequence[ParsedFile], element_kind, elements=None) -> PurityReport:
    """Purity statistics of a suite run traced with ``element_kind``."""
    from .trace import tracked_elements

    tracked = tracked_elements(files, element_kind, elements)
    return report_from_analysis(TraceAnalysis(suite, tracked), element_kind)


@dataclass(frozen=True)
class Delta:
    before: int
    after: int

    @property
    def absolute(self) -> int:
        return self.after - self.before

    @property
    def relative(self) -> str:
        return format_percent(self.absolute, self.before)

    def to_json(self) -> dict:
        return {"before": self.before, "after": self.after, "absolute": self.absolute, "relative": self.relative}


@dataclass(frozen=True)
class ImprovementReport:
    before: PurityReport
    after: PurityReport

    def delta(self, name: str) -> Delta:
        return Delta(getattr(self.before, name), getattr(self.after, name))

    @property
    def deltas(self) -> dict[str, Delta]:
        return {name: self.delta(name) for name in COUNT_FIELDS}

    def to_json(self) -> dict:
        return {
            "element_kind": self.before.element_kind,
            "before": self.before.to_json(),
            "after": self.after.to_json(),
            "deltas": {k: d.to_json() for k, d in self.deltas.items()},
        }


def improvement_report(before: PurityReport, after: PurityReport) -> ImprovementReport:
    if before.element_kind != after.element_kind:
        raise ValueError(f"element kinds differ: {before.element_kind} vs {after.element_kind}")
    return ImprovementReport(before, after)


# -- rendering -------------------------------------------------------------


def _table(header_groups: list[tuple[str, list[str]]], rows: list[list[str]]) -> str:
    """Two-level header table; every group spans its sub-columns."""
    sub = [h for _, hs in header_groups for h in hs]
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(sub)]
    group_cells = []
    i = 0
    for title, hs in header_groups:
        j = i + len(hs)
        span = sum(widths[i:j]) + 3 * (len(hs) - 1)
        if len(title) > span:
            # widen the last sub-column so the group title fits
            widths[j - 1] += len(title) - span
            span = len(title)
        group_cells.append(title.center(span))
        i = j
    lines = [
        " | ".join(group_cells),
        " | ".join(h.rjust(w) for h, w in zip(sub, widths)),
        "-+-".join("-" * w for w in widths),
    ]
    for row in rows:
        lines.append(" | ".join(c.rjust(w) for c, w in zip(row, widths)))
    return "\n".join(line.rstrip() for line in lines) + "\n"


def _purity_text(r: PurityReport) -> str:
    p = r.percentages()
    kind = r.element_kind
    groups = [
        ("Test case", ["#Total"]),
        ("Pure", ["#", "%"]),
        ("Non-absolutely impure", ["#", "%"]),
        ("Absolutely impure", ["#", "%"]),
        ("Not covering", ["#", "%"]),
        ("Test constituent", ["#Total"]),
        ("Impure", ["#", "%"]),
        (f"{kind} element", ["#Total", "#Executed"]),
        (f"Purely covered {kind}", ["#", "%"]),
        ("At-least-one pure", ["#", "%"]),
    ]
    row = [
        str(r.tests),
        str(r.pure), p["pure"],
        str(r.non_absolutely_impure), p["non_absolutely_impure"],
        str(r.absolutely_impure), p["absolutely_impure"],
        str(r.not_covering), p["not_covering"],
        str(r.constituents),
        str(r.impure_constituents), p["impure_constituents"],
        str(r.elements), str(r.executed),
        str(r.purely_covered), p["purely_covered"],
        str(r.at_least_one_pure), p["at_least_one_pure"],
    ]
    return _table(groups, [row])


def _improvement_text(r: ImprovementReport) -> str:
    kind = r.before.element_kind
    groups = [
        (f"#Executed {kind}", ["Before", "After"]),
        (f"Purely covered {kind}", ["#Before", "#After", "#", "%"]),
        (f"{kind} with at-least-one pure test case", ["#Before", "#After", "#", "%"]),
    ]
    pc, one = r.delta("purely_covered"), r.delta("at_least_one_pure")
    row = [
        str(r.before.executed), str(r.after.executed),
        str(pc.before), str(pc.after), str(pc.absolute), pc.relative,
        str(one.before), str(one.after), str(one.absolute), one.relative,
    ]
    return _purity_text(r.before) + "\n" + _purity_text(r.after) + "\n" + _table(groups, [row])


def render_report(report, format: str = "text") -> str:
    """Render a purity, improvement or contract report as a text table or JSON."""
    if format == "json":
        return json.dumps(report.to_json(), indent=2) + "\n"
    if format != "text":
        raise ValueError(f"unknown format {format!r}; expected 'text' or 'json'")
    if isinstance(report, PurityReport):
        return _purity_text(report)
    if isinstance(report, ImprovementReport):
        return _improvement_text(report)
    to_text = getattr(report, "to_text", None)
    if to_text is None:
        raise TypeError(f"cannot render {type(report).__name__}")
    return to_text()
