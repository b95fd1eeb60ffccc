import json

import pytest

from brefactor.applications import (
    ContractClass,
    ContractReport,
    InjectionVerdict,
    classify_suite_contracts,
    classify_try_contracts,
    inject_and_run,
    repair_readiness,
)
from brefactor.splitter import refactor_suite
from brefactor.testlang import ElementId, run_suite
from brefactor.trace import tracked_elements

from conftest import load, parse

BUGGY = ElementId.parse("if:factorial.tl:factorialLog:1")


def test_readiness_factorial_before_and_after():
    f = load("factorial.tl")
    before = repair_readiness([f], BUGGY)
    assert not before.ready
    assert before.then_pure_tests == [("factorial.tl", "testFactorialFail")]
    assert before.else_pure_tests == []
    assert before.discarded == [("factorial.tl", "testFactorial")]
    after = repair_readiness(refactor_suite([f], "if").output_files, BUGGY)
    assert after.ready and after.purely_covered
    assert after.has_failing and after.has_passing
    assert after.else_pure_tests == [("factorial.tl", "testFactorial_fragment_2")]


def test_readiness_patched_has_no_failing_test():
    f = load("factorial_patched.tl")
    out = refactor_suite([f], "if").output_files
    r = repair_readiness(out, ElementId.parse("if:factorial_patched.tl:factorialLog:1"))
    assert r.then_pure_tests and r.else_pure_tests and not r.has_failing and not r.ready


def test_readiness_uncovered_element():
    f = parse("fn g(x) { if (x) { return 1; } return 0; }\ntest t { assert(true); }")
    r = repair_readiness([f], ElementId.parse("if:t.tl:g:1"))
    assert not r.ready and not r.purely_covered
    assert r.then_pure_tests == r.else_pure_tests == r.discarded == []


def test_readiness_accepts_existing_trace():
    f = load("factorial.tl")
    suite = run_suite([f], "if")
    assert repair_readiness(([f], suite), BUGGY).to_json() == repair_readiness([f], BUGGY).to_json()


def test_readiness_requires_if():
    with pytest.raises(ValueError):
        repair_readiness([load("factorial.tl")], ElementId.parse("try:factorial.tl:factorialLog:1"))


def test_readiness_never_degrades(corpus):
    out = refactor_suite(corpus, "if").output_files
    for e in tracked_elements(corpus, "if"):
        if repair_readiness(corpus, e).ready:
            assert repair_readiness(out, e).ready, e


def test_inject_and_run():
    dep = load("contract_source_dependent.tl")
    e = ElementId.parse("try:contract_source_dependent.tl:readConfig:1")
    assert inject_and_run([dep], e, "testReadInvalid") is InjectionVerdict.FAILS
    with pytest.raises(ValueError, match="impure"):
        inject_and_run([dep], e, "testReadMixed")
    ind = load("contract_source_independent.tl")
    e2 = ElementId.parse("try:contract_source_independent.tl:parseFlag:1")
    assert inject_and_run([ind], e2, "testParseBad") is InjectionVerdict.PASSES
    assert inject_and_run([ind], e2, "testParseNo") is InjectionVerdict.PASSES
    with pytest.raises(ValueError, match="does not execute"):
        inject_and_run([ind], ElementId.parse("try:contract_source_independent.tl:neverCalled:1"), "testParseNo")
    with pytest.raises(ValueError):
        inject_and_run([ind], ElementId.parse("if:contract_source_independent.tl:parseFlag:1"), "testParseNo")


def test_inject_into_later_fragment():
    f = load("unknown_contract.tl")
    out = refactor_suite([f], "try").output_files
    e = ElementId.parse("try:unknown_contract.tl:lookupOrDefault:1")
    assert inject_and_run(out, e, "testLookup_fragment_2") is InjectionVerdict.PASSES


def test_unknown_contract_resolved_by_split():
    f = load("unknown_contract.tl")
    out = refactor_suite([f], "try").output_files
    report = classify_try_contracts([f], out)
    e = ElementId.parse("try:unknown_contract.tl:lookupOrDefault:1")
    assert report.before[e] is ContractClass.UNKNOWN
    assert report.after[e] is ContractClass.SOURCE_INDEPENDENT
    assert report.unknown_reduction == 1 and report.improvement == "100.00%"


def test_never_executed_try_excluded():
    classes = classify_suite_contracts([load("contract_source_independent.tl")])
    assert [str(e) for e in classes] == ["try:contract_source_independent.tl:parseFlag:1"]


def test_corpus_contracts(corpus):
    out = refactor_suite(corpus, "try").output_files
    report = classify_try_contracts(corpus, out)
    before, after = report.totals_before, report.totals_after
    assert sum(before.values()) == sum(after.values())
    assert after["unknown"] <= before["unknown"]
    definite = {ContractClass.SOURCE_INDEPENDENT, ContractClass.SOURCE_DEPENDENT}
    for e, cls in report.before.items():
        if cls in definite:
            assert report.after[e] is cls, e


def test_unknown_reduction_arithmetic_and_text():
    from brefactor.testlang import ElementKind

    ids = [ElementId(ElementKind.TRY, "x.tl", "f", i) for i in range(1, 23)]
    before = {e: ContractClass.UNKNOWN for e in ids}
    after = {e: (ContractClass.UNKNOWN if i < 7 else ContractClass.SOURCE_DEPENDENT) for i, e in enumerate(ids)}
    report = ContractReport(before, after)
    assert report.unknown_reduction == 15 and report.improvement == "68.18%"
    text = report.to_text()
    for col in ("#Source-independent", "#Source-dependent", "#Unknown", "Improvement"):
        assert col in text
    doc = json.loads(json.dumps(report.to_json()))
    assert doc["totals_after"] == {"source-independent": 0, "source-dependent": 15, "unknown": 7}


def test_report_without_refactoring():
    report = classify_try_contracts([load("safe_math.tl")])
    assert report.after is None and report.improvement is None
    assert "Improvement" not in report.to_text()
