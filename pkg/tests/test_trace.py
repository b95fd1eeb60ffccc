import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brefactor.testlang import ELSE, THEN, ElementId, ElementKind, TraceEvent, run_suite
from brefactor.trace import (
    BOTTOM,
    IMPURE,
    PurityClass,
    Signature,
    TraceAnalysis,
    classify_test,
    constituent_signature,
    element_coverage,
    fold,
    purity_document,
    signature_of,
    test_signature as signature_over_test,
    tracked_elements,
)

from conftest import load

E1 = ElementId(ElementKind.IF, "f.tl", "g", 1)
E2 = ElementId(ElementKind.IF, "f.tl", "g", 2)


def ev(c, e, value, test="t"):
    return TraceEvent(test, c, e, value, 0)


def test_signature_lattice():
    a, b = Signature.pure("then"), Signature.pure("else")
    assert BOTTOM.merge(a) == a and a.merge(BOTTOM) == a
    assert a.merge(a) == a
    assert a.merge(b) == IMPURE
    assert IMPURE.merge(BOTTOM) == IMPURE
    assert fold([]) == BOTTOM
    assert signature_of(["then", "then"]) == a
    assert str(BOTTOM) == "⊥" and str(a) == "then" and str(IMPURE) == "impure"


def test_constituent_and_test_signatures():
    events = [ev(1, E1, "then"), ev(2, E1, "then"), ev(2, E1, "else"), ev(3, E1, "then"), ev(0, E1, "else")]
    assert constituent_signature(events, E1, "t", 1) == Signature.pure("then")
    assert constituent_signature(events, E1, "t", 2) == IMPURE
    assert constituent_signature(events, E1, "t", 4) == BOTTOM
    assert signature_over_test([ev(1, E1, "then"), ev(0, E1, "else")], E1, "t") == Signature.pure("then")
    assert signature_over_test(events, E1, "other") == BOTTOM


@pytest.mark.parametrize(
    "events, expected",
    [
        ([ev(1, E1, "then"), ev(2, E1, "then"), ev(1, E2, "else")], PurityClass.PURE),
        ([ev(1, E1, "then"), ev(2, E1, "else")], PurityClass.NON_ABSOLUTELY_IMPURE),
        ([ev(1, E1, "then"), ev(1, E1, "else"), ev(2, E2, "then")], PurityClass.ABSOLUTELY_IMPURE),
        ([ev(0, E1, "then"), ev(0, E1, "else")], PurityClass.NOT_COVERING),
        ([], PurityClass.NOT_COVERING),
    ],
)
def test_classify_test(events, expected):
    assert classify_test(events, [E1, E2], "t") is expected


def test_classify_requires_elements():
    with pytest.raises(ValueError):
        classify_test([], [], "t")


def test_element_coverage():
    events = [ev(1, E1, "then", "a"), ev(1, E1, "then", "b"), ev(2, E1, "else", "b")]
    cov = element_coverage(events, ["a", "b", "c"], E1)
    assert cov.executed and not cov.purely_covered and cov.at_least_one_pure
    assert set(cov.per_test) == {"a", "b"}
    cov2 = element_coverage(events, ["c"], E1)
    assert not cov2.executed and not cov2.purely_covered and not cov2.at_least_one_pure


def test_factorial_analysis():
    f = load("factorial.tl")
    elements = tracked_elements([f], "if")
    analysis = TraceAnalysis(run_suite([f], "if"), elements)
    buggy = ElementId.parse("if:factorial.tl:factorialLog:1")
    table = analysis.table(("factorial.tl", "testFactorial"))
    assert [str(s) for s in table[buggy]] == ["⊥", THEN, ELSE]
    assert analysis.classify(("factorial.tl", "testFactorial")) is PurityClass.NON_ABSOLUTELY_IMPURE
    assert analysis.classify(("factorial.tl", "testFactorialFail")) is PurityClass.PURE
    assert not analysis.coverage(buggy).purely_covered
    doc = purity_document(analysis, "if")
    assert doc["tests"][0] == {"file": "factorial.tl", "test": "testFactorial", "class": "non-absolutely-impure"}


def test_absolutely_impure_fixture():
    f = load("absolutely_impure.tl")
    analysis = TraceAnalysis(run_suite([f], "if"), tracked_elements([f], "if"))
    classes = {k[1]: c for k, c in analysis.classes().items()}
    assert classes["testCountVowels"] is PurityClass.ABSOLUTELY_IMPURE
    assert classes["testIsVowel"] is PurityClass.NON_ABSOLUTELY_IMPURE
    assert analysis.impure_constituents(("absolutely_impure.tl", "testCountThenCheck")) == [2]


def test_tracked_elements_subset(corpus):
    everything = tracked_elements(corpus, "if")
    some = everything[:3]
    assert tracked_elements(corpus, "if", some) == some
    assert all(e.kind is ElementKind.IF for e in everything)


def test_analysis_agrees_with_spec_functions(corpus):
    for kind in ("if", "try"):
        suite = run_suite(corpus, kind)
        elements = tracked_elements(corpus, kind)
        analysis = TraceAnalysis(suite, elements)
        for r in suite:
            file_elements = [e for e in elements if e.file == r.file]
            if file_elements:
                assert analysis.classify(r.key) is classify_test(r.events, file_elements, r.key)
            for e in file_elements:
                assert analysis.signature(r.key, e) == signature_over_test(r.events, e, r.key)


# -- brute-force oracle -----------------------------------------------------

values = st.sampled_from(["then", "else"])
event_lists = st.lists(
    st.tuples(st.integers(0, 4), st.sampled_from([E1, E2]), values),
    max_size=12,
)


def oracle(events, elements):
    """Direct reading of the definitions over explicit value sets."""
    per = {}
    for c, e, v in events:
        if c > 0:
            per.setdefault(e, {}).setdefault(c, set()).add(v)
    if any(len(vals) > 1 for cs in per.values() for vals in cs.values()):
        return PurityClass.ABSOLUTELY_IMPURE
    whole = {e: set().union(*cs.values()) for e, cs in per.items()}
    if any(len(v) > 1 for v in whole.values()):
        return PurityClass.NON_ABSOLUTELY_IMPURE
    return PurityClass.PURE if whole else PurityClass.NOT_COVERING


@settings(max_examples=300, deadline=None)
@given(event_lists)
def test_classification_matches_oracle(raw):
    events = [ev(c, e, v) for c, e, v in raw]
    assert classify_test(events, [E1, E2], "t") is oracle(raw, [E1, E2])
