import json

import pytest

from brefactor.metrics import (
    PurityReport,
    format_percent,
    improvement_report,
    purity_report,
    render_report,
)
from brefactor.splitter import refactor_suite
from brefactor.testlang import SuiteResult, run_suite

from conftest import load, parse


@pytest.mark.parametrize(
    "part, whole, text",
    [
        (539, 2254, "23.91%"),
        (1701 - 451, 451, "277.16%"),
        (15, 22, "68.18%"),
        (1, 3, "33.33%"),
        (2, 3, "66.67%"),
        (1, 8, "12.50%"),
        (1, 800, "0.13%"),
        (0, 5, "0.00%"),
        (-1, 3, "-33.33%"),
        (3, 0, "n/a"),
    ],
)
def test_format_percent(part, whole, text):
    assert format_percent(part, whole) == text


def test_factorial_report():
    f = load("factorial.tl")
    r = purity_report(run_suite([f], "if"), [f], "if")
    assert (r.tests, r.pure, r.non_absolutely_impure, r.absolutely_impure, r.not_covering) == (2, 1, 1, 0, 0)
    assert (r.constituents, r.impure_constituents) == (4, 0)
    assert (r.elements, r.executed, r.purely_covered, r.at_least_one_pure) == (3, 3, 1, 2)


def test_classes_sum_to_total(corpus):
    for kind in ("if", "try"):
        r = purity_report(run_suite(corpus, kind), corpus, kind)
        assert r.pure + r.non_absolutely_impure + r.absolutely_impure + r.not_covering == r.tests
        assert r.purely_covered <= r.at_least_one_pure <= r.executed <= r.elements


def test_empty_suite_is_zeroed():
    f = parse("fn f() { return 1; }")
    r = purity_report(SuiteResult([]), [f], "if")
    assert r == PurityReport("if")
    assert set(r.percentages().values()) == {"n/a"}
    render_report(r)
    render_report(improvement_report(r, r))


def test_improvement_factorial():
    f = load("factorial.tl")
    out = refactor_suite([f], "if").output_files
    before = purity_report(run_suite([f], "if"), [f], "if")
    after = purity_report(run_suite(out, "if"), out, "if")
    imp = improvement_report(before, after)
    d = imp.delta("purely_covered")
    assert (d.before, d.after, d.absolute, d.relative) == (1, 3, 2, "200.00%")
    assert imp.delta("at_least_one_pure").relative == "50.00%"
    doc = imp.to_json()
    assert doc["deltas"]["purely_covered"] == {"before": 1, "after": 3, "absolute": 2, "relative": "200.00%"}


def test_improvement_kind_mismatch():
    with pytest.raises(ValueError):
        improvement_report(PurityReport("if"), PurityReport("try"))


def test_render_formats():
    r = PurityReport("if", tests=2254, pure=539)
    text = render_report(r)
    assert "23.91%" in text and "Non-absolutely impure" in text and "Purely covered if" in text
    doc = json.loads(render_report(r, "json"))
    assert doc["counts"]["pure"] == 539 and doc["percentages"]["pure"] == "23.91%"
    with pytest.raises(ValueError):
        render_report(r, "xml")
    with pytest.raises(TypeError):
        render_report(object())


def test_improvement_table():
    before = PurityReport("if", executed=3, purely_covered=451)
    after = PurityReport("if", executed=3, purely_covered=1701)
    text = render_report(improvement_report(before, after))
    assert "277.16%" in text and "1250" in text
