import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from brefactor import MutationValidator, TestSuitePurifier
from brefactor._validation import check_budget, check_element_kind, check_suite
from brefactor.testlang import ElementId

from conftest import load


def test_purifier_params_and_clone():
    p = TestSuitePurifier(element_kind="try", budget=5000)
    assert p.get_params() == {"element_kind": "try", "elements": None, "budget": 5000}
    q = clone(p)
    assert q.get_params() == p.get_params() and q is not p
    p.set_params(element_kind="if")
    assert p.element_kind == "if"


def test_purifier_fit_transform(fixtures_dir):
    p = TestSuitePurifier().fit(fixtures_dir / "factorial.tl")
    out = p.transform()
    assert [t.name for t in out[0].tests] == ["testFactorial_fragment_1", "testFactorial_fragment_2", "testFactorialFail"]
    assert p.fit_transform([load("factorial.tl")])[0] == out[0]
    report = p.report()
    assert report.delta("purely_covered").absolute == 2


def test_purifier_element_subset():
    only = [ElementId.parse("if:package_name.tl:getPackageName:1")]
    p = TestSuitePurifier(elements=only).fit(load("package_name.tl"))
    assert p.plan_.split == {}


def test_purifier_validation(fixtures_dir):
    with pytest.raises(NotFittedError):
        TestSuitePurifier().transform()
    with pytest.raises(ValueError):
        TestSuitePurifier(element_kind="none").fit(load("factorial.tl"))
    with pytest.raises(ValueError):
        TestSuitePurifier(budget=0).fit(load("factorial.tl"))
    p = TestSuitePurifier().fit(load("factorial.tl"))
    with pytest.raises(ValueError):
        p.transform(load("all_pure.tl"))


def test_mutation_validator():
    f = load("factorial_patched.tl")
    v = MutationValidator(max_mutants=15, budget=50_000).fit(f)
    assert len(v.mutants_) == 15
    out = TestSuitePurifier().fit(f).transform()
    assert v.compare(out).equivalent
    assert v.score(out) == 1.0
    with pytest.raises(NotFittedError):
        MutationValidator().score(out)


def test_check_helpers(fixtures_dir):
    f = load("factorial.tl")
    assert check_suite(f) == [f]
    assert check_suite([f, fixtures_dir / "all_pure.tl"])[1].path == "all_pure.tl"
    with pytest.raises(ValueError):
        check_suite([])
    with pytest.raises(ValueError):
        check_suite([f, f])
    with pytest.raises(TypeError):
        check_suite([1])
    assert check_element_kind("IF").value == "if"
    with pytest.raises(ValueError):
        check_element_kind(None)
    for bad in (0, -1, True, 1.5):
        with pytest.raises(ValueError):
            check_budget(bad)
