"""Acceptance criteria 1-10; every test prints one PASS/FAIL line."""
import io
import os
import random
import time

import pytest

from brefactor.applications import ContractClass, ContractReport, classify_try_contracts, repair_readiness
from brefactor.cli import dispatch
from brefactor.metrics import format_percent, purity_report
from brefactor.splitter import build_fragments, compute_cuts, refactor_suite
from brefactor.testlang import ELSE, THEN, ElementId, ElementKind, run_suite
from brefactor.testlang.nodes import HookCall
from brefactor.trace import BOTTOM, Signature
from brefactor.validator import compare_matrices, generate_mutants, kill_matrix

from conftest import load
from test_splitter import SIGS, brute_force_minimum, random_instance


@pytest.fixture()
def verdict(capsys):
    def emit(number: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} ({detail})")
        assert ok, detail

    return emit


def test_criterion_01_alternation(verdict):
    start = time.perf_counter()
    T, E = Signature.pure(THEN), Signature.pure(ELSE)
    table = {"e": [BOTTOM, T, BOTTOM, E, BOTTOM, E, T]}
    ranges = [f.range for f in build_fragments(compute_cuts(table, 7), table)]
    elapsed = time.perf_counter() - start
    verdict(1, ranges == [(1, 3), (4, 6), (7, 7)] and elapsed < 1, f"fragments {ranges}, {elapsed:.3f}s")


def test_criterion_02_factorial(verdict):
    start = time.perf_counter()
    f = load("factorial.tl")
    element = ElementId.parse("if:factorial.tl:factorialLog:1")
    plan = refactor_suite([f], "if")
    frags = plan.split.get(("factorial.tl", "testFactorial"), [])
    out = plan.output_files[0]
    tests = [out.test(fr.name) for fr in frags]
    hooks_ok = (
        len(tests) == 2
        and tests[0].constituents[0] == HookCall("setUp")
        and tests[-1].constituents[-1] == HookCall("tearDown")
    )
    before = repair_readiness([f], element).ready
    after = repair_readiness(plan.output_files, element).ready
    elapsed = time.perf_counter() - start
    ok = hooks_ok and plan.kept == [("factorial.tl", "testFactorialFail")] and not before and after and elapsed < 5
    verdict(2, ok, f"{len(frags)} fragments, ready {before} -> {after}, {elapsed:.2f}s")


def test_criterion_03_string_fixtures(verdict):
    mid = refactor_suite([load("string_mid.tl")], "if")
    n_mid = len(mid.split.get(("string_mid.tl", "testMid_String"), []))
    pkg = refactor_suite([load("package_name.tl")], "if")
    kept = ("package_name.tl", "testGetPackageName_Class") in pkg.kept
    n_pkg = len(pkg.split.get(("package_name.tl", "testGetPackageName_String"), []))
    verdict(3, n_mid == 4 and kept and n_pkg == 2, f"mid {n_mid} fragments, package name kept={kept} split={n_pkg}")


def test_criterion_04_mutation_equivalence(corpus, verdict):
    start = time.perf_counter()
    mutants = generate_mutants(corpus, seed=0)
    refactored = refactor_suite(corpus, "if").output_files
    jobs = os.cpu_count() or 1
    report = compare_matrices(kill_matrix(corpus, mutants, n_jobs=jobs), kill_matrix(refactored, mutants, n_jobs=jobs))
    elapsed = time.perf_counter() - start
    ok = len(corpus) >= 20 and len(mutants) >= 100 and report.equivalent and elapsed < 300
    detail = f"{len(corpus)} files, {len(mutants)} mutants, agreement {report.agreements}, differ {len(report.disagreements)}, {elapsed:.0f}s"
    verdict(4, ok, detail)


def test_criterion_05_purity_improvement(corpus, verdict):
    regressions, improved = [], {"if": 0, "try": 0}
    for kind in ("if", "try"):
        for f in corpus:
            out = refactor_suite([f], kind).output_files
            b = purity_report(run_suite([f], kind), [f], kind)
            a = purity_report(run_suite(out, kind), out, kind)
            if a.purely_covered < b.purely_covered or a.at_least_one_pure < b.at_least_one_pure:
                regressions.append((kind, f.path))
            if a.purely_covered > b.purely_covered and a.at_least_one_pure >= b.at_least_one_pure:
                improved[kind] += 1
    ok = not regressions and all(n >= 5 for n in improved.values())
    verdict(5, ok, f"regressions {regressions}, strictly improved {improved}")


def test_criterion_06_minimality(verdict):
    start = time.perf_counter()
    rng = random.Random(6)
    mismatches = 0
    for _ in range(1000):
        table, n = random_instance(rng)
        if len(build_fragments(compute_cuts(table, n), table)) != brute_force_minimum(table, n):
            mismatches += 1
    elapsed = time.perf_counter() - start
    verdict(6, mismatches == 0 and elapsed < 30, f"{mismatches} mismatches in 1000 instances, {elapsed:.2f}s")
    assert len(SIGS) == 4


def test_criterion_07_idempotence(corpus, verdict):
    extra = 0
    for kind in ("if", "try"):
        out = refactor_suite(corpus, kind).output_files
        again = refactor_suite(out, kind)
        extra += sum(len(c.cuts) - 1 for c in again.cuts.values()) + again.fragment_count
    verdict(7, extra == 0, f"{extra} additional cuts")


def test_criterion_08_contracts(corpus, verdict):
    f = load("unknown_contract.tl")
    e = ElementId.parse("try:unknown_contract.tl:lookupOrDefault:1")
    single = classify_try_contracts([f], refactor_suite([f], "try").output_files)
    fixture_ok = single.before[e] is ContractClass.UNKNOWN and single.after[e] is not ContractClass.UNKNOWN
    increases = []
    for g in corpus:
        r = classify_try_contracts([g], refactor_suite([g], "try").output_files)
        if r.totals_after["unknown"] > r.totals_before["unknown"]:
            increases.append(g.path)
    ids = [ElementId(ElementKind.TRY, "x.tl", "f", i) for i in range(22)]
    lang = ContractReport(
        {e2: ContractClass.UNKNOWN for e2 in ids},
        {e2: ContractClass.UNKNOWN if i < 7 else ContractClass.SOURCE_INDEPENDENT for i, e2 in enumerate(ids)},
    )
    arithmetic_ok = lang.unknown_reduction == 15 and lang.improvement == "68.18%"
    ok = fixture_ok and not increases and arithmetic_ok
    detail = f"fixture {single.before[e].value} -> {single.after[e].value}, increases {increases}, 22 -> 7 gives {lang.improvement}"
    verdict(8, ok, detail)


def test_criterion_09_metric_arithmetic(verdict):
    pure_share = format_percent(539, 2254)
    growth = format_percent(1701 - 451, 451)
    verdict(9, pure_share == "23.91%" and growth == "277.16%", f"{pure_share}, {growth}")


def _cli(argv):
    out, err = io.StringIO(), io.StringIO()
    code = dispatch([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def test_criterion_10_cli_determinism(fixtures_dir, tmp_path, verdict):
    ref_if, ref_try = tmp_path / "if", tmp_path / "try"
    _cli(["refactor", fixtures_dir, "--elements", "if", "-o", ref_if])
    _cli(["refactor", fixtures_dir, "--elements", "try", "-o", ref_try])
    events = tmp_path / "events.jsonl"
    commands = {
        "run": ["run", fixtures_dir],
        "run json": ["run", fixtures_dir, "--format", "json"],
        "trace": ["trace", fixtures_dir, "--elements", "if", "--format", "json", "-o", events],
        "refactor": ["refactor", fixtures_dir, "--elements", "try", "-o", tmp_path / "again", "--format", "json"],
        "metrics": ["metrics", fixtures_dir, "--elements", "if", "--compare", ref_if],
        "mutate": ["mutate", fixtures_dir, "--against", ref_if, "--seed", "7", "--max", "40", "--budget", "100000", "--format", "json"],
        "contracts": ["contracts", fixtures_dir, "--refactored", ref_try],
        "repair-check": ["repair-check", ref_if, "--element", "if:factorial.tl:factorialLog:1"],
    }
    differing = []
    for name, argv in commands.items():
        first = _cli(argv) + ((events.read_bytes(),) if name == "trace" else ())
        second = _cli(argv) + ((events.read_bytes(),) if name == "trace" else ())
        if first != second or first[0] not in (0, 1):
            differing.append(name)
    plan_a = (ref_try / "plan.json").read_bytes()
    plan_b = (tmp_path / "again" / "plan.json").read_bytes()
    if plan_a != plan_b:
        differing.append("plan.json")
    verdict(10, not differing, f"{len(commands)} subcommand invocations, differing {differing}")
