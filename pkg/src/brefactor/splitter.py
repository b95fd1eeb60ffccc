"""Splitting impure tests into ordered pure fragments.

Cuts are collected as the index of the last constituent of every fragment.
Constituents with an impure signature become singleton fragments; a pure
constituent whose value disagrees with the value already seen for the same
element in the current fragment closes the fragment just before it.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence

from .testlang.interpreter import DEFAULT_BUDGET
from .testlang.nodes import (
    Assert,
    AssertEquals,
    Assign,
    Binary,
    Call,
    ElementId,
    ElementKind,
    ExprStmt,
    Fail,
    FragmentMeta,
    HookCall,
    If,
    Let,
    NullLit,
    ParsedFile,
    Return,
    TestCase,
    Throw,
    Try,
    Unary,
    Var,
    While,
    walk_block,
)
from .testlang.results import Status
from .testlang.runner import run_suite
from .trace import PurityClass, Signature, TraceAnalysis, tracked_elements


@dataclass(frozen=True)
class CutSet:
    test: str
    cuts: tuple[int, ...]

    def ranges(self) -> list[tuple[int, int]]:
        out, start = [], 1
        for cut in self.cuts:
            out.append((start, cut))
            start = cut + 1
        return out


@dataclass(frozen=True)
class Fragment:
    origin: str
    order: int
    range: tuple[int, int]
    purity: str  # "pure" or "impure"
    name: str = ""

    def to_json(self) -> dict:
        return {"order": self.order, "range": list(self.range), "purity": self.purity, "name": self.name}


def compute_cuts(table: Mapping[object, Sequence[Signature]], n: int, test: str = "") -> CutSet:
    """Cut points for a test of ``n`` constituents given per-element signatures.

    ``table`` maps each element to its ``n`` constituent signatures. A single
    left-to-right pass keeps the value each element has shown in the open
    fragment; any cut clears all of them. For one element this is exactly the
    per-element scan, and for several it yields the fewest fragments.
    """
    if n == 0:
        return CutSet(test, ())
    columns = list(table.values())
    for sigs in columns:
        if len(sigs) != n:
            raise ValueError(f"expected {n} signatures per element, got {len(sigs)}")
    cuts: set[int] = set()
    seen: list[Optional[str]] = [None] * len(columns)
    for i in range(1, n + 1):
        sigs = [col[i - 1] for col in columns]
        if any(s.is_impure for s in sigs):
            if i > 1:
                cuts.add(i - 1)
            cuts.add(i)
            seen = [None] * len(columns)
            continue
        if any(s.is_pure and v is not None and v != s.value for s, v in zip(sigs, seen)):
            cuts.add(i - 1)
            seen = [None] * len(columns)
        for k, s in enumerate(sigs):
            if s.is_pure:
                seen[k] = s.value
    cuts.add(n)
    return CutSet(test, tuple(sorted(cuts)))


def per_element_union_cuts(table: Mapping[object, Sequence[Signature]], n: int, test: str = "") -> CutSet:
    """Cuts from scanning each element separately and taking the union.

    Agrees with :func:`compute_cuts` for a single element. With several
    elements it can cut more often than needed, because an element's value is
    not forgotten when another element forces a cut.
    """
    if n == 0:
        return CutSet(test, ())
    cuts: set[int] = set()
    for sigs in table.values():
        v = None
        for i, s in enumerate(sigs, start=1):
            if s.is_impure:
                v = None
                if i > 1:
                    cuts.add(i - 1)
                cuts.add(i)
            elif s.is_pure:
                if v is None:
                    v = s.value
                elif v != s.value:
                    cuts.add(i - 1)
                    v = s.value
    cuts.add(n)
    return CutSet(test, tuple(sorted(cuts)))


def build_fragments(cuts: CutSet, table: Mapping[object, Sequence[Signature]]) -> list[Fragment]:
    fragments = []
    for order, (start, end) in enumerate(cuts.ranges(), start=1):
        impure = any(sigs[c - 1].is_impure for sigs in table.values() for c in range(start, end + 1))
        fragments.append(Fragment(cuts.test, order, (start, end), "impure" if impure else "pure"))
    return fragments


# -- shared variable hoisting ----------------------------------------------


def _refs_expr(expr, names: set, out: set) -> None:
    if isinstance(expr, Var):
        if expr.name in names:
            out.add(expr.name)
    elif isinstance(expr, Call):
        for a in expr.args:
            _refs_expr(a, names, out)
    elif isinstance(expr, Binary):
        _refs_expr(expr.left, names, out)
        _refs_expr(expr.right, names, out)
    elif isinstance(expr, Unary):
        _refs_expr(expr.operand, names, out)


def _refs_block(block, names: set, out: set) -> None:
    names = set(names)
    for stmt in block:
        _refs_stmt(stmt, names, out)
        if isinstance(stmt, Let):
            names.discard(stmt.name)


def _refs_stmt(stmt, names: set, out: set) -> None:
    """Collect which of ``names`` (test-level bindings) ``stmt`` reads or writes."""
    if isinstance(stmt, (Let, Assign)):
        _refs_expr(stmt.value, names, out)
        if isinstance(stmt, Assign) and stmt.name in names:
            out.add(stmt.name)
    elif isinstance(stmt, If):
        _refs_expr(stmt.cond, names, out)
        _refs_block(stmt.then, names, out)
        if stmt.orelse is not None:
            _refs_block(stmt.orelse, names, out)
    elif isinstance(stmt, While):
        _refs_expr(stmt.cond, names, out)
        _refs_block(stmt.body, names, out)
    elif isinstance(stmt, Try):
        _refs_block(stmt.body, names, out)
        _refs_block(stmt.handler, names - {stmt.var}, out)
    elif isinstance(stmt, (Throw, ExprStmt)):
        _refs_expr(stmt.value if isinstance(stmt, Throw) else stmt.expr, names, out)
    elif isinstance(stmt, Return):
        if stmt.value is not None:
            _refs_expr(stmt.value, names, out)
    elif isinstance(stmt, Assert):
        _refs_expr(stmt.cond, names, out)
    elif isinstance(stmt, AssertEquals):
        _refs_expr(stmt.expected, names, out)
        _refs_expr(stmt.actual, names, out)
    elif isinstance(stmt, Fail):
        _refs_expr(stmt.message, names, out)


def _rename_expr(expr, mapping: dict):
    if isinstance(expr, Var):
        return replace(expr, name=mapping[expr.name]) if expr.name in mapping else expr
    if isinstance(expr, Call):
        return replace(expr, args=tuple(_rename_expr(a, mapping) for a in expr.args))
    if isinstance(expr, Binary):
        return replace(expr, left=_rename_expr(expr.left, mapping), right=_rename_expr(expr.right, mapping))
    if isinstance(expr, Unary):
        return replace(expr, operand=_rename_expr(expr.operand, mapping))
    return expr


def _rename_block(block, mapping: dict) -> tuple:
    mapping = dict(mapping)
    out = []
    for stmt in block:
        out.append(_rename_stmt(stmt, mapping))
        if isinstance(stmt, Let):
            mapping.pop(stmt.name, None)
    return tuple(out)


def _rename_stmt(stmt, mapping: dict):
    if not mapping:
        return stmt
    if isinstance(stmt, Let):
        return replace(stmt, value=_rename_expr(stmt.value, mapping))
    if isinstance(stmt, Assign):
        return replace(stmt, name=mapping.get(stmt.name, stmt.name), value=_rename_expr(stmt.value, mapping))
    if isinstance(stmt, If):
        orelse = None if stmt.orelse is None else _rename_block(stmt.orelse, mapping)
        return replace(stmt, cond=_rename_expr(stmt.cond, mapping), then=_rename_block(stmt.then, mapping), orelse=orelse)
    if isinstance(stmt, While):
        return replace(stmt, cond=_rename_expr(stmt.cond, mapping), body=_rename_block(stmt.body, mapping))
    if isinstance(stmt, Try):
        inner = {k: v for k, v in mapping.items() if k != stmt.var}
        return replace(stmt, body=_rename_block(stmt.body, mapping), handler=_rename_block(stmt.handler, inner))
    if isinstance(stmt, Throw):
        return replace(stmt, value=_rename_expr(stmt.value, mapping))
    if isinstance(stmt, Return):
        return stmt if stmt.value is None else replace(stmt, value=_rename_expr(stmt.value, mapping))
    if isinstance(stmt, ExprStmt):
        return replace(stmt, expr=_rename_expr(stmt.expr, mapping))
    if isinstance(stmt, Assert):
        return replace(stmt, cond=_rename_expr(stmt.cond, mapping))
    if isinstance(stmt, AssertEquals):
        return replace(stmt, expected=_rename_expr(stmt.expected, mapping), actual=_rename_expr(stmt.actual, mapping))
    if isinstance(stmt, Fail):
        return replace(stmt, message=_rename_expr(stmt.message, mapping))
    return stmt


def _expr_names(expr, out: set) -> None:
    if isinstance(expr, Var):
        out.add(expr.name)
    elif isinstance(expr, Call):
        out.add(expr.name)
        for a in expr.args:
            _expr_names(a, out)
    elif isinstance(expr, Binary):
        _expr_names(expr.left, out)
        _expr_names(expr.right, out)
    elif isinstance(expr, Unary):
        _expr_names(expr.operand, out)


def identifiers(file: ParsedFile) -> set[str]:
    """Every name a fresh file-scope binding must not collide with."""
    names = {b.name for b in file.file_bindings}
    blocks = [fn.body for fn in file.functions] + [t.constituents for t in file.tests]
    blocks += [b for b in (file.before_hook, file.after_hook) if b is not None]
    for fn in file.functions:
        names.add(fn.name)
        names.update(fn.params)
    names.update(t.name for t in file.tests)
    for b in file.file_bindings:
        _expr_names(b.value, names)
    for block in blocks:
        for stmt in walk_block(block):
            if isinstance(stmt, (Let, Assign)):
                names.add(stmt.name)
            if isinstance(stmt, Try):
                names.add(stmt.var)
            for attr in ("value", "cond", "expr", "expected", "actual", "message"):
                sub = getattr(stmt, attr, None)
                if sub is not None and not isinstance(sub, tuple):
                    _expr_names(sub, names)
    return names


def fresh_name(base: str, taken: set[str]) -> str:
    name, k = base, 1
    while name in taken:
        k += 1
        name = f"{base}_{k}"
    taken.add(name)
    return name


def hoist_shared_variables(
    test: TestCase, fragments: Sequence[Fragment], taken: set[str]
) -> tuple[list[tuple], list[tuple[str, str]]]:
    """Turn test-level variables used across fragments into file-scope bindings.

    Returns the rewritten constituent tuple of every fragment and the list of
    ``(variable, fresh name)`` pairs. ``taken`` is updated with the new names.
    """
    owner = {}
    for frag in fragments:
        for c in range(frag.range[0], frag.range[1] + 1):
            owner[c] = frag.order
    touched: dict[str, set[int]] = {}
    declared: set[str] = set()
    for index, stmt in enumerate(test.constituents, start=1):
        refs: set[str] = set()
        _refs_stmt(stmt, declared, refs)
        for name in refs:
            touched[name].add(owner[index])
        if isinstance(stmt, Let):
            touched.setdefault(stmt.name, set()).add(owner[index])
            declared.add(stmt.name)
    shared = [name for name in touched if len(touched[name]) > 1]
    fresh = {name: fresh_name(f"{test.name}__{name}", taken) for name in shared}

    active: dict[str, str] = {}
    rewritten = []
    for stmt in test.constituents:
        new = _rename_stmt(stmt, active)
        if isinstance(stmt, Let):
            if stmt.name in fresh:
                new = Assign(fresh[stmt.name], new.value, line=stmt.line)
                active[stmt.name] = fresh[stmt.name]
            else:
                active.pop(stmt.name, None)
        rewritten.append(new)
    bodies = [tuple(rewritten[f.range[0] - 1 : f.range[1]]) for f in fragments]
    return bodies, [(name, fresh[name]) for name in shared]


# -- suite refactoring -----------------------------------------------------


@dataclass
class RefactorPlan:
    element_kind: ElementKind
    kept: list[tuple[str, str]] = field(default_factory=list)
    split: dict[tuple[str, str], list[Fragment]] = field(default_factory=dict)
    hoisted: dict[tuple[str, str], list[tuple[str, str]]] = field(default_factory=dict)
    budget_exceeded: list[tuple[str, str]] = field(default_factory=list)
    cuts: dict[tuple[str, str], CutSet] = field(default_factory=dict)
    output_files: list[ParsedFile] = field(default_factory=list)

    @property
    def fragment_count(self) -> int:
        return sum(len(v) for v in self.split.values())

    def to_json(self) -> dict:
        def key(k):
            return f"{k[0]}::{k[1]}"

        return {
            "element_kind": self.element_kind.value,
            "kept": [key(k) for k in self.kept],
            "split": {key(k): [f.to_json() for f in frags] for k, frags in self.split.items()},
            "hoisted": {
                key(k): [{"variable": var, "binding": new} for var, new in pairs]
                for k, pairs in self.hoisted.items()
                if pairs
            },
            "budget_exceeded": [key(k) for k in self.budget_exceeded],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"


def synthesize_tests(
    file: ParsedFile,
    splits: Mapping[str, tuple[list[Fragment], list[tuple], list[tuple[str, str]]]],
) -> tuple[ParsedFile, dict[str, list[Fragment]]]:
    """Replace each split test of ``file`` by its fragment tests, in place.

    ``splits`` maps a test name to (fragments, rewritten bodies, hoists).
    Returns the new file and the fragments annotated with their test names.
    """
    used = {t.name for t in file.tests}
    tests = []
    named: dict[str, list[Fragment]] = {}
    bindings = list(file.file_bindings)
    for test in file.tests:
        if test.name not in splits:
            tests.append(test)
            continue
        fragments, bodies, hoists = splits[test.name]
        for _, new in hoists:
            bindings.append(Let(new, NullLit()))
        named[test.name] = []
        last = len(fragments)
        for frag, body in zip(fragments, bodies):
            name = fresh_name(f"{test.name}_fragment_{frag.order}", used)
            if frag.order == 1 and file.before_hook is not None:
                body = (HookCall("setUp"),) + body
            if frag.order == last and file.after_hook is not None:
                body = body + (HookCall("tearDown"),)
            tests.append(TestCase(name, body, origin_meta=FragmentMeta(test.name, frag.order)))
            named[test.name].append(replace(frag, name=name))
    return replace(file, tests=tuple(tests), file_bindings=tuple(bindings)), named


def refactor_suite(
    files: Sequence[ParsedFile],
    element_kind,
    budget: int = DEFAULT_BUDGET,
    elements: Optional[Iterable[ElementId]] = None,
) -> RefactorPlan:
    """Trace ``files``, keep pure tests and split the impure ones.

    ``elements`` restricts the tracked set to a subset of the elements of
    ``element_kind``; by default every such element is tracked.
    """
    kind = ElementKind.parse(element_kind)
    if kind is None:
        raise ValueError("element kind is required")
    files = list(files)
    suite = run_suite(files, kind, budget)
    analysis = TraceAnalysis(suite, tracked_elements(files, kind, elements))
    plan = RefactorPlan(kind)
    statuses = {r.key: r.outcome.status for r in suite}
    for file in files:
        splits = {}
        taken = identifiers(file)
        for test in file.tests:
            key = (file.path, test.name)
            if statuses[key] is Status.BUDGET_EXCEEDED:
                plan.budget_exceeded.append(key)
                plan.kept.append(key)
                continue
            cls = analysis.classify(key)
            if cls in (PurityClass.PURE, PurityClass.NOT_COVERING) or test.origin_meta is not None:
                plan.kept.append(key)
                continue
            table = analysis.table(key)
            cuts = compute_cuts(table, len(test.constituents), test.name)
            plan.cuts[key] = cuts
            if len(cuts.cuts) <= 1:
                # a lone impure constituent cannot be split further
                plan.kept.append(key)
                continue
            fragments = build_fragments(cuts, table)
            bodies, hoists = hoist_shared_variables(test, fragments, taken)
            splits[test.name] = (fragments, bodies, hoists)
            plan.hoisted[key] = hoists
        new_file, named = synthesize_tests(file, splits)
        for name, frags in named.items():
            plan.split[(file.path, name)] = frags
        plan.output_files.append(new_file)
    return plan
