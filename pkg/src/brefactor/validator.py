"""Mutation-based check that a refactored suite kills the same mutants."""
from __future__ import annotations

import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, is_dataclass, replace
from enum import Enum
from typing import Iterable, Optional, Sequence

from .testlang.interpreter import DEFAULT_BUDGET, INT_MAX
from .testlang.nodes import (
    ARITHMETIC_OPS,
    RELATIONAL_OPS,
    Binary,
    If,
    IntLit,
    ParsedFile,
    Unary,
    While,
)
from .testlang.printer import format_expr
from .testlang.results import Status
from .testlang.runner import run_file


class Operator(str, Enum):
    RELATIONAL_REPLACE = "relational-replace"
    ARITHMETIC_REPLACE = "arithmetic-replace"
    NEGATE_CONDITION = "negate-condition"
    CONSTANT_PERTURB = "constant-perturb"


ALL_OPERATORS = tuple(Operator)


class Outcome(str, Enum):
    KILLED = "killed"
    ALIVE = "alive"
    HANG = "hang"


class MutantApplicationError(ValueError):
    pass


@dataclass(frozen=True)
class Mutant:
    id: int
    file: str
    function: str
    site: str
    path: tuple
    operator: Operator
    original: str
    mutated: str
    replacement: object = field(compare=False, repr=False, default=None)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "file": self.file,
            "function": self.function,
            "site": self.site,
            "operator": self.operator.value,
            "original": self.original,
            "mutated": self.mutated,
        }


def _site_text(path: tuple) -> str:
    out = []
    for step in path:
        if isinstance(step, int):
            out.append(f"[{step}]")
        else:
            out.append(f".{step}" if out else step)
    return "".join(out)


def _children(node):
    """(step, child) pairs of an AST node, tuples expanded to indexed steps."""
    for f in fields(node):
        if f.name in ("line", "ordinal"):
            continue
        value = getattr(node, f.name)
        if isinstance(value, tuple):
            for i, item in enumerate(value):
                if is_dataclass(item):
                    yield (f.name, i), item
        elif is_dataclass(value):
            yield (f.name,), value


def _walk(node, path=()):
    yield path, node
    for steps, child in _children(node):
        yield from _walk(child, path + steps)


def _get(node, path: tuple):
    for step in path:
        node = node[step] if isinstance(step, int) else getattr(node, step)
    return node


def _set(node, path: tuple, new):
    if not path:
        return new
    step = path[0]
    if isinstance(step, int):
        items = list(node)
        items[step] = _set(items[step], path[1:], new)
        return tuple(items)
    return replace(node, **{step: _set(getattr(node, step), path[1:], new)})


def _mutations(node, operators):
    if isinstance(node, Binary):
        if node.op in RELATIONAL_OPS and Operator.RELATIONAL_REPLACE in operators:
            for op in RELATIONAL_OPS:
                if op != node.op:
                    yield Operator.RELATIONAL_REPLACE, replace(node, op=op)
        if node.op in ARITHMETIC_OPS and Operator.ARITHMETIC_REPLACE in operators:
            for op in ARITHMETIC_OPS:
                if op != node.op:
                    yield Operator.ARITHMETIC_REPLACE, replace(node, op=op)
    if isinstance(node, IntLit) and Operator.CONSTANT_PERTURB in operators:
        seen = {node.value}
        for value in (node.value + 1, node.value - 1, 0):
            # literals are non-negative; a minus sign is a separate unary node
            if value not in seen and 0 <= value <= INT_MAX:
                seen.add(value)
                yield Operator.CONSTANT_PERTURB, replace(node, value=value)


def _function_sites(fn, operators):
    for path, node in _walk(fn):
        for op, mutated in _mutations(node, operators):
            yield path, op, node, mutated
        if isinstance(node, (If, While)) and Operator.NEGATE_CONDITION in operators:
            yield path + ("cond",), Operator.NEGATE_CONDITION, node.cond, Unary("!", node.cond)


def generate_mutants(
    files: Sequence[ParsedFile],
    operators: Iterable[Operator] = ALL_OPERATORS,
    seed: int = 0,
    max: Optional[int] = None,
) -> list[Mutant]:
    """Enumerate first-order mutants of function bodies.

    Without ``max`` every site is returned, ordered by file, function and
    position. With ``max``, a seeded uniform sample without replacement is
    drawn and returned in enumeration order. Mutant ids are enumeration indices.
    """
    operators = set(Operator(o) for o in operators)
    mutants = []
    for file in files:
        for fn in file.functions:
            for path, op, original, mutated in _function_sites(fn, operators):
                before, after = format_expr(original), format_expr(mutated)
                if before == after:
                    continue
                mutants.append(
                    Mutant(
                        id=len(mutants),
                        file=file.path,
                        function=fn.name,
                        site=_site_text(path),
                        path=path,
                        operator=op,
                        original=before,
                        mutated=after,
                        replacement=mutated,
                    )
                )
    if max is not None and max < len(mutants):
        rng = random.Random(seed)
        chosen = sorted(rng.sample(range(len(mutants)), max))
        mutants = [mutants[i] for i in chosen]
    return mutants


def apply_mutant(file: ParsedFile, mutant: Mutant) -> ParsedFile:
    if file.path != mutant.file:
        raise MutantApplicationError(f"mutant {mutant.id} targets {mutant.file}, not {file.path}")
    functions = list(file.functions)
    for i, fn in enumerate(functions):
        if fn.name == mutant.function:
            try:
                current = _get(fn, mutant.path)
            except (AttributeError, IndexError, TypeError) as exc:
                raise MutantApplicationError(f"mutant {mutant.id}: site {mutant.site} not found") from exc
            if format_expr(current) != mutant.original:
                raise MutantApplicationError(
                    f"mutant {mutant.id}: expected {mutant.original!r} at {mutant.site}, found {format_expr(current)!r}"
                )
            functions[i] = _set(fn, mutant.path, mutant.replacement)
            return replace(file, functions=tuple(functions))
    raise MutantApplicationError(f"mutant {mutant.id}: no function {mutant.function} in {file.path}")


def classify_statuses(statuses: Iterable[Status]) -> Outcome:
    statuses = list(statuses)
    if any(s.failed for s in statuses):
        return Outcome.KILLED
    if any(s is Status.BUDGET_EXCEEDED for s in statuses):
        return Outcome.HANG
    return Outcome.ALIVE


@dataclass
class KillMatrix:
    outcomes: dict[int, Outcome] = field(default_factory=dict)
    errors: dict[int, str] = field(default_factory=dict)

    def counts(self) -> dict[str, int]:
        out = {o.value: 0 for o in Outcome}
        for o in self.outcomes.values():
            out[o.value] += 1
        return out

    def to_json(self) -> dict:
        return {
            "outcomes": {str(k): v.value for k, v in sorted(self.outcomes.items())},
            "errors": {str(k): v for k, v in sorted(self.errors.items())},
            "counts": self.counts(),
        }


def _evaluate(args) -> tuple[int, Optional[Outcome], Optional[str]]:
    file, mutant, budget = args
    try:
        mutated = apply_mutant(file, mutant)
    except MutantApplicationError as exc:
        return mutant.id, None, str(exc)
    results = run_file(mutated, None, budget)
    return mutant.id, classify_statuses(r.outcome.status for r in results), None


def kill_matrix(
    files: Sequence[ParsedFile],
    mutants: Sequence[Mutant],
    budget: int = DEFAULT_BUDGET,
    n_jobs: int = 1,
) -> KillMatrix:
    """Run the tests of each mutant's file against that mutant.

    Tests can only reach functions of their own file, so tests in other files
    are not rerun; they cannot observe the mutant.
    """
    by_path = {f.path: f for f in files}
    jobs = []
    matrix = KillMatrix()
    for m in mutants:
        if m.file not in by_path:
            matrix.errors[m.id] = f"no file {m.file} in suite"
            continue
        jobs.append((by_path[m.file], m, budget))
    if n_jobs == 1 or len(jobs) < 2:
        results = list(map(_evaluate, jobs))
    else:
        with ProcessPoolExecutor(max_workers=None if n_jobs < 1 else n_jobs) as pool:
            results = list(pool.map(_evaluate, jobs, chunksize=4))
    for mid, outcome, error in results:
        if error is not None:
            matrix.errors[mid] = error
        else:
            matrix.outcomes[mid] = outcome
    matrix.outcomes = dict(sorted(matrix.outcomes.items()))
    return matrix


@dataclass
class EquivalenceReport:
    agreements: dict[str, int]
    disagreements: list[tuple[int, Outcome, Outcome]]

    @property
    def equivalent(self) -> bool:
        return not self.disagreements

    @property
    def total(self) -> int:
        return sum(self.agreements.values()) + len(self.disagreements)

    def to_json(self) -> dict:
        return {
            "equivalent": self.equivalent,
            "total": self.total,
            "agreements": self.agreements,
            "disagreements": [
                {"id": mid, "original": a.value, "refactored": b.value} for mid, a, b in self.disagreements
            ],
        }

    def to_text(self) -> str:
        lines = [
            f"{'outcome':<10} {'both':>6}",
            *(f"{name:<10} {count:>6}" for name, count in self.agreements.items()),
            f"{'differ':<10} {len(self.disagreements):>6}",
        ]
        for mid, a, b in self.disagreements:
            lines.append(f"  mutant {mid}: original {a.value}, refactored {b.value}")
        lines.append("equivalent" if self.equivalent else "NOT equivalent")
        return "\n".join(lines) + "\n"


def compare_matrices(original: KillMatrix, refactored: KillMatrix) -> EquivalenceReport:
    if set(original.outcomes) != set(refactored.outcomes):
        missing = sorted(set(original.outcomes) ^ set(refactored.outcomes))
        raise ValueError(f"kill matrices cover different mutants: {missing[:10]}")
    agreements = {o.value: 0 for o in Outcome}
    disagreements = []
    for mid, a in original.outcomes.items():
        b = refactored.outcomes[mid]
        if a is b:
            agreements[a.value] += 1
        else:
            disagreements.append((mid, a, b))
    return EquivalenceReport(agreements, disagreements)


def dump_mutants(mutants: Sequence[Mutant]) -> str:
    return json.dumps([m.to_json() for m in mutants], indent=2) + "\n"
