"""Step-budgeted tree-walking interpreter with element tracing."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .nodes import (
    Assert,
    AssertEquals,
    Assign,
    Binary,
    BoolLit,
    Call,
    ElementId,
    ElementKind,
    ExprStmt,
    Fail,
    HookCall,
    If,
    IntLit,
    Let,
    NullLit,
    ParsedFile,
    Return,
    StrLit,
    TestCase,
    Throw,
    Try,
    Unary,
    Var,
    While,
)
from .results import CAUGHT, ELSE, NO_EXCEPTION, NOT_CAUGHT, THEN, Status, TestOutcome, TraceEvent

DEFAULT_BUDGET = 1_000_000
MAX_CALL_DEPTH = 200
INT_MIN, INT_MAX = -(2**63), 2**63 - 1


@dataclass(frozen=True)
class InjectionConfig:
    """Throw a synthetic exception at every dynamic entry of ``element``'s try body."""

    element: ElementId
    value: str = "InjectedException"


class LangError(Exception):
    """An exception raised inside the test language; catchable by try/catch."""

    def __init__(self, value):
        super().__init__(value)
        self.value = value


class AssertionSignal(Exception):
    pass


class BudgetExhausted(Exception):
    pass


class _ReturnSignal(Exception):
    def __init__(self, value):
        self.value = value


def to_str(value) -> str:
    if value is None:
        return "null"
    if value is True:
        return "true"
    if value is False:
        return "false"
    return str(value)


def values_equal(a, b) -> bool:
    return type(a) is type(b) and a == b


def _type_name(value) -> str:
    if value is None:
        return "null"
    return {bool: "bool", int: "int", str: "string"}[type(value)]


def _runtime(message: str) -> LangError:
    return LangError(message)


def _check_int(value) -> int:
    if type(value) is not int:
        raise _runtime(f"TypeError: expected int, got {_type_name(value)}")
    return value


def _check_bool(value) -> bool:
    if type(value) is not bool:
        raise _runtime(f"TypeError: expected bool, got {_type_name(value)}")
    return value


def _wrap(value: int) -> int:
    if value < INT_MIN or value > INT_MAX:
        raise _runtime("ArithmeticException: integer overflow")
    return value


def _divide(a: int, b: int) -> int:
    if b == 0:
        raise _runtime("ArithmeticException: / by zero")
    q = abs(a) // abs(b)
    return _wrap(q if (a >= 0) == (b >= 0) else -q)


def _modulo(a: int, b: int) -> int:
    if b == 0:
        raise _runtime("ArithmeticException: % by zero")
    return a - b * _divide(a, b)


def _check_str(value) -> str:
    if type(value) is not str:
        raise _runtime(f"TypeError: expected string, got {_type_name(value)}")
    return value


def _substr(s, start, end):
    s, start, end = _check_str(s), _check_int(start), _check_int(end)
    if start < 0 or end > len(s) or start > end:
        raise _runtime(f"StringIndexOutOfBoundsException: [{start}, {end}) of length {len(s)}")
    return s[start:end]


def _char_at(s, i):
    s, i = _check_str(s), _check_int(i)
    if i < 0 or i >= len(s):
        raise _runtime(f"StringIndexOutOfBoundsException: index {i} of length {len(s)}")
    return s[i]


BUILTINS = {
    "len": lambda s: len(_check_str(s)),
    "substr": _substr,
    "char_at": _char_at,
    "index_of": lambda s, sub: _check_str(s).find(_check_str(sub)),
    "last_index_of": lambda s, sub: _check_str(s).rfind(_check_str(sub)),
    "to_str": to_str,
}


class Interpreter:
    """Runs tests of a single file.

    ``globals_`` holds file-scope bindings. Passing the dictionary of a previous
    run continues that state, which is how fragments of one origin share
    hoisted variables.
    """

    def __init__(
        self,
        file: ParsedFile,
        element_kind: Optional[ElementKind] = None,
        budget: int = DEFAULT_BUDGET,
        injection: Optional[InjectionConfig] = None,
    ):
        if budget <= 0:
            raise ValueError("budget must be positive")
        self.file = file
        self.functions = {fn.name: fn for fn in file.functions}
        self.element_kind = element_kind
        self.budget = budget
        self.injection = injection
        self.globals: Optional[dict] = None
        self._ids: dict = {}
        self._reset()

    def _reset(self) -> None:
        self.steps = 0
        self.events: list[TraceEvent] = []
        self.assert_count = 0
        self.constituent = 0
        self.test_name = ""
        self.call_stack: list[str] = []
        self.depth = 0

    # -- public --------------------------------------------------------

    def run_test(self, test: TestCase, globals_: Optional[dict] = None) -> tuple[TestOutcome, list[TraceEvent]]:
        self._reset()
        self.test_name = test.name
        auto_hooks = test.origin_meta is None
        try:
            if globals_ is None:
                self.globals = {}
                for binding in self.file.file_bindings:
                    self.globals[binding.name] = self.eval(binding.value, [{}])
            else:
                self.globals = globals_
            if auto_hooks and self.file.before_hook is not None:
                self.exec_block(self.file.before_hook, [{}])
            frame = [{}]
            for index, stmt in enumerate(test.constituents, start=1):
                self.constituent = index
                self.exec(stmt, frame)
            self.constituent = 0
            if auto_hooks and self.file.after_hook is not None:
                self.exec_block(self.file.after_hook, [{}])
            outcome = TestOutcome(Status.PASSED, None, self.assert_count)
        except AssertionSignal as sig:
            outcome = TestOutcome(Status.ASSERTION_FAILED, str(sig), self.assert_count)
        except LangError as err:
            outcome = TestOutcome(Status.UNCAUGHT_EXCEPTION, f"uncaught exception: {to_str(err.value)}", self.assert_count)
        except BudgetExhausted:
            outcome = TestOutcome(Status.BUDGET_EXCEEDED, f"step budget of {self.budget} exhausted", self.assert_count)
        except _ReturnSignal:  # pragma: no cover - rejected by the parser
            raise RuntimeError("return escaped a function body")
        return outcome, self.events

    # -- bookkeeping ---------------------------------------------------

    def tick(self) -> None:
        self.steps += 1
        if self.steps > self.budget:
            raise BudgetExhausted()

    def element_id(self, kind: ElementKind, ordinal: int) -> ElementId:
        key = (kind, self.call_stack[-1], ordinal)
        eid = self._ids.get(key)
        if eid is None:
            eid = ElementId(kind, self.file.path, key[1], ordinal)
            self._ids[key] = eid
        return eid

    def emit(self, eid: ElementId, value: str) -> None:
        self.events.append(TraceEvent(self.test_name, self.constituent, eid, value, len(self.events) + 1))

    # -- statements ----------------------------------------------------

    def exec_block(self, block, frame: list) -> None:
        frame.append({})
        try:
            for stmt in block:
                self.exec(stmt, frame)
        finally:
            frame.pop()

    def exec(self, stmt, frame: list) -> None:
        self.tick()
        handler = self._exec_dispatch[type(stmt)]
        handler(self, stmt, frame)

    def _exec_let(self, stmt: Let, frame):
        frame[-1][stmt.name] = self.eval(stmt.value, frame)

    def _exec_assign(self, stmt: Assign, frame):
        value = self.eval(stmt.value, frame)
        for scope in reversed(frame):
            if stmt.name in scope:
                scope[stmt.name] = value
                return
        if stmt.name in self.globals:
            self.globals[stmt.name] = value
            return
        raise _runtime(f"NameError: assignment to undeclared variable {stmt.name}")

    def _exec_if(self, stmt: If, frame):
        cond = _check_bool(self.eval(stmt.cond, frame))
        if stmt.ordinal is not None and self.element_kind is ElementKind.IF:
            self.emit(self.element_id(ElementKind.IF, stmt.ordinal), THEN if cond else ELSE)
        if cond:
            self.exec_block(stmt.then, frame)
        elif stmt.orelse is not None:
            self.exec_block(stmt.orelse, frame)

    def _exec_while(self, stmt: While, frame):
        while _check_bool(self.eval(stmt.cond, frame)):
            self.exec_block(stmt.body, frame)
            self.tick()

    def _exec_try(self, stmt: Try, frame):
        eid = None
        if stmt.ordinal is not None:
            if self.element_kind is ElementKind.TRY or self.injection is not None:
                eid = self.element_id(ElementKind.TRY, stmt.ordinal)
        traced = eid is not None and self.element_kind is ElementKind.TRY
        try:
            if eid is not None and self.injection is not None and self.injection.element == eid:
                raise LangError(self.injection.value)
            self.exec_block(stmt.body, frame)
        except LangError as err:
            frame.append({stmt.var: err.value})
            try:
                for sub in stmt.handler:
                    self.exec(sub, frame)
            except LangError:
                if traced:
                    self.emit(eid, NOT_CAUGHT)
                raise
            except _ReturnSignal:
                if traced:
                    self.emit(eid, CAUGHT)
                raise
            finally:
                frame.pop()
            if traced:
                self.emit(eid, CAUGHT)
        except _ReturnSignal:
            if traced:
                self.emit(eid, NO_EXCEPTION)
            raise
        else:
            if traced:
                self.emit(eid, NO_EXCEPTION)

    def _exec_throw(self, stmt: Throw, frame):
        raise LangError(self.eval(stmt.value, frame))

    def _exec_return(self, stmt: Return, frame):
        raise _ReturnSignal(None if stmt.value is None else self.eval(stmt.value, frame))

    def _exec_expr(self, stmt: ExprStmt, frame):
        self.eval(stmt.expr, frame)

    def _exec_assert(self, stmt: Assert, frame):
        self.assert_count += 1
        if not _check_bool(self.eval(stmt.cond, frame)):
            raise AssertionSignal(f"line {stmt.line}: assertion failed")

    def _exec_assert_equals(self, stmt: AssertEquals, frame):
        self.assert_count += 1
        expected = self.eval(stmt.expected, frame)
        actual = self.eval(stmt.actual, frame)
        if not values_equal(expected, actual):
            raise AssertionSignal(f"line {stmt.line}: expected {to_str(expected)} but was {to_str(actual)}")

    def _exec_fail(self, stmt: Fail, frame):
        self.assert_count += 1
        raise AssertionSignal(f"line {stmt.line}: {to_str(self.eval(stmt.message, frame))}")

    def _exec_hook(self, stmt: HookCall, frame):
        block = self.file.before_hook if stmt.hook == "setUp" else self.file.after_hook
        if block is None:
            return
        saved = self.constituent
        self.constituent = 0
        try:
            self.exec_block(block, [{}])
        finally:
            self.constituent = saved

    _exec_dispatch = {
        Let: _exec_let,
        Assign: _exec_assign,
        If: _exec_if,
        While: _exec_while,
        Try: _exec_try,
        Throw: _exec_throw,
        Return: _exec_return,
        ExprStmt: _exec_expr,
        Assert: _exec_assert,
        AssertEquals: _exec_assert_equals,
        Fail: _exec_fail,
        HookCall: _exec_hook,
    }

    # -- expressions ---------------------------------------------------

    def eval(self, expr, frame: list):
        self.tick()
        return self._eval_dispatch[type(expr)](self, expr, frame)

    def _eval_literal(self, expr, frame):
        return expr.value

    def _eval_null(self, expr, frame):
        return None

    def _eval_var(self, expr: Var, frame):
        for scope in reversed(frame):
            if expr.name in scope:
                return scope[expr.name]
        if expr.name in self.globals:
            return self.globals[expr.name]
        raise _runtime(f"NameError: undefined variable {expr.name}")

    def _eval_call(self, expr: Call, frame):
        args = [self.eval(a, frame) for a in expr.args]
        fn = self.functions.get(expr.name)
        if fn is None:
            builtin = BUILTINS.get(expr.name)
            if builtin is None:
                raise _runtime(f"NameError: undefined function {expr.name}")
            try:
                return builtin(*args)
            except TypeError:
                raise _runtime(f"TypeError: bad arguments to {expr.name}") from None
        if len(args) != len(fn.params):
            raise _runtime(f"TypeError: {fn.name} expects {len(fn.params)} arguments, got {len(args)}")
        if self.depth >= MAX_CALL_DEPTH:
            raise _runtime("StackOverflowError")
        self.depth += 1
        self.call_stack.append(fn.name)
        try:
            self.exec_block(fn.body, [dict(zip(fn.params, args))])
        except _ReturnSignal as ret:
            return ret.value
        finally:
            self.call_stack.pop()
            self.depth -= 1
        return None

    def _eval_unary(self, expr: Unary, frame):
        value = self.eval(expr.operand, frame)
        if expr.op == "!":
            return not _check_bool(value)
        return _wrap(-_check_int(value))

    def _eval_binary(self, expr: Binary, frame):
        op = expr.op
        if op == "&&":
            return _check_bool(self.eval(expr.left, frame)) and _check_bool(self.eval(expr.right, frame))
        if op == "||":
            return _check_bool(self.eval(expr.left, frame)) or _check_bool(self.eval(expr.right, frame))
        left = self.eval(expr.left, frame)
        right = self.eval(expr.right, frame)
        if op == "==":
            return values_equal(left, right)
        if op == "!=":
            return not values_equal(left, right)
        if op == "+" and (type(left) is str or type(right) is str):
            return to_str(left) + to_str(right)
        a, b = _check_int(left), _check_int(right)
        if op == "+":
            return _wrap(a + b)
        if op == "-":
            return _wrap(a - b)
        if op == "*":
            return _wrap(a * b)
        if op == "/":
            return _divide(a, b)
        if op == "%":
            return _modulo(a, b)
        if op == "<":
            return a < b
        if op == "<=":
            return a <= b
        if op == ">":
            return a > b
        if op == ">=":
            return a >= b
        raise AssertionError(f"unknown operator {op}")  # pragma: no cover

    _eval_dispatch = {
        IntLit: _eval_literal,
        BoolLit: _eval_literal,
        StrLit: _eval_literal,
        NullLit: _eval_null,
        Var: _eval_var,
        Call: _eval_call,
        Unary: _eval_unary,
        Binary: _eval_binary,
    }
