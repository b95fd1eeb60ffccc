"""AST node types for the test language.

Nodes are frozen dataclasses so that two parses of the same source compare
equal. Source positions are carried along but excluded from comparison.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple, Union


class ElementKind(str, Enum):
    IF = "if"
    TRY = "try"

    @classmethod
    def parse(cls, text: Union[str, "ElementKind", None]) -> Optional["ElementKind"]:
        if text is None or isinstance(text, ElementKind):
            return text
        lowered = text.lower()
        if lowered in ("none", ""):
            return None
        return cls(lowered)


@dataclass(frozen=True, order=True)
class ElementId:
    kind: ElementKind
    file: str
    function: str
    ordinal: int

    def __str__(self) -> str:
        return f"{self.kind.value}:{self.file}:{self.function}:{self.ordinal}"

    @classmethod
    def parse(cls, text: str) -> "ElementId":
        # the file part may itself contain ':' (unlikely but legal in paths)
        kind, rest = text.split(":", 1)
        file, function, ordinal = rest.rsplit(":", 2)
        return cls(ElementKind(kind.lower()), file, function, int(ordinal))

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "file": self.file,
            "function": self.function,
            "ordinal": self.ordinal,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ElementId":
        return cls(ElementKind(data["kind"]), data["file"], data["function"], int(data["ordinal"]))


def _pos() -> int:
    return field(default=0, compare=False, repr=False)


# -- expressions ------------------------------------------------------------


@dataclass(frozen=True)
class IntLit:
    value: int
    line: int = _pos()


@dataclass(frozen=True)
class BoolLit:
    value: bool
    line: int = _pos()


@dataclass(frozen=True)
class StrLit:
    value: str
    line: int = _pos()


@dataclass(frozen=True)
class NullLit:
    line: int = _pos()


@dataclass(frozen=True)
class Var:
    name: str
    line: int = _pos()


@dataclass(frozen=True)
class Call:
    name: str
    args: Tuple["Expr", ...]
    line: int = _pos()


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    line: int = _pos()


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"
    line: int = _pos()


Expr = Union[IntLit, BoolLit, StrLit, NullLit, Var, Call, Binary, Unary]

RELATIONAL_OPS = ("<", "<=", ">", ">=", "==", "!=")
ARITHMETIC_OPS = ("+", "-", "*", "/", "%")
LOGICAL_OPS = ("&&", "||")


# -- statements -------------------------------------------------------------

Block = Tuple["Stmt", ...]


@dataclass(frozen=True)
class Let:
    name: str
    value: Expr
    line: int = _pos()


@dataclass(frozen=True)
class Assign:
    name: str
    value: Expr
    line: int = _pos()


@dataclass(frozen=True)
class If:
    cond: Expr
    then: Block
    orelse: Optional[Block] = None
    # set only for ifs inside function bodies
    ordinal: Optional[int] = None
    line: int = _pos()


@dataclass(frozen=True)
class While:
    cond: Expr
    body: Block
    line: int = _pos()


@dataclass(frozen=True)
class Try:
    body: Block
    var: str
    handler: Block
    ordinal: Optional[int] = None
    line: int = _pos()


@dataclass(frozen=True)
class Throw:
    value: Expr
    line: int = _pos()


@dataclass(frozen=True)
class Return:
    value: Optional[Expr] = None
    line: int = _pos()


@dataclass(frozen=True)
class ExprStmt:
    expr: Expr
    line: int = _pos()


@dataclass(frozen=True)
class Assert:
    cond: Expr
    line: int = _pos()


@dataclass(frozen=True)
class AssertEquals:
    expected: Expr
    actual: Expr
    line: int = _pos()


@dataclass(frozen=True)
class Fail:
    message: Expr
    line: int = _pos()


@dataclass(frozen=True)
class HookCall:
    """Explicit ``setUp();`` or ``tearDown();`` inside a test body."""

    hook: str
    line: int = _pos()


Stmt = Union[Let, Assign, If, While, Try, Throw, Return, ExprStmt, Assert, AssertEquals, Fail, HookCall]


# -- declarations -----------------------------------------------------------


@dataclass(frozen=True)
class FunctionDecl:
    name: str
    params: Tuple[str, ...]
    body: Block
    line: int = _pos()


@dataclass(frozen=True)
class FragmentMeta:
    origin: str
    order: int


@dataclass(frozen=True)
class TestCase:
    name: str
    constituents: Block
    origin_meta: Optional[FragmentMeta] = None
    line: int = _pos()

    __test__ = False  # keep pytest from collecting this class


@dataclass(frozen=True)
class ParsedFile:
    path: str
    functions: Tuple[FunctionDecl, ...] = ()
    tests: Tuple[TestCase, ...] = ()
    before_hook: Optional[Block] = None
    after_hook: Optional[Block] = None
    file_bindings: Tuple[Let, ...] = ()

    def function(self, name: str) -> Optional[FunctionDecl]:
        for fn in self.functions:
            if fn.name == name:
                return fn
        return None

    def test(self, name: str) -> TestCase:
        for t in self.tests:
            if t.name == name:
                return t
        raise KeyError(f"unknown test {name!r} in {self.path}")

    def elements(self, kind: Optional[ElementKind] = None) -> list[ElementId]:
        """Element ids of every tracked if/try, in source order per function."""
        found = []
        for fn in self.functions:
            for node in walk_block(fn.body):
                if isinstance(node, If) and node.ordinal is not None:
                    found.append(ElementId(ElementKind.IF, self.path, fn.name, node.ordinal))
                elif isinstance(node, Try) and node.ordinal is not None:
                    found.append(ElementId(ElementKind.TRY, self.path, fn.name, node.ordinal))
        kind = ElementKind.parse(kind)
        if kind is not None:
            found = [e for e in found if e.kind is kind]
        return found


def child_blocks(stmt: Stmt) -> Tuple[Block, ...]:
    if isinstance(stmt, If):
        return (stmt.then,) if stmt.orelse is None else (stmt.then, stmt.orelse)
    if isinstance(stmt, While):
        return (stmt.body,)
    if isinstance(stmt, Try):
        return (stmt.body, stmt.handler)
    return ()


def walk_block(block: Block):
    """Pre-order walk over the statements of ``block`` and nested blocks."""
    for stmt in block:
        yield stmt
        for sub in child_blocks(stmt):
            yield from walk_block(sub)
