"""Deterministic pretty-printer; the inverse of :mod:`.parser`."""
from __future__ import annotations

from .nodes import (
    Assert,
    AssertEquals,
    Assign,
    Binary,
    BoolLit,
    Call,
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
from .parser import BINARY_LEVELS

INDENT = "    "

_PRECEDENCE = {op: level + 1 for level, ops in enumerate(BINARY_LEVELS) for op in ops}
_UNARY_PRECEDENCE = len(BINARY_LEVELS) + 1


def quote(text: str) -> str:
    out = ['"']
    for ch in text:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\r":
            out.append("\\r")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def _precedence(expr) -> int:
    if isinstance(expr, Binary):
        return _PRECEDENCE[expr.op]
    if isinstance(expr, Unary):
        return _UNARY_PRECEDENCE
    return _UNARY_PRECEDENCE + 1


def format_expr(expr) -> str:
    if isinstance(expr, IntLit):
        return str(expr.value)
    if isinstance(expr, BoolLit):
        return "true" if expr.value else "false"
    if isinstance(expr, StrLit):
        return quote(expr.value)
    if isinstance(expr, NullLit):
        return "null"
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Call):
        return f"{expr.name}({', '.join(format_expr(a) for a in expr.args)})"
    if isinstance(expr, Unary):
        inner = format_expr(expr.operand)
        if _precedence(expr.operand) < _UNARY_PRECEDENCE:
            inner = f"({inner})"
        return f"{expr.op}{inner}"
    if isinstance(expr, Binary):
        prec = _PRECEDENCE[expr.op]
        left = format_expr(expr.left)
        right = format_expr(expr.right)
        if _precedence(expr.left) < prec:
            left = f"({left})"
        # all binary operators are left-associative
        if _precedence(expr.right) <= prec:
            right = f"({right})"
        return f"{left} {expr.op} {right}"
    raise TypeError(f"not an expression: {expr!r}")


def format_stmt(stmt, depth: int = 0) -> list[str]:
    pad = INDENT * depth
    if isinstance(stmt, Let):
        return [f"{pad}let {stmt.name} = {format_expr(stmt.value)};"]
    if isinstance(stmt, Assign):
        return [f"{pad}{stmt.name} = {format_expr(stmt.value)};"]
    if isinstance(stmt, If):
        lines = [f"{pad}if ({format_expr(stmt.cond)}) {{"]
        lines += format_block(stmt.then, depth + 1)
        node = stmt
        while node.orelse is not None:
            orelse = node.orelse
            if len(orelse) == 1 and isinstance(orelse[0], If):
                node = orelse[0]
                lines.append(f"{pad}}} else if ({format_expr(node.cond)}) {{")
                lines += format_block(node.then, depth + 1)
            else:
                lines.append(f"{pad}}} else {{")
                lines += format_block(orelse, depth + 1)
                break
        lines.append(f"{pad}}}")
        return lines
    if isinstance(stmt, While):
        return [f"{pad}while ({format_expr(stmt.cond)}) {{", *format_block(stmt.body, depth + 1), f"{pad}}}"]
    if isinstance(stmt, Try):
        return [
            f"{pad}try {{",
            *format_block(stmt.body, depth + 1),
            f"{pad}}} catch ({stmt.var}) {{",
            *format_block(stmt.handler, depth + 1),
            f"{pad}}}",
        ]
    if isinstance(stmt, Throw):
        return [f"{pad}throw {format_expr(stmt.value)};"]
    if isinstance(stmt, Return):
        if stmt.value is None:
            return [f"{pad}return;"]
        return [f"{pad}return {format_expr(stmt.value)};"]
    if isinstance(stmt, ExprStmt):
        return [f"{pad}{format_expr(stmt.expr)};"]
    if isinstance(stmt, Assert):
        return [f"{pad}assert({format_expr(stmt.cond)});"]
    if isinstance(stmt, AssertEquals):
        return [f"{pad}assertEquals({format_expr(stmt.expected)}, {format_expr(stmt.actual)});"]
    if isinstance(stmt, Fail):
        return [f"{pad}fail({format_expr(stmt.message)});"]
    if isinstance(stmt, HookCall):
        return [f"{pad}{stmt.hook}();"]
    raise TypeError(f"not a statement: {stmt!r}")


def format_block(block, depth: int) -> list[str]:
    lines = []
    for stmt in block:
        lines += format_stmt(stmt, depth)
    return lines


def _braced(header: str, block) -> list[str]:
    if not block:
        return [f"{header} {{ }}"]
    return [f"{header} {{", *format_block(block, 1), "}"]


def format_test(test: TestCase) -> list[str]:
    lines = []
    if test.origin_meta is not None:
        lines.append(f"//@fragment origin={test.origin_meta.origin} order={test.origin_meta.order}")
    return lines + _braced(f"test {test.name}", test.constituents)


def serialize_file(ast: ParsedFile) -> str:
    chunks: list[list[str]] = []
    if ast.file_bindings:
        chunks.append([f"let {b.name} = {format_expr(b.value)};" for b in ast.file_bindings])
    for fn in ast.functions:
        chunks.append(_braced(f"fn {fn.name}({', '.join(fn.params)})", fn.body))
    if ast.before_hook is not None:
        chunks.append(_braced("setUp", ast.before_hook))
    if ast.after_hook is not None:
        chunks.append(_braced("tearDown", ast.after_hook))
    for test in ast.tests:
        chunks.append(format_test(test))
    return "\n\n".join("\n".join(c) for c in chunks) + "\n"
