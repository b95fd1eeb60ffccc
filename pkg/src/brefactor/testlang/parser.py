"""Tokenizer and recursive-descent parser for ``.tl`` files."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .nodes import (
    Assert,
    AssertEquals,
    Assign,
    Binary,
    BoolLit,
    Call,
    ExprStmt,
    Fail,
    FragmentMeta,
    FunctionDecl,
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

INT64_MAX = 2**63 - 1

KEYWORDS = {
    "fn", "test", "let", "if", "else", "while", "try", "catch", "throw", "return",
    "true", "false", "null", "setUp", "tearDown", "assert", "assertEquals", "fail",
}

HOOKS = ("setUp", "tearDown")


class TLSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int, path: str = "<source>"):
        super().__init__(f"{path}:{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.path = path


class DuplicateNameError(ValueError):
    pass


@dataclass
class Token:
    kind: str  # INT, STR, IDENT, KW, OP, META, EOF
    text: str
    line: int
    column: int
    value: object = None


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<meta>//@fragment[^\n]*)
  | (?P<comment>//[^\n]*)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<op>&&|\|\||==|!=|<=|>=|[-+*/%<>=!(){},;])
    """,
    re.VERBOSE,
)

_META_RE = re.compile(r"//@fragment\s+origin=([A-Za-z_][A-Za-z_0-9]*)\s+order=(\d+)\s*$")

_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\", "r": "\r"}


def _unescape(body: str, line: int, column: int, path: str) -> str:
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            nxt = body[i + 1]
            if nxt not in _ESCAPES:
                raise TLSyntaxError(f"unknown escape \\{nxt}", line, column + i, path)
            out.append(_ESCAPES[nxt])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def tokenize(source: str, path: str = "<source>") -> list[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        column = pos - line_start + 1
        if m is None:
            raise TLSyntaxError(f"unexpected character {source[pos]!r}", line, column, path)
        kind = m.lastgroup
        text = m.group()
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "meta":
            mm = _META_RE.match(text.rstrip())
            if mm is None:
                raise TLSyntaxError("malformed //@fragment metadata", line, column, path)
            tokens.append(Token("META", text, line, column, FragmentMeta(mm.group(1), int(mm.group(2)))))
        elif kind == "int":
            tokens.append(Token("INT", text, line, column, int(text)))
        elif kind == "ident":
            tokens.append(Token("KW" if text in KEYWORDS else "IDENT", text, line, column))
        elif kind == "str":
            tokens.append(Token("STR", text, line, column, _unescape(text[1:-1], line, column, path)))
        elif kind == "op":
            tokens.append(Token("OP", text, line, column))
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


# binary operators by precedence level, lowest first
BINARY_LEVELS = (
    ("||",),
    ("&&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*", "/", "%"),
)


class Parser:
    def __init__(self, source: str, path: str):
        self.path = path
        self.tokens = tokenize(source, path)
        self.i = 0
        # per-function ordinal counters; None while parsing test/hook bodies
        self._counters: Optional[dict] = None
        self._in_function = False

    # -- token helpers --------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        return TLSyntaxError(message, tok.line, tok.column, self.path)

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("OP", "KW")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of file"
            raise self.error(f"expected {text!r}, found {found!r}")
        tok = self.tok
        self.i += 1
        return tok

    def ident(self) -> str:
        if self.tok.kind != "IDENT":
            found = self.tok.text or "end of file"
            raise self.error(f"expected identifier, found {found!r}")
        name = self.tok.text
        self.i += 1
        return name

    # -- declarations ---------------------------------------------------

    def parse_file(self) -> ParsedFile:
        functions, tests, bindings = [], [], []
        before = after = None
        pending_meta: Optional[Token] = None
        while self.tok.kind != "EOF":
            tok = self.tok
            if tok.kind == "META":
                if pending_meta is not None:
                    raise self.error("two //@fragment lines for one test", tok)
                pending_meta = tok
                self.i += 1
                continue
            if pending_meta is not None and not self.at("test"):
                raise self.error("//@fragment must immediately precede a test", pending_meta)
            if self.accept("fn"):
                functions.append(self.function(tok.line))
            elif self.accept("test"):
                meta = pending_meta.value if pending_meta else None
                pending_meta = None
                tests.append(self.test(tok.line, meta))
            elif self.at("setUp") or self.at("tearDown"):
                which = tok.text
                self.i += 1
                if (which == "setUp" and before is not None) or (which == "tearDown" and after is not None):
                    raise DuplicateNameError(f"{self.path}: duplicate {which} hook")
                body = self.block()
                if which == "setUp":
                    before = body
                else:
                    after = body
            elif self.accept("let"):
                name = self.ident()
                self.expect("=")
                value = self.expr()
                self.expect(";")
                bindings.append(Let(name, value, line=tok.line))
            else:
                raise self.error(f"unexpected {tok.text or 'end of file'!r} at top level")
        if pending_meta is not None:
            raise self.error("//@fragment must immediately precede a test", pending_meta)
        _check_unique(self.path, "function", [f.name for f in functions])
        _check_unique(self.path, "test", [t.name for t in tests])
        _check_unique(self.path, "file binding", [b.name for b in bindings])
        return ParsedFile(
            path=self.path,
            functions=tuple(functions),
            tests=tuple(tests),
            before_hook=before,
            after_hook=after,
            file_bindings=tuple(bindings),
        )

    def function(self, line: int) -> FunctionDecl:
        name = self.ident()
        self.expect("(")
        params = []
        if not self.at(")"):
            params.append(self.ident())
            while self.accept(","):
                params.append(self.ident())
        self.expect(")")
        _check_unique(self.path, f"parameter of {name}", params)
        self._counters = {"if": 0, "try": 0}
        self._in_function = True
        try:
            body = self.block()
        finally:
            self._counters = None
            self._in_function = False
        return FunctionDecl(name, tuple(params), body, line=line)

    def test(self, line: int, meta: Optional[FragmentMeta]) -> TestCase:
        name = self.ident()
        return TestCase(name, self.block(), origin_meta=meta, line=line)

    def _next_ordinal(self, kind: str) -> Optional[int]:
        if self._counters is None:
            return None
        self._counters[kind] += 1
        return self._counters[kind]

    # -- statements -----------------------------------------------------

    def block(self) -> tuple:
        self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "EOF":
                raise self.error("unterminated block")
            stmts.append(self.statement())
        self.expect("}")
        return tuple(stmts)

    def statement(self):
        tok = self.tok
        line = tok.line
        if self.accept("let"):
            name = self.ident()
            self.expect("=")
            value = self.expr()
            self.expect(";")
            return Let(name, value, line=line)
        if self.accept("if"):
            return self.if_rest(line)
        if self.accept("while"):
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            return While(cond, self.block(), line=line)
        if self.accept("try"):
            ordinal = self._next_ordinal("try")
            body = self.block()
            self.expect("catch")
            self.expect("(")
            var = self.ident()
            self.expect(")")
            return Try(body, var, self.block(), ordinal=ordinal, line=line)
        if self.accept("throw"):
            value = self.expr()
            self.expect(";")
            return Throw(value, line=line)
        if self.accept("return"):
            if not self._in_function:
                raise self.error("return outside of a function", tok)
            value = None if self.at(";") else self.expr()
            self.expect(";")
            return Return(value, line=line)
        if self.accept("assert"):
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            self.expect(";")
            return Assert(cond, line=line)
        if self.accept("assertEquals"):
            self.expect("(")
            expected = self.expr()
            self.expect(",")
            actual = self.expr()
            self.expect(")")
            self.expect(";")
            return AssertEquals(expected, actual, line=line)
        if self.accept("fail"):
            self.expect("(")
            message = self.expr()
            self.expect(")")
            self.expect(";")
            return Fail(message, line=line)
        if tok.kind == "KW" and tok.text in HOOKS:
            self.i += 1
            self.expect("(")
            self.expect(")")
            self.expect(";")
            return HookCall(tok.text, line=line)
        if tok.kind == "IDENT" and self.tokens[self.i + 1].text == "=" and self.tokens[self.i + 1].kind == "OP":
            name = self.ident()
            self.expect("=")
            value = self.expr()
            self.expect(";")
            return Assign(name, value, line=line)
        expr = self.expr()
        self.expect(";")
        return ExprStmt(expr, line=line)

    def if_rest(self, line: int) -> If:
        ordinal = self._next_ordinal("if")
        self.expect("(")
        cond = self.expr()
        self.expect(")")
        then = self.block()
        orelse = None
        if self.accept("else"):
            if self.at("if"):
                else_line = self.tok.line
                self.i += 1
                orelse = (self.if_rest(else_line),)
            else:
                orelse = self.block()
        return If(cond, then, orelse, ordinal=ordinal, line=line)

    # -- expressions ----------------------------------------------------

    def expr(self, level: int = 0):
        if level == len(BINARY_LEVELS):
            return self.unary()
        left = self.expr(level + 1)
        ops = BINARY_LEVELS[level]
        while self.tok.kind == "OP" and self.tok.text in ops:
            op = self.tok.text
            line = self.tok.line
            self.i += 1
            right = self.expr(level + 1)
            left = Binary(op, left, right, line=line)
        return left

    def unary(self):
        tok = self.tok
        if tok.kind == "OP" and tok.text in ("!", "-"):
            self.i += 1
            return Unary(tok.text, self.unary(), line=tok.line)
        return self.primary()

    def primary(self):
        tok = self.tok
        if tok.kind == "INT":
            if tok.value > INT64_MAX:
                raise self.error("integer literal out of int64 range")
            self.i += 1
            return IntLit(tok.value, line=tok.line)
        if tok.kind == "STR":
            self.i += 1
            return StrLit(tok.value, line=tok.line)
        if self.accept("true"):
            return BoolLit(True, line=tok.line)
        if self.accept("false"):
            return BoolLit(False, line=tok.line)
        if self.accept("null"):
            return NullLit(line=tok.line)
        if self.accept("("):
            inner = self.expr()
            self.expect(")")
            return inner
        if tok.kind == "IDENT":
            self.i += 1
            if self.accept("("):
                args = []
                if not self.at(")"):
                    args.append(self.expr())
                    while self.accept(","):
                        args.append(self.expr())
                self.expect(")")
                return Call(tok.text, tuple(args), line=tok.line)
            return Var(tok.text, line=tok.line)
        raise self.error(f"unexpected {tok.text or 'end of file'!r} in expression")


def _check_unique(path: str, what: str, names: list[str]) -> None:
    seen = set()
    for name in names:
        if name in seen:
            raise DuplicateNameError(f"{path}: duplicate {what} name {name!r}")
        seen.add(name)


def parse_file(source: str, path: str = "<source>") -> ParsedFile:
    """Parse ``source`` into a :class:`ParsedFile` identified by ``path``."""
    return Parser(source, path).parse_file()
