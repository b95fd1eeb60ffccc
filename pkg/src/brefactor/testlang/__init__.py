"""The test language: parser, pretty-printer and tracing interpreter."""
from .corpus import load_paths, write_files
from .interpreter import DEFAULT_BUDGET, InjectionConfig, Interpreter
from .nodes import ElementId, ElementKind, FragmentMeta, FunctionDecl, ParsedFile, TestCase
from .parser import DuplicateNameError, TLSyntaxError, parse_file
from .printer import format_expr, serialize_file
from .results import (
    CAUGHT,
    DOMAINS,
    ELSE,
    NO_EXCEPTION,
    NOT_CAUGHT,
    THEN,
    Status,
    SuiteResult,
    TestOutcome,
    TestResult,
    TraceEvent,
    dump_jsonl,
    load_jsonl,
)
from .runner import execute_test, run_file, run_suite

__all__ = [
    "CAUGHT",
    "DEFAULT_BUDGET",
    "DOMAINS",
    "ELSE",
    "NO_EXCEPTION",
    "NOT_CAUGHT",
    "THEN",
    "DuplicateNameError",
    "ElementId",
    "ElementKind",
    "FragmentMeta",
    "FunctionDecl",
    "InjectionConfig",
    "Interpreter",
    "ParsedFile",
    "Status",
    "SuiteResult",
    "TLSyntaxError",
    "TestCase",
    "TestOutcome",
    "TestResult",
    "TraceEvent",
    "dump_jsonl",
    "execute_test",
    "format_expr",
    "load_jsonl",
    "load_paths",
    "parse_file",
    "run_file",
    "run_suite",
    "serialize_file",
    "write_files",
]
