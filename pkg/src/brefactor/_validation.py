"""Input checks shared by the estimators and the command line."""
from __future__ import annotations

from os import PathLike
from typing import Union

from .testlang.corpus import load_paths
from .testlang.nodes import ElementKind, ParsedFile


def check_suite(X) -> list[ParsedFile]:
    """Normalize ``X`` to a nonempty list of parsed files.

    Accepts a path, a parsed file, or a list mixing both. Paths to
    directories are loaded recursively.
    """
    items = [X] if isinstance(X, (str, PathLike, ParsedFile)) else list(X)
    if not items:
        raise ValueError("expected at least one test file")
    files, paths = [], []
    for item in items:
        if isinstance(item, ParsedFile):
            files.append(item)
        elif isinstance(item, (str, PathLike)):
            paths.append(item)
        else:
            raise TypeError(f"expected a path or ParsedFile, got {type(item).__name__}")
    if paths:
        files.extend(load_paths(paths))
    seen = set()
    for f in files:
        if f.path in seen:
            raise ValueError(f"duplicate file id {f.path}")
        seen.add(f.path)
    return files


def check_element_kind(kind: Union[str, ElementKind, None]) -> ElementKind:
    parsed = ElementKind.parse(kind)
    if parsed is None:
        raise ValueError("an element kind ('if' or 'try') is required")
    return parsed


def check_budget(budget: int) -> int:
    if isinstance(budget, bool) or not isinstance(budget, int) or budget <= 0:
        raise ValueError(f"budget must be a positive integer, got {budget!r}")
    return budget
