"""Loading ``.tl`` files from disk and writing refactored suites back."""
from __future__ import annotations

from pathlib import Path
from typing import Iterable, Union

from .nodes import ParsedFile
from .parser import parse_file
from .printer import serialize_file

PathLike = Union[str, Path]


def load_paths(paths: Iterable[PathLike]) -> list[ParsedFile]:
    """Parse every ``.tl`` file named by ``paths``.

    A directory contributes its ``.tl`` files recursively, identified by their
    path relative to that directory; a file is identified by its base name. The
    identifiers are what element ids carry, so a refactored copy written to a
    mirror directory resolves to the same elements.
    """
    files: list[ParsedFile] = []
    for raw in paths:
        root = Path(raw)
        if root.is_dir():
            for path in sorted(root.rglob("*.tl")):
                ident = path.relative_to(root).as_posix()
                files.append(parse_file(path.read_text(encoding="utf-8"), ident))
        elif root.is_file():
            files.append(parse_file(root.read_text(encoding="utf-8"), root.name))
        else:
            raise FileNotFoundError(f"no such file or directory: {root}")
    seen = set()
    for f in files:
        if f.path in seen:
            raise ValueError(f"two input files share the identifier {f.path!r}")
        seen.add(f.path)
    return files


def write_files(files: Iterable[ParsedFile], outdir: PathLike) -> list[Path]:
    out = Path(outdir)
    written = []
    for f in files:
        target = out / f.path
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(serialize_file(f), encoding="utf-8")
        written.append(target)
    return written
