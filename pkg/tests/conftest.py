from pathlib import Path

import pytest

from brefactor.testlang import load_paths, parse_file

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def corpus():
    return load_paths([FIXTURES])


def load(name: str):
    return load_paths([FIXTURES / name])[0]


def parse(source: str, path: str = "t.tl"):
    return parse_file(source, path)
