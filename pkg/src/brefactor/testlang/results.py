from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .nodes import ElementId

THEN = "then-branch"
ELSE = "else-branch"
NO_EXCEPTION = "no-exception"
CAUGHT = "exception-caught"
NOT_CAUGHT = "exception-not-caught"

DOMAINS = {
    "if": (THEN, ELSE),
    "try": (NO_EXCEPTION, CAUGHT, NOT_CAUGHT),
}


class Status(str, Enum):
    PASSED = "passed"
    ASSERTION_FAILED = "assertion-failed"
    UNCAUGHT_EXCEPTION = "uncaught-exception"
    BUDGET_EXCEEDED = "budget-exceeded"
    # a later fragment whose origin already failed in an earlier fragment
    SKIPPED = "skipped"

    @property
    def failed(self) -> bool:
        return self in (Status.ASSERTION_FAILED, Status.UNCAUGHT_EXCEPTION)


@dataclass(frozen=True)
class TraceEvent:
    test: str
    constituent: int
    element: ElementId
    value: str
    seq: int

    def to_json(self) -> dict:
        return {
            "test": self.test,
            "constituent": self.constituent,
            "element": self.element.to_json(),
            "value": self.value,
            "seq": self.seq,
        }

    @classmethod
    def from_json(cls, data: dict) -> "TraceEvent":
        return cls(
            test=data["test"],
            constituent=int(data["constituent"]),
            element=ElementId.from_json(data["element"]),
            value=data["value"],
            seq=int(data["seq"]),
        )


def dump_jsonl(events) -> str:
    return "".join(json.dumps(ev.to_json(), sort_keys=False) + "\n" for ev in events)


def load_jsonl(text: str) -> list[TraceEvent]:
    return [TraceEvent.from_json(json.loads(line)) for line in text.splitlines() if line.strip()]


@dataclass(frozen=True)
class TestOutcome:
    status: Status
    failure_detail: Optional[str] = None
    assert_count: int = 0

    __test__ = False

    def to_json(self) -> dict:
        return {"status": self.status.value, "failure_detail": self.failure_detail, "assert_count": self.assert_count}


@dataclass
class TestResult:
    file: str
    test: str
    outcome: TestOutcome
    events: list[TraceEvent] = field(default_factory=list)
    constituents: int = 0

    __test__ = False

    @property
    def key(self) -> tuple[str, str]:
        return (self.file, self.test)


@dataclass
class SuiteResult:
    results: list[TestResult]

    def __iter__(self):
        return iter(self.results)

    def __len__(self) -> int:
        return len(self.results)

    @property
    def events(self) -> list[TraceEvent]:
        return [ev for r in self.results for ev in r.events]

    def outcome(self, file: str, test: str) -> TestOutcome:
        for r in self.results:
            if r.file == file and r.test == test:
                return r.outcome
        raise KeyError((file, test))

    def statuses(self) -> list[Status]:
        return [r.outcome.status for r in self.results]

    def to_json(self) -> dict:
        return {
            "tests": [
                {"file": r.file, "test": r.test, "constituents": r.constituents, **r.outcome.to_json()}
                for r in self.results
            ]
        }

    def serialize(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n" + dump_jsonl(self.events)
