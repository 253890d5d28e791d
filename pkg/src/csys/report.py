"""Check reports shared by every verification routine.

A report accumulates per-check counters (checked / skipped) and the list of
violated instances. Reports are plain data and serialize deterministically.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Any


class CheckError(Exception):
    """Base class for structural and precondition errors raised by checks."""


class PreconditionError(CheckError):
    pass


@dataclass(frozen=True)
class Violation:
    check: str
    instance: str
    detail: str = ""

    def to_dict(self) -> dict[str, str]:
        return {"check": self.check, "instance": self.instance, "detail": self.detail}


@dataclass
class Report:
    title: str
    violations: list[Violation] = field(default_factory=list)
    checked: Counter = field(default_factory=Counter)
    skipped: Counter = field(default_factory=Counter)
    notes: list[str] = field(default_factory=list)

    def ok(self, check: str, n: int = 1) -> None:
        self.checked[check] += n

    def skip(self, check: str, n: int = 1) -> None:
        self.skipped[check] += n

    def fail(self, check: str, instance: Any, detail: str = "") -> None:
        """Record a violation; a callable ``instance`` is evaluated only here."""
        if callable(instance):
            instance = instance()
        self.checked[check] += 1
        self.violations.append(Violation(check, str(instance), detail))

    def expect(self, cond: bool, check: str, instance: Any, detail: str = "") -> bool:
        if cond:
            self.ok(check)
        else:
            self.fail(check, instance, detail)
        return cond

    def note(self, text: str) -> None:
        if text not in self.notes:
            self.notes.append(text)

    @property
    def passed(self) -> bool:
        return not self.violations

    def failures(self, check: str | None = None) -> list[Violation]:
        return [v for v in self.violations if check is None or v.check == check]

    def merge(self, other: Report) -> Report:
        self.violations.extend(other.violations)
        self.checked.update(other.checked)
        self.skipped.update(other.skipped)
        for n in other.notes:
            self.note(n)
        return self

    def to_dict(self) -> dict[str, Any]:
        return {
            "title": self.title,
            "passed": self.passed,
            "checked": dict(sorted(self.checked.items())),
            "skipped": dict(sorted(self.skipped.items())),
            "violations": [v.to_dict() for v in self.violations],
            "notes": list(self.notes),
        }

    def summary(self) -> str:
        total = sum(self.checked.values())
        skipped = sum(self.skipped.values())
        status = "PASS" if self.passed else f"FAIL ({len(self.violations)} violations)"
        return f"{self.title}: {status}; {total} checked, {skipped} skipped"
