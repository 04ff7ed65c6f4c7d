"""Pass/fail bookkeeping for the structural verification suites."""

from __future__ import annotations

from dataclasses import dataclass, field

MAX_EXAMPLES = 5


@dataclass
class Check:
    name: str
    tested: int = 0
    failed: int = 0
    examples: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failed == 0

    def to_json(self) -> dict:
        return {
            "tested": self.tested,
            "violations": self.failed,
            "examples": list(self.examples),
        }


class Report:
    """Named checks keyed by the property they test."""

    def __init__(self, title: str = ""):
        self.title = title
        self.checks: dict[str, Check] = {}
        self.notes: dict[str, object] = {}

    def check(self, name: str, ok: bool, detail: object = "") -> bool:
        c = self.checks.setdefault(name, Check(name))
        c.tested += 1
        if not ok:
            c.failed += 1
            if len(c.examples) < MAX_EXAMPLES:
                c.examples.append(str(detail))
        return ok

    def touch(self, name: str) -> None:
        self.checks.setdefault(name, Check(name))

    def note(self, key: str, value) -> None:
        self.notes[key] = value

    def merge(self, other: "Report", prefix: str = "") -> None:
        for name, c in other.checks.items():
            mine = self.checks.setdefault(prefix + name, Check(prefix + name))
            mine.tested += c.tested
            mine.failed += c.failed
            room = MAX_EXAMPLES - len(mine.examples)
            mine.examples.extend(c.examples[:max(room, 0)])
        for key, value in other.notes.items():
            self.notes[prefix + key] = value

    @property
    def violations(self) -> int:
        return sum(c.failed for c in self.checks.values())

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def failures(self) -> list[Check]:
        return [c for c in self.checks.values() if not c.passed]

    def to_json(self) -> dict:
        return {
            "title": self.title,
            "ok": self.ok,
            "violations": self.violations,
            "checks": {k: self.checks[k].to_json() for k in sorted(self.checks)},
            "notes": {k: self.notes[k] for k in sorted(self.notes)},
        }

    def summary(self) -> str:
        lines = [f"{self.title}: {'PASS' if self.ok else 'FAIL'} ({self.violations} violations)"]
        for name in sorted(self.checks):
            c = self.checks[name]
            mark = "ok " if c.passed else "BAD"
            lines.append(f"  [{mark}] {name}: {c.tested} tested, {c.failed} failed")
            for ex in c.examples:
                lines.append(f"        {ex}")
        return "\n".join(lines)
