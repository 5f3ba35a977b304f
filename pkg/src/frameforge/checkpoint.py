"""Checkpoint reports shared by the planning and geometry consistency checks."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class CheckFailure:
    code: str
    detail: str


@dataclass(frozen=True)
class CheckpointReport:
    passed: bool
    failures: tuple[CheckFailure, ...] = field(default_factory=tuple)

    def codes(self) -> list[str]:
        return [f.code for f in self.failures]


def report(failures: list[CheckFailure]) -> CheckpointReport:
    return CheckpointReport(passed=not failures, failures=tuple(failures))
