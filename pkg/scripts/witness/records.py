"""
Report objects for the finite-window replay.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Sequence


PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"
FAIL_OUTSIDE = "fail (outside hypothesis class)"


@dataclass
class CheckResult:
    name: str
    status: str
    detail: str = ""
    data: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status in (PASS, SKIPPED, FAIL_OUTSIDE)

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "status": self.status, "detail": self.detail, "data": self.data}


@dataclass
class TranscriptStep:
    """
    One displayed term application: ``term`` applied to the named window
    vectors, its recomputed value and the value the argument predicts.
    """

    label: str
    term: str
    arguments: list[tuple[str, list[int]]]
    expected_name: str
    expected: list[int]
    actual: list[int]
    values: dict[str, int] = field(default_factory=dict)

    @property
    def verified(self) -> bool:
        return self.expected == self.actual

    def to_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "term": self.term,
            "arguments": [{"name": n, "values": v} for n, v in self.arguments],
            "expected_name": self.expected_name,
            "expected": self.expected,
            "actual": self.actual,
            "values": dict(sorted(self.values.items())),
            "verified": self.verified,
        }

    def render(self, coordinates: Sequence[int]) -> str:
        """
        The application as a matrix: one line per window coordinate, the
        argument columns on the left and the result on the right.
        """
        names = [n for n, _ in self.arguments]
        width = max([len(str(j)) for j in coordinates] + [1])
        cells = max([len(n) for n in names + [self.expected_name]] + [1])
        header = " " * (width + 3) + " ".join(n.rjust(cells) for n in names) + " | " + self.expected_name
        lines = [f"{self.label}    [{self.term}]", header]
        for row, j in enumerate(coordinates):
            args = " ".join(str(v[row]).rjust(cells) for _, v in self.arguments)
            mark = "" if self.actual[row] == self.expected[row] else f"   (expected {self.expected[row]})"
            lines.append(f"{str(j).rjust(width)} : {args} | {self.actual[row]}{mark}")
        lines.append("verified" if self.verified else "NOT VERIFIED")
        return "\n".join(lines)


@dataclass
class WitnessReport:
    name: str
    checks: list[CheckResult] = field(default_factory=list)
    transcript: list[TranscriptStep] = field(default_factory=list)
    sizes: dict[str, int] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)

    def add(self, name: str, status: str, detail: str = "", **data: Any) -> CheckResult:
        result = CheckResult(name=name, status=status, detail=detail, data=data)
        self.checks.append(result)
        return result

    @property
    def status(self) -> str:
        statuses = [c.status for c in self.checks]
        if not statuses or all(s == SKIPPED for s in statuses):
            return SKIPPED
        if FAIL in statuses:
            return FAIL
        if FAIL_OUTSIDE in statuses:
            return FAIL_OUTSIDE
        return PASS

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks) and all(s.verified for s in self.transcript)

    def check(self, name: str) -> Optional[CheckResult]:
        for c in self.checks:
            if c.name == name:
                return c
        return None

    def to_dict(self, *, include_volatile: bool = True) -> dict[str, Any]:
        out: dict[str, Any] = {
            "name": self.name,
            "status": self.status,
            "checks": [c.to_dict() for c in self.checks],
            "transcript": [s.to_dict() for s in self.transcript],
            "sizes": dict(sorted(self.sizes.items())),
        }
        if include_volatile:
            out["volatile"] = {"timings": {k: round(v, 6) for k, v in sorted(self.timings.items())}}
        return out

    def render(self, coordinates: Sequence[int]) -> str:
        lines = [f"== {self.name}: {self.status}"]
        for c in self.checks:
            lines.append(f"  {c.name}: {c.status}" + (f" ({c.detail})" if c.detail else ""))
        for step in self.transcript:
            lines.append("")
            lines.extend("  " + line for line in step.render(coordinates).splitlines())
        return "\n".join(lines)
