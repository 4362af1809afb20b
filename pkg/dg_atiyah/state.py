"""Verify state -- tracks the outcome of each invariant check on one problem."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional


class CheckStatus(str, Enum):
    PENDING = "pending"
    RUNNING = "running"
    PASSED = "passed"
    FAILED = "failed"
    SKIPPED = "skipped"


# Canonical check names in execution order
CHECK_NAMES = [
    "connection",
    "homological",
    "routes",
    "independence",
    "verdict",
    "theorem",
]

CHECK_DESCRIPTIONS = {
    "connection": "Connection triple is torsion-free and satisfies the beta constraint",
    "homological": "Q = iota_s satisfies [Q, Q] = 0",
    "routes": "Definitional and closed-form cocycles agree",
    "independence": "Cocycle class does not depend on the connection",
    "verdict": "Decision replays (certificate or jet witness, jet monotonicity)",
    "theorem": "Vanishing agrees with the clean-intersection oracle",
}


@dataclass
class CheckState:
    status: CheckStatus = CheckStatus.PENDING
    detail: Optional[str] = None


@dataclass
class VerifyState:
    checks: dict[str, CheckState] = field(default_factory=dict)

    def __post_init__(self):
        for name in CHECK_NAMES:
            if name not in self.checks:
                self.checks[name] = CheckState()

    def mark(self, check: str, status: CheckStatus, detail: Optional[str] = None):
        self.checks[check].status = status
        self.checks[check].detail = detail

    def first_failure(self) -> Optional[str]:
        for name in CHECK_NAMES:
            if self.checks[name].status is CheckStatus.FAILED:
                return name
        return None

    @property
    def passed(self) -> bool:
        return all(
            self.checks[name].status in (CheckStatus.PASSED, CheckStatus.SKIPPED) for name in CHECK_NAMES
        )

    def summary(self) -> str:
        lines = []
        for name in CHECK_NAMES:
            check = self.checks[name]
            icon = {
                CheckStatus.PENDING: " ",
                CheckStatus.RUNNING: ">",
                CheckStatus.PASSED: "x",
                CheckStatus.FAILED: "!",
                CheckStatus.SKIPPED: "-",
            }[check.status]
            line = f"[{icon}] {name}: {CHECK_DESCRIPTIONS[name]}"
            if check.detail:
                line += f" ({check.detail})"
            lines.append(line)
        return "\n".join(lines)

    def to_tree(self) -> dict:
        tree = {}
        for name in CHECK_NAMES:
            check = self.checks[name]
            entry = {"status": check.status.value}
            if check.detail:
                entry["detail"] = check.detail
            tree[name] = entry
        return tree
