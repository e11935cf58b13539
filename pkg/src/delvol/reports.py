"""Shared check-record format for inequality verifications."""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = ["CheckRecord"]


@dataclass(frozen=True)
class CheckRecord:
    """Outcome of a single two-sided inequality check."""

    name: str
    lhs: float
    rhs: float
    passed: bool
    constants: dict = field(default_factory=dict)

    def to_text(self) -> str:
        lines = [
            f"check: {self.name}",
            f"lhs = {self.lhs:.17g}",
            f"rhs = {self.rhs:.17g}",
        ]
        for key in sorted(self.constants):
            lines.append(f"{key} = {self.constants[key]:.17g}")
        lines.append(f"verdict: {'pass' if self.passed else 'fail'}")
        return "\n".join(lines) + "\n"
