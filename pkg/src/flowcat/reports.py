"""Frozen result records returned by the check operations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .error_codes import ErrorCode
from .error_messages import get_error_message


@dataclass(frozen=True)
class Violation:
    code: ErrorCode
    message: str
    location: tuple[str, ...] = ()

    @classmethod
    def of(cls, code: ErrorCode, *location: object, detail: str | None = None):
        message = get_error_message(code)
        if detail:
            message = f"{message} {detail}"

        return cls(code=code, message=message, location=tuple(str(x) for x in location))

    def to_dict(self) -> dict[str, Any]:
        return {
            "code": int(self.code),
            "name": self.code.name,
            "message": self.message,
            "location": list(self.location),
        }


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of a check: ``ok`` is False iff any violation was recorded."""

    ok: bool
    violations: tuple[Violation, ...] = ()
    warnings: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.ok and self.violations:
            raise ValueError("a passing report cannot carry violations")

    def __bool__(self) -> bool:
        return self.ok

    @classmethod
    def from_violations(
        cls, violations: list[Violation] | tuple[Violation, ...], warnings=()
    ) -> ValidationReport:
        return cls(
            ok=not violations, violations=tuple(violations), warnings=tuple(warnings)
        )

    @property
    def first(self) -> Violation | None:
        return self.violations[0] if self.violations else None

    def merged(self, other: ValidationReport) -> ValidationReport:
        return ValidationReport.from_violations(
            self.violations + other.violations, self.warnings + other.warnings
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "violations": [v.to_dict() for v in self.violations],
            "warnings": list(self.warnings),
        }


@dataclass(frozen=True)
class ExactnessSpot:
    """Exactness of ``A --f--> B --g--> C`` at B, at chain level."""

    name: str
    image_in_kernel: bool
    kernel_in_image: bool
    witnesses: tuple[tuple[int, ...], ...] = ()

    @property
    def exact(self) -> bool:
        return self.image_in_kernel and self.kernel_in_image

    def to_dict(self) -> dict[str, Any]:
        return {
            "spot": self.name,
            "exact": self.exact,
            "image_in_kernel": self.image_in_kernel,
            "kernel_in_image": self.kernel_in_image,
            "witnesses": [list(w) for w in self.witnesses],
        }


@dataclass(frozen=True)
class LESReport:
    ring: str
    spots: tuple[ExactnessSpot, ...]
    homology: dict[str, dict[int, str]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(spot.exact for spot in self.spots)

    def to_dict(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "ring": self.ring,
            "spots": [spot.to_dict() for spot in self.spots],
            "homology": {
                name: {str(k): v for k, v in sorted(groups.items())}
                for name, groups in sorted(self.homology.items())
            },
        }
