"""Shared value types: study results, pairs, margins, priors, intervals."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field


class DomainError(ValueError):
    """Raised when an input violates a documented precondition."""


class Scale(str, enum.Enum):
    SMD = "SMD"
    FISHER_Z = "FisherZ"
    LOG_OR = "LogOR"
    RAW = "Raw"

    @classmethod
    def parse(cls, value: str | "Scale") -> "Scale":
        if isinstance(value, Scale):
            return value
        key = str(value).strip().lower().replace("_", "").replace("-", "")
        for member in cls:
            if member.value.lower() == key:
                return member
        raise DomainError(f"unknown scale {value!r}; expected one of {[m.value for m in cls]}")


def _check_probability(name: str, value: float | None) -> None:
    if value is not None and not (0.0 <= value <= 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class StudyResult:
    """One effect estimate with its standard error.

    ``reported_p`` and ``is_null_result`` carry what the source project
    published; computations use ``estimate`` and ``se`` only, and ``n`` is
    metadata.
    """

    estimate: float
    se: float
    n: int | None = None
    scale: Scale = Scale.SMD
    reported_p: float | None = None
    is_null_result: bool | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "scale", Scale.parse(self.scale))
        # numpy scalars are accepted but stored as plain floats
        object.__setattr__(self, "estimate", float(self.estimate))
        object.__setattr__(self, "se", float(self.se))
        if not math.isfinite(self.estimate):
            raise DomainError(f"estimate must be finite, got {self.estimate!r}")
        if not (math.isfinite(self.se) and self.se > 0):
            raise DomainError(f"se must be positive and finite, got {self.se!r}")
        if self.n is not None and self.n < 1:
            raise DomainError(f"n must be >= 1 when present, got {self.n!r}")
        _check_probability("reported_p", self.reported_p)

    def rescaled(self, factor: float) -> "StudyResult":
        """Multiply estimate and se by ``factor`` (> 0)."""
        if not factor > 0:
            raise DomainError("rescaling factor must be positive")
        return StudyResult(self.estimate * factor, self.se * factor, self.n, self.scale,
                           self.reported_p, self.is_null_result)


@dataclass(frozen=True)
class StudyPair:
    """An original study and one or more (internal) replications of it."""

    id: str
    original: StudyResult
    replications: tuple[StudyResult, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "replications", tuple(self.replications))
        if not self.replications:
            raise DomainError(f"pair {self.id!r} has no replications")
        scales = {self.original.scale, *(r.scale for r in self.replications)}
        if len(scales) != 1:
            raise DomainError(f"pair {self.id!r} mixes scales {sorted(s.value for s in scales)}")

    @property
    def scale(self) -> Scale:
        return self.original.scale

    @property
    def original_p_reported(self) -> float | None:
        return self.original.reported_p

    @property
    def replication_p_reported(self) -> float | None:
        # Internal replications are pooled and their p-value recomputed.
        if len(self.replications) == 1:
            return self.replications[0].reported_p
        return None

    def rescaled(self, factor: float) -> "StudyPair":
        return StudyPair(self.id, self.original.rescaled(factor),
                         tuple(r.rescaled(factor) for r in self.replications))


@dataclass(frozen=True)
class EquivalenceMargin:
    delta: float
    null_value: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise DomainError(f"equivalence margin must be positive, got {self.delta!r}")

    @property
    def lower(self) -> float:
        return self.null_value - self.delta

    @property
    def upper(self) -> float:
        return self.null_value + self.delta


@dataclass(frozen=True)
class NormalPrior:
    """Normal prior N(mean, sd^2) for the effect under the alternative.

    ``sd = 0`` is the point-alternative limit.
    """

    mean: float = 0.0
    sd: float = 2.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.sd) and self.sd >= 0):
            raise DomainError(f"prior sd must be non-negative, got {self.sd!r}")
        if not math.isfinite(self.mean):
            raise DomainError("prior mean must be finite")


@dataclass(frozen=True)
class Interval:
    lower: float
    upper: float
    level: float = field(default=0.95)

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise DomainError(f"interval lower {self.lower} exceeds upper {self.upper}")
        if not (0.0 < self.level < 1.0):
            raise DomainError(f"interval level must lie in (0, 1), got {self.level!r}")

    def __contains__(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    def within(self, lower: float, upper: float) -> bool:
        return lower <= self.lower and self.upper <= upper
