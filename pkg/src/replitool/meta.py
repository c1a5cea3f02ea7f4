"""Fixed-effect (inverse-variance) meta-analysis."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from replitool.evidence import two_sided_p
from replitool.models import DomainError, Scale, StudyPair, StudyResult


@dataclass(frozen=True)
class MetaResult:
    estimate: float
    se: float
    p_two_sided: float
    k: int
    scale: Scale = Scale.SMD
    n: int | None = None

    def as_study(self) -> StudyResult:
        return StudyResult(self.estimate, self.se, self.n, self.scale)


def fixed_effect_meta(studies: Sequence[StudyResult], null_value: float = 0.0) -> MetaResult:
    """Pool estimates with weights 1/se^2.

    Sums use :func:`math.fsum`, which is correctly rounded, so the result does
    not depend on the order of ``studies``.
    """
    studies = list(studies)
    if len(studies) < 2:
        raise DomainError(f"fixed-effect meta-analysis needs at least 2 studies, got {len(studies)}")
    scales = {s.scale for s in studies}
    if len(scales) != 1:
        raise DomainError(f"cannot pool studies on different scales: {sorted(s.value for s in scales)}")
    weights = [1.0 / (s.se * s.se) for s in studies]
    total = math.fsum(weights)
    estimate = math.fsum(w * s.estimate for w, s in zip(weights, studies)) / total
    se = 1.0 / math.sqrt(total)
    ns = [s.n for s in studies]
    n = sum(ns) if all(v is not None for v in ns) else None
    scale = scales.pop()
    p = two_sided_p(StudyResult(estimate, se, None, scale), null_value)
    return MetaResult(estimate, se, p, len(studies), scale, n)


def pair_meta(pair: StudyPair, null_value: float = 0.0) -> MetaResult:
    # Pooling the original with all internal replications equals pooling the
    # original with their fixed-effect aggregate.
    return fixed_effect_meta([pair.original, *pair.replications], null_value)


def meta_nonsignificance_success(pair: StudyPair, alpha: float = 0.05, null_value: float = 0.0) -> bool:
    """Success when the pooled original+replication p-value exceeds alpha."""
    return pair_meta(pair, null_value).p_two_sided > alpha
