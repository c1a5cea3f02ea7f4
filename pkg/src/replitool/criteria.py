"""Replication-success criteria for original/replication pairs."""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, NamedTuple, Sequence

from replitool import evidence
from replitool.meta import fixed_effect_meta, pair_meta
from replitool.models import DomainError, EquivalenceMargin, NormalPrior, StudyPair, StudyResult


class Criterion(str, enum.Enum):
    NON_SIGNIFICANCE = "NonSignificance"
    META_NON_SIGNIFICANCE = "MetaNonSignificance"
    ORIG_IN_REPL_CI = "OrigInReplCI"
    REPL_IN_ORIG_CI = "ReplInOrigCI"
    REPL_IN_PREDICTION_INTERVAL = "ReplInPredictionInterval"
    TWO_TRIALS = "TwoTrials"
    EQUIVALENCE_TOST = "EquivalenceTOST"
    BAYES_FACTOR_THRESHOLD = "BayesFactorThreshold"

    @classmethod
    def parse(cls, value: "str | Criterion") -> "Criterion":
        if isinstance(value, Criterion):
            return value
        for member in cls:
            if value in (member.value, member.name):
                return member
        raise DomainError(f"unknown criterion {value!r}")


ALL_CRITERIA: tuple[Criterion, ...] = tuple(Criterion)


@dataclass(frozen=True)
class AnalysisConfig:
    """Settings shared by every criterion.

    ``ci_level`` is the level of the intervals used by the CI-inclusion
    criteria. With ``use_reported_p`` the non-significance and two-trials
    criteria use the published classification of each study when one is
    available (``is_null_result``, then ``reported_p``).
    """

    null_value: float = 0.0
    margin: float = 0.74
    prior_mean: float = 0.0
    prior_sd: float = 2.0
    alpha: float = 0.05
    gamma: float = 3.0
    ci_level: float = 0.95
    pi_level: float = 0.95
    use_reported_p: bool = True

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha < 0.5):
            raise DomainError(f"alpha must lie in (0, 0.5), got {self.alpha!r}")
        if not self.gamma > 1.0:
            raise DomainError(f"gamma must exceed 1, got {self.gamma!r}")
        for name in ("ci_level", "pi_level"):
            value = getattr(self, name)
            if not (0.0 < value < 1.0):
                raise DomainError(f"{name} must lie in (0, 1), got {value!r}")
        # validates margin and prior sd
        EquivalenceMargin(self.margin, self.null_value)
        NormalPrior(self.prior_mean, self.prior_sd)

    @property
    def equivalence_margin(self) -> EquivalenceMargin:
        return EquivalenceMargin(self.margin, self.null_value)

    @property
    def prior(self) -> NormalPrior:
        return NormalPrior(self.prior_mean, self.prior_sd)

    def replace(self, **changes) -> "AnalysisConfig":
        return AnalysisConfig(**{**asdict(self), **changes})

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class CriterionOutcome:
    criterion: Criterion
    success: bool
    detail: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class PairReport:
    pair_id: str
    original: StudyResult
    replication: StudyResult
    outcomes: dict[Criterion, CriterionOutcome]
    config: AnalysisConfig
    flags: tuple[str, ...] = ()

    def success(self, criterion: Criterion | str) -> bool:
        return self.outcomes[Criterion.parse(criterion)].success


class Rate(NamedTuple):
    successes: int
    total: int

    @property
    def proportion(self) -> float:
        return self.successes / self.total

    def __str__(self) -> str:
        return f"{self.successes}/{self.total}"


def aggregate_replications(pair: StudyPair) -> StudyResult:
    """Single replication unchanged; internal replications pooled by fixed effect."""
    if len(pair.replications) == 1:
        return pair.replications[0]
    return fixed_effect_meta(pair.replications).as_study()


def is_null_result(study: StudyResult, config: AnalysisConfig) -> bool:
    """Whether a study counts as a non-significant ("null") result at ``config.alpha``."""
    if config.use_reported_p:
        if study.is_null_result is not None:
            return study.is_null_result
        if study.reported_p is not None:
            return study.reported_p > config.alpha
    return evidence.two_sided_p(study, config.null_value) > config.alpha


def _p_used(study: StudyResult, config: AnalysisConfig) -> float:
    if config.use_reported_p and study.reported_p is not None:
        return study.reported_p
    return evidence.two_sided_p(study, config.null_value)


def _flags(role: str, study: StudyResult, config: AnalysisConfig) -> list[str]:
    out = []
    p_normal = evidence.two_sided_p(study, config.null_value)
    if study.reported_p is not None:
        if abs(study.reported_p - p_normal) > 0.01:
            out.append(f"{role}: reported p {study.reported_p:.4g} differs from "
                       f"normal-approximation p {p_normal:.4g}")
        if study.is_null_result and study.reported_p <= config.alpha:
            out.append(f"{role}: recorded as null result despite reported p {study.reported_p:.4g}")
    if config.use_reported_p and is_null_result(study, config) != (p_normal > config.alpha):
        out.append(f"{role}: published classification differs from recomputed p {p_normal:.4g}")
    return out


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


def evaluate_pair(pair: StudyPair, config: AnalysisConfig = AnalysisConfig(),
                  criteria: Iterable[Criterion | str] | None = None) -> PairReport:
    orig = pair.original
    repl = aggregate_replications(pair)
    wanted = ALL_CRITERIA if criteria is None else tuple(dict.fromkeys(Criterion.parse(c) for c in criteria))
    theta0 = config.null_value
    outcomes: dict[Criterion, CriterionOutcome] = {}

    for crit in wanted:
        if crit is Criterion.NON_SIGNIFICANCE:
            null_o, null_r = is_null_result(orig, config), is_null_result(repl, config)
            detail = {"p_original": _p_used(orig, config), "p_replication": _p_used(repl, config),
                      "original_null": float(null_o), "replication_null": float(null_r)}
            success = null_o and null_r
        elif crit is Criterion.TWO_TRIALS:
            sig_o, sig_r = not is_null_result(orig, config), not is_null_result(repl, config)
            same = _sign(orig.estimate - theta0) * _sign(repl.estimate - theta0) > 0
            detail = {"p_original": _p_used(orig, config), "p_replication": _p_used(repl, config),
                      "same_sign": float(same)}
            success = sig_o and sig_r and same
        elif crit is Criterion.META_NON_SIGNIFICANCE:
            m = pair_meta(pair, theta0)
            detail = {"estimate": m.estimate, "se": m.se, "p_MA": m.p_two_sided}
            success = m.p_two_sided > config.alpha
        elif crit is Criterion.ORIG_IN_REPL_CI:
            ci = evidence.confidence_interval(repl, config.ci_level)
            detail = {"estimate": orig.estimate, "lower": ci.lower, "upper": ci.upper}
            success = orig.estimate in ci
        elif crit is Criterion.REPL_IN_ORIG_CI:
            ci = evidence.confidence_interval(orig, config.ci_level)
            detail = {"estimate": repl.estimate, "lower": ci.lower, "upper": ci.upper}
            success = repl.estimate in ci
        elif crit is Criterion.REPL_IN_PREDICTION_INTERVAL:
            pi = evidence.prediction_interval(orig, repl, config.pi_level)
            detail = {"estimate": repl.estimate, "lower": pi.lower, "upper": pi.upper}
            success = repl.estimate in pi
        elif crit is Criterion.EQUIVALENCE_TOST:
            margin = config.equivalence_margin
            p_o, p_r = evidence.tost_p(orig, margin), evidence.tost_p(repl, margin)
            detail = {"p_tost_original": p_o, "p_tost_replication": p_r}
            success = p_o <= config.alpha and p_r <= config.alpha
        elif crit is Criterion.BAYES_FACTOR_THRESHOLD:
            lb_o = evidence.log_bayes_factor_01(orig, theta0, config.prior)
            lb_r = evidence.log_bayes_factor_01(repl, theta0, config.prior)
            detail = {"bf01_original": evidence.exp_bf(lb_o), "bf01_replication": evidence.exp_bf(lb_r)}
            log_gamma = math.log(config.gamma)
            success = lb_o >= log_gamma and lb_r >= log_gamma
        else:  # pragma: no cover
            raise AssertionError(crit)
        outcomes[crit] = CriterionOutcome(crit, bool(success), detail)

    flags = _flags("original", orig, config) + _flags("replication", repl, config)
    return PairReport(pair.id, orig, repl, outcomes, config, tuple(flags))


def success_rates(pairs: Sequence[StudyPair], config: AnalysisConfig = AnalysisConfig(),
                  criteria: Iterable[Criterion | str] | None = None) -> dict[Criterion, Rate]:
    pairs = list(pairs)
    if not pairs:
        raise DomainError("success_rates needs at least one study pair")
    reports = [evaluate_pair(p, config, criteria) for p in pairs]
    keys = list(reports[0].outcomes)
    return {c: Rate(sum(r.outcomes[c].success for r in reports), len(reports)) for c in keys}
