"""Per-study evidence: p-values, TOST, confidence intervals and Bayes factors.

Every measure assumes the estimate is normal around the true effect with
known variance ``se**2``. The ``*_array`` kernels accept numpy arrays and are
what the sweep and simulation code use; the :class:`StudyResult` functions
wrap them for single studies.
"""

from __future__ import annotations

import math

import numpy as np

from replitool.models import DomainError, EquivalenceMargin, Interval, NormalPrior, StudyResult
from replitool.normal import norm_cdf, norm_cdf_array, two_sided_quantile


# -- array kernels -----------------------------------------------------------

def two_sided_p_array(estimate, se, null_value=0.0) -> np.ndarray:
    z = np.abs(np.asarray(estimate, float) - null_value) / np.asarray(se, float)
    return 2.0 * norm_cdf_array(-z)


def tost_p_array(estimate, se, delta, null_value=0.0) -> np.ndarray:
    """max{Phi((x - t0 - d)/se), 1 - Phi((x - t0 + d)/se)}, broadcast."""
    delta = np.asarray(delta, float)
    if np.any(delta <= 0):
        raise DomainError("equivalence margin must be positive")
    x = np.asarray(estimate, float) - null_value
    se = np.asarray(se, float)
    upper = norm_cdf_array((x - delta) / se)
    # 1 - Phi(u) written as Phi(-u) to keep tail accuracy
    lower = norm_cdf_array(-(x + delta) / se)
    return np.maximum(upper, lower)


def log_bf01_array(estimate, se, null_value=0.0, prior_mean=0.0, prior_sd=2.0) -> np.ndarray:
    x = np.asarray(estimate, float)
    var = np.asarray(se, float) ** 2
    s2 = np.asarray(prior_sd, float) ** 2
    return 0.5 * np.log1p(s2 / var) - 0.5 * ((x - null_value) ** 2 / var
                                             - (x - prior_mean) ** 2 / (var + s2))


def bf01_array(estimate, se, null_value=0.0, prior_mean=0.0, prior_sd=2.0) -> np.ndarray:
    return np.exp(log_bf01_array(estimate, se, null_value, prior_mean, prior_sd))


# -- single-study API --------------------------------------------------------

def two_sided_p(study: StudyResult, null_value: float = 0.0) -> float:
    """Normal-approximation two-sided p-value for H0: effect = null_value."""
    z = abs(study.estimate - null_value) / study.se
    return 2.0 * norm_cdf(-z)


def tost_p(study: StudyResult, margin: EquivalenceMargin) -> float:
    x = study.estimate - margin.null_value
    upper = norm_cdf((x - margin.delta) / study.se)
    lower = norm_cdf(-(x + margin.delta) / study.se)
    return max(upper, lower)


def confidence_interval(study: StudyResult, level: float = 0.95) -> Interval:
    half = two_sided_quantile(level) * study.se
    return Interval(study.estimate - half, study.estimate + half, level)


def equivalence_success(study: StudyResult, margin: EquivalenceMargin, alpha: float = 0.05) -> bool:
    """TOST success: p_TOST <= alpha.

    Dual to ``confidence_interval(study, 1 - 2*alpha)`` lying inside the
    equivalence range; see :func:`equivalence_ci_check`.
    """
    if not (0.0 < alpha < 0.5):
        raise DomainError(f"alpha must lie in (0, 0.5), got {alpha!r}")
    return tost_p(study, margin) <= alpha


def equivalence_ci_check(study: StudyResult, margin: EquivalenceMargin, alpha: float = 0.05) -> bool:
    if not (0.0 < alpha < 0.5):
        raise DomainError(f"alpha must lie in (0, 0.5), got {alpha!r}")
    return confidence_interval(study, 1.0 - 2.0 * alpha).within(margin.lower, margin.upper)


def exp_bf(log_bf: float) -> float:
    """exp() that saturates to inf instead of raising on overflow."""
    try:
        return math.exp(log_bf)
    except OverflowError:
        return math.inf


def log_bayes_factor_01(study: StudyResult, null_value: float = 0.0,
                        prior: NormalPrior = NormalPrior()) -> float:
    var = study.se ** 2
    s2 = prior.sd ** 2
    return 0.5 * math.log1p(s2 / var) - 0.5 * ((study.estimate - null_value) ** 2 / var
                                               - (study.estimate - prior.mean) ** 2 / (var + s2))


def bayes_factor_01(study: StudyResult, null_value: float = 0.0,
                    prior: NormalPrior = NormalPrior()) -> float:
    """BF01 of H0: effect = null_value against H1: effect ~ N(m, s^2).

    Values above 1 favour the null. With ``prior.sd == 0`` this is the
    likelihood ratio against the point alternative ``prior.mean``. Very
    small values underflow to 0.0 and very large ones saturate to inf; use
    :func:`log_bayes_factor_01` when that matters.
    """
    return exp_bf(log_bayes_factor_01(study, null_value, prior))


def _same_scale(a: StudyResult, b: StudyResult) -> None:
    if a.scale != b.scale:
        raise DomainError(f"scale mismatch: {a.scale.value} vs {b.scale.value}")


def prediction_interval(original: StudyResult, replication: StudyResult, level: float = 0.95) -> Interval:
    _same_scale(original, replication)
    half = two_sided_quantile(level) * math.hypot(original.se, replication.se)
    return Interval(original.estimate - half, original.estimate + half, level)


def prediction_interval_check(original: StudyResult, replication: StudyResult, level: float = 0.95) -> bool:
    """Replication estimate inside the closed prediction interval from the original."""
    return replication.estimate in prediction_interval(original, replication, level)


def ci_inclusion_check(target: StudyResult, interval_source: StudyResult, level: float = 0.95) -> bool:
    _same_scale(target, interval_source)
    return target.estimate in confidence_interval(interval_source, level)
