"""Monte Carlo operating characteristics of the replication-success criteria.

Pairs of estimates are drawn from the normal sampling model with a fixed true
effect; each criterion is evaluated on every simulated pair and the success
frequency is reported with its Monte Carlo standard error, next to the
closed-form probability under the same model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from replitool.criteria import AnalysisConfig, Criterion
from replitool.evidence import log_bf01_array, tost_p_array, two_sided_p_array
from replitool.models import DomainError
from replitool.normal import norm_cdf, norm_quantile, norm_quantile_array, two_sided_quantile

# Two-trials without the sign-agreement requirement.
TWO_TRIALS_ANY_DIRECTION = "TwoTrialsAnyDirection"
REPORTED_KEYS: tuple[str, ...] = tuple(c.value for c in Criterion) + (TWO_TRIALS_ANY_DIRECTION,)

STREAM_SIZE = 1 << 17


@dataclass(frozen=True)
class SimScenario:
    true_effect: float
    se_original: float
    se_replication: float
    n_sims: int = 100_000
    seed: int = 0
    config: AnalysisConfig = field(default_factory=AnalysisConfig)

    def __post_init__(self) -> None:
        if self.n_sims < 1:
            raise DomainError("n_sims must be >= 1")
        if not (self.se_original > 0 and self.se_replication > 0):
            raise DomainError("standard errors must be positive")
        if self.seed < 0:
            raise DomainError("seed must be a non-negative integer")


@dataclass(frozen=True)
class Estimate:
    probability: float
    mcse: float
    successes: int
    n: int


@dataclass(frozen=True)
class CalibrationReport:
    scenario: SimScenario
    estimates: dict[str, Estimate]
    analytic: dict[str, float]

    def rows(self) -> list[dict]:
        return [{"criterion": k, "probability": e.probability, "mcse": e.mcse,
                 "successes": e.successes, "n_sims": e.n, "analytic": self.analytic[k]}
                for k, e in self.estimates.items()]


def criterion_verdicts(est_o, est_r, se_o: float, se_r: float,
                       config: AnalysisConfig) -> dict[str, np.ndarray]:
    """Vectorised success indicators for simulated pairs (single replications,
    p-values recomputed from the normal model)."""
    est_o = np.asarray(est_o, float)
    est_r = np.asarray(est_r, float)
    t0, alpha = config.null_value, config.alpha

    null_o = two_sided_p_array(est_o, se_o, t0) > alpha
    null_r = two_sided_p_array(est_r, se_r, t0) > alpha
    sign_o, sign_r = np.sign(est_o - t0), np.sign(est_r - t0)
    sig_both = ~null_o & ~null_r

    w_o, w_r = 1.0 / se_o ** 2, 1.0 / se_r ** 2
    meta_est = (w_o * est_o + w_r * est_r) / (w_o + w_r)
    meta_se = 1.0 / math.sqrt(w_o + w_r)

    z_ci = two_sided_quantile(config.ci_level)
    z_pi = two_sided_quantile(config.pi_level)
    diff = np.abs(est_r - est_o)
    log_gamma = math.log(config.gamma)

    return {
        Criterion.NON_SIGNIFICANCE.value: null_o & null_r,
        Criterion.META_NON_SIGNIFICANCE.value: two_sided_p_array(meta_est, meta_se, t0) > alpha,
        Criterion.ORIG_IN_REPL_CI.value: diff <= z_ci * se_r,
        Criterion.REPL_IN_ORIG_CI.value: diff <= z_ci * se_o,
        Criterion.REPL_IN_PREDICTION_INTERVAL.value: diff <= z_pi * math.hypot(se_o, se_r),
        Criterion.TWO_TRIALS.value: sig_both & (sign_o * sign_r > 0),
        Criterion.EQUIVALENCE_TOST.value: (tost_p_array(est_o, se_o, config.margin, t0) <= alpha)
                                          & (tost_p_array(est_r, se_r, config.margin, t0) <= alpha),
        Criterion.BAYES_FACTOR_THRESHOLD.value: (
            (log_bf01_array(est_o, se_o, t0, config.prior_mean, config.prior_sd) >= log_gamma)
            & (log_bf01_array(est_r, se_r, t0, config.prior_mean, config.prior_sd) >= log_gamma)),
        TWO_TRIALS_ANY_DIRECTION: sig_both,
    }


def _uniform_open(rng: np.random.Generator, size: int) -> np.ndarray:
    # midpoints of a 2**-53 lattice: strictly inside (0, 1)
    return (rng.integers(0, 1 << 53, size=size, dtype=np.int64) + 0.5) * 2.0 ** -53


def simulate_error_rates(scenario: SimScenario, stream_size: int = STREAM_SIZE) -> CalibrationReport:
    """Empirical success frequency of every criterion under ``scenario``.

    Draws are split into streams of ``stream_size`` pairs, each with its own
    child of ``SeedSequence(seed)``; normal variates come from the inverse CDF.
    The same seed and stream size give a bit-identical report.
    """
    n = scenario.n_sims
    n_streams = -(-n // stream_size)
    children = np.random.SeedSequence(scenario.seed).spawn(n_streams)
    totals = dict.fromkeys(REPORTED_KEYS, 0)
    for k, child in enumerate(children):
        size = min(stream_size, n - k * stream_size)
        rng = np.random.Generator(np.random.PCG64(child))
        z = norm_quantile_array(_uniform_open(rng, 2 * size))
        est_o = scenario.true_effect + scenario.se_original * z[:size]
        est_r = scenario.true_effect + scenario.se_replication * z[size:]
        verdicts = criterion_verdicts(est_o, est_r, scenario.se_original,
                                      scenario.se_replication, scenario.config)
        for key, hit in verdicts.items():
            totals[key] += int(np.count_nonzero(hit))
    estimates = {}
    for key, successes in totals.items():
        p = successes / n
        estimates[key] = Estimate(p, math.sqrt(p * (1.0 - p) / n), successes, n)
    return CalibrationReport(scenario, estimates, analytic_success_probabilities(scenario))


# -- closed-form probabilities -------------------------------------------------

def _p_nonsignificant(theta: float, se: float, config: AnalysisConfig) -> float:
    z = norm_quantile(1.0 - config.alpha / 2.0)
    d = (theta - config.null_value) / se
    return norm_cdf(z - d) - norm_cdf(-z - d)


def _p_significant_signed(theta: float, se: float, config: AnalysisConfig) -> tuple[float, float]:
    z = norm_quantile(1.0 - config.alpha / 2.0)
    d = (theta - config.null_value) / se
    return norm_cdf(d - z), norm_cdf(-d - z)


def _p_tost(theta: float, se: float, config: AnalysisConfig) -> float:
    # success iff |x - t0| <= margin - z_{1-alpha} * se
    half = config.margin - norm_quantile(1.0 - config.alpha) * se
    if half <= 0:
        return 0.0
    hi = (config.null_value + half - theta) / se
    lo = (config.null_value - half - theta) / se
    return norm_cdf(hi) - norm_cdf(lo)


def _p_bayes(theta: float, se: float, config: AnalysisConfig) -> float:
    """P(BF01 >= gamma): the set of estimates reaching gamma is an interval
    (or half-line when the prior is a point mass)."""
    t0, m, s, var = config.null_value, config.prior_mean, config.prior_sd, se * se
    log_gamma = math.log(config.gamma)

    def prob_between(lo: float, hi: float) -> float:
        return norm_cdf((hi - theta) / se) - norm_cdf((lo - theta) / se)

    if s == 0.0:
        slope = (t0 - m) / var
        if slope == 0.0:
            return 1.0 if log_gamma <= 0 else 0.0
        cut = (t0 + m) / 2.0 + log_gamma / slope
        return norm_cdf(-(cut - theta) / se) if slope > 0 else norm_cdf((cut - theta) / se)
    tot = var + s * s
    a = 1.0 / var - 1.0 / tot
    b = t0 / var - m / tot
    c = t0 * t0 / var - m * m / tot - (math.log1p(s * s / var) - 2.0 * log_gamma)
    disc = b * b - a * c
    if disc <= 0:
        return 0.0
    root = math.sqrt(disc)
    return prob_between((b - root) / a, (b + root) / a)


def analytic_success_probabilities(scenario: SimScenario) -> dict[str, float]:
    """Exact success probabilities under the normal sampling model."""
    cfg, theta = scenario.config, scenario.true_effect
    se_o, se_r = scenario.se_original, scenario.se_replication
    tau = math.hypot(se_o, se_r)
    z_ci = two_sided_quantile(cfg.ci_level)
    meta_se = 1.0 / math.sqrt(1.0 / se_o ** 2 + 1.0 / se_r ** 2)
    pos_o, neg_o = _p_significant_signed(theta, se_o, cfg)
    pos_r, neg_r = _p_significant_signed(theta, se_r, cfg)
    ns_o, ns_r = _p_nonsignificant(theta, se_o, cfg), _p_nonsignificant(theta, se_r, cfg)
    return {
        Criterion.NON_SIGNIFICANCE.value: ns_o * ns_r,
        Criterion.META_NON_SIGNIFICANCE.value: _p_nonsignificant(theta, meta_se, cfg),
        Criterion.ORIG_IN_REPL_CI.value: 2.0 * norm_cdf(z_ci * se_r / tau) - 1.0,
        Criterion.REPL_IN_ORIG_CI.value: 2.0 * norm_cdf(z_ci * se_o / tau) - 1.0,
        Criterion.REPL_IN_PREDICTION_INTERVAL.value: cfg.pi_level,
        Criterion.TWO_TRIALS.value: pos_o * pos_r + neg_o * neg_r,
        Criterion.EQUIVALENCE_TOST.value: _p_tost(theta, se_o, cfg) * _p_tost(theta, se_r, cfg),
        Criterion.BAYES_FACTOR_THRESHOLD.value: _p_bayes(theta, se_o, cfg) * _p_bayes(theta, se_r, cfg),
        TWO_TRIALS_ANY_DIRECTION: (1.0 - ns_o) * (1.0 - ns_r),
    }
