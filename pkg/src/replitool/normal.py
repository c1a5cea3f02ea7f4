"""Standard normal CDF and quantile kernels.

Scalar versions use :func:`math.erfc`; the array versions use the same
formula through :func:`scipy.special.erfc` so that the simulation and the
analytic code paths agree to rounding error.
"""

from __future__ import annotations

import math
from statistics import NormalDist

import numpy as np
from scipy import special

from replitool.models import DomainError

_SQRT1_2 = math.sqrt(0.5)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_STD = NormalDist()


def norm_cdf(z: float) -> float:
    """Phi(z). Absolute error is at the level of double rounding.

    Beyond |z| = 8 the result keeps absolute accuracy but loses relative
    accuracy in the upper tail (``1 - norm_cdf(z)`` underflows to 0 near
    z = 8.3); use ``norm_cdf(-z)`` for upper-tail probabilities.
    """
    z = float(z)
    if not math.isfinite(z):
        raise DomainError(f"norm_cdf requires a finite argument, got {z!r}")
    return 0.5 * math.erfc(-z * _SQRT1_2)


def _newton(x: float, p: float) -> float:
    pdf = _INV_SQRT_2PI * math.exp(-0.5 * x * x)
    if pdf == 0.0:
        return x
    return x - (norm_cdf(x) - p) / pdf


def norm_quantile(p: float) -> float:
    """Inverse of :func:`norm_cdf` on the open interval (0, 1)."""
    p = float(p)
    if not (0.0 < p < 1.0):
        raise DomainError(f"norm_quantile requires 0 < p < 1, got {p!r}")
    if p == 0.5:
        return 0.0
    # Wichura's rational approximation, then one Newton step against norm_cdf
    # so that norm_cdf(norm_quantile(p)) is self-consistent.
    return _newton(_STD.inv_cdf(p), p)


def norm_cdf_array(z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise DomainError("norm_cdf_array requires finite arguments")
    return 0.5 * special.erfc(-z * _SQRT1_2)


def norm_quantile_array(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if np.any(~((p > 0.0) & (p < 1.0))):
        raise DomainError("norm_quantile_array requires 0 < p < 1")
    x = special.ndtri(p)
    pdf = _INV_SQRT_2PI * np.exp(-0.5 * x * x)
    step = np.divide(norm_cdf_array(x) - p, pdf, out=np.zeros_like(x), where=pdf > 0)
    return x - step


def two_sided_quantile(level: float) -> float:
    """z such that a central interval of ``level`` is +-z."""
    level = float(level)
    if not (0.0 < level < 1.0):
        raise DomainError(f"interval level must lie in (0, 1), got {level!r}")
    return norm_quantile(1.0 - (1.0 - level) / 2.0)
