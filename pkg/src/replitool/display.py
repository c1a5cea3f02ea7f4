"""Rounding rules for human-readable output."""

from __future__ import annotations

import math


def _two_significant(x: float) -> str:
    r = float(f"{x:.2g}")
    if r < 100:
        return f"{r:g}"
    if r < 1e5:
        return f"{x:.0f}"
    return f"{x:.1e}"


def format_p(p: float) -> str:
    """0.06, 0.75; two significant digits below 0.01; '<0.0001' beyond."""
    if p >= 0.01:
        return f"{p:.2f}"
    if p >= 1e-4:
        return f"{float(f'{p:.2g}'):g}"
    return "<0.0001"


def format_bf(bf: float) -> str:
    """Two significant digits, values below one as reciprocals ('1/1.8')."""
    if bf == 0.0:
        return "1/inf"
    if math.isinf(bf):
        return "inf"
    if bf >= 1.0 or f"{bf:.2g}" == "1":
        return _two_significant(bf)
    return "1/" + _two_significant(1.0 / bf)


def format_number(x: float, digits: int = 2) -> str:
    return f"{x:.{digits}f}"
