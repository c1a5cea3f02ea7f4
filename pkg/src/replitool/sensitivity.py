"""Success counts and per-pair evidence as functions of margin or prior sd."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from replitool.criteria import AnalysisConfig, aggregate_replications
from replitool.evidence import log_bf01_array, tost_p_array
from replitool.models import DomainError, StudyPair

DEFAULT_GRID_POINTS = 200


class Axis(str, enum.Enum):
    MARGIN = "margin"
    PRIOR_SD = "prior_sd"

    @classmethod
    def parse(cls, value: "str | Axis") -> "Axis":
        if isinstance(value, Axis):
            return value
        key = str(value).lower().replace("-", "_")
        for member in cls:
            if key == member.value:
                return member
        raise DomainError(f"unknown sweep axis {value!r}")


def default_margin_grid(n: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    return np.geomspace(0.01, 4.5, n)


def default_prior_sd_grid(n: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    return np.geomspace(0.25, 20.0, n)


@dataclass(frozen=True)
class SensitivityGrid:
    """Success counts over a grid.

    ``counts[i, j]`` is the number of pairs succeeding at ``grid[i]`` and
    ``thresholds[j]``. ``per_pair[i, k]`` is the pair-level evidence that
    decides success: the larger of the two TOST p-values (margin axis) or the
    smaller of the two BF01 values (prior-sd axis).
    """

    axis: Axis
    grid: np.ndarray
    thresholds: np.ndarray
    counts: np.ndarray
    per_pair: np.ndarray
    pair_ids: tuple[str, ...]

    @property
    def n_pairs(self) -> int:
        return len(self.pair_ids)

    def count_at(self, value: float, threshold: float) -> int:
        """Count at the grid point nearest ``value``."""
        i = int(np.argmin(np.abs(self.grid - value)))
        j = int(np.flatnonzero(np.isclose(self.thresholds, threshold))[0])
        return int(self.counts[i, j])

    def first_reaching(self, count: int, threshold: float) -> float | None:
        """Smallest grid value whose count is at least ``count``."""
        j = int(np.flatnonzero(np.isclose(self.thresholds, threshold))[0])
        hits = np.flatnonzero(self.counts[:, j] >= count)
        return float(self.grid[hits[0]]) if hits.size else None

    def rows(self) -> list[dict]:
        """Long format: one row per (grid value, threshold)."""
        return [{"axis": self.axis.value, "value": float(g), "threshold": float(t),
                 "count": int(self.counts[i, j]), "total": self.n_pairs}
                for i, g in enumerate(self.grid) for j, t in enumerate(self.thresholds)]


def _check_grid(grid, *, allow_zero: bool) -> np.ndarray:
    grid = np.asarray(grid, dtype=float).ravel()
    if grid.size == 0:
        raise DomainError("sensitivity grid is empty")
    if not np.all(np.isfinite(grid)):
        raise DomainError("sensitivity grid must be finite")
    if np.any(grid < 0) or (not allow_zero and np.any(grid == 0)):
        raise DomainError("sensitivity grid values must be positive" if not allow_zero
                          else "sensitivity grid values must be non-negative")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("sensitivity grid must be strictly increasing")
    return grid


def _stack(pairs: Sequence[StudyPair]):
    pairs = list(pairs)
    if not pairs:
        raise DomainError("no study pairs given")
    reps = [aggregate_replications(p) for p in pairs]
    est = np.array([[p.original.estimate, r.estimate] for p, r in zip(pairs, reps)])
    se = np.array([[p.original.se, r.se] for p, r in zip(pairs, reps)])
    return pairs, est, se


def margin_sweep(pairs: Sequence[StudyPair], config: AnalysisConfig, grid=None,
                 alphas: Sequence[float] = (0.1, 0.05, 0.01)) -> SensitivityGrid:
    grid = _check_grid(default_margin_grid() if grid is None else grid, allow_zero=False)
    alphas = np.asarray(alphas, dtype=float)
    if np.any((alphas <= 0) | (alphas >= 0.5)):
        raise DomainError("alphas must lie in (0, 0.5)")
    pairs, est, se = _stack(pairs)
    # (grid, pair, study)
    p = tost_p_array(est[None], se[None], grid[:, None, None], config.null_value)
    joint = p.max(axis=2)
    counts = (joint[:, :, None] <= alphas[None, None, :]).sum(axis=1)
    return SensitivityGrid(Axis.MARGIN, grid, alphas, counts, joint, tuple(p.id for p in pairs))


def prior_sd_sweep(pairs: Sequence[StudyPair], config: AnalysisConfig, grid=None,
                   gammas: Sequence[float] = (3.0, 6.0, 10.0)) -> SensitivityGrid:
    """Counts of pairs with BF01 >= gamma in both studies, prior N(config.prior_mean, s^2)."""
    grid = _check_grid(default_prior_sd_grid() if grid is None else grid, allow_zero=True)
    gammas = np.asarray(gammas, dtype=float)
    if np.any(gammas <= 1):
        raise DomainError("gammas must exceed 1")
    pairs, est, se = _stack(pairs)
    log_bf = log_bf01_array(est[None], se[None], config.null_value, config.prior_mean,
                            grid[:, None, None])
    joint = log_bf.min(axis=2)
    counts = (joint[:, :, None] >= np.log(gammas)[None, None, :]).sum(axis=1)
    return SensitivityGrid(Axis.PRIOR_SD, grid, gammas, counts, np.exp(joint),
                           tuple(p.id for p in pairs))


@dataclass(frozen=True)
class EvidenceCurve:
    """p_TOST (margin axis) or BF01 (prior-sd axis) of both studies along a grid."""

    pair_id: str
    axis: Axis
    grid: np.ndarray
    original: np.ndarray
    replication: np.ndarray

    def rows(self) -> list[dict]:
        measure = "p_tost" if self.axis is Axis.MARGIN else "bf01"
        out = []
        for role, values in (("original", self.original), ("replication", self.replication)):
            out += [{"pair_id": self.pair_id, "study": role, "axis": self.axis.value,
                     "value": float(g), "measure": measure, "evidence": float(v)}
                    for g, v in zip(self.grid, values)]
        return out


def pair_evidence_curve(pair: StudyPair, config: AnalysisConfig, axis: Axis | str,
                        grid=None) -> EvidenceCurve:
    axis = Axis.parse(axis)
    repl = aggregate_replications(pair)
    if axis is Axis.MARGIN:
        grid = _check_grid(default_margin_grid() if grid is None else grid, allow_zero=False)
        o = tost_p_array(pair.original.estimate, pair.original.se, grid, config.null_value)
        r = tost_p_array(repl.estimate, repl.se, grid, config.null_value)
    else:
        grid = _check_grid(default_prior_sd_grid() if grid is None else grid, allow_zero=True)
        o = np.exp(log_bf01_array(pair.original.estimate, pair.original.se, config.null_value,
                                  config.prior_mean, grid))
        r = np.exp(log_bf01_array(repl.estimate, repl.se, config.null_value, config.prior_mean, grid))
    return EvidenceCurve(pair.id, axis, grid, o, r)
