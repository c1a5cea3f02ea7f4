import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from replitool.criteria import AnalysisConfig, Criterion, success_rates
from replitool.models import DomainError, StudyPair, StudyResult
from replitool.sensitivity import (Axis, default_margin_grid, default_prior_sd_grid, margin_sweep,
                                   pair_evidence_curve, prior_sd_sweep)

CFG = AnalysisConfig()
RPP_OTHERS = ("Eastwick2008", "Reynolds2008", "McCann2005")


def test_default_grids():
    g = default_margin_grid()
    assert len(g) == 200 and g[0] == pytest.approx(0.01) and g[-1] == pytest.approx(4.5)
    s = default_prior_sd_grid()
    assert len(s) == 200 and s[0] == pytest.approx(0.25) and s[-1] == pytest.approx(20)


def test_margin_sweep_fixture(rpcb):
    grid = margin_sweep(rpcb, CFG)
    assert grid.count_at(0.74, 0.05) == 4
    assert margin_sweep(rpcb, CFG, [0.74]).count_at(0.74, 0.05) == 4
    assert grid.first_reaching(11, 0.05) > 2
    assert margin_sweep(rpcb, CFG, [1e6]).counts.tolist() == [[15, 15, 15]]


def test_margin_sweep_matches_pairwise_evaluation(rpcb):
    for delta in (0.3, 0.74, 1.5, 3.0):
        direct = success_rates(rpcb, CFG.replace(margin=delta), [Criterion.EQUIVALENCE_TOST])
        assert margin_sweep(rpcb, CFG, [delta]).count_at(delta, 0.05) == direct[Criterion.EQUIVALENCE_TOST].successes


def test_prior_sd_sweep_fixture(rpcb):
    grid = prior_sd_sweep(rpcb, CFG)
    assert prior_sd_sweep(rpcb, CFG, [2.0]).count_at(2.0, 3) == 1
    assert 15 <= grid.first_reaching(11, 3.0) <= 25
    assert grid.count_at(5.0, 3.0) >= 8
    assert prior_sd_sweep(rpcb, CFG, [0.0]).counts.tolist() == [[0, 0, 0]]


def test_rpp_about_values(named):
    others = [named[n] for n in RPP_OTHERS]
    cfg = CFG.replace(margin=0.2)
    needed = margin_sweep(others, cfg, np.linspace(0.01, 1.0, 100)).first_reaching(3, 0.05)
    assert 0.3 <= needed <= 0.5
    assert prior_sd_sweep(others, cfg, [1.0]).count_at(1.0, 3) == 3
    ran = named["Ranganath2008"]
    curve = pair_evidence_curve(ran, cfg, Axis.PRIOR_SD, [2.0])
    assert curve.replication[0] < 0.1 / 100
    assert prior_sd_sweep(others, cfg, [2.0]).count_at(2.0, 3) == 3


def test_grid_validation(rpcb):
    for bad in ([], [0.5, 0.5], [1.0, 0.5], [np.nan], [0.0]):
        with pytest.raises(DomainError):
            margin_sweep(rpcb, CFG, bad)
    with pytest.raises(DomainError):
        prior_sd_sweep(rpcb, CFG, [-1.0])
    with pytest.raises(DomainError):
        margin_sweep([], CFG)


def test_rows_long_format(rpcb):
    rows = margin_sweep(rpcb, CFG, [0.5, 1.0]).rows()
    assert len(rows) == 6
    assert set(rows[0]) == {"axis", "value", "threshold", "count", "total"}
    curve = pair_evidence_curve(rpcb[0], CFG, "margin", [0.5, 1.0])
    assert len(curve.rows()) == 4


# -- properties --------------------------------------------------------------------

study_st = st.tuples(st.floats(-2, 2), st.floats(0.05, 1.5))
pairs_st = st.lists(st.builds(lambda o, r: StudyPair("x/p/1/1", StudyResult(*o), (StudyResult(*r),)),
                              study_st, study_st), min_size=1, max_size=8)
grid_st = st.lists(st.floats(0.01, 10), min_size=2, max_size=30, unique=True).map(sorted)


@pytest.mark.property
@given(pairs_st, grid_st)
def test_margin_monotonicity(pairs, grid):
    g = margin_sweep(pairs, CFG, grid)
    assert np.all(np.diff(g.per_pair, axis=0) <= 0)
    assert np.all(np.diff(g.counts, axis=0) >= 0)
    # alpha 0.1, 0.05, 0.01
    assert np.all(g.counts[:, 2] <= g.counts[:, 1]) and np.all(g.counts[:, 1] <= g.counts[:, 0])


@pytest.mark.property
def test_margin_strictly_decreasing_on_default_grid():
    s = StudyPair("x/p/1/1", StudyResult(0.3, 0.4), (StudyResult(-0.2, 0.5),))
    g = margin_sweep([s], CFG, default_margin_grid(60))
    assert np.all(np.diff(g.per_pair[:, 0]) < 0)


@pytest.mark.property
@given(pairs_st, grid_st)
def test_gamma_ordering(pairs, grid):
    g = prior_sd_sweep(pairs, CFG, grid)
    assert np.all(g.counts[:, 2] <= g.counts[:, 1]) and np.all(g.counts[:, 1] <= g.counts[:, 0])


@pytest.mark.property
@given(pairs_st, grid_st, st.lists(st.floats(0.01, 10), max_size=20))
@settings(max_examples=100)
def test_grid_refinement_stability(pairs, grid, extra):
    fine = sorted(set(grid) | set(extra))
    for sweep in (margin_sweep, prior_sd_sweep):
        coarse_g, fine_g = sweep(pairs, CFG, grid), sweep(pairs, CFG, fine)
        idx = [fine.index(v) for v in grid]
        assert np.array_equal(coarse_g.counts, fine_g.counts[idx])
