import math

import pytest
from hypothesis import given, settings, strategies as st

from oracles import wls
from replitool.meta import fixed_effect_meta, meta_nonsignificance_success, pair_meta
from replitool.models import DomainError, Scale, StudyPair, StudyResult

studies_strategy = st.lists(st.tuples(st.floats(-5, 5), st.floats(0.01, 5)), min_size=2, max_size=12)


def mk(items):
    return [StudyResult(e, s) for e, s in items]


def test_examples():
    m = fixed_effect_meta(mk([(1, 1), (1, 1)]))
    assert (m.estimate, m.se) == pytest.approx((1.0, 1 / math.sqrt(2)), abs=1e-15)
    assert fixed_effect_meta(mk([(0, 1), (2, 1)])).estimate == pytest.approx(1.0)
    m = fixed_effect_meta(mk([(0, 1), (2, 2)]))
    assert m.estimate == pytest.approx(0.4, abs=1e-12)
    assert m.se == pytest.approx(0.894427, abs=1e-6)
    assert (m.estimate, m.se) == pytest.approx(wls([0, 2], [1, 2]), rel=1e-12)


def test_rejects_single_study_and_scale_mismatch():
    with pytest.raises(DomainError):
        fixed_effect_meta(mk([(1, 1)]))
    with pytest.raises(DomainError):
        fixed_effect_meta([StudyResult(0, 1), StudyResult(0, 1, scale=Scale.FISHER_Z)])


def test_meta_nonsignificance_examples():
    null = StudyResult(0.0, 1.0)
    assert meta_nonsignificance_success(StudyPair("a/b/c/d", null, (null,)))
    # 1.7 sigma each: individually p = 0.089, pooled z = 2.40
    s = StudyResult(1.7, 1.0)
    pair = StudyPair("a/b/c/d", s, (s,))
    assert not meta_nonsignificance_success(pair)
    assert pair_meta(pair).estimate / pair_meta(pair).se == pytest.approx(1.7 * math.sqrt(2))


@pytest.mark.property
@given(studies_strategy)
def test_agrees_with_wls_oracle(items):
    m = fixed_effect_meta(mk(items))
    est, se = wls(*zip(*items))
    assert m.estimate == pytest.approx(est, rel=1e-9, abs=1e-9)
    assert m.se == pytest.approx(se, rel=1e-9)


@pytest.mark.property
@given(studies_strategy, st.randoms(use_true_random=False))
@settings(max_examples=200)
def test_permutation_invariance(items, rnd):
    shuffled = list(items)
    rnd.shuffle(shuffled)
    a, b = fixed_effect_meta(mk(items)), fixed_effect_meta(mk(shuffled))
    assert (a.estimate, a.se, a.p_two_sided) == (b.estimate, b.se, b.p_two_sided)


@pytest.mark.property
@given(studies_strategy)
def test_bounds(items):
    m = fixed_effect_meta(mk(items))
    ests, ses = zip(*items)
    assert m.se <= min(ses)
    assert min(ests) - 1e-12 <= m.estimate <= max(ests) + 1e-12


def test_fixture_meta_rate(rpcb):
    assert sum(meta_nonsignificance_success(p) for p in rpcb) == 10
