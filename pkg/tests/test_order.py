import pytest
from hypothesis import given, settings, strategies as st

from ordkernel.arith import normalize
from ordkernel.corpus import normal_terms
from ordkernel.order import Ordering, cmp, cmp_int, in_hull, is_normal, psi_admissible, rank_interval
from ordkernel.stages import hull_stages
from ordkernel.terms import I, ONE, TOP, ZERO, Aleph, AlephSucc, Psi, Sum, Pow

W1 = AlephSucc(ZERO)
TERMS = normal_terms(5)


def test_cmp_examples():
    assert cmp(ZERO, I) is Ordering.LESS
    assert cmp(Aleph(ZERO), Psi(W1, I)) is Ordering.LESS
    assert cmp(Psi(W1, ZERO), Psi(W1, ONE)) is Ordering.LESS


def test_in_hull_examples():
    for g in (ZERO, ONE, I):
        assert in_hull(ZERO, g, ZERO)
    assert in_hull(Psi(TOP, ZERO), ONE, ZERO)
    assert not in_hull(Psi(TOP, ONE), ONE, ZERO)


def test_stages_examples():
    r = hull_stages(ZERO, ZERO, 1, 0)
    assert r.terms == {ZERO, I}


@pytest.mark.parametrize("gamma,beta", [(ZERO, ZERO), (ONE, ZERO), (ONE, Psi(W1, ZERO))])
def test_stages_monotone_in_depth(gamma, beta):
    prev = hull_stages(gamma, beta, 4, 0).terms
    for d in range(1, 5):
        cur = hull_stages(gamma, beta, 4, d).terms
        assert prev <= cur
        prev = cur


def test_psi_admissible_examples():
    for k in (W1, TOP, AlephSucc(ONE)):
        assert psi_admissible(k, ZERO)
    assert psi_admissible(TOP, I)
    # the collapse value is below the hull bound, so it is its own admissible index
    assert psi_admissible(W1, Psi(W1, ZERO))


def test_rank_interval_examples():
    r = rank_interval(ZERO)
    assert (r.lo, r.hi) == (ZERO, ONE)
    r = rank_interval(I)
    assert (r.lo, r.hi) == (I, Sum((I, ONE)))


def test_is_normal_rejects_increasing_sum():
    assert not is_normal(Sum((ONE, Pow(ONE))))


@given(st.sampled_from(TERMS), st.sampled_from(TERMS))
def test_antisymmetry(s, t):
    assert cmp_int(s, t) == -cmp_int(t, s)
    assert (cmp_int(s, t) == 0) == (s == t)


@settings(max_examples=300)
@given(st.sampled_from(TERMS), st.sampled_from(TERMS), st.sampled_from(TERMS))
def test_transitivity(a, b, c):
    if cmp_int(a, b) < 0 and cmp_int(b, c) < 0:
        assert cmp_int(a, c) < 0


@given(st.sampled_from(TERMS))
def test_normal_terms_are_fixed_by_normalize(t):
    assert is_normal(t)
    assert normalize(t) == t
