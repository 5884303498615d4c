import pytest
from hypothesis import given, strategies as st

from ordkernel.hf import EMPTY, HFSet, lorder, universe, vn_rank, von_neumann
from ordkernel.order import Ordering
from ordkernel.parsing import parse_formula, parse_hf
from ordkernel.universe import NotEvaluable, eval_sentence, mu_witness, truth

S1 = HFSet.of(EMPTY)
SETS = universe(3)


def test_lorder_examples():
    assert lorder(EMPTY, S1) is Ordering.LESS
    assert lorder(S1, S1) is Ordering.EQUAL
    # equal rank 2; the least element of the right set is the empty set, smaller than {{}}
    assert lorder(HFSet.of(S1), HFSet.of(EMPTY, S1)) is Ordering.GREATER


def test_vn_rank_examples():
    assert vn_rank(EMPTY) == 0
    assert vn_rank(S1) == 1
    assert vn_rank(HFSet.of(EMPTY, S1)) == 2


def test_eval_examples():
    assert eval_sentence(parse_formula("mem({},{{}})"))
    assert eval_sentence(parse_formula("all x in {{},{{}}} . mem(x,{{},{{}},{{{}}}})"))
    assert eval_sentence(parse_formula("reg(W(0+1))"))
    assert not eval_sentence(parse_formula("reg(w^(0))"))


def test_symbolic_level_is_not_evaluable():
    f = parse_formula("ex x in L(I) . mem(x,{})")
    assert truth(f) is None
    with pytest.raises(NotEvaluable):
        eval_sentence(f)


def test_large_level_witness_found():
    assert truth(parse_formula("ex x in L(I) . mem({},x)")) is True


def test_mu_witness_examples():
    pair = HFSet.of(EMPTY, S1)
    # least z in {0,{0}} with 0 in z, i.e. z = {0}
    assert mu_witness(pair, "z", parse_formula("mem({},z)", False)) == S1
    assert mu_witness(S1, "z", parse_formula("mem(z,z)", False)) == EMPTY
    assert mu_witness(HFSet.of(S1, EMPTY), "z", parse_formula("mem({},{{}})")) == EMPTY


def test_universe_sizes():
    assert [len(universe(k)) for k in range(5)] == [0, 1, 2, 4, 16]


@given(st.sampled_from(SETS), st.sampled_from(SETS))
def test_lorder_extends_rank(a, b):
    if vn_rank(a) < vn_rank(b):
        assert lorder(a, b) is Ordering.LESS
    assert (lorder(a, b) is Ordering.EQUAL) == (a == b)


@given(st.sampled_from(SETS), st.sampled_from(SETS))
def test_membership_lowers_rank(a, b):
    if a in b.elems:
        assert vn_rank(a) < vn_rank(b)


@given(st.integers(0, 6))
def test_von_neumann_rank(n):
    assert vn_rank(von_neumann(n)) == n


@given(st.sampled_from(SETS), st.sampled_from(SETS))
def test_literal_truth_matches_membership(a, b):
    from ordkernel.hf import render_hf

    f = parse_formula(f"mem({render_hf(a)},{render_hf(b)})")
    assert eval_sentence(f) == (a in b.elems)


def test_parse_hf_round_trip():
    from ordkernel.hf import render_hf

    for s in SETS:
        assert parse_hf(render_hf(s)) == s
