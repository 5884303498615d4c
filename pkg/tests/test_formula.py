from hypothesis import given, settings, strategies as st

from ordkernel.arith import add, aleph, omega_pow
from ordkernel.formula import (
    BQ,
    And,
    Level,
    Lit,
    Mem,
    NotMem,
    Or,
    decompose,
    in_sigma,
    in_sigma_hat,
    k_set,
    mostowski_apply,
    neg,
    qk_set,
    rk,
    sigma_pi_class,
)
from ordkernel.formula_corpus import formula_corpus
from ordkernel.hf import EMPTY, HFSet
from ordkernel.order import cmp_int
from ordkernel.parsing import parse_formula as P
from ordkernel.terms import I, ONE, ZERO, AlephSucc, Fc1, Psi, Var
from ordkernel.universe import truth

S1 = HFSet.of(EMPTY)
W1 = AlephSucc(ZERO)
w1 = aleph(ONE)
CORPUS = formula_corpus(11, 150)


def test_neg_examples():
    a, b = EMPTY, S1
    assert neg(Mem(a, b)) == NotMem(a, b)
    A, B = Mem(a, b), Mem(b, a)
    assert neg(And(A, B)) == Or(neg(A), neg(B))
    assert neg(BQ("all", "x", b, Mem(Var("x"), a))) == BQ("ex", "x", b, NotMem(Var("x"), a))


def test_k_set_examples():
    assert k_set(P("mem({},{{}})")) == {EMPTY, S1}
    assert k_set(P("ex x in L(I) . mem(x,{{}})")) == {EMPTY, S1, Level(I)}
    assert k_set(P("reg(W(0+1))")) == {EMPTY, w1}


def test_qk_set_examples():
    assert qk_set(P("mem({},{{}})")) == {EMPTY}
    assert qk_set(P("all x in {{}} . mem(x,{})")) == {EMPTY, S1}
    assert qk_set(P("and(mem({},{}),mem({},{{}}))")) == {EMPTY}


def test_rank_examples():
    assert rk(P("mem({},{{}})")) == ZERO
    assert rk(P("reg(W(0+1))")) == ONE
    assert rk(P("ex x in L(I) . mem(x,{})")) == I


def test_class_examples():
    assert sigma_pi_class(P("mem({},{{}})")).kind == "Delta0"
    c = sigma_pi_class(P("ex x in L(I) . mem(x,{})"))
    assert (c.kind, c.level) == ("Sigma", 1)
    assert sigma_pi_class(P("reg(W(0+1))")) is None


def test_sigma_hat_examples():
    assert in_sigma_hat(P("ex x in L(W(0+1)) . mem(x,{})"), w1, 2)
    assert in_sigma_hat(P("ex x in L(I) . mem(x,{})"), w1, 2)


def test_decompose_examples():
    d = decompose(P("or(mem({},{}),mem({},{{}}))"))
    assert d.kind == "or" and d.space == "finite"
    d = decompose(P("reg(W(0+1))"))
    assert d.kind == "or"
    [(_, lit)] = d.branches()
    assert truth(lit) is True
    d = decompose(P("ex z in {{},{{}}} . mem({},z)"))
    assert d.space == "singleton" and d.witnesses == (S1,)


def test_mostowski_examples():
    x = Psi(W1, ZERO)
    # constants below x are fixed
    assert mostowski_apply(P("mem(w^(0),{})"), x, W1) == P("mem(w^(0),{})")
    # the regular itself goes to x
    assert mostowski_apply(P("mem(W(w^(0)),{})"), x, W1) == Lit("mem", (x, EMPTY), True)
    f = mostowski_apply(P("ex y in L(I) . mem({},y)"), x, W1)
    assert f.bound == Level(Fc1(x, W1))


@settings(max_examples=150)
@given(st.sampled_from(CORPUS))
def test_negation_involutive_and_flips_truth(A):
    assert neg(neg(A)) == A
    t = truth(A)
    if t is not None:
        assert truth(neg(A)) is (not t)


@settings(max_examples=150)
@given(st.sampled_from(CORPUS))
def test_rank_below_I_plus_omega(A):
    assert cmp_int(rk(A), add(I, omega_pow(ONE))) < 0
    assert rk(neg(A)) == rk(A)


@settings(max_examples=150)
@given(st.sampled_from(CORPUS))
def test_branches_have_smaller_rank(A):
    d = decompose(A)
    if d.space in ("finite", "singleton"):
        for _, B in d.branches():
            assert cmp_int(rk(B), rk(A)) < 0


@given(st.sampled_from(CORPUS))
def test_sigma_sentences_are_in_every_hat_class(A):
    if in_sigma(A, 3):
        assert in_sigma_hat(A, w1, 2) and in_sigma_hat(A, I, 2)
