"""Acceptance gate: one PASS/FAIL line per criterion.

Run standalone with ``python3 tests/test_acceptance.py`` or under pytest.
"""

import functools
import itertools
import random
import sys
import time

import pytest

from ordkernel.arith import add, aleph, normalize, omega_pow, omega_tower, succ, times_nat, veblen
from ordkernel.corpus import normal_terms
from ordkernel.derivation import AxP, AxPI, Derivation, Operator, RuleCut, check, is_cut_free
from ordkernel.derivation import p_axiom_formula, pi_axiom_formula
from ordkernel.formula import decompose, in_sigma_hat, neg, rk
from ordkernel.formula_corpus import formula_corpus
from ordkernel.order import cmp_int, in_hull, psi_admissible
from ordkernel.parsing import parse_formula as P
from ordkernel.stages import hull_stages
from ordkernel.terms import I, ONE, OMEGA, TOP, ZERO, Aleph, AlephSucc, Psi, nat
from ordkernel.transform import (
    TransformError,
    axiom_shape,
    boundedness,
    build_completeness,
    build_tautology,
    pipeline_complete_ce,
    pred_cut_elim,
    prove_true,
    reduce_cut,
    toy_pipeline_input,
)
from ordkernel.universe import truth

W1 = AlephSucc(ZERO)
w1 = aleph(ONE)
G = P("mem({},{{}})")
FORMULAS = formula_corpus(2024, 400)
REGULARS = [W1, AlephSucc(ONE), TOP]


REPORT_LINES = []


def _report(num, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {num}: {detail}"
    REPORT_LINES.append(line)
    print(line, flush=True)
    return ok


# ---------------------------------------------------------------- term order


def order_laws():
    t0 = time.monotonic()
    terms = normal_terms(7, restricted=True)
    bad = 0
    pairs = 0
    for s, t in itertools.product(terms, repeat=2):
        pairs += 1
        c = cmp_int(s, t)
        if c != -cmp_int(t, s) or (c == 0) != (s == t):
            bad += 1
    # a relation that coincides with the positions of a sorted list is transitive,
    # which makes this an exhaustive transitivity check
    ranked = sorted(terms, key=functools.cmp_to_key(cmp_int))
    pos = {t: i for i, t in enumerate(ranked)}
    for s, t in itertools.product(terms, repeat=2):
        if cmp_int(s, t) != (pos[s] > pos[t]) - (pos[s] < pos[t]):
            bad += 1
    rng = random.Random(1)
    for _ in range(10_000):
        a, b, c = (rng.choice(terms) for _ in range(3))
        if cmp_int(a, b) < 0 and cmp_int(b, c) < 0 and cmp_int(a, c) >= 0:
            bad += 1
    elapsed = time.monotonic() - t0
    ok = bad == 0 and pairs >= 10_000 and elapsed < 120
    return ok, f"{len(terms)} terms, {pairs} pairs, {bad} violations, {elapsed:.1f}s"


def oracle_equivalence():
    t0 = time.monotonic()
    terms = normal_terms(5)
    bad = unsaturated = 0
    for g, b in itertools.product(terms, repeat=2):
        r = hull_stages(g, b, 5, 12)
        unsaturated += not r.saturated
        for t in terms:
            bad += in_hull(t, g, b) != (t in r.terms)
    elapsed = time.monotonic() - t0
    ok = bad == 0 and unsaturated == 0 and elapsed < 300
    return ok, f"{len(terms) ** 3} triples, {bad} disagreements, {unsaturated} unsaturated, {elapsed:.1f}s"


def psi_interval_law():
    terms = normal_terms(6)
    checked = bad = 0
    for a in terms:
        if cmp_int(a, I) >= 0:
            continue
        try:
            lo, hi = aleph(a), aleph(succ(a))
        except Exception:
            continue
        kappa = AlephSucc(a)
        for alpha in terms:
            if not psi_admissible(kappa, alpha):
                continue
            v = Psi(kappa, alpha)
            checked += 1
            bad += not (cmp_int(lo, v) < 0 < cmp_int(hi, v))
    return bad == 0 and checked > 0, f"{checked} admissible pairs, {bad} violations"


def fixed_point():
    checked = bad = 0
    for alpha in normal_terms(6):
        if not psi_admissible(TOP, alpha):
            continue
        v = Psi(TOP, alpha)
        checked += 1
        bad += normalize(Aleph(v)) != v
    return bad == 0 and checked > 0, f"{checked} indices, {bad} violations"


def monotonicity():
    terms = normal_terms(5)
    checked = bad = 0
    for kappa in REGULARS:
        adm = [t for t in terms if psi_admissible(kappa, t)]
        for a, b in itertools.product(adm, repeat=2):
            if cmp_int(a, b) < 0 and in_hull(a, b, Psi(kappa, b)):
                checked += 1
                bad += cmp_int(Psi(kappa, a), Psi(kappa, b)) >= 0
    return bad == 0 and checked > 0, f"{checked} premises, {bad} violations"


# ---------------------------------------------------------------- formulas and derivations


def rank_laws():
    bound = add(I, OMEGA)
    branches = bad = 0
    for A in FORMULAS:
        r = rk(A)
        bad += cmp_int(r, bound) >= 0
        for lam in (w1, I):
            if cmp_int(r, lam) < 0 and not in_sigma_hat(A, lam, 2):
                bad += 1
        d = decompose(A)
        if d.space in ("finite", "singleton"):
            for _, B in d.branches():
                branches += 1
                bad += cmp_int(rk(B), r) >= 0
    return bad == 0 and branches > 0, f"{len(FORMULAS)} formulas, {branches} branches, {bad} violations"


def tautology_contract():
    bad = 0
    for A in FORMULAS:
        d = build_tautology([], A)
        rep = check(d)
        bad += not (rep.ok and d.bound == add(rk(A), rk(A)) and d.cutrank == ZERO)
    return bad == 0, f"{len(FORMULAS)} formulas, {bad} violations"


def _completion(A):
    try:
        return build_completeness(A)
    except TransformError:
        return None


def reduction_contract():
    pairs = bad = 0
    side = [f for f in FORMULAS[:3] if truth(f) is not None]
    for C in FORMULAS:
        if decompose(C).kind != "or" or axiom_shape(C):
            continue
        t = truth(C)
        dl, dr = build_tautology(side, C), build_tautology([], C)
        if t is True:
            dr = _completion(C) or dr
        if t is False:
            dl = _completion(neg(C)) or dl
        out = reduce_cut(dl, dr, C, rk(C))
        pairs += 1
        ok = check(out).ok and out.bound == add(dl.bound, dr.bound)
        ok = ok and out.seq == (dl.seq - {neg(C)}) | (dr.seq - {C})
        if t is not None and all(truth(f) is not None for f in dl.seq | dr.seq):
            premises_true = any(truth(f) for f in dl.seq) and any(truth(f) for f in dr.seq)
            if premises_true:
                ok = ok and any(truth(f) for f in out.seq)
        bad += not ok
    return bad == 0 and pairs >= 50, f"{pairs} cut pairs, {bad} violations"


def _axiom_cut(C, rule):
    left = prove_true(G, [neg(C)])
    right = Derivation(Operator(), TOP, ZERO, ZERO, frozenset({G, C}), rule)
    return Derivation(Operator(), TOP, succ(left.bound), succ(rk(C)), frozenset({G}), RuleCut(C), (left, right))


def _plain_cut(src):
    A = P(src)
    t = build_tautology([], A)
    return Derivation(Operator(), TOP, succ(t.bound), succ(rk(A)), t.seq, RuleCut(A), (t, t)), rk(A)


def predicative_contract():
    results = []
    d, r = _plain_cut("or(ex x in {{},{{}}} . mem({},x), mem({},{}))")
    out = pred_cut_elim(d, ZERO, r)
    results.append(check(out).ok and out.bound == omega_pow(d.bound))
    out = pred_cut_elim(d, nat(2), ZERO)
    results.append(check(out).ok and out.bound == veblen(nat(2), d.bound) and is_cut_free(out))
    CP = p_axiom_formula(w1, ZERO)
    dP = _axiom_cut(CP, AxP(w1, ZERO))
    out = pred_cut_elim(dP, ZERO, rk(CP), part=2)
    results.append(check(out).ok and out.bound == omega_pow(dP.bound))
    d2, r2 = _plain_cut("or(ex x in L(W(0+1)) . mem({},x), mem({},{}))")
    out = pred_cut_elim(d2, ZERO, r2, part=2)
    results.append(check(out).ok and out.bound == omega_pow(d2.bound))
    dI = _axiom_cut(pi_axiom_formula(ZERO), AxPI(ZERO))
    out = pred_cut_elim(dI, ZERO, I, part=3)
    results.append(check(out).ok and out.bound == omega_pow(dI.bound))
    out = pred_cut_elim(dP, nat(2), add(w1, ONE), part=4)
    v = veblen(nat(2), dP.bound)
    results.append(check(out).ok and out.bound == v and out.op.gamma == add(dP.op.gamma, v))
    rejected = 0
    for a, c, part in [(ZERO, rk(CP), 1), (ONE, add(w1, ONE), 1), (ONE, add(w1, ONE), 2)]:
        try:
            pred_cut_elim(dP, a, c, part=part)
        except TransformError:
            rejected += 1
    ok = all(results) and rejected == 3
    return ok, f"{sum(results)}/{len(results)} outputs exact, {rejected}/3 window violations rejected"


def boundedness_contract():
    C = P("ex x in L(W(0+1)) . mem({},x)")
    runs = bad = 0
    for b in (nat(3), nat(5), OMEGA, add(OMEGA, ONE)):
        d = prove_true(C, kappa=W1)
        if cmp_int(d.bound, b) <= 0:
            out = boundedness(d, C, b)
            runs += 1
            bad += not (check(out).ok and (out.bound, out.cutrank) == (d.bound, d.cutrank))
        t = build_tautology([G], C)
        out = boundedness(t, C, b, "dual")
        runs += 1
        bad += not (check(out).ok and (out.bound, out.cutrank) == (t.bound, t.cutrank))
    return bad == 0 and runs > 0, f"{runs} restrictions, {bad} violations"


def end_to_end():
    t0 = time.monotonic()
    m, k = 2, 1
    d = toy_pipeline_input(m, k)
    input_ok = check(d).ok
    out, wb = pipeline_complete_ce(d, m, k)
    beta = Psi(W1, omega_tower(m, add(times_nat(I, 3), nat(k))))
    elapsed = time.monotonic() - t0
    ok = (input_ok and check(out).ok and is_cut_free(out) and wb == veblen(beta, beta)
          and any(truth(f) for f in out.seq) and cmp_int(wb, d.bound) < 0 and elapsed < 60)
    return ok, f"cut-free={is_cut_free(out)}, witness bound exact={wb == veblen(beta, beta)}, {elapsed:.2f}s"


CRITERIA = [
    (1, order_laws),
    (2, oracle_equivalence),
    (3, psi_interval_law),
    (4, fixed_point),
    (5, monotonicity),
    (6, rank_laws),
    (7, tautology_contract),
    (8, reduction_contract),
    (9, predicative_contract),
    (10, boundedness_contract),
    (11, end_to_end),
]


@pytest.mark.parametrize("num,fn", CRITERIA, ids=[f"criterion_{n}" for n, _ in CRITERIA])
def test_criterion(num, fn):
    try:
        ok, detail = fn()
    except Exception as exc:
        ok, detail = False, f"raised {type(exc).__name__}: {exc}"
    assert _report(num, ok, detail), detail


if __name__ == "__main__":
    results = [_report(n, *fn()) for n, fn in CRITERIA]
    sys.exit(0 if all(results) else 1)
