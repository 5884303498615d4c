"""Proof transformations on derivation trees.

Every public transformer checks its input, builds a new tree and re-checks the
result before returning it; a transformation that would produce an invalid tree
raises TransformError instead.
"""

from __future__ import annotations

from .arith import (
    add,
    aleph,
    next_regular,
    omega_pow,
    omega_tower,
    succ,
    term_as_reg,
    times_nat,
    veblen,
)
from .derivation import (
    CheckReport,
    Derivation,
    Operator,
    RuleAnd,
    RuleCut,
    RuleF1,
    RuleFN,
    RuleOr,
    bound_cap,
    canonical,
    check,
    in_operator,
    nodes,
    p_axiom_formula,
    pi_axiom_formula,
    weaken_kappa,
)
from .formula import (
    BQ,
    And,
    Formula,
    FormulaError,
    Level,
    Lit,
    Mem,
    NotMem,
    Or,
    RankAmbiguous,
    decompose,
    in_sigma,
    in_sigma_hat,
    is_sentence,
    mostowski_apply,
    neg,
    p_holds,
    pi_holds,
    rk,
    rk_l,
)
from .hf import EMPTY, HFSet
from .order import cmp_int, in_hull, psi_admissible, rank_interval, tmax
from .terms import (
    I,
    ONE,
    TOP,
    ZERO,
    AlephSucc,
    Fc1,
    Mu,
    Psi,
    RegTerm,
    Sum,
    Term,
    TermError,
    TopI,
    Var,
    nat,
    reg_as_term,
    render_reg,
    render_term,
)
from .universe import truth


class TransformError(ValueError):
    """A transformation's precondition failed or its result did not check."""

    def __init__(self, msg: str, stage: str | None = None):
        super().__init__(f"[{stage}] {msg}" if stage else msg)
        self.msg = msg
        self.stage = stage


# ---------------------------------------------------------------- shared helpers


def _require_ok(d: Derivation, n: int, what: str) -> None:
    rep = check(d, n)
    if not rep.ok:
        raise TransformError(f"{what} does not check: {rep}")


def _verified(d: Derivation, n: int, what: str) -> Derivation:
    rep: CheckReport = check(d, n)
    if not rep.ok:
        raise TransformError(f"{what} produced an invalid derivation: {rep}")
    return d


def _lt(a, b) -> bool:
    return cmp_int(a, b) < 0


def _le(a, b) -> bool:
    return cmp_int(a, b) <= 0


def _tmin(a, b):
    return a if _le(a, b) else b


def _kmin(a: RegTerm, b: RegTerm) -> RegTerm:
    return a if _le(reg_as_term(a), reg_as_term(b)) else b


def _with_index(op: Operator, iota) -> Operator:
    return Operator(op.gamma, op.theta | {iota})


def _join(a: Operator, b: Operator) -> Operator:
    return Operator(tmax(a.gamma, b.gamma), a.theta | b.theta)


def _mentions(d: Derivation, f: Formula) -> bool:
    return any(f in x.seq for x in nodes(d))


def _or_height(iota, child_bound, kappa: RegTerm):
    """Least height for a disjunction step with this witness over a premise."""
    h = succ(child_bound)
    k = reg_as_term(kappa)
    if isinstance(iota, Mu):
        iv = rank_interval(iota)
        return h if _le(k, iv.lo) else tmax(h, iv.hi)
    r = rk_l(iota)
    return tmax(h, succ(r)) if _lt(r, k) else h


def _map_tree(d: Derivation, fn) -> Derivation:
    return fn(d.relabel(children=tuple(_map_tree(c, fn) for c in d.children)))


def _lift_gamma(d: Derivation) -> Derivation:
    """Raise each operator index to at least the largest index among its premises."""
    def fix(x: Derivation) -> Derivation:
        g = tmax(x.op.gamma, *(c.op.gamma for c in x.children))
        return x if g == x.op.gamma else x.relabel(op=Operator(g, x.op.theta))
    return _map_tree(d, fix)


def _raise_op(d: Derivation, op: Operator) -> Derivation:
    """Enlarge every operator of the tree to contain op (heights and rules unchanged)."""
    def fix(x: Derivation) -> Derivation:
        return x.relabel(op=Operator(tmax(x.op.gamma, op.gamma), x.op.theta | op.theta))
    return _map_tree(d, fix)


def _cap_cutrank(d: Derivation, r) -> Derivation:
    return _map_tree(d, lambda x: x.relabel(cutrank=_tmin(x.cutrank, r)))


def _cut_ranks(d: Derivation) -> set:
    out = set()
    for x in nodes(d):
        if isinstance(x.rule, RuleCut):
            try:
                out.add(rk(x.rule.formula))
            except RankAmbiguous as e:
                raise TransformError(f"cut formula without a determined rank: {e}")
    return out


def axiom_shape(C: Formula):
    """("P", lam, alpha) or ("PI", alpha) when C is an instance of the reflection axioms."""
    if not (isinstance(C, BQ) and C.quant == "ex"):
        return None
    body = C.body
    if isinstance(body, BQ) and isinstance(body.body, And):
        m = body.body.left
        if isinstance(m, Lit) and m.pred == "mem" and isinstance(C.bound, Term):
            cand = p_axiom_formula(C.bound, m.args[0])
            if canonical(cand) == canonical(C):
                return ("P", C.bound, m.args[0])
    if isinstance(body, And) and isinstance(body.left, Lit) and body.left.pred == "mem":
        alpha = body.left.args[0]
        if canonical(pi_axiom_formula(alpha)) == canonical(C):
            return ("PI", alpha)
    return None


# ---------------------------------------------------------------- tautology and completeness


def _prove(A: Formula, seq: frozenset, op: Operator, kappa: RegTerm, n: int) -> Derivation:
    """Truth-guided derivation of seq (which contains the true sentence A)."""
    dec = decompose(A, n)
    if dec.kind == "and":
        if dec.space == "symbolic":
            raise TransformError(f"cannot enumerate the conjuncts of {A}")
        kids = []
        for iota, B in dec.branches():
            kids.append(_prove(B, seq | {B}, _with_index(op, iota), kappa, n))
        h = tmax(*(succ(k.bound) for k in kids)) if kids else ZERO
        return Derivation(op, kappa, h, ZERO, seq, RuleAnd(A), tuple(kids))
    if dec.kind == "or" and dec.space != "symbolic":
        for iota, B in dec.branches():
            if truth(B, n) is True:
                kid = _prove(B, seq | {B}, op, kappa, n)
                h = _or_height(iota, kid.bound, kappa)
                return Derivation(op, kappa, h, ZERO, seq, RuleOr(A, iota), (kid,))
    raise TransformError(f"no true instance found for {A}")


def _taut(A: Formula, seq: frozenset, op: Operator, kappa: RegTerm, n: int) -> Derivation:
    """Derivation of seq, which contains both A and its negation."""
    t = truth(A, n)
    if t is not None:
        return _prove(A if t else neg(A), seq, op, kappa, n)
    dec = decompose(A, n)
    if dec.kind == "unknown":
        return Derivation(op, kappa, ZERO, ZERO, seq, RuleAnd(A))
    P, N = (A, neg(A)) if dec.kind == "or" else (neg(A), A)
    dec_p, dec_n = decompose(P, n), decompose(N, n)
    if dec_n.space == "symbolic":
        raise TransformError(f"cannot enumerate the conjuncts of {N}")
    kids = []
    for iota, BN in dec_n.branches():
        BP = dec_p.pick(iota)
        if BP != neg(BN):
            raise TransformError("dual decompositions disagree")
        cop = _with_index(op, iota)
        inner = _taut(BP, seq | {BN, BP}, cop, kappa, n)
        h = _or_height(iota, inner.bound, kappa)
        kids.append(Derivation(cop, kappa, h, ZERO, seq | {BN}, RuleOr(P, iota), (inner,)))
    h = tmax(*(succ(k.bound) for k in kids)) if kids else ZERO
    return Derivation(op, kappa, h, ZERO, seq, RuleAnd(N), tuple(kids))


def prove_true(
    A: Formula, Gamma=(), op: Operator | None = None, kappa: RegTerm = TOP, n: int = 2
) -> Derivation:
    """Cut-free derivation of Gamma, A of least height, for a true enumerable sentence A."""
    if truth(A, n) is not True:
        raise TransformError("formula is not known to be true", "prove")
    d = _prove(A, frozenset(Gamma) | {A}, op or Operator(), kappa, n)
    return _verified(d, n, "prove")


def build_tautology(
    Gamma, A: Formula, op: Operator | None = None, kappa: RegTerm = TOP, n: int = 2
) -> Derivation:
    """Cut-free derivation of Gamma, A, not-A with bound exactly rk(A) + rk(A)."""
    op = op or Operator()
    if not is_sentence(A):
        raise TransformError("tautology needs a sentence", "tautology")
    seq = frozenset(Gamma) | {A, neg(A)}
    try:
        d = _taut(A, seq, op, kappa, n)
        r = rk(A)
    except (FormulaError, TermError) as e:
        raise TransformError(str(e), "tautology")
    target = add(r, r)
    if not _le(d.bound, target):
        raise TransformError(f"derivation height {render_term(d.bound)} exceeds {render_term(target)}", "tautology")
    return _verified(d.relabel(bound=target), n, "tautology")


def build_completeness(
    A: Formula, op: Operator | None = None, kappa: RegTerm = TOP, n: int = 2
) -> Derivation:
    """Cut-free derivation of a true Sigma_n or Pi_n sentence (or literal) with bound rk(A) + rk(A)."""
    op = op or Operator()
    if not is_sentence(A):
        raise TransformError("completeness needs a sentence", "completeness")
    if not (isinstance(A, Lit) or in_sigma(A, n) or in_sigma(neg(A), n)):
        raise TransformError("formula is neither Sigma_n nor Pi_n", "completeness")
    t = truth(A, n)
    if t is None:
        raise TransformError("formula is not evaluable", "completeness")
    if not t:
        raise TransformError("formula is false", "completeness")
    d = _prove(A, frozenset({A}), op, kappa, n)
    r = rk(A)
    target = add(r, r)
    if not _le(d.bound, target):
        raise TransformError("derivation height exceeds the target bound", "completeness")
    return _verified(d.relabel(bound=target), n, "completeness")


# ---------------------------------------------------------------- false-formula elimination


def eliminate_false(d: Derivation, A: Formula, n: int = 2) -> Derivation:
    """Remove a false Sigma_n sentence from the end-sequent (and its ancestors)."""
    _require_ok(d, n, "input")
    if A not in d.seq:
        raise TransformError("formula not in the end-sequent", "eliminate")
    if not in_sigma(A, n):
        raise TransformError("formula is not Sigma_n", "eliminate")
    if not d.seq - {A}:
        raise TransformError("nothing would remain of the end-sequent", "eliminate")
    t = truth(A, n)
    if t is None:
        raise TransformError("formula is not evaluable", "eliminate")
    if t:
        raise TransformError("formula is true", "eliminate")
    return _verified(_Eliminator(n).run(d, frozenset({A})), n, "eliminate")


class _Eliminator:
    def __init__(self, n: int):
        self.n = n

    def false(self, f: Formula) -> Formula:
        if truth(f, self.n) is not False:
            raise TransformError(f"expected a false formula, got {f}", "eliminate")
        return f

    def run(self, d: Derivation, S: frozenset) -> Derivation:
        S = S & d.seq
        if not S:
            return d
        seq = d.seq - S
        rule = d.rule
        main = getattr(rule, "main", None)
        if main in S:
            dec = decompose(main, self.n)
            if isinstance(rule, RuleOr):
                B = self.false(dec.pick(rule.iota))
                child = d.children[0]
            else:
                for (iota, B), child in zip(dec.branches(), d.children):
                    if truth(B, self.n) is False:
                        break
                else:
                    raise TransformError("conjunction has no false instance", "eliminate")
            inner = self.run(child, S | {B})
            return inner.relabel(seq=seq, bound=d.bound, op=d.op, kappa=d.kappa, cutrank=d.cutrank)
        if isinstance(rule, (RuleF1, RuleFN)):
            lam = term_as_reg(rule.lam) if isinstance(rule, RuleF1) else TOP
            pre = {g for g in rule.Gamma0 if mostowski_apply(g, rule.x, lam, self.n) in S}
            for g in pre:
                self.false(g)
            S_child = S | pre
            child = self.run(d.children[0], S_child)
            rule = type(rule)(*_f_fields(rule, rule.Lambda - S, rule.Gamma0 - pre))
            return d.relabel(seq=seq, rule=rule, children=(child,))
        return d.relabel(seq=seq, children=tuple(self.run(c, S) for c in d.children))


def _f_fields(rule, Lambda, Gamma0) -> tuple:
    if isinstance(rule, RuleF1):
        return (rule.x, rule.lam, frozenset(Lambda), frozenset(Gamma0))
    return (rule.x, frozenset(Lambda), frozenset(Gamma0))


def _f_reg(rule) -> RegTerm:
    return term_as_reg(rule.lam) if isinstance(rule, RuleF1) else TOP


# ---------------------------------------------------------------- inversion


def invert(d: Derivation, target: Formula, iota=None, n: int = 2) -> Derivation:
    """Replace a conjunctive (or singly witnessed) formula by one of its instances."""
    _require_ok(d, n, "input")
    if target not in d.seq:
        raise TransformError("formula not in the end-sequent", "invert")
    dec = decompose(target, n)
    if dec.space == "singleton":
        if iota is not None and iota != dec.witnesses[0]:
            raise TransformError("index differs from the computed witness", "invert")
        iota = dec.witnesses[0]
    elif dec.kind == "and":
        if iota is None:
            raise TransformError("conjunction inversion needs an index", "invert")
        if dec.space == "finite" and iota not in dec.witnesses:
            raise TransformError("index outside the conjunction's index set", "invert")
    else:
        raise TransformError("only conjunctive or singly witnessed formulas invert", "invert")
    out = _Inverter(n).run(d, target, iota)
    return _verified(out, n, "invert")


class _Inverter:
    def __init__(self, n: int):
        self.n = n

    def run(self, d: Derivation, T: Formula, iota) -> Derivation:
        if T not in d.seq:
            return d
        dec = decompose(T, self.n)
        B = dec.pick(iota)
        seq = (d.seq - {T}) | {B}
        rule = d.rule
        if getattr(rule, "main", None) == T:
            if isinstance(rule, RuleAnd):
                if dec.space == "symbolic" or iota not in dec.witnesses:
                    raise TransformError("cannot locate the inverted premise", "invert")
                child = d.children[dec.witnesses.index(iota)]
            else:
                if rule.iota != iota:
                    raise TransformError("disjunction used a different witness", "invert")
                child = d.children[0]
            inner = self.run(child, T, iota)
            return inner.relabel(seq=seq, bound=d.bound, op=d.op, kappa=d.kappa, cutrank=d.cutrank)
        if isinstance(rule, (RuleF1, RuleFN)):
            lam = _f_reg(rule)
            child = d.children[0]
            Lambda, Gamma0 = set(rule.Lambda), set(rule.Gamma0)
            if T in Lambda:
                Lambda = (Lambda - {T}) | {B}
                child = self.run(child, T, iota)
            for g in rule.Gamma0:
                if mostowski_apply(g, rule.x, lam, self.n) != T:
                    continue
                dg = decompose(g, self.n)
                cands = dg.witnesses if dg.space != "symbolic" else ()
                g_iota = next(
                    (w for w in cands if mostowski_apply(dg.pick(w), rule.x, lam, self.n) == B),
                    None,
                )
                if g_iota is None:
                    raise TransformError("collapsed instance does not match the premise", "invert")
                Gamma0 = (Gamma0 - {g}) | {dg.pick(g_iota)}
                child = self.run(child, g, g_iota)
            rule = type(rule)(*_f_fields(rule, Lambda, Gamma0))
            return d.relabel(seq=seq, rule=rule, children=(child,))
        return d.relabel(seq=seq, children=tuple(self.run(c, T, iota) for c in d.children))


# ---------------------------------------------------------------- cut reduction


def reduce_cut(dleft: Derivation, dright: Derivation, C: Formula, c, n: int = 2) -> Derivation:
    """Combine derivations of (Delta, not-C) and (Gamma, C) into one of (Delta, Gamma).

    The result has bound a + b and cut rank c; C must be disjunctive with rk(C) <= c.
    """
    _require_ok(dleft, n, "left input")
    _require_ok(dright, n, "right input")
    if axiom_shape(C) or axiom_shape(neg(C)):
        raise TransformError("reflection-axiom formulas are reduced separately", "reduce")
    try:
        r = rk(C)
    except RankAmbiguous as e:
        raise TransformError(str(e), "reduce")
    if decompose(C, n).kind != "or":
        raise TransformError("cut formula must be disjunctive (swap the premises)", "reduce")
    if not _le(r, c):
        raise TransformError("cut formula rank exceeds the target cut rank", "reduce")
    for x in (dleft, dright):
        if not _le(x.cutrank, c):
            raise TransformError("input cut rank exceeds the target cut rank", "reduce")
    if neg(C) not in dleft.seq or C not in dright.seq:
        raise TransformError("premises do not carry the cut formula", "reduce")
    out = _Reducer(dleft, C, c, n).run(dright)
    return _verified(out, n, "reduce")


class _Reducer:
    def __init__(self, dl: Derivation, C: Formula, c, n: int):
        self.dl, self.C, self.c, self.n = dl, C, c, n
        self.nC = neg(C)
        self.delta = dl.seq - {self.nC}
        self._inv_cache: dict = {}

    def inverted_left(self, iota) -> Derivation:
        if iota not in self._inv_cache:
            self._inv_cache[iota] = _Inverter(self.n).run(self.dl, self.nC, iota)
        return self._inv_cache[iota]

    def run(self, dr: Derivation) -> Derivation:
        C, dl = self.C, self.dl
        bound = add(dl.bound, dr.bound)
        seq = (dr.seq - {C}) | self.delta
        op = _join(dr.op, dl.op)
        kappa = _kmin(dr.kappa, dl.kappa)
        if not _mentions(dr, C):
            return dr.relabel(seq=seq, bound=bound, op=op, kappa=kappa, cutrank=self.c)
        rule = dr.rule
        if isinstance(rule, RuleOr) and rule.main == C:
            inner = self.run(dr.children[0]) if C in dr.children[0].seq else dr.children[0]
            B = decompose(C, self.n).pick(rule.iota)
            left = self.inverted_left(rule.iota)
            if neg(B) not in left.seq:
                raise TransformError("inverted premise lacks the negated instance", "reduce")
            return Derivation(op, kappa, bound, self.c, seq, RuleCut(B), (left, inner))
        if isinstance(rule, (RuleF1, RuleFN)):
            return self.run_f(dr, rule, bound, seq, op, kappa)
        kids = tuple(self.run(k) if C in k.seq else k for k in dr.children)
        return Derivation(op, kappa, bound, self.c, seq, rule, kids)

    def run_f(self, dr, rule, bound, seq, op, kappa) -> Derivation:
        C, n = self.C, self.n
        lam = _f_reg(rule)
        child = dr.children[0]
        pre = [g for g in rule.Gamma0 if mostowski_apply(g, rule.x, lam, n) == C and g in child.seq]
        if not pre:
            kid = self.run(child) if C in child.seq else child
            Lambda = (rule.Lambda - {C}) | self.delta
            new_rule = type(rule)(*_f_fields(rule, Lambda, rule.Gamma0))
            return Derivation(op, kappa, bound, self.c, seq, new_rule, (kid,))
        # C is produced by the collapse rule: transfer the cut through it
        g = pre[0]
        dec_c, dec_g = decompose(C, n), decompose(g, n)
        if dec_c.space != "singleton" or dec_g.space != "singleton":
            raise TransformError("collapsed cut formula without a single witness", "reduce")
        iota, g_iota = dec_c.witnesses[0], dec_g.witnesses[0]
        CB, gB = dec_c.pick(iota), dec_g.pick(g_iota)
        if mostowski_apply(gB, rule.x, lam, n) != CB:
            raise TransformError("collapsed instance does not match the premise", "reduce")
        kid = _Inverter(n).run(child, g, g_iota)
        Lambda = set(rule.Lambda)
        if C in kid.seq:
            kid = self.run(kid)
            Lambda = (Lambda - {C}) | self.delta
        Gamma0 = (set(rule.Gamma0) - {g}) | {gB}
        fseq = (dr.seq - {C}) | {CB} | (self.delta if C in child.seq else frozenset())
        fnode = Derivation(
            _join(dr.op, kid.op), kappa, succ(kid.bound), self.c, frozenset(fseq),
            type(rule)(*_f_fields(rule, Lambda, Gamma0)), (kid,),
        )
        left = self.inverted_left(iota)
        if not (_lt(left.bound, bound) and _lt(fnode.bound, bound)):
            raise TransformError("no height budget to move the cut across a collapse rule", "reduce")
        return Derivation(op, kappa, bound, self.c, seq, RuleCut(CB), (left, fnode))


# ---------------------------------------------------------------- reflection-axiom reduction


def reduce_axiom_P(d: Derivation, C: Formula, beta, n: int = 2) -> Derivation:
    """Remove the negation of a reflection-axiom formula from the end-sequent.

    The negation is instantiated at the collapse of beta (and its collapsing
    constant), turned into the false literals it reduces to, and those are
    eliminated. The operator index rises to beta + 1.
    """
    _require_ok(d, n, "input")
    shape = axiom_shape(C)
    if shape is None:
        raise TransformError("not a reflection-axiom formula", "axiom")
    nC = neg(C)
    if nC not in d.seq:
        raise TransformError("negated axiom formula not in the end-sequent", "axiom")
    if not in_hull(beta, beta, ZERO):
        raise TransformError("beta is not in its own hull", "axiom")
    if not _le(d.op.gamma, beta):
        raise TransformError("operator index exceeds beta", "axiom")
    if shape[0] == "P":
        _, lam, alpha = shape
        k = term_as_reg(lam)
        if not isinstance(k, AlephSucc):
            raise TransformError("axiom regular is not a successor cardinal", "axiom")
        iota = Psi(k, beta)
        if not psi_admissible(k, beta):
            raise TransformError("collapse of beta is not a normal term", "axiom")
        nu = Fc1(iota, k)
        if not p_holds(lam, iota, nu):
            raise TransformError("reflection predicate fails at the instance", "axiom")
        instance = {NotMem(alpha, iota), Mem(lam, lam)}
    else:
        _, alpha = shape
        iota = Psi(TOP, beta)
        if not (psi_admissible(TOP, beta) and pi_holds(iota)):
            raise TransformError("collapse of beta is not a normal term", "axiom")
        instance = {NotMem(alpha, iota), Mem(iota, iota)}
    if not _lt(alpha, iota):
        raise TransformError("axiom parameter is not below the instance", "axiom")
    for f in instance:
        if truth(f, n) is not False:
            raise TransformError("instance literal is not false", "axiom")
    g = succ(beta)

    def strip(x: Derivation) -> Derivation:
        if getattr(x.rule, "main", None) == nC:
            raise TransformError("negated axiom formula used as a main formula", "axiom")
        rule = x.rule
        if isinstance(rule, (RuleF1, RuleFN)):
            rule = type(rule)(*_f_fields(rule, rule.Lambda - {nC}, rule.Gamma0))
        return x.relabel(
            seq=x.seq - {nC}, rule=rule, op=Operator(tmax(x.op.gamma, g), x.op.theta)
        )

    out = _map_tree(d, strip)
    return _verified(out, n, "axiom")


# ---------------------------------------------------------------- predicative cut elimination


def _trailing(t):
    """Split t as base + j with j finite."""
    if t == ONE:
        return ZERO, 1
    if isinstance(t, Sum):
        ps = list(t.parts)
        j = 0
        while ps and ps[-1] == ONE:
            ps.pop()
            j += 1
        base = ZERO if not ps else (ps[0] if len(ps) == 1 else Sum(tuple(ps)))
        return base, j
    return t, 0


def _regular(t) -> bool:
    return isinstance(t, Term) and isinstance(term_as_reg(t), AlephSucc)


def _least_regular_at_least(t):
    if not _lt(t, I):
        return None
    if _regular(t):
        return t
    return reg_as_term(next_regular(t))


def _least_regular_above(t):
    if not _lt(t, I):
        return None
    return reg_as_term(next_regular(t))


def _critical_hit(c, e, offset: int) -> bool:
    """Some regular lam below I has c <= lam + offset < e."""
    base, j = _trailing(c)
    if _regular(base) and j <= offset:
        lam = base
    elif _regular(base):
        lam = _least_regular_above(base)
    else:
        lam = _least_regular_at_least(base)
    if lam is None:
        return False
    return _lt(add(lam, nat(offset)), e)


def _window_hits_critical(c, e) -> bool:
    if _le(c, I) and _lt(I, e):
        return True
    return _critical_hit(c, e, 1) or _critical_hit(c, e, 2)


def _window_hits_regular(c, e) -> bool:
    if _le(c, I) and _lt(I, e):
        return True
    lam = _least_regular_at_least(c)
    return lam is not None and _lt(lam, e)


def is_critical_rank(c) -> bool:
    if c == I:
        return True
    base, j = _trailing(c)
    return j in (1, 2) and _regular(base)


def _elim_rank(d: Derivation, r, n: int) -> Derivation:
    """Remove every cut of rank r; heights b become w^b."""
    kids = tuple(_elim_rank(c, r, n) for c in d.children)
    h = omega_pow(d.bound)
    rule = d.rule
    if isinstance(rule, RuleCut) and rk(rule.formula) == r:
        left, right = kids
        C = rule.formula
        if axiom_shape(C) or axiom_shape(neg(C)):
            i = 0 if axiom_shape(C) else 1
            prem, ax = kids[i], C if i == 0 else neg(C)
            beta = add(d.op.gamma, d.children[i].bound)
            out = reduce_axiom_P(prem, ax, beta, n)
        else:
            if decompose(C, n).kind != "or":
                C, left, right = neg(C), right, left
            out = reduce_cut(left, right, C, r, n)
        return out.relabel(seq=d.seq, bound=h, cutrank=r)
    return d.relabel(bound=h, cutrank=_tmin(d.cutrank, r), children=kids)


def pred_cut_elim(d: Derivation, a, c, n: int = 2, part: int = 1) -> Derivation:
    """Lower the cut rank from c + w^a to c.

    part 1: the window [c, c+w^a) holds no critical rank (lam+1, lam+2, I);
            bound b becomes phi(a, b), operator unchanged.
    part 2: a = 0 and c = lam+1 or lam+2; reflection-axiom cuts are reduced;
            bound w^b, operator index gamma + b.
    part 3: a = 0 and c = I; as part 2 for the I-axiom.
    part 4: the window holds no regular and not I; bound phi(a, b),
            operator index gamma + phi(a, b).
    """
    _require_ok(d, n, "input")
    e = add(c, omega_pow(a))
    if not _le(d.cutrank, e):
        raise TransformError("input cut rank exceeds the window", "predce")
    if part == 1:
        if _window_hits_critical(c, e):
            raise TransformError("window contains a critical rank", "predce")
    elif part == 2:
        if a != ZERO or c == I or not is_critical_rank(c):
            raise TransformError("part 2 needs a = 0 and c = lam+1 or lam+2", "predce")
    elif part == 3:
        if a != ZERO or c != I:
            raise TransformError("part 3 needs a = 0 and c = I", "predce")
    elif part == 4:
        if _window_hits_regular(c, e):
            raise TransformError("window contains a regular or I", "predce")
    else:
        raise TransformError(f"unknown part {part}", "predce")
    if not in_operator(a, d.op):
        raise TransformError("a is not controlled by the operator", "predce")
    b = d.bound
    out = d
    while True:
        # reductions leave cuts on smaller instances, so re-scan after each rank
        ranks = [r for r in _cut_ranks(out) if _le(c, r) and _lt(r, e)]
        if not ranks:
            break
        r = tmax(*ranks)
        out = _cap_cutrank(out, succ(r))
        out = _lift_gamma(_elim_rank(out, r, n))
    out = _cap_cutrank(out, c)
    gamma = d.op.gamma
    if part in (2, 3):
        new_bound, new_gamma = omega_pow(b), add(gamma, b)
    else:
        new_bound = veblen(a, b)
        new_gamma = add(gamma, new_bound) if part == 4 else gamma
    if not _le(out.bound, new_bound):
        raise TransformError("height after elimination exceeds the stated bound", "predce")
    if not _le(out.op.gamma, new_gamma):
        raise TransformError("operator index after elimination exceeds the stated index", "predce")
    out = out.relabel(bound=new_bound, op=Operator(new_gamma, out.op.theta))
    return _verified(out, n, "predce")


# ---------------------------------------------------------------- boundedness


def restrict(C: BQ, b) -> BQ:
    """The existential C with its quantifier range cut down to the level L_b."""
    return BQ("ex", C.var, Level(b), C.body)


def boundedness(d: Derivation, C: Formula, b, side: str = "exists", n: int = 2) -> Derivation:
    """Restrict an existential over a level L_lam (lam regular or I) to L_b.

    side="exists": C is in the end-sequent and the height is at most b.
    side="dual": the negation of C is in the end-sequent.
    """
    _require_ok(d, n, "input")
    if not (isinstance(C, BQ) and C.quant == "ex" and isinstance(C.bound, Level)):
        raise TransformError("formula must be an existential over a level", "bound")
    lam = C.bound.t
    if axiom_shape(C):
        raise TransformError("reflection-axiom formulas are not restricted", "bound")
    if not (lam == I or _regular(lam)) or rk(C) != lam:
        raise TransformError("formula rank must equal its regular level", "bound")
    if not (_lt(b, lam) and in_operator(b, d.op)):
        raise TransformError("b must be controlled and below the level", "bound")
    if side == "exists":
        T = C
        if C not in d.seq:
            raise TransformError("formula not in the end-sequent", "bound")
        if not _le(d.bound, b):
            raise TransformError("height exceeds b", "bound")
        if reg_as_term(d.kappa) != lam:
            raise TransformError("derivation regular must equal the level", "bound")
    elif side == "dual":
        T = neg(C)
        if T not in d.seq:
            raise TransformError("negated formula not in the end-sequent", "bound")
    else:
        raise TransformError(f"unknown side {side!r}", "bound")
    R = restrict(C, b)
    if side == "dual":
        R = neg(R)
    return _verified(_Restrictor(T, R, n).run(_raise_op(d, d.op)), n, "bound")


class _Restrictor:
    def __init__(self, T: Formula, R: Formula, n: int):
        self.T, self.R, self.n = T, R, n
        self.dec_t, self.dec_r = decompose(T, n), decompose(R, n)

    def run(self, d: Derivation) -> Derivation:
        T, R = self.T, self.R
        if T not in d.seq:
            return d
        seq = (d.seq - {T}) | {R}
        rule = d.rule
        kids = d.children
        if getattr(rule, "main", None) == T:
            if isinstance(rule, RuleOr):
                iota = rule.iota
                if self.dec_r.space == "singleton":
                    new_iota = self.dec_r.witnesses[0]
                    child = self.run(kids[0])
                    if new_iota != iota:
                        child = _replace_constant(child, iota, new_iota)
                    return d.relabel(seq=seq, rule=RuleOr(R, new_iota), children=(child,))
                return d.relabel(seq=seq, rule=RuleOr(R, iota), children=(self.run(kids[0]),))
            if self.dec_t.space != "singleton" or self.dec_r.space != "singleton":
                raise TransformError("cannot restrict a conjunction over its index set", "bound")
            iota, new_iota = self.dec_t.witnesses[0], self.dec_r.witnesses[0]
            child = self.run(kids[0])
            if new_iota != iota:
                child = _replace_constant(child, iota, new_iota)
            return d.relabel(seq=seq, rule=RuleAnd(R), children=(child,))
        if isinstance(rule, (RuleF1, RuleFN)):
            lam = _f_reg(rule)
            if any(mostowski_apply(g, rule.x, lam, self.n) == T for g in rule.Gamma0):
                raise TransformError("restricted formula is produced by a collapse rule", "bound")
            Lambda = rule.Lambda
            if T in Lambda:
                Lambda = (Lambda - {T}) | {R}
            rule = type(rule)(*_f_fields(rule, Lambda, rule.Gamma0))
        return d.relabel(seq=seq, rule=rule, children=tuple(self.run(k) for k in kids))


def _replace_in_term(t, old, new):
    if t == old:
        return new
    if isinstance(t, Mu):
        return Mu(t.var, _replace_in_bound(t.bound, old, new), _replace_in_formula(t.body, old, new))
    return t


def _replace_in_bound(b, old, new):
    if isinstance(b, Level):
        return Level(_replace_in_term(b.t, old, new))
    return _replace_in_term(b, old, new)


def _replace_in_formula(f: Formula, old, new) -> Formula:
    if isinstance(f, Lit):
        return Lit(f.pred, tuple(_replace_in_term(a, old, new) for a in f.args), f.pos)
    if isinstance(f, And):
        return And(_replace_in_formula(f.left, old, new), _replace_in_formula(f.right, old, new))
    if isinstance(f, Or):
        return Or(_replace_in_formula(f.left, old, new), _replace_in_formula(f.right, old, new))
    return BQ(f.quant, f.var, _replace_in_bound(f.bound, old, new), _replace_in_formula(f.body, old, new))


def _replace_constant(d: Derivation, old, new) -> Derivation:
    """Substitute one witness constant for another naming the same set."""
    rf = lambda f: _replace_in_formula(f, old, new)  # noqa: E731

    def fix(x: Derivation) -> Derivation:
        rule = x.rule
        if isinstance(rule, RuleOr):
            rule = RuleOr(rf(rule.main), _replace_in_term(rule.iota, old, new))
        elif isinstance(rule, RuleAnd):
            rule = RuleAnd(rf(rule.main))
        elif isinstance(rule, RuleCut):
            rule = RuleCut(rf(rule.formula))
        elif isinstance(rule, (RuleF1, RuleFN)):
            rule = type(rule)(*_f_fields(
                rule, {rf(f) for f in rule.Lambda}, {rf(f) for f in rule.Gamma0}))
        theta = frozenset(_replace_in_term(t, old, new) for t in x.op.theta)
        return x.relabel(seq=frozenset(rf(f) for f in x.seq), rule=rule,
                         op=Operator(x.op.gamma, theta))

    return _map_tree(d, fix)


# ---------------------------------------------------------------- collapsing


def _mu_of(sigma):
    """Cut-rank ceiling attached to sigma: sigma+1 for regulars and I, sigma otherwise."""
    if sigma == I or _regular(sigma):
        return succ(sigma)
    return sigma


def _below_regular(k: AlephSucc):
    """The cardinal just below a successor regular, and the cut rank used beneath it."""
    w = aleph(k.pred)
    return (succ(w), w) if _regular(w) else (w, w)


class _Collapser:
    def __init__(self, n: int):
        self.n = n
        self.cap = bound_cap(n)

    def hat(self, gamma, sigma, a):
        h = add(gamma, omega_pow(add(sigma, a)))
        if not _lt(h, self.cap):
            raise TransformError("collapsed height exceeds the cap", "collapse")
        return h

    def psi(self, lam: RegTerm, h) -> Psi:
        if not psi_admissible(lam, h):
            raise TransformError(
                f"cannot confirm psi({render_reg(lam)};{render_term(h)}) is a normal term", "collapse")
        return Psi(lam, h)

    def index_ok(self, iota, gamma, lam: RegTerm, theta) -> None:
        if isinstance(iota, HFSet):
            return
        seeds = frozenset(t for t in theta if isinstance(t, Term))
        if not in_hull(iota, gamma, self.psi(lam, gamma), seeds):
            raise TransformError("conjunction index is not in the collapsing hull", "collapse")

    def run(self, d: Derivation, lam: RegTerm, sigma, gamma, mu) -> Derivation:
        h = self.hat(gamma, sigma, d.bound)
        p = self.psi(lam, h)
        op = Operator(succ(h), d.op.theta)
        rule = d.rule
        if isinstance(rule, RuleCut):
            try:
                r = rk(rule.formula)
            except RankAmbiguous as e:
                raise TransformError(f"cut formula without a determined rank: {e}", "collapse")
            if _lt(r, reg_as_term(lam)):
                kids = tuple(self.run(k, lam, sigma, gamma, mu) for k in d.children)
                return Derivation(op, lam, p, p, d.seq, rule, kids)
            if not _lt(r, mu):
                raise TransformError("cut rank is not below the ceiling", "collapse")
            if r == I or _regular(r):
                inner = self.regular_cut(d, r, lam, sigma, gamma, mu)
            else:
                inner = self.nonregular_cut(d, r, lam, sigma, gamma, mu)
            if not _lt(inner.bound, p):
                raise TransformError("inner collapse did not land below the node's collapse", "collapse")
            return inner.relabel(bound=p, cutrank=p, op=op, kappa=lam, seq=d.seq)
        if isinstance(rule, RuleAnd):
            dec = decompose(rule.main, self.n)
            for w in dec.witnesses:
                self.index_ok(w, gamma, lam, d.op.theta)
        kids = tuple(self.run(k, lam, sigma, gamma, mu) for k in d.children)
        return Derivation(op, lam, p, p, d.seq, rule, kids)

    def nonregular_cut(self, d, r, lam, sigma, gamma, mu) -> Derivation:
        pik = next_regular(r)
        left, right = d.children
        a0 = tmax(left.bound, right.bound)
        lc = self.run(left.relabel(bound=a0), pik, sigma, gamma, mu)
        rc = self.run(right.relabel(bound=a0), pik, sigma, gamma, mu)
        h0 = self.hat(gamma, sigma, a0)
        beta = self.psi(pik, h0)
        mu1, sigma1 = _below_regular(pik)
        cut = Derivation(Operator(succ(h0), d.op.theta), pik, succ(beta), add(mu1, omega_pow(beta)),
                         d.seq, d.rule, (lc, rc))
        cut = _verified(cut, self.n, "collapse")
        elim = pred_cut_elim(cut, beta, mu1, self.n, part=4)
        return self.run(elim, lam, sigma1, elim.op.gamma, mu1)

    def regular_cut(self, d, r, lam, sigma, gamma, mu) -> Derivation:
        C = d.rule.formula
        left, right = d.children
        if axiom_shape(C) or axiom_shape(neg(C)):
            prem, ax = (left, C) if axiom_shape(C) else (right, neg(C))
            red = reduce_axiom_P(prem, ax, gamma, self.n)
            return self.run(red, lam, sigma, succ(gamma), mu)
        pik = term_as_reg(r) if r != I else TOP
        if C.__class__ is BQ and C.quant == "ex":
            E, pos, negp = C, right, left
        else:
            E, pos, negp = neg(C), left, right
        if not (isinstance(E, BQ) and isinstance(E.bound, Level) and E.bound.t == r):
            raise TransformError("regular-rank cut formula is not an existential over a level", "collapse")
        a0 = tmax(pos.bound, negp.bound)
        pc = self.run(pos.relabel(bound=a0), pik, sigma, gamma, mu)
        h0 = self.hat(gamma, sigma, a0)
        beta0 = pc.bound
        pb = boundedness(pc, E, beta0, "exists", self.n)
        lifted = negp.relabel(bound=a0, op=Operator(tmax(negp.op.gamma, succ(h0)), negp.op.theta))
        nb = boundedness(lifted, E, beta0, "dual", self.n)
        g1 = succ(h0)
        nc = self.run(nb, pik, sigma, g1, mu)
        h1 = self.hat(g1, sigma, a0)
        beta1 = nc.bound
        Er = restrict(E, beta0)
        cut = Derivation(Operator(succ(h1), d.op.theta), pik, succ(beta1), beta1, d.seq,
                         RuleCut(Er), (nc, pb))
        cut = _verified(cut, self.n, "collapse")
        if isinstance(pik, TopI):
            mu1, sigma1, beta2 = beta1, beta1, ZERO
        else:
            mu1, sigma1 = _below_regular(pik)
            beta2 = beta1
        elim = pred_cut_elim(cut, beta2, mu1, self.n, part=4)
        return self.run(elim, lam, sigma1, elim.op.gamma, mu1)


def collapse(d: Derivation, lam: RegTerm, sigma, Theta=None, n: int = 2) -> Derivation:
    """Collapse a derivation of a sequent of rank-limited formulas below lam.

    Input: operator (gamma, Theta), regular max(sigma, lam), height a, cut rank
    at most sigma+1 (sigma regular or I) or sigma (sigma a limit cardinal).
    Output: regular lam, height and cut rank psi(lam; gamma + w^(sigma+a)).
    """
    _require_ok(d, n, "input")
    lam_t = reg_as_term(lam)
    theta = d.op.theta
    if Theta is not None and frozenset(Theta) != theta:
        raise TransformError("Theta differs from the derivation's operator", "collapse")
    mu = _mu_of(sigma)
    need = tmax(sigma, lam_t)
    if _lt(reg_as_term(d.kappa), need):
        raise TransformError("derivation regular is below max(sigma, lam)", "collapse")
    if reg_as_term(d.kappa) != need:
        k = term_as_reg(need) if need != I else TOP
        if k is None:
            raise TransformError("max(sigma, lam) is not a regular", "collapse")
        d = weaken_kappa(d, k)
    if not _le(d.cutrank, mu):
        raise TransformError("cut rank exceeds the ceiling for sigma", "collapse")
    for f in d.seq:
        if not in_sigma_hat(f, lam_t, n):
            raise TransformError("end-sequent formula is not rank-limited below lam", "collapse")
    col = _Collapser(n)
    gamma = d.op.gamma
    bar = col.psi(lam, gamma)
    for t in theta:
        if isinstance(t, Term) and not in_hull(t, gamma, bar):
            raise TransformError("Theta is not inside the collapsing hull", "collapse")
    out = col.run(d, lam, sigma, gamma, mu)
    return _verified(out, n, "collapse")


# ---------------------------------------------------------------- pipeline


def pipeline_complete_ce(d: Derivation, m: int, k: int, n: int = 2) -> tuple:
    """Full cut elimination for a derivation with bound I*2+k and cut rank I+m.

    Returns the final derivation and the witness bound phi(beta, beta) with
    beta = psi(w1; w_m(I*3+k)).
    """
    def stage(name, fn, *args, **kw):
        try:
            return fn(*args, **kw)
        except TransformError as e:
            raise TransformError(e.msg, name) from e

    _require_ok(d, n, "input")
    if m < 1 or k < 0:
        raise TransformError("need m >= 1 and k >= 0", "pipeline")
    if not (d.op.gamma == ZERO and isinstance(d.kappa, TopI)):
        raise TransformError("input must use operator index 0 and regular I", "pipeline")
    start = add(times_nat(I, 2), nat(k))
    if not _le(d.bound, start) or not _le(d.cutrank, add(I, nat(m))):
        raise TransformError("input bound or cut rank too large", "pipeline")
    w1 = AlephSucc(ZERO)
    for f in d.seq:
        if not in_sigma_hat(f, reg_as_term(w1), n):
            raise TransformError("end-sequent is not rank-limited below w1", "pipeline")
    d = d.relabel(bound=start)
    for j in range(m - 1, 0, -1):
        d = stage("predce", pred_cut_elim, d, ZERO, add(I, nat(j)), n)
    padded = omega_tower(m - 1, add(times_nat(I, 3), nat(k))) if m > 1 else d.bound
    if not _le(d.bound, padded):
        raise TransformError("bound after the first stage is too large", "pipeline")
    d = d.relabel(bound=padded)
    d = stage("collapse", collapse, d, w1, I, None, n)
    beta = Psi(w1, omega_tower(m, add(times_nat(I, 3), nat(k))))
    if d.bound != beta:
        raise TransformError(f"collapse gave {render_term(d.bound)}", "pipeline")
    d = stage("predce", pred_cut_elim, d, beta, ZERO, n)
    wb = veblen(beta, beta)
    for C in sorted(d.seq, key=str):
        if isinstance(C, BQ) and C.quant == "ex" and C.bound == Level(reg_as_term(w1)) and rk(C) == reg_as_term(w1):
            d = stage("bound", boundedness, d, C, wb, "exists", n)
    return d, wb


# ---------------------------------------------------------------- sample inputs


def toy_pipeline_input(m: int = 2, k: int = 1, n: int = 2) -> Derivation:
    """A small derivation with one cut of rank I+1, suitable for the full pipeline.

    End-sequent: ex x in L_w1 . ({} in x and x in {{{}}}).
    """
    if m < 2:
        raise ValueError("the sample cut needs cut rank at least I+2")
    x = Var("x")
    s1 = HFSet(frozenset({EMPTY}))
    s2 = HFSet(frozenset({s1}))
    A = BQ("ex", "x", Level(reg_as_term(AlephSucc(ZERO))), And(Mem(EMPTY, x), Mem(x, s2)))
    D = BQ("ex", "x", Level(I), Mem(x, x))
    M = Mem(EMPTY, s1)
    C = Or(D, M)
    op = Operator()
    right_leaf = Derivation(op, TOP, ZERO, ZERO, frozenset({A, C, M}), RuleAnd(M))
    right = Derivation(op, TOP, nat(2), ZERO, frozenset({A, C}), RuleOr(C, ONE), (right_leaf,))
    nC = neg(C)
    base = frozenset({A, nC})
    nD = neg(D)
    dec = decompose(nD, n)
    (w, B), = dec.branches()
    wop = _with_index(_with_index(op, ZERO), w)
    s0 = base | {nD, B}
    leaf = Derivation(wop, TOP, ZERO, ZERO, s0 | {NotMem(w, w)}, RuleAnd(NotMem(w, w)))
    orn = Derivation(wop, TOP, nat(2), ZERO, s0, RuleOr(B, ONE), (leaf,))
    k0 = Derivation(_with_index(op, ZERO), TOP, nat(3), ZERO, base | {nD}, RuleAnd(nD), (orn,))
    k1 = _prove(A, base | {neg(M)}, _with_index(op, ONE), TOP, n)
    left_h = succ(tmax(k0.bound, k1.bound))
    left = Derivation(op, TOP, left_h, ZERO, base, RuleAnd(nC), (k0, k1))
    root = Derivation(op, TOP, add(times_nat(I, 2), nat(k)), add(I, nat(m)), frozenset({A}),
                      RuleCut(C), (left, right))
    return _verified(root, n, "sample")
