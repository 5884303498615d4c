"""Negation-normal-form sentences, their measures and disjunctive/conjunctive shapes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .arith import add, omega_times, term_as_reg, veblen, omega_pow
from .hf import EMPTY, HFSet, render_hf, sorted_elems, universe, vn_rank
from .order import cmp_int, is_normal, tmax
from .terms import (
    ONE,
    ZERO,
    AlephSucc,
    BigI,
    Fc1,
    FcN,
    Mu,
    Phi,
    Pow,
    Psi,
    RegTerm,
    Sum,
    Term,
    TermError,
    TopI,
    Var,
    as_nat,
    nat,
    reg_as_term,
    render_term,
)

PREDICATES = {"mem": 2, "reg": 1, "P": 3, "PI": 1}


class FormulaError(ValueError):
    pass


class RankAmbiguous(FormulaError):
    """A rank depends on the unknown constructible rank of a witness constant."""


class DomainViolation(FormulaError):
    """A formula lies outside the domain of a Mostowski collapse."""


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return render_formula(self)


@dataclass(frozen=True, slots=True)
class Level:
    """The constructible level L_t; Level(I) is the whole universe."""

    t: Term


@dataclass(frozen=True, slots=True)
class Lit(Formula):
    pred: str
    args: tuple
    pos: bool = True


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class BQ(Formula):
    quant: str  # "ex" or "all"
    var: str
    bound: object
    body: Formula


def Mem(a, b) -> Lit:
    return Lit("mem", (a, b), True)


def NotMem(a, b) -> Lit:
    return Lit("mem", (a, b), False)


def conj(*fs: Formula) -> Formula:
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = And(f, out)
    return out


def disj(*fs: Formula) -> Formula:
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = Or(f, out)
    return out


# ---------------------------------------------------------------- rendering


def render_arg(a) -> str:
    if isinstance(a, HFSet):
        return render_hf(a)
    return render_term(a)


def render_bound(b) -> str:
    if isinstance(b, Level):
        return f"L({render_term(b.t)})"
    return render_arg(b)


def render_formula(f: Formula) -> str:
    if isinstance(f, Lit):
        body = f"{f.pred}({','.join(render_arg(a) for a in f.args)})"
        return body if f.pos else "~" + body
    if isinstance(f, And):
        return f"and({render_formula(f.left)},{render_formula(f.right)})"
    if isinstance(f, Or):
        return f"or({render_formula(f.left)},{render_formula(f.right)})"
    if isinstance(f, BQ):
        return f"{f.quant} {f.var} in {render_bound(f.bound)} . {render_formula(f.body)}"
    raise FormulaError(f"not a formula: {f!r}")


def formula_size(f) -> int:
    from .terms import size

    if isinstance(f, Lit):
        return 1 + sum(size(a) if isinstance(a, Term) else 1 for a in f.args)
    if isinstance(f, (And, Or)):
        return 1 + formula_size(f.left) + formula_size(f.right)
    if isinstance(f, BQ):
        return 2 + formula_size(f.body)
    return 1


def depth(f: Formula) -> int:
    if isinstance(f, Lit):
        return 0
    if isinstance(f, (And, Or)):
        return 1 + max(depth(f.left), depth(f.right))
    return 1 + depth(f.body)


# ---------------------------------------------------------------- syntax utilities


def neg(f: Formula) -> Formula:
    if isinstance(f, Lit):
        return Lit(f.pred, f.args, not f.pos)
    if isinstance(f, And):
        return Or(neg(f.left), neg(f.right))
    if isinstance(f, Or):
        return And(neg(f.left), neg(f.right))
    if isinstance(f, BQ):
        return BQ("all" if f.quant == "ex" else "ex", f.var, f.bound, neg(f.body))
    raise FormulaError(f"not a formula: {f!r}")


def _subst_term(t, var: str, value):
    if isinstance(t, Var):
        return value if t.name == var else t
    if isinstance(t, Mu):
        if t.var == var:
            return Mu(t.var, _subst_bound(t.bound, var, value), t.body)
        return Mu(t.var, _subst_bound(t.bound, var, value), subst(t.body, var, value))
    return t


def _subst_bound(b, var: str, value):
    if isinstance(b, Level):
        return b
    return _subst_term(b, var, value)


def subst(f: Formula, var: str, value) -> Formula:
    """Replace free occurrences of ``var`` by a constant."""
    if isinstance(f, Lit):
        return Lit(f.pred, tuple(_subst_term(a, var, value) for a in f.args), f.pos)
    if isinstance(f, And):
        return And(subst(f.left, var, value), subst(f.right, var, value))
    if isinstance(f, Or):
        return Or(subst(f.left, var, value), subst(f.right, var, value))
    if isinstance(f, BQ):
        bound = _subst_bound(f.bound, var, value)
        body = f.body if f.var == var else subst(f.body, var, value)
        return BQ(f.quant, f.var, bound, body)
    raise FormulaError(f"not a formula: {f!r}")


def free_vars(f) -> set:
    if isinstance(f, Var):
        return {f.name}
    if isinstance(f, Mu):
        return free_vars(f.bound) | (free_vars(f.body) - {f.var})
    if isinstance(f, (HFSet, Level)) or isinstance(f, Term):
        return set()
    if isinstance(f, Lit):
        return set().union(*(free_vars(a) for a in f.args))
    if isinstance(f, (And, Or)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, BQ):
        return free_vars(f.bound) | (free_vars(f.body) - {f.var})
    return set()


def is_sentence(f: Formula) -> bool:
    return not free_vars(f)


# ---------------------------------------------------------------- constants


def _arg_constants(a) -> set:
    if isinstance(a, Var):
        return set()
    return {a}


def k_set(f: Formula) -> set:
    """Constants occurring in f, including quantifier bounds, plus the empty set."""
    out = {EMPTY}
    _collect(f, out, bounds_only=False)
    return out


def qk_set(f: Formula) -> set:
    out = {EMPTY}
    _collect(f, out, bounds_only=True)
    return out


def _collect(f, out: set, bounds_only: bool) -> None:
    if isinstance(f, Lit):
        if not bounds_only:
            for a in f.args:
                out |= _arg_constants(a)
    elif isinstance(f, (And, Or)):
        _collect(f.left, out, bounds_only)
        _collect(f.right, out, bounds_only)
    elif isinstance(f, BQ):
        if not isinstance(f.bound, Var):
            out.add(f.bound)
        _collect(f.body, out, bounds_only)


def sequent_constants(seq) -> set:
    out = {EMPTY}
    for f in seq:
        out |= k_set(f)
    return out


def ordinal_constants(x) -> set:
    """Ordinal terms a constant, bound or formula depends on (witness constants unpacked)."""
    if isinstance(x, Mu):
        out = set()
        if not isinstance(x.bound, Var):
            out |= ordinal_constants(x.bound)
        for c in k_set(x.body):
            out |= ordinal_constants(c)
        return out
    if isinstance(x, Level):
        return {x.t}
    if isinstance(x, HFSet) or isinstance(x, Var):
        return set()
    if isinstance(x, Term):
        return {x}
    if isinstance(x, Formula):
        out = set()
        for c in k_set(x):
            out |= ordinal_constants(c)
        return out
    return set()


# ---------------------------------------------------------------- ranks


def rk_l(c):
    """Constructible rank of a constant (as an ordinal term)."""
    if isinstance(c, HFSet):
        return nat(vn_rank(c))
    if isinstance(c, Level):
        return c.t
    if isinstance(c, Mu):
        raise RankAmbiguous("witness constant has no exact rank")
    if isinstance(c, Var):
        raise FormulaError(f"free variable {c.name}")
    return c


def bound_rank(b):
    return rk_l(b)


def rk(f: Formula):
    if isinstance(f, Lit):
        return ZERO if f.pred == "mem" else ONE
    if isinstance(f, (And, Or)):
        return add(tmax(rk(f.left), rk(f.right)), ONE)
    if isinstance(f, BQ):
        inner = add(rk(subst(f.body, f.var, EMPTY)), nat(2))
        return tmax(omega_times(bound_rank(f.bound)), inner)
    raise FormulaError(f"not a formula: {f!r}")


# ---------------------------------------------------------------- classes


def is_unbounded(b) -> bool:
    return (isinstance(b, Level) and isinstance(b.t, BigI)) or isinstance(b, BigI)


def is_delta0(f: Formula) -> bool:
    if isinstance(f, Lit):
        return f.pred == "mem"
    if isinstance(f, (And, Or)):
        return is_delta0(f.left) and is_delta0(f.right)
    return not is_unbounded(f.bound) and is_delta0(f.body)


@dataclass(frozen=True)
class FClass:
    kind: str  # "Delta0", "Sigma" or "Pi"
    level: int


def sigma_pi_class(f: Formula) -> FClass | None:
    """Prenex class of f, or None when f is not in prenex form."""
    if is_delta0(f):
        return FClass("Delta0", 0)
    blocks: list[str] = []
    g = f
    while isinstance(g, BQ) and is_unbounded(g.bound):
        if not blocks or blocks[-1] != g.quant:
            blocks.append(g.quant)
        g = g.body
    if not blocks or not is_delta0(g):
        return None
    return FClass("Sigma" if blocks[0] == "ex" else "Pi", len(blocks))


def in_sigma(f: Formula, m: int) -> bool:
    c = sigma_pi_class(f)
    if c is None:
        return False
    if c.kind == "Delta0":
        return True
    if c.kind == "Sigma":
        return c.level <= m
    return c.level <= m - 1


def in_pi(f: Formula, m: int) -> bool:
    return in_sigma(neg(f), m)


def in_sigma_hat(f: Formula, lam, n: int) -> bool:
    """Membership in the class generated from Sigma_{n+1} sentences with rank-limited quantifiers."""
    if in_sigma(f, n + 1) or isinstance(f, Lit):
        return True
    if isinstance(f, (And, Or)):
        return in_sigma_hat(f.left, lam, n) and in_sigma_hat(f.right, lam, n)
    if not in_sigma_hat(subst(f.body, f.var, EMPTY), lam, n):
        return False
    if isinstance(f.bound, Mu):
        from .order import rank_interval

        hi = rank_interval(f.bound).hi
        return cmp_int(hi, lam) <= 0 if f.quant == "all" else cmp_int(hi, add(lam, ONE)) <= 0
    r = bound_rank(f.bound)
    c = cmp_int(r, lam)
    return c < 0 if f.quant == "all" else c <= 0


# ---------------------------------------------------------------- decomposition


@dataclass(frozen=True)
class Decomp:
    """The disjunctive ("or") or conjunctive ("and") shape of a sentence.

    ``space`` is "finite" (``witnesses`` lists J), "singleton" (J holds the least
    witness) or "symbolic" (J is the members of ``bound``; not enumerable).
    ``kind`` is "unknown" for literals whose truth cannot be decided.
    """

    kind: str
    space: str
    witnesses: tuple
    pick: Callable = field(compare=False)
    bound: object = None

    def branches(self) -> list:
        return [(w, self.pick(w)) for w in self.witnesses]


def _no_branch(_):
    raise FormulaError("empty index set")


def reg_value(a) -> RegTerm | None:
    """The regular slot denoted by a, if a is an uncountable regular below I."""
    if isinstance(a, Term) and not isinstance(a, (Mu, Var)):
        r = term_as_reg(a)
        return r if isinstance(r, AlephSucc) else None
    return None


def p_holds(a, b, c) -> bool:
    k = reg_value(a)
    return (
        k is not None
        and isinstance(b, Psi)
        and b.kappa == k
        and is_normal(b)
        and c == Fc1(b, k)
    )


def pi_holds(a) -> bool:
    return isinstance(a, Psi) and isinstance(a.kappa, TopI) and is_normal(a)


def _has_witness_arg(f: Lit) -> bool:
    return any(isinstance(a, Mu) for a in f.args)


def mem_literal(d, bound) -> Lit:
    """A literal expressing d in bound (true by construction for non-set bounds)."""
    if isinstance(bound, HFSet):
        return Mem(d, bound)
    return NotMem(d, d)


def witness_space(bound, limit: int = 4):
    """Enumerable members of a bound, or None when the bound is symbolic."""
    if isinstance(bound, HFSet):
        return tuple(sorted_elems(bound))
    if isinstance(bound, Level):
        k = as_nat(bound.t)
        if k is not None and k <= limit:
            return universe(k)
        return None
    if isinstance(bound, Term) and not isinstance(bound, (Mu, Var)):
        k = as_nat(bound)
        if k is not None:
            return tuple(nat(j) for j in range(k))
    return None


def _predicate_decomp(f: Lit) -> Decomp:
    a = f.args[0]
    if any(isinstance(x, Mu) for x in f.args):
        holds = None
    elif f.pred == "reg":
        holds = reg_value(a) is not None
    elif f.pred == "P":
        holds = p_holds(*f.args)
    else:
        holds = pi_holds(a)
    if holds is None:
        return Decomp("unknown", "finite", (), _no_branch)
    js = (ZERO,) if holds else ()
    if f.pos:
        return Decomp("or", "finite", js, lambda _: NotMem(a, a))
    return Decomp("and", "finite", js, lambda _: Mem(a, a))


def decompose(f: Formula, n: int = 2) -> Decomp:
    from .universe import literal_truth, resolve_mu

    if isinstance(f, Lit):
        if f.pred != "mem":
            return _predicate_decomp(f)
        t = literal_truth(f)
        if t is None:
            return Decomp("unknown", "finite", (), _no_branch)
        return Decomp("and" if t else "or", "finite", (), _no_branch)
    if isinstance(f, Or):
        return Decomp("or", "finite", (ZERO, ONE), lambda i: f.left if i == ZERO else f.right)
    if isinstance(f, And):
        return Decomp("and", "finite", (ZERO, ONE), lambda i: f.left if i == ZERO else f.right)
    if not isinstance(f, BQ):
        raise FormulaError(f"not a formula: {f!r}")
    exists_form = f if f.quant == "ex" else neg(f)
    if in_sigma(exists_form, n):
        theta = exists_form.body
        d = resolve_mu(f.var, f.bound, theta, n)
        memlit = mem_literal(d, f.bound)
        if f.quant == "ex":
            pick = lambda w: And(memlit, subst(theta, f.var, w))  # noqa: E731
            return Decomp("or", "singleton", (d,), pick, f.bound)
        pick = lambda w: Or(neg(memlit), subst(f.body, f.var, w))  # noqa: E731
        return Decomp("and", "singleton", (d,), pick, f.bound)
    kind = "or" if f.quant == "ex" else "and"
    pick = lambda w: subst(f.body, f.var, w)  # noqa: E731
    ws = witness_space(f.bound)
    if ws is None:
        return Decomp(kind, "symbolic", (), pick, f.bound)
    return Decomp(kind, "finite", ws, pick, f.bound)


# ---------------------------------------------------------------- Mostowski collapse


def collapse_value(kappa: RegTerm, x):
    """Image of I under the collapse determined by x (and kappa when below I)."""
    return FcN(x) if isinstance(kappa, TopI) else Fc1(x, kappa)


def _map_term(t, x, kappa: RegTerm):
    if isinstance(t, Mu):
        return Mu(t.var, _map_bound(t.bound, x, kappa), mostowski_map(t.body, x, kappa))
    if isinstance(t, Var):
        return t
    if isinstance(t, BigI):
        return collapse_value(kappa, x)
    if not isinstance(kappa, TopI) and t == reg_as_term(kappa):
        return x
    if cmp_int(t, x) < 0:
        return t
    if isinstance(t, Sum):
        out = ZERO
        for p in t.parts:
            out = add(out, _map_term(p, x, kappa))
        return out
    if isinstance(t, Pow):
        return omega_pow(_map_term(t.exp, x, kappa))
    if isinstance(t, Phi):
        return veblen(_map_term(t.a, x, kappa), _map_term(t.b, x, kappa))
    raise DomainViolation(f"constant {render_term(t)} is outside the collapse domain")


def _map_bound(b, x, kappa):
    if isinstance(b, Level):
        return Level(_map_term(b.t, x, kappa))
    if isinstance(b, HFSet):
        return b
    return _map_term(b, x, kappa)


def _map_arg(a, x, kappa):
    return a if isinstance(a, HFSet) else _map_term(a, x, kappa)


def mostowski_map(f: Formula, x, kappa: RegTerm) -> Formula:
    """Apply the collapse to every constant of f without the domain-class check."""
    if isinstance(f, Lit):
        return Lit(f.pred, tuple(_map_arg(a, x, kappa) for a in f.args), f.pos)
    if isinstance(f, And):
        return And(mostowski_map(f.left, x, kappa), mostowski_map(f.right, x, kappa))
    if isinstance(f, Or):
        return Or(mostowski_map(f.left, x, kappa), mostowski_map(f.right, x, kappa))
    return BQ(f.quant, f.var, _map_bound(f.bound, x, kappa), mostowski_map(f.body, x, kappa))


def in_collapse_domain(f: Formula, x, kappa: RegTerm, n: int) -> bool:
    level = n if isinstance(kappa, TopI) else 1
    if not (in_sigma(f, level) or in_pi(f, level)):
        return False
    try:
        mostowski_map(f, x, kappa)
    except (DomainViolation, TermError):
        return False
    return True


def mostowski_apply(f: Formula, x, kappa: RegTerm, n: int = 2) -> Formula:
    """The image of f under the Mostowski collapse with parameter x (and kappa)."""
    if not (isinstance(x, Psi) and x.kappa == kappa and is_normal(x)):
        raise DomainViolation("collapse parameter must be a collapse at the same regular")
    level = n if isinstance(kappa, TopI) else 1
    if not (in_sigma(f, level) or in_pi(f, level)):
        raise DomainViolation(f"formula not in Sigma_{level} or Pi_{level}: {render_formula(f)}")
    return mostowski_map(f, x, kappa)
