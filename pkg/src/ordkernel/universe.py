"""Truth of sentences over the hereditarily finite fragment."""

from __future__ import annotations

from .formula import (
    Formula,
    FormulaError,
    Level,
    Lit,
    decompose,
    subst,
    witness_space,
)
from .hf import EMPTY, HFSet, as_vn_ordinal, von_neumann
from .hf import mu_witness as _hf_mu_witness
from .order import cmp_int
from .terms import ZERO, Mu, Term, Var, as_nat, nat

WITNESS_SEARCH_RANK = 4
WITNESS_SEARCH_ORDINALS = 16


class NotEvaluable(FormulaError):
    """Truth depends on a symbolic level or an unresolved witness."""


def member(a, b) -> bool | None:
    """Decide a in b for constants; None when undecidable."""
    if isinstance(a, Var) or isinstance(b, Var):
        raise FormulaError("membership of free variables")
    if a == b:
        return False
    if isinstance(a, Mu) or isinstance(b, Mu):
        return None
    if isinstance(a, HFSet) and isinstance(b, HFSet):
        return a in b
    if isinstance(a, HFSet):
        k = as_vn_ordinal(a)
        return k is not None and cmp_int(nat(k), b) < 0
    if isinstance(b, HFSet):
        k = as_nat(a)
        return k is not None and von_neumann(k) in b
    return cmp_int(a, b) < 0


def literal_truth(f: Lit) -> bool | None:
    if f.pred == "mem":
        t = member(*f.args)
    else:
        d = decompose(f)
        if d.kind == "unknown":
            return None
        t = (d.kind == "or") == bool(d.witnesses)
        return t
    if t is None:
        return None
    return t if f.pos else not t


def truth(f: Formula, n: int = 2) -> bool | None:
    """Classical truth where decidable by finite unfolding, else None."""
    if isinstance(f, Lit):
        return literal_truth(f)
    d = decompose(f, n)
    if d.kind == "unknown" or d.space == "symbolic":
        return None
    unknown = False
    for _, branch in d.branches():
        v = truth(branch, n)
        if v is None:
            unknown = True
        elif v == (d.kind == "or"):
            return v
    if unknown:
        return None
    return d.kind == "and"


def eval_sentence(f: Formula, n: int = 2) -> bool:
    v = truth(f, n)
    if v is None:
        raise NotEvaluable(f"cannot evaluate {f}")
    return v


def _candidates(bound):
    """Members of a bound to search for least witnesses, and whether the search is complete."""
    ws = witness_space(bound)
    if ws is not None:
        return ws, True
    from .hf import universe

    if isinstance(bound, Level):
        k = as_nat(bound.t)
        limit = WITNESS_SEARCH_RANK if k is None else min(k, WITNESS_SEARCH_RANK)
        return universe(limit), False
    if isinstance(bound, Term) and not isinstance(bound, (Mu, Var)):
        return tuple(nat(j) for j in range(WITNESS_SEARCH_ORDINALS) if cmp_int(nat(j), bound) < 0), False
    return (), False


def resolve_mu(var: str, bound, theta: Formula, n: int = 2):
    """Least witness of theta in bound; a symbolic Mu when it cannot be computed."""
    default = EMPTY if isinstance(bound, (HFSet, Level)) else ZERO
    cands, complete = _candidates(bound)
    for d in cands:
        v = truth(subst(theta, var, d), n)
        if v is None:
            return Mu(var, bound, theta)
        if v:
            return d
    if complete:
        return default
    return Mu(var, bound, theta)


def mu_witness(b: HFSet, var: str, theta: Formula, n: int = 2) -> HFSet:
    """Least element of b satisfying theta, else the empty set."""
    return _hf_mu_witness(b, lambda d: eval_sentence(subst(theta, var, d), n))
