"""Ordinal term syntax: constructors, size, subterms and rendering."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterator


class TermError(ValueError):
    """Raised for ill-formed or non-normalizable ordinal terms."""


class CapExceeded(TermError):
    """The requested value does not have a notation below the term-system cap."""


class Term:
    __slots__ = ()

    def __str__(self) -> str:
        return render_term(self)


@dataclass(frozen=True, slots=True)
class Zero(Term):
    pass


@dataclass(frozen=True, slots=True)
class BigI(Term):
    pass


@dataclass(frozen=True, slots=True)
class Sum(Term):
    parts: tuple


@dataclass(frozen=True, slots=True)
class Pow(Term):
    exp: Term


@dataclass(frozen=True, slots=True)
class Aleph(Term):
    idx: Term


@dataclass(frozen=True, slots=True)
class Phi(Term):
    a: Term
    b: Term


@dataclass(frozen=True, slots=True)
class Psi(Term):
    kappa: "RegTerm"
    alpha: Term


@dataclass(frozen=True, slots=True)
class Fc1(Term):
    x: Term
    kappa: "RegTerm"


@dataclass(frozen=True, slots=True)
class FcN(Term):
    x: Term


@dataclass(frozen=True, slots=True)
class Mu(Term):
    """Least witness of ``body`` for ``var`` ranging over ``bound``; opaque as an ordinal."""

    var: str
    bound: Any
    body: Any


@dataclass(frozen=True, slots=True)
class Var(Term):
    name: str


class RegTerm:
    __slots__ = ()

    def __str__(self) -> str:
        return render_reg(self)


@dataclass(frozen=True, slots=True)
class AlephSucc(RegTerm):
    """The regular cardinal with index pred+1."""

    pred: Term


@dataclass(frozen=True, slots=True)
class TopI(RegTerm):
    pass


ZERO = Zero()
I = BigI()
TOP = TopI()
ONE = Pow(ZERO)
OMEGA = Pow(ONE)
OMEGA1 = AlephSucc(ZERO)


def size(t) -> int:
    if isinstance(t, (Zero, BigI, TopI, Var)):
        return 1
    if isinstance(t, Sum):
        return sum(size(p) for p in t.parts) + len(t.parts) - 1
    if isinstance(t, (Pow, Aleph, FcN)):
        return 1 + size(_only_child(t))
    if isinstance(t, AlephSucc):
        return 1 + size(t.pred)
    if isinstance(t, Phi):
        return 1 + size(t.a) + size(t.b)
    if isinstance(t, Psi):
        return 1 + size(t.kappa) + size(t.alpha)
    if isinstance(t, Fc1):
        return 1 + size(t.x) + size(t.kappa)
    if isinstance(t, Mu):
        return 1 + _formula_size(t.body)
    return 1


def _only_child(t):
    return t.exp if isinstance(t, Pow) else t.idx if isinstance(t, Aleph) else t.x


def _formula_size(f) -> int:
    from . import formula

    return formula.formula_size(f)


def children(t) -> tuple:
    """Immediate ordinal/regular subterms (Mu nodes are leaves here)."""
    if isinstance(t, Sum):
        return t.parts
    if isinstance(t, Pow):
        return (t.exp,)
    if isinstance(t, Aleph):
        return (t.idx,)
    if isinstance(t, Phi):
        return (t.a, t.b)
    if isinstance(t, Psi):
        return (t.kappa, t.alpha)
    if isinstance(t, Fc1):
        return (t.x, t.kappa)
    if isinstance(t, FcN):
        return (t.x,)
    if isinstance(t, AlephSucc):
        return (t.pred,)
    return ()


def walk(t) -> Iterator:
    yield t
    for c in children(t):
        yield from walk(c)


def subterms(t) -> set:
    """Reflexive-transitive structural closure, restricted to ordinal terms.

    Regular-cardinal slots are traversed but only their ordinal parts are reported.
    """
    return {s for s in walk(t) if isinstance(s, Term)}


def reg_as_term(k: RegTerm) -> Term:
    """The ordinal denoted by a regular-cardinal slot."""
    if isinstance(k, TopI):
        return I
    from .arith import add

    return Aleph(add(k.pred, ONE))


def nat(n: int) -> Term:
    """Notation for the finite ordinal n."""
    if n == 0:
        return ZERO
    if n == 1:
        return ONE
    return Sum((ONE,) * n)


def as_nat(t) -> int | None:
    """The value of t if it is a finite ordinal in normal form, else None."""
    if isinstance(t, Zero):
        return 0
    if t == ONE:
        return 1
    if isinstance(t, Sum) and all(p == ONE for p in t.parts):
        return len(t.parts)
    return None


def has_mu(t) -> bool:
    return any(isinstance(s, Mu) for s in walk(t))


def render_term(t) -> str:
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, BigI):
        return "I"
    if isinstance(t, Sum):
        return "+".join(render_term(p) for p in t.parts)
    if isinstance(t, Pow):
        return f"w^({render_term(t.exp)})"
    if isinstance(t, Aleph):
        return f"W({render_term(t.idx)})"
    if isinstance(t, Phi):
        return f"phi({render_term(t.a)},{render_term(t.b)})"
    if isinstance(t, Psi):
        return f"psi({render_reg(t.kappa)};{render_term(t.alpha)})"
    if isinstance(t, Fc1):
        return f"fc1({render_term(t.x)};{render_reg(t.kappa)})"
    if isinstance(t, FcN):
        return f"fcn({render_term(t.x)})"
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Mu):
        from .formula import render_bound, render_formula

        return f"mu({t.var} in {render_bound(t.bound)} . {render_formula(t.body)})"
    raise TermError(f"not a term: {t!r}")


def render_reg(k: RegTerm) -> str:
    if isinstance(k, TopI):
        return "I"
    if isinstance(k, AlephSucc):
        return f"W({render_term(k.pred)}+1)"
    raise TermError(f"not a regular slot: {k!r}")
