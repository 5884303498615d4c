"""Recursive-descent parser for ordinal terms, HF literals and formulas."""

from __future__ import annotations

import re

from .formula import BQ, PREDICATES, And, Formula, Level, Lit, Or, conj, disj
from .hf import HFSet
from .terms import (
    ONE,
    Aleph,
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
    TopI,
    Var,
    Zero,
)

RESERVED = {"w", "W", "I", "phi", "psi", "fc1", "fcn", "mu", "and", "or", "all", "ex", "in", "L"}
RESERVED |= set(PREDICATES)
_IDENT = re.compile(r"[a-z_][A-Za-z0-9_]*")


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int, src: str):
        super().__init__(f"{msg} at position {pos}: {src[:pos]}<HERE>{src[pos:]}")
        self.pos = pos


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.i = 0

    # -- low level
    def error(self, msg: str):
        raise ParseError(msg, self.i, self.src)

    def ws(self) -> None:
        while self.i < len(self.src) and self.src[self.i].isspace():
            self.i += 1

    def peek(self, lit: str) -> bool:
        self.ws()
        return self.src.startswith(lit, self.i)

    def peek_word(self, word: str) -> bool:
        self.ws()
        if not self.src.startswith(word, self.i):
            return False
        j = self.i + len(word)
        return j >= len(self.src) or not (self.src[j].isalnum() or self.src[j] == "_")

    def eat(self, lit: str) -> None:
        if not self.peek(lit):
            self.error(f"expected {lit!r}")
        self.i += len(lit)

    def ident(self) -> str | None:
        self.ws()
        m = _IDENT.match(self.src, self.i)
        if not m or m.group() in RESERVED:
            return None
        self.i = m.end()
        return m.group()

    def done(self) -> None:
        self.ws()
        if self.i != len(self.src):
            self.error("trailing input")

    # -- terms
    def term(self, allow_vars: bool = False) -> Term:
        items = [self.primary(allow_vars)]
        while self.peek("+") and not self._at_succ_marker():
            self.eat("+")
            items.append(self.primary(allow_vars))
        flat = []
        for t in items:
            flat.extend(t.parts if isinstance(t, Sum) else (t,))
        return flat[0] if len(flat) == 1 else Sum(tuple(flat))

    def _at_succ_marker(self) -> bool:
        # "+1)" closes a regular slot W(t+1)
        j = self.i + 1
        while j < len(self.src) and self.src[j].isspace():
            j += 1
        return self.src.startswith("1", j)

    def primary(self, allow_vars: bool) -> Term:
        self.ws()
        if self.peek("w^("):
            self.eat("w^(")
            e = self.term(allow_vars)
            self.eat(")")
            return Pow(e)
        if self.peek("W("):
            self.eat("W(")
            t = self.term(allow_vars)
            if self.peek("+"):
                self.eat("+")
                self.eat("1")
                t = Sum(tuple((t.parts if isinstance(t, Sum) else (t,)) + (ONE,)))
            self.eat(")")
            return Aleph(t)
        if self.peek("phi("):
            self.eat("phi(")
            a = self.term(allow_vars)
            self.eat(",")
            b = self.term(allow_vars)
            self.eat(")")
            return Phi(a, b)
        if self.peek("psi("):
            self.eat("psi(")
            k = self.reg(allow_vars)
            self.eat(";")
            a = self.term(allow_vars)
            self.eat(")")
            return Psi(k, a)
        if self.peek("fc1("):
            self.eat("fc1(")
            x = self.term(allow_vars)
            self.eat(";")
            k = self.reg(allow_vars)
            self.eat(")")
            return Fc1(x, k)
        if self.peek("fcn("):
            self.eat("fcn(")
            x = self.term(allow_vars)
            self.eat(")")
            return FcN(x)
        if self.peek("mu("):
            self.eat("mu(")
            v = self.ident()
            if v is None:
                self.error("expected variable")
            self.eat("in")
            b = self.bound()
            self.eat(".")
            body = self.formula()
            self.eat(")")
            return Mu(v, b, body)
        if self.peek_word("I"):
            self.eat("I")
            return BigI()
        if self.peek("0"):
            self.eat("0")
            return Zero()
        if allow_vars:
            v = self.ident()
            if v is not None:
                return Var(v)
        self.error("unknown symbol")

    def reg(self, allow_vars: bool = False) -> RegTerm:
        if self.peek_word("I"):
            self.eat("I")
            return TopI()
        self.eat("W(")
        t = self.term(allow_vars)
        self.eat("+")
        self.eat("1")
        self.eat(")")
        return AlephSucc(t)

    # -- HF sets
    def hf(self) -> HFSet:
        self.eat("{")
        elems = []
        if not self.peek("}"):
            elems.append(self.hf())
            while self.peek(","):
                self.eat(",")
                elems.append(self.hf())
        self.eat("}")
        return HFSet(frozenset(elems))

    # -- formulas
    def arg(self):
        if self.peek("{"):
            return self.hf()
        return self.term(allow_vars=True)

    def bound(self):
        if self.peek("{"):
            return self.hf()
        if self.peek("L("):
            self.eat("L(")
            t = self.term()
            self.eat(")")
            return Level(t)
        return self.term(allow_vars=True)

    def formula(self) -> Formula:
        self.ws()
        if self.peek("("):
            self.eat("(")
            f = self.formula()
            self.eat(")")
            return f
        pos = True
        if self.peek("~"):
            self.eat("~")
            pos = False
        for name in ("and", "or"):
            if pos and self.peek(name + "("):
                self.eat(name + "(")
                fs = [self.formula()]
                while self.peek(","):
                    self.eat(",")
                    fs.append(self.formula())
                self.eat(")")
                return conj(*fs) if name == "and" else disj(*fs)
        for q in ("all", "ex"):
            if pos and self.peek_word(q):
                self.eat(q)
                v = self.ident()
                if v is None:
                    self.error("expected variable")
                if not self.peek_word("in"):
                    self.error("expected 'in'")
                self.eat("in")
                b = self.bound()
                self.eat(".")
                return BQ(q, v, b, self.formula())
        for pred in ("PI", "P", "mem", "reg"):
            if self.peek(pred + "("):
                self.eat(pred + "(")
                args = [self.arg()]
                while self.peek(","):
                    self.eat(",")
                    args.append(self.arg())
                self.eat(")")
                if len(args) != PREDICATES[pred]:
                    self.error(f"{pred} takes {PREDICATES[pred]} arguments")
                return Lit(pred, tuple(args), pos)
        self.error("expected formula")


def parse_term(src: str) -> Term:
    p = _Parser(src)
    t = p.term()
    p.done()
    return t


def parse_reg(src: str) -> RegTerm:
    p = _Parser(src)
    k = p.reg()
    p.done()
    return k


def parse_hf(src: str) -> HFSet:
    p = _Parser(src)
    h = p.hf()
    p.done()
    return h


def parse_formula(src: str, normalize: bool = True) -> Formula:
    p = _Parser(src)
    f = p.formula()
    p.done()
    return normalize_formula(f) if normalize else f


def parse_constant(src: str):
    """An HF literal or an ordinal term."""
    p = _Parser(src)
    c = p.hf() if p.peek("{") else p.term()
    p.done()
    return c


def _norm_arg(a):
    from .arith import normalize

    if isinstance(a, (HFSet, Var)):
        return a
    if isinstance(a, Mu):
        return Mu(a.var, _norm_bound(a.bound), normalize_formula(a.body))
    return normalize(a)


def _norm_bound(b):
    from .arith import normalize

    if isinstance(b, Level):
        return Level(normalize(b.t))
    return _norm_arg(b)


def normalize_formula(f: Formula) -> Formula:
    """Bring every ordinal constant of f to normal form."""
    if isinstance(f, Lit):
        return Lit(f.pred, tuple(_norm_arg(a) for a in f.args), f.pos)
    if isinstance(f, And):
        return And(normalize_formula(f.left), normalize_formula(f.right))
    if isinstance(f, Or):
        return Or(normalize_formula(f.left), normalize_formula(f.right))
    return BQ(f.quant, f.var, _norm_bound(f.bound), normalize_formula(f.body))
