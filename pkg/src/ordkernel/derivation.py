"""Finite operator-controlled derivation trees, their checker and JSON form."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .arith import add, normalize_reg, omega_tower, term_as_reg
from .formula import (
    BQ,
    And,
    Formula,
    FormulaError,
    Level,
    Lit,
    Mem,
    Or,
    RankAmbiguous,
    DomainViolation,
    decompose,
    free_vars,
    in_sigma,
    mostowski_apply,
    neg,
    ordinal_constants,
    render_arg,
    render_formula,
    rk,
    rk_l,
    sequent_constants,
)
from .hf import HFSet
from .order import cmp_int, in_hull, is_normal, rank_interval
from .terms import (
    I,
    OMEGA,
    ONE,
    ZERO,
    AlephSucc,
    Mu,
    Psi,
    RegTerm,
    Term,
    TermError,
    TopI,
    Var,
    reg_as_term,
    render_reg,
    render_term,
)


class MalformedDerivation(ValueError):
    """Structural defect: wrong arity, unknown rule tag or schema violation."""

    def __init__(self, msg: str, path: tuple = ()):
        where = "/".join(map(str, path)) or "root"
        super().__init__(f"{where}: {msg}")
        self.path = path


# ---------------------------------------------------------------- data


@dataclass(frozen=True)
class Operator:
    """Index (gamma, Theta) of the operator H_gamma[Theta]."""

    gamma: Term = ZERO
    theta: frozenset = frozenset()

    def seeds(self) -> frozenset:
        return frozenset(t for t in self.theta if isinstance(t, Term))


@dataclass(frozen=True)
class RuleOr:
    main: Formula
    iota: object


@dataclass(frozen=True)
class RuleAnd:
    main: Formula


@dataclass(frozen=True)
class RuleCut:
    formula: Formula


@dataclass(frozen=True)
class AxP:
    lam: Term
    alpha: Term


@dataclass(frozen=True)
class AxPI:
    alpha: Term


@dataclass(frozen=True)
class RuleF1:
    x: Term
    lam: Term
    Lambda: frozenset
    Gamma0: frozenset


@dataclass(frozen=True)
class RuleFN:
    x: Term
    Lambda: frozenset
    Gamma0: frozenset


Rule = RuleOr | RuleAnd | RuleCut | AxP | AxPI | RuleF1 | RuleFN


@dataclass(frozen=True)
class Derivation:
    op: Operator
    kappa: RegTerm
    bound: Term
    cutrank: Term
    seq: frozenset
    rule: Rule
    children: tuple = ()

    def relabel(self, **kw) -> "Derivation":
        return replace(self, **kw)


def p_axiom_formula(lam: Term, alpha: Term) -> Formula:
    """ex x in lam . ex y in lam . (alpha in x and P(lam, x, y))."""
    x, y = Var("x"), Var("y")
    return BQ("ex", "x", lam, BQ("ex", "y", lam, And(Mem(alpha, x), Lit("P", (lam, x, y)))))


def pi_axiom_formula(alpha: Term) -> Formula:
    x = Var("x")
    return BQ("ex", "x", I, And(Mem(alpha, x), Lit("PI", (x,))))


def canonical(f: Formula, depth: int = 0) -> Formula:
    """Rename bound variables to v0, v1, ... by nesting depth."""
    from .formula import subst

    if isinstance(f, Lit):
        return f
    if isinstance(f, And):
        return And(canonical(f.left, depth), canonical(f.right, depth))
    if isinstance(f, Or):
        return Or(canonical(f.left, depth), canonical(f.right, depth))
    name = f"v{depth}"
    body = f.body if f.var == name else subst(f.body, f.var, Var(name))
    return BQ(f.quant, name, f.bound, canonical(body, depth + 1))


def axiom_formula(rule) -> Formula:
    return p_axiom_formula(rule.lam, rule.alpha) if isinstance(rule, AxP) else pi_axiom_formula(rule.alpha)


# ---------------------------------------------------------------- reports


@dataclass(frozen=True)
class CheckReport:
    status: str  # "ok", "fail" or "cannot_verify"
    path: tuple = ()
    message: str = ""
    bound: Term | None = None
    cutrank: Term | None = None
    seq: frozenset = field(default=frozenset())

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    @property
    def exit_code(self) -> int:
        return {"ok": 0, "fail": 2, "cannot_verify": 3}[self.status]

    def __str__(self) -> str:
        if self.ok:
            return f"ok bound={render_term(self.bound)} cutrank={render_term(self.cutrank)}"
        where = "/".join(map(str, self.path)) or "root"
        return f"{self.status} at {where}: {self.message}"


class _Fail(Exception):
    def __init__(self, msg: str):
        super().__init__(msg)


class _Unsure(Exception):
    def __init__(self, msg: str):
        super().__init__(msg)


# ---------------------------------------------------------------- helpers


def kappa_term(k: RegTerm) -> Term:
    return reg_as_term(k)


def rank_of_index(iota):
    """Constructible rank of a witness, or its interval for witness constants."""
    if isinstance(iota, Mu):
        return rank_interval(iota)
    return rk_l(iota)


def _bound_ok_for_witness(iota, kappa: RegTerm, bound) -> None:
    # rk_L(iota) < kappa  implies  rk_L(iota) < bound
    k = kappa_term(kappa)
    if isinstance(iota, Mu):
        iv = rank_interval(iota)
        if cmp_int(iv.hi, bound) <= 0 or cmp_int(iv.lo, k) >= 0:
            return
        raise _Unsure("rank of the witness constant is not determined")
    r = rk_l(iota)
    if cmp_int(r, k) < 0 and cmp_int(r, bound) >= 0:
        raise _Fail(f"witness rank {render_term(r)} is not below the bound {render_term(bound)}")


def _member_of_bound(iota, bound) -> bool | None:
    """Whether iota can index the symbolic members of bound."""
    if isinstance(iota, Mu):
        return None
    if isinstance(bound, Level):
        return cmp_int(rk_l(iota), bound.t) < 0
    if isinstance(bound, Term) and not isinstance(bound, (Mu, Var)):
        if isinstance(iota, HFSet):
            return None
        return cmp_int(iota, bound) < 0
    return None


def in_operator(c, op: Operator, extra: tuple = ()) -> bool:
    """Whether a constant lies in H_gamma[Theta] (HF sets always do)."""
    if isinstance(c, HFSet):
        return True
    if isinstance(c, Level):
        c = c.t
    seeds = op.seeds() | frozenset(e for e in extra if isinstance(e, Term))
    return in_hull(c, op.gamma, ZERO, seeds)


def operator_below(child: Operator, parent: Operator, extra: tuple = ()) -> bool:
    """H_child is contained in H_parent[extra]."""
    if cmp_int(child.gamma, parent.gamma) > 0:
        return False
    return all(in_operator(t, parent, extra) for t in child.theta)


def bound_cap(n: int) -> Term:
    return omega_tower(n + 1, add(I, ONE))


CUTRANK_CAP = add(I, OMEGA)


# ---------------------------------------------------------------- checker


class _Checker:
    def __init__(self, n: int):
        self.n = n
        self.cap = bound_cap(n)
        self.unsure: tuple | None = None

    def run(self, d: Derivation) -> CheckReport:
        try:
            self.node(d, ())
        except _Fail as e:
            return CheckReport("fail", self.path, str(e))
        if self.unsure is not None:
            path, msg = self.unsure
            return CheckReport("cannot_verify", path, msg)
        return CheckReport("ok", (), "", d.bound, d.cutrank, d.seq)

    def node(self, d: Derivation, path: tuple) -> None:
        self.path = path
        try:
            self.local(d, path)
        except _Unsure as e:
            if self.unsure is None:
                self.unsure = (path, str(e))
            return
        except (RankAmbiguous, DomainViolation) as e:
            if self.unsure is None:
                self.unsure = (path, str(e))
            return
        except (FormulaError, TermError) as e:
            raise _Fail(str(e))
        for i, c in enumerate(d.children):
            self.node(c, path + (i,))
            self.path = path

    # -- per-node conditions
    def local(self, d: Derivation, path: tuple) -> None:
        self.arity(d, path)
        for f in d.seq:
            if not isinstance(f, Formula):
                raise _Fail(f"sequent member is not a formula: {f!r}")
            if free_vars(f):
                raise _Fail(f"not a sentence: {render_formula(f)}")
        for t in (d.bound, d.cutrank, d.op.gamma):
            if not is_normal(t):
                raise _Fail(f"term not in normal form: {render_term(t)}")
        if cmp_int(d.cutrank, CUTRANK_CAP) >= 0:
            raise _Fail("cut rank must stay below I+w")
        if cmp_int(d.bound, self.cap) >= 0:
            raise _Fail(f"bound {render_term(d.bound)} exceeds the height cap")
        self.control(d)
        extras = self.premise_indices(d)
        for c, extra in zip(d.children, extras):
            self.inherit(d, c, extra)
        rule = d.rule
        if isinstance(rule, RuleOr):
            self.rule_or(d, rule)
        elif isinstance(rule, RuleAnd):
            self.rule_and(d, rule)
        elif isinstance(rule, RuleCut):
            self.rule_cut(d, rule)
        elif isinstance(rule, (AxP, AxPI)):
            self.rule_axiom(d, rule)
        else:
            self.rule_f(d, rule)

    def arity(self, d: Derivation, path: tuple) -> None:
        rule = d.rule
        want = {RuleOr: 1, RuleCut: 2, AxP: 0, AxPI: 0, RuleF1: 1, RuleFN: 1}.get(type(rule))
        if isinstance(rule, RuleAnd):
            return  # depends on the witness space, checked with the rule
        if want is None:
            raise MalformedDerivation(f"unknown rule {rule!r}", path)
        if len(d.children) != want:
            raise MalformedDerivation(
                f"{type(rule).__name__} needs {want} premise(s), got {len(d.children)}", path
            )

    def control(self, d: Derivation) -> None:
        if not in_operator(d.bound, d.op):
            raise _Fail(f"bound {render_term(d.bound)} is not controlled by the operator")
        for c in sequent_constants(d.seq):
            if isinstance(c, HFSet):
                continue
            cs = ordinal_constants(c) if isinstance(c, (Mu, Level)) else {c}
            for t in cs:
                if not in_operator(t, d.op):
                    raise _Fail(f"constant {render_arg(t)} is not controlled by the operator")

    def premise_indices(self, d: Derivation) -> list:
        """Extra operator seeds per premise: the index of each conjunction premise."""
        plain = [()] * len(d.children)
        if not isinstance(d.rule, RuleAnd):
            return plain
        dec = decompose(d.rule.main, self.n)
        if dec.kind != "and" or dec.space == "symbolic":
            return plain
        return [(w,) for w in dec.witnesses] + plain[len(dec.witnesses):]

    def inherit(self, d: Derivation, c: Derivation, extra: tuple) -> None:
        if not operator_below(c.op, d.op, extra):
            raise _Fail("premise operator exceeds the conclusion operator")
        if cmp_int(kappa_term(c.kappa), kappa_term(d.kappa)) < 0:
            raise _Fail("premise regular is below the conclusion regular")
        if cmp_int(c.cutrank, d.cutrank) > 0:
            raise _Fail("premise cut rank exceeds the conclusion cut rank")
        if cmp_int(c.bound, d.bound) >= 0:
            raise _Fail(
                f"premise bound {render_term(c.bound)} is not below {render_term(d.bound)}"
            )

    def rule_or(self, d: Derivation, rule: RuleOr) -> None:
        A = rule.main
        if A not in d.seq:
            raise _Fail("main formula not in the sequent")
        dec = decompose(A, self.n)
        if dec.kind != "or":
            raise _Fail(f"{render_formula(A)} is not disjunctive")
        iota = rule.iota
        if dec.space == "symbolic":
            mem = _member_of_bound(iota, dec.bound)
            if mem is None:
                raise _Unsure("cannot decide the witness against a symbolic bound")
            if not mem:
                raise _Fail(f"{render_arg(iota)} is not an index of {render_formula(A)}")
        elif iota not in dec.witnesses:
            raise _Fail(f"{render_arg(iota)} is not an index of {render_formula(A)}")
        _bound_ok_for_witness(iota, d.kappa, d.bound)
        branch = dec.pick(iota)
        if not d.children[0].seq <= d.seq | {branch}:
            raise _Fail("premise sequent is not the conclusion plus the minor formula")

    def rule_and(self, d: Derivation, rule: RuleAnd) -> None:
        A = rule.main
        if A not in d.seq:
            raise _Fail("main formula not in the sequent")
        dec = decompose(A, self.n)
        if dec.kind == "unknown":
            if isinstance(A, Lit) and neg(A) in d.seq and not d.children:
                return
            raise _Fail(f"undecided literal {render_formula(A)} without its complement")
        if dec.kind != "and":
            raise _Fail(f"{render_formula(A)} is not conjunctive")
        if dec.space == "symbolic":
            raise _Unsure(f"conjunction over a non-enumerable index set: {render_formula(A)}")
        if len(d.children) != len(dec.witnesses):
            raise MalformedDerivation(
                f"conjunction needs {len(dec.witnesses)} premise(s), got {len(d.children)}",
                self.path,
            )
        for (iota, branch), c in zip(dec.branches(), d.children):
            if not c.seq <= d.seq | {branch}:
                raise _Fail(f"premise for {render_arg(iota)} does not derive the minor formula")

    def rule_cut(self, d: Derivation, rule: RuleCut) -> None:
        C = rule.formula
        if free_vars(C):
            raise _Fail("cut formula is not a sentence")
        r = rk(C)
        if cmp_int(r, d.cutrank) >= 0:
            raise _Fail(f"cut rank {render_term(r)} is not below {render_term(d.cutrank)}")
        left, right = d.children
        if not left.seq <= d.seq | {neg(C)}:
            raise _Fail("left premise must derive the negated cut formula")
        if not right.seq <= d.seq | {C}:
            raise _Fail("right premise must derive the cut formula")

    def rule_axiom(self, d: Derivation, rule) -> None:
        if isinstance(rule, AxP):
            k = term_as_reg(rule.lam)
            if not isinstance(k, AlephSucc):
                raise _Fail(f"{render_term(rule.lam)} is not a regular below I")
            if cmp_int(rule.alpha, rule.lam) >= 0:
                raise _Fail("axiom parameter must lie below the regular")
        elif cmp_int(rule.alpha, I) >= 0:
            raise _Fail("axiom parameter must lie below I")
        want = canonical(axiom_formula(rule))
        if not any(canonical(f) == want for f in d.seq):
            raise _Fail(f"axiom formula {render_formula(axiom_formula(rule))} not in the sequent")

    def rule_f(self, d: Derivation, rule) -> None:
        if isinstance(rule, RuleF1):
            k = term_as_reg(rule.lam)
            if not isinstance(k, AlephSucc):
                raise _Fail(f"{render_term(rule.lam)} is not a regular below I")
            if not in_operator(rule.lam, d.op):
                raise _Fail("collapse regular is not controlled by the operator")
            level = 1
        else:
            k = TopI()
            level = self.n
        x = rule.x
        if not (isinstance(x, Psi) and normalize_reg(x.kappa) == k and is_normal(x)):
            raise _Fail("collapse parameter must be a collapse at the rule's regular")
        if not in_operator(x, d.op):
            raise _Fail("collapse parameter is not controlled by the operator")
        images = set()
        for g in rule.Gamma0:
            if not in_sigma(g, level):
                raise _Fail(f"{render_formula(g)} is not Sigma_{level}")
            for t in ordinal_constants(g):
                if not in_operator(t, d.op):
                    raise _Unsure(f"constant {render_term(t)} of a collapsed formula is not in the hull")
            images.add(mostowski_apply(g, x, k, self.n))
        if not (rule.Lambda | images) <= d.seq:
            raise _Fail("conclusion must contain the side formulas and the collapsed formulas")
        if not d.children[0].seq <= rule.Lambda | rule.Gamma0:
            raise _Fail("premise must derive the side formulas and the uncollapsed formulas")


def check(d: Derivation, n: int = 2) -> CheckReport:
    """Verify every side condition of every node; leftmost failure wins."""
    return _Checker(n).run(d)


def weaken_kappa(d: Derivation, lam: RegTerm) -> Derivation:
    """The same derivation controlled at the smaller regular lam."""
    if cmp_int(kappa_term(lam), kappa_term(d.kappa)) > 0:
        raise ValueError(f"{render_reg(lam)} exceeds the derivation's regular {render_reg(d.kappa)}")
    return _set_kappa(d, lam)


def _set_kappa(d: Derivation, lam: RegTerm) -> Derivation:
    return d.relabel(kappa=lam, children=tuple(_set_kappa(c, lam) for c in d.children))


def nodes(d: Derivation):
    yield d
    for c in d.children:
        yield from nodes(c)


def is_cut_free(d: Derivation) -> bool:
    return not any(isinstance(x.rule, RuleCut) for x in nodes(d))


def tree_size(d: Derivation) -> int:
    return sum(1 for _ in nodes(d))


# ---------------------------------------------------------------- serialization


def _sorted_formulas(fs) -> list:
    return sorted(render_formula(f) for f in fs)


def _rule_json(rule) -> dict:
    if isinstance(rule, RuleOr):
        return {"tag": "or", "main": render_formula(rule.main), "iota": render_arg(rule.iota)}
    if isinstance(rule, RuleAnd):
        return {"tag": "and", "main": render_formula(rule.main)}
    if isinstance(rule, RuleCut):
        return {"tag": "cut", "formula": render_formula(rule.formula)}
    if isinstance(rule, AxP):
        return {"tag": "P", "lam": render_term(rule.lam), "alpha": render_term(rule.alpha)}
    if isinstance(rule, AxPI):
        return {"tag": "PI", "alpha": render_term(rule.alpha)}
    out = {"x": render_term(rule.x), "Lambda": _sorted_formulas(rule.Lambda),
           "Gamma0": _sorted_formulas(rule.Gamma0)}
    if isinstance(rule, RuleF1):
        return {"tag": "F1", "lam": render_term(rule.lam), **out}
    return {"tag": "FN", **out}


def serialize(d: Derivation) -> dict:
    return {
        "op": {"gamma": render_term(d.op.gamma), "theta": sorted(render_arg(t) for t in d.op.theta)},
        "kappa": render_reg(d.kappa),
        "bound": render_term(d.bound),
        "cutrank": render_term(d.cutrank),
        "sequent": _sorted_formulas(d.seq),
        "rule": _rule_json(d.rule),
        "children": [serialize(c) for c in d.children],
    }


def _field(obj: dict, key: str, path: tuple):
    if not isinstance(obj, dict) or key not in obj:
        raise MalformedDerivation(f"missing field {key!r}", path)
    return obj[key]


def _parse_rule(r: dict, path: tuple):
    from .parsing import parse_constant, parse_formula, parse_term, _norm_arg

    tag = _field(r, "tag", path)
    if tag == "or":
        iota = _norm_arg(parse_constant(_field(r, "iota", path)))
        return RuleOr(parse_formula(_field(r, "main", path)), iota)
    if tag == "and":
        return RuleAnd(parse_formula(_field(r, "main", path)))
    if tag == "cut":
        return RuleCut(parse_formula(_field(r, "formula", path)))
    if tag == "P":
        return AxP(_term(parse_term, r, "lam", path), _term(parse_term, r, "alpha", path))
    if tag == "PI":
        return AxPI(_term(parse_term, r, "alpha", path))
    if tag in ("F1", "FN"):
        x = _term(parse_term, r, "x", path)
        lam_ = frozenset(parse_formula(s) for s in _field(r, "Lambda", path))
        g0 = frozenset(parse_formula(s) for s in _field(r, "Gamma0", path))
        if tag == "F1":
            return RuleF1(x, _term(parse_term, r, "lam", path), lam_, g0)
        return RuleFN(x, lam_, g0)
    raise MalformedDerivation(f"unknown rule tag {tag!r}", path)


def _term(parse_term, obj: dict, key: str, path: tuple):
    from .arith import normalize

    return normalize(parse_term(_field(obj, key, path)))


def deserialize(obj: dict, path: tuple = ()) -> Derivation:
    """Inverse of serialize; schema problems raise MalformedDerivation with the node path."""
    from .arith import normalize
    from .parsing import _norm_arg, parse_constant, parse_formula, parse_reg, parse_term

    op = _field(obj, "op", path)
    theta = frozenset(_norm_arg(parse_constant(s)) for s in _field(op, "theta", path))
    operator = Operator(normalize(parse_term(_field(op, "gamma", path))), theta)
    kappa = normalize_reg(parse_reg(_field(obj, "kappa", path)))
    bound = _term(parse_term, obj, "bound", path)
    cutrank = _term(parse_term, obj, "cutrank", path)
    seq = frozenset(parse_formula(s) for s in _field(obj, "sequent", path))
    rule = _parse_rule(_field(obj, "rule", path), path)
    kids = _field(obj, "children", path)
    if not isinstance(kids, list):
        raise MalformedDerivation("children must be a list", path)
    children = tuple(deserialize(c, path + (i,)) for i, c in enumerate(kids))
    return Derivation(operator, kappa, bound, cutrank, seq, rule, children)


def load(path) -> Derivation:
    import json
    from pathlib import Path

    return deserialize(json.loads(Path(path).read_text()))


def dump(d: Derivation, path) -> None:
    import json
    from pathlib import Path

    Path(path).write_text(json.dumps(serialize(d), indent=1, sort_keys=True) + "\n")
