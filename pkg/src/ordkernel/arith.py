"""Normal-form ordinal arithmetic on terms."""

from __future__ import annotations

from functools import lru_cache

from .order import cmp_int, is_sc, parts, psi_admissible, tmax
from .terms import (
    I,
    OMEGA,
    ONE,
    ZERO,
    Aleph,
    AlephSucc,
    BigI,
    CapExceeded,
    Fc1,
    FcN,
    Mu,
    Phi,
    Pow,
    Psi,
    RegTerm,
    Sum,
    TermError,
    TopI,
    Var,
    Zero,
    reg_as_term,
)


def _from_parts(ps) -> object:
    if not ps:
        return ZERO
    if len(ps) == 1:
        return ps[0]
    return Sum(tuple(ps))


@lru_cache(maxsize=None)
def add(s, t):
    """Normal form of s + t."""
    if isinstance(t, Zero):
        return s
    if isinstance(s, Zero):
        return t
    ps, pt = parts(s), parts(t)
    lead = pt[0]
    keep = 0
    while keep < len(ps) and cmp_int(ps[keep], lead) >= 0:
        keep += 1
    return _from_parts(ps[:keep] + pt)


def add_all(*ts):
    out = ZERO
    for t in ts:
        out = add(out, t)
    return out


def succ(t):
    return add(t, ONE)


def omega_pow(t):
    """Normal notation for omega^t."""
    if isinstance(t, Zero):
        return ONE
    if isinstance(t, (Sum, Pow)):
        return Pow(t)
    if isinstance(t, Phi) or is_sc(t):
        return t
    raise TermError(f"cannot exponentiate {t!r}")


def _exponent(p):
    """e with p = omega^e for an additive principal p."""
    return p.exp if isinstance(p, Pow) else p


def omega_times(t):
    """Normal notation for omega * t."""
    out = ZERO
    for p in parts(t):
        out = add(out, omega_pow(add(ONE, _exponent(p))))
    return out


def times_nat(t, k: int):
    out = ZERO
    for _ in range(k):
        out = add(out, t)
    return out


def veblen(a, b):
    """Normal notation for the binary Veblen function phi(a, b)."""
    if isinstance(a, Zero):
        return omega_pow(b)
    if isinstance(a, (Mu, Var)) or isinstance(b, (Mu, Var)):
        raise TermError("Veblen arguments must be ordinal terms")
    if cmp_int(a, I) >= 0:
        if a == I and isinstance(b, Zero):
            return I
        raise CapExceeded("Veblen value beyond the notation range")
    if isinstance(b, Zero) and is_sc(a):
        return a
    if isinstance(b, Phi) and cmp_int(b.a, a) > 0:
        return b
    if is_sc(b) and cmp_int(a, b) < 0:
        return b
    if cmp_int(b, I) >= 0:
        raise CapExceeded("Veblen value beyond the notation range")
    return Phi(a, b)


def omega_tower(m: int, t):
    out = t
    for _ in range(m):
        out = omega_pow(out)
    return out


def aleph(i):
    """Normal notation for the cardinal with index i."""
    if isinstance(i, Zero):
        return OMEGA
    if isinstance(i, Psi) and isinstance(i.kappa, TopI):
        return i
    c = cmp_int(i, I)
    if c == 0:
        return I
    if c > 0:
        raise CapExceeded("cardinal index at or above I")
    return Aleph(i)


def _atom_regular(t) -> RegTerm:
    if isinstance(t, Aleph):
        return AlephSucc(t.idx)
    if isinstance(t, Psi):
        return AlephSucc(t) if isinstance(t.kappa, TopI) else t.kappa
    if isinstance(t, Fc1):
        return t.kappa
    if isinstance(t, FcN):
        return AlephSucc(t.x)
    raise TermError(f"no regular above {t!r}")


def _visible_atoms(t):
    if isinstance(t, Sum):
        for p in t.parts:
            yield from _visible_atoms(p)
    elif isinstance(t, Pow):
        yield from _visible_atoms(t.exp)
    elif isinstance(t, Phi):
        yield from _visible_atoms(t.a)
        yield from _visible_atoms(t.b)
    elif is_sc(t):
        yield t


def next_regular(t) -> AlephSucc:
    """Least uncountable regular strictly above t (t below I)."""
    if isinstance(t, (Mu, Var)) or cmp_int(t, I) >= 0:
        raise TermError("next_regular needs a term below I")
    best = AlephSucc(ZERO)
    for atom in _visible_atoms(t):
        r = _atom_regular(atom)
        if cmp_int(reg_as_term(r), reg_as_term(best)) > 0:
            best = r
    return best


def reg_max(*ks: RegTerm) -> RegTerm:
    terms = [reg_as_term(k) for k in ks]
    top = tmax(*terms)
    return ks[terms.index(top)]


def term_as_reg(t) -> RegTerm | None:
    """The regular slot denoting t, if t is I or a successor cardinal below I."""
    if isinstance(t, BigI):
        return TopI()
    if isinstance(t, Aleph):
        ps = parts(t.idx)
        if ps and ps[-1] == ONE:
            return AlephSucc(_from_parts(ps[:-1]))
    return None


def normalize_reg(k: RegTerm) -> RegTerm:
    if isinstance(k, TopI):
        return k
    p = normalize(k.pred)
    if cmp_int(p, I) >= 0:
        raise CapExceeded("regular slot index at or above I")
    return AlephSucc(p)


def normalize(t):
    """Rebuild t in normal form; raises TermError when no notation exists."""
    if isinstance(t, (Zero, BigI, Mu)):
        return t
    if isinstance(t, Var):
        raise TermError(f"free variable {t.name} in ordinal term")
    if isinstance(t, Sum):
        return add_all(*(normalize(p) for p in t.parts))
    if isinstance(t, Pow):
        return omega_pow(normalize(t.exp))
    if isinstance(t, Aleph):
        return aleph(normalize(t.idx))
    if isinstance(t, Phi):
        return veblen(normalize(t.a), normalize(t.b))
    if isinstance(t, Psi):
        k, a = normalize_reg(t.kappa), normalize(t.alpha)
        if not psi_admissible(k, a):
            raise TermError(f"inadmissible collapse {Psi(k, a)}")
        return Psi(k, a)
    if isinstance(t, Fc1):
        k, x = normalize_reg(t.kappa), normalize(t.x)
        if not isinstance(k, AlephSucc) or not (isinstance(x, Psi) and x.kappa == k):
            raise TermError("fc1 needs a collapse at the same regular")
        return Fc1(x, k)
    if isinstance(t, FcN):
        x = normalize(t.x)
        if not (isinstance(x, Psi) and isinstance(x.kappa, TopI)):
            raise TermError("fcn needs a collapse at I")
        return FcN(x)
    raise TermError(f"not a term: {t!r}")
