"""Enumeration of normal terms and reproducible random corpora."""

from __future__ import annotations

import json
import random
from functools import lru_cache
from pathlib import Path

from .order import cmp_int, is_normal, is_principal, parts
from .terms import (
    I,
    TOP,
    ZERO,
    Aleph,
    AlephSucc,
    Fc1,
    FcN,
    Phi,
    Pow,
    Psi,
    Sum,
    render_term,
    size,
)


@lru_cache(maxsize=None)
def terms_of_size(s: int, restricted: bool = False) -> tuple:
    """All normal terms of exactly size s.

    ``restricted`` limits regular slots to the first uncountable and I, and aleph
    indices to the successor index 1 (the alphabet 0, I, W(0), W(0+1) plus collapses).
    """
    if s <= 0:
        return ()
    if s == 1:
        return (ZERO, I)
    out = []
    for e in terms_of_size(s - 1, restricted):
        out.append(Pow(e))
        out.append(FcN(e))
        if not restricted or e == Pow(ZERO):
            out.append(Aleph(e))
    for s1 in range(1, s - 1):
        s2 = s - 1 - s1
        for a in terms_of_size(s1, restricted):
            for b in terms_of_size(s2, restricted):
                out.append(Phi(a, b))
                if is_principal(a) and is_normal(a) and is_normal(b) and b != ZERO:
                    if cmp_int(a, parts(b)[0]) >= 0:
                        out.append(Sum((a,) + parts(b)))
    for sk in range(1, s - 1):
        for k in regs_of_size(sk, restricted):
            for a in terms_of_size(s - 1 - sk, restricted):
                out.append(Psi(k, a))
                out.append(Fc1(a, k))
    seen = set()
    result = []
    for t in out:
        if t not in seen and size(t) == s and is_normal(t):
            seen.add(t)
            result.append(t)
    return tuple(result)


@lru_cache(maxsize=None)
def regs_of_size(s: int, restricted: bool = False) -> tuple:
    if s == 1:
        return (TOP,)
    if restricted:
        return (AlephSucc(ZERO),) if s == 2 else ()
    return tuple(AlephSucc(p) for p in terms_of_size(s - 1, restricted) if cmp_int(p, I) < 0)


@lru_cache(maxsize=None)
def normal_terms(cap: int, restricted: bool = False) -> tuple:
    """All normal terms of size at most cap, smallest first."""
    out = []
    for s in range(1, cap + 1):
        out.extend(terms_of_size(s, restricted))
    return tuple(out)


def gen_corpus(seed: int, count: int, cap: int = 7) -> list:
    """A reproducible sample of normal terms."""
    pool = normal_terms(cap)
    rng = random.Random(seed)
    return [rng.choice(pool) for _ in range(count)] if count else []


def write_corpus(out_dir: str | Path, seed: int, count: int, cap: int = 7) -> Path:
    """Write terms and checked tautology derivations plus a manifest; returns the manifest path."""
    from .derivation import serialize
    from .formula_corpus import formula_corpus
    from .transform import build_tautology

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    terms = [render_term(t) for t in gen_corpus(seed, count, cap)]
    (out / "terms.json").write_text(json.dumps(terms, indent=1) + "\n")
    files = []
    formulas = formula_corpus(seed, count)
    for i, f in enumerate(formulas):
        d = build_tautology(frozenset(), f)
        name = f"taut_{i:04d}.json"
        (out / name).write_text(json.dumps(serialize(d), indent=1, sort_keys=True) + "\n")
        files.append(name)
    manifest = {"seed": seed, "size": count, "cap": cap, "terms": "terms.json" if count else None,
                "derivations": files}
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    return path
