"""Reproducible random sentences for the property suites."""

from __future__ import annotations

import random

from .arith import aleph, normalize
from .formula import BQ, And, Formula, Level, Lit, Or, depth, is_sentence
from .hf import EMPTY, HFSet, universe
from .terms import I, OMEGA, ONE, ZERO, Var, nat

_SETS = universe(2)  # {}, {{}}, {{{}}}, {{},{{}}}
_BOUNDS = tuple(s for s in _SETS if s.elems) + (HFSet.of(EMPTY, HFSet.of(EMPTY), HFSet.of(HFSet.of(EMPTY))),)
_ORDINALS = (ZERO, ONE, OMEGA, normalize(aleph(ONE)), I)


def _literal(rng: random.Random, hf_vars: list, mem_only: bool = False) -> Lit:
    pos = rng.random() < 0.5
    roll = 1.0 if mem_only else rng.random()
    if roll < 0.15:
        return Lit("reg", (rng.choice(_ORDINALS),), pos)
    if roll < 0.25:
        return Lit("mem", (rng.choice(_ORDINALS), rng.choice(_ORDINALS)), pos)
    pool = list(_SETS) + [Var(v) for v in hf_vars] * 2
    return Lit("mem", (rng.choice(pool), rng.choice(pool)), pos)


def _formula(rng: random.Random, budget: int, hf_vars: list, top: bool) -> Formula:
    if budget == 0 or rng.random() < 0.25:
        return _literal(rng, hf_vars)
    roll = rng.random()
    if roll < 0.35:
        cls = And if rng.random() < 0.5 else Or
        return cls(_formula(rng, budget - 1, hf_vars, False), _formula(rng, budget - 1, hf_vars, False))
    quant = "ex" if rng.random() < 0.5 else "all"
    var = f"x{len(hf_vars)}"
    if top and roll > 0.85:
        # Sigma_1 sentence over a large level: resolved through a single witness
        body = _literal(rng, hf_vars + [var], mem_only=True)
        return BQ("ex", var, Level(rng.choice(_ORDINALS[3:])), body)
    choices = list(_BOUNDS) + [Var(v) for v in hf_vars] + [Level(nat(1)), Level(nat(2))]
    bound = rng.choice(choices)
    return BQ(quant, var, bound, _formula(rng, budget - 1, hf_vars + [var], False))


def formula_corpus(seed: int, count: int, max_depth: int = 4) -> list:
    """``count`` distinct sentences of depth at most ``max_depth``."""
    rng = random.Random(seed)
    out: list = []
    seen: set = set()
    while len(out) < count:
        f = _formula(rng, max_depth, [], True)
        if is_sentence(f) and depth(f) <= max_depth and f not in seen:
            seen.add(f)
            out.append(f)
    return out
