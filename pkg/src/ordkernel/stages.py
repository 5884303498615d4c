"""Brute-force hull stages: forward closure of {0, I} and the terms below beta.

This is the independent route for hull membership. It iterates the generating
clauses literally on a size-bounded term universe instead of recursing on the
structure of the queried term.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .arith import add, aleph, next_regular, omega_pow, veblen
from .corpus import normal_terms
from .order import cmp_int, is_normal, psi_admissible
from .terms import I, TOP, ZERO, Aleph, AlephSucc, Fc1, FcN, Psi, TermError, TopI, reg_as_term, size


@dataclass(frozen=True)
class StageResult:
    terms: frozenset
    depth: int  # number of rounds actually applied
    saturated: bool  # two consecutive stages were equal
    overflow: bool  # some generated value exceeded the size cap


class _Stage:
    def __init__(self, cap: int):
        self.cap = cap
        self.overflow = False
        self.found: set = set()

    def offer(self, t) -> None:
        if size(t) > self.cap:
            self.overflow = True
        elif is_normal(t):
            self.found.add(t)


def _round(stage: frozenset, allowed: frozenset, cap: int) -> tuple:
    out = _Stage(cap)
    items = sorted(stage, key=size)
    for x in items:
        out.offer(omega_pow(x))
        if x != ZERO and cmp_int(x, I) < 0:
            out.offer(aleph(x))
            out.offer(reg_as_term(next_regular(x)))
        if isinstance(x, Aleph):
            out.offer(x.idx)
        if isinstance(x, Psi) and isinstance(x.kappa, TopI):
            out.offer(FcN(x))
        if isinstance(x, Psi) and not isinstance(x.kappa, TopI) and x.kappa.pred in stage:
            out.offer(Fc1(x, x.kappa))
    for x in items:
        for y in items:
            out.offer(add(x, y))
            if x == ZERO:
                continue
            if size(x) + size(y) + 1 > cap:
                # a Phi node this large overflows; fixed points return y, already present
                out.overflow = True
            else:
                try:
                    out.offer(veblen(x, y))
                except TermError:
                    out.overflow = True
    # the regular with index p+1 enters together with p (successor and aleph closure);
    # its own notation may exceed the size cap, so slots are keyed by their index
    regs = [TOP] + [AlephSucc(p) for p in items if cmp_int(p, I) < 0]
    for k in regs:
        for delta in items:
            if delta in allowed:
                cand = Psi(k, delta)
                if size(cand) > cap:
                    out.overflow = True
                elif psi_admissible(k, delta):
                    out.offer(cand)
    return frozenset(out.found), out.overflow


@lru_cache(maxsize=None)
def _saturate(seeds: frozenset, allowed: frozenset, cap: int, depth: int) -> StageResult:
    stage = seeds
    overflow = False
    for d in range(depth):
        new, ovf = _round(stage, allowed, cap)
        overflow |= ovf
        nxt = stage | new
        if nxt == stage:
            return StageResult(stage, d + 1, True, overflow)
        stage = nxt
    return StageResult(stage, depth, False, overflow)


def hull_stages(gamma, beta, size_cap: int, depth: int) -> StageResult:
    """Stage ``depth`` of the hull of {0, I} and the terms below beta, limited to size_cap."""
    universe = normal_terms(size_cap)
    seeds = frozenset({ZERO, I} | {t for t in universe if cmp_int(t, beta) < 0})
    allowed = frozenset(t for t in universe if size(t) <= size_cap - 2 and cmp_int(t, gamma) < 0)
    return _saturate(seeds, allowed, size_cap, depth)
