"""Hereditarily finite sets: the evaluable toy universe."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .order import Ordering


@dataclass(frozen=True, slots=True)
class HFSet:
    elems: frozenset = frozenset()

    @classmethod
    def of(cls, *elems: "HFSet") -> "HFSet":
        return cls(frozenset(elems))

    def __contains__(self, x) -> bool:
        return x in self.elems

    def __iter__(self):
        return iter(sorted_elems(self))

    def __len__(self) -> int:
        return len(self.elems)

    def __str__(self) -> str:
        return render_hf(self)


EMPTY = HFSet()


@lru_cache(maxsize=None)
def vn_rank(a: HFSet) -> int:
    if not a.elems:
        return 0
    return 1 + max(vn_rank(e) for e in a.elems)


@lru_cache(maxsize=None)
def lorder_key(a: HFSet) -> tuple:
    return (vn_rank(a), tuple(sorted(lorder_key(e) for e in a.elems)))


def lorder(a: HFSet, b: HFSet) -> Ordering:
    ka, kb = lorder_key(a), lorder_key(b)
    return Ordering.of((ka > kb) - (ka < kb))


def sorted_elems(a: HFSet) -> list:
    return sorted(a.elems, key=lorder_key)


def render_hf(a: HFSet) -> str:
    return "{" + ",".join(render_hf(e) for e in sorted_elems(a)) + "}"


@lru_cache(maxsize=None)
def von_neumann(n: int) -> HFSet:
    """The finite ordinal n as a set."""
    return HFSet(frozenset(von_neumann(k) for k in range(n)))


@lru_cache(maxsize=None)
def as_vn_ordinal(a: HFSet) -> int | None:
    n = len(a.elems)
    return n if a == von_neumann(n) else None


@lru_cache(maxsize=None)
def universe(k: int) -> tuple:
    """All sets of rank below k, in canonical order."""
    if k == 0:
        return ()
    prev = universe(k - 1)
    out = [HFSet(frozenset(c)) for r in range(len(prev) + 1) for c in combinations(prev, r)]
    return tuple(sorted(out, key=lorder_key))


def mu_witness(b: HFSet, holds) -> HFSet:
    """Least element of b (canonical order) satisfying ``holds``, else the empty set."""
    for d in sorted_elems(b):
        if holds(d):
            return d
    return EMPTY
