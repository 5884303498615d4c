"""Ordinal notations with collapsing functions and an operator-controlled proof calculus."""

from .arith import add, normalize, omega_pow, omega_times, omega_tower, next_regular, veblen
from .config import Config
from .order import Ordering, cmp, in_hull, is_normal, psi_admissible, rank_interval
from .parsing import parse_formula, parse_term
from .terms import render_term, subterms

__all__ = [
    "Config",
    "Ordering",
    "add",
    "cmp",
    "in_hull",
    "is_normal",
    "next_regular",
    "normalize",
    "omega_pow",
    "omega_times",
    "omega_tower",
    "parse_formula",
    "parse_term",
    "psi_admissible",
    "rank_interval",
    "render_term",
    "subterms",
    "veblen",
]
