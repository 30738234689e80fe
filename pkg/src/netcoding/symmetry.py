"""Relabeling group acting on (Q, W) pairs, canonical forms and stabilizers.

The group is ``S_K x S_L``: sources are permuted among themselves and
non-source edges among themselves.  It is small at the sizes handled here
(at most a few thousand elements), so canonical forms are found by full
minimization over the group.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import DimensionMismatch
from .netmodel import EdgeRep

__all__ = [
    "Perm",
    "PermGroup",
    "all_perms",
    "act",
    "compare",
    "canonicalize",
    "stabilizer",
    "orbit",
    "orbit_size",
]


@dataclass(frozen=True)
class Perm:
    """``img[x - 1]`` is the image of id ``x``; blocks never mix."""

    K: int
    L: int
    img: tuple

    @classmethod
    def identity(cls, K, L):
        return cls(K, L, tuple(range(1, K + L + 1)))

    @classmethod
    def from_blocks(cls, src, edges):
        """Build from the image lists of ``1..K`` and ``K+1..K+L``."""
        K, L = len(src), len(edges)
        if sorted(src) != list(range(1, K + 1)) or sorted(edges) != list(range(K + 1, K + L + 1)):
            raise DimensionMismatch("blocks must be permutations of the source and edge ids")
        return cls(K, L, tuple(src) + tuple(edges))

    def __call__(self, x):
        return self.img[x - 1]

    def compose(self, other):
        """``self o other``: apply ``other`` first."""
        self._same(other)
        return Perm(self.K, self.L, tuple(self.img[other.img[i] - 1] for i in range(self.K + self.L)))

    def inverse(self):
        inv = [0] * len(self.img)
        for i, y in enumerate(self.img):
            inv[y - 1] = i + 1
        return Perm(self.K, self.L, tuple(inv))

    def is_identity(self):
        return all(y == i + 1 for i, y in enumerate(self.img))

    def _same(self, other):
        if (self.K, self.L) != (other.K, other.L):
            raise DimensionMismatch("permutations act on different (K, L)")

    def __str__(self):
        moved = [f"{i + 1}->{y}" for i, y in enumerate(self.img) if y != i + 1]
        return "(" + " ".join(moved) + ")" if moved else "id"


@dataclass(frozen=True)
class PermGroup:
    """A subgroup given by all of its elements plus a generating subset."""

    K: int
    L: int
    elements: tuple
    generators: tuple

    @property
    def order(self):
        return len(self.elements)

    def __contains__(self, p):
        return p in set(self.elements)


@lru_cache(maxsize=None)
def all_perms(K, L):
    out = []
    for ps in itertools.permutations(range(1, K + 1)):
        for pe in itertools.permutations(range(K + 1, K + L + 1)):
            out.append(Perm(K, L, ps + pe))
    return tuple(out)


def _act_pairs(img, pairs):
    return tuple(sorted((img[i - 1], tuple(sorted(img[a - 1] for a in A))) for i, A in pairs))


def act(p: Perm, rep: EdgeRep) -> EdgeRep:
    if (p.K, p.L) != (rep.K, rep.L):
        raise DimensionMismatch(f"perm for {(p.K, p.L)} applied to {(rep.K, rep.L)} rep")
    return EdgeRep(rep.K, rep.L, _act_pairs(p.img, rep.Q), _act_pairs(p.img, rep.W))


def compare(a: EdgeRep, b: EdgeRep) -> int:
    """-1, 0 or 1 under the lexicographic order (Q first, then W)."""
    if (a.K, a.L) != (b.K, b.L):
        raise DimensionMismatch("reps of different size")
    ka, kb = a.key, b.key
    return (ka > kb) - (ka < kb)


def _sweep(rep):
    """All group images of ``rep`` keyed by (Q, W); shared by the queries below."""
    best, best_p, stab = None, None, []
    for p in all_perms(rep.K, rep.L):
        q = _act_pairs(p.img, rep.Q)
        if best is not None and q > best[0]:
            if q != rep.Q:
                continue
        key = (q, _act_pairs(p.img, rep.W))
        if best is None or key < best:
            best, best_p = key, p
        if key == rep.key:
            stab.append(p)
    return best, best_p, stab


def canonicalize(rep: EdgeRep):
    """(lex-min element of the orbit, a permutation mapping rep onto it)."""
    best, p, _ = _sweep(rep)
    return EdgeRep(rep.K, rep.L, best[0], best[1]), p


def _generators(elements):
    gens, span = [], {elements[0]} if elements else set()
    for g in elements:
        if g in span:
            continue
        gens.append(g)
        # close the span under the new generator
        frontier = list(span)
        span = set(span)
        while frontier:
            x = frontier.pop()
            for h in gens:
                y = h.compose(x)
                if y not in span:
                    span.add(y)
                    frontier.append(y)
    return tuple(gens)


def stabilizer(rep: EdgeRep) -> PermGroup:
    _, _, stab = _sweep(rep)
    elements = tuple(sorted(stab, key=lambda p: p.img))
    return PermGroup(rep.K, rep.L, elements, _generators(elements))


def orbit(rep: EdgeRep):
    return {act(p, rep).key for p in all_perms(rep.K, rep.L)}


def orbit_size(rep: EdgeRep) -> int:
    return math.factorial(rep.K) * math.factorial(rep.L) // stabilizer(rep).order
