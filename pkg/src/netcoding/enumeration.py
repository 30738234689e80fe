"""Isomorph-free generation of canonical minimal (K, L) networks.

Orderly generation in two stages.  Candidate sets are grown one element at
a time, only by elements larger than the current maximum, and a set is kept
only if it is the lex-min member of its orbit.  Removing the largest
element of a lex-min set leaves a lex-min set, so every canonical set is
reached exactly once from its canonical parent.

Stage one grows the edge definitions Q under the full group with the
hereditary filters "one definition per edge" and "acyclic".  Stage two
grows the sink definitions W under the stabilizer of Q with the hereditary
filters C12 and C13; every canonical W of every size is a candidate and the
remaining conditions are checked on the finished pair.

With ``relay_filter`` on (the default) a pair is also rejected when some
node's only input is a source that feeds nothing else and the node has a
single output edge.  This is the C9 pattern with a source in-edge.  The
minimality module treats such nets as minimal (otherwise the (1,1) net
would vanish), but the published census counts exclude them.
"""

from __future__ import annotations

import itertools
import math

from .minimality import first_violation
from .netmodel import EdgeRep, node_rep
from .symmetry import PermGroup, _generators, all_perms

__all__ = ["enumerate_networks", "census", "q_candidates", "brute_force", "accepted", "has_source_relay"]


def _subsets(items, nonempty=True):
    items = sorted(items)
    for r in range(1 if nonempty else 0, len(items) + 1):
        yield from itertools.combinations(items, r)


def _mask(xs):
    m = 0
    for x in xs:
        m |= 1 << (x - 1)
    return m


def _perm_tables(elems, perms):
    index = {e: i for i, e in enumerate(elems)}
    tables = []
    for p in perms:
        img = p.img
        t = []
        for i, A in elems:
            t.append(index[(img[i - 1], tuple(sorted(img[a - 1] for a in A)))])
        tables.append(t)
    return tables


def _is_min(chosen, tables):
    for t in tables:
        img = sorted(t[x] for x in chosen)
        if img < chosen:
            return False
    return True


def _acyclic_with(deps, i, A):
    """Would adding edge ``i`` with inputs ``A`` keep the relation acyclic?"""
    stack, seen = list(A), set()
    while stack:
        x = stack.pop()
        if x == i:
            return False
        if x in seen:
            continue
        seen.add(x)
        stack.extend(deps.get(x, ()))
    return True


def q_candidates(K, L):
    """Canonical edge-definition sets Q (size L) with their stabilizers."""
    ids = range(1, K + L + 1)
    elems = [(i, A) for i in range(K + 1, K + L + 1) for A in _subsets(set(ids) - {i})]
    elems.sort()
    perms = all_perms(K, L)
    tables = _perm_tables(elems, perms)
    out = []

    def grow(chosen, used, deps):
        if len(chosen) == L:
            stab = [p for p, t in zip(perms, tables) if sorted(t[x] for x in chosen) == chosen]
            out.append((tuple(elems[x] for x in chosen), stab))
            return
        start = chosen[-1] + 1 if chosen else 0
        for x in range(start, len(elems)):
            i, A = elems[x]
            if i in used or not _acyclic_with(deps, i, A):
                continue
            nxt = chosen + [x]
            if not _is_min(nxt, tables):
                continue
            deps[i] = A
            grow(nxt, used | {i}, deps)
            del deps[i]

    grow([], frozenset(), {})
    return out


def _upstream(Q, K):
    inputs = dict(Q)
    memo = {}

    def up(x):
        if x <= K:
            return {x}
        if x not in memo:
            memo[x] = set().union(*(up(a) for a in inputs[x]))
        return memo[x]

    return {e: up(e) for e in inputs}


def _sink_ok(sinks, A, beta):
    """C12 and C13 between the sink with input mask ``A`` and all others."""
    for A2, b2 in sinks.items():
        if A2 == A:
            continue
        if A & A2 == A:
            if beta & b2 or beta & A2:
                return False
        elif A & A2 == A2:
            if beta & b2 or b2 & A:
                return False
    return True


def _w_candidates(K, L, Q, stab):
    ids = set(range(1, K + L + 1))
    up = _upstream(Q, K)
    elems = []
    for s in range(1, K + 1):
        for A in _subsets(ids - {s}):
            if any(a > K and s in up[a] for a in A):
                elems.append((s, A))
    elems.sort()
    tables = _perm_tables(elems, stab)
    tables = [t for t, p in zip(tables, stab) if not p.is_identity()]
    masks = [(1 << (s - 1), _mask(A)) for s, A in elems]

    def grow(chosen, sinks):
        if chosen:
            yield chosen
        start = chosen[-1] + 1 if chosen else 0
        for x in range(start, len(elems)):
            sbit, A = masks[x]
            beta = sinks.get(A, 0) | sbit
            if not _sink_ok(sinks, A, beta):
                continue
            nxt = chosen + [x]
            if not _is_min(nxt, tables):
                continue
            old = sinks.get(A)
            sinks[A] = beta
            yield from grow(nxt, sinks)
            if old is None:
                del sinks[A]
            else:
                sinks[A] = old

    for chosen in grow([], {}):
        yield tuple(elems[x] for x in chosen)


def has_source_relay(net):
    """Some node reads only a source that has no other head and has one output."""
    for j, a in enumerate(net.nodes):
        if len(a) != 1:
            continue
        (s,) = a
        if s > net.K:
            continue
        if net.head_nodes(s) == [j] and not net.head_sinks(s) and len(net.out_edges(j)) == 1:
            return True
    return False


def accepted(net, relay_filter=True):
    """The predicate the generator enumerates: minimal, and relay-free if asked."""
    if first_violation(net) is not None:
        return False
    return not (relay_filter and has_source_relay(net))


def enumerate_networks(K, L, relay_filter=True):
    """Yield ``(EdgeRep, PermGroup)`` for each canonical minimal (K, L) network."""
    for Q, qstab in q_candidates(K, L):
        used = set().union(*(set(A) for _, A in Q)) if Q else set()
        if not all(s in used for s in range(1, K + 1)):
            continue
        for W in _w_candidates(K, L, Q, qstab):
            rep = EdgeRep(K, L, Q, W)
            if not accepted(node_rep(rep), relay_filter):
                continue
            stab = _w_stabilizer(rep, qstab)
            yield rep, stab


def _w_stabilizer(rep, qstab):
    from .symmetry import _act_pairs

    elements = tuple(sorted((p for p in qstab if _act_pairs(p.img, rep.W) == rep.W), key=lambda p: p.img))
    return PermGroup(rep.K, rep.L, elements, _generators(elements))


def census(K, L, relay_filter=True):
    """(number of canonical networks, number of labeled (Q, W) pairs)."""
    n = lab = 0
    full = math.factorial(K) * math.factorial(L)
    for _, stab in enumerate_networks(K, L, relay_filter):
        n += 1
        lab += full // stab.order
    return n, lab


def brute_force(K, L, relay_filter=True):
    """Canonical keys of all minimal labeled pairs, by exhaustive listing.

    Only feasible for tiny cells; used as an oracle for the generator.
    """
    from .symmetry import canonicalize

    ids = set(range(1, K + L + 1))
    qopts = [[(i, A) for A in _subsets(ids - {i})] for i in range(K + 1, K + L + 1)]
    welems = [(s, A) for s in range(1, K + 1) for A in _subsets(ids - {s}, nonempty=False)]
    labeled, canon = set(), set()
    for Q in itertools.product(*qopts):
        try:
            EdgeRep.make(K, L, Q, [])
        except Exception:
            continue
        for r in range(1, len(welems) + 1):
            for W in itertools.combinations(welems, r):
                rep = EdgeRep.make(K, L, Q, W, check=False)
                if accepted(node_rep(rep), relay_filter):
                    labeled.add(rep.key)
                    canon.add(canonicalize(rep)[0].key)
    return canon, labeled


def all_pairs(K, L, max_w=None):
    """Every canonical valid (Q, W) pair, minimal or not.

    Same orderly scheme without the minimality filters; sink entries may
    have any input set (even empty).  ``max_w`` caps |W|.  This is the
    brute-force family used to test region transfer through reductions.
    """
    ids = set(range(1, K + L + 1))
    for Q, qstab in q_candidates(K, L):
        elems = sorted((s, A) for s in range(1, K + 1) for A in _subsets(ids - {s}, nonempty=False))
        tables = [t for t, p in zip(_perm_tables(elems, qstab), qstab) if not p.is_identity()]

        def grow(chosen):
            yield chosen
            if max_w is not None and len(chosen) >= max_w:
                return
            start = chosen[-1] + 1 if chosen else 0
            for x in range(start, len(elems)):
                nxt = chosen + [x]
                if _is_min(nxt, tables):
                    yield from grow(nxt)

        for chosen in grow([]):
            yield EdgeRep(K, L, Q, tuple(elems[x] for x in chosen))
