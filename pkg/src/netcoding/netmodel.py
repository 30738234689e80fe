"""Network coding problem model and the (Q, W) edge encoding.

Ids follow one convention everywhere: sources are ``1..K`` and non-source
edges ``K+1..K+L``.  A source id doubles as the id of its single outgoing
hyperedge, so a net on ``N = K + L`` variables has exactly ``N`` ids.

Intermediate nodes and sinks are identified by their input sets.  Heads
are never stored; they are derived from which input sets mention an edge.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import MalformedRep, NotEncodable

__all__ = [
    "Network",
    "EdgeRep",
    "validate",
    "edge_rep",
    "node_rep",
    "reachable",
    "fmt_set",
    "set_key",
]


def set_key(s):
    """Ordering key for id sets: ascending elements, shorter prefix first."""
    return tuple(sorted(s))


def fmt_set(s):
    return "{" + ",".join(str(x) for x in sorted(s)) + "}"


@dataclass(frozen=True)
class Network:
    """Node-level description of a hyperedge network coding problem.

    ``nodes[j]`` is the input set of intermediate node ``j``; ``tails[e-K-1]``
    is the index of the tail node of edge ``e``; each sink is a pair
    ``(In(t), beta(t))``.  Use :meth:`build` to get the normalized form in
    which nodes and sinks are sorted and keyed uniquely by input set.
    """

    K: int
    L: int
    nodes: tuple = ()
    tails: tuple = ()
    sinks: tuple = ()

    @classmethod
    def build(cls, K, L, enc: Mapping[int, Iterable[int]], sinks=(), dangling=()):
        """Normalized constructor.

        ``enc`` maps each edge ``e`` to ``In(Tl(e))``.  Nodes sharing an input
        set are the same node and sinks sharing an input set are merged with
        their demands unioned.  ``dangling`` lists input sets of nodes that
        have no outgoing edge.
        """
        enc = {int(e): frozenset(a) for e, a in enc.items()}
        node_sets = set(enc.values()) | {frozenset(d) for d in dangling}
        nodes = tuple(sorted(node_sets, key=set_key))
        index = {a: j for j, a in enumerate(nodes)}
        tails = tuple(index[enc[e]] for e in range(K + 1, K + L + 1))
        merged = {}
        for inp, beta in sinks:
            inp = frozenset(inp)
            merged[inp] = merged.get(inp, frozenset()) | frozenset(beta)
        sink_t = tuple(sorted(merged.items(), key=lambda it: set_key(it[0])))
        return cls(K, L, nodes, tails, sink_t)

    @classmethod
    def empty(cls):
        return cls(0, 0)

    # -- accessors ---------------------------------------------------------

    @property
    def N(self):
        return self.K + self.L

    @property
    def sources(self):
        return range(1, self.K + 1)

    @property
    def edge_ids(self):
        return range(self.K + 1, self.K + self.L + 1)

    def is_empty(self):
        return self.K == 0 and self.L == 0 and not self.nodes and not self.sinks

    def tail_inputs(self, e):
        """``In(Tl(e))`` for a non-source edge."""
        return self.nodes[self.tails[e - self.K - 1]]

    def enc(self):
        return {e: self.tail_inputs(e) for e in self.edge_ids}

    def out_edges(self, j):
        return [e for e in self.edge_ids if self.tails[e - self.K - 1] == j]

    def dangling(self):
        used = set(self.tails)
        return [self.nodes[j] for j in range(len(self.nodes)) if j not in used]

    def head_nodes(self, x):
        return [j for j, a in enumerate(self.nodes) if x in a]

    def head_sinks(self, x):
        return [k for k, (a, _) in enumerate(self.sinks) if x in a]

    def heads(self, x):
        """``Hd(x)`` as (node indices, sink indices)."""
        return self.head_nodes(x), self.head_sinks(x)

    def gamma(self, s):
        """Sinks demanding source ``s``."""
        return [k for k, (_, b) in enumerate(self.sinks) if s in b]

    def upstream_sources(self, ids):
        """Sources with a directed path into any of ``ids``."""
        seen, stack, found = set(), list(ids), set()
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            if 1 <= x <= self.K:
                found.add(x)
            elif self.K < x <= self.N:
                stack.extend(self.tail_inputs(x))
        return found

    def sigma(self, k):
        """Sources having a path to sink ``k``."""
        return self.upstream_sources(self.sinks[k][0])

    def __str__(self):
        if self.is_empty():
            return "<empty network>"
        parts = [f"({self.K},{self.L})"]
        for j, a in enumerate(self.nodes):
            outs = self.out_edges(j)
            parts.append(f"g{fmt_set(a)}->{fmt_set(outs)}")
        for a, b in self.sinks:
            parts.append(f"t{fmt_set(a)}:{fmt_set(b)}")
        return " ".join(parts)


def _find_cycle(deps):
    """Return the ids on some directed cycle of ``deps`` (x -> its inputs)."""
    color = {}
    for root in deps:
        if root in color:
            continue
        stack = [(root, iter(deps.get(root, ())))]
        path = [root]
        color[root] = 1
        while stack:
            x, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[x] = 2
                stack.pop()
                path.pop()
                continue
            if nxt not in deps:
                continue
            c = color.get(nxt)
            if c == 1:
                return set(path[path.index(nxt):])
            if c is None:
                color[nxt] = 1
                stack.append((nxt, iter(deps[nxt])))
                path.append(nxt)
    return None


def validate(net: Network):
    """Diagnostics for violated model invariants; empty list iff well formed."""
    out = []
    K, L = net.K, net.L
    ids = set(range(1, K + L + 1))
    if len(net.tails) != L:
        out.append(f"expected {L} edge tails, got {len(net.tails)}")
        return out
    for e, j in zip(net.edge_ids, net.tails):
        if not 0 <= j < len(net.nodes):
            out.append(f"edge {e} has no tail node")
    for j, a in enumerate(net.nodes):
        bad = set(a) - ids
        if bad:
            out.append(f"node {fmt_set(a)} reads unknown ids {fmt_set(bad)}")
    for a, b in net.sinks:
        bad = set(a) - ids
        if bad:
            out.append(f"sink {fmt_set(a)} reads unknown ids {fmt_set(bad)}")
        bad = set(b) - set(range(1, K + 1))
        if bad:
            out.append(f"sink {fmt_set(a)} demands non-sources {fmt_set(bad)}")
    if out:
        return out
    seen = {}
    for a in net.nodes:
        if a in seen:
            out.append(f"C5-representation violation: two nodes with input {fmt_set(a)}")
        seen[a] = True
    seen = {}
    for a, _ in net.sinks:
        if a in seen:
            out.append(f"C11-representation violation: two sinks with input {fmt_set(a)}")
        seen[a] = True
    deps = {e: net.nodes[j] for e, j in zip(net.edge_ids, net.tails)}
    cyc = _find_cycle(deps)
    if cyc:
        out.append(f"cycle {fmt_set(cyc)}")
    return out


@dataclass(frozen=True, order=False)
class EdgeRep:
    """The ordered pair (Q, W).

    ``Q`` holds ``(i, A)`` with ``A = In(Tl(i))`` for every non-source edge;
    ``W`` holds ``(s, A)`` meaning some sink with inputs ``A`` decodes source
    ``s``.  Both are kept as sorted tuples of ``(int, sorted tuple)`` pairs so
    plain tuple comparison gives the lexicographic order.
    """

    K: int
    L: int
    Q: tuple
    W: tuple

    @classmethod
    def make(cls, K, L, Q, W, check=True):
        q = tuple(sorted((int(i), set_key(a)) for i, a in Q))
        w = tuple(sorted(set((int(i), set_key(a)) for i, a in W)))
        rep = cls(int(K), int(L), q, w)
        if check:
            rep.check()
        return rep

    @classmethod
    def from_text(cls, text, K=None):
        """Parse the compact notation ``Q: 3<-{1,2}; W: 1<-{3}, 2<-{3}``."""
        m = re.fullmatch(r"\s*\{?\s*Q:(.*?);\s*W:(.*?)\}?\s*", text)
        if not m:
            raise MalformedRep(f"cannot parse {text!r}")

        def items(part):
            found = re.findall(r"(\d+)\s*<-\s*\{([\d,\s]*)\}", part)
            return [(int(i), [int(x) for x in a.replace(",", " ").split()]) for i, a in found]

        q, w = items(m.group(1)), items(m.group(2))
        L = len(q)
        if K is None:
            K = min(i for i, _ in q) - 1 if q else max(i for i, _ in w)
        return cls.make(K, L, q, w)

    @property
    def N(self):
        return self.K + self.L

    @property
    def key(self):
        return (self.Q, self.W)

    def check(self):
        K, L = self.K, self.L
        ids = set(range(1, K + L + 1))
        if len(self.Q) != L or {i for i, _ in self.Q} != set(range(K + 1, K + L + 1)):
            raise MalformedRep("Q must define each edge K+1..K+L exactly once")
        for i, a in self.Q:
            if not a:
                raise MalformedRep(f"edge {i} has an empty input set")
            if i in a or not set(a) <= ids:
                raise MalformedRep(f"edge {i} has invalid inputs {fmt_set(a)}")
        for i, a in self.W:
            if not 1 <= i <= K or not set(a) <= ids:
                raise MalformedRep(f"bad sink definition {i}<-{fmt_set(a)}")
        cyc = _find_cycle({i: a for i, a in self.Q})
        if cyc:
            raise MalformedRep(f"cycle {fmt_set(cyc)}")

    def inputs(self):
        return {i: a for i, a in self.Q}

    def __str__(self):
        q = ", ".join(f"{i}<-{fmt_set(a)}" for i, a in self.Q)
        w = ", ".join(f"{i}<-{fmt_set(a)}" for i, a in self.W)
        return f"{{Q: {q}; W: {w}}}"


def node_rep(rep: EdgeRep) -> Network:
    """Network described by a (Q, W) pair."""
    try:
        rep.check()
    except MalformedRep:
        raise
    return Network.build(
        rep.K, rep.L, {i: a for i, a in rep.Q}, [(a, (i,)) for i, a in rep.W]
    )


def edge_rep(net: Network) -> EdgeRep:
    """(Q, W) encoding of a network; raises NotEncodable when it would lose data."""
    diag = validate(net)
    if diag:
        raise NotEncodable("invalid network: " + "; ".join(diag))
    if net.dangling():
        raise NotEncodable("C6: node without outputs cannot be encoded")
    for a in net.nodes:
        if not a:
            raise NotEncodable("C6: node with empty input cannot be encoded")
    for a, b in net.sinks:
        if not b:
            raise NotEncodable(f"sink {fmt_set(a)} has no demand")
    q = [(e, net.tail_inputs(e)) for e in net.edge_ids]
    w = [(s, a) for a, b in net.sinks for s in b]
    return EdgeRep.make(net.K, net.L, q, w)


def reachable(rep: EdgeRep, src: int, dst: int) -> bool:
    """True iff a directed path of length >= 1 leads from ``src`` to ``dst``."""
    inputs = rep.inputs()
    stack, seen = list(inputs.get(dst, ())), set()
    while stack:
        x = stack.pop()
        if x == src:
            return True
        if x in seen:
            continue
        seen.add(x)
        stack.extend(inputs.get(x, ()))
    return False
