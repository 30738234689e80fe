"""Minimality conditions, reductions and rate-region transfer.

Each violated condition ``Cn`` has a reduction ``Dn`` producing a smaller
network together with a record that knows how to move a rate region across
the reduction in both directions.  After every reduction the surviving
sources and edges are relabeled to contiguous ids.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import cone as cn
from .errors import CoordinateMismatch, NetCodingError, NotViolated
from .netmodel import Network, fmt_set, set_key
from .rateregion import RateRegion, net_coords

__all__ = [
    "ConditionId",
    "ReductionRecord",
    "ReductionTrace",
    "violations",
    "is_minimal",
    "reduce",
    "minimalize",
    "replay",
    "push_region",
    "lift_region",
    "CHECK_ORDER",
]

TAGS = tuple(f"C{i}" for i in range(1, 15))
CHECK_ORDER = ("C1", "C2", "C6", "C5", "C3", "C4", "C7", "C8", "C9", "C10", "C11", "C12", "C13", "C14")


@dataclass(frozen=True)
class ConditionId:
    """A violated condition and its witness.

    Sources and edges are given by id, nodes and sinks by their index in
    ``net.nodes`` / ``net.sinks``.
    """

    tag: str
    sources: tuple = ()
    edges: tuple = ()
    nodes: tuple = ()
    sinks: tuple = ()

    def __str__(self):
        parts = []
        for name, xs in (("sources", self.sources), ("edges", self.edges),
                         ("nodes", self.nodes), ("sinks", self.sinks)):
            if xs:
                parts.append(f"{name} {','.join(map(str, xs))}")
        return f"{self.tag}({'; '.join(parts)})"


# -- condition predicates ----------------------------------------------------

def _heads(net, x):
    return (tuple(net.head_nodes(x)), tuple(net.head_sinks(x)))


def _components(net):
    parent = {}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    verts = [(0, s) for s in net.sources] + [(1, j) for j in range(len(net.nodes))] + \
            [(2, k) for k in range(len(net.sinks))]
    for v in verts:
        parent[v] = v
    for x in range(1, net.N + 1):
        tail = (0, x) if x <= net.K else (1, net.tails[x - net.K - 1])
        hn, hs = _heads(net, x)
        for j in hn:
            union(tail, (1, j))
        for k in hs:
            union(tail, (2, k))
    comps = {}
    for v in verts:
        comps.setdefault(find(v), []).append(v)
    return sorted(comps.values())


def _witnesses(net, tag):
    K = net.K
    srcs = list(net.sources)
    if tag == "C1":
        for s in srcs:
            if not net.head_nodes(s):
                yield ConditionId(tag, sources=(s,))
    elif tag == "C2":
        for k, (a, b) in enumerate(net.sinks):
            for s in sorted(a & b):
                if s <= K:
                    yield ConditionId(tag, sources=(s,), sinks=(k,))
    elif tag == "C3":
        for s in srcs:
            if not net.gamma(s):
                yield ConditionId(tag, sources=(s,))
    elif tag == "C4":
        info = {s: (_heads(net, s), tuple(net.gamma(s))) for s in srcs}
        for i, s in enumerate(srcs):
            for s2 in srcs[i + 1:]:
                if info[s] == info[s2]:
                    yield ConditionId(tag, sources=(s, s2))
    elif tag == "C5":
        for j, a in enumerate(net.nodes):
            for j2 in range(j + 1, len(net.nodes)):
                if net.nodes[j2] == a:
                    yield ConditionId(tag, nodes=(j, j2))
    elif tag == "C6":
        used = set(net.tails)
        for j, a in enumerate(net.nodes):
            if not a or j not in used:
                yield ConditionId(tag, nodes=(j,))
        for k, (a, b) in enumerate(net.sinks):
            if not a or not b:
                yield ConditionId(tag, sinks=(k,))
    elif tag == "C7":
        for e in net.edge_ids:
            if _heads(net, e) == ((), ()):
                yield ConditionId(tag, edges=(e,))
    elif tag == "C8":
        es = list(net.edge_ids)
        info = {e: (net.tails[e - K - 1], _heads(net, e)) for e in es}
        for i, e in enumerate(es):
            for e2 in es[i + 1:]:
                if info[e] == info[e2]:
                    yield ConditionId(tag, edges=(e, e2))
    elif tag == "C9":
        # the in-edge must be a non-source edge
        for j, a in enumerate(net.nodes):
            if len(a) != 1:
                continue
            (e,) = a
            if e <= K:
                continue
            outs = net.out_edges(j)
            if len(outs) == 1 and _heads(net, e) == ((j,), ()):
                yield ConditionId(tag, edges=(e, outs[0]), nodes=(j,))
    elif tag == "C10":
        for k, (a, b) in enumerate(net.sinks):
            reach = net.sigma(k)
            for s in sorted(b - reach):
                yield ConditionId(tag, sources=(s,), sinks=(k,))
    elif tag == "C11":
        for k, (a, _) in enumerate(net.sinks):
            for k2 in range(k + 1, len(net.sinks)):
                if net.sinks[k2][0] == a:
                    yield ConditionId(tag, sinks=(k, k2))
    elif tag == "C12":
        for k, (a, b) in enumerate(net.sinks):
            for k2, (a2, b2) in enumerate(net.sinks):
                if k != k2 and a <= a2 and b & b2:
                    yield ConditionId(tag, sinks=(k, k2))
    elif tag == "C13":
        for k, (a, b) in enumerate(net.sinks):
            for k2, (a2, b2) in enumerate(net.sinks):
                if k != k2 and a <= a2:
                    for s in sorted(b & a2):
                        if s <= K:
                            yield ConditionId(tag, sources=(s,), sinks=(k, k2))
    elif tag == "C14":
        comps = _components(net)
        if len(comps) > 1:
            side = [v for c in comps[1:] for v in c]
            yield ConditionId(
                tag,
                sources=tuple(i for t, i in side if t == 0),
                nodes=tuple(i for t, i in side if t == 1),
                sinks=tuple(i for t, i in side if t == 2),
            )
    else:
        raise ValueError(f"unknown condition {tag!r}")


def violations(net: Network):
    """All violated conditions with witnesses, in condition-id order."""
    return [w for tag in TAGS for w in _witnesses(net, tag)]


def first_violation(net: Network):
    for tag in CHECK_ORDER:
        for w in _witnesses(net, tag):
            return w
    return None


def is_minimal(net: Network):
    return first_violation(net) is None


# -- reductions --------------------------------------------------------------

class _Draft:
    """Mutable copy of a network, in the original labels."""

    def __init__(self, net):
        self.K = net.K
        self.sources = list(net.sources)
        self.edges = {e: net.tails[e - net.K - 1] for e in net.edge_ids}
        self.nodes = [set(a) for a in net.nodes]
        self.sinks = [[set(a), set(b)] for a, b in net.sinks]
        self.dead_nodes = set()
        self.dead_sinks = set()

    def drop_source(self, s):
        self.sources.remove(s)
        self._scrub(s)
        for _, b in self.sinks:
            b.discard(s)

    def drop_edge(self, e):
        del self.edges[e]
        self._scrub(e)

    def _scrub(self, x):
        for a in self.nodes:
            a.discard(x)
        for a, _ in self.sinks:
            a.discard(x)

    def assemble(self, keep_sources=None, keep_nodes=None, keep_sinks=None):
        """Relabel to contiguous ids; returns (Network, old id -> new id)."""
        srcs = sorted(self.sources if keep_sources is None else keep_sources)
        nodes = [j for j in range(len(self.nodes)) if j not in self.dead_nodes]
        if keep_nodes is not None:
            nodes = [j for j in nodes if j in keep_nodes]
        sinks = [k for k in range(len(self.sinks)) if k not in self.dead_sinks]
        if keep_sinks is not None:
            sinks = [k for k in sinks if k in keep_sinks]
        node_set = set(nodes)
        edges = sorted(e for e, j in self.edges.items() if j in node_set)
        relabel = {s: i + 1 for i, s in enumerate(srcs)}
        K = len(srcs)
        relabel.update({e: K + 1 + i for i, e in enumerate(edges)})
        mapped = {j: frozenset(relabel[x] for x in self.nodes[j]) for j in nodes}
        order = sorted(nodes, key=lambda j: set_key(mapped[j]))
        pos = {j: i for i, j in enumerate(order)}
        tails = tuple(pos[self.edges[e]] for e in edges)
        sink_t = [
            (frozenset(relabel[x] for x in self.sinks[k][0]), frozenset(relabel[x] for x in self.sinks[k][1]))
            for k in sinks
        ]
        sink_t.sort(key=lambda ab: (set_key(ab[0]), set_key(ab[1])))
        net = Network(K, len(edges), tuple(mapped[j] for j in order), tails, tuple(sink_t))
        return net, relabel


@dataclass(frozen=True)
class ReductionRecord:
    """One reduction step.

    ``transfer`` lists coordinate operations in the pre-reduction labels:
    ``("zero", x)`` / ``("free", x)`` for dropped coordinates (pinned to 0 or
    free nonnegative on lift), ``("sum", x, y)`` and ``("min", x, y)`` for
    merged coordinates kept as ``x``, and ``("split", coords)`` for the side
    coordinates removed by a connectivity split.
    """

    rule: str
    witness: ConditionId
    before: Network
    after: Network
    relabel: tuple
    transfer: tuple = ()
    side: Network | None = None
    side_relabel: tuple = ()

    def relabel_map(self):
        return dict(self.relabel)

    def __str__(self):
        return f"{self.rule} {self.witness}"


@dataclass(frozen=True)
class ReductionTrace:
    original: Network
    records: tuple = ()
    result: Network | None = None

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def rules(self):
        return [r.rule for r in self.records]


def _coord(net, x):
    return f"w{x}" if x <= net.K else f"r{x}"


def reduce(net: Network, c: ConditionId):
    """Apply the reduction for violated condition ``c``."""
    if c not in list(_witnesses(net, c.tag)):
        raise NotViolated(f"{c} is not violated")
    d = _Draft(net)
    tag = c.tag
    transfer = []
    rule = "D" + tag[1:]
    side = None
    side_relabel = ()
    if tag == "C1":
        (s,) = c.sources
        zero = any(s in b and s not in a for a, b in net.sinks)
        transfer.append(("zero" if zero else "free", _coord(net, s)))
        d.drop_source(s)
    elif tag == "C2":
        (s,), (k,) = c.sources, c.sinks
        d.sinks[k][0].discard(s)
        d.sinks[k][1].discard(s)
    elif tag == "C3":
        (s,) = c.sources
        transfer.append(("free", _coord(net, s)))
        d.drop_source(s)
    elif tag == "C4":
        s, s2 = c.sources
        transfer.append(("sum", _coord(net, s), _coord(net, s2)))
        d.drop_source(s2)
    elif tag == "C5":
        j, j2 = c.nodes
        for e, t in d.edges.items():
            if t == j2:
                d.edges[e] = j
        d.dead_nodes.add(j2)
    elif tag == "C6":
        if c.nodes:
            (j,) = c.nodes
            rule = "D6-node"
            if not net.nodes[j]:
                for e in net.out_edges(j):
                    transfer.append(("free", _coord(net, e)))
                    d.drop_edge(e)
            d.dead_nodes.add(j)
        else:
            (k,) = c.sinks
            rule = "D6-sink"
            a, b = net.sinks[k]
            d.dead_sinks.add(k)
            if not a:
                for s in sorted(b):
                    transfer.append(("zero", _coord(net, s)))
                    d.drop_source(s)
    elif tag == "C7":
        (e,) = c.edges
        transfer.append(("free", _coord(net, e)))
        d.drop_edge(e)
    elif tag == "C8":
        e, e2 = c.edges
        transfer.append(("sum", _coord(net, e), _coord(net, e2)))
        d.drop_edge(e2)
    elif tag == "C9":
        (e, e2), (g,) = c.edges, c.nodes
        transfer.append(("min", _coord(net, e), _coord(net, e2)))
        for a in d.nodes:
            if e2 in a:
                a.discard(e2)
                a.add(e)
        for a, _ in d.sinks:
            if e2 in a:
                a.discard(e2)
                a.add(e)
        del d.edges[e2]
        d.nodes[g].discard(e)
        d.dead_nodes.add(g)
    elif tag == "C10":
        (s,) = c.sources
        transfer.append(("zero", _coord(net, s)))
        d.drop_source(s)
    elif tag == "C11":
        k, k2 = c.sinks
        d.sinks[k][1] |= d.sinks[k2][1]
        d.dead_sinks.add(k2)
    elif tag == "C12":
        k, k2 = c.sinks
        d.sinks[k2][1] -= net.sinks[k][1]
    elif tag == "C13":
        (s,), (k, k2) = c.sources, c.sinks
        d.sinks[k2][0].discard(s)
    elif tag == "C14":
        side_src, side_nodes, side_sinks = set(c.sources), set(c.nodes), set(c.sinks)
        all_nodes = set(range(len(net.nodes)))
        all_sinks = set(range(len(net.sinks)))
        side, srel = d.assemble(side_src, side_nodes, side_sinks)
        side_relabel = tuple(sorted(srel.items()))
        transfer.append(("split", tuple(_coord(net, x) for x in sorted(srel))))
        after, rel = d.assemble(
            [s for s in d.sources if s not in side_src], all_nodes - side_nodes, all_sinks - side_sinks
        )
        rec = ReductionRecord(rule, c, net, after, tuple(sorted(rel.items())), tuple(transfer), side, side_relabel)
        return after, rec
    after, rel = d.assemble()
    rec = ReductionRecord(rule, c, net, after, tuple(sorted(rel.items())), tuple(transfer), side, side_relabel)
    return after, rec


def _measure(net):
    return (net.K + len(net.nodes) + len(net.sinks) + net.N
            + sum(len(b) + len(a) for a, b in net.sinks))


def minimalize(net: Network):
    """Reduce to a minimal network, checking conditions in the fixed order.

    Returns ``(network, trace)``; the network may be empty.
    """
    records = []
    cur = net
    while True:
        w = first_violation(cur)
        if w is None:
            break
        nxt, rec = reduce(cur, w)
        assert _measure(nxt) < _measure(cur), rec
        records.append(rec)
        cur = nxt
    return cur, ReductionTrace(net, tuple(records), cur)


def replay(trace: ReductionTrace):
    """Re-apply the recorded reductions; returns the final network."""
    cur = trace.original
    for rec in trace.records:
        if cur != rec.before:
            raise NetCodingError(f"trace does not replay at {rec}")
        cur, _ = reduce(cur, rec.witness)
    return cur


# -- region transfer ---------------------------------------------------------

def _as_region(R):
    return R if isinstance(R, RateRegion) else RateRegion(R)


def _check_coords(c, net):
    want = net_coords(net)
    if c.coords != want:
        raise CoordinateMismatch(f"region over {c.coords}, network needs {want}")


def _push_one(c, rec):
    for op in rec.transfer:
        kind = op[0]
        if kind in ("zero", "free"):
            c = cn.eliminate(c, [op[1]])
        elif kind == "sum":
            c = cn.section_zero(c, op[2])
        elif kind == "min":
            c = cn.diagonal(c, op[1], op[2])
        elif kind == "split":
            c = cn.eliminate(c, list(op[1]))
    rel = rec.relabel_map()
    names = {_coord(rec.before, x): _coord(rec.after, y) for x, y in rel.items()}
    c = cn.rename(c, names)
    return cn.reorder(c, net_coords(rec.after))


def _unit(c, x):
    j = c.index(x)
    return tuple(int(i == j) for i in range(c.n))


def _lift_one(c, rec, side_region):
    rel = rec.relabel_map()
    back = {_coord(rec.after, y): _coord(rec.before, x) for x, y in rel.items()}
    c = cn.rename(c, back)
    for op in reversed(rec.transfer):
        kind = op[0]
        if kind == "zero":
            c = cn.add_zero(c, op[1])
        elif kind == "free":
            c = cn.add_nonneg(c, op[1])
        elif kind == "sum":
            # the merged coordinate only bounds a + b; each part stays nonnegative
            c = cn.substitute_sum(c, op[1], op[1], op[2])
            c = cn.intersect(c, [_unit(c, op[1]), _unit(c, op[2])])
        elif kind == "min":
            c = cn.substitute_min(c, op[1], op[1], op[2])
        elif kind == "split":
            if side_region is None:
                raise NetCodingError("lifting a connectivity split needs side_region")
            sc = _as_region(side_region(rec.side)).cone
            _check_coords(sc, rec.side)
            srel = dict(rec.side_relabel)
            sc = cn.rename(sc, {_coord(rec.side, y): _coord(rec.before, x) for x, y in srel.items()})
            c = cn.product(c, sc)
    return cn.reorder(c, net_coords(rec.before))


def push_region(R, trace: ReductionTrace):
    """Region of the reduced network from a region of the original one."""
    R = _as_region(R)
    if not trace.records:
        return R
    c = R.cone
    _check_coords(c, trace.records[0].before)
    for rec in trace.records:
        c = _push_one(c, rec)
    return R.with_cone(c)


def lift_region(R, trace: ReductionTrace, side_region=None):
    """Region of the original network from a region of the reduced one.

    ``side_region(net)`` must supply regions for components split off by a
    connectivity reduction.
    """
    R = _as_region(R)
    if not trace.records:
        return R
    c = R.cone
    _check_coords(c, trace.records[-1].after)
    for rec in reversed(trace.records):
        c = _lift_one(c, rec, side_region)
    return R.with_cone(c)
