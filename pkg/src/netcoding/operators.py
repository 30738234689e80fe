"""Embedding and combination operators with their rate-region maps.

Embeddings (source deletion, edge deletion, edge contraction) shrink a
network and are always followed by ``minimalize``; the region of the
result comes from the region of the input by a section or a one-coordinate
projection and a push through the reduction trace.

Combinations merge two disjoint networks at sources, sinks, one
intermediate node or one edge.  The raw merge result is returned as-is
(it may be non-minimal); its region is a product of the operand regions
with a few identifications or extra rows.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

from . import cone as cn
from .errors import BadMap, InvalidElement
from .minimality import ReductionTrace, _Draft, minimalize, push_region
from .netmodel import EdgeRep, Network, edge_rep, node_rep
from .rateregion import RateRegion, net_coords
from .symmetry import canonicalize

__all__ = [
    "OpRecord",
    "delete_source",
    "delete_edge",
    "contract_edge",
    "region_after_delete",
    "region_after_contract",
    "region_after_embed",
    "merge_sources",
    "merge_sinks",
    "merge_node",
    "merge_edge",
    "combined_region",
    "canonical_key",
    "is_minor",
    "minor_scan",
    "embeddings",
]

EMBED_OPS = ("del-src", "del-edge", "contract")
MERGE_OPS = ("src-merge", "sink-merge", "node-merge", "edge-merge")


@dataclass(frozen=True)
class OpRecord:
    """Provenance of one operator application.

    ``relabel`` maps the operand ids to ids of ``raw`` (for merges, as pairs
    ``((side, id), new id)`` with side 0 or 1).  ``trace`` is the
    minimalization of ``raw``; for merges it is filled only on request.
    """

    kind: str
    operands: tuple
    elements: tuple
    raw: Network
    relabel: tuple
    trace: ReductionTrace | None = None
    extra: tuple = ()

    @property
    def result(self):
        return self.trace.result if self.trace is not None else self.raw

    def relabel_map(self):
        return dict(self.relabel)

    def __str__(self):
        return f"{self.kind} {self.elements}"


def _coord(net, x):
    return f"w{x}" if x <= net.K else f"r{x}"


# -- embeddings ------------------------------------------------------------

def _embed(kind, net, x, d):
    raw, rel = d.assemble()
    _, trace = minimalize(raw)
    return trace.result, OpRecord(kind, (net,), (x,), raw, tuple(sorted(rel.items())), trace)


def delete_source(net: Network, k: int):
    if k not in net.sources:
        raise InvalidElement(f"{k} is not a source of a ({net.K},{net.L}) network")
    d = _Draft(net)
    d.drop_source(k)
    return _embed("del-src", net, k, d)


def delete_edge(net: Network, e: int):
    if e not in net.edge_ids:
        raise InvalidElement(f"{e} is not a non-source edge (use delete_source for sources)")
    d = _Draft(net)
    d.drop_edge(e)
    return _embed("del-edge", net, e, d)


def contract_edge(net: Network, e: int):
    """Heads of ``e`` read ``In(Tl(e))`` directly; ``e`` disappears."""
    if e not in net.edge_ids:
        raise InvalidElement(f"{e} is not a non-source edge")
    d = _Draft(net)
    feed = set(net.tail_inputs(e))
    for a in d.nodes:
        if e in a:
            a.discard(e)
            a |= feed
    for a, _ in d.sinks:
        if e in a:
            a.discard(e)
            a |= feed
    d.drop_edge(e)
    return _embed("contract", net, e, d)


def _to_raw(c, rec):
    net = rec.operands[0]
    names = {_coord(net, x): _coord(rec.raw, y) for x, y in rec.relabel}
    return cn.reorder(cn.rename(c, names), net_coords(rec.raw))


def region_after_delete(R: RateRegion, rec: OpRecord) -> RateRegion:
    """Section the deleted coordinate at 0, drop it, push through the trace."""
    net = rec.operands[0]
    (x,) = rec.elements
    c = cn.section_zero(R.cone, _coord(net, x))
    return push_region(R.with_cone(_to_raw(c, rec)), rec.trace)


def region_after_contract(R: RateRegion, rec: OpRecord) -> RateRegion:
    """Project out the contracted rate, push through the trace.

    For scalar codes this only gives an inner bound of the contracted
    network's scalar region, so the label is marked accordingly.
    """
    net = rec.operands[0]
    (e,) = rec.elements
    c = cn.eliminate(R.cone, [_coord(net, e)])
    out = push_region(RateRegion(_to_raw(c, rec), R.bound), rec.trace)
    if R.bound.startswith("scalar"):
        out = RateRegion(out.cone, R.bound + "-inner")
    return out


def region_after_embed(R, rec):
    if rec.kind == "contract":
        return region_after_contract(R, rec)
    return region_after_delete(R, rec)


def embeddings(net: Network):
    """All single embedding operations: yields ``(result, record)``."""
    for k in net.sources:
        yield delete_source(net, k)
    for e in net.edge_ids:
        yield delete_edge(net, e)
    for e in net.edge_ids:
        yield contract_edge(net, e)


# -- combinations ------------------------------------------------------------

class _Union:
    """Disjoint union of two networks in the merged id space.

    Sources of A come first, then the unmerged sources of B; edges of A,
    then edges of B, then any new edges.  Elements are addressed as
    ``(side, old id)``.
    """

    def __init__(self, A, B, merged_src=None, drop_edges=(), new_edges=0):
        merged_src = merged_src or {}
        self.A, self.B = A, B
        rel = {}
        for s in A.sources:
            rel[(0, s)] = s
        nxt = A.K + 1
        for s in B.sources:
            if s in merged_src:
                continue
            rel[(1, s)] = nxt
            nxt += 1
        for s, t in merged_src.items():
            rel[(1, s)] = t
        self.K = nxt - 1
        for e in A.edge_ids:
            if (0, e) not in drop_edges:
                rel[(0, e)] = nxt
                nxt += 1
        for e in B.edge_ids:
            if (1, e) not in drop_edges:
                rel[(1, e)] = nxt
                nxt += 1
        self.new = list(range(nxt, nxt + new_edges))
        self.L = nxt + new_edges - 1 - self.K
        self.rel = rel
        # nodes: list of [inputs, side-local index]; edges map new id -> node slot
        self.nodes = []
        self.tails = {}
        for side, net in ((0, A), (1, B)):
            base = len(self.nodes)
            for a in net.nodes:
                self.nodes.append(set(self.map(side, x) for x in a if (side, x) in rel))
            for e in net.edge_ids:
                if (side, e) in rel:
                    self.tails[rel[(side, e)]] = base + net.tails[e - net.K - 1]
        self.sinks = []
        for side, net in ((0, A), (1, B)):
            for a, b in net.sinks:
                self.sinks.append([set(self.map(side, x) for x in a if (side, x) in rel),
                                   set(self.map(side, x) for x in b)])

    def map(self, side, x):
        return self.rel[(side, x)]

    def node_slot(self, side, j):
        return j if side == 0 else len(self.A.nodes) + j

    def sink_slot(self, side, k):
        return k if side == 0 else len(self.A.sinks) + k

    def build(self, dead_nodes=(), dead_sinks=()):
        keep = [j for j in range(len(self.nodes)) if j not in set(dead_nodes)]
        pos = {j: i for i, j in enumerate(keep)}
        nodes = tuple(frozenset(self.nodes[j]) for j in keep)
        tails = tuple(pos[self.tails[e]] for e in range(self.K + 1, self.K + self.L + 1))
        sinks = tuple((frozenset(a), frozenset(b)) for k, (a, b) in enumerate(self.sinks) if k not in set(dead_sinks))
        return Network(self.K, self.L, nodes, tails, sinks)

    def relabel(self):
        return tuple(sorted(self.rel.items()))


def _finish(kind, A, B, elements, u, raw, extra=(), canonical=False):
    trace = minimalize(raw)[1] if canonical else None
    return raw, OpRecord(kind, (A, B), elements, raw, u.relabel(), trace, extra)


def merge_sources(A: Network, S_hat, B: Network, pi, canonical=False):
    """Identify each source ``s`` in ``S_hat`` of A with ``pi[s]`` of B."""
    S_hat = tuple(sorted(S_hat))
    pi = dict(pi)
    if set(pi) != set(S_hat) or any(s not in A.sources for s in S_hat):
        raise BadMap("pi must be defined exactly on S_hat, a set of sources of the first network")
    img = [pi[s] for s in S_hat]
    if len(set(img)) != len(img) or any(t not in B.sources for t in img):
        raise BadMap("pi must be injective into the sources of the second network")
    u = _Union(A, B, merged_src={pi[s]: s for s in S_hat})
    raw = u.build()
    return _finish("src-merge", A, B, tuple((s, pi[s]) for s in S_hat), u, raw, canonical=canonical)


def merge_sinks(A: Network, T_hat, B: Network, pi, canonical=False):
    """Merge sink ``t`` of A (index) with sink ``pi[t]`` of B: inputs and demands unioned."""
    T_hat = tuple(sorted(T_hat))
    pi = dict(pi)
    if set(pi) != set(T_hat) or any(not 0 <= t < len(A.sinks) for t in T_hat):
        raise BadMap("pi must be defined exactly on T_hat, sink indices of the first network")
    img = [pi[t] for t in T_hat]
    if len(set(img)) != len(img) or any(not 0 <= t < len(B.sinks) for t in img):
        raise BadMap("pi must be injective into the sinks of the second network")
    u = _Union(A, B)
    dead = []
    for t in T_hat:
        j = u.sink_slot(1, pi[t])
        u.sinks[t][0] |= u.sinks[j][0]
        u.sinks[t][1] |= u.sinks[j][1]
        dead.append(j)
    raw = u.build(dead_sinks=dead)
    return _finish("sink-merge", A, B, tuple((t, pi[t]) for t in T_hat), u, raw, canonical=canonical)


def merge_node(A: Network, g, B: Network, g2, canonical=False):
    """Merge intermediate node ``g`` of A with ``g2`` of B (indices)."""
    if isinstance(g, (tuple, list, set, frozenset)) or isinstance(g2, (tuple, list, set, frozenset)):
        raise BadMap("node merge takes exactly one node from each network")
    if not (0 <= g < len(A.nodes) and 0 <= g2 < len(B.nodes)):
        raise BadMap("node index out of range")
    u = _Union(A, B)
    j = u.node_slot(1, g2)
    u.nodes[g] |= u.nodes[j]
    for e, t in u.tails.items():
        if t == j:
            u.tails[e] = g
    raw = u.build(dead_nodes=[j])
    return _finish("node-merge", A, B, ((g, g2),), u, raw, canonical=canonical)


def merge_edge(A: Network, e, B: Network, e2, canonical=False):
    """Route edge ``e`` of A and ``e2`` of B through a new shared node g0.

    The four new edges are, in id order: Tl(e)->g0, Tl(e2)->g0, g0->Hd(e),
    g0->Hd(e2).  Their ids are stored in the record's ``extra``.
    """
    if isinstance(e, (tuple, list, set, frozenset)) or isinstance(e2, (tuple, list, set, frozenset)):
        raise BadMap("edge merge takes exactly one edge from each network")
    if e not in A.edge_ids or e2 not in B.edge_ids:
        raise BadMap("edge merge needs a non-source edge on each side")
    u = _Union(A, B, drop_edges={(0, e), (1, e2)}, new_edges=4)
    a, b, c, d = u.new
    # the two old tails now feed g0
    u.tails[a] = A.tails[e - A.K - 1]
    u.tails[b] = u.node_slot(1, B.tails[e2 - B.K - 1])
    g0 = len(u.nodes)
    u.nodes.append({a, b})
    u.tails[c] = g0
    u.tails[d] = g0
    # former heads of e read c, former heads of e2 read d
    for j in A.head_nodes(e):
        u.nodes[j].add(c)
    for k in A.head_sinks(e):
        u.sinks[k][0].add(c)
    for j in B.head_nodes(e2):
        u.nodes[u.node_slot(1, j)].add(d)
    for k in B.head_sinks(e2):
        u.sinks[u.sink_slot(1, k)][0].add(d)
    raw = u.build()
    return _finish("edge-merge", A, B, ((e, e2),), u, raw, extra=(a, b, c, d), canonical=canonical)


def combined_region(rec: OpRecord, RA: RateRegion, RB: RateRegion, method="concat") -> RateRegion:
    """Region of the raw merge result from the operand regions.

    Source merge: ``method="concat"`` concatenates the inequality lists and
    renames the merged source of B (the cheap route); ``method="product"``
    intersects the product with the identifications and projects.  Edge
    merge: product, the four chaining rows, then eliminate the two old
    rates.  Sink and node merge: product with relabeled coordinates.
    """
    if rec.kind not in MERGE_OPS:
        raise BadMap(f"{rec.kind} is not a merge record")
    A, B = rec.operands
    raw = rec.raw
    rel = rec.relabel_map()
    K = raw.K

    def name(y):
        return f"w{y}" if y <= K else f"r{y}"

    def renamed(R, side, net, dropped):
        m = {}
        for x in range(1, net.N + 1):
            key = (side, x)
            if key in dropped:
                m[_coord(net, x)] = dropped[key]
            else:
                m[_coord(net, x)] = name(rel[key])
        return cn.rename(R.cone, m)

    if rec.kind == "src-merge":
        pairs = rec.elements
        if method == "concat":
            ca = renamed(RA, 0, A, {})
            cb = renamed(RB, 1, B, {})
            coords = net_coords(raw)
            rows, eqs = [], []
            for c in (ca, cb):
                e0, i0 = c.raw_h()
                idx = [coords.index(x) for x in c.coords]
                for r, dest in ((i0, rows), (e0, eqs)):
                    for v in r:
                        full = [0] * len(coords)
                        for j, val in zip(idx, v):
                            full[j] += val
                        dest.append(full)
            cone = cn.Cone.from_h(coords, rows, eqs)
        else:
            tmp = {(1, t): f"_b{t}" for _, t in pairs}
            cone = cn.product(renamed(RA, 0, A, {}), renamed(RB, 1, B, tmp))
            eq = []
            for s, t in pairs:
                v = [0] * cone.n
                v[cone.index(name(rel[(0, s)]))] = 1
                v[cone.index(tmp[(1, t)])] = -1
                eq.append(v)
            cone = cn.eliminate(cn.intersect(cone, eqs=eq), list(tmp.values()))
    elif rec.kind in ("sink-merge", "node-merge"):
        cone = cn.product(renamed(RA, 0, A, {}), renamed(RB, 1, B, {}))
    elif rec.kind == "edge-merge":
        ((e, e2),) = rec.elements
        a, b, c, d = rec.extra
        tmp = {(0, e): "_e", (1, e2): "_f"}
        cone = cn.product(renamed(RA, 0, A, tmp), renamed(RB, 1, B, tmp))
        for y in (a, b, c, d):
            cone = cn.add_nonneg(cone, name(y))
        rows = []
        for y, src in ((a, "_e"), (c, "_e"), (b, "_f"), (d, "_f")):
            v = [0] * cone.n
            v[cone.index(name(y))] = 1
            v[cone.index(src)] = -1
            rows.append(v)
        cone = cn.eliminate(cn.intersect(cone, rows), ["_e", "_f"], method="fm")
    else:
        raise BadMap(f"{rec.kind} is not a merge record")
    return RateRegion(cn.reorder(cone, net_coords(raw)), RA.bound)


# -- minors ---------------------------------------------------------------------

def canonical_key(net: Network):
    if net.is_empty():
        return (0, 0, (), ())
    rep = edge_rep(net)
    c = canonicalize(rep)[0]
    return (c.K, c.L) + c.key


def _as_net(x):
    return node_rep(x) if isinstance(x, EdgeRep) else x


def is_minor(small, big, budget: int):
    """A shortest sequence of embedding ops taking ``big`` to ``small``, or None.

    Breadth-first over canonical forms, so the witness is shortest; each
    step is ``(op, element)`` applied to the canonical form reached so far.
    """
    small, big = _as_net(small), _as_net(big)
    target = canonical_key(small)
    k0 = canonical_key(big)
    if k0 == target:
        return []
    if small.K > big.K or small.L > big.L:
        return None
    seen = {k0}
    frontier = deque([(big, [])])
    while frontier:
        net, path = frontier.popleft()
        if len(path) >= budget:
            continue
        for res, rec in embeddings(net):
            k = canonical_key(res)
            if k in seen:
                continue
            step = path + [(rec.kind, rec.elements[0])]
            if k == target:
                return step
            seen.add(k)
            if res.K >= small.K and res.L >= small.L:
                frontier.append((_canonical_net(res), step))
    return None


def _canonical_net(net):
    if net.is_empty():
        return net
    return node_rep(canonicalize(edge_rep(net))[0])


def minor_scan(net, forbidden, budget=None):
    """Every forbidden network that is a minor of ``net``, with a witness."""
    net = _as_net(net)
    budget = net.K + net.L if budget is None else budget
    hits = []
    for f in forbidden:
        w = is_minor(f, net, budget)
        if w is not None:
            hits.append((f, w))
    return hits


def merge_candidates(A: Network, B: Network, kinds=MERGE_OPS):
    """All single merges of A with B: yields ``(raw, record)``."""
    if "src-merge" in kinds:
        yield from _src_merges(A, B)
    if "sink-merge" in kinds:
        yield from _sink_merges(A, B)
    if "node-merge" in kinds:
        for g in range(len(A.nodes)):
            for g2 in range(len(B.nodes)):
                yield merge_node(A, g, B, g2)
    if "edge-merge" in kinds:
        for e in A.edge_ids:
            for e2 in B.edge_ids:
                yield merge_edge(A, e, B, e2)


def _src_merges(A, B):
    for r in range(1, min(A.K, B.K) + 1):
        for S_hat in itertools.combinations(A.sources, r):
            for img in itertools.permutations(B.sources, r):
                yield merge_sources(A, S_hat, B, dict(zip(S_hat, img)))


def _sink_merges(A, B):
    for r in range(1, min(len(A.sinks), len(B.sinks)) + 1):
        for T_hat in itertools.combinations(range(len(A.sinks)), r):
            for img in itertools.permutations(range(len(B.sinks)), r):
                yield merge_sinks(A, T_hat, B, dict(zip(T_hat, img)))


def predicted_size(kind, A, B, n_merged=None):
    """Size of a merge result computed from the operands alone.

    With ``n_merged`` left out, a source merge is predicted at its largest
    legal result, one shared source.
    """
    if kind == "src-merge":
        return A.K + B.K - (1 if n_merged is None else n_merged), A.L + B.L
    if kind == "edge-merge":
        return A.K + B.K, A.L + B.L + 2
    return A.K + B.K, A.L + B.L
