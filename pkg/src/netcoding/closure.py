"""Partial operator closure: grow a store of networks from seeds.

Each round merges every newly added network with every stored one (all
four merge kinds, pruned by the predicted merge size) and, when enabled,
applies every deletion and contraction to the new networks.  Results are
minimalized and canonicalized; their regions are carried along purely by
the operator maps, starting from the seed regions.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from . import cone as cn
from .errors import CapTooSmall
from .minimality import minimalize, push_region
from .netmodel import EdgeRep, Network, edge_rep, node_rep
from .operators import (
    combined_region,
    MERGE_OPS,
    embeddings,
    merge_candidates,
    predicted_size,
    region_after_embed,
)
from .rateregion import RateRegion, net_coords, outer_region
from .symmetry import canonicalize

__all__ = ["Entry", "partial_closure", "closure_stats", "to_canonical"]


@dataclass
class Entry:
    rep: EdgeRep
    region: RateRegion
    depth: int
    provenance: list = field(default_factory=list)

    @property
    def size(self):
        return self.rep.K, self.rep.L


def to_canonical(net: Network, R: RateRegion):
    """Canonical rep of a minimal network and its region in canonical labels."""
    if net.is_empty():
        return EdgeRep(0, 0, (), ()), R
    rep = edge_rep(net)
    crep, p = canonicalize(rep)
    names = {}
    for x in range(1, net.N + 1):
        tag = "w" if x <= net.K else "r"
        names[f"{tag}{x}"] = f"{tag}{p(x)}"
    c = cn.rename(R.cone, names)
    return crep, R.with_cone(cn.reorder(c, net_coords(node_rep(crep))))


def _fits(size, capK, capL):
    return size[0] <= capK and size[1] <= capL


def partial_closure(seeds, capK, capL, enable_embed=True, regions=None, max_rounds=None):
    """Fixed point of merges (and embeddings) under the caps.

    ``seeds`` are canonical minimal EdgeReps; ``regions`` optionally gives
    their outer regions (otherwise computed directly).  Returns a dict from
    canonical key to :class:`Entry`.
    """
    store = {}
    new = []
    for i, rep in enumerate(seeds):
        if not _fits((rep.K, rep.L), capK, capL):
            raise CapTooSmall(f"seed ({rep.K},{rep.L}) exceeds cap ({capK},{capL})")
        net = node_rep(rep)
        R = regions[i] if regions is not None else outer_region(net)
        crep, R = to_canonical(net, R)
        k = (crep.K, crep.L) + crep.key
        if k not in store:
            store[k] = Entry(crep, R, 0, ["seed"])
            new.append(k)

    def add(net, R, depth, prov, fresh):
        net, trace = minimalize(net)
        R = push_region(R, trace)
        crep, R = to_canonical(net, R)
        if crep.K + crep.L == 0 or not _fits((crep.K, crep.L), capK, capL):
            return
        k = (crep.K, crep.L) + crep.key
        if k in store:
            return
        store[k] = Entry(crep, R, depth, [prov])
        fresh.append(k)

    rounds = 0
    while new and (max_rounds is None or rounds < max_rounds):
        rounds += 1
        fresh = []
        new_set = set(new)
        for ka in new:
            a = store[ka]
            A = node_rep(a.rep)
            for kb in list(store):
                if kb in new_set and kb < ka:
                    continue  # new x new pairs visited once
                b = store[kb]
                if not _may_fit(a.rep, b.rep, capK, capL):
                    continue
                B = node_rep(b.rep)
                kinds = [k for k in MERGE_OPS if _fits(predicted_size(k, A, B), capK, capL)]
                for raw, rec in merge_candidates(A, B, kinds):
                    R = combined_region(rec, a.region, b.region)
                    add(raw, R, max(a.depth, b.depth) + 1, (rec.kind, ka, kb, rec.elements), fresh)
            if enable_embed:
                for res, rec in embeddings(A):
                    R = region_after_embed(a.region, rec)
                    # embedding results are already minimal
                    add(res, R, a.depth + 1, (rec.kind, ka, rec.elements), fresh)
        new = fresh
    return store


def _may_fit(a, b, capK, capL):
    # the smallest merge result: all sources shared, no new edges
    return a.K + b.K - min(a.K, b.K) <= capK and a.L + b.L <= capL


def closure_stats(store):
    """Counts per (K, L) cell and a histogram of provenance depths."""
    cells = Counter(e.size for e in store.values())
    depths = Counter(e.depth for e in store.values())
    return dict(sorted(cells.items())), dict(sorted(depths.items()))
