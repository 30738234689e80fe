"""Command-line entry point (``netcoding``).

Exit status: 0 on success, 1 on a domain error, 2 on a parse or usage error.
"""

from __future__ import annotations

import argparse
import glob
import math
import os
import sys

from . import cone as cn
from .closure import closure_stats, partial_closure, to_canonical
from .db import Database
from .enumeration import enumerate_networks
from .errors import NetCodingError, ParseError
from .io import read_network, read_region, write_network, write_region
from .minimality import minimalize, push_region
from .netmodel import edge_rep, node_rep
from .operators import (
    combined_region,
    contract_edge,
    delete_edge,
    delete_source,
    is_minor,
    merge_edge,
    merge_node,
    merge_sinks,
    merge_sources,
    region_after_embed,
)
from .rateregion import OUTER, bound_label, inner_region, outer_region, sufficiency
from .symmetry import canonicalize, stabilizer


def _parse_bound(text):
    """``shannon`` | ``scalar:q`` | ``vector:q:ntot`` -> (q, ntot) or None."""
    parts = text.split(":")
    try:
        if parts == ["shannon"]:
            return None
        if parts[0] == "scalar" and len(parts) == 2:
            return int(parts[1]), None
        if parts[0] == "vector" and len(parts) == 3:
            return int(parts[1]), int(parts[2])
    except ValueError:
        pass
    raise ParseError(f"bad bound {text!r}; use shannon, scalar:q or vector:q:ntot")


def _region(net, spec):
    if spec is None:
        return outer_region(net)
    return inner_region(net, *spec)


def _emit(net, R=None, out=None):
    """Print the minimal canonical form of ``net`` (and its region)."""
    out = out or sys.stdout
    net, trace = minimalize(net)
    if R is not None:
        R = push_region(R, trace)
    if net.is_empty():
        out.write("network 0 0\n")
        return
    if R is not None:
        rep, R = to_canonical(net, R)
    else:
        rep = canonicalize(edge_rep(net))[0]
    out.write(write_network(rep))
    if R is not None:
        out.write(write_region(R))


def cmd_enumerate(a):
    n = lab = 0
    db = Database(a.output) if a.output else None
    for rep, stab in enumerate_networks(a.k, a.l, relay_filter=not a.all_minimal):
        n += 1
        lab += _orbit(rep, stab)
        if db is not None:
            e = db.add(rep, [f"enumerate {a.k} {a.l}"], stab=stab.order)
            if a.regions:
                db.put_region(e.id, outer_region(node_rep(rep)))
    if db is not None:
        db.save()
    print(f"({a.k},{a.l}) canonical {n} labeled {lab}")


def _orbit(rep, stab):
    return math.factorial(rep.K) * math.factorial(rep.L) // stab.order


def cmd_canon(a):
    rep = read_network(a.file)
    c, p = canonicalize(rep)
    sys.stdout.write(write_network(c))
    print(f"# stabilizer order {stabilizer(c).order}, map {p}")


def cmd_minimalize(a):
    net = node_rep(read_network(a.file))
    _, trace = minimalize(net)
    for rec in trace.records:
        print(f"# {rec}")
    _emit(trace.result)


def cmd_region(a):
    spec = _parse_bound(a.bound)
    rep = read_network(a.file)
    R = _region(node_rep(rep), spec)
    sys.stdout.write(write_region(R))


def cmd_compare(a):
    A, B = read_region(a.a).cone, read_region(a.b).cone
    if A.coords != B.coords:
        raise NetCodingError(f"coordinate lists differ: {A.coords} vs {B.coords}")
    ab, ba = cn.contains(A, B), cn.contains(B, A)
    print("equal" if ab and ba else "first contains second" if ab else "second contains first" if ba else "incomparable")


def cmd_embed(a):
    net = node_rep(read_network(a.file))
    R = read_region(a.region) if a.region else outer_region(net)
    op = {"del-src": delete_source, "del-edge": delete_edge, "contract": contract_edge}[a.op]
    _, rec = op(net, a.elem)
    out = region_after_embed(R, rec)
    for r in rec.trace.records:
        print(f"# {r}")
    _emit(rec.trace.result, out)


def _pairs(spec):
    out = {}
    for item in filter(None, spec.split(",")):
        left, sep, right = item.partition("=")
        if not sep:
            raise ParseError(f"bad map entry {item!r}; use a=b")
        try:
            out[int(left)] = int(right)
        except ValueError:
            raise ParseError(f"bad map entry {item!r}") from None
    return out


def cmd_combine(a):
    A, B = node_rep(read_network(a.a)), node_rep(read_network(a.b))
    m = _pairs(a.map)
    if a.op == "src-merge":
        _, rec = merge_sources(A, sorted(m), B, m)
    elif a.op == "sink-merge":
        _, rec = merge_sinks(A, sorted(m), B, m)
    else:
        if len(m) != 1:
            raise NetCodingError(f"{a.op} takes exactly one pair")
        ((x, y),) = m.items()
        _, rec = (merge_node if a.op == "node-merge" else merge_edge)(A, x, B, y)
    R = combined_region(rec, outer_region(A), outer_region(B))
    _emit(rec.raw, R)


def cmd_closure(a):
    files = sorted(glob.glob(os.path.join(a.seeds, "*.ncnet")))
    seeds = [canonicalize(read_network(f))[0] for f in files]
    store = partial_closure(seeds, a.max_k, a.max_l, enable_embed=not a.no_embed)
    db = Database(a.output)
    for e in store.values():
        prov = [" ".join(map(str, p)) if not isinstance(p, str) else p for p in e.provenance]
        ent = db.add(e.rep, [f"depth {e.depth}: {p}" for p in prov])
        db.put_region(ent.id, e.region)
    db.save()
    cells, depths = closure_stats(store)
    for (K, L), n in cells.items():
        print(f"({K},{L}) {n}")
    print("depths " + " ".join(f"{d}:{n}" for d, n in depths.items()))


def cmd_report(a):
    db = Database(a.db)
    bounds = [_parse_bound(b) for b in a.bound]
    if None in bounds:
        raise ParseError("report compares inner bounds with the outer bound; use scalar:q or vector:q:ntot")
    table = {}
    for e in db:
        net = node_rep(e.rep)
        outer = db.region(e.id, OUTER) if OUTER in e.bounds else outer_region(net)
        for s in sufficiency(net, bounds, outer):
            row = table.setdefault((e.rep.K, e.rep.L), {})
            hit = row.setdefault(s.bound, 0)
            row[s.bound] = hit + int(s.equal)
            db.set_flag(e.id, s.bound, "sufficient" if s.equal else "gap")
        table.setdefault((e.rep.K, e.rep.L), {}).setdefault("total", 0)
        table[(e.rep.K, e.rep.L)]["total"] += 1
    db.save()
    labels = [bound_label(*b) for b in bounds]
    print("cell\ttotal\t" + "\t".join(labels))
    for (K, L), row in sorted(table.items()):
        print(f"({K},{L})\t{row['total']}\t" + "\t".join(str(row.get(x, 0)) for x in labels))


def cmd_minor(a):
    small, big = read_network(a.small), read_network(a.big)
    w = is_minor(small, big, a.budget)
    if w is None:
        print("not a minor")
    else:
        print("minor: " + (" ; ".join(f"{op} {x}" for op, x in w) or "identical"))


def build_parser():
    p = argparse.ArgumentParser(prog="netcoding", description="Minimal network coding problems and their rate regions.")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("enumerate", help="list canonical minimal (K, L) networks")
    s.add_argument("-k", type=int, required=True)
    s.add_argument("-l", type=int, required=True)
    s.add_argument("-o", "--output", help="database directory")
    s.add_argument("--regions", action="store_true", help="also store outer regions")
    s.add_argument("--all-minimal", action="store_true", help="keep source-relay nets")
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("canon", help="canonical form of a network")
    s.add_argument("file")
    s.set_defaults(func=cmd_canon)

    s = sub.add_parser("minimalize", help="apply reductions until minimal")
    s.add_argument("file")
    s.set_defaults(func=cmd_minimalize)

    s = sub.add_parser("region", help="compute a rate region bound")
    s.add_argument("--bound", default="shannon")
    s.add_argument("file")
    s.set_defaults(func=cmd_region)

    s = sub.add_parser("compare", help="compare two region files")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("embed", help="delete a source or edge, or contract an edge")
    s.add_argument("--op", choices=("del-src", "del-edge", "contract"), required=True)
    s.add_argument("--elem", type=int, required=True)
    s.add_argument("--region", help="region of the input (default: computed)")
    s.add_argument("file")
    s.set_defaults(func=cmd_embed)

    s = sub.add_parser("combine", help="merge two networks")
    s.add_argument("--op", choices=("src-merge", "sink-merge", "node-merge", "edge-merge"), required=True)
    s.add_argument("--map", required=True, help="pairs a=b; sinks and nodes by 0-based index")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(func=cmd_combine)

    s = sub.add_parser("closure", help="partial operator closure from seed files")
    s.add_argument("--seeds", required=True, help="directory of .ncnet files")
    s.add_argument("--max-k", type=int, required=True)
    s.add_argument("--max-l", type=int, required=True)
    s.add_argument("--no-embed", action="store_true")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_closure)

    s = sub.add_parser("report", help="reports over a database")
    s.add_argument("what", choices=("sufficiency",))
    s.add_argument("db")
    s.add_argument("--bound", action="append", default=None, help="inner bound(s), default scalar:2")
    s.set_defaults(func=cmd_report)

    s = sub.add_parser("minor", help="search for an embedding sequence")
    s.add_argument("--small", required=True)
    s.add_argument("--big", required=True)
    s.add_argument("--budget", type=int, default=4)
    s.set_defaults(func=cmd_minor)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "bound", None) is None and args.cmd == "report":
        args.bound = ["scalar:2"]
    try:
        args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (NetCodingError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
