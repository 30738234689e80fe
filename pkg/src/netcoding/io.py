"""Text formats: ``.ncnet`` for (Q, W) pairs and ``.ncrr`` for regions.

.ncnet::

    network 2 1
    enc 3 : 1 2
    dec 1 : 3
    dec 2 : 3

.ncrr::

    region vars: w1 w2 r3
    ineq -1 -1 1
    ray 1 0 1

Each ``ineq`` row ``c`` means ``c . x >= 0``.  Equalities are written as
two opposite rows.  ``#`` starts a comment in both formats.
"""

from __future__ import annotations

from .cone import Cone, primitive
from .errors import NetCodingError, ParseError
from .netmodel import EdgeRep
from .rateregion import OUTER, RateRegion

__all__ = ["write_network", "parse_network", "write_region", "parse_region", "read_network", "read_region"]


def _lines(text):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _ints(tokens, no):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"expected integers, got {' '.join(tokens)!r}", no) from None


def write_network(rep: EdgeRep) -> str:
    out = [f"network {rep.K} {rep.L}"]
    for i, A in rep.Q:
        out.append(f"enc {i} :" + "".join(f" {a}" for a in A))
    for s, A in rep.W:
        out.append(f"dec {s} :" + "".join(f" {a}" for a in A))
    return "\n".join(out) + "\n"


def parse_network(text: str) -> EdgeRep:
    items = list(_lines(text))
    if not items:
        raise ParseError("empty network file", 1)
    no, head = items[0]
    parts = head.split()
    if len(parts) != 3 or parts[0] != "network":
        raise ParseError("first line must be 'network K L'", no)
    K, L = _ints(parts[1:], no)
    if K < 0 or L < 0:
        raise ParseError("K and L must be nonnegative", no)
    Q, W = [], []
    for no, line in items[1:]:
        left, sep, right = line.partition(":")
        kw = left.split()
        if not sep or len(kw) != 2 or kw[0] not in ("enc", "dec"):
            raise ParseError(f"expected 'enc I : ...' or 'dec S : ...', got {line!r}", no)
        (x,) = _ints(kw[1:], no)
        A = tuple(sorted(_ints(right.split(), no)))
        if len(set(A)) != len(A):
            raise ParseError("repeated id in input set", no)
        for a in A + (x,):
            if not 1 <= a <= K + L:
                raise ParseError(f"id {a} outside 1..{K + L}", no)
        if kw[0] == "enc":
            if x <= K:
                raise ParseError(f"enc id {x} is a source", no)
            Q.append((x, A))
        else:
            if x > K:
                raise ParseError(f"dec id {x} is not a source", no)
            W.append((x, A))
    try:
        return EdgeRep.make(K, L, Q, W)
    except NetCodingError as exc:
        raise ParseError(str(exc), items[0][0]) from None


def region_header(coords):
    return "region vars: " + " ".join(coords)


def write_region(R) -> str:
    c = R.cone if isinstance(R, RateRegion) else R
    rows = set(c.ineqs)
    for e in c.eqs:
        rows.add(tuple(e))
        rows.add(tuple(-x for x in e))
    out = [region_header(c.coords)]
    if isinstance(R, RateRegion):
        out.insert(0, f"# bound {R.bound}")
    out += ["ineq " + " ".join(map(str, r)) for r in sorted(rows)]
    rays = set(c.rays)
    for v in c.lin:
        rays.add(tuple(v))
        rays.add(tuple(-x for x in v))
    out += ["ray " + " ".join(map(str, v)) for v in sorted(rays)]
    return "\n".join(out) + "\n"


def parse_region(text: str, strict=True, bound=OUTER) -> RateRegion:
    """Parse ``.ncrr``; rays, when present, are checked against the rows."""
    items = list(_lines(text))
    if not items:
        raise ParseError("empty region file", 1)
    no, head = items[0]
    if not head.startswith("region vars:"):
        raise ParseError("first line must be 'region vars: ...'", no)
    coords = tuple(head[len("region vars:"):].split())
    if len(set(coords)) != len(coords):
        raise ParseError("repeated variable name", no)
    ineqs, rays = [], []
    for no, line in items[1:]:
        kw, *rest = line.split()
        if kw not in ("ineq", "ray"):
            raise ParseError(f"expected 'ineq' or 'ray', got {kw!r}", no)
        v = tuple(_ints(rest, no))
        if len(v) != len(coords):
            raise ParseError(f"{len(v)} entries for {len(coords)} variables", no)
        if kw == "ineq":
            if strict and any(v) and primitive(v) != v:
                raise ParseError("inequality row is not primitive", no)
            ineqs.append((no, v))
        else:
            rays.append((no, v))
    if ineqs:
        c = Cone.from_h(coords, [v for _, v in ineqs])
        for no, r in rays:
            if any(sum(a * b for a, b in zip(v, r)) < 0 for _, v in ineqs):
                raise ParseError("ray violates an inequality", no)
    else:
        c = Cone.from_v(coords, [v for _, v in rays])
    return RateRegion(c, bound)


def read_network(path) -> EdgeRep:
    with open(path, encoding="utf-8") as fh:
        return parse_network(fh.read())


def read_region(path, strict=True) -> RateRegion:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    bound = OUTER
    for line in text.splitlines():
        if line.startswith("# bound "):
            bound = line[len("# bound "):].strip()
            break
    return parse_region(text, strict, bound)
