"""Rate region bounds: Shannon outer bound and linear-code inner bounds.

Entropy coordinates are indexed by bitmasks over the variable ids
``1..N`` (bit ``i - 1`` is variable ``i``) and named ``h`` followed by the
ids, e.g. ``h13``.  Region coordinates are ``w1..wK`` (source entropies)
followed by ``r{K+1}..r{K+L}`` (edge rates).

Both bounds use the same fact: the network constraints L1, L3, L5 cut out a
face of the Shannon cone.  On that face ``h_A = h_cl(A)`` where ``cl`` is the
closure under "a node's inputs determine its outputs" and "a sink's inputs
determine its demands", so the outer bound is computed over the closed
sets only.  For inner bounds a rank vector lies on the face exactly when it
comes from a linear code on the network, so the codes are searched directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from . import cone as cn
from .cone import Cone
from .errors import SizeCap
from .lpproject import Uncertified, project

__all__ = [
    "OUTER",
    "RateRegion",
    "ConstraintSet",
    "region_coords",
    "net_coords",
    "entropy_coords",
    "shannon_cone",
    "network_constraints",
    "closure_map",
    "outer_region",
    "scalar_rank_vectors",
    "vector_rank_vectors",
    "code_points",
    "inner_region",
    "sufficiency",
    "bound_label",
]

OUTER = "outer-shannon"
MAX_SHANNON_N = 6
MAX_OUTER_N = 10
# faces with more closed-set coordinates go to the LP route
LP_FACE_DIM = 20


def bound_label(q=None, ntot=None):
    if q is None:
        return OUTER
    if ntot is None:
        return f"scalar-{q}"
    return f"vector-{q}-{ntot}"


def region_coords(K, L):
    return tuple(f"w{s}" for s in range(1, K + 1)) + tuple(f"r{e}" for e in range(K + 1, K + L + 1))


def net_coords(net):
    return region_coords(net.K, net.L)


@dataclass(frozen=True)
class RateRegion:
    """A cone over ``(w1..wK, r{K+1}..r{K+L})`` tagged with its bound label."""

    cone: Cone
    bound: str = OUTER

    @property
    def coords(self):
        return self.cone.coords

    def with_cone(self, cone):
        return RateRegion(cone, self.bound)

    def describe(self):
        return f"# {self.bound}\n" + self.cone.describe()


# -- entropy space -----------------------------------------------------------

def _ids(mask):
    out, i = [], 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def hname(mask):
    ids = _ids(mask)
    sep = "" if all(i < 10 for i in ids) else ","
    return "h" + sep.join(map(str, ids))


def entropy_coords(N):
    return tuple(hname(m) for m in range(1, 1 << N))


def _mask(ids):
    m = 0
    for i in ids:
        m |= 1 << (i - 1)
    return m


def elemental_rows(N):
    """Elemental inequalities as ``{mask: coef}`` dicts (mask 0 is dropped)."""
    full = (1 << N) - 1
    rows = []
    for i in range(N):
        rows.append({full: 1, full & ~(1 << i): -1})
    for i, j in itertools.combinations(range(N), 2):
        rest = full & ~(1 << i) & ~(1 << j)
        sub = rest
        while True:
            r = {}
            for m, c in ((sub | 1 << i, 1), (sub | 1 << j, 1), (sub | 1 << i | 1 << j, -1), (sub, -1)):
                if m:
                    r[m] = r.get(m, 0) + c
            rows.append(r)
            if sub == 0:
                break
            sub = (sub - 1) & rest
    for r in rows:
        for m in [m for m, c in r.items() if c == 0]:
            del r[m]
    return rows


def shannon_cone(N):
    """Gamma_N in H-form over ``entropy_coords(N)``."""
    if not 1 <= N <= MAX_SHANNON_N:
        raise SizeCap(f"shannon_cone: N={N} outside 1..{MAX_SHANNON_N}")
    n = (1 << N) - 1
    ineqs = []
    for r in elemental_rows(N):
        v = [0] * n
        for m, c in r.items():
            v[m - 1] = c
        ineqs.append(v)
    return Cone.from_h(entropy_coords(N), ineqs)


@lru_cache(maxsize=None)
def _gamma_rays(N):
    if N > 4:
        raise SizeCap(f"extreme rays of Gamma_{N} are not enumerated (N <= 4)")
    return shannon_cone(N).rays


# -- network constraints -------------------------------------------------------

@dataclass(frozen=True)
class Constraint:
    """``sum(coef * coord) (= or >=) 0``; ``terms`` is a tuple of (name, coef)."""

    origin: str
    kind: str
    terms: tuple

    def __str__(self):
        lhs = " ".join(f"{'+' if c > 0 else '-'}{abs(c) if abs(c) != 1 else ''}{x}" for x, c in self.terms) or "0"
        return f"{self.origin}: {lhs} {'=' if self.kind == 'eq' else '>='} 0"


def _terms(d):
    return tuple((hname(m) if isinstance(m, int) else m, c) for m, c in sorted(d.items(), key=lambda t: str(t[0])) if c)


def _cond_zero(origin, X, Y):
    """h_{X u Y} - h_Y = 0 as a constraint, with masks."""
    d = {}
    if X | Y:
        d[X | Y] = d.get(X | Y, 0) + 1
    if Y:
        d[Y] = d.get(Y, 0) - 1
    return Constraint(origin, "eq", _terms(d))


@dataclass(frozen=True)
class ConstraintSet:
    N: int
    l1: tuple
    l3: tuple
    l4: tuple
    l5: tuple

    def all(self):
        return self.l1 + self.l3 + self.l4 + self.l5

    def __str__(self):
        return "\n".join(str(c) for c in self.all())


def network_constraints(net) -> ConstraintSet:
    K = net.K
    S = _mask(net.sources)
    d = {S: 1} if S else {}
    for s in net.sources:
        d[_mask([s])] = d.get(_mask([s]), 0) - 1
    l1 = (Constraint("L1", "eq", _terms(d)),)
    l3 = tuple(_cond_zero("L3", _mask(net.out_edges(j)), _mask(a)) for j, a in enumerate(net.nodes))
    l4 = tuple(Constraint("L4'", "ge", ((f"r{e}", 1), (hname(_mask([e])), -1))) for e in net.edge_ids)
    l5 = tuple(_cond_zero("L5", _mask([s]), _mask(a)) for a, b in net.sinks for s in sorted(b))
    return ConstraintSet(K + net.L, l1, l3, l4, l5)


def _deps(net):
    deps = [(_mask(a), _mask(net.out_edges(j))) for j, a in enumerate(net.nodes)]
    deps += [(_mask(a), _mask(b)) for a, b in net.sinks]
    return [(a, b) for a, b in deps if b]


def closure_map(net):
    """``cl[mask]`` for every mask over the N variables."""
    deps = _deps(net)
    N = net.K + net.L
    cl = []
    for A in range(1 << N):
        while True:
            B = A
            for a, b in deps:
                if a & B == a:
                    B |= b
            if B == A:
                break
            A = B
        cl.append(A)
    return cl


# -- outer bound ----------------------------------------------------------------

def _pinned(net):
    # all source entropies zero, rates free and nonnegative
    return Cone.from_v(net_coords(net), _unit_rays(net))


def _unit_rays(net):
    K, n = net.K, net.K + net.L
    return [tuple(int(j == K + i) for j in range(n)) for i in range(net.L)]


def _project(net, vectors, at):
    """Map entropy-face vectors to region rays and add the L4' upward closure."""
    K, N = net.K, net.K + net.L
    rays = set()
    for v in vectors:
        r = tuple(at(v, 1 << (i - 1)) for i in range(1, N + 1))
        if any(r):
            rays.add(r)
    return sorted(rays) + _unit_rays(net)


def _closure_cone(net):
    """The face Gamma_N n L13 n L5 over closed-set coordinates."""
    N = net.K + net.L
    cl = closure_map(net)
    zero = cl[0]
    closed = sorted({c for c in cl[1:]} - {zero})
    pos = {c: i for i, c in enumerate(closed)}
    n = len(closed)
    seen = set()
    ineqs = []
    for r in elemental_rows(N):
        v = [0] * n
        for m, c in r.items():
            cm = cl[m]
            if cm != zero:
                v[pos[cm]] += c
        p = cn.primitive(v)
        if any(p) and p not in seen:
            seen.add(p)
            ineqs.append(p)
    eqs = []
    S = _mask(net.sources)
    if S:
        v = [0] * n
        if cl[S] != zero:
            v[pos[cl[S]]] += 1
        for s in net.sources:
            cs = cl[_mask([s])]
            if cs != zero:
                v[pos[cs]] -= 1
        eqs.append(v)
    coords = tuple(hname(c) for c in closed)
    return Cone.from_h(coords, ineqs, eqs), cl, pos, zero


def outer_region(net, method="auto") -> RateRegion:
    """Shannon outer bound R_o.

    ``method`` selects the route.  ``"closure"`` runs double description on
    the face over closed-set coordinates and keeps the singleton values of
    its rays.  ``"lp"`` projects the same face by certified LP hull growth
    (fast when the face is large).  ``"auto"`` (default) picks one of the two
    by the face dimension.  ``"face"`` filters the extreme rays of Gamma_N
    (N <= 4) and ``"direct"`` intersects Gamma_N with every constraint over
    entropy and rate coordinates and eliminates the entropies (N <= 4).
    """
    N = net.K + net.L
    if N > MAX_OUTER_N:
        raise SizeCap(f"outer_region: N={N} exceeds {MAX_OUTER_N}")
    if N == 0:
        return RateRegion(Cone.zero(()), OUTER)
    coords = net_coords(net)
    if method in ("closure", "lp", "auto"):
        c, cl, pos, zero = _closure_cone(net)
        if c.n == 0:
            return RateRegion(_pinned(net), OUTER)
        if method == "lp" or (method == "auto" and c.n > LP_FACE_DIM):
            try:
                rays = _lp_rays(net, c, cl, pos, zero)
                return RateRegion(Cone.from_v(coords, _project(net, rays, lambda v, m: v.get(m, 0))), OUTER)
            except Uncertified:
                if method == "lp":
                    raise
        rays = c.rays

        def at(v, m):
            cm = cl[m]
            return 0 if cm == zero else v[pos[cm]]

        return RateRegion(Cone.from_v(coords, _project(net, rays, at)), OUTER)
    if method == "face":
        cs = network_constraints(net)
        eqrows = [_row_masks(k) for k in cs.l1 + cs.l3 + cs.l5]
        face = [v for v in _gamma_rays(N) if all(sum(c * v[m - 1] for m, c in row) == 0 for row in eqrows)]
        return RateRegion(Cone.from_v(coords, _project(net, face, lambda v, m: v[m - 1])), OUTER)
    if method == "direct":
        if N > 4:
            raise SizeCap("direct elimination is limited to N <= 4")
        return RateRegion(_direct(net), OUTER)
    raise ValueError(f"unknown method {method!r}")


def _lp_rays(net, c, cl, pos, zero):
    # singleton coordinates of the face; sum of them is positive off zero
    single = {}
    for i in range(net.K + net.L):
        cm = cl[1 << i]
        if cm != zero:
            single.setdefault(pos[cm], []).append(1 << i)
    cols = sorted(single)
    eqs, ineqs = c.raw_h()
    rays, _ = project(c.n, eqs, ineqs, cols)
    out = []
    for y in rays:
        out.append({m: y[k] for k, j in enumerate(cols) for m in single[j]})
    return out


def _row_masks(con):
    out = []
    for name, coef in con.terms:
        out.append((_name_to_mask(name), coef))
    return out


def _name_to_mask(name):
    body = name[1:]
    ids = body.split(",") if "," in body else list(body)
    return _mask(int(i) for i in ids)


def _direct(net):
    N = net.K + net.L
    hc = entropy_coords(N)
    coords = hc + net_coords(net)
    idx = {x: i for i, x in enumerate(coords)}
    n = len(coords)
    g = shannon_cone(N)
    ineqs = [tuple(r) + (0,) * (n - len(hc)) for r in g.raw_h()[1]]
    eqs = []
    # omega_s = h_s
    for s in net.sources:
        v = [0] * n
        v[idx[f"w{s}"]] = 1
        v[idx[hname(_mask([s]))]] = -1
        eqs.append(v)
    for con in network_constraints(net).all():
        v = [0] * n
        for x, c in con.terms:
            v[idx[x]] += c
        (eqs if con.kind == "eq" else ineqs).append(v)
    full = Cone.from_h(coords, ineqs, eqs)
    return cn.eliminate(full, list(hc), method="fm")


# -- rank vectors ------------------------------------------------------------------

def _check_field(q):
    if q not in (2, 3, 5, 7):
        raise SizeCap(f"field size {q}: only small prime fields are supported")


def _rank(vectors, q):
    """Rank over F_q of integer vectors (lists), by elimination."""
    rows = [list(v) for v in vectors if any(x % q for x in v)]
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] % q), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], q - 2, q)
        rows[r] = [(x * inv) % q for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] % q:
                f = rows[i][c]
                rows[i] = [(a - f * b) % q for a, b in zip(rows[i], rows[r])]
        r += 1
    return r


def _subspaces(n, q, maxdim=None):
    """RREF bases (tuple of row tuples) of every subspace of F_q^n."""
    top = n if maxdim is None else min(n, maxdim)
    for r in range(top + 1):
        for piv in itertools.combinations(range(n), r):
            free = [(i, j) for i in range(r) for j in range(piv[i] + 1, n) if j not in piv]
            for vals in itertools.product(range(q), repeat=len(free)):
                m = [[0] * n for _ in range(r)]
                for i, p in enumerate(piv):
                    m[i][p] = 1
                for (i, j), x in zip(free, vals):
                    m[i][j] = x
                yield tuple(tuple(row) for row in m)


def _gauss_count(n, k, q):
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def _block_ranks(N, cols_of, q):
    out = []
    for m in range(1, 1 << N):
        cols = [c for i in _ids(m) for c in cols_of[i - 1]]
        out.append(_rank([list(c) for c in cols], q) if cols else 0)
    return tuple(out)


def scalar_rank_vectors(N, q):
    """Rank vectors of N-tuples of vectors in F_q^N (each variable dim <= 1).

    The rank function of a tuple of columns depends only on the row space of
    the matrix they form, so it suffices to run over all subspaces.
    """
    if not 1 <= N <= 5:
        raise SizeCap(f"scalar_rank_vectors: N={N} outside 1..5")
    _check_field(q)
    out = set()
    for basis in _subspaces(N, q):
        cols = [[tuple(row[i] for row in basis)] if basis else [] for i in range(N)]
        out.add(_block_ranks(N, cols, q))
    return out


def vector_rank_vectors(N, q, ntot, budget=3_000_000):
    """Rank vectors of N subspaces of F_q^ntot with total dimension <= ntot."""
    if not 1 <= N <= 5 or ntot > N + 4:
        raise SizeCap(f"vector_rank_vectors: N={N}, ntot={ntot} outside the desk cap")
    _check_field(q)
    work = 0
    for D in range(ntot + 1):
        comps = _compositions(D, N)
        work += len(comps) * sum(_gauss_count(D, k, q) for k in range(D + 1)) * (1 << N)
    if work > budget:
        raise SizeCap(f"vector_rank_vectors: about {work} rank computations")
    out = set()
    for D in range(ntot + 1):
        bases = list(_subspaces(D, q))
        for dims in _compositions(D, N):
            starts = list(itertools.accumulate((0,) + dims))
            for basis in bases:
                cols = [[tuple(row[c] for row in basis) for c in range(starts[i], starts[i + 1])] if basis else [] for i in range(N)]
                out.add(_block_ranks(N, cols, q))
    return out


def _compositions(D, N):
    if N == 0:
        return [()] if D == 0 else []
    return [(a,) + rest for a in range(D + 1) for rest in _compositions(D - a, N - 1)]


# -- linear codes on a network ----------------------------------------------------

def _topo_edges(net):
    order, done = [], set(net.sources)
    pending = list(net.edge_ids)
    while pending:
        for e in pending:
            if set(net.tail_inputs(e)) <= done:
                order.append(e)
                done.add(e)
                pending.remove(e)
                break
        else:
            raise ValueError("network is cyclic")
    return order


def _span_basis(vectors, q):
    rows = [list(v) for v in vectors]
    out = []
    for v in rows:
        if _rank(out + [v], q) > len(out):
            out.append(v)
    return out


def code_points(net, q, ntot=None):
    """(dims of sources, dims of edges) over all linear codes on ``net``.

    ``ntot=None`` means scalar codes (every variable of dimension <= 1);
    otherwise vector codes with total dimension at most ``ntot``.  Sources
    are independent, so they sit on coordinate blocks of F_q^D; each edge
    is a subspace of the span of its tail's inputs; sinks must decode.
    """
    _check_field(q)
    K = net.K
    scalar = ntot is None
    order = _topo_edges(net)
    sinks = [(sorted(a), sorted(b)) for a, b in net.sinks]
    points = set()
    if scalar:
        src_dims = itertools.product((0, 1), repeat=K)
    else:
        src_dims = (d for d in itertools.product(range(ntot + 1), repeat=K) if sum(d) <= ntot)
    for dims in src_dims:
        D = sum(dims)
        basis = {}
        at = 0
        for s, d in zip(net.sources, dims):
            basis[s] = [tuple(int(j == at + k) for j in range(D)) for k in range(d)]
            at += d
        left = None if scalar else ntot - D
        _extend(net, order, 0, basis, left, q, sinks, dims, points, scalar)
    return points


def _extend(net, order, k, basis, left, q, sinks, dims, points, scalar):
    if k == len(order):
        for a, b in sinks:
            have = [v for x in a for v in basis[x]]
            r0 = _rank(have, q)
            if r0 != _rank(have + [v for s in b for v in basis[s]], q):
                return
        points.add(tuple(dims) + tuple(len(basis[e]) for e in net.edge_ids))
        return
    e = order[k]
    span = _span_basis([v for x in net.tail_inputs(e) for v in basis[x]], q)
    cap = 1 if scalar else left
    for sub in _subspaces(len(span), q, cap):
        vecs = [tuple(sum(c * span[i][j] for i, c in enumerate(row)) % q for j in range(len(span[0]))) for row in sub] if span else []
        basis[e] = vecs
        _extend(net, order, k + 1, basis, None if scalar else left - len(vecs), q, sinks, dims, points, scalar)
    del basis[e]


def inner_region(net, q=2, ntot=None, method="codes") -> RateRegion:
    """Linear-code inner bound: scalar (``ntot=None``) or vector over F_q.

    ``method="codes"`` searches codes on the network directly.
    ``method="filter"`` takes the full scalar rank-vector set of
    :func:`scalar_rank_vectors` (or the vector one) and keeps those on the
    network face; the two must agree.
    """
    N = net.K + net.L
    label = bound_label(q, ntot)
    if N == 0:
        return RateRegion(Cone.zero(()), label)
    coords = net_coords(net)
    if method == "codes":
        pts = code_points(net, q, ntot)
        rays = sorted(p for p in pts if any(p)) + _unit_rays(net)
        return RateRegion(Cone.from_v(coords, rays), label)
    if method == "filter":
        vecs = scalar_rank_vectors(N, q) if ntot is None else vector_rank_vectors(N, q, ntot)
        cl = closure_map(net)
        S = _mask(net.sources)

        def on_face(v):
            h = lambda m: v[m - 1] if m else 0
            if any(h(m) != h(cl[m]) for m in range(1, 1 << N)):
                return False
            return h(S) == sum(h(_mask([s])) for s in net.sources)

        face = [v for v in vecs if on_face(v)]
        return RateRegion(Cone.from_v(coords, _project(net, face, lambda v, m: v[m - 1])), label)
    raise ValueError(f"unknown method {method!r}")


# -- sufficiency ---------------------------------------------------------------------

@dataclass(frozen=True)
class Sufficiency:
    bound: str
    equal: bool
    ray: tuple = None
    facet: tuple = None


def _witness(outer, inner):
    """An extreme ray of ``outer`` outside ``inner`` and an inner facet it violates."""
    ieqs, iineqs = inner.cone.eqs, inner.cone.ineqs
    for r in outer.cone.rays:
        for f in iineqs:
            if cn._dot(f, r) < 0:
                return r, f
        for f in ieqs:
            if cn._dot(f, r):
                return r, f
    return None, None


def sufficiency(net, bounds=((2, None),), outer=None):
    """For each ``(q, ntot)`` in ``bounds`` report whether inner == outer."""
    outer = outer or outer_region(net)
    out = []
    for q, ntot in bounds:
        inner = inner_region(net, q, ntot)
        eq = cn.equal(outer.cone, inner.cone)
        ray = facet = None
        if not eq:
            ray, facet = _witness(outer, inner)
        out.append(Sufficiency(inner.bound, eq, ray, facet))
    return out
