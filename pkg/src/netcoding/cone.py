"""Exact polyhedral cones over named coordinates.

A cone is ``{x : E x = 0, A x >= 0}`` (H-form) or ``cone(rays) + span(lin)``
(V-form).  Conversion uses the double description method with exact Python
integers; every row and ray is kept as a primitive integer tuple.

Canonical forms are unique: the equality (or lineality) basis is in reduced
row echelon form scaled to primitive integers, every inequality (ray) is
reduced modulo that basis, made primitive and the list is sorted.  Two cones
are equal exactly when their canonical H-forms are identical.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .errors import CoordinateMismatch, MinSubstitutionUnsafe, NameClash

__all__ = [
    "Cone",
    "to_rays",
    "to_ineqs",
    "intersect",
    "eliminate",
    "product",
    "substitute_sum",
    "substitute_min",
    "restrict_zero",
    "section_zero",
    "add_nonneg",
    "add_zero",
    "diagonal",
    "rename",
    "reorder",
    "equal",
    "contains",
    "double_description",
]

_P = (1 << 61) - 1


# -- integer linear algebra -------------------------------------------------

def primitive(v):
    g = 0
    for x in v:
        if x:
            g = math.gcd(g, x)
    if g <= 1:
        return tuple(v)
    return tuple(x // g for x in v)


def _rref(rows, n):
    """Reduced row echelon form over the rationals; returns (rows, pivots)."""
    m = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    for col in range(n):
        piv = None
        for i in range(r, len(m)):
            if m[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        pv = m[r][col]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def _to_int(v):
    den = 1
    for x in v:
        den = den * x.denominator // math.gcd(den, x.denominator)
    return primitive([int(x * den) for x in v])


def nullspace(rows, n):
    """Integer basis of ``{x : row . x = 0 for all rows}``."""
    red, piv = _rref(rows, n)
    free = [j for j in range(n) if j not in set(piv)]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in zip(red, piv):
            v[p] = -row[f]
        basis.append(_to_int(v))
    return basis


def rank_mod_p(vectors, n):
    """Rank modulo a large prime; never exceeds the rational rank."""
    m = [[x % _P for x in v] for v in vectors]
    r = 0
    for col in range(n):
        piv = None
        for i in range(r, len(m)):
            if m[i][col]:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][col], _P - 2, _P)
        m[r] = [x * inv % _P for x in m[r]]
        for i in range(r + 1, len(m)):
            f = m[i][col]
            if f:
                m[i] = [(a - f * b) % _P for a, b in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _canon_pair(basis, rows, n):
    """Canonical (basis, rows): basis in RREF, rows reduced modulo it."""
    red, piv = _rref(basis, n)
    base = tuple(_to_int(r) for r in red)
    out = set()
    for row in rows:
        v = [Fraction(x) for x in row]
        for brow, p in zip(red, piv):
            if v[p] != 0:
                f = v[p]
                v = [a - f * b for a, b in zip(v, brow)]
        if any(v):
            out.add(_to_int(v))
    return base, tuple(sorted(out))


# -- double description -----------------------------------------------------

def double_description(n, eqs, ineqs):
    """Extreme rays and lineality basis of ``{x : eqs x = 0, ineqs x >= 0}``.

    Lineality is consumed first by any inequality that is not constant on
    it; otherwise the usual DD step runs with a combinatorial adjacency
    test on zero sets stored as integer bitsets.
    """
    lin = nullspace(eqs, n) if eqs else [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    rays = []
    zs = []
    seen_bits = 0
    for k, a in enumerate(ineqs):
        nz = [(i, c) for i, c in enumerate(a) if c]
        bit = 1 << k

        def val(v):
            return sum(c * v[i] for i, c in nz)

        l0 = None
        for idx, l in enumerate(lin):
            if val(l):
                l0 = idx
                break
        if l0 is not None:
            l0v = lin[l0]
            a0 = val(l0v)
            if a0 < 0:
                l0v = tuple(-x for x in l0v)
                a0 = -a0
            newlin = []
            for idx, l in enumerate(lin):
                if idx == l0:
                    continue
                al = val(l)
                if al:
                    l = primitive([a0 * x - al * y for x, y in zip(l, l0v)])
                newlin.append(l)
            newrays = []
            for r, z in zip(rays, zs):
                ar = val(r)
                if ar:
                    r = primitive([a0 * x - ar * y for x, y in zip(r, l0v)])
                newrays.append(r)
            zs = [z | bit for z in zs]
            newrays.append(l0v)
            zs.append(seen_bits)
            rays = newrays
            lin = newlin
            seen_bits |= bit
            continue
        vals = [val(r) for r in rays]
        pos = [i for i, v in enumerate(vals) if v > 0]
        neg = [i for i, v in enumerate(vals) if v < 0]
        if not neg:
            zs = [z | bit if v == 0 else z for z, v in zip(zs, vals)]
            seen_bits |= bit
            continue
        need = 0
        if pos:
            # the pair spans a 2-face only if enough inequalities are tight
            need = rank_mod_p(rays + lin, n) - len(lin) - 2
        newrays, newzs = [], []
        for i, v in enumerate(vals):
            if v > 0:
                newrays.append(rays[i])
                newzs.append(zs[i])
            elif v == 0:
                newrays.append(rays[i])
                newzs.append(zs[i] | bit)
        for p in pos:
            zp = zs[p]
            rp = rays[p]
            vp = vals[p]
            for q in neg:
                s = zp & zs[q]
                if need > 0 and s.bit_count() < need:
                    continue
                ok = True
                for j, zj in enumerate(zs):
                    if j != p and j != q and zj & s == s:
                        ok = False
                        break
                if not ok:
                    continue
                vq = vals[q]
                rq = rays[q]
                newrays.append(primitive([vp * y - vq * x for x, y in zip(rp, rq)]))
                newzs.append(s | bit)
        rays, zs = newrays, newzs
        seen_bits |= bit
    return rays, lin


# -- the cone value ---------------------------------------------------------

class Cone:
    """Polyhedral cone over an ordered tuple of coordinate names.

    Build with :meth:`from_h` or :meth:`from_v`; the other representation
    and the canonical forms are computed lazily and cached.
    """

    __slots__ = ("coords", "_h", "_v", "_ch", "_cv")

    def __init__(self, coords, h=None, v=None):
        self.coords = tuple(coords)
        if len(set(self.coords)) != len(self.coords):
            raise NameClash(f"repeated coordinate names in {self.coords}")
        self._h = h
        self._v = v
        self._ch = None
        self._cv = None

    @classmethod
    def from_h(cls, coords, ineqs=(), eqs=()):
        n = len(coords)
        ineqs = [primitive(tuple(int(x) for x in r)) for r in ineqs]
        eqs = [primitive(tuple(int(x) for x in r)) for r in eqs]
        for r in ineqs + eqs:
            if len(r) != n:
                raise CoordinateMismatch(f"row of length {len(r)} over {n} coordinates")
        ineqs = [r for r in ineqs if any(r)]
        eqs = [r for r in eqs if any(r)]
        return cls(coords, h=(tuple(eqs), tuple(ineqs)))

    @classmethod
    def from_v(cls, coords, rays=(), lin=()):
        n = len(coords)
        rays = [primitive(tuple(int(x) for x in r)) for r in rays]
        lin = [primitive(tuple(int(x) for x in r)) for r in lin]
        for r in rays + lin:
            if len(r) != n:
                raise CoordinateMismatch(f"ray of length {len(r)} over {n} coordinates")
        rays = [r for r in rays if any(r)]
        lin = [r for r in lin if any(r)]
        return cls(coords, v=(tuple(lin), tuple(rays)))

    @classmethod
    def full(cls, coords):
        return cls.from_h(coords)

    @classmethod
    def zero(cls, coords):
        n = len(coords)
        return cls.from_h(coords, eqs=[tuple(int(i == j) for j in range(n)) for i in range(n)])

    @property
    def n(self):
        return len(self.coords)

    def _canon_v(self):
        if self._cv is None:
            if self._h is not None:
                eqs, ineqs = self._h
                rays, lin = double_description(self.n, list(eqs), list(ineqs))
            else:
                # raw rays may be redundant: go through the H-form
                eqs, ineqs = self._canon_h()
                rays, lin = double_description(self.n, list(eqs), list(ineqs))
            self._cv = _canon_pair(lin, rays, self.n)
        return self._cv

    def _canon_h(self):
        if self._ch is None:
            if self._v is not None and self._cv is None:
                lin, rays = self._v
            else:
                lin, rays = self._canon_v()
            fac, eqb = double_description(self.n, list(lin), list(rays))
            self._ch = _canon_pair(eqb, fac, self.n)
        return self._ch

    @property
    def eqs(self):
        return self._canon_h()[0]

    @property
    def ineqs(self):
        return self._canon_h()[1]

    @property
    def lin(self):
        return self._canon_v()[0]

    @property
    def rays(self):
        return self._canon_v()[1]

    def raw_h(self):
        """Some (possibly redundant) H-form without forcing canonicalization."""
        if self._h is not None:
            return self._h
        return self._canon_h()

    def raw_v(self):
        if self._v is not None:
            return self._v
        return self._canon_v()

    def key(self):
        return (self.coords, self.eqs, self.ineqs)

    def __eq__(self, other):
        return isinstance(other, Cone) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def index(self, name):
        try:
            return self.coords.index(name)
        except ValueError:
            raise CoordinateMismatch(f"no coordinate {name!r} in {self.coords}") from None

    def describe(self):
        """Human readable inequality list."""
        def term(row, rel):
            lhs, rhs = [], []
            for c, x in zip(row, self.coords):
                if c > 0:
                    lhs.append(x if c == 1 else f"{c}{x}")
                elif c < 0:
                    rhs.append(x if c == -1 else f"{-c}{x}")
            return f"{' + '.join(lhs) or '0'} {rel} {' + '.join(rhs) or '0'}"

        lines = [term(r, "=") for r in self.eqs] + [term(r, ">=") for r in self.ineqs]
        return "\n".join(lines)

    def __repr__(self):
        return f"Cone({self.coords}, eqs={self.eqs}, ineqs={self.ineqs})"


# -- conversions and algebra -------------------------------------------------

def to_rays(c: Cone) -> Cone:
    c._canon_v()
    return c


def to_ineqs(c: Cone) -> Cone:
    c._canon_h()
    return c


def intersect(c: Cone, ineqs=(), eqs=()) -> Cone:
    e0, i0 = c.raw_h()
    return Cone.from_h(c.coords, list(i0) + list(ineqs), list(e0) + list(eqs))


def _fm_eliminate(coords, eqs, ineqs, drop):
    """Fourier-Motzkin with equality substitution and Chernikov pruning."""
    coords = list(coords)
    eqs = [list(r) for r in eqs]
    rows = [(list(r), 1 << i) for i, r in enumerate(ineqs)]
    fm_done = 0
    for x in drop:
        j = coords.index(x)
        pi = next((i for i, e in enumerate(eqs) if e[j]), None)
        if pi is not None:
            piv = eqs.pop(pi)
            if piv[j] < 0:
                piv = [-v for v in piv]
            pj = piv[j]
            eqs = [list(primitive([pj * a - e[j] * b for a, b in zip(e, piv)])) for e in eqs]
            rows = [
                (list(primitive([pj * a - r[j] * b for a, b in zip(r, piv)])), h) if r[j] else (r, h)
                for r, h in rows
            ]
        else:
            fm_done += 1
            pos = [(r, h) for r, h in rows if r[j] > 0]
            neg = [(r, h) for r, h in rows if r[j] < 0]
            new = [(r, h) for r, h in rows if r[j] == 0]
            seen = set()
            for rp, hp in pos:
                for rn, hn in neg:
                    h = hp | hn
                    if h.bit_count() > fm_done + 1:
                        continue
                    row = list(primitive([rp[j] * a - rn[j] * b for a, b in zip(rn, rp)]))
                    key = tuple(row)
                    if key in seen:
                        continue
                    seen.add(key)
                    new.append((row, h))
            rows = new
        for e in eqs:
            del e[j]
        eqs = [e for e in eqs if any(e)]
        rows = [(r[:j] + r[j + 1:], h) for r, h in rows]
        rows = [(r, h) for r, h in rows if any(r)]
        del coords[j]
    return coords, eqs, [r for r, _ in rows]


def eliminate(c: Cone, drop, method="rays") -> Cone:
    """Project out the coordinates in ``drop``.

    ``method="rays"`` projects the generators; ``method="fm"`` runs
    Fourier-Motzkin on the H-form.  Both give the same cone.
    """
    drop = list(dict.fromkeys(drop))
    for x in drop:
        c.index(x)
    keep = [i for i, x in enumerate(c.coords) if x not in set(drop)]
    coords = [c.coords[i] for i in keep]
    if method == "rays":
        lin, rays = c.raw_v()
        return Cone.from_v(coords, [[r[i] for i in keep] for r in rays], [[r[i] for i in keep] for r in lin])
    if method == "fm":
        eqs, ineqs = c.raw_h()
        coords2, eqs2, ineqs2 = _fm_eliminate(c.coords, eqs, ineqs, drop)
        return Cone.from_h(coords2, ineqs2, eqs2)
    raise ValueError(f"unknown elimination method {method!r}")


def product(a: Cone, b: Cone) -> Cone:
    clash = set(a.coords) & set(b.coords)
    if clash:
        raise NameClash(f"shared coordinates {sorted(clash)}")
    na, nb = a.n, b.n
    ea, ia = a.raw_h()
    eb, ib = b.raw_h()
    za, zb = (0,) * na, (0,) * nb
    return Cone.from_h(
        a.coords + b.coords,
        [tuple(r) + zb for r in ia] + [za + tuple(r) for r in ib],
        [tuple(r) + zb for r in ea] + [za + tuple(r) for r in eb],
    )


def _fresh(c, name):
    if name in c.coords:
        raise NameClash(f"coordinate {name!r} already present")


def substitute_sum(c: Cone, x, a, b) -> Cone:
    """Preimage under ``(.., a, b) -> (.., a + b)``; ``b`` is appended last."""
    j = c.index(x)
    if a != x:
        _fresh(c, a)
    _fresh(c, b)
    if a == b:
        raise NameClash("substitution targets must differ")
    coords = list(c.coords)
    coords[j] = a
    eqs, ineqs = c.raw_h()
    return Cone.from_h(coords + [b], [tuple(r) + (r[j],) for r in ineqs], [tuple(r) + (r[j],) for r in eqs])


def substitute_min(c: Cone, x, a, b) -> Cone:
    """Preimage under ``(.., a, b) -> (.., min(a, b))``.

    Exact when every inequality has a nonnegative coefficient on ``x`` and no
    equality involves ``x``; otherwise MinSubstitutionUnsafe.
    """
    j = c.index(x)
    if a != x:
        _fresh(c, a)
    _fresh(c, b)
    if a == b:
        raise NameClash("substitution targets must differ")
    eqs, ineqs = c.eqs, c.ineqs
    if any(r[j] for r in eqs) or any(r[j] < 0 for r in ineqs):
        raise MinSubstitutionUnsafe(f"coordinate {x!r} has a negative or equality coefficient")
    coords = list(c.coords)
    coords[j] = a
    rows = []
    for r in ineqs:
        if r[j]:
            rows.append(tuple(r) + (0,))
            rows.append(tuple(r[:j]) + (0,) + tuple(r[j + 1:]) + (r[j],))
        else:
            rows.append(tuple(r) + (0,))
    return Cone.from_h(coords + [b], rows, [tuple(r) + (0,) for r in eqs])


def restrict_zero(c: Cone, x) -> Cone:
    j = c.index(x)
    return intersect(c, eqs=[tuple(int(i == j) for i in range(c.n))])


def section_zero(c: Cone, x) -> Cone:
    """``{y : (y, x=0) in c}`` with the coordinate dropped."""
    j = c.index(x)
    eqs, ineqs = c.raw_h()
    cut = lambda r: tuple(r[:j]) + tuple(r[j + 1:])
    return Cone.from_h(c.coords[:j] + c.coords[j + 1:], [cut(r) for r in ineqs], [cut(r) for r in eqs])


def _append(c, x, ineq, eq):
    _fresh(c, x)
    eqs, ineqs = c.raw_h()
    rows = [tuple(r) + (0,) for r in ineqs]
    erows = [tuple(r) + (0,) for r in eqs]
    unit = (0,) * c.n + (1,)
    if ineq:
        rows.append(unit)
    if eq:
        erows.append(unit)
    return Cone.from_h(c.coords + (x,), rows, erows)


def add_nonneg(c: Cone, x) -> Cone:
    """Append an independent coordinate constrained only by ``x >= 0``."""
    return _append(c, x, True, False)


def add_zero(c: Cone, x) -> Cone:
    """Append a coordinate pinned to zero."""
    return _append(c, x, False, True)


def diagonal(c: Cone, a, b) -> Cone:
    """``{y : y with b := a in c}``: the section ``a = b`` with ``b`` dropped."""
    ja, jb = c.index(a), c.index(b)
    eqs, ineqs = c.raw_h()

    def fold(r):
        r = list(r)
        r[ja] += r[jb]
        del r[jb]
        return r

    coords = list(c.coords)
    del coords[jb]
    return Cone.from_h(coords, [fold(r) for r in ineqs], [fold(r) for r in eqs])


def rename(c: Cone, mapping) -> Cone:
    coords = tuple(mapping.get(x, x) for x in c.coords)
    out = Cone(coords, c._h, c._v)
    out._ch, out._cv = c._ch, c._cv
    return out


def reorder(c: Cone, coords: Sequence[str]) -> Cone:
    coords = tuple(coords)
    if sorted(coords) != sorted(c.coords):
        raise CoordinateMismatch(f"{coords} is not a permutation of {c.coords}")
    perm = [c.coords.index(x) for x in coords]
    if perm == list(range(c.n)):
        return c
    pick = lambda r: tuple(r[i] for i in perm)
    if c._h is not None:
        eqs, ineqs = c._h
        return Cone.from_h(coords, [pick(r) for r in ineqs], [pick(r) for r in eqs])
    lin, rays = c._v
    return Cone.from_v(coords, [pick(r) for r in rays], [pick(r) for r in lin])


def _same_space(a, b):
    if a.coords != b.coords:
        if sorted(a.coords) != sorted(b.coords):
            raise CoordinateMismatch(f"{a.coords} vs {b.coords}")
        b = reorder(b, a.coords)
    return b


def equal(a: Cone, b: Cone) -> bool:
    b = _same_space(a, b)
    return a.eqs == b.eqs and a.ineqs == b.ineqs


def contains(a: Cone, b: Cone) -> bool:
    """True iff ``b`` is a subset of ``a``."""
    b = _same_space(a, b)
    eqs, ineqs = a.raw_h()
    lin, rays = b.raw_v()
    for r in rays:
        if any(_dot(e, r) for e in eqs) or any(_dot(f, r) < 0 for f in ineqs):
            return False
    for l in lin:
        if any(_dot(e, l) for e in eqs) or any(_dot(f, l) for f in ineqs):
            return False
    return True
