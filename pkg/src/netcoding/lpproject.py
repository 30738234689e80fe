"""Projection of a large cone onto a few coordinates by LP-driven hull growth.

``project(n, eqs, ineqs, cols)`` returns the extreme rays of
``{x[cols] : E x = 0, A x >= 0}``.  It keeps an inner approximation
``cone(V)`` and asks, for each facet ``f`` of it, whether ``f . y >= 0`` holds
on the whole projection.  A floating point LP (HiGHS) only proposes answers.
Every answer is then made exact: a new ray must come with a rational point
``x`` that satisfies all rows, and a facet must come with rational Farkas
multipliers ``f . x[cols] = lam . A x + mu . E x``, ``lam >= 0``.  The
result is therefore exact whatever the solver does; if a proposal cannot be
certified :class:`Uncertified` is raised and the caller can fall back to an
exact route.

Precondition: ``sum(x[cols]) > 0`` for every nonzero ``x`` in the cone, so
that ``sum(y) = 1`` cuts the projection in a polytope whose vertices are its
extreme rays.
"""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csr_matrix

from .cone import Cone, _rref, _to_int, nullspace, primitive
from .errors import NetCodingError

__all__ = ["project", "implies", "Uncertified"]

_DEN = 1 << 14
_TOL = 1e-7


class Uncertified(NetCodingError):
    """The LP answer could not be turned into an exact certificate."""


def _sparse(rows, n):
    data, ri, ci = [], [], []
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            if x:
                data.append(float(x))
                ri.append(i)
                ci.append(j)
    return csr_matrix((data, (ri, ci)), shape=(len(rows), n))


class _Problem:
    def __init__(self, n, eqs, ineqs, cols):
        self.n, self.cols = n, list(cols)
        self.eqs = [list(e) for e in eqs]
        self.ineqs = [list(a) for a in ineqs]
        self.A_ub = -_sparse(self.ineqs, n)
        norm = [0] * n
        for j in self.cols:
            norm[j] = 1
        self.A_eq = _sparse(self.eqs + [norm], n)
        self.A_eq0 = _sparse(self.eqs, n) if self.eqs else None
        self.b_ub = np.zeros(len(self.ineqs))
        self.b_eq = np.zeros(len(self.eqs) + 1)
        self.b_eq[-1] = 1.0
        self.lps = 0
        # sparse rows for exact checks
        self.sp_ineqs = [[(j, x) for j, x in enumerate(r) if x] for r in self.ineqs]
        self.sp_eqs = [[(j, x) for j, x in enumerate(r) if x] for r in self.eqs]

    def solve(self, f, normalized=True):
        """LP ``min f . x[cols]`` over the cone cut by ``sum(x[cols]) = 1``.

        Without the cut the optimum is 0 exactly when ``f`` is valid, and the
        duals are then plain Farkas multipliers.
        """
        c = np.zeros(self.n)
        for j, x in zip(self.cols, f):
            c[j] += float(x)
        self.lps += 1
        if normalized:
            eq = dict(A_eq=self.A_eq, b_eq=self.b_eq)
        else:
            eq = dict(A_eq=self.A_eq0, b_eq=self.b_eq[:-1] if self.eqs else None)
        res = linprog(c, A_ub=self.A_ub, b_ub=self.b_ub, bounds=(None, None), method="highs", **eq)
        if res.status == (2 if normalized else 3):
            return None  # normalized: nothing but 0; plain: f is unbounded below
        if res.status != 0:
            raise Uncertified(f"LP failed: {res.message}")
        return res

    # exact checks

    def feasible(self, x):
        if any(sum(c * x[j] for j, c in r) < 0 for r in self.sp_ineqs):
            return False
        return all(sum(c * x[j] for j, c in r) == 0 for r in self.sp_eqs)

    def point(self, xf):
        """Exact cone point near the LP vertex ``xf``, or None."""
        x = [Fraction(v).limit_denominator(_DEN) for v in xf]
        if self.feasible(x):
            return x
        # solve the active system exactly
        act = [r for r in self.ineqs if abs(float(np.dot(r, xf))) <= _TOL * 10]
        basis = nullspace(act + self.eqs, self.n)
        if len(basis) != 1:
            return None
        v = list(basis[0])
        if sum(v[j] for j in self.cols) < 0:
            v = [-t for t in v]
        return v if self.feasible(v) else None

    def certified(self, f):
        """True when exact multipliers prove ``f . x[cols] >= 0``."""
        res = self.solve(f, normalized=False)
        if res is None:
            return False
        c = [0] * self.n
        for j, x in zip(self.cols, f):
            c[j] += x
        lam = [Fraction(-v).limit_denominator(_DEN) for v in res.ineqlin.marginals]
        mu = [Fraction(v).limit_denominator(_DEN) for v in res.eqlin.marginals] if self.eqs else []
        if self._identity(c, lam, mu):
            return True
        # exact solve on the support of the float multipliers
        supp = [i for i, v in enumerate(res.ineqlin.marginals) if -v > _TOL]
        cols = [self.ineqs[i] for i in supp] + self.eqs
        if not cols:
            return not any(c)
        # unknowns: one per chosen row; equations: one per coordinate
        system = [[r[j] for r in cols] + [c[j]] for j in range(self.n)]
        red, piv = _rref(system, len(cols) + 1)
        if len(cols) in piv:
            return False
        sol = [Fraction(0)] * len(cols)
        for row, p in zip(red, piv):
            sol[p] = row[-1]
        k = len(supp)
        lam = [Fraction(0)] * len(self.ineqs)
        for i, v in zip(supp, sol[:k]):
            lam[i] = v
        return self._identity(c, lam, list(sol[k:]))

    def _identity(self, c, lam, mu):
        if any(v < 0 for v in lam):
            return False
        acc = [Fraction(0)] * self.n
        for v, r in zip(lam, self.sp_ineqs):
            if v:
                for j, a in r:
                    acc[j] += v * a
        for v, r in zip(mu, self.sp_eqs):
            if v:
                for j, a in r:
                    acc[j] += v * a
        return acc == c


def project(n, eqs, ineqs, cols, seed=0):
    """Integer extreme rays of the projection of the cone onto ``cols``.

    Returns ``(rays, stats)`` with ``stats = {"lps": ..., "rounds": ...}``.
    """
    prob = _Problem(n, eqs, ineqs, cols)
    d = len(cols)
    names = [f"y{i}" for i in range(d)]
    rng = random.Random(seed)
    V = []
    valid = set()
    rounds = 0
    while True:
        rounds += 1
        hull = Cone.from_v(names, V)
        cand = list(hull.ineqs)
        for e in hull.eqs:
            cand += [tuple(e), tuple(-x for x in e)]
        todo = [f for f in cand if f not in valid]
        if not todo:
            break
        added = []
        for f in todo:
            if any(_dot(f, v) < 0 for v in added):
                continue  # already cut by a ray found this round
            res = prob.solve(f)
            if res is None:
                # the cut is empty, so the projection should be {0}
                if prob.certified(tuple(-1 for _ in cols)):
                    return [], {"lps": prob.lps, "rounds": rounds}
                raise Uncertified("empty cut without a certificate")
            if res.fun > -_TOL and prob.certified(f):
                valid.add(f)
                continue
            y = _new_ray(prob, f, res, rng)
            if y is None:
                raise Uncertified(f"no exact certificate for row {f}")
            added.append(y)
        if not added:
            break
        V += added
    return sorted(V), {"lps": prob.lps, "rounds": rounds}


def implies(n, eqs, ineqs, f):
    """Exact answer to: does ``f . x >= 0`` hold on ``{E x = 0, A x >= 0}``?

    True comes with Farkas multipliers, False with a rational point of the
    cone where ``f . x < 0``.  Requires ``sum(x) > 0`` on the cone minus 0.
    """
    prob = _Problem(n, eqs, ineqs, range(n))
    if prob.certified(tuple(f)):
        return True
    res = prob.solve(f)
    if res is not None and res.fun < -_TOL:
        x = prob.point(res.x)
        if x is not None and _dot(f, x) < 0:
            return False
    raise Uncertified(f"no exact answer for row {tuple(f)}")


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _new_ray(prob, f, res, rng):
    """An exact ray with ``f . y < 0``; tries a perturbed objective first."""
    tries = []
    scale = max(abs(res.fun), 1e-6) * 1e-3
    g = [rng.randint(1, 7) for _ in f]
    tries.append([a + scale * b for a, b in zip(f, g)])
    tries.append(list(f))
    for obj in tries:
        r = res if obj is tries[-1] else prob.solve(obj)
        if r is None:
            continue
        x = prob.point(r.x)
        if x is None:
            continue
        y = _to_int([Fraction(x[j]) for j in prob.cols])
        if _dot(f, y) < 0:
            return primitive(y)
    return None
