import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from netcoding import cone as cn
from netcoding.cone import Cone, nullspace, primitive
from netcoding.errors import CoordinateMismatch, NameClash

from conftest import random_cone


def _rank(rows, n):
    m = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    for col in range(n):
        piv = next((i for i in range(rank, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col]:
                f = m[i][col] / m[rank][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


def test_orthant_rays():
    c = Cone.from_h(["x", "y"], [(1, 0), (0, 1)])
    assert sorted(c.rays) == [(0, 1), (1, 0)]
    assert c.lin == ()


def test_rays_to_h():
    c = Cone.from_v(["x", "y"], [(1, 1), (1, -1)])
    assert sorted(c.ineqs) == [(1, -1), (1, 1)]


def test_lineality_and_equalities():
    c = Cone.from_h(["x", "y", "z"], [(1, 0, 0)], [(0, 1, -1)])
    assert len(c.lin) == 1 and c.eqs
    assert cn.equal(c, Cone.from_v(c.coords, c.rays, c.lin))


def test_full_and_zero():
    f, z = Cone.full(["a", "b"]), Cone.zero(["a", "b"])
    assert f.ineqs == () and f.eqs == ()
    assert z.rays == () and z.lin == ()
    assert cn.contains(f, z) and not cn.contains(z, f)


def test_primitive_and_nullspace():
    assert primitive((4, -6, 0)) == (2, -3, 0)
    basis = nullspace([(1, 1, 0)], 3)
    assert len(basis) == 2 and all(v[0] + v[1] == 0 for v in basis)


def _check_extreme(c, rows, erows):
    n = c.n
    lin = [list(v) for v in c.lin]
    for r in c.rays:
        assert all(cn._dot(a, r) >= 0 for a in rows)
        assert all(cn._dot(a, r) == 0 for a in erows)
        tight = [a for a in rows if cn._dot(a, r) == 0] + list(erows)
        # a ray is extreme iff the tight rows have rank n - 1 - dim(lin) modulo lineality
        assert _rank(tight, n) == n - 1 - len(lin)
    for v in c.lin:
        assert all(cn._dot(a, v) == 0 for a in list(rows) + list(erows))


def test_random_dd_round_trip():
    rng = random.Random(11)
    for _ in range(120):
        c, rows, erows = random_cone(rng, eqs=rng.randint(0, 1))
        _check_extreme(c, rows, erows)
        back = Cone.from_v(c.coords, c.rays, c.lin)
        assert back.key() == c.key()
        again = Cone.from_h(c.coords, back.ineqs, back.eqs)
        assert again.key() == c.key()


def test_random_fm_matches_ray_projection():
    rng = random.Random(5)
    for _ in range(80):
        c, _, _ = random_cone(rng, n=rng.randint(2, 6))
        drop = rng.sample(list(c.coords), rng.randint(1, min(2, c.n - 1)))
        a = cn.eliminate(c, drop, method="rays")
        b = cn.eliminate(c, drop, method="fm")
        assert cn.equal(a, b)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), max_size=8))
def test_h_v_involution(rows):
    c = Cone.from_h(["a", "b", "c", "d"], [tuple(r) for r in rows])
    v = Cone.from_v(c.coords, c.rays, c.lin)
    assert v.key() == c.key()
    assert cn.contains(c, v) and cn.contains(v, c)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(0, 3), min_size=3, max_size=3), min_size=1, max_size=6))
def test_contains_generators(rays):
    c = Cone.from_v(["x", "y", "z"], [tuple(r) for r in rays if any(r)])
    for r in rays:
        assert cn.contains(c, Cone.from_v(c.coords, [tuple(r)] if any(r) else []))


def test_product_and_rename():
    a = Cone.from_h(["x"], [(1,)])
    b = Cone.from_h(["y"], [(-1,)])
    p = cn.product(a, b)
    assert p.coords == ("x", "y")
    assert cn.equal(p, Cone.from_h(["x", "y"], [(1, 0), (0, -1)]))
    with pytest.raises(NameClash):
        cn.product(a, a)
    r = cn.rename(a, {"x": "z"})
    assert r.coords == ("z",)


def test_reorder_and_mismatch():
    c = Cone.from_h(["x", "y"], [(1, -1)])
    d = cn.reorder(c, ["y", "x"])
    assert d.ineqs == ((-1, 1),)
    with pytest.raises(CoordinateMismatch):
        cn.equal(c, Cone.from_h(["x"], [(1,)]))


def test_substitute_sum_and_min():
    # {x >= z}; replacing x by a + b
    c = Cone.from_h(["x", "z"], [(1, -1), (0, 1)])
    s = cn.substitute_sum(c, "x", "x", "b")
    assert cn.equal(s, Cone.from_h(s.coords, [tuple(1 if n in ("x", "b") else -1 if n == "z" else 0 for n in s.coords),
                                               tuple(int(n == "z") for n in s.coords)]))
    m = cn.substitute_min(c, "x", "x", "b")
    # min(x, b) >= z >= 0  iff  x >= z, b >= z
    want = [tuple({"x": 1, "z": -1}.get(n, 0) for n in m.coords), tuple({"b": 1, "z": -1}.get(n, 0) for n in m.coords),
            tuple(int(n == "z") for n in m.coords)]
    assert cn.equal(m, Cone.from_h(m.coords, want))


def test_section_diagonal_add():
    c = Cone.from_h(["x", "y"], [(1, -1), (0, 1)])
    assert cn.equal(cn.section_zero(c, "x"), Cone.zero(["y"]))
    d = cn.diagonal(c, "x", "y")
    assert d.coords == ("x",)
    assert cn.equal(d, Cone.from_h(["x"], [(1,)]))
    e = cn.add_nonneg(c, "z")
    assert e.coords == ("x", "y", "z") and (0, 0, 1) in e.ineqs
    z = cn.add_zero(c, "z")
    assert cn.equal(cn.section_zero(z, "z"), c)


def test_intersect_and_restrict():
    c = Cone.full(["x", "y"])
    c = cn.intersect(c, [(1, 0)], [(1, -1)])
    assert cn.equal(c, Cone.from_v(["x", "y"], [(1, 1)]))
    r = cn.restrict_zero(Cone.from_h(["x", "y"], [(1, 0), (0, 1)]), "x")
    assert cn.equal(r, Cone.from_v(["x", "y"], [(0, 1)]))
