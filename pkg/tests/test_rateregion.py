import itertools

import pytest

from netcoding import cone as cn
from netcoding.cone import Cone
from netcoding.errors import SizeCap
from netcoding.rateregion import (
    bound_label,
    code_points,
    elemental_rows,
    entropy_coords,
    inner_region,
    network_constraints,
    outer_region,
    scalar_rank_vectors,
    shannon_cone,
    sufficiency,
    vector_rank_vectors,
)

from conftest import N11, N21, cell, net


def _add(acc, d, k=1):
    for m, c in d.items():
        acc[m] = acc.get(m, 0) + k * c
    return acc


def _cmi(i, j, K):
    """I(i;j|K) as a mask -> coefficient dict; i, j are single-bit masks."""
    d = {}
    _add(d, {i | K: 1, j | K: 1, i | j | K: -1})
    if K:
        _add(d, {K: -1})
    return d


def _certificate(A, B, C, N):
    """Express I(A;B|C) (or H(A|C) when B == 0) as a nonnegative sum of elemental rows.

    Returns the elemental multiset as (row dict, multiplicity) pairs.
    Chain rule over the bits of A, then of B; H(a|D) is expanded into
    H(a | rest) plus mutual informations.
    """
    full = (1 << N) - 1
    out = []
    bits = lambda m: [1 << k for k in range(N) if m >> k & 1]
    done_a = 0
    for a in bits(A):
        if B:
            done_b = 0
            for b in bits(B):
                out.append(_cmi(a, b, C | done_a | done_b))
                done_b |= b
        else:
            D = C | done_a
            # H(a|D) = H(a|full-a) + I(a; full-a-D | D), chained again
            out.append({full: 1, full & ~a: -1})
            rest_done = 0
            for x in bits(full & ~a & ~D):
                out.append(_cmi(a, x, D | rest_done))
                rest_done |= x
        done_a |= a
    return out


def _as_dict(row, N):
    return {m: c for m, c in zip(range(1, 1 << N), row) if c}


def _quantity(A, B, C):
    if B:
        d = {A | C: 1, B | C: 1, A | B | C: -1}
        if C:
            _add(d, {C: -1})
    else:
        d = {A | C: 1}
        if C:
            _add(d, {C: -1})
    return {m: c for m, c in d.items() if c}


@pytest.mark.parametrize("N,count", [(1, 1), (2, 3), (3, 9), (4, 28), (5, 85)])
def test_elemental_counts(N, count):
    formula = N + (N * (N - 1) // 2) * 2 ** (N - 2) if N > 1 else 1
    assert len(elemental_rows(N)) == count == formula


def test_two_variable_rows():
    c = shannon_cone(2)
    assert c.coords == ("h1", "h2", "h12")
    assert sorted(c.ineqs) == sorted([(1, 1, -1), (-1, 0, 1), (0, -1, 1)])


@pytest.mark.parametrize("N", [2, 3, 4])
def test_elemental_rows_irredundant(N):
    assert len(shannon_cone(N).ineqs) == len(elemental_rows(N))


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_basic_inequalities_are_elemental_sums(N):
    elem = {frozenset(d.items()) for d in elemental_rows(N)}
    full = (1 << N) - 1
    n = 0
    for A in range(1, full + 1):
        for B in range(0, full + 1):
            if A & B or (B and B < A):
                continue
            for C in range(0, full + 1):
                if C & (A | B):
                    continue
                cert = _certificate(A, B, C, N)
                total = {}
                for d in cert:
                    d = {m: c for m, c in d.items() if c}
                    assert frozenset(d.items()) in elem
                    _add(total, d)
                total = {m: c for m, c in total.items() if c}
                assert total == _quantity(A, B, C)
                n += 1
    assert n > 0


def test_constraints_n21():
    lines = str(network_constraints(net(N21))).splitlines()
    assert lines == ["L1: -h1 -h2 +h12 = 0", "L3: -h12 +h123 = 0", "L4': +r3 -h3 >= 0",
                     "L5: -h13 +h123 = 0", "L5: -h23 +h123 = 0"]


def test_constraints_n11():
    c = network_constraints(net(N11))
    assert (len(c.l3), len(c.l4), len(c.l5)) == (1, 1, 1)


def test_outer_small():
    assert cn.equal(outer_region(net(N11)).cone, Cone.from_h(["w1", "r2"], [(-1, 1), (1, 0)]))
    assert cn.equal(outer_region(net(N21)).cone, Cone.from_h(["w1", "w2", "r3"], [(-1, 0, 1), (0, -1, 1), (1, 0, 0), (0, 1, 0)]))
    lit = net("{Q: 3<-{1,2}; W: 1<-{3}, 2<-{3}}")
    assert cn.equal(outer_region(lit).cone, Cone.from_h(["w1", "w2", "r3"], [(-1, -1, 1), (1, 0, 0), (0, 1, 0)]))


@pytest.mark.parametrize("K,L", [(1, 2), (2, 1), (1, 3), (3, 1)])
def test_outer_routes_agree(K, L):
    for rep in cell(K, L):
        n = net(str(rep), K)
        a = outer_region(n).cone
        assert cn.equal(a, outer_region(n, "face").cone)
        assert cn.equal(a, outer_region(n, "direct").cone)


def test_outer_routes_agree_22_sample():
    for rep in cell(2, 2)[::25]:
        n = net(str(rep), 2)
        assert cn.equal(outer_region(n).cone, outer_region(n, "face").cone)


def test_scalar_rank_vectors_small():
    assert scalar_rank_vectors(1, 2) == {(0,), (1,)}
    assert scalar_rank_vectors(2, 2) == {(0, 0, 0), (1, 0, 1), (0, 1, 1), (1, 1, 1), (1, 1, 2)}


def _span_rank(vecs, q, n):
    span = {tuple([0] * n)}
    for v in vecs:
        span = {tuple((a + c * b) % q for a, b in zip(s, v)) for s in span for c in range(q)}
    r = 0
    while q ** r < len(span):
        r += 1
    return r


@pytest.mark.parametrize("N,q", [(2, 3), (3, 2)])
def test_scalar_rank_vectors_brute_force(N, q):
    want = set()
    vecs = list(itertools.product(range(q), repeat=N))
    for tup in itertools.product(vecs, repeat=N):
        want.add(tuple(_span_rank([tup[i] for i in range(N) if m >> i & 1], q, N) for m in range(1, 1 << N)))
    assert scalar_rank_vectors(N, q) == want


def test_rank_vectors_are_polymatroids():
    c = shannon_cone(3)
    for v in scalar_rank_vectors(3, 2):
        assert all(cn._dot(r, v) >= 0 for r in c.ineqs)


def test_vector_rank_vectors():
    v2 = vector_rank_vectors(2, 2, 2)
    assert (2, 1, 2) not in v2
    assert scalar_rank_vectors(2, 2) <= v2
    v3 = vector_rank_vectors(2, 2, 3)
    assert (2, 1, 3) in v3 and (2, 1, 2) in v3
    with pytest.raises(SizeCap):
        vector_rank_vectors(2, 2, 9)


@pytest.mark.parametrize("K,L", [(1, 2), (2, 1), (3, 1)])
def test_inner_routes_agree(K, L):
    for rep in cell(K, L):
        n = net(str(rep), K)
        assert cn.equal(inner_region(n, 2).cone, inner_region(n, 2, method="filter").cone)


def test_inner_vector_routes_agree():
    for rep in cell(1, 2):
        n = net(str(rep), 1)
        assert cn.equal(inner_region(n, 2, 4).cone, inner_region(n, 2, 4, method="filter").cone)


def test_inner_inside_outer():
    for rep in cell(2, 2)[::10]:
        n = net(str(rep), 2)
        assert cn.contains(outer_region(n).cone, inner_region(n, 2).cone)


def test_code_points_n21():
    pts = code_points(net(N21), 2)
    assert (1, 1, 1) in pts and (1, 0, 1) in pts


def test_labels_and_sufficiency():
    assert bound_label() == "outer-shannon"
    assert bound_label(2) == "scalar-2"
    assert bound_label(2, 5) == "vector-2-5"
    s = sufficiency(net(N21))[0]
    assert s.equal and s.ray is None
    hits = sum(sufficiency(net(str(r), 3))[0].equal for r in cell(3, 1))
    assert hits == 4


def test_entropy_coords_names():
    assert entropy_coords(3)[-1] == "h123"
    assert len(entropy_coords(4)) == 15
