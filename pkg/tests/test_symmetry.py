import math
import random

import pytest

from netcoding.errors import DimensionMismatch
from netcoding.netmodel import EdgeRep
from netcoding.symmetry import (
    Perm,
    act,
    all_perms,
    canonicalize,
    compare,
    orbit,
    orbit_size,
    stabilizer,
)

from conftest import N21, cell


def test_perm_algebra():
    p = Perm.from_blocks([2, 1], [4, 3])
    q = Perm.from_blocks([1, 2], [4, 3])
    assert p.compose(p.inverse()).is_identity()
    assert p.compose(q)(3) == 3 and p.compose(q)(1) == 2
    with pytest.raises(DimensionMismatch):
        Perm.from_blocks([1, 3], [2])


def test_n21_stabilizer():
    rep = EdgeRep.from_text(N21)
    st = stabilizer(rep)
    assert st.order == 2
    assert Perm.from_blocks([2, 1], [3]) in st
    assert orbit_size(rep) == 1


def test_act_and_compare():
    rep = EdgeRep.from_text("{Q: 3<-{1}; W: 1<-{3}, 2<-{1,3}}", K=2)
    swapped = act(Perm.from_blocks([2, 1], [3]), rep)
    assert str(swapped) == "{Q: 3<-{2}; W: 1<-{2,3}, 2<-{3}}"
    assert compare(rep, swapped) == -1 and compare(swapped, rep) == 1 and compare(rep, rep) == 0


@pytest.mark.parametrize("K,L", [(1, 2), (2, 1), (3, 1), (1, 3), (2, 2)])
def test_canonical_constant_on_orbits(K, L):
    rng = random.Random(K * 10 + L)
    perms = all_perms(K, L)
    for rep in cell(K, L):
        assert canonicalize(rep)[0] == rep
        for _ in range(5):
            img = act(rng.choice(perms), rep)
            c, p = canonicalize(img)
            assert c == rep
            assert act(p, img) == rep


@pytest.mark.parametrize("K,L", [(1, 2), (2, 1), (3, 1), (1, 3), (2, 2)])
def test_orbit_stabilizer(K, L):
    for rep in cell(K, L):
        assert len(orbit(rep)) * stabilizer(rep).order == math.factorial(K) * math.factorial(L)


def test_stabilizer_is_group():
    for rep in cell(2, 2)[:40]:
        st = stabilizer(rep)
        el = set(st.elements)
        assert all(a.compose(b) in el for a in el for b in el)
        # generators span the group
        span = {Perm.identity(rep.K, rep.L)}
        frontier = list(span)
        while frontier:
            x = frontier.pop()
            for g in st.generators:
                y = g.compose(x)
                if y not in span:
                    span.add(y)
                    frontier.append(y)
        assert span == el
