import functools

import pytest

from netcoding.enumeration import enumerate_networks
from netcoding.netmodel import EdgeRep, node_rep

N11 = "{Q: 2<-{1}; W: 1<-{2}}"
N21 = "{Q: 3<-{1,2}; W: 1<-{2,3}, 2<-{1,3}}"


@functools.lru_cache(maxsize=None)
def cell(K, L, relay_filter=True):
    return tuple(rep for rep, _ in enumerate_networks(K, L, relay_filter))


@functools.lru_cache(maxsize=None)
def seed_reps():
    """The six smallest canonical networks: (1,1), (2,1) and the four (1,2)."""
    return cell(1, 1, False) + cell(2, 1) + cell(1, 2)


def net(text, K=None):
    return node_rep(EdgeRep.from_text(text, K))


@pytest.fixture
def n11():
    return net(N11)


@pytest.fixture
def n21():
    return net(N21)


def random_cone(rng, n=None, m=None, eqs=0):
    """A random H-described cone over x1..xn with small integer rows."""
    from netcoding.cone import Cone

    n = n or rng.randint(1, 8)
    m = rng.randint(0, 10) if m is None else m
    rows = [tuple(rng.randint(-2, 2) for _ in range(n)) for _ in range(m)]
    erows = [tuple(rng.randint(-1, 1) for _ in range(n)) for _ in range(eqs)]
    return Cone.from_h([f"x{i}" for i in range(1, n + 1)], rows, erows), rows, erows
