import pytest

from netcoding.errors import MalformedRep, NotEncodable
from netcoding.netmodel import EdgeRep, Network, edge_rep, node_rep, reachable, validate

from conftest import N21, cell


def test_n21_structure(n21):
    assert (n21.K, n21.L, n21.N) == (2, 1, 3)
    assert n21.nodes == (frozenset({1, 2}),)
    assert n21.enc() == {3: frozenset({1, 2})}
    assert n21.head_sinks(3) == [0, 1]
    assert n21.sinks[0] == (frozenset({1, 3}), frozenset({2}))
    assert n21.gamma(1) == [1]
    assert n21.sigma(0) == {1, 2}
    assert validate(n21) == []


def test_text_round_trip():
    rep = EdgeRep.from_text(N21)
    assert str(rep) == N21
    assert EdgeRep.from_text(str(rep)) == rep


def test_build_merges_shared_inputs():
    net = Network.build(1, 2, {2: {1}, 3: {1}}, [({2}, {1}), ({2}, {1}), ({3}, {1})])
    assert len(net.nodes) == 1
    assert net.out_edges(0) == [2, 3]
    assert len(net.sinks) == 2


@pytest.mark.parametrize("K,L", [(1, 2), (2, 1), (1, 3), (3, 1), (2, 2)])
def test_edge_node_round_trip(K, L):
    for rep in cell(K, L):
        assert edge_rep(node_rep(rep)) == rep


def test_refusals():
    with pytest.raises(NotEncodable):
        edge_rep(Network.build(1, 1, {2: {1}}, [({2}, {1})], dangling=[{2}]))
    with pytest.raises(NotEncodable):
        edge_rep(Network.build(1, 1, {2: set()}, [({2}, {1})]))
    with pytest.raises(NotEncodable):
        edge_rep(Network.build(1, 1, {2: {1}}, [({2}, set())]))


def test_malformed_reps():
    with pytest.raises(MalformedRep):
        EdgeRep.make(1, 2, [(2, [3]), (3, [2])], [])
    with pytest.raises(MalformedRep):
        EdgeRep.make(1, 1, [(2, [])], [])
    with pytest.raises(MalformedRep):
        EdgeRep.make(1, 1, [(2, [1])], [(2, [1])])


def test_cycle_flagged():
    net = Network(1, 2, (frozenset({1, 3}), frozenset({2})), (0, 1), ())
    assert any("cycle" in d for d in validate(net))


def test_reachable():
    rep = EdgeRep.from_text("{Q: 2<-{1}, 3<-{2}; W: 1<-{3}}")
    assert reachable(rep, 1, 3)
    assert not reachable(rep, 3, 1)
    assert not reachable(rep, 2, 2)
