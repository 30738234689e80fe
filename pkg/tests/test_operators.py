import itertools

import pytest

from netcoding import cone as cn
from netcoding.errors import BadMap, InvalidElement
from netcoding.minimality import is_minimal
from netcoding.netmodel import EdgeRep
from netcoding.operators import (
    canonical_key,
    combined_region,
    contract_edge,
    delete_edge,
    delete_source,
    embeddings,
    is_minor,
    merge_candidates,
    merge_edge,
    merge_node,
    merge_sinks,
    merge_sources,
    minor_scan,
    predicted_size,
    region_after_contract,
    region_after_delete,
    region_after_embed,
)
from netcoding.rateregion import inner_region, outer_region, sufficiency

from conftest import N11, N21, cell, net, seed_reps

# a (2,2) net where scalar binary codes fall short of the outer bound
GAP22 = "{Q: 3<-{1,2}, 4<-{1,2}; W: 1<-{2,3}, 1<-{2,4}, 1<-{3,4}, 2<-{1,3}, 2<-{1,4}}"


def same(a, b):
    return canonical_key(a) == canonical_key(b)


def rows(R):
    return set(R.cone.ineqs), set(map(tuple, R.cone.eqs))


# -- embeddings


def test_delete_source_examples(n11, n21):
    res, rec = delete_source(n21, 2)
    assert same(res, n11)
    assert rec.kind == "del-src" and rec.elements == (2,)
    res, _ = delete_source(n11, 1)
    assert res.is_empty()
    with pytest.raises(InvalidElement):
        delete_source(n11, 2)
    with pytest.raises(InvalidElement):
        delete_source(n11, 7)


def test_delete_edge_examples(n11, n21):
    res, _ = delete_edge(n21, 3)
    assert res.is_empty()
    with pytest.raises(InvalidElement):
        delete_edge(n11, 1)


def test_contract_examples(n11):
    res, _ = contract_edge(n11, 2)
    assert res.is_empty()
    res, _ = contract_edge(net("{Q: 2<-{1}, 3<-{2}; W: 1<-{3}}"), 2)
    assert same(res, n11)
    with pytest.raises(InvalidElement):
        contract_edge(n11, 1)


def test_region_after_delete_source(n21):
    res, rec = delete_source(n21, 2)
    R = region_after_delete(outer_region(n21), rec)
    assert R.cone == outer_region(res).cone
    assert rows(R)[0] >= {(-1, 1)}  # r >= w1


def test_delete_edge_starves_a_sink():
    # the sink reading only edge 3 still wants source 1: r3 = 0 forces w1 = 0
    x = net("{Q: 2<-{1}, 3<-{1}; W: 1<-{2}, 1<-{3}}")
    res, rec = delete_edge(x, 3)
    assert res.is_empty()
    assert "D6-sink" in [r.rule for r in rec.trace.records]
    R0 = cn.section_zero(outer_region(x).cone, "r3")
    assert set(R0.eqs) == {(1, 0)}
    assert region_after_delete(outer_region(x), rec).cone == outer_region(res).cone


def test_region_after_delete_unused_coordinate():
    # no row of R_o(N21) ties w1 to r3 alone: the section is a plain projection
    x = net(N21)
    _, rec = delete_source(x, 1)
    R = region_after_delete(outer_region(x), rec)
    assert R.cone == outer_region(rec.result).cone


def test_region_after_contract_to_empty(n11):
    _, rec = contract_edge(n11, 2)
    R = region_after_contract(outer_region(n11), rec)
    assert R.cone == outer_region(rec.result).cone


def test_contract_scalar_label_is_one_sided(n21):
    for e in n21.edge_ids:
        _, rec = contract_edge(n21, e)
        R = region_after_contract(inner_region(n21, 2), rec)
        assert R.bound == "scalar-2-inner"
    _, rec = delete_source(n21, 1)
    assert region_after_delete(inner_region(n21, 2), rec).bound == "scalar-2"


def test_embeddings_on_small_cells():
    n = 0
    for rep in cell(1, 2) + cell(2, 1) + cell(3, 1):
        x = net(str(rep))
        R = outer_region(x)
        for res, rec in embeddings(x):
            assert is_minimal(res) or res.is_empty()
            assert region_after_embed(R, rec).cone == outer_region(res).cone
            n += 1
    # one per source, edge deletion and contraction
    assert n == sum(rep.K + 2 * rep.L for rep in cell(1, 2) + cell(2, 1) + cell(3, 1))


# -- merges


def test_src_merge_two_n11(n11):
    raw, rec = merge_sources(n11, [1], n11, {1: 1})
    # not minimal (two encoders of the same input), so compared as built
    assert str(raw) == "(1,2) g{1}->{2} g{1}->{3} t{2}:{1} t{3}:{1}"
    assert not is_minimal(raw)
    R = combined_region(rec, outer_region(n11), outer_region(n11))
    assert R.cone.coords == ("w1", "r2", "r3")
    assert set(R.cone.ineqs) == {(-1, 1, 0), (-1, 0, 1), (1, 0, 0)}
    assert R.cone == outer_region(raw).cone


def test_src_merge_empty_map_is_disjoint_union(n11):
    raw, rec = merge_sources(n11, [], n11, {})
    raw2, _ = merge_sinks(n11, [], n11, {})
    assert (raw.K, raw.L) == (2, 2) and same(raw, raw2)
    assert combined_region(rec, outer_region(n11), outer_region(n11)).cone == outer_region(raw).cone


def test_src_merge_all_sources_of_n21(n21):
    raw, rec = merge_sources(n21, [1, 2], n21, {1: 1, 2: 2})
    assert (raw.K, raw.L) == (2, 2) and len(raw.sinks) == 4
    RA = outer_region(n21)
    for method in ("concat", "product"):
        assert combined_region(rec, RA, RA, method).cone == outer_region(raw).cone


def test_src_merge_bad_maps(n11, n21):
    with pytest.raises(BadMap):
        merge_sources(n11, [1], n21, {1: 3})
    with pytest.raises(BadMap):
        merge_sources(n21, [1, 2], n21, {1: 1, 2: 1})
    with pytest.raises(BadMap):
        merge_sources(n11, [1], n11, {})


def test_sink_merge_two_n11(n11):
    raw, rec = merge_sinks(n11, [0], n11, {0: 0})
    assert same(raw, net("{Q: 3<-{1}, 4<-{2}; W: 1<-{3,4}, 2<-{3,4}}"))
    (demand,) = [d for _, d in raw.sinks]
    assert set(demand) == {1, 2}
    R = combined_region(rec, outer_region(n11), outer_region(n11))
    assert set(R.cone.ineqs) == {(-1, 0, 1, 0), (0, -1, 0, 1), (1, 0, 0, 0), (0, 1, 0, 0)}
    assert R.cone == outer_region(raw).cone
    with pytest.raises(BadMap):
        merge_sinks(n11, [0], n11, {0: 1})


def test_node_merge_two_n11(n11):
    raw, _ = merge_node(n11, 0, n11, 0)
    assert same(raw, net("{Q: 3<-{1,2}, 4<-{1,2}; W: 1<-{3}, 2<-{4}}"))
    with pytest.raises(BadMap):
        merge_node(n11, (0,), n11, (0,))
    with pytest.raises(BadMap):
        merge_node(n11, 0, n11, 3)


def test_node_merge_hyperedge_heads(n11, n21):
    # the N21 node feeds an edge read by both of its sinks; both keep it
    raw, rec = merge_node(n11, 0, n21, 0)
    assert len(raw.nodes) == 1 and len(raw.sinks) == 3
    e = rec.relabel_map()[(1, 3)]
    assert len(raw.head_sinks(e)) == 2
    R = combined_region(rec, outer_region(n11), outer_region(n21))
    assert R.cone == outer_region(raw).cone


def test_edge_merge_two_n11(n11):
    raw, rec = merge_edge(n11, 2, n11, 2)
    assert (raw.K, raw.L) == (2, 4)
    a, b, c, d = rec.extra
    g0 = raw.tails[c - 3]
    assert raw.tails[d - 3] == g0 and raw.nodes[g0] == {a, b}
    assert raw.tails[a - 3] != raw.tails[b - 3]
    R = combined_region(rec, outer_region(n11), outer_region(n11))
    co = R.cone.coords
    want = set()
    for e, w in ((a, "w1"), (c, "w1"), (b, "w2"), (d, "w2")):
        v = [0] * len(co)
        v[co.index(f"r{e}")], v[co.index(w)] = 1, -1
        want.add(tuple(v))
    assert want <= set(R.cone.ineqs)
    assert R.cone == outer_region(raw).cone
    with pytest.raises(BadMap):
        merge_edge(n11, 1, n11, 2)


def test_combined_region_rejects_embedding_record(n11):
    _, rec = delete_source(n11, 1)
    with pytest.raises(BadMap):
        combined_region(rec, outer_region(n11), outer_region(n11))


def test_predicted_size_bounds_actual():
    seeds = [net(str(r)) for r in seed_reps()]
    for A, B in itertools.product(seeds[:3], repeat=2):
        for raw, rec in merge_candidates(A, B):
            K, L = predicted_size(rec.kind, A, B, len(rec.elements))
            assert (raw.K, raw.L) == (K, L)
            pK, pL = predicted_size(rec.kind, A, B)
            assert raw.K <= pK and raw.L <= pL


# -- minors


def test_is_minor_examples(n11, n21):
    (step,) = is_minor(EdgeRep.from_text(N11), EdgeRep.from_text(N21), 1)
    assert step[0] == "del-src"
    assert is_minor(n11, n21, 0) is None
    assert is_minor(n21, n11, 5) is None
    assert is_minor(n21, n21, 0) == []


def test_minor_scan_trivial(n21):
    assert minor_scan(n21, []) == []
    ((hit, witness),) = minor_scan(n21, [n21])
    assert witness == []


def test_forbidden_minor_implies_insufficiency():
    small = net(GAP22)
    assert not sufficiency(small)[0].equal
    big, _ = merge_sources(small, [1], net(N11), {1: 1})
    assert (big.K, big.L) == (2, 3) and is_minimal(big)
    hits = minor_scan(big, [small], budget=1)
    assert len(hits) == 1 and len(hits[0][1]) == 1
    assert not sufficiency(big)[0].equal
