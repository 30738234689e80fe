import pytest

from netcoding.closure import closure_stats, partial_closure, to_canonical
from netcoding.errors import CapTooSmall
from netcoding.minimality import is_minimal
from netcoding.netmodel import node_rep
from netcoding.operators import MERGE_OPS
from netcoding.rateregion import outer_region
from netcoding.symmetry import act, all_perms

from conftest import N21, cell, net, seed_reps


def run(K, L, embed=True):
    return partial_closure(list(seed_reps()), K, L, enable_embed=embed)


def test_combinations_only_give_three():
    store = run(2, 2, embed=False)
    cells, depths = closure_stats(store)
    assert cells == {(1, 1): 1, (1, 2): 4, (2, 1): 1, (2, 2): 3}
    assert depths == {0: 6, 1: 3}
    for e in store.values():
        if e.size == (2, 2):
            assert e.provenance[0][0] in MERGE_OPS


def test_regions_match_direct_computation():
    for e in run(2, 3).values():
        x = node_rep(e.rep)
        assert is_minimal(x)
        assert e.region.cone == outer_region(x).cone, e.rep


def test_embeddings_reach_more_nets():
    plain = closure_stats(run(2, 3, embed=False))[0]
    full = closure_stats(run(2, 3))[0]
    assert all(full.get(c, 0) >= n for c, n in plain.items())
    assert full[(2, 2)] > plain[(2, 2)]


def test_cells_grow_with_cap():
    small = closure_stats(run(2, 2, embed=False))[0]
    for cap in ((2, 3), (3, 2)):
        big = closure_stats(run(*cap, embed=False))[0]
        assert all(big.get(c, 0) >= n for c, n in small.items())


def test_deterministic():
    a, b = run(2, 3), run(2, 3)
    assert a.keys() == b.keys()
    assert all(a[k].region.cone == b[k].region.cone for k in a)


def test_every_net_within_caps():
    assert all(e.size[0] <= 3 and e.size[1] <= 2 for e in run(3, 2, embed=False).values())


def test_cap_too_small():
    with pytest.raises(CapTooSmall):
        partial_closure(list(seed_reps()), 1, 2)


def test_no_seeds():
    assert partial_closure([], 3, 3) == {}
    assert closure_stats({}) == ({}, {})


def test_seed_order_irrelevant():
    seeds = list(seed_reps())
    a = partial_closure(seeds, 2, 3, enable_embed=False)
    b = partial_closure(seeds[::-1], 2, 3, enable_embed=False)
    assert a.keys() == b.keys()


def test_to_canonical_relabels_region():
    # a relabeled copy maps back to the canonical rep and its region
    for rep in cell(2, 2)[::10]:
        for p in all_perms(rep.K, rep.L)[1:]:
            x = node_rep(act(p, rep))
            crep, R = to_canonical(x, outer_region(x))
            assert crep == rep
            assert R.cone == outer_region(node_rep(rep)).cone
    x = net(N21)
    crep, R = to_canonical(x, outer_region(x))
    assert crep.K == 2 and R.cone.coords == ("w1", "w2", "r3")
