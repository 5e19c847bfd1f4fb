import itertools
import math
import random

import pytest
from hypothesis import given, strategies as st

from conftest import apart_sets, planted_power, tournaments, transitive
from tourpow.bits import mask_of, popcount
from tourpow.core import HEAD, PATH, TAIL, BipartiteGraph, build_tournament, is_head_tail, verify_power_seq
from tourpow.errors import PreconditionFailed, TooLargeForExact
from tourpow.extremal import rotational_tournament
from tourpow.generators import planted_two_cluster, random_tournament
from tourpow.params import ParameterProfile
from tourpow.structure import (ApartCollection, apartness, balanced_cut_density, check_general_cut_bound,
                               cut_density, delete_sparse_sets, drc_gate, drc_select, find_head_tail_in,
                               interval_hull, kst_floor, kst_intersect)

T2 = build_tournament(2, [(0, 1)])


# -- cuts ---------------------------------------------------------------

def test_balanced_cut_examples():
    w = balanced_cut_density(T2)
    assert w.density == 0 and w.part_x == {1} and w.part_y == {0}
    # frozen by enumeration over all 35 balanced splits
    for mode in ("exact", "enumerate", "heuristic"):
        assert balanced_cut_density(rotational_tournament(7), mode=mode, seed=0).density == pytest.approx(0.5)


@given(tournaments(min_n=2, max_n=9))
def test_exact_identity_matches_enumeration(t):
    a = balanced_cut_density(t, mode="exact")
    b = balanced_cut_density(t, mode="enumerate")
    assert a.density == b.density
    assert cut_density(t, a.part_x).forward_edges == a.forward_edges


def test_enumerate_cap():
    with pytest.raises(TooLargeForExact):
        balanced_cut_density(random_tournament(24, 0), mode="enumerate")


def test_heuristic_finds_planted_cut():
    # the planted A-side is one balanced cut; the heuristic must do at least
    # as well up to 5%
    for seed in range(5):
        pi = planted_two_cluster(seed=seed)
        planted = cut_density(pi.t, pi.side_a).density
        assert balanced_cut_density(pi.t, mode="heuristic", seed=seed).density <= planted * 1.05


def test_general_cut_bound_examples():
    rep = check_general_cut_bound(transitive(6), 0.1)
    assert not rep.hypothesis_ok and not rep.holds
    assert rep.counterexample.density == 0
    r9 = rotational_tournament(9)
    rep = check_general_cut_bound(r9, balanced_cut_density(r9).density)
    assert rep.hypothesis_ok and rep.holds
    assert check_general_cut_bound(T2, 0.5, partitions=[[0]]).holds


# -- apartness and deletions -------------------------------------------

def test_apartness_examples():
    order = list(range(10))
    assert apartness([{4}], order, 100)
    assert apartness([{2}, {7}], order, 4)
    assert not apartness([{2}, {7}], order, 5)
    assert interval_hull({5}, order, 2) == {3, 4, 5, 6, 7}


def test_delete_examples():
    t = transitive(10)
    assert delete_sparse_sets(t, list(range(10)), [], 3, 1) == list(range(10))
    out = delete_sparse_sets(t, list(range(10)), [{2}, {7}], 3, 1)
    assert out == [0, 1, 3, 4, 5, 6, 8, 9]
    assert verify_power_seq(t, out, 2, PATH)


@given(st.integers(0, 10 ** 6), st.integers(2, 5), st.data())
def test_destroying_powers(seed, r1, data):
    r2 = data.draw(st.integers(1, r1 - 1))
    rng = random.Random(seed)
    n = rng.randint(r1 + 2, 40)
    t = planted_power(rng, n, r1)
    order = list(range(n))
    coll = ApartCollection(apart_sets(rng, n, r1, r2), order, r1)
    out = delete_sparse_sets(t, order, coll, r1, r2)
    assert verify_power_seq(t, out, r1 - r2, PATH)


# -- KST -----------------------------------------------------------------

def test_kst_examples():
    full = [set(range(10))] * 5
    idx, inter = kst_intersect(full, 2, 0.5, 10)
    assert len(idx) == 2 and len(inter) == 10
    sets = [set(range(i)) for i in range(5, 9)]
    idx, inter = kst_intersect(sets, 1, 0.5, 10)
    assert idx == (3,) and len(inter) == 8 >= kst_floor(1, 0.5, 10)


def test_kst_example_n40():
    rng = random.Random(0)
    sets = [set(rng.sample(range(40), 20)) for _ in range(20)]
    idx, inter = kst_intersect(sets, 2, 0.5, 40)
    assert len(inter) >= 2
    best = max(len(sets[i] & sets[j]) for i, j in itertools.combinations(range(20), 2))
    assert len(inter) <= best


@given(st.integers(0, 10 ** 6), st.integers(1, 3))
def test_kst_floor_property(seed, k):
    rng = random.Random(seed)
    n = rng.randint(10, 40)
    alpha = rng.uniform(0.3, 0.9)
    count = math.ceil(k / alpha) + rng.randint(0, 5)
    sets = [set(rng.sample(range(n), math.ceil(alpha * n))) for _ in range(count)]
    idx, inter = kst_intersect(sets, k, alpha, n)
    assert len(set(idx)) == k
    assert inter == frozenset(set.intersection(*(sets[i] for i in idx)))
    assert len(inter) >= kst_floor(k, alpha, n)


# -- heads and tails ---------------------------------------------------

def test_head_tail_in_examples():
    p = ParameterProfile.desk(2)
    t = transitive(8)
    assert set(find_head_tail_in(t, [0, 1], range(8), HEAD, p)) == {0, 1}
    p1 = ParameterProfile.desk(1)
    t = rotational_tournament(21)
    (v,) = find_head_tail_in(t, [3], range(21), HEAD, p1)
    assert v == 3


def test_head_tail_random_300():
    p = ParameterProfile.desk(3)
    for seed in range(3):
        t = random_tournament(300, seed)
        s = find_head_tail_in(t, range(300), range(300), TAIL, p)
        ok, _ = is_head_tail(t, s, range(300), TAIL, p)
        assert ok and len(s) == 3


# -- dependent random choice -------------------------------------------

def test_drc_complete_bipartite():
    g = BipartiteGraph.from_edges(6, 6, [(a, b) for a in range(6) for b in range(6)])
    audit = drc_select(g, k=2, s=2, m=2, seed=0)
    assert audit.u == frozenset(range(6)) and audit.bad == 0 and audit.exhaustive


def test_drc_gate():
    assert not drc_gate(200, 200, 0.1, 2, 10, 8, strict=False)["ok"]
    assert drc_gate(200, 200, 0.5, 2, 10, 8, strict=False)["ok"]
    assert not drc_gate(200, 200, 0.5, 2, 10, 8, strict=True)["ok"]
    sparse = BipartiteGraph.from_edges(200, 200, [(a, b) for a in range(200) for b in range(200)
                                                  if (7 * a + 3 * b) % 10 == 0])
    with pytest.raises(PreconditionFailed):
        drc_select(sparse, k=2, s=8, m=10, seed=0)


def test_drc_random_dense():
    rng = random.Random(7)
    edges = [(a, b) for a in range(120) for b in range(120) if rng.random() < 0.5]
    g = BipartiteGraph.from_edges(120, 120, edges)
    audit = drc_select(g, k=2, s=8, m=10, seed=1)
    assert len(audit.u) >= 8 and audit.exhaustive and audit.bad_fraction < audit.limit
    # audit recount: bad k-sets of U have fewer than m common neighbours
    nbrs = [mask_of(b for (a, b) in edges if a == x) for x in range(120)]
    bad = sum(popcount(nbrs[x] & nbrs[y]) < 10 for x, y in itertools.combinations(sorted(audit.u), 2))
    assert bad == audit.bad
