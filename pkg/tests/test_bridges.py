from fractions import Fraction

import pytest

from tourpow.bits import iter_bits, mask_of, popcount
from tourpow.bridges import (assemble_from_bridges, balance_certificate, build_bridge_cover, classify_remainder,
                             counting_pairs, cyclic_bridge_order, find_crossing_power, main_power_hamilton,
                             prepare_partition, sparse_cut_power_hamilton)
from tourpow.core import CYCLE, PATH, build_tournament, verify_power_seq
from tourpow.errors import BalanceFailed, PreconditionFailed, RecursionFailed
from tourpow.generators import planted_two_cluster, random_tournament
from tourpow.params import ParameterProfile
from tourpow.search import FOUND, STAGED, search_power_hamilton

P2 = ParameterProfile.desk(2)


def two_sided(nx, ny, forward):
    """Transitive sides X = 0..nx-1, Y = nx..; ``forward(x, y)`` orients the cross pairs."""
    edges = []
    for u in range(nx + ny):
        for v in range(u + 1, nx + ny):
            if (u < nx) == (v < nx):
                edges.append((u, v))
            elif forward(u, v):
                edges.append((u, v))
            else:
                edges.append((v, u))
    return build_tournament(nx + ny, edges)


def planted_class(sp, v):
    for name, m in (("bad", sp.r_bad), ("good", sp.r_good), ("a-like", sp.r_a), ("b-like", sp.r_b)):
        if m >> v & 1:
            return name
    return None


# -- crossings -----------------------------------------------------------

def test_crossing_complete_forward():
    t = two_sided(4, 4, lambda x, y: True)
    trace = []
    seq = find_crossing_power(t, range(4), range(4, 8), P2, trace)
    assert verify_power_seq(t, seq, 2, PATH)
    assert set(seq[:2]) <= set(range(4)) and set(seq[2:]) <= set(range(4, 8))
    assert trace[0]["delta"] == 1


def test_crossing_single_forward_edge():
    t = two_sided(2, 2, lambda x, y: (x, y) == (0, 2))
    with pytest.raises(PreconditionFailed):
        find_crossing_power(t, [0, 1], [2, 3], P2)
    with pytest.raises(RecursionFailed):
        find_crossing_power(t, [0, 1], [2, 3], P2.replace(crossing_floor=0.1))


def test_counting_pairs_complete():
    t = two_sided(6, 6, lambda x, y: True)
    w = counting_pairs(t, mask_of(range(6)), mask_of(range(6, 12)), P2)
    assert w.delta == 1
    assert w.y_of_x0 & mask_of(range(6, 12)) == w.y_of_x0


@pytest.mark.parametrize("seed", range(5))
def test_counting_pairs_random(seed):
    t = random_tournament(120, seed)
    x, y = mask_of(range(60)), mask_of(range(60, 120))
    w = counting_pairs(t, x, y, P2)
    e = sum(popcount(t.out[v] & y) for v in iter_bits(x))
    assert w.delta == Fraction(e, 3600)
    assert w.y_of_x0 & ~(t.out[w.x0] & y) == 0
    assert w.x_of_y0 & ~(t.inn[w.y0] & x) == 0
    assert popcount(w.y_of_x0) >= w.delta * 60 / 8 and popcount(w.x_of_y0) >= w.delta * 60 / 8


@pytest.mark.parametrize("seed", range(4))
def test_crossing_k4_densities(seed):
    t = random_tournament(200, seed)
    prof = ParameterProfile.desk(4)
    trace = []
    seq = find_crossing_power(t, range(100), range(100, 200), prof, trace)
    assert len(seq) == 8 and verify_power_seq(t, seq, 4, PATH)
    for lv in trace:
        if "delta1" in lv:
            assert lv["delta1"] >= lv["delta"] / 8 and lv["delta2"] >= lv["delta1"] / 8


# -- partition and classification --------------------------------------

def test_zero_forward_nothing_stripped():
    pi = planted_two_cluster(remainder=0, forward=0, seed=1)
    sp = prepare_partition(pi.t, P2)
    assert sp.r == 0 and sp.check(pi.t)


def test_classify_empty_remainder():
    pi = planted_two_cluster(remainder=0, seed=2)
    sp = classify_remainder(pi.t, prepare_partition(pi.t, P2), P2)
    assert sp.r == 0 and sp.r_bad == sp.r_good == 0
    assert sp.d == P2.bridge_d_base
    assert sp.check(pi.t)


@pytest.mark.parametrize("seed", range(20))
def test_planted_classes(seed):
    pi = planted_two_cluster(seed=seed)
    sp = classify_remainder(pi.t, prepare_partition(pi.t, P2), P2)
    assert sp.check(pi.t)
    for v, kind in pi.planted.items():
        assert planted_class(sp, v) == kind


# -- covers and assembly ------------------------------------------------

def test_cover_without_remainder_is_minimal():
    pi = planted_two_cluster(remainder=0, seed=3)
    sp = classify_remainder(pi.t, prepare_partition(pi.t, P2), P2)
    cover = build_bridge_cover(pi.t, sp, P2)
    cert = cover.certificate
    assert (cert["ab"], cert["ba"], cert["aa"], cert["bb"]) == (1, 1, 0, 0)
    out = assemble_from_bridges(pi.t, sp, cover.bridges, P2)
    assert out.status == FOUND and verify_power_seq(pi.t, out.witness, 2, CYCLE)


def test_unbalanced_bridges_rejected():
    pi = planted_two_cluster(remainder=0, seed=3)
    sp = classify_remainder(pi.t, prepare_partition(pi.t, P2), P2)
    cover = build_bridge_cover(pi.t, sp, P2)
    with pytest.raises(BalanceFailed):
        assemble_from_bridges(pi.t, sp, cover.bridges[:1], P2)


@pytest.mark.parametrize("seed", [1, 2, 5])
def test_planted_cover_and_cycle(seed):
    pi = planted_two_cluster(seed=seed)
    sp = classify_remainder(pi.t, prepare_partition(pi.t, P2), P2)
    cover = build_bridge_cover(pi.t, sp, P2)
    assert balance_certificate(cover.bridges)["balanced"]
    used = [v for b in cover.bridges for v in b.seq]
    assert len(used) == len(set(used))
    assert sp.r & ~mask_of(used) == 0
    for b in cover.bridges:
        assert verify_power_seq(pi.t, b.seq, 2, PATH)
    order = [it for it in cyclic_bridge_order(cover.bridges) if not isinstance(it, str)]
    assert len(order) == len(cover.bridges)
    out = sparse_cut_power_hamilton(pi.t, P2)
    assert out.status == FOUND and verify_power_seq(pi.t, out.witness, 2, CYCLE)


def test_sparse_failure_is_staged():
    # seed 0 is one of the calibrated failures of the forced bridge branch
    pi = planted_two_cluster(seed=0)
    out = sparse_cut_power_hamilton(pi.t, P2)
    assert out.status in (FOUND, STAGED)
    if out.status == STAGED:
        assert out.stage and out.witness is None


# -- dispatch -----------------------------------------------------------

@pytest.mark.parametrize("seed", range(4))
def test_small_n_is_oracle(seed):
    t = random_tournament(10, seed)
    for k in (1, 2):
        a = main_power_hamilton(t, k)
        b = search_power_hamilton(t, k, CYCLE)
        assert (a.status, a.witness) == (b.status, b.witness)


def test_main_dispatch_rotational(rot63):
    out = main_power_hamilton(rot63, 2, P2)
    assert out.status == FOUND and verify_power_seq(rot63, out.witness, 2, CYCLE)
    assert out.message == "dense"
    assert out.stages[0]["stage"] == "dispatch" and out.stages[0]["margins"]["chosen"] == "dense"
