import random

import pytest

from conftest import transitive
from tourpow.bits import mask_of
from tourpow.chains import (DeletionLedger, cover_residual, cut_dense_power_hamilton, link, partition_into_chains,
                            spanning_chain)
from tourpow.core import CYCLE, PATH, build_tournament, is_chain, verify_power_seq
from tourpow.errors import CoverFailed, StagedFailure, TooSmall
from tourpow.extremal import rotational_tournament
from tourpow.generators import random_relabel, random_tournament
from tourpow.params import ParameterProfile
from tourpow.search import FOUND, STAGED, find_transitive_set

P2 = ParameterProfile.desk(2)


def test_partition_small_is_residual():
    t = rotational_tournament(9)
    chains, res = partition_into_chains(t, range(3), range(9), range(9), P2)
    assert chains == [] and res == {0, 1, 2}


def test_partition_transitive_leaves_sources_and_sinks():
    # the source and sink ends can never be tails/heads, so they stay residual
    chains, res = partition_into_chains(transitive(12), range(12), range(12), range(12), P2)
    assert len(chains) == 1 and chains[0].seq == tuple(range(2, 10))
    assert res == {0, 1, 10, 11}


@pytest.mark.parametrize("seed", range(3))
def test_partition_random_400(seed):
    t = random_tournament(400, seed)
    chains, res = partition_into_chains(t, range(400), range(400), range(400), P2)
    assert len(res) <= P2.chain_residual_cap
    for c in chains:
        assert is_chain(t, c.seq, c.tail_ground, c.head_ground, P2, c.k)
    covered = [v for c in chains for v in c.seq] + list(res)
    assert sorted(covered) == list(range(400))


def test_cover_residual_random():
    t = random_tournament(100, 1)
    chains, res = partition_into_chains(t, range(100), range(100), range(100), P2)
    covers, _ = cover_residual(t, chains, res, P2)
    assert sorted(c.seq[2] for c in covers) == sorted(res)
    for c in covers:
        assert len(c.seq) == 5 and verify_power_seq(t, c.seq, 2, PATH)
    used = [v for c in covers for v in c.seq]
    assert len(used) == len(set(used))


def test_cover_residual_empty():
    t = random_tournament(40, 2)
    assert cover_residual(t, [], [], P2)[0] == []


def test_cover_source_fails():
    t = transitive(20)
    chains, _ = partition_into_chains(t, range(20), range(20), range(20), P2)
    with pytest.raises(CoverFailed) as err:
        cover_residual(t, chains, [0], P2)
    assert err.value.substage == "no-tail-side"


def test_link_direct():
    t = transitive(10)
    lk = link(t, [0, 1], [8, 9], list(range(10)), profile=P2)
    assert lk.case == "direct" and lk.path == (0, 1, 8, 9)


def test_link_nothing_available():
    t = transitive(10)
    with pytest.raises(StagedFailure):
        link(t, [8, 9], [0, 1], list(range(10)), forbidden=mask_of(range(2, 8)), profile=P2)


@pytest.mark.parametrize("seed", range(5))
def test_link_random_500(seed):
    t = random_tournament(500, seed)
    rng = random.Random(seed)
    vs = rng.sample(range(500), 40)
    m = find_transitive_set(t, 2, within=mask_of(vs[:20]))
    nn = find_transitive_set(t, 2, within=mask_of(vs[20:]))
    lk = link(t, m, nn, list(range(500)), profile=P2)
    assert lk.path[:2] == tuple(m) and lk.path[-2:] == tuple(nn)
    assert verify_power_seq(t, lk.path, 2, PATH)
    inner = set(lk.path[2:-2])
    assert inner == {v for s in lk.internal_sets for v in s}


def exact_power(n, r):
    """The identity order is an r-th power path and every longer pair points back."""
    return build_tournament(n, [(u, v) if v - u <= r else (v, u) for u in range(n) for v in range(u + 1, n)])


def test_ledger_exact_rule():
    # chain 0..13 is a 4-th power; deleting up to two consecutive vertices
    # keeps a square, a third one creates a gap of 5
    t = exact_power(14, 4)
    led = DeletionLedger(t, 2, [range(14)], 0, rule="exact")
    led.commit([5])
    assert led.admissible([6])
    led.commit([6])
    assert not led.admissible([7])
    assert led.admissible([10])
    assert led.finalize(4)[0] == [v for v in range(14) if v not in (5, 6)]


def test_ledger_radius_rule():
    t = exact_power(14, 4)
    led = DeletionLedger(t, 2, [range(14)], 0, rule="radius", radius=4)
    led.commit([5])
    assert not led.admissible([6]) and not led.admissible([9])
    assert led.admissible([10])
    led.commit([10])
    assert verify_power_seq(t, led.finalize(4)[0], 2, PATH)


def test_spanning_chain_examples():
    with pytest.raises(TooSmall):
        spanning_chain(transitive(3), P2)
    with pytest.raises(StagedFailure):
        spanning_chain(transitive(12), P2)


@pytest.mark.parametrize("seed", range(5))
def test_spanning_chain_rotational_101(seed):
    t = random_relabel(rotational_tournament(101), seed)
    c = spanning_chain(t, P2)
    assert sorted(c.seq) == list(range(101))
    assert is_chain(t, c.seq, c.tail_ground, c.head_ground, P2, c.k)


def test_cut_dense_rejects_transitive():
    out = cut_dense_power_hamilton(transitive(12), P2)
    assert out.status == STAGED and out.stage == "precondition"


def test_cut_dense_r63(rot63):
    out = cut_dense_power_hamilton(rot63, P2)
    assert out.status == FOUND
    assert sorted(out.witness) == list(range(63))
    assert verify_power_seq(rot63, out.witness, 2, CYCLE)


@pytest.mark.parametrize("seed", range(3))
def test_cut_dense_random_128(seed):
    t = random_tournament(128, seed)
    out = cut_dense_power_hamilton(t, ParameterProfile.desk(2, rng_seed=seed))
    if out.status == FOUND:
        assert verify_power_seq(t, out.witness, 2, CYCLE)
    else:
        assert out.status == STAGED and out.stage


def test_c3_too_small():
    c3 = build_tournament(3, [(0, 1), (1, 2), (2, 0)])
    with pytest.raises(TooSmall):
        spanning_chain(c3, P2)
