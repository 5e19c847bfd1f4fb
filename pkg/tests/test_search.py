import itertools

import pytest
from hypothesis import given, strategies as st

from conftest import random_rows, tournaments, transitive
from tourpow.core import CYCLE, PATH, build_tournament, is_transitive, verify_power_seq
from tourpow.errors import NotFound
from tourpow.extremal import paley_tournament
from tourpow.generators import random_tournament
from tourpow.params import ParameterProfile
from tourpow.search import (BUDGET, EXHAUSTED, FOUND, SearchBudget, count_transitive_sets, find_long_power_path,
                            find_transitive_set, hamilton_path_by_insertion, is_strongly_connected,
                            search_power_hamilton, transitive_fraction)

C3 = build_tournament(3, [(0, 1), (1, 2), (2, 0)])


def test_transitive_examples():
    for k in (1, 2, 3):
        out = search_power_hamilton(transitive(6), k, PATH)
        assert out.status == FOUND and list(out.witness) == list(range(6))
    assert search_power_hamilton(transitive(6), 1, CYCLE).status == EXHAUSTED


def test_qr7_regression():
    # frozen by exhaustive search: the squared 7-cycle 0..6 lives in QR(7),
    # the cube does not
    q7 = paley_tournament(7)
    out = search_power_hamilton(q7, 2, CYCLE)
    assert out.status == FOUND
    assert verify_power_seq(q7, out.witness, 2, CYCLE)
    assert search_power_hamilton(q7, 3, CYCLE).status == EXHAUSTED


def test_budget_is_not_a_refutation():
    t = random_tournament(12, 1)
    out = search_power_hamilton(t, 2, CYCLE, SearchBudget(max_nodes=5))
    assert out.status == BUDGET and out.witness is None


@given(tournaments(min_n=3, max_n=8))
def test_camion(t):
    out = search_power_hamilton(t, 1, CYCLE)
    assert (out.status == FOUND) == is_strongly_connected(t)
    if out.status == FOUND:
        assert verify_power_seq(t, out.witness, 1, CYCLE)


@given(tournaments(min_n=1, max_n=8), st.integers(1, 3))
def test_found_witness_valid(t, k):
    for kind in (PATH, CYCLE):
        if kind == CYCLE and t.n <= k:
            continue
        out = search_power_hamilton(t, k, kind)
        assert out.status in (FOUND, EXHAUSTED)
        if out.status == FOUND:
            assert sorted(out.witness) == list(range(t.n))
            assert verify_power_seq(t, out.witness, k, kind)


@given(tournaments(min_n=1, max_n=9))
def test_insertion_gives_hamilton_path(t):
    p = hamilton_path_by_insertion(t, list(range(t.n)))
    assert sorted(p) == list(range(t.n))
    assert verify_power_seq(t, p, 1, PATH)


def test_find_transitive_set_examples():
    assert len(find_transitive_set(C3, 1)) == 1
    with pytest.raises(NotFound):
        find_transitive_set(C3, 3)


def test_every_4_tournament_has_transitive_triple():
    pairs = list(itertools.combinations(range(4), 2))
    for bits in range(1 << len(pairs)):
        edges = [(u, v) if bits >> i & 1 else (v, u) for i, (u, v) in enumerate(pairs)]
        t = build_tournament(4, edges)
        s = find_transitive_set(t, 3)
        assert len(set(s)) == 3 and is_transitive(t, s)


def test_transitive_fraction_examples():
    assert transitive_fraction(transitive(6), 3).value == 1
    assert transitive_fraction(C3, 3).value == 0
    # QR(7): each vertex is the source of C(3,2)=3 transitive triples, 21 of 35
    assert transitive_fraction(paley_tournament(7), 3).value * 35 == 21


@given(tournaments(min_n=3, max_n=8))
def test_transitive_count_by_brute_force(t):
    brute = sum(is_transitive(t, s) for s in itertools.combinations(range(t.n), 3))
    assert count_transitive_sets(t, 3) == brute


def test_transitive_fraction_sampled_close(rng):
    t = random_rows(16, rng)
    exact = transitive_fraction(t, 3).value
    est = transitive_fraction(t, 3, method="sample", samples=20000, seed=3)
    assert abs(float(est.value) - float(exact)) < 0.03


def test_long_power_path_examples():
    assert find_long_power_path(transitive(9), 3) == list(range(9))
    assert find_long_power_path(transitive(1), 2) == [0]


def test_long_power_path_calibration():
    # floor frozen from a calibration run: every seed of 0..99 reached >= 13
    prof = ParameterProfile.desk(2)
    good = 0
    for seed in range(20):
        t = random_tournament(100, seed)
        p = find_long_power_path(t, 2, prof)
        assert verify_power_seq(t, p, 2, PATH)
        good += len(p) >= 13
    assert good == 20


@given(tournaments(min_n=2, max_n=9))
def test_k1_long_path_is_hamilton(t):
    p = find_long_power_path(t, 1)
    assert len(p) == t.n and verify_power_seq(t, p, 1, PATH)


def test_strong_connectivity_basic():
    assert is_strongly_connected(C3)
    assert not is_strongly_connected(transitive(4))
    assert is_strongly_connected(paley_tournament(11))


def test_within_restricts_search():
    t = paley_tournament(11)
    within = sum(1 << v for v in range(7))
    out = search_power_hamilton(t, 1, CYCLE, within=within)
    if out.status == FOUND:
        assert set(out.witness) == set(range(7))
        assert verify_power_seq(t, out.witness, 1, CYCLE)


def test_random_seed_reproducible():
    a = find_long_power_path(random_tournament(60, 3), 2, ParameterProfile.desk(2, rng_seed=4))
    b = find_long_power_path(random_tournament(60, 3), 2, ParameterProfile.desk(2, rng_seed=4))
    assert a == b
