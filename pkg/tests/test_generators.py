import math

import pytest
from hypothesis import given, strategies as st

from tourpow.bits import mask_of, popcount
from tourpow.core import min_semidegree
from tourpow.extremal import rotational_tournament
from tourpow.generators import PLANTED_TYPES, planted_two_cluster, random_relabel, random_tournament, relabel


@given(st.integers(1, 30), st.integers(0, 10 ** 6))
def test_random_tournament_is_tournament(n, seed):
    t = random_tournament(n, seed)
    for u in range(n):
        assert not t.out[u] >> u & 1
        assert t.out[u] & t.inn[u] == 0
        assert popcount(t.out[u] | t.inn[u]) == n - 1
    assert t == random_tournament(n, seed)


@given(st.integers(0, 10 ** 6))
def test_relabel_is_isomorphism(seed):
    t = random_tournament(9, seed)
    r = random_relabel(t, seed + 1)
    assert sorted(popcount(x) for x in t.out) == sorted(popcount(x) for x in r.out)
    ident = relabel(t, list(range(9)))
    assert ident == t


def test_planted_shape():
    pi = planted_two_cluster(seed=4)
    a, b = mask_of(pi.side_a), mask_of(pi.side_b)
    assert pi.t.n == 128 and a & b == 0
    assert popcount(a) + popcount(b) + len(pi.planted) == 128
    assert pi.params["forward"] == math.ceil(64 ** 1.5) == 512
    assert sorted(pi.planted.values()) == sorted(PLANTED_TYPES * 3)


@pytest.mark.parametrize("seed", range(5))
def test_planted_forward_edges_capped(seed):
    pi = planted_two_cluster(seed=seed)
    a, b = mask_of(pi.side_a), mask_of(pi.side_b)
    assert pi.forward_edges == 512 == pi.t.forward_edges(a, b)
    cap_a = math.ceil(512 / popcount(a)) + 1
    cap_b = math.ceil(512 / popcount(b)) + 1
    assert max(popcount(pi.t.out[v] & b) for v in pi.side_a) <= cap_a
    assert max(popcount(pi.t.inn[v] & a) for v in pi.side_b) <= cap_b


@pytest.mark.parametrize("seed", range(3))
def test_planted_shares_exact(seed):
    pi = planted_two_cluster(seed=seed)
    a, b = mask_of(pi.side_a), mask_of(pi.side_b)
    share = {"bad": (0.95, 0.05), "good": (0.05, 0.95), "a-like": (0.25, 0.5), "b-like": (0.5, 0.75)}
    for v, kind in pi.planted.items():
        fa, fb = share[kind]
        assert popcount(pi.t.out[v] & a) == round(fa * popcount(a))
        assert popcount(pi.t.out[v] & b) == round(fb * popcount(b))


def test_planted_without_remainder_is_two_cluster():
    pi = planted_two_cluster(remainder=0, forward=0, seed=0, shuffle=False)
    a, b = mask_of(pi.side_a), mask_of(pi.side_b)
    assert pi.t.forward_edges(a, b) == 0
    half = rotational_tournament(65)
    assert min_semidegree(pi.t.induced(sorted(pi.side_a))) == min_semidegree(half) - 1


def test_planted_too_many_remainder():
    with pytest.raises(ValueError):
        planted_two_cluster(half=8, remainder=9)
