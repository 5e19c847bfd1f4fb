import pytest
from hypothesis import given, strategies as st

from conftest import tournaments, transitive
from tourpow.bits import full_mask, iter_bits, mask_of, popcount
from tourpow.core import (CYCLE, HEAD, IN, OUT, PATH, TAIL, BipartiteGraph, Tournament, build_tournament,
                          common_neighbors, is_chain, is_head_tail, min_semidegree, regularity_defect,
                          transitive_order, verify_power_seq)
from tourpow.errors import (ConflictingOrientation, DegenerateCycle, DuplicateVertex, EmptyQuerySet,
                            InvariantViolation, MissingPair, OutOfRange, SelfLoop, TooShort, WrongSize)
from tourpow.extremal import paley_tournament, rotational_tournament
from tourpow.params import ParameterProfile

C3 = build_tournament(3, [(0, 1), (1, 2), (2, 0)])


def test_build_small():
    t = build_tournament(2, [(0, 1)])
    assert t.has_edge(0, 1) and not t.has_edge(1, 0)
    assert C3.out == (0b010, 0b100, 0b001)


@pytest.mark.parametrize("n,edges,exc", [
    (3, [(0, 1), (1, 0), (1, 2), (2, 0)], ConflictingOrientation),
    (2, [(0, 0)], SelfLoop),
    (3, [(0, 1), (1, 2)], MissingPair),
    (2, [(0, 2)], OutOfRange),
])
def test_build_errors(n, edges, exc):
    with pytest.raises(exc):
        build_tournament(n, edges)
    assert issubclass(exc, InvariantViolation)


def test_degrees_examples():
    assert min_semidegree(C3) == 1
    assert min_semidegree(transitive(5)) == 0
    assert min_semidegree(paley_tournament(7)) == 3
    assert regularity_defect(rotational_tournament(9)) == 0
    assert regularity_defect(transitive(5)) == 2


def test_common_neighbors_examples():
    t = transitive(3)
    assert common_neighbors(t, [0]) == frozenset({1, 2})
    assert common_neighbors(t, [0, 1], OUT) == frozenset({2})
    assert common_neighbors(C3, [0, 1, 2], OUT) == frozenset()
    assert common_neighbors(t, [2], IN, restrict=[1]) == frozenset({1})
    with pytest.raises(EmptyQuerySet):
        common_neighbors(t, [])


def test_verify_power_examples():
    t = transitive(6)
    for k in range(1, 6):
        assert verify_power_seq(t, list(range(6)), k, PATH)
    assert verify_power_seq(C3, [0, 1, 2], 1, CYCLE)
    assert not verify_power_seq(t, list(range(6)), 1, CYCLE)
    with pytest.raises(DegenerateCycle):
        verify_power_seq(C3, [0, 1, 2], 3, CYCLE)
    with pytest.raises(DuplicateVertex):
        verify_power_seq(t, [0, 0], 1)


def test_rotational_square_cycle():
    t = rotational_tournament(11)
    assert verify_power_seq(t, list(range(11)), 5, CYCLE)
    assert not verify_power_seq(t, list(range(11)), 6, PATH)


def test_head_tail_examples():
    prof = ParameterProfile.desk(2)
    t = transitive(8)
    ok, wit = is_head_tail(t, [0, 1], range(8), HEAD, prof)
    assert ok and wit == frozenset(range(2, 8))
    ok, wit = is_head_tail(t, [6, 7], range(8), TAIL, prof)
    assert ok and wit == frozenset(range(6))
    assert not is_head_tail(C3, [0, 1, 2], range(3), HEAD, ParameterProfile.desk(3))[0]
    assert is_head_tail(paley_tournament(7), [0], range(7), HEAD, ParameterProfile.strict(1))[0]
    with pytest.raises(WrongSize):
        is_head_tail(t, [0], range(8), HEAD, prof)


def test_chain_examples():
    k = 2
    prof = ParameterProfile.desk(k)
    t = transitive(4 * k + 4)
    inner = list(range(2, 4 * k + 2))  # flanked, so the ends have in-/out-neighbours
    assert is_chain(t, inner, range(t.n), range(t.n), prof)
    # the bare linear order has a source at the front: no common in-neighbourhood
    assert not is_chain(t, list(range(t.n)), range(t.n), range(t.n), prof)
    assert not is_chain(t, inner[::-1], range(t.n), range(t.n), prof)
    with pytest.raises(TooShort):
        is_chain(t, [0, 1, 2], range(t.n), range(t.n), prof)


@given(tournaments(min_n=1, max_n=10))
def test_degree_sum(t):
    assert sum(popcount(r) for r in t.out) == t.n * (t.n - 1) // 2
    assert all(t.out[v] | t.inn[v] | (1 << v) == full_mask(t.n) for v in range(t.n))


@given(tournaments(min_n=2, max_n=9), st.randoms(use_true_random=False))
def test_monotone_in_k(t, r):
    seq = list(range(t.n))
    r.shuffle(seq)
    for k in range(2, t.n):
        if verify_power_seq(t, seq, k):
            assert verify_power_seq(t, seq, k - 1)


@given(tournaments(min_n=1, max_n=8), st.randoms(use_true_random=False))
def test_k1_path_is_hamilton_path(t, r):
    seq = list(range(t.n))
    r.shuffle(seq)
    is_path = all(t.has_edge(a, b) for a, b in zip(seq, seq[1:]))
    assert verify_power_seq(t, seq, 1, PATH) == is_path


@given(tournaments(min_n=3, max_n=9), st.data())
def test_head_is_tail_in_reverse(t, data):
    k = data.draw(st.integers(1, 3))
    s = data.draw(st.lists(st.integers(0, t.n - 1), min_size=k, max_size=k, unique=True))
    prof = ParameterProfile.desk(k)
    ground = range(t.n)
    assert is_head_tail(t, s, ground, HEAD, prof) == is_head_tail(t.reversed(), s, ground, TAIL, prof)


@given(tournaments(min_n=1, max_n=8))
def test_transitive_order_sound(t):
    order = transitive_order(t, range(t.n))
    if order is not None:
        assert verify_power_seq(t, list(order), max(1, t.n - 1))


@pytest.mark.parametrize("n", [3, 5, 7, 9, 15])
def test_rotational_regular(n):
    assert regularity_defect(rotational_tournament(n)) == 0


def test_flip_and_induced():
    t = rotational_tournament(7)
    f = t.flipped(0, 1)
    assert f.has_edge(1, 0) and not f.has_edge(0, 1)
    sub = t.induced([0, 1, 2])
    assert sub.n == 3 and sub.has_edge(0, 1) and sub.has_edge(1, 2) and sub.has_edge(0, 2)


def test_bipartite_basics():
    g = BipartiteGraph.from_edges(2, 3, [(0, 0), (0, 2), (1, 1)])
    assert g.degrees_a() == [2, 1] and g.degrees_b() == [1, 1, 1]
    assert g.adj_a[0] == 0b101
    with pytest.raises(OutOfRange):
        BipartiteGraph.from_edges(1, 1, [(0, 1)])
    with pytest.raises(InvariantViolation):
        BipartiteGraph.from_edges(1, 1, [(0, 0), (0, 0)])
    assert g.find_krr(1) is not None
    assert BipartiteGraph.from_edges(2, 2, [(0, 0), (1, 1)]).find_krr(2) is None


def test_bits():
    assert mask_of([0, 3]) == 9 and list(iter_bits(9)) == [0, 3] and popcount(9) == 2
