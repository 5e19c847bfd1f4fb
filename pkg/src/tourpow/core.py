"""Tournaments, bipartite graphs and exact checkers for the ordered objects
built on top of them (powers of paths and cycles, heads, tails, chains).

Adjacency is stored as one int bitmask per vertex (``out[v]`` has bit ``u``
set iff ``v -> u``), so every neighbourhood query is a handful of big-int
ANDs.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .bits import full_mask, iter_bits, mask_of, popcount
from .errors import (
    ConflictingOrientation,
    DegenerateCycle,
    DuplicateVertex,
    EmptyQuerySet,
    InvariantViolation,
    MissingPair,
    OutOfRange,
    SelfLoop,
    TooShort,
    WrongSize,
)
from .params import ParameterProfile

PATH = "path"
CYCLE = "cycle"
HEAD = "head"
TAIL = "tail"
OUT = "out"
IN = "in"


class Tournament:
    """Immutable tournament on vertices ``0..n-1``."""

    __slots__ = ("n", "out", "inn", "_hash")

    def __init__(self, out_rows: Sequence[int]):
        n = len(out_rows)
        out = tuple(int(r) for r in out_rows)
        everything = full_mask(n)
        inn = [0] * n
        for v, row in enumerate(out):
            if row >> v & 1:
                raise SelfLoop(f"self-loop at {v}")
            if row & ~everything:
                raise OutOfRange(f"row {v} references a vertex >= {n}")
            for u in iter_bits(row):
                inn[u] |= 1 << v
        for v in range(n):
            both = out[v] & inn[v]
            if both:
                u = (both & -both).bit_length() - 1
                raise ConflictingOrientation(f"both {v}->{u} and {u}->{v}")
            missing = everything & ~(out[v] | inn[v] | (1 << v))
            if missing:
                u = (missing & -missing).bit_length() - 1
                raise MissingPair(f"pair {{{v},{u}}} has no orientation")
        self.n = n
        self.out = out
        self.inn = tuple(inn)
        self._hash = None

    # -- construction -------------------------------------------------

    @classmethod
    def from_matrix(cls, adj) -> "Tournament":
        rows = []
        for v, row in enumerate(adj):
            rows.append(mask_of(u for u, x in enumerate(row) if x))
        return cls(rows)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Tournament":
        return build_tournament(n, edges)

    # -- queries ------------------------------------------------------

    @property
    def vertices(self) -> int:
        """Mask of all vertices."""
        return full_mask(self.n)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.out[u] >> v & 1)

    def out_degree(self, v: int, within: int | None = None) -> int:
        row = self.out[v]
        return popcount(row if within is None else row & within)

    def in_degree(self, v: int, within: int | None = None) -> int:
        row = self.inn[v]
        return popcount(row if within is None else row & within)

    def common_out(self, mask: int, within: int | None = None) -> int:
        acc = full_mask(self.n) if within is None else within
        for v in iter_bits(mask):
            acc &= self.out[v]
            if not acc:
                break
        return acc

    def common_in(self, mask: int, within: int | None = None) -> int:
        acc = full_mask(self.n) if within is None else within
        for v in iter_bits(mask):
            acc &= self.inn[v]
            if not acc:
                break
        return acc

    def forward_edges(self, x: int, y: int) -> int:
        """Number of edges oriented from set ``x`` to set ``y`` (masks)."""
        return sum(popcount(self.out[v] & y) for v in iter_bits(x))

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in iter_bits(self.out[u])]

    def to_matrix(self) -> list[list[bool]]:
        return [[bool(self.out[u] >> v & 1) for v in range(self.n)] for u in range(self.n)]

    def reversed(self) -> "Tournament":
        return Tournament(self.inn)

    def flipped(self, u: int, v: int) -> "Tournament":
        """Copy with the orientation of pair {u, v} reversed."""
        rows = list(self.out)
        if rows[u] >> v & 1:
            rows[u] &= ~(1 << v)
            rows[v] |= 1 << u
        else:
            rows[v] &= ~(1 << u)
            rows[u] |= 1 << v
        return Tournament(rows)

    def induced(self, vertices: Sequence[int]) -> "Tournament":
        """Subtournament on ``vertices``, relabelled ``0..len-1`` in the given order."""
        index = {v: i for i, v in enumerate(vertices)}
        rows = []
        for v in vertices:
            rows.append(mask_of(index[u] for u in vertices if self.out[v] >> u & 1))
        return Tournament(rows)

    def __eq__(self, other):
        return isinstance(other, Tournament) and self.out == other.out

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.out)
        return self._hash

    def __repr__(self):
        return f"Tournament(n={self.n})"


def build_tournament(n: int, edges: Iterable[tuple[int, int]]) -> Tournament:
    """Tournament from an explicit list of ordered pairs; every pair must appear once."""
    if n < 0:
        raise OutOfRange("n must be non-negative")
    rows = [0] * n
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise OutOfRange(f"edge ({u},{v}) outside [0,{n})")
        if u == v:
            raise SelfLoop(f"self-loop at {u}")
        if rows[v] >> u & 1:
            raise ConflictingOrientation(f"both {u}->{v} and {v}->{u}")
        rows[u] |= 1 << v
    return Tournament(rows)


# -- degrees ----------------------------------------------------------


def min_semidegree(t: Tournament) -> int:
    if t.n == 0:
        return 0
    return min(min(popcount(r) for r in t.out), min(popcount(r) for r in t.inn))


def regularity_defect(t: Tournament) -> int:
    """Least D >= 0 with min semidegree >= floor(n/2) - D.

    D = 0 means regular in the 1-almost-regular sense, reachable only for odd n.
    """
    return max(0, t.n // 2 - min_semidegree(t))


def common_neighbors(t: Tournament, s: Iterable[int], direction: str = OUT,
                     restrict: Iterable[int] | None = None) -> frozenset[int]:
    smask = mask_of(s)
    if not smask:
        raise EmptyQuerySet("query set is empty")
    within = None if restrict is None else mask_of(restrict)
    if direction == OUT:
        res = t.common_out(smask, within)
    elif direction == IN:
        res = t.common_in(smask, within)
    else:
        raise ValueError(f"direction must be 'in' or 'out', got {direction!r}")
    return frozenset(iter_bits(res))


# -- ordered structures ----------------------------------------------


def transitive_order(t: Tournament, vertices: Iterable[int]) -> tuple[int, ...] | None:
    """Vertices sorted source-first if they induce a transitive tournament, else None."""
    vs = list(vertices)
    m = mask_of(vs)
    if len(vs) != popcount(m):
        raise DuplicateVertex("repeated vertex")
    order = sorted(vs, key=lambda v: (-popcount(t.out[v] & m), v))
    rest = m
    for v in order:
        rest &= ~(1 << v)
        if t.out[v] & rest != rest:
            return None
    return tuple(order)


def is_transitive(t: Tournament, vertices: Iterable[int]) -> bool:
    return transitive_order(t, vertices) is not None


def _check_seq(t: Tournament, seq: Sequence[int]) -> None:
    seen = 0
    for v in seq:
        if not 0 <= v < t.n:
            raise OutOfRange(f"vertex {v} outside [0,{t.n})")
        if seen >> v & 1:
            raise DuplicateVertex(f"vertex {v} repeated")
        seen |= 1 << v


def verify_power_seq(t: Tournament, seq: Sequence[int], k: int, kind: str = PATH) -> bool:
    """True iff every edge v_i -> v_j with 0 < j - i <= k is present.

    For ``kind="cycle"`` the indices are cyclic. A cycle on L <= k vertices would
    ask a vertex to dominate itself and raises :class:`DegenerateCycle`; for
    k < L <= 2k some pair is required in both directions, so the check is False.
    """
    _check_seq(t, seq)
    L = len(seq)
    out = t.out
    if kind == PATH:
        for i, v in enumerate(seq):
            row = out[v]
            for j in range(i + 1, min(L, i + k + 1)):
                if not row >> seq[j] & 1:
                    return False
        return True
    if kind != CYCLE:
        raise ValueError(f"kind must be 'path' or 'cycle', got {kind!r}")
    if L < k + 1:
        raise DegenerateCycle(f"cycle of length {L} cannot carry a {k}-th power")
    for i, v in enumerate(seq):
        row = out[v]
        for j in range(1, k + 1):
            if not row >> seq[(i + j) % L] & 1:
                return False
    return True


def is_head_tail(t: Tournament, s: Iterable[int], ground: Iterable[int] | int, kind: str,
                 profile: ParameterProfile, size: int | None = None) -> tuple[bool, frozenset[int]]:
    """Check whether ``s`` is a ground-head (``kind="head"``) or ground-tail.

    Returns ``(ok, witness)`` where witness is the common out- (head) or
    in- (tail) neighbourhood of ``s`` inside ``ground``.
    """
    s = list(s)
    size = profile.k if size is None else size
    if len(s) != size:
        raise WrongSize(f"expected {size} vertices, got {len(s)}")
    gmask = ground if isinstance(ground, int) else mask_of(ground)
    smask = mask_of(s)
    if kind == HEAD:
        nb = t.common_out(smask, gmask)
    elif kind == TAIL:
        nb = t.common_in(smask, gmask)
    else:
        raise ValueError(f"kind must be 'head' or 'tail', got {kind!r}")
    witness = frozenset(iter_bits(nb))
    if transitive_order(t, s) is None:
        return False, witness
    ok = popcount(nb) >= profile.head_tail_threshold(popcount(gmask), size)
    return ok, witness


def is_chain(t: Tournament, seq: Sequence[int], a: Iterable[int] | int, b: Iterable[int] | int,
             profile: ParameterProfile, order: int | None = None) -> bool:
    """(a, b, order)-chain check: an order-th power of a path opening with an
    a-tail and closing with a b-head (order defaults to ``profile.k``)."""
    k = profile.k if order is None else order
    if len(seq) < 2 * k:
        raise TooShort(f"chain needs at least {2 * k} vertices, got {len(seq)}")
    if not verify_power_seq(t, seq, k, PATH):
        return False
    ok_tail, _ = is_head_tail(t, seq[:k], a, TAIL, profile, size=k)
    if not ok_tail:
        return False
    ok_head, _ = is_head_tail(t, seq[-k:], b, HEAD, profile, size=k)
    return ok_head


# -- bipartite graphs -------------------------------------------------


@dataclass(frozen=True)
class BipartiteGraph:
    """Undirected bipartite graph with parts ``0..size_a-1`` and ``0..size_b-1``.

    Edges are stored as ``(a, b)`` index pairs into each part; ``adj_a[a]`` is
    the neighbour mask of ``a`` inside part B and vice versa.
    """

    size_a: int
    size_b: int
    edges: frozenset

    def __post_init__(self):
        for a, b in self.edges:
            if not (0 <= a < self.size_a and 0 <= b < self.size_b):
                raise OutOfRange(f"edge ({a},{b}) outside parts {self.size_a}x{self.size_b}")

    @classmethod
    def from_edges(cls, size_a: int, size_b: int, edges: Iterable[tuple[int, int]]) -> "BipartiteGraph":
        edges = list(edges)
        es = frozenset((int(a), int(b)) for a, b in edges)
        if len(es) != len(edges):
            raise InvariantViolation("duplicate bipartite edge")
        return cls(size_a, size_b, es)

    @property
    def adj_a(self) -> tuple[int, ...]:
        rows = [0] * self.size_a
        for a, b in self.edges:
            rows[a] |= 1 << b
        return tuple(rows)

    @property
    def adj_b(self) -> tuple[int, ...]:
        rows = [0] * self.size_b
        for a, b in self.edges:
            rows[b] |= 1 << a
        return tuple(rows)

    def degrees_a(self) -> list[int]:
        return [popcount(r) for r in self.adj_a]

    def degrees_b(self) -> list[int]:
        return [popcount(r) for r in self.adj_b]

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def find_krr(self, r: int) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
        """Some K_{r,r} as (A-indices, B-indices), or None. Exhaustive over r-subsets of A."""
        if r <= 0:
            return ((), ())
        adj = self.adj_a
        for combo in combinations(range(self.size_a), r):
            common = -1
            for a in combo:
                common &= adj[a]
            if popcount(common & full_mask(self.size_b)) >= r:
                bs = tuple(list(iter_bits(common & full_mask(self.size_b)))[:r])
                return combo, bs
        return None
