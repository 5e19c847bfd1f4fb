"""Exact and heuristic search for powers of Hamilton paths/cycles, long powers
of paths, and transitive subtournaments.
"""
from __future__ import annotations

import math
import random
import time
from collections import OrderedDict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .bits import full_mask, iter_bits, lowest, mask_of, popcount
from .core import CYCLE, PATH, Tournament, verify_power_seq
from .errors import DegenerateCycle, FloorNotMet, NotFound, TooLargeForExact
from .params import ParameterProfile

FOUND = "Found"
EXHAUSTED = "ExhaustedNone"
BUDGET = "BudgetExceeded"
STAGED = "StagedFailure"


@dataclass(frozen=True)
class SearchBudget:
    """Caps for a search; 0 means unlimited."""

    max_nodes: int = 0
    max_millis: int = 0
    memo_cap: int = 0

    def __post_init__(self):
        if min(self.max_nodes, self.max_millis, self.memo_cap) < 0:
            raise ValueError("budget caps must be >= 0")


UNLIMITED = SearchBudget()


@dataclass
class SearchOutcome:
    status: str
    witness: tuple[int, ...] | None = None
    nodes_expanded: int = 0
    stage: str | None = None
    message: str = ""
    stages: list = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.status == FOUND


class _BudgetHit(Exception):
    pass


class _Clock:
    def __init__(self, budget: SearchBudget):
        self.budget = budget
        self.nodes = 0
        self.deadline = (time.monotonic() + budget.max_millis / 1000.0) if budget.max_millis else None
        self.fired = False

    def tick(self):
        self.nodes += 1
        b = self.budget
        if b.max_nodes and self.nodes > b.max_nodes:
            self.fired = True
            raise _BudgetHit
        if self.deadline is not None and (self.nodes & 255) == 0 and time.monotonic() > self.deadline:
            self.fired = True
            raise _BudgetHit


class _Memo:
    """Failure memo with optional LRU cap. Dict keys are exact, so no false hits."""

    def __init__(self, cap: int):
        self.cap = cap
        self.table: OrderedDict = OrderedDict()

    def __contains__(self, key):
        if key in self.table:
            if self.cap:
                self.table.move_to_end(key)
            return True
        return False

    def add(self, key):
        self.table[key] = True
        if self.cap and len(self.table) > self.cap:
            self.table.popitem(last=False)


# -- exact power-Hamilton search --------------------------------------


def search_power_hamilton(t: Tournament, k: int, kind: str = CYCLE,
                          budget: SearchBudget | None = None,
                          within: int | None = None) -> SearchOutcome:
    """Exact backtracking for a k-th power of a Hamilton path or cycle.

    The sequence is grown one vertex at a time; a candidate must be a common
    out-neighbour of the last min(k, depth) vertices. Cycles fix the lowest
    vertex as start (rotation symmetry) and check wrap edges as the last k
    slots are filled. Failed states ``(visited, last k)`` are memoised.
    Candidates are tried in order of fewest onward extensions, ties by id.
    ``ExhaustedNone`` is only reported when no budget cap fired.
    """
    budget = budget or UNLIMITED
    pool = full_mask(t.n) if within is None else within
    n = popcount(pool)
    if n < 1:
        raise ValueError("search needs at least one vertex")
    if kind not in (PATH, CYCLE):
        raise ValueError(f"kind must be 'path' or 'cycle', got {kind!r}")
    if kind == CYCLE and n < k + 1:
        raise DegenerateCycle(f"{n} vertices cannot carry a {k}-th power of a cycle")
    clock = _Clock(budget)
    memo = _Memo(budget.memo_cap)
    out, inn = t.out, t.inn
    seq: list[int] = []

    if kind == CYCLE and n <= 2 * k:
        # some pair would need both orientations
        return SearchOutcome(EXHAUSTED, None, 0)

    def window_mask() -> int:
        return mask_of(seq[-k:])

    def feasible(unvisited: int) -> bool:
        # cycles only: every unplaced vertex needs k in-neighbours among what can
        # precede it and k out-neighbours among what can follow it
        if kind != CYCLE or not unvisited:
            return True
        pred_pool = unvisited | window_mask()
        succ_pool = unvisited | mask_of(seq[:k])
        for u in iter_bits(unvisited):
            if popcount(inn[u] & pred_pool) < k or popcount(out[u] & succ_pool) < k:
                return False
        if len(seq) >= k:
            # slot n-j must dominate the first k-j+1 vertices; nested sets, so Hall
            # reduces to |closers_j| >= j
            remaining = popcount(unvisited)
            for j in range(1, min(k, remaining) + 1):
                if popcount(inn_common(seq[: k - j + 1]) & unvisited) < j:
                    return False
        return True

    inn_cache: dict = {}

    def inn_common(vs: Sequence[int]) -> int:
        key = tuple(vs)
        r = inn_cache.get(key)
        if r is None:
            r = t.common_in(mask_of(vs))
            inn_cache[key] = r
        return r

    def candidates(unvisited: int) -> list[int]:
        depth = len(seq)
        cand = unvisited
        for v in seq[-k:]:
            cand &= out[v]
        if kind == CYCLE and depth > n - k - 1 and depth >= k:
            # slot `depth` must dominate first (depth + k - n + 1) vertices
            cand &= inn_common(seq[: depth + k - n + 1])
        if not cand:
            return []
        tail = seq[-(k - 1):] if k > 1 else []
        base = unvisited
        for v in tail:
            base &= out[v]
        scored = []
        for c in iter_bits(cand):
            onward = popcount(base & out[c] & ~(1 << c))
            scored.append((onward, c))
        scored.sort()
        return [c for _, c in scored]

    def closes() -> bool:
        return verify_power_seq(t, seq, k, CYCLE)

    def dfs(unvisited: int) -> bool:
        if not unvisited:
            return kind == PATH or closes()
        depth = len(seq)
        key = None
        if depth >= k:
            key = (tuple(seq[:k]) if kind == CYCLE else None, unvisited, tuple(seq[-k:]))
            if key in memo:
                return False
        if not feasible(unvisited):
            if key is not None:
                memo.add(key)
            return False
        for c in candidates(unvisited):
            clock.tick()
            seq.append(c)
            if dfs(unvisited & ~(1 << c)):
                return True
            seq.pop()
        if key is not None:
            memo.add(key)
        return False

    try:
        if kind == CYCLE:
            start = lowest(pool)
            seq.append(start)
            clock.tick()
            ok = dfs(pool & ~(1 << start))
        else:
            ok = False
            for start in iter_bits(pool):
                clock.tick()
                seq[:] = [start]
                if dfs(pool & ~(1 << start)):
                    ok = True
                    break
    except _BudgetHit:
        return SearchOutcome(BUDGET, None, clock.nodes)
    if ok:
        witness = tuple(seq)
        if not verify_power_seq(t, witness, k, kind):
            raise AssertionError("search produced an invalid witness")
        return SearchOutcome(FOUND, witness, clock.nodes)
    return SearchOutcome(EXHAUSTED, None, clock.nodes)


def is_strongly_connected(t: Tournament) -> bool:
    """Forward and backward reachability from vertex 0 by bitmask BFS."""
    if t.n <= 1:
        return True
    everything = full_mask(t.n)
    for rows in (t.out, t.inn):
        seen = 1
        frontier = 1
        while frontier:
            nxt = 0
            for v in iter_bits(frontier):
                nxt |= rows[v]
            frontier = nxt & ~seen
            seen |= nxt
        if seen != everything:
            return False
    return True


# -- transitive subtournaments -----------------------------------------


def find_transitive_set(t: Tournament, k: int, within: int | None = None) -> tuple[int, ...]:
    """A transitive k-set, source first.

    Halving construction: take the vertex with the largest neighbourhood
    inside the current pool, keep it as next source (or sink) and recurse into
    the larger side. Guaranteed when the pool has >= 2^(k-1) vertices; below
    that an exhaustive search decides.
    """
    pool = full_mask(t.n) if within is None else within
    if k <= 0:
        return ()
    heads: list[int] = []
    tails: list[int] = []
    cur = pool
    while len(heads) + len(tails) < k and cur:
        best = None
        for v in iter_bits(cur):
            o = popcount(t.out[v] & cur)
            i = popcount(t.inn[v] & cur)
            score = max(o, i)
            if best is None or score > best[0]:
                best = (score, v, o >= i)
        _, v, as_source = best
        if as_source:
            heads.append(v)
            cur &= t.out[v]
        else:
            tails.append(v)
            cur &= t.inn[v]
    if len(heads) + len(tails) == k:
        return tuple(heads + tails[::-1])
    found = _exhaustive_transitive(t, pool, k)
    if found is None:
        raise NotFound(f"no transitive {k}-set")
    return found


def _exhaustive_transitive(t: Tournament, pool: int, k: int) -> tuple[int, ...] | None:
    chosen: list[int] = []

    def rec(cand: int, need: int) -> bool:
        if need == 0:
            return True
        if popcount(cand) < need:
            return False
        for v in iter_bits(cand):
            chosen.append(v)
            if rec(cand & t.out[v], need - 1):
                return True
            chosen.pop()
            cand &= ~(1 << v)
            if popcount(cand) < need:
                break
        return False

    return tuple(chosen) if rec(pool, k) else None


@dataclass(frozen=True)
class TransitiveFraction:
    value: Fraction
    exact: bool
    interval: tuple[float, float] | None = None
    samples: int = 0


def count_transitive_sets(t: Tournament, k: int, within: int | None = None) -> int:
    """Number of transitive k-subsets (each counted once via its source-first order)."""
    pool = full_mask(t.n) if within is None else within
    memo: dict = {}

    def cnt(cand: int, need: int) -> int:
        if need == 0:
            return 1
        if need == 1:
            return popcount(cand)
        key = (cand, need)
        if key in memo:
            return memo[key]
        total = 0
        for v in iter_bits(cand):
            total += cnt(cand & t.out[v], need - 1)
        memo[key] = total
        return total

    return cnt(pool, k)


def transitive_fraction(t: Tournament, k: int, method: str = "exact", exact_cap: int = 10 ** 7,
                        samples: int = 20000, seed: int = 0) -> TransitiveFraction:
    n = t.n
    if n < k:
        raise ValueError("need n >= k")
    total = math.comb(n, k)
    if method == "exact":
        if total > exact_cap:
            raise TooLargeForExact(f"C({n},{k}) = {total} exceeds cap {exact_cap}")
        return TransitiveFraction(Fraction(count_transitive_sets(t, k), total), True)
    if method != "sample":
        raise ValueError("method must be 'exact' or 'sample'")
    rng = random.Random(seed)
    hits = 0
    for _ in range(samples):
        s = rng.sample(range(n), k)
        from .core import is_transitive
        hits += is_transitive(t, s)
    p = hits / samples
    half = 1.96 * math.sqrt(max(p * (1 - p), 1e-12) / samples)
    return TransitiveFraction(Fraction(hits, samples), False, (max(0.0, p - half), min(1.0, p + half)), samples)


# -- long powers of paths ----------------------------------------------


def hamilton_path_by_insertion(t: Tournament, vertices: Sequence[int]) -> list[int]:
    """Directed Hamilton path of any (sub)tournament by insertion."""
    path: list[int] = []
    for v in vertices:
        if not path or t.has_edge(v, path[0]):
            path.insert(0, v)
            continue
        if t.has_edge(path[-1], v):
            path.append(v)
            continue
        for i in range(len(path) - 1):
            if t.has_edge(path[i], v) and t.has_edge(v, path[i + 1]):
                path.insert(i + 1, v)
                break
    return path


def _grow_power_path(t: Tournament, k: int, pool: int, start: Sequence[int], clock: _Clock) -> list[int]:
    """Depth-first extension of ``start`` inside ``pool``, keeping the longest seen.

    Candidates are ordered by fewest onward extensions (hard vertices first)
    but dead ends (no onward extension while pool is nonempty) are tried last.
    """
    out = t.out
    seq = list(start)
    best = list(seq)
    unvisited = pool & ~mask_of(seq)

    def rec(unv: int) -> bool:
        nonlocal best
        if len(seq) > len(best):
            best = list(seq)
        if not unv:
            return True
        cand = unv
        for v in seq[-k:]:
            cand &= out[v]
        if not cand:
            return False
        base = unv
        for v in seq[-(k - 1):] if k > 1 else []:
            base &= out[v]
        scored = []
        for c in iter_bits(cand):
            onward = popcount(base & out[c] & ~(1 << c))
            rest = unv & ~(1 << c)
            scored.append((onward == 0 and rest != 0, onward, c))
        scored.sort()
        for _, _, c in scored:
            clock.tick()
            seq.append(c)
            if rec(unv & ~(1 << c)):
                return True
            seq.pop()
        return False

    try:
        rec(unvisited)
    except _BudgetHit:
        pass
    return best


def find_long_power_path(t: Tournament, k: int, profile: ParameterProfile | None = None,
                         budget: SearchBudget | None = None, within: int | None = None,
                         floor: int | None = None, restarts: int = 4) -> list[int]:
    """A long k-th power of a path inside ``within`` (default: all vertices).

    Greedy depth-first growth with a node budget from a few seeded starting
    transitive k-sets, keeping the longest result; the sequence is then
    extended backwards the same way on the reversed tournament. For k = 1 the
    classical insertion argument returns a Hamilton path.
    """
    pool = full_mask(t.n) if within is None else within
    size = popcount(pool)
    if size == 0:
        raise ValueError("empty vertex pool")
    if k == 1:
        path = hamilton_path_by_insertion(t, list(iter_bits(pool)))
        return _check_floor(t, path, k, size, profile, floor)
    budget = budget or SearchBudget(max_nodes=max(20000, 150 * size))
    seed = profile.rng_seed if profile is not None else 0
    rng = random.Random(seed)
    starts: list[tuple[int, ...]] = []
    try:
        starts.append(find_transitive_set(t, min(k, size), pool))
    except NotFound:
        pass
    verts = list(iter_bits(pool))
    for _ in range(restarts - 1):
        v = rng.choice(verts)
        try:
            starts.append(find_transitive_set(t, min(k, size), pool & (t.out[v] | 1 << v)))
        except NotFound:
            continue
    best: list[int] = [lowest(pool)]
    rev = None
    per_start = SearchBudget(max_nodes=max(1, (budget.max_nodes or 10 ** 9) // max(1, 2 * len(starts))),
                             max_millis=budget.max_millis)
    for s in starts:
        if not s:
            continue
        fwd = _grow_power_path(t, k, pool, s, _Clock(per_start))
        if len(fwd) < size:
            if rev is None:
                rev = t.reversed()
            back = _grow_power_path(rev, k, pool & ~mask_of(fwd[k:]) | mask_of(fwd[:k]),
                                    list(reversed(fwd[:k])), _Clock(per_start))
            fwd = list(reversed(back)) + fwd[k:]
        if len(fwd) > len(best):
            best = fwd
        if len(best) == size:
            break
    if not verify_power_seq(t, best, k, PATH):
        raise AssertionError("long path search produced an invalid power")
    return _check_floor(t, best, k, size, profile, floor)


def _check_floor(t, path, k, size, profile, floor):
    if floor is None:
        if profile is not None and profile.strict_mode:
            floor = math.ceil(size / 2 ** (8 * k))
        elif profile is not None:
            floor = profile.long_path_floor
        else:
            floor = 1
    if len(path) < floor:
        raise FloorNotMet(f"path of {len(path)} vertices below floor {floor}")
    return path
