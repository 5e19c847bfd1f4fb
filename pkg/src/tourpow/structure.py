"""Cut density and the reusable combinatorial primitives.

* balanced cuts and the "every cut is dense" check,
* r-apart collections, interval hulls and sparse deletion from path powers,
* the KST common-intersection selection,
* head/tail extraction and dependent random choice (DRC).

A fact used throughout: for any vertex set X with complement Y,

    e(X -> Y) = sum_{x in X} d^+(x) - C(|X|, 2),

because every edge inside X contributes exactly one out-degree. So the fewest
forward edges over all cuts with |X| = s comes from the s vertices of smallest
out-degree, for every n, with no search at all.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Iterator, Sequence

from .bits import full_mask, iter_bits, mask_of, popcount
from .core import (HEAD, TAIL, BipartiteGraph, Tournament, is_head_tail, min_semidegree,
                   transitive_order, verify_power_seq)
from .errors import NotFound, PreconditionFailed, RetriesExhausted, TooLargeForExact
from .params import ParameterProfile
from .search import SearchBudget, find_transitive_set

# -- cuts ------------------------------------------------------------------


@dataclass(frozen=True)
class CutWitness:
    part_x: frozenset
    part_y: frozenset
    forward_edges: int
    density: Fraction
    balanced: bool = True
    method: str = "exact"

    def as_dict(self) -> dict:
        return dict(part_x=sorted(self.part_x), part_y=sorted(self.part_y),
                    forward_edges=self.forward_edges, density=str(self.density),
                    density_float=float(self.density), balanced=self.balanced, method=self.method)


def cut_density(t: Tournament, x: Iterable[int] | int, method: str = "given") -> CutWitness:
    """Forward density of the cut (X, V - X)."""
    xm = x if isinstance(x, int) else mask_of(x)
    ym = full_mask(t.n) & ~xm
    sx, sy = popcount(xm), popcount(ym)
    if not sx or not sy:
        raise ValueError("both sides of a cut must be nonempty")
    fe = t.forward_edges(xm, ym)
    return CutWitness(frozenset(iter_bits(xm)), frozenset(iter_bits(ym)), fe,
                      Fraction(fe, sx * sy), abs(sx - sy) <= 1, method)


def _lowest_out(t: Tournament, s: int) -> int:
    order = sorted(range(t.n), key=lambda v: (popcount(t.out[v]), v))
    return mask_of(order[:s])


def balanced_cut_density(t: Tournament, mode: str = "exact", budget: SearchBudget | None = None,
                         profile: ParameterProfile | None = None, seed: int | None = None,
                         restarts: int | None = None) -> CutWitness:
    """Balanced cut (X, Y) minimising e(X -> Y) / (|X||Y|).

    ``exact``      -- the out-degree identity; exact for every n.
    ``enumerate``  -- brute force over balanced splits (n <= exact cap);
                      kept as an independent cross-check of ``exact``.
    ``heuristic``  -- seeded multi-start swap descent (an upper bound).
    """
    n = t.n
    if n < 2:
        raise ValueError("need n >= 2")
    sizes = sorted({n // 2, (n + 1) // 2})
    if mode == "exact":
        best = None
        for s in sizes:
            w = cut_density(t, _lowest_out(t, s), "exact")
            if best is None or w.density < best.density:
                best = w
        return best
    if mode == "enumerate":
        cap = profile.exact_cut_cap if profile is not None else 22
        if n > cap:
            raise TooLargeForExact(f"n = {n} exceeds exact cut cap {cap}")
        return _enumerate_balanced(t, sizes)
    if mode == "heuristic":
        if seed is None:
            seed = profile.rng_seed if profile is not None else 0
        if restarts is None:
            restarts = profile.cut_restarts if profile is not None else 32
        return _swap_descent(t, sizes, seed, restarts, budget)
    raise ValueError(f"unknown cut mode {mode!r}")


def _enumerate_balanced(t: Tournament, sizes: Sequence[int]) -> CutWitness:
    n = t.n
    allm = full_mask(n)
    best = None
    for s in sizes:
        denom = s * (n - s)
        for combo in combinations(range(n), s):
            xm = mask_of(combo)
            ym = allm & ~xm
            fe = sum(popcount(t.out[v] & ym) for v in combo)
            if best is None or Fraction(fe, denom) < best[0]:
                best = (Fraction(fe, denom), xm)
    return cut_density(t, best[1], "enumerate")


def _swap_descent(t: Tournament, sizes: Sequence[int], seed: int, restarts: int,
                  budget: SearchBudget | None) -> CutWitness:
    """Local search over balanced cuts.

    Swapping x in X with y in Y changes e(X -> Y) by
    (in_X(x) - out_Y(x)) + (out_Y(y) - in_X(y)) + 1,
    which separates into a per-vertex score, so the best swap is found in
    linear time. For odd n single moves between the two admissible sizes are
    also tried (they keep |X||Y| fixed).
    """
    n = t.n
    allm = full_mask(n)
    rng = random.Random(seed)
    max_steps = (budget.max_nodes if budget is not None and budget.max_nodes else 4 * n)
    best = None
    for r in range(max(1, restarts)):
        s = sizes[r % len(sizes)]
        xs = rng.sample(range(n), s)
        xm = mask_of(xs)
        for _ in range(max_steps):
            ym = allm & ~xm
            fx = [(popcount(t.inn[v] & xm) - popcount(t.out[v] & ym), v) for v in iter_bits(xm)]
            gy = [(popcount(t.out[v] & ym) - popcount(t.inn[v] & xm), v) for v in iter_bits(ym)]
            bx, x = min(fx)
            by, y = min(gy)
            gain = bx + by + 1
            moved = False
            if gain < 0:
                xm = (xm & ~(1 << x)) | (1 << y)
                moved = True
            elif len(sizes) == 2:
                sx = popcount(xm)
                if sx > n - sx and bx < 0:
                    xm &= ~(1 << x)
                    moved = True
                elif sx < n - sx and by < 0:
                    xm |= 1 << y
                    moved = True
            if not moved:
                break
        w = cut_density(t, xm, "heuristic")
        if best is None or w.density < best.density:
            best = w
    return best


@dataclass
class CutBoundReport:
    holds: bool
    counterexample: CutWitness | None
    hypothesis_ok: bool
    balanced_density: Fraction
    semidegree: int
    hypothesis_note: str = ""
    partitions_checked: str = "all"


def check_general_cut_bound(t: Tournament, delta, partitions: Iterable[Iterable[int]] | None = None
                            ) -> CutBoundReport:
    """Check that every cut (X, Y) has e(X -> Y) >= (delta/16)|X||Y|.

    The hypothesis (balanced cuts have density >= delta, and
    min semidegree >= n/4 - delta*n/16) is evaluated exactly and reported;
    a failing hypothesis is reported, not raised. With ``partitions=None``
    all 2^n - 2 cuts are covered through the per-size minimum given by the
    out-degree identity; otherwise only the listed X sides are checked.
    """
    delta = Fraction(delta).limit_denominator(10 ** 9) if not isinstance(delta, Fraction) else delta
    n = t.n
    semi = min_semidegree(t)
    if n >= 2:
        bal = balanced_cut_density(t, "exact").density
    else:
        bal = Fraction(1)
    notes = []
    if bal < delta:
        notes.append(f"balanced density {bal} < delta {delta}")
    if semi < Fraction(n, 4) - delta * n / 16:
        notes.append(f"semidegree {semi} < n/4 - delta n/16")
    bound = delta / 16
    if partitions is None:
        degs = sorted(popcount(t.out[v]) for v in range(n))
        order = sorted(range(n), key=lambda v: (popcount(t.out[v]), v))
        acc = 0
        for s in range(1, n):
            acc += degs[s - 1]
            fe = acc - s * (s - 1) // 2
            if Fraction(fe, s * (n - s)) < bound:
                w = cut_density(t, mask_of(order[:s]), "exact")
                return CutBoundReport(False, w, not notes, bal, semi, "; ".join(notes))
        return CutBoundReport(True, None, not notes, bal, semi, "; ".join(notes))
    count = 0
    for x in partitions:
        count += 1
        w = cut_density(t, x, "given")
        if w.density < bound:
            return CutBoundReport(False, w, not notes, bal, semi, "; ".join(notes), str(count))
    return CutBoundReport(True, None, not notes, bal, semi, "; ".join(notes), str(count))


# -- apartness --------------------------------------------------------------


def _positions(ordering: Sequence[int]) -> dict[int, int]:
    return {v: i for i, v in enumerate(ordering)}


def apartness(collection: Sequence[Iterable[int]], ordering: Sequence[int], radius: int) -> bool:
    """True iff vertices of distinct sets are more than ``radius`` apart in ``ordering``.

    Only vertices on the ordering count. Sorting all (position, set) pairs, the
    closest pair from distinct sets is adjacent in that order.
    """
    pos = _positions(ordering)
    marks = sorted((pos[v], i) for i, s in enumerate(collection) for v in s if v in pos)
    for (p1, i1), (p2, i2) in zip(marks, marks[1:]):
        if i1 != i2 and p2 - p1 <= radius:
            return False
    return True


def interval_hull(a: Iterable[int], ordering: Sequence[int], radius: int) -> frozenset[int]:
    """Vertices of ``ordering`` within distance ``radius`` of some element of ``a``."""
    pos = _positions(ordering)
    out: set[int] = set()
    L = len(ordering)
    for v in a:
        p = pos.get(v)
        if p is None:
            continue
        out.update(ordering[max(0, p - radius):min(L, p + radius + 1)])
    return frozenset(out)


@dataclass(frozen=True)
class ApartCollection:
    sets: tuple
    ordering: tuple
    radius: int

    @classmethod
    def make(cls, sets: Iterable[Iterable[int]], ordering: Sequence[int], radius: int) -> "ApartCollection":
        return cls(tuple(frozenset(s) for s in sets), tuple(ordering), radius)

    def is_apart(self) -> bool:
        return apartness(self.sets, self.ordering, self.radius)

    def union(self) -> frozenset:
        return frozenset().union(*self.sets) if self.sets else frozenset()


def delete_sparse_sets(t: Tournament, p: Sequence[int], collection: ApartCollection | Sequence[Iterable[int]],
                       r1: int, r2: int) -> list[int]:
    """Remove an r1-apart family of <= r2-sets from an r1-th power of a path.

    The result is an (r1 - r2)-th power; this is asserted on every call.
    """
    sets = collection.sets if isinstance(collection, ApartCollection) else tuple(frozenset(s) for s in collection)
    if not r2 < r1:
        raise PreconditionFailed(f"need r2 < r1, got r1={r1}, r2={r2}")
    if not verify_power_seq(t, p, r1):
        raise PreconditionFailed(f"input is not a {r1}-th power of a path")
    if any(len(s) > r2 for s in sets):
        raise PreconditionFailed(f"a set is larger than r2={r2}")
    if not apartness(sets, p, r1):
        raise PreconditionFailed(f"collection is not {r1}-apart in the path")
    gone = frozenset().union(*sets) if sets else frozenset()
    rest = [v for v in p if v not in gone]
    if not verify_power_seq(t, rest, r1 - r2):
        raise AssertionError("sparse deletion broke the power of a path")
    return rest


# -- KST ------------------------------------------------------------------------


def kst_floor(k: int, alpha: float, ground_size: int) -> float:
    return (alpha / math.e) ** k * ground_size


def kst_intersect(sets: Sequence[Iterable[int] | int], k: int, alpha: float, ground_size: int,
                  check_pre: bool = True, exhaustive_cap: int = 200_000) -> tuple[tuple[int, ...], frozenset[int]]:
    """k of the sets whose intersection has >= (alpha/e)^k * N elements.

    Greedy (largest set, then the set keeping the intersection largest),
    then an exhaustive scan over k-subsets of indices if greedy falls short.
    The floor is asserted on the returned intersection.
    """
    masks = [s if isinstance(s, int) else mask_of(s) for s in sets]
    tcount = len(masks)
    if k < 1 or k > tcount:
        raise PreconditionFailed(f"need 1 <= k <= number of sets ({tcount})")
    if check_pre:
        if tcount < k / alpha:
            raise PreconditionFailed(f"t = {tcount} < k/alpha = {k / alpha:.3g}")
        small = [i for i, m in enumerate(masks) if popcount(m) < alpha * ground_size]
        if small:
            raise PreconditionFailed(f"set {small[0]} smaller than alpha*N")
    floor = kst_floor(k, alpha, ground_size)
    order = sorted(range(tcount), key=lambda i: (-popcount(masks[i]), i))
    chosen = [order[0]]
    inter = masks[order[0]]
    while len(chosen) < k:
        best = max((i for i in order if i not in chosen), key=lambda i: (popcount(inter & masks[i]), -i))
        chosen.append(best)
        inter &= masks[best]
    if popcount(inter) < floor:
        if math.comb(tcount, k) > exhaustive_cap:
            raise NotFound("greedy KST selection below floor and exhaustive scan over budget")
        found = None
        for combo in combinations(range(tcount), k):
            m = -1
            for i in combo:
                m &= masks[i]
            if popcount(m) >= floor:
                found = (list(combo), m)
                break
        if found is None:
            raise NotFound(f"no {k} sets intersect in >= {floor:.3g} elements")
        chosen, inter = found
    assert popcount(inter) >= floor
    return tuple(sorted(chosen)), frozenset(iter_bits(inter))


# -- transitive sets, heads and tails ------------------------------------------


def transitive_sets(t: Tournament, pool: int, k: int, key: Callable[[int], float] | None = None,
                    prune: Callable[[int, int], bool] | None = None, limit: int | None = None,
                    max_nodes: int = 200_000) -> Iterator[tuple[int, ...]]:
    """Enumerate transitive k-sets inside ``pool`` in source-first order.

    Each transitive set has a unique source-first order, so generating
    sequences v1 -> v2 -> ... with each vertex dominated by all earlier ones
    lists every set exactly once. ``key`` orders candidates (smaller first);
    ``prune(mask, size)`` cuts a partial set. Stops after ``limit`` sets or
    ``max_nodes`` expansions.
    """
    out = t.out
    chosen: list[int] = []
    state = {"nodes": 0, "yielded": 0}

    def rec(cand: int) -> Iterator[tuple[int, ...]]:
        if len(chosen) == k:
            state["yielded"] += 1
            yield tuple(chosen)
            return
        need = k - len(chosen)
        vs = list(iter_bits(cand))
        if key is not None:
            vs.sort(key=lambda v: (key(v), v))
        if len(vs) < need:
            return
        for v in vs:
            state["nodes"] += 1
            if state["nodes"] > max_nodes or (limit is not None and state["yielded"] >= limit):
                return
            chosen.append(v)
            if prune is None or not prune(mask_of(chosen), len(chosen)):
                yield from rec(cand & out[v])
            chosen.pop()

    if k == 0:
        yield ()
        return
    yield from rec(pool)


def find_head_tail_in(t: Tournament, s: Iterable[int] | int, ground: Iterable[int] | int, kind: str,
                      profile: ParameterProfile, size: int | None = None) -> tuple[int, ...]:
    """A ground-head (or ground-tail) of ``size`` (default k) vertices inside ``s``.

    Follows the inclusion-exclusion argument: a transitive pool of
    ``profile.transitive_pool`` vertices, then a KST selection with alpha = 1/20
    over their neighbourhoods in ``ground``. In desk mode, if that selection
    misses the threshold, a pruned exhaustive search over transitive subsets
    of ``s`` decides. Returned in transitive (source-first) order.
    """
    k = profile.k if size is None else size
    smask = s if isinstance(s, int) else mask_of(s)
    gmask = ground if isinstance(ground, int) else mask_of(ground)
    if kind not in (HEAD, TAIL):
        raise ValueError("kind must be 'head' or 'tail'")
    nb = t.out if kind == HEAD else t.inn
    gsize = popcount(gmask)
    if profile.strict_mode:
        if popcount(smask) < profile.gate:
            raise PreconditionFailed(f"|s| = {popcount(smask)} < {profile.gate}")
        low = [v for v in iter_bits(smask) if popcount(nb[v] & gmask) < gsize / 20]
        if low:
            raise PreconditionFailed(f"vertex {low[0]} has < |ground|/20 neighbours in ground")
    need = profile.head_tail_threshold(gsize, k)

    def accept(cand: Sequence[int]) -> tuple[int, ...] | None:
        ok, _ = is_head_tail(t, cand, gmask, kind, profile, size=k)
        return transitive_order(t, cand) if ok else None

    pool_size = min(max(profile.transitive_pool, k), popcount(smask))
    if pool_size >= k:
        try:
            r = find_transitive_set(t, pool_size, smask)
        except NotFound:
            r = ()
        if len(r) >= k:
            try:
                idx, _ = kst_intersect([nb[v] & gmask for v in r], k, 1 / 20, gsize, check_pre=False)
                res = accept([r[i] for i in idx])
                if res is not None:
                    return res
            except NotFound:
                pass
    if profile.strict_mode:
        raise NotFound("KST selection failed in strict mode")

    def prune(m: int, size_now: int) -> bool:
        common = gmask
        for v in iter_bits(m):
            common &= nb[v]
        return popcount(common) < need

    ranked = sorted(iter_bits(smask), key=lambda v: (-popcount(nb[v] & gmask), v))
    rank = {v: i for i, v in enumerate(ranked)}
    for cand in transitive_sets(t, smask, k, key=rank.__getitem__, prune=prune, limit=1):
        res = accept(cand)
        if res is not None:
            return res
    raise NotFound(f"no {kind} of size {k} inside the given set")


# -- dependent random choice ---------------------------------------------------


def real_binom(x: float, k: int) -> float:
    """Generalised binomial x(x-1)...(x-k+1)/k! (0 when x < k - 1)."""
    if x < k - 1:
        return 0.0
    num = 1.0
    for i in range(k):
        num *= (x - i)
    return num / math.factorial(k)


@dataclass
class DrcAudit:
    u: frozenset
    retries_used: int
    bad: int
    total: int
    exhaustive: bool
    bad_fraction: float
    limit: float
    interval: tuple[float, float] | None = None
    gate: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.bad_fraction < self.limit


def drc_gate(a: int, b: int, gamma: float, k: int, m: int, s: int, strict: bool) -> dict:
    """Evaluate the DRC hypothesis numerically.

    ``strict`` asks C(a gamma^k, k) > 2 s^k max(C(a,k)(m/b)^k, 1); ``desk`` only
    asks that the expected common neighbourhood a gamma^k reaches s.
    """
    lhs = real_binom(a * gamma ** k, k)
    rhs = 2 * s ** k * max(math.comb(a, k) * (m / b) ** k if b else float("inf"), 1.0)
    strict_ok = lhs > rhs
    desk_ok = a * gamma ** k >= s
    return dict(lhs=lhs, rhs=rhs, strict_ok=strict_ok, desk_ok=desk_ok,
                ok=strict_ok if strict else desk_ok, expected_u=a * gamma ** k)


def drc_select(g: BipartiteGraph, side: str = "A", profile: ParameterProfile | None = None,
               max_retries: int = 5, *, k: int | None = None, s: int | None = None, m: int | None = None,
               seed: int | None = None, audit_cap: int = 500_000, audit_samples: int = 20_000) -> DrcAudit:
    """A set U on ``side`` with |U| >= s in which fewer than a 1/s^k fraction of
    k-subsets have fewer than m common neighbours on the other side.

    Per the random-choice argument: sample k vertices of the other side with
    repetition and take their common neighbourhood; audit; retry.
    """
    if side not in ("A", "B"):
        raise ValueError("side must be 'A' or 'B'")
    k = k if k is not None else (profile.k if profile is not None else 2)
    s = s if s is not None else (profile.drc_s if profile is not None else 2 ** k)
    m = m if m is not None else (profile.drc_m if profile is not None else 1)
    if seed is None:
        seed = profile.rng_seed if profile is not None else 0
    strict = profile is not None and profile.strict_mode
    rows, other = (g.adj_a, g.adj_b) if side == "A" else (g.adj_b, g.adj_a)
    a, b = len(rows), len(other)
    if a == 0 or b == 0:
        raise PreconditionFailed("empty side")
    gamma = len(g.edges) / (a * b)
    gate = drc_gate(a, b, gamma, k, m, s, strict)
    if not gate["ok"]:
        raise PreconditionFailed(f"DRC hypothesis fails: {gate}")
    rng = random.Random(seed)
    limit = 1.0 / s ** k
    last = None
    for attempt in range(1, max_retries + 1):
        picks = [rng.randrange(b) for _ in range(k)]
        umask = full_mask(a)
        for p in picks:
            umask &= other[p]
        size = popcount(umask)
        if size < max(s, k):
            continue
        res = _audit(rows, umask, k, m, audit_cap, audit_samples, rng)
        audit = DrcAudit(frozenset(iter_bits(umask)), attempt, res[0], res[1], res[2],
                         res[0] / res[1], limit, res[3], gate)
        last = audit
        if audit.passed:
            return audit
    raise RetriesExhausted(f"no admissible U in {max_retries} retries (last: {last})")


def _audit(rows: Sequence[int], umask: int, k: int, m: int, cap: int, samples: int,
           rng: random.Random) -> tuple[int, int, bool, tuple[float, float] | None]:
    members = list(iter_bits(umask))
    total = math.comb(len(members), k)
    if total <= cap:
        bad = 0
        for combo in combinations(members, k):
            c = -1
            for v in combo:
                c &= rows[v]
            if popcount(c) < m:
                bad += 1
        return bad, total, True, None
    bad = 0
    for _ in range(samples):
        combo = rng.sample(members, k)
        c = -1
        for v in combo:
            c &= rows[v]
        bad += popcount(c) < m
    p = bad / samples
    half = 1.96 * math.sqrt(max(p * (1 - p), 1e-12) / samples)
    return bad, samples, False, (max(0.0, p - half), min(1.0, p + half))
