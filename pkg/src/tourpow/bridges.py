"""Crossings of a sparse cut, bridges, and the sparse-cut Hamilton-power pipeline.

When a balanced cut (A', B') carries few forward edges, the tournament looks
like two near-regular clusters with almost everything oriented B -> A. The
pipeline strips irregular vertices into a remainder R, covers R with
*bridges* (k-th powers of paths whose first k vertices form a tail in one
side and last k a head in one side), balances the number of A -> B and
B -> A bridges, and threads everything through spanning chains of the two
sides with links built inside each side.

All sets are int bitmasks. Every returned bridge, crossing and cycle is
re-validated before it leaves this module.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

from .bits import full_mask, iter_bits, mask_of, popcount
from .chains import Chain, DeletionLedger, _stage, cut_dense_power_hamilton, link_sequence, \
    partition_into_chains, spanning_chain
from .core import CYCLE, HEAD, PATH, TAIL, BipartiteGraph, Tournament, is_head_tail, regularity_defect, \
    verify_power_seq
from .errors import (BadResidualFailed, BalanceFailed, DegenerateStrip, ExtensionFailed, GoodCoverFailed,
                     NotFound, OffsideCoverFailed, PreconditionFailed, RecursionFailed, RetriesExhausted,
                     StagedFailure)
from .params import ParameterProfile
from .search import FOUND, STAGED, SearchOutcome, find_long_power_path, search_power_hamilton
from .structure import CutWitness, balanced_cut_density, drc_select, transitive_sets

SIDE_A = "A"
SIDE_B = "B"
ORACLE_MAX_N = 14


# -- the side partition ---------------------------------------------------------


@dataclass
class SidePartition:
    """A, B, the remainder R and its classification (all int masks).

    ``r_bad``: few in-neighbours in A and few out-neighbours in B;
    ``r_a`` / ``r_b``: the rest, by the larger of d^-_A/|A| and d^+_B/|B|;
    ``c_*``: chains extracted from each class, ``rp_*`` what they leave;
    ``r_good``: residual vertices almost dominated by A and dominating B;
    ``x = A + (R_A - R_good)``, ``y = B + (R_B - R_good)``.
    """

    a: int
    b: int
    r: int
    r_bad: int = 0
    r_a: int = 0
    r_b: int = 0
    r_good: int = 0
    x: int = 0
    y: int = 0
    d: int = 0
    c_bad: list = field(default_factory=list)
    c_a: list = field(default_factory=list)
    c_b: list = field(default_factory=list)
    rp_bad: int = 0
    rp_a: int = 0
    rp_b: int = 0
    cut_density: float = 0.0
    stripped: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    classified: bool = False

    def side(self, name: str) -> int:
        return self.a if name == SIDE_A else self.b

    def summary(self) -> dict:
        return dict(a=popcount(self.a), b=popcount(self.b), r=popcount(self.r), r_bad=popcount(self.r_bad),
                    r_a=popcount(self.r_a), r_b=popcount(self.r_b), r_good=popcount(self.r_good),
                    chains_bad=len(self.c_bad), chains_a=len(self.c_a), chains_b=len(self.c_b),
                    residual_bad=popcount(self.rp_bad), residual_a=popcount(self.rp_a),
                    residual_b=popcount(self.rp_b), d=self.d, cut_density=self.cut_density,
                    stripped={k: popcount(v) for k, v in self.stripped.items()})

    def check(self, t: Tournament) -> bool:
        """Re-check the partition and every membership threshold from scratch."""
        everything = full_mask(t.n)
        if self.a & self.b or self.a & self.r or self.b & self.r or self.a | self.b | self.r != everything:
            return False
        if not self.classified:
            return True
        if self.r_bad | self.r_a | self.r_b != self.r:
            return False
        if self.r_bad & self.r_a or self.r_bad & self.r_b or self.r_a & self.r_b:
            return False
        na, nb = popcount(self.a), popcount(self.b)
        for v in iter_bits(self.r):
            da, db = popcount(t.inn[v] & self.a), popcount(t.out[v] & self.b)
            bad = da < na / 10 and db < nb / 10
            if bad != bool(self.r_bad >> v & 1):
                return False
            if self.r_a >> v & 1 and da < na / 10:
                return False
            if self.r_b >> v & 1 and db < nb / 10:
                return False
        if self.r_good & ~(self.rp_a | self.rp_b):
            return False
        for v in iter_bits(self.rp_a | self.rp_b):
            good = _good_score(t, v, self) <= 2 * self.d
            if good != bool(self.r_good >> v & 1):
                return False
        chained = lambda cs: mask_of(u for c in cs for u in c.seq)
        if chained(self.c_bad) | self.rp_bad != self.r_bad or chained(self.c_bad) & self.rp_bad:
            return False
        if chained(self.c_a) | self.rp_a != self.r_a or chained(self.c_b) | self.rp_b != self.r_b:
            return False
        return (self.x == self.a | (self.r_a & ~self.r_good)
                and self.y == self.b | (self.r_b & ~self.r_good))


def _good_score(t: Tournament, v: int, sp: SidePartition) -> int:
    return popcount(t.out[v] & (sp.a | sp.r_a)) + popcount(t.inn[v] & (sp.b | sp.r_b))


def _strip_thresholds(n: int, delta: float, size_a: int, size_b: int, strict: bool) -> tuple[float, float, float]:
    t1 = 2 * math.sqrt(delta) * n
    extra = delta ** 0.25 * n
    if strict:
        return t1, t1, extra
    # at desk n the proof's thresholds exceed every degree; cap them by a
    # fixed fraction of the opposite side. The proof assumes delta > 0; a
    # floor of 1 keeps an empty forward cut from stripping everything
    return (max(1.0, min(t1, size_b / 3)), max(1.0, min(t1, size_a / 3)),
            max(1.0, min(extra, min(size_a, size_b) / 8)))


def prepare_partition(t: Tournament, profile: ParameterProfile, cut: CutWitness | None = None,
                      stages: list | None = None) -> SidePartition:
    """Strip the vertices that make T[A'] or T[B'] irregular.

    A' is the low-forward side of a balanced cut. Removed, in order:
    X_1 (out-degree into B' at least the first threshold), Y_1 (in-degree
    from A' at least the threshold), X_2 (out-degree inside A' at least
    n/4 + the second threshold), Y_2 likewise inside B'. What is left is A,
    B; the stripped vertices form R.
    """
    n = t.n
    cut = balanced_cut_density(t, "exact") if cut is None else cut
    ap = mask_of(cut.part_x)
    bp = full_mask(n) & ~ap
    e = t.forward_edges(ap, bp)
    delta = 4 * e / (n * n)
    th_x1, th_y1, extra = _strip_thresholds(n, delta, popcount(ap), popcount(bp), profile.strict_mode)
    x1 = mask_of(v for v in iter_bits(ap) if popcount(t.out[v] & bp) >= th_x1)
    y1 = mask_of(v for v in iter_bits(bp) if popcount(t.inn[v] & ap) >= th_y1)
    th2 = n / 4 + extra
    x2 = mask_of(v for v in iter_bits(ap & ~x1) if popcount(t.out[v] & ap) >= th2)
    y2 = mask_of(v for v in iter_bits(bp & ~y1) if popcount(t.inn[v] & bp) >= th2)
    a = ap & ~x1 & ~x2
    b = bp & ~y1 & ~y2
    if popcount(a) * 2 < popcount(ap) or popcount(b) * 2 < popcount(bp):
        _stage(stages, "prepare", "failed", a=popcount(a), b=popcount(b))
        raise DegenerateStrip(f"stripping left |A| = {popcount(a)}, |B| = {popcount(b)}",
                              a=popcount(a), b=popcount(b), delta=delta)
    sp = SidePartition(a, b, full_mask(n) & ~a & ~b, cut_density=float(cut.density),
                       stripped=dict(x1=x1, y1=y1, x2=x2, y2=y2),
                       thresholds=dict(delta=delta, x1=th_x1, y1=th_y1, second=th2))
    defects = dict(a=regularity_defect(t.induced(list(iter_bits(a)))) if a else 0,
                   b=regularity_defect(t.induced(list(iter_bits(b)))) if b else 0)
    sp.thresholds["defect"] = defects
    _stage(stages, "prepare", "ok", a=popcount(a), b=popcount(b), r=popcount(sp.r), delta=delta,
           defect_a=defects["a"], defect_b=defects["b"])
    return sp


def classify_remainder(t: Tournament, sp: SidePartition, profile: ParameterProfile,
                       stages: list | None = None) -> SidePartition:
    """Split R into R_bad, R_A, R_B, extract chains from each, and fix d,
    R_good, X and Y."""
    a, b = sp.a, sp.b
    na, nb = popcount(a), popcount(b)
    r_bad = r_a = r_b = 0
    for v in iter_bits(sp.r):
        da, db = popcount(t.inn[v] & a), popcount(t.out[v] & b)
        if da < na / 10 and db < nb / 10:
            r_bad |= 1 << v
        elif da * nb >= db * na:
            r_a |= 1 << v
        else:
            r_b |= 1 << v
    k = profile.k
    order = profile.apart_radius
    c_bad, rp_bad = partition_into_chains(t, r_bad, b, a, profile, order=k, stages=stages) if r_bad else ([], ())
    c_a, rp_a = partition_into_chains(t, r_a, a, a | b, profile, order=order, stages=stages) if r_a else ([], ())
    c_b, rp_b = partition_into_chains(t, r_b, a | b, b, profile, order=order, stages=stages) if r_b else ([], ())
    out = SidePartition(a, b, sp.r, r_bad, r_a, r_b, cut_density=sp.cut_density, stripped=sp.stripped,
                        thresholds=dict(sp.thresholds), classified=True)
    out.c_bad, out.c_a, out.c_b = list(c_bad), list(c_a), list(c_b)
    out.rp_bad, out.rp_a, out.rp_b = mask_of(rp_bad), mask_of(rp_a), mask_of(rp_b)
    out.d = profile.bridge_d_base * (popcount(out.rp_a | out.rp_b) + 1)
    out.r_good = mask_of(v for v in iter_bits(out.rp_a | out.rp_b) if _good_score(t, v, out) <= 2 * out.d)
    out.x = a | (r_a & ~out.r_good)
    out.y = b | (r_b & ~out.r_good)
    _stage(stages, "classify", "ok", **{k_: v for k_, v in out.summary().items() if k_ != "stripped"})
    return out


# -- crossings of a cut ------------------------------------------------------------------


class CountingWitness(NamedTuple):
    x0: int
    y0: int
    y_of_x0: int
    x_of_y0: int
    delta: Fraction


def _y_of(t: Tournament, u: int, x: int, y: int, thr: Fraction) -> int:
    """Y(u): out-neighbours v of u in y with |N^-_x(v) & N^-_x(u)| >= thr."""
    base = t.inn[u] & x
    return mask_of(v for v in iter_bits(t.out[u] & y) if popcount(t.inn[v] & base) >= thr)


def _x_of(t: Tournament, v: int, x: int, y: int, thr: Fraction) -> int:
    """X(v): in-neighbours u of v in x with |N^+_y(u) & N^+_y(v)| >= thr."""
    base = t.out[v] & y
    return mask_of(u for u in iter_bits(t.inn[v] & x) if popcount(t.out[u] & base) >= thr)


def _density(t: Tournament, x: int, y: int) -> Fraction:
    sx, sy = popcount(x), popcount(y)
    if not sx or not sy:
        return Fraction(0)
    return Fraction(t.forward_edges(x, y), sx * sy)


def counting_pairs(t: Tournament, x: int, y: int, profile: ParameterProfile | None = None) -> CountingWitness:
    """x0 maximising |Y(x0)| and y0 maximising |X(y0)|, with the guaranteed
    floors |Y(x0)| >= delta|Y|/8 and |X(y0)| >= delta|X|/8 asserted."""
    sx, sy = popcount(x), popcount(y)
    if not sx or not sy:
        raise PreconditionFailed("both sides must be nonempty")
    delta = _density(t, x, y)
    if profile is not None:
        floor = 2 ** 10 if profile.strict_mode else profile.crossing_floor
        if delta * sx <= floor or delta * sy <= floor:
            raise PreconditionFailed(f"delta|X| = {float(delta * sx):.2f}, delta|Y| = {float(delta * sy):.2f} "
                                     f"not above {floor}")
    thr_x, thr_y = delta * sx / 8, delta * sy / 8
    best_x = max(iter_bits(x), key=lambda u: (popcount(_y_of(t, u, x, y, thr_x)), -u))
    best_y = max(iter_bits(y), key=lambda v: (popcount(_x_of(t, v, x, y, thr_y)), -v))
    yx = _y_of(t, best_x, x, y, thr_x)
    xy = _x_of(t, best_y, x, y, thr_y)
    if popcount(yx) < thr_y or popcount(xy) < thr_x:
        raise NotFound(f"counting floors missed: |Y(x0)| = {popcount(yx)}, |X(y0)| = {popcount(xy)}")
    return CountingWitness(best_x, best_y, yx, xy, delta)


def _top(items: list, key, width: int) -> list:
    items.sort(key=key)
    return items[:width]


def _crossing(t: Tournament, x: int, y: int, k: int, depth: int, beam: int, trace: list | None,
              strict: bool) -> tuple:
    """Even k: (x_1..x_k, y_1..y_k) in x^k * y^k forming a k-th power of a path."""
    sx, sy = popcount(x), popcount(y)
    if not sx or not sy or not t.forward_edges(x, y):
        raise RecursionFailed(depth, "shrink", f"depth {depth}: empty side or no forward edge")
    delta = _density(t, x, y)
    thr_x, thr_y = delta * sx / 8, delta * sy / 8
    ys = {u: _y_of(t, u, x, y, thr_x) for u in iter_bits(x)}
    floor_b = thr_y if strict else 1
    bs = _top([u for u in ys if popcount(ys[u]) >= max(floor_b, 1)], lambda u: (-popcount(ys[u]), u), beam)
    if not bs:
        raise RecursionFailed(depth, "pick-b")
    last = RecursionFailed(depth, "pick-d")
    if k == 2:
        for b in bs:
            yb = ys[b]
            cs = _top(list(iter_bits(yb)), lambda v: (-popcount(t.out[v] & yb), v), max(beam, 1) * 4)
            for c in cs:
                ds = t.out[c] & yb
                if not ds:
                    last = RecursionFailed(depth, "pick-d")
                    continue
                a_pool = t.inn[b] & t.inn[c] & x
                if not a_pool:
                    last = RecursionFailed(depth, "pick-a")
                    continue
                a = min(iter_bits(a_pool))
                d = min(iter_bits(ds))
                if trace is not None:
                    trace.append(dict(depth=depth, k=2, delta=delta, size_x=sx, size_y=sy, y_of_b=popcount(yb)))
                return (a, b, c, d)
        raise last
    for b in bs:
        yb = ys[b]
        x1 = t.inn[b] & x
        ds = _top(list(iter_bits(yb)), lambda v: (-popcount(t.inn[v] & yb), v), beam)
        for d in ds:
            if popcount(t.inn[d] & yb) * 4 < popcount(yb):
                continue
            y1 = yb & t.inn[d]
            if not y1 or not x1:
                last = RecursionFailed(depth, "shrink")
                continue
            delta1 = _density(t, x1, y1)
            # every vertex of Y(b) has delta|X|/8 in-neighbours inside N^-_X(b)
            assert delta1 >= delta * sx / (8 * popcount(x1)) >= delta / 8
            thr1 = delta1 * popcount(y1) / 8
            xs = {v: _x_of(t, v, x1, y1, thr1) for v in iter_bits(y1)}
            cs = _top([v for v in xs if xs[v]], lambda v: (-popcount(xs[v]), v), beam)
            if not cs:
                last = RecursionFailed(depth, "pick-c")
                continue
            for c in cs:
                x1c = xs[c]
                ays = _top(list(iter_bits(x1c)), lambda u: (-popcount(t.out[u] & x1c), u), beam)
                for a in ays:
                    if popcount(t.out[a] & x1c) * 4 < popcount(x1c) and strict:
                        continue
                    x2 = x1c & t.out[a]
                    y2 = t.out[c] & y1
                    if not x2 or not y2:
                        last = RecursionFailed(depth, "shrink")
                        continue
                    delta2 = _density(t, x2, y2)
                    assert delta2 >= delta1 * popcount(y1) / (8 * popcount(y2)) >= delta1 / 8
                    entry = dict(depth=depth, k=k, delta=delta, delta1=delta1, delta2=delta2,
                                 size_x=sx, size_y=sy, size_x1=popcount(x1), size_y1=popcount(y1),
                                 size_x2=popcount(x2), size_y2=popcount(y2))
                    try:
                        inner = _crossing(t, x2, y2, k - 2, depth + 1, beam, trace, strict)
                    except RecursionFailed as exc:
                        last = exc
                        continue
                    if trace is not None:
                        trace.append(entry)
                    h = k - 2
                    return (a,) + inner[:h] + (b, c) + inner[h:] + (d,)
            if strict:
                break
    raise last


def crossing_hypothesis(x_size: int, y_size: int, delta: float, k: int, profile: ParameterProfile) -> dict:
    ke = k + (k % 2)
    lhs_x = delta ** (ke / 2) * x_size
    lhs_y = delta ** (ke / 2) * y_size
    need = 2.0 ** (10 * ke * ke) if profile.strict_mode else profile.crossing_floor
    return dict(lhs_x=lhs_x, lhs_y=lhs_y, need=need, ok=lhs_x > need and lhs_y > need, even_k=ke)


def find_crossing_power(t: Tournament, x: int | Sequence[int], y: int | Sequence[int],
                        profile: ParameterProfile, trace: list | None = None) -> tuple:
    """(x_1, ..., x_k, y_1, ..., y_k) in X^k x Y^k that is a k-th power of a path.

    Follows the induction on k/2: pick b, d on the first application of the
    counting lemma, c, a on the second, recurse into (X_2, Y_2) with k - 2.
    Odd k runs k + 1 and drops the first and the last vertex. Strict mode
    takes only the argmax at every choice; desk mode backtracks over the few
    best-ranked candidates. ``trace`` collects the tracked densities.
    """
    xm = x if isinstance(x, int) else mask_of(x)
    ym = y if isinstance(y, int) else mask_of(y)
    if xm & ym:
        raise PreconditionFailed("X and Y must be disjoint")
    k = profile.k
    delta = _density(t, xm, ym)
    hyp = crossing_hypothesis(popcount(xm), popcount(ym), float(delta), k, profile)
    if not hyp["ok"]:
        raise PreconditionFailed(f"crossing hypothesis fails: {hyp}")
    ke = hyp["even_k"]
    beam = 1 if profile.strict_mode else 4
    seq = _crossing(t, xm, ym, ke, 0, beam, trace, profile.strict_mode)
    if ke != k:
        seq = seq[1:ke] + seq[ke:2 * ke - 1]
    if not verify_power_seq(t, seq, k) or mask_of(seq[:k]) & ~xm or mask_of(seq[k:]) & ~ym:
        raise AssertionError("crossing failed validation")
    return tuple(seq)


# -- bridges ------------------------------------------------------------------------------


@dataclass(frozen=True)
class Bridge:
    seq: tuple
    from_side: str
    to_side: str
    kind: str = ""
    covers: tuple = ()

    @property
    def direction(self) -> str:
        return self.from_side + self.to_side

    def side_vertex_count(self, sp: SidePartition) -> int:
        return popcount(mask_of(self.seq) & (sp.a | sp.b))

    def validate(self, t: Tournament, sp: SidePartition, profile: ParameterProfile) -> bool:
        k = profile.k
        if len(self.seq) < 2 * k or len(set(self.seq)) != len(self.seq):
            return False
        if not verify_power_seq(t, self.seq, k):
            return False
        za, wa = sp.side(self.from_side), sp.side(self.to_side)
        if mask_of(self.seq[:k]) & ~za or mask_of(self.seq[-k:]) & ~wa:
            return False
        if not is_head_tail(t, self.seq[:k], za, TAIL, profile)[0]:
            return False
        if not is_head_tail(t, self.seq[-k:], wa, HEAD, profile)[0]:
            return False
        return self.side_vertex_count(sp) <= 4 * k


@dataclass
class BridgeCover:
    bridges: list
    certificate: dict
    ledger: DeletionLedger | None = None

    @property
    def balanced(self) -> bool:
        c = self.certificate
        return c["ab"] == c["ba"] >= 1


class _Frame(NamedTuple):
    """View of the instance in which the vertex being covered lies in R_A.

    ``flip`` marks the reversed tournament with the sides swapped; a bridge
    found there is reversed back."""
    t: Tournament
    a: int
    b: int
    ra: int
    rb: int
    flip: bool


def _frames(t: Tournament, sp: SidePartition) -> tuple[_Frame, _Frame]:
    rev = t.reversed()
    return (_Frame(t, sp.a, sp.b, sp.r_a, sp.r_b, False),
            _Frame(rev, sp.b, sp.a, sp.r_b, sp.r_a, True))


def _unframe(fr: _Frame, seq: Sequence[int], z: str, w: str) -> tuple[tuple, str, str]:
    if not fr.flip:
        return tuple(seq), z, w
    swap = {SIDE_A: SIDE_B, SIDE_B: SIDE_A}
    return tuple(reversed(seq)), swap[w], swap[z]


def _sets(t: Tournament, ledger: DeletionLedger, pool: int, ground: int, kind: str, profile: ParameterProfile,
          pending: Sequence[Sequence[int]] = (), rng: random.Random | None = None, limit: int = 40):
    """Admissible transitive k-sets in ``pool`` that are ground-heads/tails."""
    k = profile.k
    thr = profile.head_tail_threshold(popcount(ground), k)
    nb = t.out if kind == HEAD else t.inn
    taken = 0
    for p in pending:
        taken |= mask_of(p)
    pool &= ledger.available() & ~taken
    if popcount(pool) < k:
        return

    def prune(m: int, size: int) -> bool:
        c = ground
        for v in iter_bits(m):
            c &= nb[v]
        return popcount(c) < thr

    if rng is None:
        key = {v: -popcount(nb[v] & ground) for v in iter_bits(pool)}
    else:
        key = {v: rng.random() for v in iter_bits(pool)}
    for s in transitive_sets(t, pool, k, key=key.__getitem__, prune=prune, limit=limit, max_nodes=20_000):
        if ledger.admissible(s, pending):
            yield s


def _first(gen):
    for s in gen:
        return s
    return None


def _drc_restrict(t: Tournament, src: int, dst: int, profile: ParameterProfile, seed: int,
                  stages: list | None) -> int:
    """U inside dst in which almost every k-set has many common in-neighbours
    in src (dependent random choice); dst itself when the hypothesis fails."""
    srcs, dsts = list(iter_bits(src)), list(iter_bits(dst))
    if not srcs or not dsts:
        return dst
    di = {v: i for i, v in enumerate(dsts)}
    edges = [(di[v], j) for j, u in enumerate(srcs) for v in iter_bits(t.out[u] & dst)]
    g = BipartiteGraph.from_edges(len(dsts), len(srcs), edges)
    try:
        audit = drc_select(g, "A", profile, seed=seed)
    except (PreconditionFailed, RetriesExhausted) as exc:
        _stage(stages, "drc", "skipped", reason=str(exc)[:80])
        return dst
    _stage(stages, "drc", "ok", u=len(audit.u), bad_fraction=audit.bad_fraction)
    return mask_of(dsts[i] for i in audit.u)


def _two_sided(fr: _Frame, ledger: DeletionLedger, v: int, pre: int, pre_ground: int, post: int,
               post_ground: int, profile: ParameterProfile, head_pools: Sequence[int] = ()) -> tuple | None:
    """(S_1, v, S_2): S_2 a post_ground-head inside post (searched first, in
    each of ``head_pools`` then in post), S_1 a pre_ground-tail inside pre
    dominating S_2."""
    t = fr.t
    for hp in list(head_pools) + [post]:
        for s2 in _sets(t, ledger, hp & post, post_ground, HEAD, profile, limit=30):
            s1 = _first(_sets(t, ledger, pre & t.common_in(mask_of(s2)), pre_ground, TAIL, profile, [s2]))
            if s1 is not None:
                return tuple(s1) + (v,) + tuple(s2)
    return None


def _offside(fr: _Frame, ledger: DeletionLedger, sp: SidePartition, v: int, profile: ParameterProfile,
             stages: list | None) -> tuple[tuple, str, str, str]:
    """A bridge through v (v in R_A of the frame) that does not go B -> A."""
    t, a, b, ra, rb = fr.t, fr.a, fr.b, fr.ra, fr.rb
    d = sp.d
    avail = ledger.available()
    out, inn = t.out[v], t.inn[v]
    if popcount(out & (a | ra)) > d:
        np_a, nm_a = out & a & avail, inn & a & avail
        if popcount(np_a) > d / 4:
            u = _drc_restrict(t, nm_a, np_a, profile, profile.rng_seed + v, stages)
            seq = _two_sided(fr, ledger, v, nm_a, a, np_a, a, profile, head_pools=[u] if u != np_a else [])
            if seq is None:
                raise OffsideCoverFailed(v, "1a")
            return seq, SIDE_A, SIDE_A, "1a"
        np_r = out & ra & avail
        if popcount(np_r) > d / 4:
            for s2 in _sets(t, ledger, np_r, a | b, HEAD, profile, limit=30):
                m2 = mask_of(s2)
                s1 = _first(_sets(t, ledger, nm_a & t.common_in(m2), a, TAIL, profile, [s2]))
                if s1 is None:
                    continue
                for side, gm in ((SIDE_A, a), (SIDE_B, b)):
                    s3 = _first(_sets(t, ledger, gm & t.common_out(m2), gm, HEAD, profile, [s1, s2]))
                    if s3 is not None:
                        return tuple(s1) + (v,) + tuple(s2) + tuple(s3), SIDE_A, side, "1b"
            raise OffsideCoverFailed(v, "1b")
        raise OffsideCoverFailed(v, "1a", f"vertex {v}: too few usable out-neighbours in A and R_A")
    nm_b, np_b = inn & b & avail, out & b & avail
    if popcount(nm_b) > d / 4:
        seq = None
        for s1 in _sets(t, ledger, nm_b, b, TAIL, profile, limit=30):
            s2 = _first(_sets(t, ledger, np_b & t.common_out(mask_of(s1)), b, HEAD, profile, [s1]))
            if s2 is not None:
                seq = tuple(s1) + (v,) + tuple(s2)
                break
        if seq is None:
            raise OffsideCoverFailed(v, "2a")
        return seq, SIDE_B, SIDE_B, "2a"
    nm_r = inn & rb & avail
    if popcount(nm_r) > d / 4:
        for s2 in _sets(t, ledger, nm_r, a | b, TAIL, profile, limit=30):
            m2 = mask_of(s2)
            s3 = _first(_sets(t, ledger, np_b & t.common_out(m2), b, HEAD, profile, [s2]))
            if s3 is None:
                continue
            for side, gm in ((SIDE_B, b), (SIDE_A, a)):
                s1 = _first(_sets(t, ledger, gm & t.common_in(m2), gm, TAIL, profile, [s2, s3]))
                if s1 is not None:
                    return tuple(s1) + tuple(s2) + (v,) + tuple(s3), side, SIDE_B, "2b"
        raise OffsideCoverFailed(v, "2b")
    raise OffsideCoverFailed(v, "2a", f"vertex {v}: too few usable in-neighbours in B and R_B")


class _Builder:
    """Shared state of one bridge-cover attempt."""

    def __init__(self, t: Tournament, sp: SidePartition, profile: ParameterProfile, stages: list | None):
        self.t, self.sp, self.profile, self.stages = t, sp, profile, stages
        self.k = profile.k
        self.rng = random.Random(profile.rng_seed)
        chains = [c.seq for c in sp.c_a + sp.c_b + sp.c_bad]
        borrowable = mask_of(v for c in sp.c_a + sp.c_b for v in c.seq[self.k:-self.k])
        forbidden = sp.r & ~borrowable
        self.ledger = DeletionLedger(t, self.k, chains, forbidden, profile.deletion, profile.apart_radius)
        self.bridges: list[Bridge] = []

    def add(self, seq: Sequence[int], z: str, w: str, kind: str, covers: Sequence[int] = ()) -> Bridge:
        br = Bridge(tuple(seq), z, w, kind, tuple(covers))
        if not br.validate(self.t, self.sp, self.profile):
            raise AssertionError(f"invalid {kind} bridge {br.seq}")
        cov = mask_of(covers)
        self.ledger.commit([u for u in seq if not cov >> u & 1], f"bridge {kind}")
        self.ledger.reserve(cov)
        self.bridges.append(br)
        return br

    def count(self, z: str, w: str) -> int:
        return sum(1 for br in self.bridges if br.from_side == z and br.to_side == w)


def _cover_offside(bd: _Builder) -> None:
    t, sp = bd.t, bd.sp
    frames = _frames(t, sp)
    for v in iter_bits((sp.rp_a | sp.rp_b) & ~sp.r_good):
        fr = frames[0] if sp.rp_a >> v & 1 else frames[1]
        seq, z, w, case = _offside(fr, bd.ledger, sp, v, bd.profile, bd.stages)
        seq, z, w = _unframe(fr, seq, z, w)
        # cases of an R'_B vertex are named in the reversed view
        bd.add(seq, z, w, f"offside-{'rev-' if fr.flip else ''}{case}", (v,))
    _stage(bd.stages, "offside-cover", "ok", bridges=len(bd.bridges))


def _good_count(bd: _Builder) -> int:
    """How many A -> B bridges the good-cover stage builds.

    The proof takes r_good + |C_bad| + |R'_bad| + 1 and later pads the
    other direction; desk mode builds only as many as are needed to carry
    every R_good vertex and to match the forced B -> A bridges."""
    sp = bd.sp
    r_good = popcount(sp.r_good)
    forced_ba = len(sp.c_bad) + popcount(sp.rp_bad)
    if bd.profile.strict_mode:
        return r_good + forced_ba + 1
    return max(r_good, forced_ba - bd.count(SIDE_A, SIDE_B), 1)


def _compact_good(bd: _Builder, g: int | None, xp: int, yp: int) -> tuple | None:
    """A crossing (w_1, w_2) with w_1 an A-tail and w_2 a B-head is itself
    an A -> B bridge; with g in between when X' -> g -> Y'."""
    t, sp, profile, k = bd.t, bd.sp, bd.profile, bd.k
    xs = sp.a & xp
    ys = sp.b & yp
    for attempt in range(6):
        if attempt:
            xs = mask_of(v for v in iter_bits(sp.a & xp) if bd.rng.random() < 0.6)
            ys = mask_of(v for v in iter_bits(sp.b & yp) if bd.rng.random() < 0.6)
        try:
            w = find_crossing_power(t, xs, ys, profile)
        except (PreconditionFailed, RecursionFailed):
            continue
        seq = w if g is None else w[:k] + (g,) + w[k:]
        ends_ok = (is_head_tail(t, w[:k], sp.a, TAIL, profile)[0]
                   and is_head_tail(t, w[k:], sp.b, HEAD, profile)[0])
        if ends_ok and bd.ledger.admissible(w):
            return seq
    return None


def _cover_good(bd: _Builder) -> None:
    """A -> B bridges through X' -> Y', one R_good vertex inserted into each
    of the first r_good of them (X' -> R_good -> Y' makes that legal).

    The proof's form is (S_1, w_1, w_2, S_2) with S_1 a random A-tail, S_2 a
    random B-head and (w_1, w_2) a crossing between their common
    neighbourhoods in X', Y'; desk mode first tries the crossing alone."""
    t, sp, profile, k = bd.t, bd.sp, bd.profile, bd.k
    goods = list(iter_bits(sp.r_good))
    need = _good_count(bd)
    gmask = sp.r_good
    built: list[tuple] = []
    tries = 0
    compact = 0
    while len(built) < need:
        g = goods[len(built)] if len(built) < len(goods) else None
        avail = bd.ledger.available()
        xp = sp.x & avail & t.common_in(gmask)
        yp = sp.y & avail & t.common_out(gmask)
        if not profile.strict_mode:
            seq = _compact_good(bd, g, xp, yp)
            if seq is not None:
                bd.add(seq, SIDE_A, SIDE_B, "good" if g is not None else "surplus", () if g is None else (g,))
                built.append(seq)
                compact += 1
                continue
        if tries >= profile.sampling_retries:
            _stage(bd.stages, "good-cover", "failed", built=len(built), needed=need, tries=tries)
            raise GoodCoverFailed(f"{len(built)} of {need} A->B bridges after {tries} samples",
                                  built=len(built), needed=need)
        tries += 1
        s1 = _first(_sets(t, bd.ledger, sp.a & avail, sp.a, TAIL, profile, rng=bd.rng, limit=5))
        if s1 is None:
            continue
        s2 = _first(_sets(t, bd.ledger, sp.b & avail, sp.b, HEAD, profile, [s1], rng=bd.rng, limit=5))
        if s2 is None:
            continue
        used = mask_of(s1) | mask_of(s2)
        x1 = t.common_out(mask_of(s1), xp) & ~used
        y1 = t.common_in(mask_of(s2), yp) & ~used
        _stage(bd.stages, "good-sample", "ok", e_restricted=t.forward_edges(x1, y1),
               e_full=t.forward_edges(xp, yp), bound=t.forward_edges(xp, yp) / 2 ** (100 * k * k))
        try:
            w = find_crossing_power(t, x1, y1, profile)
        except (PreconditionFailed, RecursionFailed):
            continue
        seq = tuple(s1) + w + tuple(s2)
        if not bd.ledger.admissible(seq):
            continue
        if g is not None:
            seq = tuple(s1) + w[:k] + (g,) + w[k:] + tuple(s2)
        bd.add(seq, SIDE_A, SIDE_B, "good" if g is not None else "surplus", () if g is None else (g,))
        built.append(seq)
    _stage(bd.stages, "good-cover", "ok", bridges=len(built), samples=tries, compact=compact,
           r_good=len(goods))


def _extend(bd: _Builder) -> None:
    t, sp, profile, k = bd.t, bd.sp, bd.profile, bd.k
    plans = ([((SIDE_A,), (SIDE_A, SIDE_B))] * len(sp.c_a) + [((SIDE_A, SIDE_B), (SIDE_B,))] * len(sp.c_b)
             + [((SIDE_B,), (SIDE_A,))] * len(sp.c_bad))
    for i, (froms, tos) in enumerate(plans):
        q = tuple(bd.ledger.remaining(i))
        if not verify_power_seq(t, q, k):
            raise ExtensionFailed(i, f"chain {i} remnant is not a {k}-th power")
        bd.ledger.reserve(mask_of(q))
        done = False
        for z in froms:
            zm = sp.side(z)
            for s1 in _sets(t, bd.ledger, zm & t.common_in(mask_of(q[:k])), zm, TAIL, profile, limit=20):
                for w in tos:
                    wm = sp.side(w)
                    s2 = _first(_sets(t, bd.ledger, wm & t.common_out(mask_of(q[-k:])), wm, HEAD, profile, [s1]))
                    if s2 is not None:
                        bd.add(tuple(s1) + q + tuple(s2), z, w, "extension", q)
                        done = True
                        break
                if done:
                    break
            if done:
                break
        if not done:
            raise ExtensionFailed(i)
    _stage(bd.stages, "extension", "ok", chains=len(plans))


def _dense_reverse(bd: _Builder, v: int | None) -> tuple | None:
    """B-tail S_1 (=> v) and A-head S_2 with S_1 => S_2 (and v => S_2)."""
    t, sp, profile = bd.t, bd.sp, bd.profile
    pre = sp.b if v is None else sp.b & t.inn[v]
    post = sp.a if v is None else sp.a & t.out[v]
    for s1 in _sets(t, bd.ledger, pre, sp.b, TAIL, profile, limit=30):
        s2 = _first(_sets(t, bd.ledger, post & t.common_out(mask_of(s1)), sp.a, HEAD, profile, [s1]))
        if s2 is not None:
            return tuple(s1) + (() if v is None else (v,)) + tuple(s2)
    return None


def _cover_bad_residual(bd: _Builder) -> None:
    for v in iter_bits(bd.sp.rp_bad):
        seq = _dense_reverse(bd, v)
        if seq is None:
            raise BadResidualFailed(v)
        bd.add(seq, SIDE_B, SIDE_A, "bad-residual", (v,))
    _stage(bd.stages, "bad-residual", "ok", vertices=popcount(bd.sp.rp_bad))


def _balance(bd: _Builder) -> None:
    ab, ba = bd.count(SIDE_A, SIDE_B), bd.count(SIDE_B, SIDE_A)
    if ab < ba or ab == 0:
        raise BalanceFailed(f"{ab} A->B bridges against {ba} B->A", ab=ab, ba=ba)
    for _ in range(ab - ba):
        seq = _dense_reverse(bd, None)
        if seq is None:
            raise BalanceFailed(f"no further B->A bridge ({bd.count(SIDE_B, SIDE_A)} of {ab})", ab=ab,
                                ba=bd.count(SIDE_B, SIDE_A))
        bd.add(seq, SIDE_B, SIDE_A, "balance")
    _stage(bd.stages, "balance", "ok", added=ab - ba, per_direction=ab)


def balance_certificate(bridges: Sequence[Bridge]) -> dict:
    cnt = {d: 0 for d in ("AB", "BA", "AA", "BB")}
    for br in bridges:
        cnt[br.direction] += 1
    return dict(ab=cnt["AB"], ba=cnt["BA"], aa=cnt["AA"], bb=cnt["BB"],
                balanced=cnt["AB"] == cnt["BA"] >= 1)


def build_bridge_cover(t: Tournament, sp: SidePartition, profile: ParameterProfile,
                       stages: list | None = None) -> BridgeCover:
    """Vertex-disjoint validated bridges covering R with as many A -> B as
    B -> A bridges (at least one each).

    Stages: offside cover of (R'_A + R'_B) - R_good; A -> B bridges through
    X' -> R_good -> Y' (covering R_good, plus surplus); extensions of the
    chain remnants; reverse-direction bridges through R'_bad; balancing.
    """
    if not sp.classified:
        raise PreconditionFailed("classify_remainder must run first")
    bd = _Builder(t, sp, profile, stages)
    _cover_offside(bd)
    _cover_good(bd)
    _extend(bd)
    _cover_bad_residual(bd)
    _balance(bd)
    cert = balance_certificate(bd.bridges)
    covered = 0
    for br in bd.bridges:
        m = mask_of(br.seq)
        if covered & m:
            raise AssertionError("bridges are not vertex-disjoint")
        covered |= m
    if sp.r & ~covered:
        raise AssertionError("bridges do not cover R")
    if not cert["balanced"]:
        raise AssertionError(f"unbalanced cover {cert}")
    cert["covered"] = popcount(covered)
    return BridgeCover(bd.bridges, cert, bd.ledger)


# -- assembly -------------------------------------------------------------------------------


def cyclic_bridge_order(bridges: Sequence[Bridge]) -> list:
    """C_A, v_1, v_{l+1}, v_2, ..., v_{l-1}, v_{2l-1}, v_l, C_B, u_1..u_{l_B},
    v_{2l}, w_1..w_{l_A}; the chains appear as the strings "CA" and "CB"."""
    ab = [b for b in bridges if b.direction == "AB"]
    ba = [b for b in bridges if b.direction == "BA"]
    aa = [b for b in bridges if b.direction == "AA"]
    bb = [b for b in bridges if b.direction == "BB"]
    if len(ab) != len(ba) or not ab:
        raise BalanceFailed(f"{len(ab)} A->B against {len(ba)} B->A bridges", ab=len(ab), ba=len(ba))
    seq: list = ["CA"]
    for i in range(len(ab) - 1):
        seq += [ab[i], ba[i]]
    seq += [ab[-1], "CB"] + bb + [ba[-1]] + aa
    return seq


def _joins(t: Tournament, k: int, m: Sequence[int], seg: Sequence[int], nn: Sequence[int]) -> bool:
    """Is m + seg + nn a k-th power of a path, given that each part is one?"""
    if len(seg) >= k:
        return (verify_power_seq(t, list(m) + list(seg[:k]), k, PATH)
                and verify_power_seq(t, list(seg[-k:]) + list(nn), k, PATH))
    return verify_power_seq(t, list(m) + list(seg) + list(nn), k, PATH)


def _cut_path(t: Tournament, k: int, q: Sequence[int], junctions: list, cyclic: bool = False) -> list | None:
    """Cut the power path q into consecutive (possibly empty) segments, one
    per junction (m, n) in some order, each joining its m to its n. When q is
    a power cycle, every rotation is allowed."""
    L, m = len(q), len(junctions)
    qq = list(q) + list(q) if cyclic else list(q)
    M = len(qq)
    starts = [[len(qq[i:i + k]) == k and verify_power_seq(t, list(mm) + qq[i:i + k], k, PATH)
               for i in range(M + 1)] for mm, _ in junctions]
    ends = [[e >= k and verify_power_seq(t, qq[e - k:e] + list(nn), k, PATH) for e in range(M + 1)]
            for _, nn in junctions]
    end_list = [[e for e in range(M + 1) if ends[j][e]] for j in range(m)]
    full = (1 << m) - 1

    def options(j: int, pos: int, stop: int):
        mm, nn = junctions[j]
        for e in range(pos, min(pos + k, stop + 1)):
            if verify_power_seq(t, list(mm) + qq[pos:e] + list(nn), k, PATH):
                yield e
        if starts[j][pos]:
            for e in end_list[j]:
                if pos + k <= e <= stop:
                    yield e

    for r in (range(L) if cyclic else [0]):
        stop = r + L
        memo: dict = {}

        def rec(pos: int, used: int):
            if used == full:
                return [] if pos == stop else None
            key = (pos, used)
            if key not in memo:
                memo[key] = None
                for j in range(m):
                    if used >> j & 1:
                        continue
                    for e in options(j, pos, stop):
                        rest = rec(e, used | 1 << j)
                        if rest is not None:
                            memo[key] = [(j, pos, e)] + rest
                            break
                    if memo[key] is not None:
                        break
            return memo[key]

        plan = rec(r, 0)
        if plan is not None:
            segs = [None] * m
            for j, a, e in plan:
                segs[j] = qq[a:e]
            return segs
    return None


def _side_cycles(t: Tournament, rem: int, profile: ParameterProfile, tries: int):
    """Spanning power paths of T[rem], flagged when they close into a cycle."""
    k = profile.k
    size = popcount(rem)
    for attempt in range(tries):
        prof = profile.replace(rng_seed=profile.rng_seed + 104729 * attempt)
        q = find_long_power_path(t, k, prof, within=rem)
        if len(q) == size:
            yield q, size > k and verify_power_seq(t, q, k, CYCLE)
    if size >= 2 * k + 1:
        out = cut_dense_power_hamilton(t, profile.replace(pipeline_attempts=1), within=rem)
        if out.found:
            yield list(out.witness), True


def _shuffled_order(bridges: Sequence[Bridge], rng: random.Random) -> list:
    """A random cyclic order with the same side pattern as
    :func:`cyclic_bridge_order`: A -> B and B -> A bridges alternate, and each
    A -> A (B -> B) bridge sits at a random junction inside A (B)."""
    by = {d: [b for b in bridges if b.direction == d] for d in ("AB", "BA", "AA", "BB")}
    for v in by.values():
        rng.shuffle(v)
    seq: list = []
    for ab, ba in zip(by["AB"], by["BA"]):
        seq += [ab, ba]
    for kind, side in (("AA", SIDE_A), ("BB", SIDE_B)):
        for br in by[kind]:
            slots = [i + 1 for i in range(len(seq)) if seq[i].to_side == side]
            seq.insert(rng.choice(slots), br)
    return seq


def _segment_assembly(t: Tournament, sp: SidePartition, bridges: Sequence[Bridge], a_rem: int, b_rem: int,
                      profile: ParameterProfile, stages: list | None, tries: int = 4,
                      orders: int = 12) -> list[int] | None:
    """Desk assembly: the bridges in cyclic order, and a spanning power path
    of each side cut into segments that fill the junctions of that side.

    Junction i joins the last k vertices of bridge i to the first k of bridge
    i + 1 inside the side where bridge i + 1 starts. No vertex is borrowed, so
    nothing has to survive deletions; the price is that the cut points of the
    side path must match the junction ends, which is checked exactly. The
    fixed cyclic order is tried first, then random orders of the same pattern.
    """
    k = profile.k
    rng = random.Random(profile.rng_seed)
    paths = {side: list(_side_cycles(t, rem, profile, tries)) if rem else [([], False)]
             for side, rem in ((SIDE_A, a_rem), (SIDE_B, b_rem))}
    for attempt in range(orders):
        if attempt == 0:
            order = [it for it in cyclic_bridge_order(bridges) if not isinstance(it, str)]
        else:
            order = _shuffled_order(bridges, rng)
        m = len(order)
        if any(order[i].to_side != order[(i + 1) % m].from_side for i in range(m)):
            continue
        plan: dict[int, list[int]] = {}
        for side in (SIDE_A, SIDE_B):
            junctions = [i for i in range(m) if order[(i + 1) % m].from_side == side]
            ends = [(order[i].seq[-k:], order[(i + 1) % m].seq[:k]) for i in junctions]
            segs = None
            for q, cyclic in paths[side]:
                segs = _cut_path(t, k, q, ends, cyclic)
                if segs is not None:
                    break
            if segs is None:
                break
            plan.update(zip(junctions, segs))
        _stage(stages, "segments", "ok" if len(plan) == m else "failed", order=attempt,
               sizes=(popcount(a_rem), popcount(b_rem)), paths=(len(paths[SIDE_A]), len(paths[SIDE_B])))
        if len(plan) == m:
            cycle: list[int] = []
            for i, br in enumerate(order):
                cycle.extend(br.seq)
                cycle.extend(plan[i])
            return cycle
    return None


def assemble_from_bridges(t: Tournament, sp: SidePartition, bridges: Sequence[Bridge],
                          profile: ParameterProfile, stages: list | None = None) -> SearchOutcome:
    """Spanning chains of A - V(bridges) and B - V(bridges), linked to the
    bridges inside each side in the cyclic order of :func:`cyclic_bridge_order`."""
    k = profile.k
    stages = [] if stages is None else stages
    order = cyclic_bridge_order(bridges)
    vb = 0
    for br in bridges:
        vb |= mask_of(br.seq)
    a_rem, b_rem = sp.a & ~vb, sp.b & ~vb
    if vb | a_rem | b_rem != full_mask(t.n):
        raise AssertionError("bridges and the two sides do not cover the vertex set")
    try:
        ca = spanning_chain(t, profile, within=a_rem, stages=stages)
        cb = spanning_chain(t, profile, within=b_rem, stages=stages)
        f = full_mask(t.n) & ~(a_rem | b_rem)
        for c in (ca, cb):
            f |= mask_of(c.seq[:k]) | mask_of(c.seq[-k:])
        ledger = DeletionLedger(t, k, [ca.seq, cb.seq], f, profile.deletion, profile.apart_radius)
        items, unis = [], []
        for it in order:
            items.append(ca.seq if it == "CA" else cb.seq if it == "CB" else it.seq)
        for i in range(len(order)):
            nxt = order[(i + 1) % len(order)]
            side = SIDE_A if nxt == "CA" else SIDE_B if nxt == "CB" else nxt.from_side
            unis.append(a_rem if side == SIDE_A else b_rem)
        links = link_sequence(t, items, ledger, profile, closed=True, universes=unis, stages=stages)
        rest = ledger.finalize(profile.chain_order)
    except (StagedFailure, NotFound) as exc:
        stage = exc.stage if isinstance(exc, StagedFailure) else "assemble"
        _stage(stages, "assemble", "retry", stage=stage, reason=str(exc))
        cycle = _segment_assembly(t, sp, bridges, a_rem, b_rem, profile, stages) if not profile.strict_mode \
            else None
        if cycle is None:
            return SearchOutcome(STAGED, None, 0, stage, str(exc), stages)
        if sorted(cycle) != list(range(t.n)) or not verify_power_seq(t, cycle, k, CYCLE):
            raise AssertionError("segment assembly failed validation")
        _stage(stages, "assemble", "ok", bridges=len(bridges), segments=True)
        return SearchOutcome(FOUND, tuple(cycle), 0, None, "", stages)
    cycle: list[int] = []
    for i, it in enumerate(order):
        cycle.extend(rest[0] if it == "CA" else rest[1] if it == "CB" else it.seq)
        cycle.extend(links[i].internal)
    if sorted(cycle) != list(range(t.n)) or not verify_power_seq(t, cycle, k, CYCLE):
        raise AssertionError("assembled cycle failed validation")
    _stage(stages, "assemble", "ok", bridges=len(bridges), links=len(links))
    return SearchOutcome(FOUND, tuple(cycle), 0, None, "", stages)


# -- pipelines and dispatch ---------------------------------------------------------------


def sparse_cut_power_hamilton(t: Tournament, profile: ParameterProfile, cut: CutWitness | None = None,
                              covers: list | None = None) -> SearchOutcome:
    """prepare -> classify -> bridge cover -> assemble, reseeded up to
    ``profile.pipeline_attempts`` times. Emitted bridge covers are appended
    to ``covers`` when given."""
    stages: list = []
    try:
        sp = prepare_partition(t, profile, cut, stages)
        sp = classify_remainder(t, sp, profile, stages)
    except (StagedFailure, NotFound) as exc:
        stage = exc.stage if isinstance(exc, StagedFailure) else "classify"
        return SearchOutcome(STAGED, None, 0, stage, str(exc), stages)
    last = None
    for attempt in range(max(1, profile.pipeline_attempts)):
        prof = profile.replace(rng_seed=profile.rng_seed + 7919 * attempt)
        try:
            cover = build_bridge_cover(t, sp, prof, stages)
        except (StagedFailure, NotFound) as exc:
            last = exc if isinstance(exc, StagedFailure) else StagedFailure("bridge", str(exc))
            _stage(stages, "attempt", "failed", attempt=attempt, stage=last.stage, reason=str(last))
            continue
        if covers is not None:
            covers.append(cover)
        outcome = assemble_from_bridges(t, sp, cover.bridges, prof, stages)
        if outcome.found:
            return outcome
        last = StagedFailure(outcome.stage or "assemble", outcome.message)
        _stage(stages, "attempt", "failed", attempt=attempt, stage=last.stage, reason=str(last))
    return SearchOutcome(STAGED, None, 0, last.stage, str(last), stages)


def dispatch_branch(t: Tournament, profile: ParameterProfile, cut: CutWitness) -> str:
    """``sparse`` when the balanced cut is below the dispatch threshold."""
    n, k = t.n, profile.k
    if profile.strict_mode:
        return "sparse" if cut.forward_edges < n ** (2 - 1 / (1000 * k)) else "dense"
    return "sparse" if cut.density < profile.dispatch_density else "dense"


def main_power_hamilton(t: Tournament, k: int, profile: ParameterProfile | None = None,
                        branch: str = "auto", covers: list | None = None) -> SearchOutcome:
    """k-th power of a Hamilton cycle: the exact oracle for n <= 14, else the
    cut-dense or sparse-cut pipeline chosen from the balanced cut density,
    falling back to the other branch on a staged failure."""
    profile = ParameterProfile.desk(k) if profile is None else profile
    if profile.k != k:
        profile = profile.with_k(k)
    if branch not in ("auto", "dense", "sparse"):
        raise ValueError("branch must be auto, dense or sparse")
    n = t.n
    if n <= ORACLE_MAX_N:
        return search_power_hamilton(t, k, CYCLE)
    cut = balanced_cut_density(t, "exact")
    first = dispatch_branch(t, profile, cut)
    order = [first, "dense" if first == "sparse" else "sparse"] if branch == "auto" else [branch]
    stages: list = [dict(stage="dispatch", status="ok", margins=dict(
        density=float(cut.density), forward_edges=cut.forward_edges, threshold=profile.dispatch_density,
        chosen=first, order=order))]
    last = None
    for br in order:
        if br == "dense":
            out = cut_dense_power_hamilton(t, profile)
        else:
            out = sparse_cut_power_hamilton(t, profile, cut, covers)
        stages.append(dict(stage="branch", status=out.status, margins=dict(branch=br, stage=out.stage)))
        stages.extend(dict(s, branch=br) for s in out.stages)
        if out.found:
            if not verify_power_seq(t, out.witness, k, CYCLE) or sorted(out.witness) != list(range(n)):
                raise AssertionError("dispatcher received an invalid witness")
            return SearchOutcome(FOUND, out.witness, out.nodes_expanded, None, br, stages)
        last = out
    return SearchOutcome(STAGED, None, 0, last.stage, last.message, stages)
