"""Chains, residual covers, links and the cut-dense Hamilton-power pipeline.

The pipeline partitions the vertex set into long high-order chains, covers
the leftover vertices with short (2k+1)-vertex chains whose flanks are
borrowed from chain interiors, and joins all pieces cyclically with links
(k-blowups of a path through borrowed vertices). Every borrowed vertex is
recorded in a :class:`DeletionLedger`, which guarantees that what is left of
each chain is still a k-th power of a path.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

from .bits import full_mask, iter_bits, mask_of, popcount
from .core import CYCLE, HEAD, PATH, TAIL, Tournament, is_chain, is_head_tail, min_semidegree, verify_power_seq
from .errors import (CaseSplitFailed, CoverFailed, ExtractionStalled, LayeringCollapsed, NotFound,
                     StagedFailure, TooSmall)
from .params import ParameterProfile
from .search import FOUND, STAGED, SearchOutcome, find_long_power_path
from .structure import apartness, balanced_cut_density, delete_sparse_sets, interval_hull, transitive_sets

# -- data types -----------------------------------------------------------


@dataclass(frozen=True)
class Chain:
    """An (A, B, order)-chain: an order-th power of a path starting with an
    A-tail of ``order`` vertices and ending with a B-head of ``order`` vertices."""

    seq: tuple
    k: int
    tail_ground: int
    head_ground: int
    tail_witness: frozenset = frozenset()
    head_witness: frozenset = frozenset()

    def validate(self, t: Tournament, profile: ParameterProfile) -> bool:
        return is_chain(t, self.seq, self.tail_ground, self.head_ground, profile, order=self.k)

    def __len__(self):
        return len(self.seq)


@dataclass(frozen=True)
class Linkage:
    """A k-th power of a path from M to N; ``internal_sets`` are its blobs."""

    path: tuple
    internal_sets: tuple
    case: str = "direct"
    margins: dict = field(default_factory=dict, compare=False)

    @property
    def internal(self) -> tuple:
        return tuple(v for s in self.internal_sets for v in s)


def _stage(stages: list | None, name: str, status: str, **margins) -> None:
    if stages is not None:
        stages.append(dict(stage=name, status=status, margins=margins))


# -- bookkeeping of borrowed vertices ---------------------------------------------


class DeletionLedger:
    """Forbidden set F, ordering pi and the family of sets borrowed from chains.

    ``rule="radius"`` is the proof's bookkeeping: after a set S is used, the
    hull I_r(S, pi) joins F, so all used sets stay r-apart in pi and the
    destroying-powers lemma applies. ``rule="exact"`` admits a set iff every
    chain it touches, minus all deletions so far, still verifies as a k-th
    power; this needs far less room and is what makes desk sizes feasible.
    """

    def __init__(self, t: Tournament, k: int, chains: Sequence[Sequence[int]], forbidden: int,
                 rule: str = "exact", radius: int = 1):
        if rule not in ("radius", "exact"):
            raise ValueError("rule must be 'radius' or 'exact'")
        self.t = t
        self.k = k
        self.rule = rule
        self.radius = radius
        self.chains = [tuple(c) for c in chains]
        self.forbidden = forbidden
        self.used = 0
        self.sets: list[tuple] = []
        self.labels: list[str] = []
        self.where: dict[int, int] = {}
        for i, c in enumerate(self.chains):
            for v in c:
                if v in self.where:
                    raise ValueError(f"vertex {v} in two chains")
                self.where[v] = i
        self.ordering = tuple(v for c in self.chains for v in c if not forbidden >> v & 1)
        self.rem = [list(c) for c in self.chains]
        self.opos = {v: j for c in self.chains for j, v in enumerate(c)}

    # queries

    def available(self) -> int:
        return full_mask(self.t.n) & ~self.forbidden & ~self.used

    def _hull_mask(self, vs) -> int:
        return mask_of(interval_hull(vs, self.ordering, self.radius))

    def admissible(self, vs: Sequence[int], pending: Sequence[Sequence[int]] = ()) -> bool:
        vm = mask_of(vs)
        if vm & ~self.available():
            return False
        pend = 0
        for p in pending:
            pend |= mask_of(p)
        if vm & pend:
            return False
        if self.rule == "radius":
            for p in pending:
                if vm & self._hull_mask(p):
                    return False
            return True
        touched: dict[int, set] = {}
        for v in list(vs) + [u for p in pending for u in p]:
            i = self.where.get(v)
            if i is not None:
                touched.setdefault(i, set()).add(v)
        for i, gone in touched.items():
            if not self._still_power(i, gone):
                return False
        return True

    def _still_power(self, i: int, gone: set) -> bool:
        rem = self.rem[i]
        k = self.k
        out = self.t.out
        new = [v for v in rem if v not in gone]
        # only windows around deletion sites can break
        sites = []
        j = 0
        for v in rem:
            if v in gone:
                sites.append(j)
            else:
                j += 1
        L = len(new)
        for q in set(sites):
            lo, hi = max(0, q - k), min(L, q + k)
            for a in range(lo, q):
                row = out[new[a]]
                for b in range(q, min(hi, a + k + 1)):
                    if not row >> new[b] & 1:
                        return False
        return True

    def crowding(self, vs: Sequence[int], pending: Sequence[Sequence[int]] = ()) -> int:
        """How many borrowed vertices already sit within 2k chain positions of
        ``vs``; lower means the chain keeps more slack for later sets."""
        near = 0
        gone = set(self.sets_flat()) | {u for p in pending for u in p}
        span = 2 * self.k
        for v in vs:
            i = self.where.get(v)
            if i is None:
                continue
            c = self.chains[i]
            p = self.opos[v]
            for q in range(max(0, p - span), min(len(c), p + span + 1)):
                u = c[q]
                if u != v and (u in gone or u in vs):
                    near += 1
        return near

    def sets_flat(self) -> list[int]:
        return [v for s in self.sets for v in s]

    # updates

    def commit(self, vs: Sequence[int], label: str = "") -> None:
        if not self.admissible(vs):
            raise AssertionError(f"committing an inadmissible set {tuple(vs)}")
        vm = mask_of(vs)
        if self.rule == "radius":
            self.forbidden |= self._hull_mask(vs)
        self.used |= vm
        self.sets.append(tuple(vs))
        self.labels.append(label)
        for v in vs:
            i = self.where.get(v)
            if i is not None:
                self.rem[i].remove(v)

    def reserve(self, vs: Sequence[int] | int) -> None:
        """Mark vertices as forbidden (not borrowed from any chain)."""
        self.forbidden |= vs if isinstance(vs, int) else mask_of(vs)

    def clone(self) -> "DeletionLedger":
        other = object.__new__(DeletionLedger)
        other.__dict__.update(self.__dict__)
        other.sets = list(self.sets)
        other.labels = list(self.labels)
        other.rem = [list(r) for r in self.rem]
        return other

    def remaining(self, i: int) -> list[int]:
        return list(self.rem[i])

    def finalize(self, order: int) -> list[list[int]]:
        """Chains minus all borrowed vertices, each asserted to be a k-th power.

        In radius mode the family is also checked to be apart in pi and the
        destroying-powers lemma is applied chain by chain.
        """
        out = []
        for i, c in enumerate(self.chains):
            if self.rule == "radius" and order > self.k:
                pieces = [s for s in self.sets if any(v in self.where and self.where[v] == i for v in s)]
                r2 = max((len(s) for s in pieces), default=0)
                if pieces and r2 < order and apartness(pieces, c, order):
                    rest = delete_sparse_sets(self.t, c, pieces, order, r2)
                    assert rest == self.rem[i]
            if not verify_power_seq(self.t, self.rem[i], self.k):
                raise AssertionError(f"chain {i} is no longer a {self.k}-th power")
            out.append(list(self.rem[i]))
        return out


# -- partitioning into chains ----------------------------------------------------


def _trim_to_chain(t: Tournament, path: Sequence[int], a: int, b: int, profile: ParameterProfile,
                   order: int) -> Chain | None:
    """Shortest trimming of both ends so that the path opens with an a-tail and
    closes with a b-head of ``order`` vertices."""
    L = len(path)
    start = None
    for i in range(0, L - 2 * order + 1):
        ok, wit = is_head_tail(t, path[i:i + order], a, TAIL, profile, size=order)
        if ok:
            start, tw = i, wit
            break
    if start is None:
        return None
    for j in range(L, start + 2 * order - 1, -1):
        ok, wit = is_head_tail(t, path[j - order:j], b, HEAD, profile, size=order)
        if ok:
            return Chain(tuple(path[start:j]), order, a, b, tw, wit)
    return None


def partition_into_chains(t: Tournament, s: Sequence[int] | int, a: Sequence[int] | int,
                          b: Sequence[int] | int, profile: ParameterProfile, order: int | None = None,
                          stages: list | None = None) -> tuple[list[Chain], frozenset]:
    """Vertex-disjoint (a, b, order)-chains inside s plus a residual of size <= cap.

    Repeatedly extract a long order-th power of a path from the uncovered part
    of s and trim its ends to a tail and a head; stop once at most
    ``chain_residual_cap`` vertices remain (strict mode), or until no further
    chain can be extracted (desk mode).
    """
    order = profile.chain_order if order is None else order
    smask = s if isinstance(s, int) else mask_of(s)
    amask = a if isinstance(a, int) else mask_of(a)
    bmask = b if isinstance(b, int) else mask_of(b)
    cap = profile.chain_residual_cap
    chains: list[Chain] = []
    remaining = smask
    while popcount(remaining) >= 2 * order:
        if popcount(remaining) <= cap and profile.strict_mode:
            break
        path = find_long_power_path(t, order, profile, within=remaining, floor=1)
        chain = _trim_to_chain(t, path, amask, bmask, profile, order) if len(path) >= 2 * order else None
        if chain is None and popcount(remaining) <= cap:
            # below the cap the lemma may stop; desk runs keep extracting while
            # chains exist since every residual vertex later costs a cover
            break
        if chain is None:
            _stage(stages, "partition", "stalled", chains=len(chains), residual=popcount(remaining), cap=cap)
            raise ExtractionStalled(f"no chain extractable from {popcount(remaining)} vertices",
                                    chains=len(chains), residual=popcount(remaining))
        assert chain.validate(t, profile)
        chains.append(chain)
        remaining &= ~mask_of(chain.seq)
    _stage(stages, "partition", "ok", chains=len(chains), residual=popcount(remaining), cap=cap,
           lengths=[len(c) for c in chains])
    return chains, frozenset(iter_bits(remaining))


# -- covering the residual ----------------------------------------------------------


def cover_vertex(t: Tournament, w: int, ledger: DeletionLedger, ground: int, profile: ParameterProfile,
                 max_tails: int = 200, max_heads: int = 40, candidates: int = 24) -> tuple[int, ...]:
    """A k-chain X, w, Y with X a ground-tail in N^-(w), Y a ground-head in
    N^+(w) inside the common out-neighbourhood of X, all borrowed admissibly."""
    k = profile.k
    avail = ledger.available() & ground
    aw = t.inn[w] & avail
    bw = t.out[w] & avail
    if popcount(aw) < k:
        raise CoverFailed(w, "no-tail-side")
    if popcount(bw) < k:
        raise CoverFailed(w, "no-head-side")
    gsize = popcount(ground)
    thr = profile.head_tail_threshold(gsize, k)
    out, inn = t.out, t.inn

    def tail_prune(m: int, size: int) -> bool:
        return popcount(t.common_in(m, ground)) < thr or popcount(t.common_out(m, bw)) < k

    def head_prune(m: int, size: int) -> bool:
        return popcount(t.common_out(m, ground)) < thr

    score = {v: -popcount(out[v] & bw) for v in iter_bits(aw)}
    found_tail = False
    best = None
    seen = 0
    for x in transitive_sets(t, aw, k, key=score.__getitem__, prune=tail_prune, limit=max_tails):
        if not ledger.admissible(x):
            continue
        found_tail = True
        by = t.common_out(mask_of(x), bw) & ~mask_of(x)
        hs = {v: -popcount(out[v] & ground) for v in iter_bits(by)}
        for y in transitive_sets(t, by, k, key=hs.__getitem__, prune=head_prune, limit=max_heads):
            xy = list(x) + list(y)
            if not ledger.admissible(xy):
                continue
            crowd = ledger.crowding(xy)
            if best is None or crowd < best[0]:
                best = (crowd, tuple(x) + (w,) + tuple(y))
            seen += 1
            break
        if best is not None and (best[0] == 0 or seen >= candidates):
            break
    if best is None:
        raise CoverFailed(w, "no-head" if found_tail else "no-tail")
    seq = best[1]
    if not verify_power_seq(t, seq, k):
        raise CoverFailed(w, "validation", f"cover of {w} fails the power check")
    return seq


def cover_residual(t: Tournament, chains: Sequence[Chain], residual: Sequence[int] | frozenset,
                   profile: ParameterProfile, ledger: DeletionLedger | None = None, ground: int | None = None,
                   stages: list | None = None) -> tuple[list[Chain], int]:
    """Cover each residual vertex with a (2k+1)-vertex k-chain.

    Returns the cover chains and the updated forbidden mask. If no ledger is
    given one is built from ``chains`` with F = residual plus the first and
    last k vertices of every chain.
    """
    k = profile.k
    ground = full_mask(t.n) if ground is None else ground
    if ledger is None:
        f = mask_of(residual)
        for c in chains:
            f |= mask_of(c.seq[:k]) | mask_of(c.seq[-k:])
        ledger = DeletionLedger(t, k, [c.seq for c in chains], f, profile.deletion, profile.apart_radius)
    covers = []
    for w in sorted(residual):
        seq = cover_vertex(t, w, ledger, ground, profile)
        ledger.commit(seq[:k] + seq[k + 1:], f"cover {w}")
        ok_t, tw = is_head_tail(t, seq[:k], ground, TAIL, profile)
        ok_h, hw = is_head_tail(t, seq[-k:], ground, HEAD, profile)
        assert ok_t and ok_h
        covers.append(Chain(seq, k, ground, ground, tw, hw))
    _stage(stages, "cover", "ok", covered=len(covers))
    return covers, ledger.forbidden | ledger.used


# -- linking ---------------------------------------------------------------------------


class _Stop(Exception):
    pass


def _blob_chain(t: Tournament, k: int, mseq: Sequence[int], layers: Sequence[int], nseq: Sequence[int],
                ledger: DeletionLedger, node_cap: int, beam: int, enum_cap: int) -> list[tuple] | None:
    """Transitive k-sets B_1, ..., B_m with B_j inside layers[j] and
    M => B_1 => ... => B_m => N (=> meaning complete domination)."""
    if not layers:
        return [] if t.common_out(mask_of(mseq)) & mask_of(nseq) == mask_of(nseq) else None
    n_in = t.common_in(mask_of(nseq))
    base = ledger.available() & ~mask_of(mseq) & ~mask_of(nseq)
    last = len(layers) - 1
    blobs: list[tuple] = []
    nodes = [0]

    def pool(j: int, prev_mask: int, taken: int) -> int:
        p = layers[j] & t.common_out(prev_mask) & base & ~taken
        return p & n_in if j == last else p

    def rec(prev_mask: int, j: int, taken: int) -> bool:
        cand = pool(j, prev_mask, taken)
        if popcount(cand) < k:
            return False
        nxt_layer = layers[j + 1] if j < last else 0
        key = {v: -popcount(t.out[v] & nxt_layer) for v in iter_bits(cand)} if j < last else None
        options = []
        for blob in transitive_sets(t, cand, k, key=None if key is None else key.__getitem__, limit=enum_cap):
            bm = mask_of(blob)
            if j < last:
                sc = popcount(pool(j + 1, bm, taken | bm))
                if sc < k:
                    continue
            else:
                sc = 0
            if not ledger.admissible(blob, blobs):
                continue
            # enough room downstream first, then the least crowded chain positions
            options.append((-min(sc, 3 * k), ledger.crowding(blob, blobs), -sc, blob))
        options.sort()
        tried = 0
        for *_, blob in options:
            nodes[0] += 1
            if nodes[0] > node_cap:
                raise _Stop
            blobs.append(blob)
            if j == last or rec(mask_of(blob), j + 1, taken | mask_of(blob)):
                return True
            blobs.pop()
            tried += 1
            if tried >= beam:
                break
        return False

    try:
        ok = rec(mask_of(mseq), 0, 0)
    except _Stop:
        return None
    return list(blobs) if ok else None


def _layers(t: Tournament, start: int, pool: int, forward: bool, c: float, target: float,
            max_layers: int) -> tuple[list[int], list[dict]]:
    """Reachability layers M_1, M_2, ...: M_1 = start, M_i = vertices outside
    M^{i-1} with at least c|M^{i-1}| in-neighbours (out-neighbours when
    ``forward`` is False) in M^{i-1}. Stops at the first i with
    |M^i| >= target."""
    rows = t.inn if forward else t.out
    layers = [start]
    union = start
    margins = []
    n_total = popcount(pool)
    while popcount(union) < target and len(layers) < max_layers:
        usz = popcount(union)
        need = max(1.0, c * usz)
        nxt = 0
        for x in iter_bits(pool & ~union):
            if popcount(rows[x] & union) >= need:
                nxt |= 1 << x
        margins.append(dict(layer=len(layers) + 1, size=popcount(nxt),
                            bound=n_total * (0.25 - 2 * c) - usz / 2))
        if not nxt:
            break
        layers.append(nxt)
        union |= nxt
    return layers, margins


def link(t: Tournament, m: Sequence[int], nset: Sequence[int], ordering: Sequence[int] | None = None,
         forbidden: int = 0, profile: ParameterProfile | None = None, *, ledger: DeletionLedger | None = None,
         universe: int | None = None, node_cap: int = 1500, beam: int = 6, enum_cap: int = 300) -> Linkage:
    """A k-th power of a path from the k-set M to the k-set N through a
    blowup of transitive k-sets, borrowing only admissible vertices.

    Order of attempts: direct (M => N), then the layered construction, Case 1
    pairs (large layer intersections, smallest i1 + i2 first; i1 = i2 = 1 is
    the single-blob fast path) and then Case 2 pairs (densest K_{i1} -> L_{i2}).
    Used blobs are committed to the ledger.
    """
    if profile is None:
        raise ValueError("profile required")
    k = profile.k
    m = tuple(m)
    nset = tuple(nset)
    if len(m) != k or len(nset) != k:
        raise ValueError("link endpoints must have exactly k vertices")
    if ledger is None:
        ordering = tuple(ordering) if ordering is not None else ()
        ledger = DeletionLedger(t, k, [], forbidden | mask_of(m) | mask_of(nset), "radius",
                                profile.apart_radius)
        ledger.ordering = tuple(v for v in ordering if not ledger.forbidden >> v & 1)
    universe = full_mask(t.n) if universe is None else universe
    mm, nm = mask_of(m), mask_of(nset)
    margins: dict = {}

    def finish(blobs: list[tuple], case: str) -> Linkage:
        path = m + tuple(v for b in blobs for v in b) + nset
        if not verify_power_seq(t, path, k):
            raise AssertionError("link produced an invalid power")
        for i, b in enumerate(blobs):
            ledger.commit(b, f"link blob {i}")
        return Linkage(path, tuple(blobs), case, margins)

    if t.common_out(mm) & nm == nm:
        return finish([], "direct")
    pool = ledger.available() & universe & ~mm & ~nm
    n_prime = popcount(pool) + 2 * k
    delta = profile.delta
    c = delta / 100
    target = n_prime * (0.5 - delta / 8)
    m1 = t.common_out(mm) & pool
    n1 = t.common_in(nm) & pool
    margins["M1"] = popcount(m1)
    margins["N1"] = popcount(n1)
    margins["link_threshold"] = profile.link_threshold(n_prime)
    if not m1 or not n1:
        raise LayeringCollapsed("an endpoint has no usable common neighbourhood", **margins)
    ms, mmarg = _layers(t, m1, pool, True, c, target, profile.link_max_layers)
    ns, nmarg = _layers(t, n1, pool, False, c, target, profile.link_max_layers)
    margins["M_layers"] = [popcount(x) for x in ms]
    margins["N_layers"] = [popcount(x) for x in ns]
    margins["growth"] = mmarg + nmarg
    if profile.strict_mode and any(g["size"] < g["bound"] for g in mmarg + nmarg):
        raise LayeringCollapsed("layer growth below the double-counting bound", **margins)

    def unions(ls: list[int]) -> list[int]:
        acc, res = 0, []
        for x in ls:
            acc |= x
            res.append(acc)
        return res

    mu, nu = unions(ms), unions(ns)
    case1_min = max(k, round(n_prime ** 0.25)) if profile.strict_mode else k
    case1 = []
    for i1 in range(1, len(ms) + 1):
        for i2 in range(1, len(ns) + 1):
            sz = popcount(ms[i1 - 1] & ns[i2 - 1])
            if sz >= case1_min:
                case1.append((i1 + i2, i1, i2))
    case1.sort()
    last_case = "case1"
    for _, i1, i2 in case1[:9]:
        s = ms[i1 - 1] & ns[i2 - 1]
        ks = [ms[i - 1] & ~nu[i2 - 1] for i in range(1, i1)]
        ls = [ns[i - 1] & ~mu[i1 - 1] for i in range(1, i2)]
        layers = ks + [s] + ls[::-1]
        blobs = _blob_chain(t, k, m, layers, nset, ledger, node_cap, beam, enum_cap)
        if blobs is not None:
            margins["pair"] = (i1, i2)
            return finish(blobs, "case1")
    # Case 2: densest pair of disjointified layers
    kl = [x & ~nu[-1] for x in ms]
    ll = [x & ~mu[-1] for x in ns]
    dense = []
    for i1, kx in enumerate(kl, 1):
        for i2, ly in enumerate(ll, 1):
            if popcount(kx) and popcount(ly):
                dens = t.forward_edges(kx, ly) / (popcount(kx) * popcount(ly))
                if dens > 0:
                    dense.append((-dens, i1 + i2, i1, i2))
    dense.sort()
    if dense:
        last_case = "case2"
    for negd, _, i1, i2 in dense[:6]:
        layers = kl[:i1] + ll[:i2][::-1]
        blobs = _blob_chain(t, k, m, layers, nset, ledger, node_cap, beam, enum_cap)
        if blobs is not None:
            margins["pair"] = (i1, i2)
            margins["pair_density"] = -negd
            return finish(blobs, "case2")
    raise CaseSplitFailed(last_case, "blob-chain", f"no admissible blob chain ({len(case1)} case-1 pairs, "
                          f"{len(dense)} case-2 pairs)")


# -- assembling cyclic / linear structures -------------------------------------------


def link_sequence(t: Tournament, items: Sequence[Sequence[int]], ledger: DeletionLedger,
                  profile: ParameterProfile, closed: bool, universes: Sequence[int] | None = None,
                  stages: list | None = None, rounds: int = 4) -> list[Linkage]:
    """Link the last k of items[i] to the first k of items[i+1] (cyclically if closed).

    Links compete for the same borrowed vertices, so they are built in order
    of increasing room (size of the single-blob pool) rather than index order;
    if one fails, the whole stage restarts from a copy of the ledger with the
    failing junction moved to the front. Returns links in index order and
    leaves ``ledger`` holding the committed state.
    """
    k = profile.k
    count = len(items) if closed else len(items) - 1
    ends = [(tuple(items[i][-k:]), tuple(items[(i + 1) % len(items)][:k])) for i in range(count)]

    def room(i: int) -> int:
        m, nn = ends[i]
        uni = full_mask(t.n) if universes is None else universes[i]
        if t.common_out(mask_of(m)) & mask_of(nn) == mask_of(nn):
            return 10 ** 9
        return popcount(t.common_out(mask_of(m)) & t.common_in(mask_of(nn)) & ledger.available() & uni)

    order = sorted(range(count), key=lambda i: (room(i), i))
    last_exc: StagedFailure | None = None
    for rnd in range(max(1, rounds)):
        trial = ledger.clone()
        links: dict[int, Linkage] = {}
        failed = None
        for i in order:
            uni = None if universes is None else universes[i]
            try:
                links[i] = link(t, ends[i][0], ends[i][1], profile=profile, ledger=trial, universe=uni)
            except StagedFailure as exc:
                failed, last_exc = i, exc
                break
        if failed is None:
            ledger.__dict__.update(trial.__dict__)
            result = [links[i] for i in range(count)]
            cases: dict[str, int] = {}
            for lk in result:
                cases[lk.case] = cases.get(lk.case, 0) + 1
            _stage(stages, "link", "ok", links=count, cases=cases, rounds=rnd + 1,
                   blobs=sum(len(l.internal_sets) for l in result))
            return result
        _stage(stages, "link", "retry", index=failed, of=count, round=rnd, reason=str(last_exc))
        order.remove(failed)
        order.insert(0, failed)
    _stage(stages, "link", "failed", of=count, reason=str(last_exc))
    raise last_exc


def _prepare(t: Tournament, profile: ParameterProfile, within: int, stages: list):
    k = profile.k
    chains, residual = partition_into_chains(t, within, within, within, profile, stages=stages)
    f = mask_of(residual) | (full_mask(t.n) & ~within)
    for c in chains:
        f |= mask_of(c.seq[:k]) | mask_of(c.seq[-k:])
    ledger = DeletionLedger(t, k, [c.seq for c in chains], f, profile.deletion, profile.apart_radius)
    covers, _ = cover_residual(t, chains, residual, profile, ledger, ground=within, stages=stages)
    return chains, covers, ledger


def _splice(chains_left: list[list[int]], covers: list[Chain], links: list[Linkage], k: int) -> list[int]:
    pieces = chains_left + [list(c.seq) for c in covers]
    seq: list[int] = []
    for i, p in enumerate(pieces):
        seq.extend(p)
        if i < len(links):
            seq.extend(links[i].internal)
    return seq


def _whole_path(t: Tournament, profile: ParameterProfile, within: int) -> list[int] | None:
    """A single power path through all of ``within`` with a tail and a head,
    tried at chain order first (it leaves more room for later borrowing)."""
    k = profile.k
    size = popcount(within)
    for order in dict.fromkeys((profile.chain_order, k)):
        path = find_long_power_path(t, order, profile, within=within)
        if len(path) < size:
            continue
        if (is_head_tail(t, path[:k], within, TAIL, profile)[0]
                and is_head_tail(t, path[-k:], within, HEAD, profile)[0]):
            return list(path)
    return None


def spanning_chain(t: Tournament, profile: ParameterProfile, within: int | None = None,
                   stages: list | None = None) -> Chain:
    """A spanning k-chain of T[within]: the cut-dense pipeline without the
    closing link."""
    k = profile.k
    within = full_mask(t.n) if within is None else within
    n = popcount(within)
    if n < 2 * k:
        raise TooSmall(f"need at least {2 * k} vertices, got {n}")
    stages = [] if stages is None else stages
    seq = _whole_path(t, profile, within)
    if seq is not None:
        _stage(stages, "partition", "ok", chains=1, residual=0, whole=True)
    else:
        chains, covers, ledger = _prepare(t, profile, within, stages)
        items = [c.seq for c in chains] + [c.seq for c in covers]
        links = link_sequence(t, items, ledger, profile, closed=False, stages=stages)
        seq = _splice(ledger.finalize(profile.chain_order), covers, links, k)
    if sorted(seq) != sorted(iter_bits(within)):
        raise AssertionError("spanning chain does not cover the vertex set exactly once")
    ok_t, tw = is_head_tail(t, seq[:k], within, TAIL, profile)
    ok_h, hw = is_head_tail(t, seq[-k:], within, HEAD, profile)
    chain = Chain(tuple(seq), k, within, within, tw, hw)
    if not chain.validate(t, profile):
        raise AssertionError("spanning chain failed validation")
    return chain


def cut_dense_power_hamilton(t: Tournament, profile: ParameterProfile, within: int | None = None
                             ) -> SearchOutcome:
    """k-th power of a Hamilton cycle of T[within] via chains, covers and links.

    Precondition (checked): min semidegree >= n/4 - delta n/200. The balanced
    cut density is recorded against delta. Each failed attempt is retried
    with a new seed up to ``profile.pipeline_attempts`` times; failures are
    reported as staged outcomes, never as invalid witnesses.
    """
    k = profile.k
    within = full_mask(t.n) if within is None else within
    n = popcount(within)
    stages: list = []
    t0 = time.monotonic()
    verts = list(iter_bits(within))
    sub = t.induced(verts) if within != full_mask(t.n) else t
    semi = min_semidegree(sub)
    need = n / 4 - profile.delta * n / 200
    cut = balanced_cut_density(sub, "exact").density if n >= 2 else 1
    _stage(stages, "precondition", "ok" if semi >= need else "failed", semidegree=semi, required=need,
           balanced_density=float(cut), delta=profile.delta, cut_margin=float(cut) - profile.delta)
    if semi < need:
        return SearchOutcome(STAGED, None, 0, "precondition",
                             f"min semidegree {semi} < n/4 - delta n/200 = {need:.2f}", stages)
    if n < k + 1:
        return SearchOutcome(STAGED, None, 0, "precondition", f"n = {n} too small for a cycle power", stages)
    last: StagedFailure | None = None
    for attempt in range(max(1, profile.pipeline_attempts)):
        prof = profile.replace(rng_seed=profile.rng_seed + 7919 * attempt)
        try:
            chains, covers, ledger = _prepare(t, prof, within, stages)
            items = [c.seq for c in chains] + [c.seq for c in covers]
            links = link_sequence(t, items, ledger, prof, closed=True, stages=stages)
            cycle = _splice(ledger.finalize(prof.chain_order), covers, links, k)
        except (StagedFailure, NotFound) as exc:
            last = exc if isinstance(exc, StagedFailure) else StagedFailure("cover", str(exc))
            _stage(stages, "attempt", "failed", attempt=attempt, stage=last.stage, reason=str(last))
            continue
        if sorted(cycle) != verts or not verify_power_seq(t, cycle, k, CYCLE):
            raise AssertionError("assembled cycle failed validation")
        _stage(stages, "assemble", "ok", attempt=attempt, millis=int(1000 * (time.monotonic() - t0)))
        return SearchOutcome(FOUND, tuple(cycle), 0, None, "", stages)
    return SearchOutcome(STAGED, None, 0, last.stage, str(last), stages)
