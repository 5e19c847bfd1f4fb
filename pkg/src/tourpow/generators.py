"""Seeded instance generators: uniform random tournaments, relabellings and
the planted two-cluster instances used to exercise the sparse-cut pipeline."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .bits import mask_of
from .core import Tournament
from .extremal import rotational_tournament

PLANTED_TYPES = ("bad", "good", "a-like", "b-like")


def random_tournament(n: int, seed: int = 0, p: float = 0.5) -> Tournament:
    """Each pair u < v is oriented u -> v with probability p."""
    rng = random.Random(seed)
    out = [0] * n
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                out[u] |= 1 << v
            else:
                out[v] |= 1 << u
    return Tournament(out)


def relabel(t: Tournament, perm) -> Tournament:
    """Image of t under the vertex map v -> perm[v]."""
    rows = [0] * t.n
    for v in range(t.n):
        rows[perm[v]] = mask_of(perm[u] for u in range(t.n) if t.out[v] >> u & 1)
    return Tournament(rows)


def random_relabel(t: Tournament, seed: int) -> Tournament:
    perm = list(range(t.n))
    random.Random(seed).shuffle(perm)
    return relabel(t, perm)


def _near_regular_half(size: int) -> Tournament:
    """Rotational tournament on size (odd) or size + 1 vertices, one removed."""
    if size % 2:
        return rotational_tournament(size)
    return rotational_tournament(size + 1).induced(list(range(size)))


@dataclass
class PlantedInstance:
    t: Tournament
    side_a: frozenset          # cluster vertices of the low-out-degree side
    side_b: frozenset
    planted: dict              # vertex -> one of PLANTED_TYPES
    forward_edges: int         # planted A -> B edges between cluster vertices
    seed: int
    params: dict = field(default_factory=dict)

    def of_type(self, kind: str) -> frozenset:
        return frozenset(v for v, k in self.planted.items() if k == kind)


def _capped_sample(rng: random.Random, pairs: list, size: int, na: int, nb: int) -> set:
    """Indices of ``size`` random pairs with every endpoint in at most
    ceil(size / side) + 1 of them, so that no cluster vertex is pushed past a
    stripping threshold by the luck of the draw."""
    cap_a = -(-size // max(1, na)) + 1
    cap_b = -(-size // max(1, nb)) + 1
    deg: dict = {}
    chosen: set = set()
    order = list(range(len(pairs)))
    rng.shuffle(order)
    for idx in order:
        if len(chosen) == size:
            break
        a, b = pairs[idx]
        if deg.get(("a", a), 0) < cap_a and deg.get(("b", b), 0) < cap_b:
            chosen.add(idx)
            deg[("a", a)] = deg.get(("a", a), 0) + 1
            deg[("b", b)] = deg.get(("b", b), 0) + 1
    for idx in order:  # top up if the caps were too tight
        if len(chosen) == size:
            break
        chosen.add(idx)
    return chosen


def planted_two_cluster(half: int = 64, remainder: int = 12, forward: int | None = None,
                        seed: int = 0, shuffle: bool = True) -> PlantedInstance:
    """Two near-regular clusters with almost every edge B -> A.

    Start from two near-rotational halves of ``half`` vertices, orient all
    cross pairs B -> A and flip ``forward`` random cross pairs to A -> B
    (default ceil(half^{3/2}), spread so that no cluster vertex carries
    more than one above its fair share). Then ``remainder`` vertices (equal shares of
    the four types) are rewired against everything else:

    ``bad``     B -> v -> A (a dense reverse-direction vertex),
    ``good``    A -> v -> B,
    ``a-like``  3/4 of A into v, v into 1/4 of A; half of B each way,
    ``b-like``  v into 3/4 of B, 1/4 of B into v; half of A each way.

    The shares are exact: v dominates a uniformly random subset of the
    prescribed size of each cluster core.

    Pairs among remainder vertices are oriented uniformly at random.
    """
    rng = random.Random(seed)
    n = 2 * half
    if remainder > n // 2:
        raise ValueError("too many remainder vertices")
    forward = math.ceil(half ** 1.5) if forward is None else forward
    base = _near_regular_half(half)
    out = [0] * n
    for v in range(half):
        out[v] = base.out[v]
        out[v + half] = base.out[v] << half
    a_all = list(range(half))
    b_all = list(range(half, n))
    chosen = rng.sample(range(n), remainder)
    planted = {v: PLANTED_TYPES[i % 4] for i, v in enumerate(chosen)}
    a_core = [v for v in a_all if v not in planted]
    b_core = [v for v in b_all if v not in planted]
    # cross pairs: B -> A except ``forward`` random flips between cluster cores
    pairs = [(a, b) for a in a_core for b in b_core]
    flips = _capped_sample(rng, pairs, min(forward, len(pairs)), len(a_core), len(b_core))
    adj = [[False] * n for _ in range(n)]
    for u in range(n):
        for w in range(n):
            if out[u] >> w & 1:
                adj[u][w] = True
    for idx, (a, b) in enumerate(pairs):
        adj[a][b] = idx in flips
        adj[b][a] = not adj[a][b]
    for a in a_all:
        for b in b_all:
            if a in planted or b in planted:
                adj[a][b], adj[b][a] = False, True

    def orient(u, w, u_to_w):
        adj[u][w], adj[w][u] = u_to_w, not u_to_w

    share = {"bad": (0.95, 0.05), "good": (0.05, 0.95), "a-like": (0.25, 0.5), "b-like": (0.5, 0.75)}
    for v, kind in planted.items():
        # exact shares (a random subset of the prescribed size) keep every
        # planted vertex well inside its class rather than near a threshold
        for core, frac in zip((a_core, b_core), share[kind]):
            outs = set(rng.sample(core, round(frac * len(core))))
            for u in core:
                orient(v, u, u in outs)
    for i, u in enumerate(chosen):
        for w in chosen[i + 1:]:
            orient(u, w, rng.random() < 0.5)
    t = Tournament.from_matrix(adj)
    side_a, side_b = frozenset(a_core), frozenset(b_core)
    if shuffle:
        perm = list(range(n))
        rng.shuffle(perm)
        t = relabel(t, perm)
        side_a = frozenset(perm[v] for v in side_a)
        side_b = frozenset(perm[v] for v in side_b)
        planted = {perm[v]: k for v, k in planted.items()}
    return PlantedInstance(t, side_a, side_b, planted, len(flips), seed,
                           dict(half=half, remainder=remainder, forward=forward))
