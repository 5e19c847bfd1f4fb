"""Plain-text graph files.

Tournament format::

    tournament <n>
    u v          # one line per ordered edge u -> v, 0-based

Bipartite format::

    bipartite <|A|> <|B|>
    a b          # 0-based indices into each part

Blank lines and ``#`` comments are ignored. Writers emit edges sorted
lexicographically, so files are diffable and save -> load is the identity.
Structural problems (self-loops, both orientations, missing pairs) are
reported by the builders as InvariantViolation; malformed lines raise
ParseError with the offending line number.
"""
from __future__ import annotations

from pathlib import Path

from .core import BipartiteGraph, Tournament, build_tournament
from .errors import ParseError

TOURNAMENT = "tournament"
BIPARTITE = "bipartite"
FORMATS = (TOURNAMENT, BIPARTITE)


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def _ints(no: int, toks: list[str], count: int) -> list[int]:
    if len(toks) != count:
        raise ParseError(no, f"expected {count} integers, got {len(toks)} tokens")
    try:
        return [int(x) for x in toks]
    except ValueError:
        raise ParseError(no, f"not an integer in {' '.join(toks)!r}") from None


def parse_graph(text: str, fmt: str | None = None) -> Tournament | BipartiteGraph:
    """Parse either format; ``fmt`` (if given) must match the header."""
    it = _lines(text)
    try:
        no, head = next(it)
    except StopIteration:
        raise ParseError(1, "empty file") from None
    kind = head[0].lower()
    if kind not in FORMATS:
        raise ParseError(no, f"unknown header {head[0]!r}")
    if fmt is not None and kind != fmt:
        raise ParseError(no, f"expected a {fmt} file, found {kind}")
    if kind == TOURNAMENT:
        (n,) = _ints(no, head[1:], 1)
        edges = [tuple(_ints(no2, toks, 2)) for no2, toks in it]
        return build_tournament(n, edges)
    sa, sb = _ints(no, head[1:], 2)
    edges = [tuple(_ints(no2, toks, 2)) for no2, toks in it]
    return BipartiteGraph.from_edges(sa, sb, edges)


def format_graph(g: Tournament | BipartiteGraph) -> str:
    if isinstance(g, Tournament):
        rows = [f"{TOURNAMENT} {g.n}"] + [f"{u} {v}" for u, v in sorted(g.edges())]
    else:
        rows = [f"{BIPARTITE} {g.size_a} {g.size_b}"] + [f"{a} {b}" for a, b in g.sorted_edges()]
    return "\n".join(rows) + "\n"


def load_graph(path: str | Path, fmt: str | None = None) -> Tournament | BipartiteGraph:
    return parse_graph(Path(path).read_text(), fmt)


def save_graph(path: str | Path, g: Tournament | BipartiteGraph) -> None:
    Path(path).write_text(format_graph(g))
