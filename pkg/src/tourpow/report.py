"""Structured run reports (JSON) and sweep tables (CSV).

A report is one JSON document::

    {"command": "oracle", "input_digest": "sha256:...", "seed": 0,
     "profile": {...}, "outcome": {"status": "Found", "stage": null, ...},
     "k": 2, "kind": "cycle", "stages": [...], "witness": [...],
     "extra": {...}, "wall_millis": 12}

``witness`` is present exactly when the outcome is ``Found``, and every such
witness is re-checked against the input graph by :func:`verify_report`.
Keys are sorted and ``wall_millis`` is the only field that depends on the
clock, so identical runs give identical files up to that field.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from .core import CYCLE, PATH, Tournament, verify_power_seq
from .graphio import format_graph
from .search import FOUND

CSV_COLUMNS = ("seed", "n", "k", "branch", "outcome", "stage", "wall_millis", "margins")


def input_digest(g) -> str:
    """Digest of the canonical text form of a graph."""
    return "sha256:" + hashlib.sha256(format_graph(g).encode()).hexdigest()


def jsonable(x):
    """Recursively convert sets, tuples, Fractions and odd floats into JSON values."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(jsonable(v) for v in x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    return repr(x)


@dataclass
class Report:
    command: str
    input_digest: str
    seed: int
    profile: dict
    outcome: dict
    k: int | None = None
    kind: str | None = None
    stages: list = field(default_factory=list)
    witness: list | None = None
    extra: dict = field(default_factory=dict)
    wall_millis: int = 0

    def __post_init__(self):
        found = self.outcome.get("status") == FOUND
        if found != (self.witness is not None):
            raise ValueError("a report carries a witness exactly when the outcome is Found")

    @property
    def status(self) -> str:
        return self.outcome.get("status", "")

    def to_json(self) -> str:
        return json.dumps(jsonable(asdict(self)), sort_keys=True, indent=1) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls(**json.loads(text))

    @classmethod
    def load(cls, path: str | Path) -> "Report":
        return cls.from_json(Path(path).read_text())


def outcome_dict(outcome) -> dict:
    """The serialisable part of a SearchOutcome (witness and stages are stored apart)."""
    return dict(status=outcome.status, stage=outcome.stage, message=outcome.message,
                nodes_expanded=outcome.nodes_expanded)


def verify_report(report: Report, t: Tournament) -> tuple[bool, str]:
    """Check that ``t`` is the graph the report was computed on and that a
    Found witness is a k-th power of a Hamilton path/cycle of it."""
    if input_digest(t) != report.input_digest:
        return False, "input digest mismatch"
    if report.witness is None:
        return True, "no witness to check"
    if report.k is None or report.kind not in (PATH, CYCLE):
        return False, "report lacks k or kind"
    w = list(report.witness)
    if sorted(w) != list(range(t.n)):
        return False, "witness is not a permutation of the vertex set"
    if not verify_power_seq(t, w, report.k, report.kind):
        return False, f"witness is not a {report.k}-th power of a Hamilton {report.kind}"
    return True, "witness verified"


def write_csv(rows: list[dict], path: str | Path | None = None) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({c: r.get(c, "") for c in CSV_COLUMNS})
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def margin_summary(stages: list) -> str:
    """Compact ``stage:status`` trail plus any recorded strict-mode margins."""
    parts = []
    for s in stages:
        m = s.get("margins", {})
        tag = f"{s.get('stage')}:{s.get('status')}"
        if "cut_margin" in m:
            tag += f"(cut_margin={m['cut_margin']:.3g})"
        parts.append(tag)
    return ";".join(parts)
