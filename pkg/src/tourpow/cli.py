"""Command-line harness: generate, analyze, oracle, pipeline, construct-verify,
batch and verify-report.

Exit codes: 0 found / verified, 2 sound refutation (exhaustive search found
nothing), 3 staged failure (or a failed verification), 4 budget exceeded,
1 usage error. Every command that computes something writes a JSON report
(``--out``; default stdout); ``batch`` writes a CSV table plus optional
per-run reports.

Budget caps can also come from the environment (``TOURPOW_BUDGET_NODES``,
``TOURPOW_BUDGET_MS``); all mathematical parameters are explicit flags.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .bridges import main_power_hamilton, sparse_cut_power_hamilton
from .chains import cut_dense_power_hamilton
from .core import CYCLE, PATH, Tournament, min_semidegree, regularity_defect
from .errors import TourpowError
from .extremal import (build_cube_free_tournament, build_krr_free_tournament, incidence_graph_pg,
                       paley_tournament, perfect_matching_graph, rotational_tournament, verify_construction)
from .generators import planted_two_cluster, random_relabel, random_tournament
from .graphio import BIPARTITE, TOURNAMENT, format_graph, load_graph
from .params import ParameterProfile
from .report import Report, input_digest, jsonable, margin_summary, outcome_dict, verify_report, write_csv
from .search import BUDGET, EXHAUSTED, FOUND, STAGED, SearchBudget, is_strongly_connected, \
    search_power_hamilton, transitive_fraction
from .structure import balanced_cut_density

EXIT_OK, EXIT_USAGE, EXIT_REFUTED, EXIT_STAGED, EXIT_BUDGET = 0, 1, 2, 3, 4
STATUS_EXIT = {FOUND: EXIT_OK, EXHAUSTED: EXIT_REFUTED, STAGED: EXIT_STAGED, BUDGET: EXIT_BUDGET}
# worst first: how a sweep's exit code summarises its runs
SEVERITY = (EXIT_USAGE, EXIT_BUDGET, EXIT_STAGED, EXIT_REFUTED, EXIT_OK)
FAMILIES = ("rotational", "paley", "random", "two-cluster", "krr-free", "cube-free")
PIPELINES = ("cut-dense", "sparse", "main")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- shared helpers -------------------------------------------------------------


def _budget(args) -> SearchBudget:
    nodes = args.budget_nodes if args.budget_nodes is not None else int(os.environ.get("TOURPOW_BUDGET_NODES", 0))
    ms = args.budget_ms if args.budget_ms is not None else int(os.environ.get("TOURPOW_BUDGET_MS", 0))
    return SearchBudget(max_nodes=nodes, max_millis=ms)


def _profile(args, k: int) -> ParameterProfile:
    if args.profile:
        prof = ParameterProfile.from_dict(json.loads(Path(args.profile).read_text()))
        prof = prof if prof.k == k else prof.with_k(k)
        return prof.replace(rng_seed=args.seed)
    if args.mode == "strict":
        return ParameterProfile.strict(k, delta=args.delta, rng_seed=args.seed)
    return ParameterProfile.desk(k, delta=args.delta, rng_seed=args.seed)


def _emit(report: Report, out: str | None) -> None:
    if out:
        report.save(out)
    else:
        sys.stdout.write(report.to_json())


def _load_tournament(path: str) -> Tournament:
    return load_graph(path, TOURNAMENT)


def generate_instance(family: str, n: int | None, seed: int, k: int, q: int | None = None,
                      t: int | None = None, d: int = 1, graph: str | None = None,
                      remainder: int = 12) -> tuple[Tournament, dict]:
    """A tournament of the named family plus a JSON-able description."""
    meta: dict = dict(family=family, seed=seed)
    if family == "rotational":
        tour = rotational_tournament(_need(n, "--n"))
        tour = random_relabel(tour, seed) if seed else tour
    elif family == "paley":
        tour = paley_tournament(_need(n, "--n"))
        tour = random_relabel(tour, seed) if seed else tour
    elif family == "random":
        tour = random_tournament(_need(n, "--n"), seed)
    elif family == "two-cluster":
        inst = planted_two_cluster(half=_need(n, "--n") // 2, remainder=remainder, seed=seed)
        tour = inst.t
        meta.update(planted={str(v): kind for v, kind in sorted(inst.planted.items())},
                    side_a=sorted(inst.side_a), side_b=sorted(inst.side_b), forward=inst.forward_edges)
    elif family in ("krr-free", "cube-free"):
        if graph:
            g = load_graph(graph, BIPARTITE)
        elif family == "krr-free":
            g = incidence_graph_pg(q if q is not None else 2)
        else:
            g = perfect_matching_graph(t if t is not None else 5)
        tour, cert = build_krr_free_tournament(g, k) if family == "krr-free" else build_cube_free_tournament(g, d)
        meta.update(certificate=dict(kind=cert.kind, param=cert.param, semidegree=cert.semidegree,
                                     t=cert.t, special=cert.special, notes=list(cert.notes)))
        meta["_cert"] = cert
    else:
        raise UsageError(f"unknown family {family!r}")
    return tour, meta


def _need(val, flag):
    if val is None:
        raise UsageError(f"{flag} is required for this family")
    return val


def run_pipeline(tour: Tournament, which: str, profile: ParameterProfile):
    if which == "cut-dense":
        return cut_dense_power_hamilton(tour, profile), "cut-dense"
    if which == "sparse":
        return sparse_cut_power_hamilton(tour, profile), "sparse"
    out = main_power_hamilton(tour, profile.k, profile)
    return out, (out.message if out.found else "main")


# -- subcommands --------------------------------------------------------------------


def cmd_generate(args) -> int:
    tour, meta = generate_instance(args.family, args.n, args.seed, args.k, args.q, args.t, args.d,
                                   args.graph, args.remainder)
    text = format_graph(tour)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.meta:
        meta.pop("_cert", None)
        meta["input_digest"] = input_digest(tour)
        Path(args.meta).write_text(json.dumps(jsonable(meta), sort_keys=True, indent=1) + "\n")
    return EXIT_OK


def cmd_analyze(args) -> int:
    t0 = time.monotonic()
    tour = _load_tournament(args.graph)
    prof = _profile(args, args.k)
    info: dict = dict(n=tour.n, min_semidegree=min_semidegree(tour), regularity_defect=regularity_defect(tour),
                      strongly_connected=is_strongly_connected(tour))
    if tour.n >= 2:
        mode = "exact" if tour.n <= prof.exact_cut_cap else "heuristic"
        info["balanced_cut"] = balanced_cut_density(tour, mode, seed=args.seed).as_dict()
    if tour.n >= args.k:
        try:
            tf = transitive_fraction(tour, args.k)
        except TourpowError:
            tf = transitive_fraction(tour, args.k, "sample", seed=args.seed)
        info["transitive_fraction"] = dict(value=str(tf.value), float=float(tf.value), exact=tf.exact,
                                           interval=tf.interval, samples=tf.samples)
    rep = Report("analyze", input_digest(tour), args.seed, prof.to_dict(), dict(status="Analyzed"),
                 k=args.k, extra=info, wall_millis=int(1000 * (time.monotonic() - t0)))
    _emit(rep, args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    t0 = time.monotonic()
    tour = _load_tournament(args.graph)
    out = search_power_hamilton(tour, args.k, args.kind, _budget(args))
    rep = Report("oracle", input_digest(tour), args.seed, _profile(args, args.k).to_dict(), outcome_dict(out),
                 k=args.k, kind=args.kind, stages=out.stages,
                 witness=list(out.witness) if out.found else None,
                 extra=dict(budget=dict(max_nodes=_budget(args).max_nodes, max_millis=_budget(args).max_millis)),
                 wall_millis=int(1000 * (time.monotonic() - t0)))
    _emit(rep, args.out)
    return STATUS_EXIT[out.status]


def cmd_pipeline(args) -> int:
    t0 = time.monotonic()
    tour = _load_tournament(args.graph)
    prof = _profile(args, args.k)
    out, branch = run_pipeline(tour, args.which, prof)
    rep = Report("pipeline " + args.which, input_digest(tour), args.seed, prof.to_dict(), outcome_dict(out),
                 k=args.k, kind=CYCLE, stages=out.stages, witness=list(out.witness) if out.found else None,
                 extra=dict(branch=branch), wall_millis=int(1000 * (time.monotonic() - t0)))
    _emit(rep, args.out)
    return STATUS_EXIT[out.status]


def cmd_construct_verify(args) -> int:
    t0 = time.monotonic()
    tour, meta = generate_instance(args.family, None, args.seed, args.k, args.q, args.t, args.d, args.graph)
    cert = meta.pop("_cert")
    verdict = verify_construction(tour, cert)
    extra = dict(meta, checks=verdict.checks, failures=verdict.failures(), witnesses=verdict.witnesses,
                 min_semidegree=min_semidegree(tour))
    outcome = dict(status="VerdictPass" if verdict.passed else "VerdictFail")
    code = EXIT_OK if verdict.passed else EXIT_STAGED
    stages: list = []
    if verdict.passed and args.oracle:
        order = args.k if args.family == "krr-free" else 3
        res = search_power_hamilton(tour, order, CYCLE, _budget(args))
        stages.append(dict(stage="oracle", status=res.status, margins=dict(k=order, nodes=res.nodes_expanded)))
        extra["oracle"] = dict(k=order, status=res.status, nodes_expanded=res.nodes_expanded)
        outcome["oracle"] = res.status
        # a validated construction with no power of a Hamilton cycle is a refutation
        code = {EXHAUSTED: EXIT_REFUTED, BUDGET: EXIT_BUDGET, FOUND: EXIT_STAGED}[res.status]
    rep = Report("construct-verify " + args.family, input_digest(tour), args.seed,
                 _profile(args, args.k).to_dict(), outcome, k=args.k, stages=stages, extra=extra,
                 wall_millis=int(1000 * (time.monotonic() - t0)))
    _emit(rep, args.out)
    return code


def _batch_one(job: dict) -> dict:
    """One sweep run; never raises (errors become rows)."""
    args = argparse.Namespace(**job)
    t0 = time.monotonic()
    row = dict(seed=args.seed, n=args.n, k=args.k, branch="", outcome="", stage="", wall_millis=0, margins="")
    try:
        tour, _ = generate_instance(args.family, args.n, args.seed, args.k, remainder=args.remainder)
        prof = _profile(args, args.k)
        if args.command == "oracle":
            out, branch = search_power_hamilton(tour, args.k, CYCLE, _budget(args)), "oracle"
        else:
            out, branch = run_pipeline(tour, args.command, prof)
        row.update(n=tour.n, branch=branch, outcome=out.status, stage=out.stage or "",
                   margins=margin_summary(out.stages))
        code = STATUS_EXIT[out.status]
        if args.reports:
            rep = Report(f"batch {args.command}", input_digest(tour), args.seed, prof.to_dict(), outcome_dict(out),
                         k=args.k, kind=CYCLE, stages=out.stages, witness=list(out.witness) if out.found else None,
                         extra=dict(family=args.family, branch=branch),
                         wall_millis=int(1000 * (time.monotonic() - t0)))
            rep.save(Path(args.reports) / f"run_{args.seed}.json")
    except (TourpowError, ValueError) as exc:
        row.update(outcome="Error", stage=type(exc).__name__, margins=str(exc))
        code = EXIT_USAGE
    row["wall_millis"] = int(1000 * (time.monotonic() - t0))
    row["_code"] = code
    return row


def parse_seeds(text: str) -> list[int]:
    """``"a:b"`` (half-open range), ``"1,5,9"``, or empty."""
    text = text.strip()
    if not text:
        return []
    if ":" in text:
        a, b = text.split(":", 1)
        return list(range(int(a), int(b)))
    return [int(x) for x in text.split(",")]


def cmd_batch(args) -> int:
    try:
        seeds = parse_seeds(args.seeds)
    except ValueError:
        raise UsageError(f"bad seed list {args.seeds!r}") from None
    if args.reports:
        Path(args.reports).mkdir(parents=True, exist_ok=True)
    base = dict(family=args.family, n=args.n, k=args.k, command=args.run, mode=args.mode, delta=args.delta,
                profile=args.profile, budget_nodes=args.budget_nodes, budget_ms=args.budget_ms,
                reports=args.reports, remainder=args.remainder)
    jobs = [dict(base, seed=s) for s in seeds]
    if args.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_batch_one, jobs))
    else:
        rows = [_batch_one(j) for j in jobs]
    codes = [r.pop("_code") for r in rows]
    text = write_csv(rows, args.csv)
    if not args.csv:
        sys.stdout.write(text)
    found = sum(r["outcome"] == FOUND for r in rows)
    print(f"found {found}/{len(rows)}", file=sys.stderr)
    return next((c for c in SEVERITY if c in codes), EXIT_OK)


def cmd_verify_report(args) -> int:
    rep = Report.load(args.report)
    tour = _load_tournament(args.graph)
    ok, why = verify_report(rep, tour)
    print(why)
    return EXIT_OK if ok else EXIT_STAGED


# -- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--k", type=int, default=2)
    common.add_argument("--n", type=int)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--mode", choices=("strict", "desk"), default="desk")
    common.add_argument("--delta", type=float, default=0.1)
    common.add_argument("--budget-nodes", type=int, dest="budget_nodes")
    common.add_argument("--budget-ms", type=int, dest="budget_ms")
    common.add_argument("--profile", help="JSON parameter profile (overrides --mode/--delta)")
    common.add_argument("--out", help="report / output path (default stdout)")

    p = _Parser(prog="tourpow", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", parents=[common], help="write a tournament file")
    g.add_argument("family", choices=FAMILIES)
    g.add_argument("--q", type=int, help="projective plane order (krr-free)")
    g.add_argument("--t", type=int, help="matching size (cube-free)")
    g.add_argument("--d", type=int, default=1, help="odd degree of the input graph (cube-free)")
    g.add_argument("--graph", help="bipartite input file (krr-free / cube-free)")
    g.add_argument("--remainder", type=int, default=12)
    g.add_argument("--meta", help="write a JSON description of the instance here")
    g.set_defaults(func=cmd_generate)

    a = sub.add_parser("analyze", parents=[common], help="semidegree, cut density, transitive fraction")
    a.add_argument("graph")
    a.set_defaults(func=cmd_analyze)

    o = sub.add_parser("oracle", parents=[common], help="exact search for a power of a Hamilton path/cycle")
    o.add_argument("graph")
    o.add_argument("--kind", choices=(PATH, CYCLE), default=CYCLE)
    o.set_defaults(func=cmd_oracle)

    pl = sub.add_parser("pipeline", parents=[common], help="constructive pipelines")
    pl.add_argument("which", choices=PIPELINES)
    pl.add_argument("graph")
    pl.set_defaults(func=cmd_pipeline)

    c = sub.add_parser("construct-verify", parents=[common], help="build and verify a lower-bound construction")
    c.add_argument("family", choices=("krr-free", "cube-free"))
    c.add_argument("--q", type=int)
    c.add_argument("--t", type=int)
    c.add_argument("--d", type=int, default=1)
    c.add_argument("--graph")
    c.add_argument("--oracle", action="store_true", help="also run the exact search on the result")
    c.set_defaults(func=cmd_construct_verify)

    b = sub.add_parser("batch", parents=[common], help="seed sweep to CSV")
    b.add_argument("family", choices=("rotational", "paley", "random", "two-cluster"))
    b.add_argument("--command", dest="run", choices=PIPELINES + ("oracle",), default="cut-dense")
    b.add_argument("--seeds", default="0:10")
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--csv")
    b.add_argument("--reports", help="directory for per-run JSON reports")
    b.add_argument("--remainder", type=int, default=12)
    b.set_defaults(func=cmd_batch)

    v = sub.add_parser("verify-report", help="re-check a report's witness against its input")
    v.add_argument("report")
    v.add_argument("graph")
    v.set_defaults(func=cmd_verify_report)
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "k", 1) < 1:
            raise UsageError("--k must be >= 1")
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TourpowError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
