"""Command-line front end: ``linkrank {stats,rank,compare,bench,gen}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .bench import PlanError, load_plan, run_plan
from .graph import (
    GraphParseError,
    back_button_transform,
    compute_stats,
    load_graph,
    load_labels,
    write_edge_list,
)
from .metrics import compare, format_report, write_report_csv
from .ranking import (
    AlgorithmKind,
    DegenerateGraphError,
    SolverConfig,
    solve,
    write_scores_csv,
    write_trace_csv,
)
from .synth import InfeasibleSpecError, SynthSpec, generate
from .weights import compute_weights, write_weights_csv

logger = logging.getLogger("linkrank")


class _Output:
    def __init__(self, quiet: bool):
        self.quiet = quiet

    def __call__(self, *lines: str) -> None:
        if not self.quiet:
            for line in lines:
                print(line)


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS if suppress else False,
                        help="print nothing but errors")
    parser.add_argument("--output-dir", type=Path, default=default,
                        help="directory for emitted files (default: current directory)")


def _solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--back-button", action="store_true", help="apply the back-button transform first")
    parser.add_argument("--eps", type=float, default=1e-10, help="residual threshold (default 1e-10)")
    parser.add_argument("--max-iter", type=int, default=10000, help="iteration cap (default 10000)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="linkrank", description=__doc__)
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)

    p = sub.add_parser("stats", parents=[common], help="print dataset summary statistics")
    p.add_argument("graph", type=Path)
    p.add_argument("--back-button", action="store_true")

    p = sub.add_parser("rank", parents=[common], help="run one ranking algorithm")
    p.add_argument("graph", type=Path)
    p.add_argument("algo", choices=[a.value for a in AlgorithmKind])
    _solver_flags(p)
    p.add_argument("--alpha", type=float, default=None, help="PageRank damping (pagerank only, default 0.85)")
    p.add_argument("--zeta", type=float, default=None, help="positivity mix (ahits-pos only, default 0.99)")
    p.add_argument("--top", type=int, default=10, metavar="K", help="print the top K pages")
    p.add_argument("--labels", type=Path, default=None, help="id<TAB>label sidecar for display")
    p.add_argument("--weights-csv", action="store_true", help="also dump id,ca,ch (ahits family)")

    p = sub.add_parser("compare", parents=[common], help="compare HITS with the weighted variant")
    p.add_argument("graph", type=Path)
    _solver_flags(p)
    p.add_argument("--top", type=int, default=10, metavar="K", help="top-K overlap size")

    p = sub.add_parser("bench", parents=[common], help="run a benchmark plan")
    p.add_argument("plan", type=Path)
    p.add_argument("--jobs", type=int, default=1, help="cells run concurrently (default 1)")
    p.add_argument("--serial", action="store_true", help="force --jobs 1 for isolated timings")

    p = sub.add_parser("gen", parents=[common], help="generate a synthetic power-law graph")
    p.add_argument("out", type=Path)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--avg-degree", type=float, default=8.0)
    p.add_argument("--in-exponent", type=float, default=2.1)
    p.add_argument("--out-exponent", type=float, default=2.7)
    p.add_argument("--dangling", type=float, default=0.0, help="fraction of pages without out-links")
    p.add_argument("--seed", type=int, default=0)
    return parser


def _load(path: Path, back_button: bool):
    g = load_graph(path)
    return back_button_transform(g) if back_button else g


def cmd_stats(args, out: _Output) -> int:
    g = _load(args.graph, args.back_button)
    out(compute_stats(g).as_text())
    return 0


def cmd_rank(args, out: _Output, parser: argparse.ArgumentParser) -> int:
    algo = AlgorithmKind(args.algo)
    if args.alpha is not None and algo is not AlgorithmKind.PAGERANK:
        parser.error("--alpha only applies to pagerank")
    if args.zeta is not None and algo is not AlgorithmKind.AHITS_POSITIVE:
        parser.error("--zeta only applies to ahits-pos")
    if args.weights_csv and algo not in (AlgorithmKind.AHITS, AlgorithmKind.AHITS_POSITIVE):
        parser.error("--weights-csv only applies to ahits and ahits-pos")
    if args.top < 0:
        parser.error("--top must be nonnegative")
    try:
        cfg = SolverConfig(
            epsilon=args.eps,
            max_iter=args.max_iter,
            alpha=0.85 if args.alpha is None else args.alpha,
            zeta=0.99 if args.zeta is None else args.zeta,
        )
    except ValueError as exc:
        parser.error(str(exc))

    g = _load(args.graph, args.back_button)
    labels = load_labels(args.labels, g.n) if args.labels else None
    weights = compute_weights(g) if algo in (AlgorithmKind.AHITS, AlgorithmKind.AHITS_POSITIVE) else None
    result = solve(algo, g, cfg, weights)

    out_dir = args.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if algo is AlgorithmKind.PAGERANK:
        written.append(out_dir / "pagerank_scores.csv")
        write_scores_csv(result.authority, written[-1])
    else:
        written.append(out_dir / f"{algo.value}_authority.csv")
        write_scores_csv(result.authority, written[-1])
        written.append(out_dir / f"{algo.value}_hub.csv")
        write_scores_csv(result.hub, written[-1])
    written.append(out_dir / f"{algo.value}_trace.csv")
    write_trace_csv(result.trace, written[-1])
    if args.weights_csv:
        written.append(out_dir / f"{algo.value}_weights.csv")
        write_weights_csv(weights, written[-1])

    trace = result.trace
    out(
        f"K {trace.iterations}",
        f"final residual {trace.final_residual:.3e}",
        f"termination {trace.reason.value}",
        f"elapsed {trace.elapsed * 1e3:.3f} ms",
    )
    if args.top:
        title = "score" if algo is AlgorithmKind.PAGERANK else "authority"
        out(f"top {min(args.top, g.n)} by {title}:")
        for rank, i in enumerate(result.authority.top(args.top).tolist(), start=1):
            name = f"  {labels[i]}" if labels else ""
            out(f"{rank:>4}  {i:>8}  {result.authority.values[i]:.6f}{name}")
    out(*(f"wrote {p}" for p in written))
    return 0


def cmd_compare(args, out: _Output) -> int:
    g = _load(args.graph, args.back_button)
    cfg = SolverConfig(epsilon=args.eps, max_iter=args.max_iter)
    hits = solve(AlgorithmKind.HITS, g, cfg)
    ahits = solve(AlgorithmKind.AHITS, g, cfg)
    ks = (min(args.top, g.n),)
    reports = [
        compare(hits.authority, ahits.authority, "authority hits-ahits", ks),
        compare(hits.hub, ahits.hub, "hub hits-ahits", ks),
        compare(hits.authority, g.indeg.astype(float), "authority-indegree", ks),
        compare(hits.hub, g.outdeg.astype(float), "hub-outdegree", ks),
    ]
    args.output_dir.mkdir(parents=True, exist_ok=True)
    dest = args.output_dir / "compare.csv"
    write_report_csv(reports, dest)
    for name, res in (("hits", hits), ("ahits", ahits)):
        out(f"{name}: K {res.trace.iterations}, {res.trace.reason.value}")
    out(format_report(reports), f"wrote {dest}")
    return 0


def cmd_bench(args, out: _Output) -> int:
    plan = load_plan(args.plan)
    jobs = 1 if args.serial else max(1, args.jobs)
    output_dir = args.output_dir if args.output_dir_given else None
    rows = run_plan(plan, output_dir, jobs=jobs)
    failed = [r for r in rows if r.failed]
    for r in rows:
        out(f"{r.graph:<24} {r.algorithm:<10} K={r.K if r.K is not None else '-':<6} {r.status}")
    out(f"{len(rows) - len(failed)}/{len(rows)} cells ok")
    return 1 if failed else 0


def cmd_gen(args, out: _Output, parser: argparse.ArgumentParser) -> int:
    try:
        spec = SynthSpec(
            n=args.n,
            target_avg_degree=args.avg_degree,
            in_exponent=args.in_exponent,
            out_exponent=args.out_exponent,
            dangling_fraction=args.dangling,
            seed=args.seed,
        )
        g = generate(spec)
    except InfeasibleSpecError as exc:
        parser.error(str(exc))
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_edge_list(g, args.out)
    out(compute_stats(g).as_text(), f"wrote {args.out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.output_dir_given = args.output_dir is not None
    if args.output_dir is None:
        args.output_dir = Path(".")
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    out = _Output(args.quiet)
    try:
        if args.command == "stats":
            return cmd_stats(args, out)
        if args.command == "rank":
            return cmd_rank(args, out, parser)
        if args.command == "compare":
            return cmd_compare(args, out)
        if args.command == "bench":
            return cmd_bench(args, out)
        return cmd_gen(args, out, parser)
    except (OSError, GraphParseError, PlanError, DegenerateGraphError, ValueError) as exc:
        print(f"linkrank {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
