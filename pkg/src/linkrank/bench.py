"""Benchmark plans: run solvers over graphs and collect traces and a summary.

A plan is an INI-style file. An optional ``[plan]`` section sets defaults;
every other section is one cell (a graph plus what to run on it) and may
override any default::

    [plan]
    algorithms = hits, ahits, pagerank
    back_button = true
    repetitions = 3
    epsilon = 1e-10

    [web]
    path = web.tsv

    [synthetic]
    synth_n = 10000
    synth_avg_degree = 8
    synth_dangling = 0.8
    seeds = 1, 2, 3

A cell with ``seeds`` expands into one graph per seed, named ``<cell>-s<seed>``.
Relative ``path`` values resolve against the plan file's directory.
"""

from __future__ import annotations

import configparser
import csv
import logging
import os
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .graph import WebGraph, back_button_transform, load_graph
from .ranking import AlgorithmKind, SolverConfig, solve, write_trace_csv
from .synth import SynthSpec, generate
from .weights import compute_weights

logger = logging.getLogger(__name__)

SUMMARY_FIELDS = [
    "graph", "algorithm", "back_button", "n", "nnz", "K", "iterations_to_eps",
    "termination", "final_residual", "total_mults", "total_adds", "median_wall_ms", "status",
]

_PLAN_KEYS = {"algorithms", "back_button", "repetitions", "epsilon", "max_iter", "alpha", "zeta", "output_dir"}
_CELL_KEYS = _PLAN_KEYS - {"output_dir"} | {
    "path", "seeds", "synth_n", "synth_avg_degree", "synth_in_exponent",
    "synth_out_exponent", "synth_dangling", "synth_seed",
}


class PlanError(ValueError):
    pass


@dataclass
class BenchCell:
    graph_name: str
    source: Path | SynthSpec
    algorithms: list[AlgorithmKind]
    back_button: bool
    config: SolverConfig
    repetitions: int

    def load(self) -> WebGraph:
        if isinstance(self.source, SynthSpec):
            g = generate(self.source)
        else:
            g = load_graph(self.source)
        return back_button_transform(g) if self.back_button else g


@dataclass
class BenchPlan:
    cells: list[BenchCell]
    output_dir: Path | None = None

    def __post_init__(self):
        if not self.cells:
            raise PlanError("plan defines no graphs")
        names = [c.graph_name for c in self.cells]
        if len(set(names)) != len(names):
            raise PlanError("graph names in a plan must be unique")


@dataclass
class SummaryRow:
    graph: str
    algorithm: str
    back_button: bool
    n: int | None = None
    nnz: int | None = None
    K: int | None = None
    iterations_to_eps: int | None = None
    termination: str = ""
    final_residual: float | None = None
    total_mults: int | None = None
    total_adds: int | None = None
    median_wall_ms: float | None = None
    status: str = "ok"
    trace_files: list[Path] = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return self.status != "ok"

    def as_record(self) -> dict[str, str]:
        def cell(v):
            if v is None:
                return ""
            if isinstance(v, bool):
                return str(v).lower()
            if isinstance(v, float):
                return repr(v)
            return str(v)

        return {k: cell(getattr(self, k)) for k in SUMMARY_FIELDS}


def _split(value: str) -> list[str]:
    return [part.strip() for part in value.replace(";", ",").split(",") if part.strip()]


def _get(section, key, convert, default):
    if key not in section:
        return default
    raw = section[key]
    try:
        return convert(raw)
    except ValueError as exc:
        raise PlanError(f"[{section.name}] bad value for {key}: {raw!r} ({exc})") from None


def _bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected a boolean")


def _algorithms(raw: str) -> list[AlgorithmKind]:
    algos = [AlgorithmKind(a) for a in _split(raw)]
    if not algos:
        raise ValueError("at least one algorithm is required")
    return algos


def parse_plan(text: str, base_dir: str | os.PathLike = ".") -> BenchPlan:
    parser = configparser.ConfigParser(interpolation=None, default_section="__none__")
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise PlanError(str(exc)) from None
    base_dir = Path(base_dir)

    defaults = parser["plan"] if parser.has_section("plan") else {}
    unknown = set(defaults) - _PLAN_KEYS
    if unknown:
        raise PlanError(f"[plan] unknown keys: {', '.join(sorted(unknown))}")
    output_dir = defaults.get("output_dir")

    cells = []
    for name in parser.sections():
        if name == "plan":
            continue
        sec = parser[name]
        unknown = set(sec) - _CELL_KEYS
        if unknown:
            raise PlanError(f"[{name}] unknown keys: {', '.join(sorted(unknown))}")
        for key, value in defaults.items():
            if key != "output_dir" and key not in sec:
                sec[key] = value

        algorithms = _get(sec, "algorithms", _algorithms, [AlgorithmKind.HITS, AlgorithmKind.AHITS, AlgorithmKind.PAGERANK])
        back_button = _get(sec, "back_button", _bool, False)
        repetitions = _get(sec, "repetitions", int, 1)
        if repetitions < 1:
            raise PlanError(f"[{name}] repetitions must be >= 1")
        try:
            config = SolverConfig(
                epsilon=_get(sec, "epsilon", float, 1e-10),
                max_iter=_get(sec, "max_iter", int, 10000),
                alpha=_get(sec, "alpha", float, 0.85),
                zeta=_get(sec, "zeta", float, 0.99),
            )
        except ValueError as exc:
            raise PlanError(f"[{name}] {exc}") from None

        has_path = "path" in sec
        has_synth = any(k.startswith("synth_") for k in sec)
        if has_path == has_synth:
            raise PlanError(f"[{name}] give exactly one of 'path' or synth_* keys")
        common = dict(algorithms=algorithms, back_button=back_button, config=config, repetitions=repetitions)
        if has_path:
            if "seeds" in sec:
                raise PlanError(f"[{name}] 'seeds' only applies to synthetic graphs")
            cells.append(BenchCell(name, base_dir / sec["path"], **common))
            continue

        seeds = _get(sec, "seeds", lambda s: [int(x) for x in _split(s)], None)
        if seeds is None:
            seeds = [_get(sec, "synth_seed", int, 0)]
        try:
            for seed in seeds:
                spec = SynthSpec(
                    n=_get(sec, "synth_n", int, 1000),
                    target_avg_degree=_get(sec, "synth_avg_degree", float, 8.0),
                    in_exponent=_get(sec, "synth_in_exponent", float, 2.1),
                    out_exponent=_get(sec, "synth_out_exponent", float, 2.7),
                    dangling_fraction=_get(sec, "synth_dangling", float, 0.0),
                    seed=seed,
                )
                graph_name = f"{name}-s{seed}" if "seeds" in sec else name
                cells.append(BenchCell(graph_name, spec, **common))
        except ValueError as exc:
            raise PlanError(f"[{name}] {exc}") from None

    return BenchPlan(cells, Path(output_dir) if output_dir else None)


def load_plan(path: str | os.PathLike) -> BenchPlan:
    path = Path(path)
    return parse_plan(path.read_text(encoding="utf-8"), base_dir=path.parent)


def _run_cell(cell: BenchCell, out_dir: Path) -> list[SummaryRow]:
    rows = [SummaryRow(cell.graph_name, a.value, cell.back_button) for a in cell.algorithms]
    try:
        g = cell.load()
    except Exception as exc:  # recorded in the summary; the plan keeps going
        logger.error("graph %s failed to load: %s", cell.graph_name, exc)
        for row in rows:
            row.status = f"error: {exc}"
        return rows

    weights = compute_weights(g)
    for algo, row in zip(cell.algorithms, rows):
        row.n, row.nnz = g.n, g.nnz
        walls, iters = [], set()
        try:
            for rep in range(cell.repetitions):
                result = solve(algo, g, cell.config, weights)
                trace = result.trace
                path = out_dir / "traces" / f"{cell.graph_name}__{algo.value}__rep{rep}.csv"
                write_trace_csv(trace, path)
                row.trace_files.append(path)
                walls.append(trace.elapsed * 1e3)
                iters.add(trace.iterations)
        except Exception as exc:
            logger.error("%s on %s failed: %s", algo.value, cell.graph_name, exc)
            row.status = f"error: {exc}"
            continue
        if len(iters) != 1:
            row.status = f"error: iteration count varied across repetitions {sorted(iters)}"
        row.K = trace.iterations
        row.iterations_to_eps = trace.iterations if trace.converged else None
        row.termination = trace.reason.value
        row.final_residual = trace.final_residual
        row.total_mults = trace.mults
        row.total_adds = trace.adds
        row.median_wall_ms = statistics.median(walls)
    return rows


def run_plan(plan: BenchPlan, output_dir: str | os.PathLike | None = None, jobs: int = 1) -> list[SummaryRow]:
    """Run every cell and write ``traces/*.csv`` plus ``summary.csv``.

    ``jobs > 1`` runs cells concurrently; wall times are then not isolated.
    """
    out_dir = Path(output_dir or plan.output_dir or ".")
    (out_dir / "traces").mkdir(parents=True, exist_ok=True)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            per_cell = list(pool.map(lambda c: _run_cell(c, out_dir), plan.cells))
    else:
        per_cell = [_run_cell(c, out_dir) for c in plan.cells]
    rows = [row for cell_rows in per_cell for row in cell_rows]
    write_summary_csv(rows, out_dir / "summary.csv")
    return rows


def write_summary_csv(rows: list[SummaryRow], path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=SUMMARY_FIELDS, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow(row.as_record())
