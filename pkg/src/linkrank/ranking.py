"""Power-method link-analysis solvers with exact operation accounting.

All solvers work directly on the sparse adjacency of a :class:`WebGraph`;
no dense or collapsed iteration matrix is ever formed. Every run returns a
:class:`ConvergenceTrace` recording the 1-norm residual of each iteration and
cumulative multiplication/addition tallies. The tallies follow the abstract
cost model of the algorithms (a sweep over ``L`` costs ``nnz`` additions, a
length-N scaling or normalization costs N multiplications), not machine flops.
"""

from __future__ import annotations

import csv
import os
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence, TextIO

import numpy as np

from .graph import WebGraph, dangling_nodes
from .weights import WeightDiagonals


class AlgorithmKind(str, Enum):
    HITS = "hits"
    AHITS = "ahits"
    AHITS_POSITIVE = "ahits-pos"
    PAGERANK = "pagerank"


class TerminationReason(str, Enum):
    CONVERGED = "converged"
    MAX_ITER = "max_iter"


class DegenerateGraphError(ArithmeticError):
    """The iteration lost all of its mass (e.g. a graph without edges)."""


@dataclass(frozen=True)
class RankVector:
    values: np.ndarray
    normalized: bool = True
    norm_kind: str = "one_norm"

    def __len__(self) -> int:
        return len(self.values)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def top(self, k: int) -> np.ndarray:
        return top_k(self.values, k)


@dataclass(frozen=True)
class SolverConfig:
    epsilon: float = 1e-10
    max_iter: int = 10000
    alpha: float = 0.85
    zeta: float = 0.99
    start: np.ndarray | None = None

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError(f"max_iter must be an integer >= 1, got {self.max_iter}")
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0 < self.zeta < 1:
            raise ValueError(f"zeta must lie in (0, 1), got {self.zeta}")
        if self.start is not None:
            start = np.array(getattr(self.start, "values", self.start), dtype=np.float64)
            if start.ndim != 1 or np.any(start < 0) or not np.isfinite(start).all() or start.sum() <= 0:
                raise ValueError("start must be a finite nonnegative vector with positive mass")
            start.setflags(write=False)
            object.__setattr__(self, "start", start)

    def start_vector(self, n: int) -> np.ndarray:
        if self.start is None:
            return np.full(n, 1.0 / n)
        if len(self.start) != n:
            raise ValueError(f"start vector has length {len(self.start)}, graph has {n} nodes")
        return self.start.copy()


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    residual: float
    mults: int
    adds: int
    elapsed: float  # seconds since the solver started


@dataclass
class ConvergenceTrace:
    algorithm: AlgorithmKind
    records: list[IterationRecord] = field(default_factory=list)
    reason: TerminationReason = TerminationReason.MAX_ITER

    @property
    def iterations(self) -> int:
        return len(self.records)

    @property
    def residuals(self) -> np.ndarray:
        return np.array([r.residual for r in self.records])

    @property
    def final_residual(self) -> float:
        return self.records[-1].residual if self.records else float("nan")

    @property
    def mults(self) -> int:
        return self.records[-1].mults if self.records else 0

    @property
    def adds(self) -> int:
        return self.records[-1].adds if self.records else 0

    @property
    def elapsed(self) -> float:
        return self.records[-1].elapsed if self.records else 0.0

    @property
    def converged(self) -> bool:
        return self.reason is TerminationReason.CONVERGED

    def per_iteration_costs(self) -> list[tuple[int, int]]:
        out, pm, pa = [], 0, 0
        for r in self.records:
            out.append((r.mults - pm, r.adds - pa))
            pm, pa = r.mults, r.adds
        return out


@dataclass(frozen=True)
class HitsResult:
    authority: RankVector
    hub: RankVector
    trace: ConvergenceTrace


IterateCallback = Callable[[int, np.ndarray], None]


class _Tally:
    __slots__ = ("mults", "adds", "t0", "trace")

    def __init__(self, trace: ConvergenceTrace):
        self.mults = 0
        self.adds = 0
        self.trace = trace
        self.t0 = time.perf_counter()

    def record(self, k: int, residual: float) -> None:
        self.trace.records.append(
            IterationRecord(k, residual, self.mults, self.adds, time.perf_counter() - self.t0)
        )


def _normalized(v: np.ndarray, what: str) -> np.ndarray:
    s = v.sum()
    if not s > 0:
        raise DegenerateGraphError(f"degenerate graph: zero {what} mass")
    return v / s


def _check_weights(g: WebGraph, w: WeightDiagonals) -> None:
    if len(w.ca) != g.n or len(w.ch) != g.n:
        raise ValueError(f"weights have length {len(w.ca)}, graph has {g.n} nodes")


def _coupled_iteration(g, cfg, kind, hub_weight=None, auth_weight=None, callback=None) -> HitsResult:
    """Shared loop of HITS and its weighted form: h -> a -> h, residual on h."""
    L, LT = g.adjacency, g.adjacency_t
    n, nnz = g.n, g.nnz
    trace = ConvergenceTrace(kind)
    tally = _Tally(trace)
    h = cfg.start_vector(n)
    a = None
    for k in range(1, cfg.max_iter + 1):
        if hub_weight is not None:
            a = LT @ (h * hub_weight)
            tally.mults += n
        else:
            a = LT @ h
        tally.adds += nnz
        if auth_weight is not None:
            h_new = L @ (a * auth_weight)
            tally.mults += n
        else:
            h_new = L @ a
        tally.adds += nnz
        h_new = _normalized(h_new, "hub")
        tally.mults += n
        delta = float(np.abs(h_new - h).sum())
        h = h_new
        tally.record(k, delta)
        if callback is not None:
            callback(k, h)
        if delta <= cfg.epsilon:
            trace.reason = TerminationReason.CONVERGED
            break
    authority = _normalized(a, "authority")
    return HitsResult(RankVector(authority), RankVector(h), trace)


def run_hits(
    g: WebGraph, cfg: SolverConfig | None = None, *, callback: IterateCallback | None = None
) -> HitsResult:
    """Query-independent HITS over the whole graph.

    Starting from a uniform hub vector, each iteration computes ``a = h L``
    and ``h = a L^T`` through in- and out-neighbor sums, 1-normalizes ``h``
    and stops once ``||h_new - h_old||_1 <= epsilon``. The authority vector
    is normalized once at the end.
    """
    return _coupled_iteration(g, cfg or SolverConfig(), AlgorithmKind.HITS, callback=callback)


def run_accelerated_hits(
    g: WebGraph,
    w: WeightDiagonals,
    cfg: SolverConfig | None = None,
    *,
    callback: IterateCallback | None = None,
) -> HitsResult:
    """Degree-weighted HITS: ``a = (h * ch) L``, ``h = (a * ca) L^T``.

    Same loop, normalization and stopping rule as :func:`run_hits`.
    """
    _check_weights(g, w)
    return _coupled_iteration(
        g,
        cfg or SolverConfig(),
        AlgorithmKind.AHITS,
        hub_weight=w.ch,
        auth_weight=w.ca,
        callback=callback,
    )


def run_accelerated_hits_positive(
    g: WebGraph,
    w: WeightDiagonals,
    cfg: SolverConfig | None = None,
    *,
    callback: IterateCallback | None = None,
) -> HitsResult:
    """Authority power iteration on the strictly positive mixture

        ``X_hat = zeta * Ca L^T Ch L + (1 - zeta)/N * e e^T``

    applied matrix-free. ``a`` is renormalized every step and the residual is
    measured on ``a``. The hub vector is recovered once at the end as
    ``h = (a * ca) L^T``.
    """
    _check_weights(g, w)
    cfg = cfg or SolverConfig()
    L, LT = g.adjacency, g.adjacency_t
    n, nnz = g.n, g.nnz
    zeta = cfg.zeta
    trace = ConvergenceTrace(AlgorithmKind.AHITS_POSITIVE)
    tally = _Tally(trace)
    a = cfg.start_vector(n)
    for k in range(1, cfg.max_iter + 1):
        h = L @ (a * w.ca)
        t = LT @ (h * w.ch)
        tally.mults += 2 * n
        tally.adds += 2 * nnz
        # scalar teleport term; the extra N additions spread it over every page
        a_new = zeta * t + (1.0 - zeta) * a.sum() / n
        tally.mults += n
        tally.adds += n
        a_new = _normalized(a_new, "authority")
        tally.mults += n
        delta = float(np.abs(a_new - a).sum())
        a = a_new
        tally.record(k, delta)
        if callback is not None:
            callback(k, a)
        if delta <= cfg.epsilon:
            trace.reason = TerminationReason.CONVERGED
            break
    hub = L @ (a * w.ca)
    hub = hub / hub.sum() if hub.sum() > 0 else np.full(n, 1.0 / n)
    return HitsResult(RankVector(a), RankVector(hub), trace)


def run_pagerank(
    g: WebGraph, cfg: SolverConfig | None = None, *, callback: IterateCallback | None = None
) -> tuple[RankVector, ConvergenceTrace]:
    """PageRank with uniform teleportation and dangling-mass redistribution.

    ``p_new = alpha * p Do^-1 L + (alpha * p.d + 1 - alpha) e / N``, where
    ``d`` marks dangling pages. Dangling rows of ``Do^-1`` are treated as zero
    and their mass re-enters only through the uniform term. The update
    preserves ``sum(p) = 1``, so no normalization step is performed.
    """
    cfg = cfg or SolverConfig()
    LT = g.adjacency_t
    n, nnz = g.n, g.nnz
    alpha = cfg.alpha
    dangling = dangling_nodes(g)
    n_nondangling = n - len(dangling)
    outdeg = g.outdeg
    scale = np.zeros(n)
    linked = outdeg > 0
    scale[linked] = alpha / outdeg[linked]

    trace = ConvergenceTrace(AlgorithmKind.PAGERANK)
    tally = _Tally(trace)
    p = cfg.start_vector(n)
    p = p / p.sum()
    for k in range(1, cfg.max_iter + 1):
        spread = LT @ (p * scale)
        tally.mults += n
        tally.adds += nnz
        dangling_mass = alpha * p[dangling].sum()
        p_new = spread + (dangling_mass + 1.0 - alpha) / n
        # stochasticity/primitivity adjustment, tallied as |ND| mults and
        # N + |ND| adds; only the N teleport adds remain without dangling pages
        if len(dangling):
            tally.mults += n_nondangling
            tally.adds += n + n_nondangling
        else:
            tally.adds += n
        delta = float(np.abs(p_new - p).sum())
        p = p_new
        tally.record(k, delta)
        if callback is not None:
            callback(k, p)
        if delta <= cfg.epsilon:
            trace.reason = TerminationReason.CONVERGED
            break
    return RankVector(p), trace


def count_costs(algorithm: AlgorithmKind | str, g: WebGraph) -> tuple[int, int]:
    """Closed-form per-iteration ``(multiplications, additions)``."""
    kind = AlgorithmKind(algorithm)
    n, nnz = g.n, g.nnz
    n_dangling = int((g.outdeg == 0).sum())
    if kind is AlgorithmKind.HITS:
        return n, 2 * nnz
    if kind is AlgorithmKind.AHITS:
        return 3 * n, 2 * nnz
    if kind is AlgorithmKind.AHITS_POSITIVE:
        return 4 * n, 2 * nnz + n
    if n_dangling == 0:
        return n, nnz + n
    nd = n - n_dangling
    return n + nd, nnz + n + nd


def memory_requirements(algorithm: AlgorithmKind | str, g: WebGraph) -> dict[str, int]:
    """Storage needed by each solver, counted as bools, integers and doubles."""
    kind = AlgorithmKind(algorithm)
    n, nnz = g.n, g.nnz
    nd = n - int((g.outdeg == 0).sum())
    if kind is AlgorithmKind.HITS:
        return {"bools": nnz, "integers": 0, "doubles": 3 * n}
    if kind in (AlgorithmKind.AHITS, AlgorithmKind.AHITS_POSITIVE):
        return {"bools": nnz, "integers": 0, "doubles": 5 * n}
    bools = nnz if nd == n else nnz + nd
    return {"bools": bools, "integers": n, "doubles": 2 * n}


def memory_bytes(req: dict[str, int], int_size: int = 8) -> int:
    return req["bools"] + int_size * req["integers"] + 8 * req["doubles"]


def solve(
    algorithm: AlgorithmKind | str,
    g: WebGraph,
    cfg: SolverConfig | None = None,
    weights: WeightDiagonals | None = None,
) -> HitsResult:
    """Dispatch by name; PageRank results are wrapped with ``hub = authority``."""
    from .weights import compute_weights

    kind = AlgorithmKind(algorithm)
    if kind is AlgorithmKind.HITS:
        return run_hits(g, cfg)
    if kind is AlgorithmKind.PAGERANK:
        p, trace = run_pagerank(g, cfg)
        return HitsResult(p, p, trace)
    w = weights if weights is not None else compute_weights(g)
    if kind is AlgorithmKind.AHITS:
        return run_accelerated_hits(g, w, cfg)
    return run_accelerated_hits_positive(g, w, cfg)


# -- ordering and export -------------------------------------------------------


def top_k(values: np.ndarray | Sequence[float], k: int | None = None) -> np.ndarray:
    """Indices by descending score, ties broken by ascending id."""
    values = np.asarray(getattr(values, "values", values), dtype=np.float64)
    order = np.lexsort((np.arange(len(values)), -values))
    return order if k is None else order[:k]


def _open_text(dest):
    if isinstance(dest, (str, os.PathLike)):
        return open(dest, "w", encoding="utf-8", newline=""), True
    return dest, False


def write_scores_csv(vec: RankVector | np.ndarray, dest: str | os.PathLike | TextIO) -> None:
    values = np.asarray(getattr(vec, "values", vec), dtype=np.float64)
    fh, owned = _open_text(dest)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "score"])
        for i in top_k(values).tolist():
            w.writerow([i, repr(float(values[i]))])
    finally:
        if owned:
            fh.close()


def read_scores_csv(path: str | os.PathLike) -> np.ndarray:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = np.zeros(len(rows))
    for row in rows:
        out[int(row["id"])] = float(row["score"])
    return out


def write_trace_csv(trace: ConvergenceTrace, dest: str | os.PathLike | TextIO) -> None:
    fh, owned = _open_text(dest)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iter", "residual", "mults", "adds", "elapsed_ms"])
        for r in trace.records:
            w.writerow([r.iteration, repr(r.residual), r.mults, r.adds, f"{r.elapsed * 1e3:.6f}"])
    finally:
        if owned:
            fh.close()
