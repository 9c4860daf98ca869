"""Similarity between score vectors and the orderings they induce."""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

import numpy as np
from scipy.stats import rankdata

from .ranking import top_k


class UndefinedMetricError(ValueError):
    pass


def _vec(v) -> np.ndarray:
    return np.asarray(getattr(v, "values", v), dtype=np.float64)


def _pair(u, v):
    u, v = _vec(u), _vec(v)
    if u.shape != v.shape:
        raise ValueError(f"length mismatch: {len(u)} vs {len(v)}")
    return u, v


def _correlate(x: np.ndarray, y: np.ndarray) -> float:
    """``x.y / sqrt(x.x * y.y)``; exactly 1 (or -1) for equal (or negated) inputs."""
    x = x / np.abs(x).max()
    y = y / np.abs(y).max()
    return float(np.clip(np.dot(x, y) / math.sqrt(np.dot(x, x) * np.dot(y, y)), -1.0, 1.0))


def cosine(u, v) -> float:
    u, v = _pair(u, v)
    if not (u.any() and v.any()):
        raise UndefinedMetricError("undefined cosine: zero vector")
    return _correlate(u, v)


def descending_ranks(v) -> np.ndarray:
    """Rank 1 for the highest score; tied scores share their average rank."""
    return rankdata(-_vec(v), method="average")


def spearman(u, v) -> float:
    """Pearson correlation of the (tie-averaged) rank vectors."""
    u, v = _pair(u, v)
    if len(u) < 2:
        raise UndefinedMetricError("undefined correlation: need at least two entries")
    ru = descending_ranks(u)
    rv = descending_ranks(v)
    du = ru - ru.mean()
    dv = rv - rv.mean()
    if not (du.any() and dv.any()):
        raise UndefinedMetricError("undefined correlation: constant vector")
    return _correlate(du, dv)


def l1_distance(u, v) -> float:
    u, v = _pair(u, v)
    return float(np.abs(u - v).sum())


def topk_overlap(u, v, k: int) -> float:
    u, v = _pair(u, v)
    if not 1 <= k <= len(u):
        raise ValueError(f"k must lie in [1, {len(u)}], got {k}")
    shared = np.intersect1d(top_k(u, k), top_k(v, k), assume_unique=True)
    return len(shared) / k


@dataclass
class SimilarityReport:
    """Similarity of two vectors; ``None`` marks a measure that is undefined."""

    label: str
    cosine: float | None
    spearman: float | None
    l1_distance: float
    topk_overlap: dict[int, float] = field(default_factory=dict)


def compare(u, v, label: str = "", ks: Iterable[int] = (10,)) -> SimilarityReport:
    u, v = _pair(u, v)
    try:
        cos = cosine(u, v)
    except UndefinedMetricError:
        cos = None
    try:
        rho = spearman(u, v)
    except UndefinedMetricError:
        rho = None
    overlaps = {k: topk_overlap(u, v, min(k, len(u))) for k in ks}
    return SimilarityReport(label, cos, rho, l1_distance(u, v), overlaps)


def _fmt(x: float | None, precise: bool = False) -> str:
    if x is None:
        return "n/a"
    return repr(float(x)) if precise else f"{x:.6f}"


def report_rows(
    reports: Sequence[SimilarityReport], precise: bool = False
) -> tuple[list[str], list[list[str]]]:
    ks = sorted({k for r in reports for k in r.topk_overlap})
    header = ["pair", "cosine", "spearman", "l1_distance"] + [f"top{k}_overlap" for k in ks]
    rows = []
    for r in reports:
        row = [r.label] + [_fmt(x, precise) for x in (r.cosine, r.spearman, r.l1_distance)]
        row += [_fmt(r.topk_overlap.get(k), precise) for k in ks]
        rows.append(row)
    return header, rows


def write_report_csv(reports: Sequence[SimilarityReport], dest: str | os.PathLike | TextIO) -> None:
    header, rows = report_rows(reports, precise=True)
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            write_report_csv(reports, fh)
        return
    w = csv.writer(dest, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def format_report(reports: Sequence[SimilarityReport]) -> str:
    header, rows = report_rows(reports)
    table = [header] + rows
    widths = [max(len(row[c]) for row in table) for c in range(len(header))]
    lines = []
    for row in table:
        cells = [row[0].ljust(widths[0])] + [cell.rjust(w) for cell, w in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines)
