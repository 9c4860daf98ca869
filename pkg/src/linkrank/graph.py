"""Sparse directed web graphs.

A :class:`WebGraph` stores the 0/1 adjacency matrix ``L`` twice, in CSR form
(out-neighbors per row) and CSC form (in-neighbors per column), so both the
``h L`` and ``a L^T`` sweeps of the link-analysis solvers are contiguous scans.
Graphs are immutable and always canonical: no self-loops, no duplicate edges,
neighbor lists sorted by node id.
"""

from __future__ import annotations

import io
import logging
import os
import re
import struct
import warnings
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import BinaryIO, Iterable, Sequence, TextIO, Union

import numpy as np
import scipy.sparse as sp

logger = logging.getLogger(__name__)

PathOrStream = Union[str, os.PathLike, BinaryIO, TextIO]

BINARY_MAGIC = b"WEBGRAPH"
FRACTION_THRESHOLDS = (0.6, 0.7, 0.8, 0.9)

_NODES_HEADER = re.compile(r"^#\s*nodes\s*:\s*(\d+)\s*$", re.IGNORECASE)


class GraphParseError(ValueError):
    """Raised for malformed edge-list input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class IngestWarning(UserWarning):
    pass


class EdgeListFormat(Enum):
    TEXT = "text"
    BINARY = "binary"


def _canonical_edges(n: int, src: np.ndarray, dst: np.ndarray):
    """Drop self-loops and duplicates; return edges sorted by (src, dst)."""
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    loops = src == dst
    n_loops = int(loops.sum())
    src, dst = src[~loops], dst[~loops]
    keys = np.unique(src * n + dst)
    n_dups = len(src) - len(keys)
    return keys // n, keys % n, n_loops, n_dups


@dataclass(frozen=True, eq=False)
class WebGraph:
    """Immutable directed graph on nodes ``0..n-1``.

    Build instances with :meth:`from_edges`; the raw constructor trusts its
    arrays to already be canonical.
    """

    n: int
    out_ptr: np.ndarray
    out_idx: np.ndarray
    in_ptr: np.ndarray
    in_idx: np.ndarray
    labels: tuple[str, ...] | None = field(default=None)

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]] | np.ndarray | None = None,
        *,
        src: Sequence[int] | np.ndarray | None = None,
        dst: Sequence[int] | np.ndarray | None = None,
        labels: Sequence[str] | None = None,
    ) -> "WebGraph":
        if n < 1:
            raise ValueError("a graph must have at least one node")
        if edges is not None:
            arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                             dtype=np.int64).reshape(-1, 2)
            src, dst = arr[:, 0], arr[:, 1]
        src = np.asarray([] if src is None else src, dtype=np.int64)
        dst = np.asarray([] if dst is None else dst, dtype=np.int64)
        if len(src) != len(dst):
            raise ValueError("src and dst must have equal length")
        if len(src) and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
            raise ValueError(f"edge endpoint out of range for n={n}")
        src, dst, _, _ = _canonical_edges(n, src, dst)
        return cls._from_sorted(n, src, dst, labels)

    @classmethod
    def _from_sorted(cls, n, src, dst, labels=None) -> "WebGraph":
        out_ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=out_ptr[1:])
        order = np.lexsort((src, dst))
        in_ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(dst, minlength=n), out=in_ptr[1:])
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != n:
                raise ValueError(f"expected {n} labels, got {len(labels)}")
        for arr in (out_ptr, dst, in_ptr):
            arr.setflags(write=False)
        in_idx = src[order]
        in_idx.setflags(write=False)
        return cls(n, out_ptr, dst, in_ptr, in_idx, labels)

    @property
    def nnz(self) -> int:
        return int(self.out_idx.shape[0])

    @cached_property
    def outdeg(self) -> np.ndarray:
        return np.diff(self.out_ptr)

    @cached_property
    def indeg(self) -> np.ndarray:
        return np.diff(self.in_ptr)

    @property
    def deg(self) -> np.ndarray:
        return self.indeg + self.outdeg

    def out_neighbors(self, i: int) -> np.ndarray:
        return self.out_idx[self.out_ptr[i]:self.out_ptr[i + 1]]

    def in_neighbors(self, i: int) -> np.ndarray:
        return self.in_idx[self.in_ptr[i]:self.in_ptr[i + 1]]

    @property
    def out_adj(self) -> list[list[int]]:
        return [self.out_neighbors(i).tolist() for i in range(self.n)]

    @property
    def in_adj(self) -> list[list[int]]:
        return [self.in_neighbors(i).tolist() for i in range(self.n)]

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge endpoints as ``(src, dst)`` arrays, sorted by ``(src, dst)``."""
        return np.repeat(np.arange(self.n, dtype=np.int64), self.outdeg), self.out_idx.copy()

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """``L`` as a float CSR matrix (row i = out-links of i)."""
        data = np.ones(self.nnz)
        return sp.csr_matrix((data, self.out_idx, self.out_ptr), shape=(self.n, self.n))

    @cached_property
    def adjacency_t(self) -> sp.csr_matrix:
        """``L^T`` as a float CSR matrix (row i = in-links of i)."""
        data = np.ones(self.nnz)
        return sp.csr_matrix((data, self.in_idx, self.in_ptr), shape=(self.n, self.n))

    def reversed(self) -> "WebGraph":
        src, dst = self.edges()
        return WebGraph.from_edges(self.n, src=dst, dst=src, labels=self.labels)

    def with_labels(self, labels: Sequence[str] | None) -> "WebGraph":
        return WebGraph._from_sorted(self.n, *self.edges(), labels)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WebGraph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.out_ptr, other.out_ptr)
            and np.array_equal(self.out_idx, other.out_idx)
            and np.array_equal(self.in_ptr, other.in_ptr)
            and np.array_equal(self.in_idx, other.in_idx)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"WebGraph(n={self.n}, nnz={self.nnz})"


# -- dangling pages and the back-button model --------------------------------


def dangling_nodes(g: WebGraph) -> np.ndarray:
    """Ids of pages without out-links, ascending."""
    return np.flatnonzero(g.outdeg == 0)


def back_button_transform(g: WebGraph) -> WebGraph:
    """Return ``L* = L + M``: every dangling page links back to its in-neighbors.

    Row ``i`` of ``M`` is column ``i`` of ``L`` when ``i`` is dangling. A
    dangling page with no in-links stays dangling.
    """
    dangling = dangling_nodes(g)
    if len(dangling) == 0:
        return g
    counts = g.indeg[dangling]
    if counts.sum() == 0:
        return g
    back_src = np.repeat(dangling, counts)
    back_dst = np.concatenate([g.in_neighbors(i) for i in dangling])
    src, dst = g.edges()
    return WebGraph.from_edges(
        g.n,
        src=np.concatenate([src, back_src]),
        dst=np.concatenate([dst, back_dst]),
        labels=g.labels,
    )


# -- statistics ---------------------------------------------------------------


@dataclass(frozen=True)
class GraphStats:
    n: int
    nnz: int
    dangling_count: int
    dangling_percent: float
    average_degree: float
    fi: dict[float, float]
    fo: dict[float, float]

    @property
    def nondangling_count(self) -> int:
        return self.n - self.dangling_count

    def as_text(self) -> str:
        lines = [
            f"%DP {self.dangling_percent:.1f}, AD {self.average_degree:.2f}",
            f"pages      {self.n}",
            f"links      {self.nnz}",
            f"dangling   {self.dangling_count}",
            f"nondangling {self.nondangling_count}",
            "threshold  fi>t     fo>t",
        ]
        for t in FRACTION_THRESHOLDS:
            lines.append(f"{t:<10.1f} {self.fi[t]:.4f}   {self.fo[t]:.4f}")
        return "\n".join(lines)


def compute_stats(g: WebGraph) -> GraphStats:
    """Dataset summary plus the authoritative/hubby page fractions.

    ``fi = indeg/deg`` and ``fo = outdeg/deg``; a fraction table entry is the
    share of pages (among those with ``deg > 0``) whose ratio exceeds the
    threshold.
    """
    n_dangling = int((g.outdeg == 0).sum())
    deg = g.deg
    connected = deg > 0
    fi_vals = g.indeg[connected] / deg[connected]
    fo_vals = g.outdeg[connected] / deg[connected]
    m = int(connected.sum())

    def table(vals):
        return {t: (float((vals > t).sum()) / m if m else 0.0) for t in FRACTION_THRESHOLDS}

    return GraphStats(
        n=g.n,
        nnz=g.nnz,
        dangling_count=n_dangling,
        dangling_percent=100.0 * n_dangling / g.n,
        average_degree=g.nnz / g.n,
        fi=table(fi_vals),
        fo=table(fo_vals),
    )


# -- I/O ------------------------------------------------------------------------


@dataclass
class EdgeListParse:
    graph: WebGraph
    self_loops: int
    duplicates: int


def _open_binary(source: PathOrStream):
    if isinstance(source, (str, os.PathLike)):
        return open(source, "rb"), True
    return source, False


def parse_edge_list(source: PathOrStream) -> EdgeListParse:
    """Parse a text edge list, reporting how many edges were discarded."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            data = fh.read()
    else:
        data = source.read()
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise GraphParseError(f"input is not UTF-8: {exc}") from None

    declared_n = None
    src: list[int] = []
    dst: list[int] = []
    for lineno, raw in enumerate(data.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _NODES_HEADER.match(line)
            if m:
                declared_n = int(m.group(1))
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphParseError(f"expected 'src<TAB>dst', got {raw!r}", lineno)
        try:
            s, d = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError(f"non-integer node id in {raw!r}", lineno) from None
        if s < 0 or d < 0:
            raise GraphParseError(f"negative node id in {raw!r}", lineno)
        if declared_n is not None and max(s, d) >= declared_n:
            raise GraphParseError(f"node id exceeds declared node count {declared_n}", lineno)
        src.append(s)
        dst.append(d)

    if declared_n is not None:
        n = declared_n
    elif src:
        n = max(max(src), max(dst)) + 1
    else:
        n = 0
    if n < 1:
        raise GraphParseError("empty input: a graph needs at least one node")

    s_arr, d_arr, n_loops, n_dups = _canonical_edges(n, np.array(src), np.array(dst))
    return EdgeListParse(WebGraph._from_sorted(n, s_arr, d_arr), n_loops, n_dups)


def load_edge_list(source: PathOrStream, format: EdgeListFormat = EdgeListFormat.TEXT) -> WebGraph:
    """Load a graph from a text edge list or the binary cache format."""
    if format is EdgeListFormat.BINARY:
        return load_binary(source)
    parsed = parse_edge_list(source)
    if parsed.self_loops:
        warnings.warn(f"dropped {parsed.self_loops} self-loop(s)", IngestWarning, stacklevel=2)
    if parsed.duplicates:
        logger.info("collapsed %d duplicate edge(s)", parsed.duplicates)
    return parsed.graph


def load_graph(path: str | os.PathLike) -> WebGraph:
    """Load from ``path``, detecting the binary cache by its magic bytes."""
    with open(path, "rb") as fh:
        head = fh.read(len(BINARY_MAGIC))
    fmt = EdgeListFormat.BINARY if head == BINARY_MAGIC else EdgeListFormat.TEXT
    return load_edge_list(path, fmt)


def write_edge_list(g: WebGraph, dest: str | os.PathLike | TextIO) -> None:
    """Write the canonical text form: a ``# nodes: N`` header then one edge per line."""
    src, dst = g.edges()
    buf = io.StringIO()
    buf.write(f"# nodes: {g.n}\n")
    for s, d in zip(src.tolist(), dst.tolist()):
        buf.write(f"{s}\t{d}\n")
    text = buf.getvalue()
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        dest.write(text)


def dump_edge_list(g: WebGraph) -> str:
    buf = io.StringIO()
    write_edge_list(g, buf)
    return buf.getvalue()


def save_binary(g: WebGraph, dest: str | os.PathLike | BinaryIO) -> None:
    """Binary cache: magic, n, nnz, then CSR offsets and targets (int64 LE)."""
    payload = (
        BINARY_MAGIC
        + struct.pack("<qq", g.n, g.nnz)
        + g.out_ptr.astype("<i8").tobytes()
        + g.out_idx.astype("<i8").tobytes()
    )
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "wb") as fh:
            fh.write(payload)
    else:
        dest.write(payload)


def load_binary(source: PathOrStream) -> WebGraph:
    fh, owned = _open_binary(source)
    try:
        data = fh.read()
    finally:
        if owned:
            fh.close()
    if not data.startswith(BINARY_MAGIC):
        raise GraphParseError("not a binary graph cache (bad magic)")
    off = len(BINARY_MAGIC)
    try:
        n, nnz = struct.unpack_from("<qq", data, off)
    except struct.error:
        raise GraphParseError("truncated binary graph header") from None
    off += 16
    expected = off + 8 * (n + 1 + nnz)
    if n < 1 or nnz < 0 or len(data) != expected:
        raise GraphParseError("corrupt binary graph cache")
    ptr = np.frombuffer(data, dtype="<i8", count=n + 1, offset=off).astype(np.int64)
    idx = np.frombuffer(data, dtype="<i8", count=nnz, offset=off + 8 * (n + 1)).astype(np.int64)
    if ptr[0] != 0 or ptr[-1] != nnz or np.any(np.diff(ptr) < 0):
        raise GraphParseError("corrupt CSR offsets in binary graph cache")
    src = np.repeat(np.arange(n, dtype=np.int64), np.diff(ptr))
    return WebGraph.from_edges(n, src=src, dst=idx)


def load_labels(path: str | os.PathLike, n: int) -> tuple[str, ...]:
    """Read an ``id<TAB>label`` sidecar; unlisted ids get an empty label."""
    labels = [""] * n
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            key, _, label = line.partition("\t")
            try:
                i = int(key)
            except ValueError:
                raise GraphParseError(f"non-integer id {key!r} in label file", lineno) from None
            if not 0 <= i < n:
                raise GraphParseError(f"label id {i} out of range", lineno)
            labels[i] = label
    return tuple(labels)


def write_labels(labels: Sequence[str], dest: str | os.PathLike) -> None:
    with open(dest, "w", encoding="utf-8", newline="\n") as fh:
        for i, label in enumerate(labels):
            fh.write(f"{i}\t{label}\n")
