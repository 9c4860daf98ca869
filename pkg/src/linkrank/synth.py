"""Seeded synthetic web graphs with power-law degree tails.

Directed configuration model: out-degree targets for the linking pages and
in-degree targets for all pages are drawn from truncated power laws, stubs
are paired at random and self-loops/duplicate edges are rejected. Rejected
stubs get a few re-pairing rounds before they are dropped.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .graph import WebGraph

_REWIRE_ROUNDS = 20


class InfeasibleSpecError(ValueError):
    pass


@dataclass(frozen=True)
class SynthSpec:
    n: int
    target_avg_degree: float = 8.0
    in_exponent: float = 2.1
    out_exponent: float = 2.7
    dangling_fraction: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise InfeasibleSpecError(f"n must be >= 2, got {self.n}")
        if not self.target_avg_degree > 0:
            raise InfeasibleSpecError("target_avg_degree must be positive")
        if not (self.in_exponent > 1 and self.out_exponent > 1):
            raise InfeasibleSpecError("power-law exponents must exceed 1")
        if not 0 <= self.dangling_fraction < 1:
            raise InfeasibleSpecError("dangling_fraction must lie in [0, 1)")
        if not 0 <= self.seed < 2**64:
            raise InfeasibleSpecError("seed must be an unsigned 64-bit value")

    def as_dict(self) -> dict:
        return asdict(self)


def _power_law(rng: np.random.Generator, size: int, exponent: float, upper: float) -> np.ndarray:
    """Continuous power law on ``[1, upper]`` with density ~ x**-exponent."""
    s = exponent - 1.0
    tail = upper ** -s
    u = rng.random(size)
    return (1.0 - u * (1.0 - tail)) ** (-1.0 / s)


def _allocate(rng, total: int, weights: np.ndarray, floor: int, cap: int) -> np.ndarray:
    """Split ``total`` into integer counts in ``[floor, cap]`` proportional to ``weights``."""
    counts = np.full(len(weights), floor, dtype=np.int64)
    remaining = total - counts.sum()
    p = weights / weights.sum()
    while remaining > 0:
        counts += rng.multinomial(remaining, p)
        over = counts > cap
        remaining = int((counts[over] - cap).sum())
        counts[over] = cap
        if remaining:
            p = np.where(counts < cap, weights, 0.0)
            p = p / p.sum()
    return counts


def generate(spec: SynthSpec) -> WebGraph:
    n = spec.n
    rng = np.random.default_rng(spec.seed)
    total = int(round(spec.target_avg_degree * n))
    n_dangling = int(round(spec.dangling_fraction * n))
    linkers = np.sort(rng.permutation(n)[n_dangling:])
    if len(linkers) == 0 or total > len(linkers) * (n - 1) or total < len(linkers):
        raise InfeasibleSpecError(
            f"cannot place {total} edges on {len(linkers)} linking pages of an n={n} graph"
        )

    out_w = _power_law(rng, len(linkers), spec.out_exponent, n - 1)
    outdeg = _allocate(rng, total, out_w, 1, n - 1)
    in_w = _power_law(rng, n, spec.in_exponent, n - 1)
    indeg = _allocate(rng, total, in_w, 0, n - 1)

    src = np.repeat(linkers, outdeg)
    dst_pool = np.repeat(np.arange(n, dtype=np.int64), indeg)
    accepted = np.empty(0, dtype=np.int64)
    for _ in range(_REWIRE_ROUNDS + 1):
        dst = rng.permutation(dst_pool)
        keys = src * n + dst
        _, first = np.unique(keys, return_index=True)
        fresh = np.zeros(len(keys), dtype=bool)
        fresh[first] = True
        ok = fresh & (src != dst) & ~np.isin(keys, accepted)
        accepted = np.union1d(accepted, keys[ok])
        src, dst_pool = src[~ok], dst[~ok]
        if len(src) == 0:
            break
    return WebGraph._from_sorted(n, accepted // n, accepted % n)
