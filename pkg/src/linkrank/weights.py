"""Per-page acceleration constants for the degree-weighted HITS iteration.

For a page with in-degree ``i``, out-degree ``o`` and ``deg = i + o > 0``::

    p  = sign(i - o)
    ca = (i / deg) * |i - o| ** p
    ch = (o / deg) * |i - o| ** -p

with ``0 ** 0 = 1`` so balanced pages get ``ca = ch = 1/2``. Pages with no
links at all get zero weights.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .graph import WebGraph


@dataclass(frozen=True)
class WeightDiagonals:
    """Diagonals of the authority (``ca``) and hub (``ch``) weight matrices."""

    ca: np.ndarray
    ch: np.ndarray

    def __len__(self) -> int:
        return len(self.ca)


def degree_weights(indeg: np.ndarray, outdeg: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    indeg = np.asarray(indeg, dtype=np.float64)
    outdeg = np.asarray(outdeg, dtype=np.float64)
    deg = indeg + outdeg
    gap = np.abs(indeg - outdeg)
    ca = np.zeros_like(deg)
    ch = np.zeros_like(deg)

    # numerator/denominator formed in exact integer arithmetic, then one rounding
    more_in = indeg > outdeg
    ca[more_in] = indeg[more_in] * gap[more_in] / deg[more_in]
    ch[more_in] = outdeg[more_in] / (deg[more_in] * gap[more_in])

    more_out = indeg < outdeg
    ca[more_out] = indeg[more_out] / (deg[more_out] * gap[more_out])
    ch[more_out] = outdeg[more_out] * gap[more_out] / deg[more_out]

    balanced = (indeg == outdeg) & (deg > 0)
    ca[balanced] = 0.5
    ch[balanced] = 0.5
    return ca, ch


def compute_weights(g: WebGraph) -> WeightDiagonals:
    ca, ch = degree_weights(g.indeg, g.outdeg)
    ca.setflags(write=False)
    ch.setflags(write=False)
    return WeightDiagonals(ca, ch)


def write_weights_csv(w: WeightDiagonals, dest: str | os.PathLike | TextIO) -> None:
    lines = ["id,ca,ch"]
    lines += [f"{i},{a!r},{h!r}" for i, (a, h) in enumerate(zip(w.ca.tolist(), w.ch.tolist()))]
    text = "\n".join(lines) + "\n"
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        dest.write(text)
