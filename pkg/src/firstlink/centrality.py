"""Betweenness and eigenvector centrality for small first-link graphs.

These exist for contrast with traversal funnels: both reward cycle
members, which funnels by construction score zero.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Union

import numpy as np

from .graph import ABSENT, ArticleTable, FirstLinkGraph
from .traversal import detect_cycles, traverse_path

logger = logging.getLogger(__name__)

EIGEN_TOL = 1e-10
EIGEN_MAX_ITER = 10_000
SCORES_HEADER = "id\ttitle\tmethod\tscore"


class CentralityError(ValueError):
    """Centrality is undefined for the given graph."""


@dataclass(frozen=True, eq=False)
class CentralityScores:
    scores: np.ndarray
    method: str  # "betweenness" or "eigenvector"
    eigenvalue: Optional[float] = None
    iterations: Optional[int] = None
    residual: Optional[float] = None

    def __getitem__(self, node: int) -> float:
        return float(self.scores[node])

    def __len__(self) -> int:
        return int(self.scores.size)


def betweenness(graph: FirstLinkGraph) -> CentralityScores:
    """Directed betweenness, endpoints excluded, normalized by (n-1)(n-2).

    With out-degree at most one, the shortest path from s to t is the
    prefix of the successor walk from s ending at t, so on a walk
    s = p0, p1, ..., p(L-1) node p(i) is interior to exactly L-1-i of the
    pairs starting at s.
    """
    n = graph.n
    if n < 3:
        raise CentralityError(f"betweenness normalization needs n >= 3, got n={n}")
    counts = np.zeros(n, dtype=np.int64)
    for s in range(n):
        path = traverse_path(graph, s)
        length = len(path)
        for i in range(1, length - 1):
            counts[path[i]] += length - 1 - i
    return CentralityScores(counts / float((n - 1) * (n - 2)), "betweenness")


def eigenvector_centrality(
    graph: FirstLinkGraph,
    direction: str = "in",
    tol: float = EIGEN_TOL,
    max_iter: int = EIGEN_MAX_ITER,
) -> CentralityScores:
    """Principal eigenvector by power iteration on the shifted matrix A + I.

    ``direction="in"`` accumulates over incoming links (each node sums the
    scores of the articles linking to it); ``"out"`` uses outgoing links.
    The shift keeps cycles from making the iteration periodic without
    changing eigenvectors.  Scores have unit Euclidean norm.
    """
    if direction not in ("in", "out"):
        raise ValueError(f"direction must be 'in' or 'out', got {direction!r}")
    if len(detect_cycles(graph)) == 0:
        raise CentralityError("graph has no cycle: adjacency spectrum is all zero")
    succ = graph.successor
    src = np.flatnonzero(succ != ABSENT)
    dst = succ[src]

    def apply(v: np.ndarray) -> np.ndarray:
        out = np.zeros_like(v)
        if direction == "in":
            np.add.at(out, dst, v[src])
        else:
            out[src] = v[dst]
        return out

    x = np.full(graph.n, 1.0 / np.sqrt(graph.n))
    delta = np.inf
    for it in range(1, max_iter + 1):
        y = x + apply(x)
        y /= np.linalg.norm(y)
        delta = float(np.abs(y - x).max())
        x = y
        if delta < tol:
            break
    else:
        raise CentralityError(
            f"power iteration did not converge in {max_iter} iterations "
            f"(last sup-norm change {delta:.3e}, max entry {x.max():.6g})"
        )
    ax = apply(x)
    lam = float(x @ ax)
    residual = float(np.abs(ax - lam * x).max())
    return CentralityScores(x, "eigenvector", lam, it, residual)


def write_scores(
    path: Union[str, Path], results: Iterable[CentralityScores], table: Optional[ArticleTable] = None
) -> None:
    """TSV of ``id title method score``, one block per method."""
    lines = [SCORES_HEADER]
    for res in results:
        for node, score in enumerate(res.scores):
            title = table.title_of(node) if table is not None else str(node)
            lines.append(f"{node}\t{title}\t{res.method}\t{float(score)!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
