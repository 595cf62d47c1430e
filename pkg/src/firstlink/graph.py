"""Functional graph of first links: dense ids, successor array, persistence."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

#: Marker for a node without a first link.
ABSENT = -1

EDGE_HEADER = "source\ttarget"


class GraphError(ValueError):
    """Raised for malformed edge input (duplicates, bad lines)."""


def canonical_title(title: str) -> str:
    """Normalize a title the way MediaWiki resolves link targets.

    Underscores become spaces, whitespace runs collapse, and the first
    character is uppercased.
    """
    text = " ".join(title.replace("_", " ").split())
    if not text:
        return ""
    return text[0].upper() + text[1:]


class ArticleTable:
    """Bidirectional interning of canonical titles to dense integer ids."""

    def __init__(self, titles: Iterable[str] = ()):
        self._titles: list[str] = []
        self._index: dict[str, int] = {}
        for t in titles:
            self.intern(t)

    def intern(self, title: str) -> int:
        key = canonical_title(title)
        if not key:
            raise GraphError(f"empty title: {title!r}")
        found = self._index.get(key)
        if found is not None:
            return found
        self._index[key] = len(self._titles)
        self._titles.append(key)
        return len(self._titles) - 1

    def lookup(self, title: str) -> Optional[int]:
        return self._index.get(canonical_title(title))

    def title_of(self, article_id: int) -> str:
        return self._titles[article_id]

    @property
    def titles(self) -> Tuple[str, ...]:
        return tuple(self._titles)

    def __len__(self) -> int:
        return len(self._titles)

    def __contains__(self, title: str) -> bool:
        return canonical_title(title) in self._index

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ArticleTable):
            return NotImplemented
        return self._titles == other._titles


class FirstLinkGraph:
    """Immutable successor array; ``successor[v] == ABSENT`` means no first link."""

    __slots__ = ("_successor",)

    def __init__(self, successor: Union[Sequence[int], np.ndarray]):
        succ = np.array(successor, dtype=np.int64).reshape(-1)
        n = succ.size
        if n and (succ.min() < ABSENT or succ.max() >= n):
            raise GraphError("successor ids must be ABSENT or in [0, n)")
        succ.setflags(write=False)
        self._successor = succ

    @property
    def n(self) -> int:
        return int(self._successor.size)

    @property
    def successor(self) -> np.ndarray:
        return self._successor

    def succ_of(self, v: int) -> Optional[int]:
        t = int(self._successor[v])
        return None if t == ABSENT else t

    def has_successor(self) -> np.ndarray:
        return self._successor != ABSENT

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FirstLinkGraph):
            return NotImplemented
        return np.array_equal(self._successor, other._successor)

    def __repr__(self) -> str:
        return f"FirstLinkGraph(n={self.n}, edges={int(self.has_successor().sum())})"

    def __reduce__(self):
        return (FirstLinkGraph, (np.asarray(self._successor),))


def build_graph(
    edges: Iterable[Tuple[str, Optional[str]]],
) -> Tuple[FirstLinkGraph, ArticleTable]:
    """Intern an edge list into a graph.

    Sources get ids in input order; targets never seen as a source are
    appended afterwards, in order of first reference, with no successor.
    """
    edges = list(edges)
    table = ArticleTable()
    seen: set[int] = set()
    for source, _ in edges:
        sid = table.intern(source)
        if sid in seen:
            raise GraphError(f"duplicate source title: {table.title_of(sid)!r}")
        seen.add(sid)

    n_sources = len(table)
    targets = []
    for _, target in edges:
        if target is None or not canonical_title(target):
            targets.append(ABSENT)
        else:
            targets.append(table.intern(target))

    successor = np.full(len(table), ABSENT, dtype=np.int64)
    # sources occupy ids 0..n_sources-1 in input order
    successor[:n_sources] = targets
    return FirstLinkGraph(successor), table


@dataclass(frozen=True)
class DegreeStats:
    in_degree: np.ndarray
    mean: float
    std: float
    quantiles: dict = field(default_factory=dict)

    def fraction_above(self, k: int) -> float:
        if self.in_degree.size == 0:
            return 0.0
        return float(np.count_nonzero(self.in_degree > k)) / self.in_degree.size


DEGREE_QUANTILES = (0.25, 0.5, 0.75, 0.99)


def in_degree(graph: FirstLinkGraph) -> DegreeStats:
    succ = graph.successor
    counts = np.bincount(succ[succ != ABSENT], minlength=graph.n).astype(np.int64)
    if counts.size == 0:
        return DegreeStats(counts, float("nan"), float("nan"), {})
    qs = {q: float(np.quantile(counts, q)) for q in DEGREE_QUANTILES}
    return DegreeStats(counts, float(counts.mean()), float(counts.std()), qs)


def rank_nodes(values: Union[Sequence[float], np.ndarray]) -> list[Tuple[int, float]]:
    """Order node ids by descending value, ties by ascending id."""
    vals = np.asarray(values)
    if vals.size == 0:
        return []
    ids = np.arange(vals.size)
    order = np.lexsort((ids, -vals.astype(np.float64)))
    return [(int(i), vals[i].item()) for i in order]


def save_edges(
    path: Union[str, Path],
    graph: FirstLinkGraph,
    table: ArticleTable,
    provenance: Optional[str] = None,
) -> None:
    """Write one ``source<TAB>target`` line per node, in id order.

    ``provenance`` becomes a leading ``#`` comment line (titles can never
    start with ``#``, so the reader can skip it safely).
    """
    if len(table) != graph.n:
        raise GraphError("table and graph sizes differ")
    lines = []
    if provenance is not None:
        lines.append(f"# {provenance}")
    lines.append(EDGE_HEADER)
    titles = table.titles
    for v, t in enumerate(graph.successor.tolist()):
        src = titles[v]
        dst = "" if t == ABSENT else titles[t]
        if "\t" in src or "\n" in src:
            raise GraphError(f"title contains tab or newline: {src!r}")
        lines.append(f"{src}\t{dst}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_edges(path: Union[str, Path]) -> Tuple[FirstLinkGraph, ArticleTable]:
    edges: list[Tuple[str, Optional[str]]] = []
    line_of: dict[str, int] = {}
    header_seen = False
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not header_seen:
                if line.startswith("#"):
                    continue
                if line != EDGE_HEADER:
                    raise GraphError(f"{path}:{lineno}: expected header {EDGE_HEADER!r}")
                header_seen = True
                continue
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0]:
                raise GraphError(f"{path}:{lineno}: malformed edge line {line!r}")
            key = canonical_title(parts[0])
            if key in line_of:
                raise GraphError(
                    f"{path}:{lineno}: duplicate source {key!r} (first on line {line_of[key]})"
                )
            line_of[key] = lineno
            edges.append((parts[0], parts[1] or None))
    if not header_seen:
        raise GraphError(f"{path}: missing header line")
    return build_graph(edges)
