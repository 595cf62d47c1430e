"""Traversal metrics over a first-link graph.

Every start node defines one path: follow successors until a node would be
revisited or the first link is missing.  From those paths come

* visits: how many paths contain a node,
* funnels: how many paths contain a node before the path enters a cycle,
* path length: how many links a path traverses.

The linear kernels here never materialize the paths; ``visits_matrix_oracle``
does, for small graphs, so the two can be checked against each other.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import partial
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ._parallel import merge_counts, ordered_map, split_range
from .graph import ABSENT, FirstLinkGraph, rank_nodes

logger = logging.getLogger(__name__)

DEFAULT_ORACLE_BOUND = 2000


@dataclass(frozen=True)
class CycleSet:
    """Terminal cycles, each rotated to start at its smallest id."""

    cycles: Tuple[Tuple[int, ...], ...]
    cycle_id: np.ndarray  # ABSENT for nodes off every cycle

    @property
    def in_cycle(self) -> np.ndarray:
        return self.cycle_id != ABSENT

    def lengths(self) -> np.ndarray:
        return np.array([len(c) for c in self.cycles], dtype=np.int64)

    def __len__(self) -> int:
        return len(self.cycles)


@dataclass(frozen=True)
class TraversalStats:
    visits: np.ndarray
    funnels: np.ndarray
    path_length: np.ndarray


@dataclass(frozen=True)
class PathGroup:
    seed: int
    members: Tuple[int, ...]
    score: int


@dataclass(frozen=True)
class VisitMatrix:
    """Dense 0/1 matrix: ``entries[v, j] == 1`` iff the path from ``j`` contains ``v``."""

    entries: np.ndarray

    def row_sums(self) -> np.ndarray:
        return self.entries.sum(axis=1, dtype=np.int64)

    def column_sums(self) -> np.ndarray:
        return self.entries.sum(axis=0, dtype=np.int64)


@dataclass
class StepCounter:
    """Successor dereferences performed by ``compute_funnels``."""

    steps: int = 0


def detect_cycles(graph: FirstLinkGraph) -> CycleSet:
    """Find every cycle of the successor function.

    Each walk stamps the nodes it passes with its start id and stops at the
    first node already stamped.  Landing on a node carrying the current
    stamp means the walk closed a loop; landing on an older stamp means it
    joined a tree that was already resolved.  Every node is stamped once,
    so the whole pass is linear.
    """
    succ = graph.successor.tolist()
    n = len(succ)
    stamp = [0] * n
    found: List[Tuple[int, ...]] = []
    for s in range(n):
        if stamp[s]:
            continue
        mark = s + 1
        v = s
        while v != ABSENT and not stamp[v]:
            stamp[v] = mark
            v = succ[v]
        if v != ABSENT and stamp[v] == mark:
            cyc = [v]
            u = succ[v]
            while u != v:
                cyc.append(u)
                u = succ[u]
            k = cyc.index(min(cyc))
            found.append(tuple(cyc[k:] + cyc[:k]))
    found.sort(key=lambda c: c[0])
    cycle_id = np.full(n, ABSENT, dtype=np.int64)
    for i, cyc in enumerate(found):
        cycle_id[list(cyc)] = i
    return CycleSet(tuple(found), cycle_id)


def traverse_path(graph: FirstLinkGraph, start: int) -> List[int]:
    """The path from ``start``: stops before a revisit or at a missing link."""
    if not 0 <= start < graph.n:
        raise IndexError(f"start {start} out of range for n={graph.n}")
    succ = graph.successor
    path = [start]
    seen = {start}
    v = int(succ[start])
    while v != ABSENT and v not in seen:
        path.append(v)
        seen.add(v)
        v = int(succ[v])
    return path


def _leaf_order(succ: List[int], in_cycle: Sequence[bool]) -> List[int]:
    """Off-cycle nodes ordered so every node precedes its successor."""
    n = len(succ)
    indeg = [0] * n
    for t in succ:
        if t != ABSENT:
            indeg[t] += 1
    stack = [v for v in range(n) if indeg[v] == 0]
    order = []
    while stack:
        v = stack.pop()
        order.append(v)
        t = succ[v]
        if t != ABSENT and not in_cycle[t]:
            indeg[t] -= 1
            if indeg[t] == 0:
                stack.append(t)
    return order


def _accumulate(graph: FirstLinkGraph, cycles: CycleSet, lo: int, hi: int) -> np.ndarray:
    """Visits contributed by the paths starting in ``[lo, hi)``.

    Off-cycle counts flow down the trees; everything reaching a cycle is
    pooled, and every member of that cycle sees the whole pool.
    """
    succ = graph.successor.tolist()
    cid = cycles.cycle_id.tolist()
    in_cycle = [c != ABSENT for c in cid]
    n = len(succ)
    acc = [0] * n
    for v in range(lo, hi):
        acc[v] = 1
    pool = [0] * len(cycles)
    for k, cyc in enumerate(cycles.cycles):
        pool[k] = sum(acc[v] for v in cyc)
    for v in _leaf_order(succ, in_cycle):
        t = succ[v]
        if t == ABSENT:
            continue
        if in_cycle[t]:
            pool[cid[t]] += acc[v]
        else:
            acc[t] += acc[v]
    for k, cyc in enumerate(cycles.cycles):
        for v in cyc:
            acc[v] = pool[k]
    return np.array(acc, dtype=np.int64)


def compute_visits(
    graph: FirstLinkGraph, cycles: Optional[CycleSet] = None, workers: int = 1
) -> np.ndarray:
    """Number of paths containing each node.

    Start nodes are split into contiguous ranges; each range yields its own
    counter and the counters are summed, so the result does not depend on
    ``workers``.
    """
    if cycles is None:
        cycles = detect_cycles(graph)
    ranges = split_range(graph.n, workers)
    parts = ordered_map(partial(_accumulate_range, graph, cycles), ranges, workers)
    return merge_counts(parts, graph.n)


def _accumulate_range(graph, cycles, bounds):
    return _accumulate(graph, cycles, *bounds)


def compute_path_lengths(graph: FirstLinkGraph, cycles: Optional[CycleSet] = None) -> np.ndarray:
    """Links traversed from each start node.

    The closing link back into the path counts, so every start on a
    k-cycle gets k.  The exceptions are a node linking to itself and a
    node with no first link: both get 0.
    """
    if cycles is None:
        cycles = detect_cycles(graph)
    succ = graph.successor.tolist()
    in_cycle = cycles.in_cycle.tolist()
    length = [0] * len(succ)
    for cyc in cycles.cycles:
        for v in cyc:
            length[v] = len(cyc)
    for v in reversed(_leaf_order(succ, in_cycle)):
        t = succ[v]
        length[v] = 0 if t == ABSENT else 1 + length[t]
    out = np.array(length, dtype=np.int64)
    for cyc in cycles.cycles:
        if len(cyc) == 1:
            out[cyc[0]] = 0
    return out


def _funnel_walk(graph: FirstLinkGraph, in_cycle: np.ndarray, bounds: Tuple[int, int]):
    """Walk every start in ``bounds`` forward until it enters a cycle.

    All walks advance in lockstep; each round credits the current node of
    every live walk and then dereferences its successor once.
    """
    lo, hi = bounds
    succ = graph.successor
    funnels = np.zeros(graph.n, dtype=np.int64)
    steps = 0
    frontier = np.arange(lo, hi, dtype=np.int64)
    frontier = frontier[~in_cycle[frontier]]
    while frontier.size:
        np.add.at(funnels, frontier, 1)
        nxt = succ[frontier]
        steps += int(frontier.size)
        nxt = nxt[nxt != ABSENT]
        frontier = nxt[~in_cycle[nxt]]
    return funnels, steps


def compute_funnels(
    graph: FirstLinkGraph,
    cycles: CycleSet,
    workers: int = 1,
    counter: Optional[StepCounter] = None,
) -> np.ndarray:
    """Number of paths each node directs before they reach a cycle.

    Cycle members always get 0.  A path that never reaches a cycle credits
    every node on it.  Cost is the total pre-cycle path length, which is
    linear in n when depth is bounded.
    """
    if cycles.cycle_id.size != graph.n:
        raise ValueError("cycles were computed on a different graph")
    in_cycle = cycles.in_cycle
    ranges = split_range(graph.n, workers)
    parts = ordered_map(partial(_funnel_walk, graph, in_cycle), ranges, workers)
    if counter is not None:
        counter.steps += sum(s for _, s in parts)
    return merge_counts((f for f, _ in parts), graph.n)


def pre_cycle_length(graph: FirstLinkGraph, cycles: CycleSet) -> np.ndarray:
    """Nodes on each path before its cycle entry, counting the start node."""
    succ = graph.successor.tolist()
    in_cycle = cycles.in_cycle.tolist()
    depth = [0] * len(succ)
    for v in reversed(_leaf_order(succ, in_cycle)):
        t = succ[v]
        depth[v] = 1 if t == ABSENT else 1 + depth[t]
    return np.array(depth, dtype=np.int64)


def compute_stats(graph: FirstLinkGraph, workers: int = 1) -> Tuple[CycleSet, TraversalStats]:
    cycles = detect_cycles(graph)
    stats = TraversalStats(
        visits=compute_visits(graph, cycles, workers=workers),
        funnels=compute_funnels(graph, cycles, workers=workers),
        path_length=compute_path_lengths(graph, cycles),
    )
    return cycles, stats


def enumerate_k_cycles(cycles: CycleSet, k: int) -> List[Tuple[int, ...]]:
    if k < 1:
        raise ValueError("cycle length must be >= 1")
    return [c for c in cycles.cycles if len(c) == k]


def rank_cycles(
    cycle_list: Sequence[Tuple[int, ...]], visits: np.ndarray
) -> List[Tuple[Tuple[int, ...], int]]:
    """Cycles by summed member visits, descending; ties by smallest member."""
    scored = [(c, int(visits[list(c)].sum())) for c in cycle_list]
    scored.sort(key=lambda cs: (-cs[1], cs[0][0]))
    return scored


def cycle_census(cycles: CycleSet) -> Dict[int, int]:
    """Cycle count per length, ascending by length."""
    lengths, counts = np.unique(cycles.lengths(), return_counts=True)
    return {int(k): int(c) for k, c in zip(lengths, counts)}


def path_connected_groups(
    graph: FirstLinkGraph,
    cycles: CycleSet,
    visits: np.ndarray,
    top_k: int,
    funnels: Optional[np.ndarray] = None,
) -> List[PathGroup]:
    """Groups seeded at the ``top_k`` nodes by funnels.

    A group is the seed's path: down its tree, then once around the cycle
    it ends in (or to the end of the chain when there is no cycle).
    """
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    if funnels is None:
        funnels = compute_funnels(graph, cycles)
    groups = []
    for seed, _ in rank_nodes(funnels)[:top_k]:
        members = tuple(traverse_path(graph, seed))
        groups.append(PathGroup(seed, members, int(visits[list(members)].sum())))
    groups.sort(key=lambda g: (-g.score, g.seed))
    return groups


def visits_matrix_oracle(
    graph: FirstLinkGraph, bound: int = DEFAULT_ORACLE_BOUND
) -> VisitMatrix:
    """Materialize every path as a column of a 0/1 matrix (small graphs only)."""
    n = graph.n
    if n > bound:
        raise MemoryError(f"oracle refused: n={n} exceeds bound {bound}")
    entries = np.zeros((n, n), dtype=np.uint8)
    for j in range(n):
        entries[traverse_path(graph, j), j] = 1
    return VisitMatrix(entries)


def path_length_oracle(graph: FirstLinkGraph, start: int) -> int:
    """Count links along the explicit path, using the same self-link rule."""
    path = traverse_path(graph, start)
    last = graph.succ_of(path[-1])
    if last is None:
        return len(path) - 1
    if len(path) == 1:
        return 0  # links to itself
    return len(path)


@dataclass(frozen=True)
class DistributionSummary:
    count: int
    median: float
    q1: float
    q3: float
    max: float
    _sorted: np.ndarray

    def count_below(self, threshold: float) -> int:
        return int(np.searchsorted(self._sorted, threshold, side="left"))


def distribution_summary(values) -> DistributionSummary:
    arr = np.sort(np.asarray(values, dtype=np.float64).reshape(-1))
    if arr.size == 0:
        raise ValueError("distribution_summary of empty input")
    q1, med, q3 = np.quantile(arr, [0.25, 0.5, 0.75])
    return DistributionSummary(int(arr.size), float(med), float(q1), float(q3), float(arr[-1]), arr)
