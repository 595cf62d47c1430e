"""End-to-end commands: extract, analyze, fit, join page views, verify.

Every output file starts with a ``# firstlink <version> config=<hash>``
line.  The hash covers result-affecting settings only, so outputs are
byte-identical across worker counts.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import __version__
from .centrality import CentralityError, betweenness, eigenvector_centrality, write_scores
from .graph import ABSENT, ArticleTable, FirstLinkGraph, GraphError, build_graph, canonical_title, in_degree, load_edges, rank_nodes, save_edges
from .scalefree import ALTERNATIVES, FitError, ccdf, compare_distributions, fit_power_law, rank_frequency_series
from .traversal import (
    DEFAULT_ORACLE_BOUND,
    cycle_census,
    compute_stats,
    distribution_summary,
    path_connected_groups,
    path_length_oracle,
    rank_cycles,
    visits_matrix_oracle,
)
from .wikiparse import DumpError, load_blocklist, shard_parse
from .wikiparse.dump import DEFAULT_PAGE_CAP

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
METRIC_COLUMNS = ("id", "title", "in_degree", "visits", "funnels", "path_length")
MEMBER_SEP = "|"  # cannot occur in a MediaWiki title


class InputError(Exception):
    """Bad or unreadable user input (exit status 1)."""


class InvariantError(Exception):
    """An internal cross-check failed (exit status 2)."""


@dataclass(frozen=True)
class RunConfig:
    workers: int = 1
    oracle_bound: int = DEFAULT_ORACLE_BOUND
    top_k: int = 10
    xmin_max: Optional[int] = None
    min_tail: int = 50
    blocklist: Optional[str] = None
    page_cap: int = DEFAULT_PAGE_CAP

    def validate(self, inputs: Sequence[PathLike] = ()) -> None:
        if self.workers < 1:
            raise InputError(f"workers must be >= 1, got {self.workers}")
        if self.top_k < 1:
            raise InputError(f"top-k must be >= 1, got {self.top_k}")
        if self.oracle_bound < 0:
            raise InputError(f"oracle bound must be >= 0, got {self.oracle_bound}")
        for p in list(inputs) + ([self.blocklist] if self.blocklist else []):
            if not Path(p).is_file():
                raise InputError(f"input not found: {p}")

    def config_hash(self) -> str:
        settings = asdict(self)
        del settings["workers"]
        if self.blocklist:
            settings["blocklist"] = hashlib.sha256(Path(self.blocklist).read_bytes()).hexdigest()
        blob = json.dumps(settings, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]

    def provenance(self) -> str:
        return f"firstlink {__version__} config={self.config_hash()}"

    def header(self) -> str:
        return f"# {self.provenance()}"


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _write_tsv(path: PathLike, config: RunConfig, columns: Sequence[str], rows) -> None:
    lines = [config.header(), "\t".join(columns)]
    lines.extend("\t".join(_fmt(v) for v in row) for row in rows)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _load_graph(path: PathLike) -> Tuple[FirstLinkGraph, ArticleTable]:
    try:
        return load_edges(path)
    except (GraphError, OSError, UnicodeDecodeError) as exc:
        raise InputError(str(exc)) from exc


# --- extract ---------------------------------------------------------------


def cmd_extract(dump: PathLike, out: PathLike, config: RunConfig) -> Tuple[FirstLinkGraph, ArticleTable]:
    """Dump to edge-list TSV."""
    config.validate([dump])
    blocklist = load_blocklist(config.blocklist) if config.blocklist else None
    try:
        edges = shard_parse(dump, config.workers, config.page_cap, blocklist)
        graph, table = build_graph(edges)
    except (DumpError, GraphError, OSError) as exc:
        raise InputError(str(exc)) from exc
    save_edges(out, graph, table, provenance=config.provenance())
    logger.info("extracted %d pages, %d nodes", len(edges), graph.n)
    return graph, table


# --- analyze ---------------------------------------------------------------


def check_against_oracle(graph: FirstLinkGraph, stats) -> None:
    """Compare the linear kernels with the explicit visit matrix."""
    matrix = visits_matrix_oracle(graph, bound=graph.n)
    if not np.array_equal(matrix.row_sums(), stats.visits):
        bad = int(np.flatnonzero(matrix.row_sums() != stats.visits)[0])
        raise InvariantError(f"visits disagree with path oracle at node {bad}")
    lengths = np.array([path_length_oracle(graph, v) for v in range(graph.n)], dtype=np.int64)
    if not np.array_equal(lengths, stats.path_length):
        bad = int(np.flatnonzero(lengths != stats.path_length)[0])
        raise InvariantError(f"path length disagrees with path oracle at node {bad}")


def cmd_analyze(
    edges: PathLike, out_dir: PathLike, config: RunConfig, centrality: bool = False
) -> Dict[str, Path]:
    """Metric TSVs, cycle census, top cycles, top path-connected groups, summary."""
    config.validate([edges])
    graph, table = _load_graph(edges)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    titles = table.titles

    cycles, stats = compute_stats(graph, workers=config.workers)
    degree = in_degree(graph)
    checked = 0 < graph.n <= config.oracle_bound
    if checked:
        check_against_oracle(graph, stats)
    problems = verify_laws(graph, degree.in_degree, stats.visits, stats.funnels)
    if problems:
        raise InvariantError(f"{len(problems)} recursive-law violations, first: {problems[0]}")

    files = {name: out / f"{name}.tsv" for name in ("metrics", "cycles", "top_cycles", "groups", "summary")}
    _write_tsv(
        files["metrics"], config, METRIC_COLUMNS,
        ((v, titles[v], degree.in_degree[v], stats.visits[v], stats.funnels[v], stats.path_length[v])
         for v in range(graph.n)),
    )
    _write_tsv(files["cycles"], config, ("length", "count"), cycle_census(cycles).items())

    ranked = rank_cycles(cycles.cycles, stats.visits)[: config.top_k]
    _write_tsv(
        files["top_cycles"], config, ("rank", "length", "score", "members"),
        ((r, len(c), s, MEMBER_SEP.join(titles[v] for v in c)) for r, (c, s) in enumerate(ranked, 1)),
    )

    groups = path_connected_groups(graph, cycles, stats.visits, config.top_k, stats.funnels) if graph.n else []
    _write_tsv(
        files["groups"], config, ("rank", "seed", "score", "size", "members"),
        ((r, titles[g.seed], g.score, len(g.members), MEMBER_SEP.join(titles[v] for v in g.members))
         for r, g in enumerate(groups, 1)),
    )

    rows: List[Tuple[str, object]] = [
        ("nodes", graph.n),
        ("links", int(np.count_nonzero(graph.successor != ABSENT))),
        ("cycles", len(cycles)),
        ("nodes_in_cycles", int(np.count_nonzero(cycles.in_cycle))),
        ("oracle_checked", "yes" if checked else "no"),
    ]
    if graph.n:
        pl = distribution_summary(stats.path_length)
        rows += [
            ("in_degree_mean", degree.mean),
            ("in_degree_sd", degree.std),
            ("path_length_median", pl.median),
            ("path_length_q1", pl.q1),
            ("path_length_q3", pl.q3),
            ("path_length_max", pl.max),
        ]
    top_funnel = rank_nodes(stats.funnels)[:1]
    if top_funnel:
        rows.append(("top_funnels", titles[top_funnel[0][0]]))
    _write_tsv(files["summary"], config, ("key", "value"), rows)

    if centrality:
        files["centrality"] = out / "centrality.tsv"
        _write_centrality(files["centrality"], graph, table, config)
    return files


def _write_centrality(path: Path, graph: FirstLinkGraph, table: ArticleTable, config: RunConfig) -> None:
    if graph.n > config.oracle_bound:
        raise InputError(f"centrality is limited to graphs with n <= {config.oracle_bound}, got {graph.n}")
    results = []
    for method in (betweenness, eigenvector_centrality):
        try:
            results.append(method(graph))
        except CentralityError as exc:
            logger.warning("%s skipped: %s", method.__name__, exc)
    write_scores(path, results, table)
    text = path.read_text(encoding="utf-8")
    path.write_text(config.header() + "\n" + text, encoding="utf-8")


# --- verify ----------------------------------------------------------------


def _peel_cycles(graph: FirstLinkGraph) -> np.ndarray:
    """Cycle membership by repeatedly deleting nodes nothing links to."""
    succ = graph.successor
    indeg = np.bincount(succ[succ != ABSENT], minlength=graph.n)
    alive = np.ones(graph.n, dtype=bool)
    frontier = list(np.flatnonzero(indeg == 0))
    while frontier:
        v = frontier.pop()
        alive[v] = False
        w = succ[v]
        if w != ABSENT:
            indeg[w] -= 1
            if indeg[w] == 0:
                frontier.append(w)
    return alive


def verify_laws(
    graph: FirstLinkGraph, indeg: np.ndarray, visits: np.ndarray, funnels: np.ndarray
) -> List[str]:
    """Violations of the recursive laws, found without the traversal kernels.

    Off-cycle nodes: visits and funnels both equal 1 plus the sum over the
    nodes linking in.  Cycle nodes: funnels are 0 and visits equal the size
    of the component (its basin).
    """
    n = graph.n
    succ = graph.successor
    on_cycle = _peel_cycles(graph)
    src = np.flatnonzero(succ != ABSENT)
    problems = []
    expected_deg = np.bincount(succ[src], minlength=n)
    for v in np.flatnonzero(expected_deg != indeg)[:5]:
        problems.append(f"node {v}: in_degree {indeg[v]} != {expected_deg[v]}")
    child_visits = np.zeros(n, dtype=np.int64)
    child_funnels = np.zeros(n, dtype=np.int64)
    feeders = src[~on_cycle[src]]
    np.add.at(child_visits, succ[feeders], visits[feeders])
    np.add.at(child_funnels, succ[feeders], funnels[feeders])
    off = ~on_cycle
    for v in np.flatnonzero(off & (visits != 1 + child_visits))[:5]:
        problems.append(f"node {v}: visits {visits[v]} != 1 + {child_visits[v]}")
    for v in np.flatnonzero(off & (funnels != 1 + child_funnels))[:5]:
        problems.append(f"node {v}: funnels {funnels[v]} != 1 + {child_funnels[v]}")
    for v in np.flatnonzero(on_cycle & (funnels != 0))[:5]:
        problems.append(f"cycle node {v}: funnels {funnels[v]} != 0")
    if n:
        adj = coo_matrix((np.ones(src.size), (src, succ[src])), shape=(n, n))
        _, comp = connected_components(adj, directed=True, connection="weak")
        size = np.bincount(comp)[comp]
        for v in np.flatnonzero(on_cycle & (visits != size))[:5]:
            problems.append(f"cycle node {v}: visits {visits[v]} != basin size {size[v]}")
    return problems


def read_metrics(path: PathLike) -> Tuple[List[str], List[List[str]]]:
    header: Optional[List[str]] = None
    rows = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if header is None:
                    header = parts
                    continue
                if len(parts) != len(header):
                    raise InputError(f"{path}:{lineno}: expected {len(header)} fields, got {len(parts)}")
                rows.append(parts)
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(str(exc)) from exc
    if header is None:
        raise InputError(f"{path}: no column header")
    return header, rows


def metric_column(path: PathLike, column: str) -> Tuple[List[str], np.ndarray]:
    """Titles and integer values of one column of a metrics TSV."""
    header, rows = read_metrics(path)
    if column not in header:
        raise InputError(f"{path}: no column {column!r}; available: {', '.join(header)}")
    k = header.index(column)
    t = header.index("title") if "title" in header else None
    try:
        values = np.array([int(r[k]) for r in rows], dtype=np.int64)
    except ValueError as exc:
        raise InputError(f"{path}: column {column!r} is not integer: {exc}") from exc
    titles = [r[t] if t is not None else str(i) for i, r in enumerate(rows)]
    return titles, values


def cmd_verify(edges: PathLike, metrics: PathLike) -> List[str]:
    """Recheck a metrics TSV against its edge list; returns violations."""
    graph, table = _load_graph(edges)
    header, rows = read_metrics(metrics)
    missing = [c for c in METRIC_COLUMNS if c not in header]
    if missing:
        raise InputError(f"{metrics}: missing columns {missing}")
    if len(rows) != graph.n:
        raise InputError(f"{metrics}: {len(rows)} rows for {graph.n} nodes")
    cols = {c: header.index(c) for c in METRIC_COLUMNS}
    for v, r in enumerate(rows):
        if int(r[cols["id"]]) != v or r[cols["title"]] != table.title_of(v):
            raise InputError(f"{metrics}: row {v} does not match node {v} ({table.title_of(v)!r})")
    get = lambda c: np.array([int(r[cols[c]]) for r in rows], dtype=np.int64)
    return verify_laws(graph, get("in_degree"), get("visits"), get("funnels"))


# --- fit -------------------------------------------------------------------


def cmd_fit(
    metrics: PathLike,
    column: str,
    out: PathLike,
    config: RunConfig,
    alternatives: Sequence[str] = ALTERNATIVES,
    series_dir: Optional[PathLike] = None,
):
    """Power-law fit of one metric (zeros dropped) with alternative comparisons."""
    config.validate([metrics])
    _, values = metric_column(metrics, column)
    positive = values[values > 0]
    logger.info("%s: %d values, %d zeros dropped", column, values.size, values.size - positive.size)
    try:
        fit = fit_power_law(positive, min_tail=config.min_tail, xmin_max=config.xmin_max)
    except FitError as exc:
        raise InputError(f"cannot fit {column!r}: {exc}") from exc
    comparisons = [compare_distributions(positive, fit, name) for name in alternatives]

    lines = [
        config.header(),
        "\t".join(("metric", "xmin", "gamma", "alpha", "ks_distance", "n_tail", "n_used", "n_zero")),
        "\t".join(_fmt(v) for v in (column, fit.xmin, fit.gamma, fit.alpha, fit.ks_distance,
                                    fit.n_tail, positive.size, values.size - positive.size)),
        "",
        "\t".join(("alternative", "R", "p", "converged", "favors", "message")),
    ]
    for c in comparisons:
        lines.append("\t".join(_fmt(v) for v in (c.alternative, c.R, c.p, c.converged, c.favors(0.05), c.message)))
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")

    if series_dir is not None:
        sd = Path(series_dir)
        sd.mkdir(parents=True, exist_ok=True)
        _write_tsv(sd / f"{column}_rank_frequency.tsv", config, ("rank", column), rank_frequency_series(positive))
        _write_tsv(sd / f"{column}_ccdf.tsv", config, (column, "fraction_at_least"), ccdf(positive))
    return fit, comparisons


# --- popularity join -------------------------------------------------------


@dataclass(frozen=True)
class PopularityJoin:
    metric: str
    ranked: Tuple[Tuple[str, int, Optional[int]], ...]  # (title, metric value, views or None)
    matched: int
    unmatched: int
    mean: float
    sd: float
    quartiles: Tuple[float, float, float] = field(default=(0.0, 0.0, 0.0))


def read_views(path: PathLike) -> Dict[str, int]:
    """``title<TAB>count`` lines; ``#`` comments and blank lines skipped."""
    views: Dict[str, int] = {}
    first: Dict[str, int] = {}
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise InputError(str(exc)) from exc
    with fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0].strip():
                raise InputError(f"{path}:{lineno}: expected 'title<TAB>count'")
            try:
                count = int(parts[1])
            except ValueError:
                raise InputError(f"{path}:{lineno}: count {parts[1]!r} is not an integer") from None
            if count < 0:
                raise InputError(f"{path}:{lineno}: negative count {count}")
            key = canonical_title(parts[0])
            if key in first:
                raise InputError(f"{path}:{lineno}: duplicate title {key!r} (first on line {first[key]})")
            first[key] = lineno
            views[key] = count
    return views


def join_popularity(metrics: PathLike, views_path: PathLike, top_k: int, metric: str = "visits") -> PopularityJoin:
    """Page-view summary over the ``top_k`` articles ranked by ``metric``."""
    if top_k < 1:
        raise InputError(f"top-k must be >= 1, got {top_k}")
    titles, values = metric_column(metrics, metric)
    views = read_views(views_path)
    ranked = []
    for node, value in rank_nodes(values)[:top_k]:
        ranked.append((titles[node], int(value), views.get(canonical_title(titles[node]))))
    counts = np.array([c for _, _, c in ranked if c is not None], dtype=np.float64)
    unmatched = len(ranked) - counts.size
    if counts.size == 0:
        raise InputError(
            f"none of the top {len(ranked)} articles by {metric} appear in {views_path}; summary refused"
        )
    q1, q2, q3 = (float(q) for q in np.quantile(counts, [0.25, 0.5, 0.75]))
    return PopularityJoin(metric, tuple(ranked), int(counts.size), unmatched,
                          float(counts.mean()), float(counts.std()), (q1, q2, q3))


def write_join(path: PathLike, join: PopularityJoin, config: RunConfig) -> None:
    lines = [config.header(), "\t".join(("rank", "title", join.metric, "views"))]
    for r, (title, value, count) in enumerate(join.ranked, 1):
        lines.append(f"{r}\t{title}\t{value}\t{'' if count is None else count}")
    lines += [
        "",
        "key\tvalue",
        f"matched\t{join.matched}",
        f"unmatched\t{join.unmatched}",
        f"mean\t{join.mean!r}",
        f"sd\t{join.sd!r}",
        f"q1\t{join.quartiles[0]!r}",
        f"median\t{join.quartiles[1]!r}",
        f"q3\t{join.quartiles[2]!r}",
    ]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
