"""Command-line entry point: ``firstlink <subcommand> ...``.

Exit status: 0 success, 1 input error, 2 internal invariant violation.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional

from . import __version__
from .pipeline import (
    InputError,
    InvariantError,
    RunConfig,
    cmd_analyze,
    cmd_extract,
    cmd_fit,
    cmd_verify,
    join_popularity,
    write_join,
)
from .scalefree import ALTERNATIVES
from .traversal import DEFAULT_ORACLE_BOUND

logger = logging.getLogger("firstlink")

EXIT_OK, EXIT_INPUT, EXIT_INVARIANT = 0, 1, 2


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
    p.add_argument("--top-k", type=int, default=10, help="rows in ranked reports (default 10)")
    p.add_argument("--oracle-bound", type=int, default=DEFAULT_ORACLE_BOUND,
                   help="cross-check against the explicit path oracle up to this many nodes")
    p.add_argument("--blocklist", help="file of link prefixes to reject, one per line")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="firstlink", description="First-link network extraction and analysis.")
    parser.add_argument("--version", action="version", version=f"firstlink {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="MediaWiki XML dump -> edge-list TSV")
    p.add_argument("dump", help="pages-articles XML, optionally .bz2/.gz/.xz")
    p.add_argument("--out", required=True, help="edge-list TSV to write")
    p.add_argument("--page-cap", type=int, default=None, help="skip pages with more markup characters than this")
    _common(p)

    p = sub.add_parser("analyze", help="edge list -> metric, cycle and group reports")
    p.add_argument("edges", help="edge-list TSV")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--centrality", action="store_true", help="also write betweenness/eigenvector scores")
    _common(p)

    p = sub.add_parser("fit", help="power-law fit of one metric column")
    p.add_argument("metrics", help="metrics TSV from analyze")
    p.add_argument("--column", default="visits", help="metric column (default visits)")
    p.add_argument("--out", required=True, help="fit report TSV")
    p.add_argument("--xmin-max", type=int, default=None, help="largest xmin candidate")
    p.add_argument("--min-tail", type=int, default=50, help="smallest tail size for an xmin candidate")
    p.add_argument("--alternatives", default=",".join(ALTERNATIVES),
                   help="comma-separated alternatives to compare against ('' for none)")
    p.add_argument("--series", help="directory for rank-frequency and CCDF series")
    _common(p)

    p = sub.add_parser("join-views", help="page-view summary over the top articles by a metric")
    p.add_argument("metrics", help="metrics TSV from analyze")
    p.add_argument("views", help="TSV of title<TAB>count")
    p.add_argument("--metric", default="visits", help="ranking column (default visits)")
    p.add_argument("--out", required=True, help="report TSV")
    _common(p)

    p = sub.add_parser("verify", help="recheck a metrics TSV against its edge list")
    p.add_argument("edges", help="edge-list TSV")
    p.add_argument("metrics", help="metrics TSV from analyze")
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    kwargs = {}
    for name in ("workers", "top_k", "oracle_bound", "blocklist", "xmin_max", "min_tail", "page_cap"):
        value = getattr(args, name, None)
        if value is not None:
            kwargs[name] = value
    return RunConfig(**kwargs)


def run(args: argparse.Namespace) -> int:
    if args.command == "verify":
        problems = cmd_verify(args.edges, args.metrics)
        for line in problems:
            print(line, file=sys.stderr)
        if problems:
            return EXIT_INVARIANT
        print("ok")
        return EXIT_OK

    config = _config(args)
    if args.command == "extract":
        graph, _ = cmd_extract(args.dump, args.out, config)
        print(f"{graph.n} nodes -> {args.out}")
    elif args.command == "analyze":
        files = cmd_analyze(args.edges, args.out, config, centrality=args.centrality)
        for path in files.values():
            print(path)
    elif args.command == "fit":
        names = [a for a in args.alternatives.split(",") if a]
        unknown = sorted(set(names) - set(ALTERNATIVES))
        if unknown:
            raise InputError(f"unknown alternatives {unknown}; expected {list(ALTERNATIVES)}")
        fit, comparisons = cmd_fit(args.metrics, args.column, args.out, config, names, args.series)
        print(f"xmin={fit.xmin} gamma={fit.gamma:.4f} alpha={fit.alpha:.4f} n_tail={fit.n_tail}")
        for c in comparisons:
            print(f"  vs {c.alternative}: R={c.R:.3f} p={c.p:.3g} -> {c.favors(0.05)}")
    elif args.command == "join-views":
        config.validate([args.metrics, args.views])
        join = join_popularity(args.metrics, args.views, config.top_k, args.metric)
        write_join(args.out, join, config)
        print(f"matched {join.matched}, unmatched {join.unmatched}: mean={join.mean:.6g} sd={join.sd:.6g}")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return run(args)
    except InvariantError as exc:
        print(f"firstlink: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (InputError, OSError) as exc:
        print(f"firstlink: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
