"""First-link extraction from MediaWiki markup and XML dumps."""

from .dump import DumpError, RawPage, iter_pages, open_dump, parse_dump, shard_parse
from .links import DEFAULT_BLOCKLIST, is_valid_link, load_blocklist, parse_redirect
from .regions import compute_regions
from .scanner import FlagState, LinkCandidate, extract_first_link, iter_link_candidates, scan_flags

__all__ = [
    "DEFAULT_BLOCKLIST",
    "DumpError",
    "FlagState",
    "LinkCandidate",
    "RawPage",
    "compute_regions",
    "extract_first_link",
    "is_valid_link",
    "iter_link_candidates",
    "iter_pages",
    "load_blocklist",
    "open_dump",
    "parse_dump",
    "parse_redirect",
    "scan_flags",
    "shard_parse",
]
