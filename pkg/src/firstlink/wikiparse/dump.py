"""Streaming ingestion of MediaWiki XML export dumps."""

from __future__ import annotations

import bz2
import gzip
import logging
import lzma
import os
from dataclasses import dataclass
from itertools import islice
from typing import BinaryIO, Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple, Union
from xml.parsers import expat

from .._parallel import ordered_imap
from ..graph import canonical_title
from .links import link_title, parse_redirect
from .scanner import extract_first_link

logger = logging.getLogger(__name__)

DEFAULT_PAGE_CAP = 16 * 1024 * 1024  # characters of markup
CHUNK_BYTES = 1 << 20
DEFAULT_BATCH = 256

Source = Union[str, os.PathLike, bytes, BinaryIO]
Edge = Tuple[str, Optional[str]]


class DumpError(ValueError):
    """Malformed dump input."""


@dataclass(frozen=True)
class RawPage:
    title: str
    namespace: str  # "" for the main namespace
    markup: str
    is_redirect: bool
    redirect_target: Optional[str] = None


def open_dump(path: Union[str, os.PathLike]) -> BinaryIO:
    """Open a dump, transparently decompressing bz2, gzip or xz."""
    with open(path, "rb") as fh:
        magic = fh.read(6)
    if magic.startswith(b"BZh"):
        return bz2.open(path, "rb")
    if magic.startswith(b"\x1f\x8b"):
        return gzip.open(path, "rb")
    if magic.startswith(b"\xfd7zXZ\x00"):
        return lzma.open(path, "rb")
    return open(path, "rb")


class _PageCollector:
    """Expat callbacks assembling RawPage records."""

    _TEXT_FIELDS = {"title", "ns", "text"}

    def __init__(self, page_cap: int):
        self.page_cap = page_cap
        self.ready: List[RawPage] = []
        self.namespaces: Dict[str, str] = {}
        self._path: List[str] = []
        self._buf: List[str] = []
        self._size = 0
        self._page: Dict[str, str] = {}
        self._redirect: Optional[str] = None
        self._oversize = False
        self._ns_key: Optional[str] = None

    def start(self, name: str, attrs: Dict[str, str]) -> None:
        name = name.rsplit(":", 1)[-1]
        self._path.append(name)
        if name == "page":
            self._page, self._redirect, self._oversize = {}, None, False
        elif name == "redirect" and "page" in self._path:
            self._redirect = attrs.get("title", "")
        elif name == "namespace":
            self._ns_key = attrs.get("key")
        if name in self._TEXT_FIELDS or name == "namespace":
            self._buf, self._size = [], 0

    def chars(self, data: str) -> None:
        if not self._path:
            return
        leaf = self._path[-1]
        if leaf in self._TEXT_FIELDS or leaf == "namespace":
            self._size += len(data)
            if leaf == "text" and self._size > self.page_cap:
                self._oversize = True
                self._buf = []
                return
            self._buf.append(data)

    def end(self, name: str) -> None:
        name = name.rsplit(":", 1)[-1]
        self._path.pop()
        if name == "namespace":
            if self._ns_key is not None:
                self.namespaces[self._ns_key] = "".join(self._buf).strip()
        elif name in self._TEXT_FIELDS and "page" in self._path:
            if name not in self._page:  # first revision wins
                self._page[name] = "" if self._oversize and name == "text" else "".join(self._buf)
        elif name == "page":
            self._finish_page()

    def _namespace_of(self, title: str) -> str:
        ns = self._page.get("ns")
        if ns is not None:
            ns = ns.strip()
            if ns in ("", "0"):
                return ""
            return self.namespaces.get(ns, ns)
        if ":" in title:
            prefix = title.split(":", 1)[0]
            if prefix in self.namespaces.values() and prefix:
                return prefix
        return ""

    def _finish_page(self) -> None:
        title = canonical_title(self._page.get("title", ""))
        if not title:
            logger.warning("skipping page without title")
            return
        if self._oversize:
            logger.warning("skipping %r: markup exceeds page cap of %d characters", title, self.page_cap)
            return
        markup = self._page.get("text", "")
        target = link_title(self._redirect) if self._redirect else None
        target = target or parse_redirect(markup)
        self.ready.append(RawPage(title, self._namespace_of(title), markup, target is not None, target))


def _chunks(source: Source) -> Iterator[bytes]:
    if isinstance(source, (bytes, bytearray)):
        yield bytes(source)
        return
    if isinstance(source, (str, os.PathLike)):
        with open_dump(source) as fh:
            yield from _chunks(fh)
        return
    while True:
        block = source.read(CHUNK_BYTES)
        if not block:
            return
        yield block


def iter_pages(source: Source, page_cap: int = DEFAULT_PAGE_CAP) -> Iterator[RawPage]:
    """Every page in the dump, in document order; memory bounded by the page cap."""
    parser = expat.ParserCreate()
    collector = _PageCollector(page_cap)
    parser.StartElementHandler = collector.start
    parser.EndElementHandler = collector.end
    parser.CharacterDataHandler = collector.chars
    parser.buffer_text = True
    seen = False
    try:
        for block in _chunks(source):
            seen = seen or bool(block.strip())
            parser.Parse(block, False)
            yield from collector.ready
            collector.ready.clear()
        if seen:
            parser.Parse(b"", True)
            yield from collector.ready
    except expat.ExpatError as exc:
        raise DumpError(
            f"malformed XML at byte {parser.ErrorByteIndex} "
            f"(line {parser.ErrorLineNumber}, column {parser.ErrorColumnNumber}): "
            f"{expat.ErrorString(exc.code)}"
        ) from None


def page_edge(page: RawPage, blocklist: Optional[FrozenSet[str]] = None) -> Edge:
    """The (title, first link) record of one main-namespace page."""
    if page.is_redirect:
        return page.title, page.redirect_target
    return page.title, extract_first_link(page.markup, blocklist)


def parse_dump(
    source: Source, page_cap: int = DEFAULT_PAGE_CAP, blocklist: Optional[FrozenSet[str]] = None
) -> Iterator[Edge]:
    """Stream ``(title, first link or None)`` for main-namespace pages."""
    for page in iter_pages(source, page_cap):
        if page.namespace == "":
            yield page_edge(page, blocklist)


def _edges_of_batch(args: Tuple[List[RawPage], Optional[FrozenSet[str]]]) -> List[Edge]:
    pages, blocklist = args
    return [page_edge(p, blocklist) for p in pages]


def _batches(pages: Iterable[RawPage], size: int) -> Iterator[List[RawPage]]:
    it = iter(pages)
    while True:
        batch = list(islice(it, size))
        if not batch:
            return
        yield batch


def shard_parse(
    path: Source,
    workers: int = 1,
    page_cap: int = DEFAULT_PAGE_CAP,
    blocklist: Optional[FrozenSet[str]] = None,
    batch_pages: int = DEFAULT_BATCH,
) -> List[Edge]:
    """Parse a dump with ``workers`` processes; output equals the serial order.

    A single reader decodes XML and hands whole-page batches to stateless
    workers; results are merged in submission order.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    main = (p for p in iter_pages(path, page_cap) if p.namespace == "")
    jobs = ((batch, blocklist) for batch in _batches(main, batch_pages))
    edges: List[Edge] = []
    for part in ordered_imap(_edges_of_batch, jobs, workers):
        edges.extend(part)
    return edges
