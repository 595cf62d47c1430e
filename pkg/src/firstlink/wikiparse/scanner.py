"""Single-pass first-link scanner over MediaWiki markup.

Regions are tracked with nesting counters in a fixed priority order:
comment, template ``{{ }}``, table ``{| |}``, flagged HTML tag, link,
parenthesis.  While a region is open only its own closing markup and the
openers of higher regions are recognized.  A link counts when it is
outermost, its ``[[`` occurs with no region open, and it closes; unclosed
constructs leave their flag raised to the end of the text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Tuple

from .links import is_valid_link, link_title

#: HTML elements whose content is never body text.
TAG_NAMES: Tuple[str, ...] = (
    "ref", "references", "div", "gallery", "imagemap", "timeline", "table", "math", "nowiki",
)

#: Characters that may follow a tag name.
TAG_DELIMITERS = frozenset(" \t\n\r\f\v/>")
SPACE = " \t\n\r\f\v"

_SPECIAL = re.compile(r"[<{}|\[\]()>]")

_OPEN_HEADER = 1
_CLOSE_HEADER = 2


@dataclass(frozen=True)
class FlagState:
    """Counters left raised at the end of a scan."""

    template_depth: int = 0
    table_depth: int = 0
    tag_depth: int = 0
    paren_depth: int = 0
    link_depth: int = 0
    comment_active: bool = False
    in_tag_header: bool = False

    def all_clear(self) -> bool:
        return not (
            self.template_depth or self.table_depth or self.tag_depth or self.paren_depth
            or self.link_depth or self.comment_active or self.in_tag_header
        )


@dataclass(frozen=True)
class LinkCandidate:
    target: str
    offset: int


def tag_at(text: str, i: int) -> Optional[Tuple[bool, int]]:
    """``(is_close, end_of_name)`` when a flagged tag header starts at ``i``."""
    j = i + 1
    close = text.startswith("/", j)
    if close:
        j += 1
    for name in TAG_NAMES:
        k = j + len(name)
        if k < len(text) and text[k] in TAG_DELIMITERS and text[j:k].lower() == name:
            return close, k
    return None


def _line_start(text: str, i: int) -> bool:
    return i == 0 or text[i - 1] == "\n"


def _scan(text: str) -> Iterator[Tuple[int, str]]:
    """Yield ``(offset, raw target)`` for each eligible link; returns the FlagState."""
    n = len(text)
    comment = False
    tmpl = table = tag = header = 0
    last = ""  # last non-space character of the open tag header
    link = paren = 0
    start, eligible, collecting, target = -1, False, False, []
    i = 0
    while i < n:
        if comment:
            j = text.find("-->", i)
            if j < 0:
                break
            comment, i = False, j + 3
            continue

        m = _SPECIAL.search(text, i)
        j = n if m is None else m.start()
        if j > i and not (tmpl or table):
            if header:
                run = text[i:j].rstrip(SPACE)
                if run:
                    last = run[-1]
            elif not tag and link == 1 and collecting:
                target.append(text[i:j])
        if m is None:
            break
        c, i = text[j], j + 1

        if c == "<" and text.startswith("<!--", j):
            comment, last, i = True, "", j + 4
            continue
        if c == "{" and text.startswith("{{", j):
            tmpl, last, i = tmpl + 1, "", j + 2
            continue
        if tmpl:
            if c == "}" and text.startswith("}}", j):
                tmpl, i = tmpl - 1, j + 2
            continue
        if c == "{" and text.startswith("{|", j) and _line_start(text, j):
            table, last, i = table + 1, "", j + 2
            continue
        if table:
            if c == "|" and text.startswith("|}", j) and _line_start(text, j):
                table, i = table - 1, j + 2
            continue
        if header:
            if c == ">":
                if header == _OPEN_HEADER and last != "/":
                    tag += 1
                elif header == _CLOSE_HEADER and tag:
                    tag -= 1
                header = 0
            else:
                last = c
            continue
        if c == "<":
            found = tag_at(text, j)
            if found is not None:
                header = _CLOSE_HEADER if found[0] else _OPEN_HEADER
                last, i = "", found[1]
                continue
        if tag:
            continue

        if c == "[" and text.startswith("[[", j):
            if not link:
                start, eligible, collecting, target = j, paren == 0, True, []
            link, i = link + 1, j + 2
        elif c == "]" and link and text.startswith("]]", j):
            link, i = link - 1, j + 2
            if not link and eligible:
                yield start, "".join(target)
        elif link:
            if link == 1 and collecting:
                if c == "|":
                    collecting = False
                else:
                    target.append(c)
        elif c == "(":
            paren += 1
        elif c == ")" and paren:
            paren -= 1

    return FlagState(tmpl, table, tag, paren, link, comment, bool(header))


def iter_link_candidates(markup: str) -> Iterator[LinkCandidate]:
    """Eligible links in document order, with non-empty canonical targets."""
    for offset, raw in _scan(markup):
        title = link_title(raw)
        if title:
            yield LinkCandidate(title, offset)


def scan_flags(markup: str) -> FlagState:
    """Run the scanner to the end and report which flags remain raised."""
    gen = _scan(markup)
    while True:
        try:
            next(gen)
        except StopIteration as stop:
            return stop.value


def extract_first_link(markup: str, blocklist: Optional[Iterable[str]] = None) -> Optional[str]:
    """Earliest eligible link whose target passes :func:`is_valid_link`."""
    for cand in iter_link_candidates(markup):
        if is_valid_link(cand.target, blocklist):
            return cand.target
    return None
