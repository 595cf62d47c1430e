"""Two-pass region oracle for the first-link scanner.

Each region kind is found by its own tokenizing pass over the text with
all higher-priority regions already masked out; links and parentheses
are then resolved on what remains.  Slow and simple on purpose, so it can
check :mod:`firstlink.wikiparse.scanner` independently.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .links import is_valid_link, link_title
from .scanner import TAG_NAMES

_COMMENT = re.compile(r"<!--.*?(?:-->|\Z)", re.DOTALL)
_TEMPLATE_TOKEN = re.compile(r"\{\{|\}\}")
_TABLE_TOKEN = re.compile(r"^(?:\{\||\|\})", re.MULTILINE)
_TAG_HEADER = re.compile(
    r"<(/?)(?:%s)(?=[ \t\n\r\f\v/>])[^>]*(>|\Z)" % "|".join(TAG_NAMES), re.IGNORECASE
)
_LINK_TOKEN = re.compile(r"\[\[|\]\]")
_HIDDEN = "\0"


@dataclass
class Regions:
    """Masks of every non-body region plus the resolved links."""

    text: str
    masks: Dict[str, bytearray] = field(default_factory=dict)
    #: (open offset, close end, raw target, paren depth at opening) of outermost closed links
    links: List[Tuple[int, int, str, int]] = field(default_factory=list)

    def hidden(self, i: int) -> bool:
        return any(m[i] for m in self.masks.values())

    def candidates(self) -> List[Tuple[int, str]]:
        out = []
        for start, _, raw, depth in self.links:
            title = link_title(raw)
            if depth == 0 and title:
                out.append((start, title))
        return out

    def first_link(self, blocklist=None) -> Optional[str]:
        for _, title in self.candidates():
            if is_valid_link(title, blocklist):
                return title
        return None


def _masked(text: str, hidden: bytearray) -> str:
    return "".join(_HIDDEN if h else c for c, h in zip(text, hidden))


def _nested_spans(tokens, opener: str, n: int) -> List[Tuple[int, int]]:
    """Outermost spans of balanced opener/closer tokens; unclosed runs to ``n``."""
    spans, depth, start = [], 0, 0
    for m in tokens:
        if m.group(0) == opener:
            if depth == 0:
                start = m.start()
            depth += 1
        elif depth:
            depth -= 1
            if depth == 0:
                spans.append((start, m.end()))
    if depth:
        spans.append((start, n))
    return spans


def _tag_spans(view: str) -> List[Tuple[int, int]]:
    n = len(view)
    spans, depth, start = [], 0, 0
    for m in _TAG_HEADER.finditer(view):
        closing = m.group(1) == "/"
        self_closing = m.group(2) == ">" and view[m.start() : m.end() - 1].rstrip(" \t\n\r\f\v").endswith("/")
        spans.append((m.start(), m.end()))  # every header is markup
        if not closing and not self_closing:
            if depth == 0:
                start = m.start()
            depth += 1
        elif closing and depth:
            depth -= 1
            if depth == 0:
                spans.append((start, m.end()))
    if depth:
        spans.append((start, n))
    return spans


def compute_regions(text: str) -> Regions:
    n = len(text)
    hidden = bytearray(n)
    reg = Regions(text)

    def add(kind: str, spans) -> None:
        mask = bytearray(n)
        for a, b in spans:
            mask[a:b] = b"\x01" * (b - a)
            hidden[a:b] = b"\x01" * (b - a)
        reg.masks[kind] = mask

    add("comment", [m.span() for m in _COMMENT.finditer(text)])
    add("template", _nested_spans(_TEMPLATE_TOKEN.finditer(_masked(text, hidden)), "{{", n))
    add("table", _nested_spans(_TABLE_TOKEN.finditer(_masked(text, hidden)), "{|", n))
    add("tag", _tag_spans(_masked(text, hidden)))

    # link nesting depth of every character; token characters get -1
    view = _masked(text, hidden)
    depth_at = [0] * n
    depth, opened, closed = 0, set(), {}
    pos, start = 0, 0
    for m in list(_LINK_TOKEN.finditer(view)) + [None]:
        stop = n if m is None else m.start()
        depth_at[pos:stop] = [depth] * (stop - pos)
        if m is None:
            break
        a = m.start()
        if m.group(0) == "[[":
            if depth == 0:
                start = a
                opened.add(a)
            depth += 1
            depth_at[a] = depth_at[a + 1] = -1
        elif depth:
            depth -= 1
            depth_at[a] = depth_at[a + 1] = -1
            if depth == 0:
                closed[start] = m.end()
        pos = m.end()

    # parentheses in visible body text decide eligibility
    paren, paren_at_open = 0, {}
    for k in range(n):
        if k in opened:
            paren_at_open[k] = paren
        if hidden[k] or depth_at[k] != 0:
            continue
        if view[k] == "(":
            paren += 1
        elif view[k] == ")" and paren:
            paren -= 1

    for start, end in closed.items():
        chars = []
        for k in range(start + 2, end - 2):
            if hidden[k] or depth_at[k] != 1:
                continue
            if view[k] == "|":
                break
            chars.append(view[k])
        reg.links.append((start, end, "".join(chars), paren_at_open[start]))
    reg.links.sort()
    return reg
