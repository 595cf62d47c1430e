"""Link-target filters: namespaces, other projects, media files, redirects."""

from __future__ import annotations

import re
from pathlib import Path
from typing import FrozenSet, Iterable, Optional, Union

from ..graph import canonical_title

#: Namespace and project prefixes that never denote a body-text article link.
DEFAULT_BLOCKLIST: FrozenSet[str] = frozenset(
    {
        "file", "image", "media", "category", "wikipedia", "wp", "project", "help",
        "template", "portal", "special", "talk", "user", "draft", "module", "mediawiki",
        "book", "education program", "timedtext", "gadget", "gadget definition", "topic",
        "wikt", "wiktionary", "commons", "c", "meta", "m", "mw", "species", "b", "wikibooks",
        "n", "wikinews", "q", "wikiquote", "s", "wikisource", "v", "wikiversity", "voy",
        "wikivoyage", "d", "wikidata", "foundation", "wmf", "phab", "phabricator",
        "outreach", "incubator", "mailarchive", "doi", "arxiv", "isbn", "rfc", "google",
        "imdb", "bugzilla", "sourceforge",
    }
)

#: Interlanguage prefixes (ISO codes of larger editions plus common aliases).
LANGUAGE_CODES: FrozenSet[str] = frozenset(
    """
    af als am an ar arz as ast az azb ba bar be be-tarask bg bn bo br bs ca ce ceb ckb
    co cs cv cy da de el eo es et eu fa fi fo fr fy ga gd gl gu he hi hr hsb ht hu hy ia
    id io is it ja jv ka kk km kn ko ku ky la lb li lmo lt lv mg mk ml mn mr ms my mzn
    nah nap nds ne new nl nn no oc or os pa pl pms pnb ps pt qu ro ru sa sah scn sco sh
    si simple sk sl sq sr su sv sw ta te tg th tl tr tt ug uk ur uz vec vi vo wa war
    wuu yi yo yue zh zh-classical zh-min-nan zh-yue
    """.split()
)

MEDIA_EXTENSIONS = (
    ".jpg", ".jpeg", ".png", ".svg", ".gif", ".ogg", ".oga", ".ogv", ".pdf", ".tif",
    ".tiff", ".webm", ".webp", ".mp3", ".wav", ".mid", ".midi", ".flac", ".djvu", ".bmp",
)

_FORBIDDEN = re.compile(r"[\[\]{}<>]")
_SCHEME = re.compile(r"^(?:[a-z][a-z0-9+.\-]*:)?//|^mailto:", re.IGNORECASE)
_REDIRECT = re.compile(r"\A\s*#redirect\s*:?\s*\[\[([^\]|]*)", re.IGNORECASE)


def load_blocklist(path: Union[str, Path]) -> FrozenSet[str]:
    """One prefix per line; blank lines and ``#`` comments ignored."""
    prefixes = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            prefixes.add(" ".join(line.rstrip(":").replace("_", " ").split()).lower())
    return frozenset(prefixes)


def link_title(raw: str) -> str:
    """Canonical article title of a raw link target, fragment removed.

    A single leading colon (the MediaWiki "link, don't embed" escape) is dropped.
    """
    text = raw.split("#", 1)[0].strip()
    if text.startswith(":"):
        text = text[1:]
    return canonical_title(text)


def is_valid_link(target: str, blocklist: Optional[Iterable[str]] = None) -> bool:
    """Whether ``target`` names an ordinary article in the same wiki.

    ``blocklist`` replaces the default namespace/project prefixes;
    interlanguage codes, media extensions and URL schemes are always
    rejected.
    """
    text = target.strip()
    if text.startswith(":"):
        text = text[1:]
    if _FORBIDDEN.search(text) or _SCHEME.search(text.strip()):
        return False
    title = canonical_title(text.split("#", 1)[0])
    if not title:
        return False
    if title.lower().endswith(MEDIA_EXTENSIONS):
        return False
    if ":" in title:
        prefix = " ".join(title.split(":", 1)[0].split()).lower()
        blocked = DEFAULT_BLOCKLIST if blocklist is None else blocklist
        if prefix in blocked or prefix in LANGUAGE_CODES:
            return False
        if prefix == "talk" or prefix.endswith(" talk"):
            return False
    return True


def parse_redirect(markup: str) -> Optional[str]:
    """Target of a ``#REDIRECT [[...]]`` page, or None."""
    m = _REDIRECT.match(markup)
    if m is None:
        return None
    return link_title(m.group(1)) or None
