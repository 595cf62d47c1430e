"""Generators for fixtures, random functional graphs, and synthetic dumps."""

from __future__ import annotations

from typing import List, Optional, Tuple
from xml.sax.saxutils import escape

import numpy as np

from .graph import ABSENT, FirstLinkGraph, build_graph

#: Smallest topology matching the worked example: a 3-cycle A->B->G->A fed by C.
FIXTURE_EDGES: List[Tuple[str, Optional[str]]] = [
    ("A", "B"),
    ("B", "G"),
    ("G", "A"),
    ("C", "A"),
    ("E", "C"),
    ("D", "E"),
    ("F", "C"),
]


def fixture():
    return build_graph(FIXTURE_EDGES)


def ring(n: int) -> FirstLinkGraph:
    return FirstLinkGraph((np.arange(n) + 1) % n if n else [])


def random_functional_graph(
    n: int, rng: np.random.Generator, p_absent: float = 0.05, planted_cycles: int = 0
) -> FirstLinkGraph:
    """Uniform random successors, some absent, optionally with planted cycles."""
    succ = rng.integers(0, n, size=n)
    succ[rng.random(n) < p_absent] = ABSENT
    if planted_cycles and n:
        perm = rng.permutation(n)
        cuts = np.sort(rng.choice(np.arange(1, n), size=min(planted_cycles, n - 1), replace=False))
        for block in np.split(perm[: cuts[-1]] if len(cuts) else perm[:0], cuts[:-1]):
            if block.size:
                succ[block] = np.roll(block, -1)
    return FirstLinkGraph(succ)


def fixed_depth_graph(n: int, depth: int, rng: np.random.Generator, cycle_len: int = 3) -> FirstLinkGraph:
    """Forest of depth ``depth`` hanging off disjoint ``cycle_len``-cycles.

    Level sizes grow geometrically; every node at level d links to a random
    node at level d-1, and level 0 is partitioned into cycles.
    """
    weights = 2.0 ** np.arange(depth + 1)
    sizes = np.floor(n * weights / weights.sum()).astype(np.int64)
    sizes[0] = max(cycle_len, sizes[0] - sizes[0] % cycle_len)
    sizes[-1] += n - sizes.sum()
    starts = np.concatenate([[0], np.cumsum(sizes)])
    succ = np.empty(n, dtype=np.int64)
    root = np.arange(sizes[0])
    succ[: sizes[0]] = root - root % cycle_len + (root + 1) % cycle_len
    for d in range(1, depth + 1):
        lo, hi = starts[d], starts[d + 1]
        succ[lo:hi] = rng.integers(starts[d - 1], starts[d], size=hi - lo)
    return FirstLinkGraph(succ)


def page_title(i: int) -> str:
    return f"Page {i}"


_LEADS = [
    "{{Infobox thing|name=X|image=[[File:X.png]]|see=[[Decoy {i}]]}}\n",
    "{{Use dmy dates}}<!-- [[Hidden {i}]] -->\n",
    "",
    "[[File:Pic {i}.jpg|thumb|A caption with [[Caption link {i}]]]]\n",
    "<div class=\"hatnote\">See [[Other {i}]]</div>\n",
]


def synthetic_markup(i: int, target: Optional[int], rng: np.random.Generator) -> str:
    """Article body whose first valid link is ``target`` (or none)."""
    lead = _LEADS[int(rng.integers(len(_LEADS)))].replace("{i}", str(i))
    paren = "(from [[Greek language|Greek]] ''x'')" if rng.random() < 0.5 else ""
    ref = f"<ref>[[Source {i}]]</ref>" if rng.random() < 0.5 else ""
    head = f"{lead}'''{page_title(i)}''' {paren}{ref} is a"
    if target is None:
        return f"{head} thing."
    return f"{head} [[{page_title(target)}|thing]] related to [[Later {i}]]."


def synthetic_dump(
    n_pages: int, seed: int = 0, p_redirect: float = 0.05, p_talk: float = 0.05
) -> Tuple[bytes, List[Tuple[str, Optional[str]]]]:
    """A pages-articles style dump plus the edge list it should yield."""
    rng = np.random.default_rng(seed)
    parts = [
        '<mediawiki xmlns="http://www.mediawiki.org/xml/export-0.10/" xml:lang="en">\n',
        "<siteinfo><sitename>Synthetic</sitename></siteinfo>\n",
    ]
    expected: List[Tuple[str, Optional[str]]] = []
    for i in range(n_pages):
        r = rng.random()
        target = int(rng.integers(n_pages)) if rng.random() > 0.03 else None
        if r < p_talk:
            title, ns = f"Talk:{page_title(i)}", 1
            text = f"Discussion of [[{page_title(i)}]]"
        elif r < p_talk + p_redirect:
            title, ns = page_title(i), 0
            target = int(rng.integers(n_pages))
            text = f"#REDIRECT [[{page_title(target)}]]"
            expected.append((title, page_title(target)))
        else:
            title, ns = page_title(i), 0
            text = synthetic_markup(i, target, rng)
            expected.append((title, None if target is None else page_title(target)))
        parts.append(
            f"<page><title>{escape(title)}</title><ns>{ns}</ns><id>{i + 1}</id>"
            f"<revision><id>{i + 1}</id><text xml:space=\"preserve\">{escape(text)}</text>"
            f"</revision></page>\n"
        )
    parts.append("</mediawiki>\n")
    return "".join(parts).encode("utf-8"), expected


def sample_discrete_power_law(
    gamma: float, xmin: int, size: int, rng: np.random.Generator, table: int = 200_000
) -> np.ndarray:
    """Exact inverse-CDF draws from P(X = x) = x^-gamma / zeta(gamma, xmin).

    Uses scipy's zeta (not the package's own) so it can serve as an
    independent oracle for the fitter.
    """
    from scipy.special import zeta

    z0 = zeta(gamma, xmin)
    support = np.arange(xmin, xmin + table, dtype=np.float64)
    surv = zeta(gamma, support) / z0  # P(X >= x), decreasing
    u = 1.0 - rng.random(size)  # (0, 1]
    # largest x with P(X >= x) >= u
    idx = np.searchsorted(-surv, -u, side="right") - 1
    out = support[idx].astype(np.int64)
    for i in np.flatnonzero(u < surv[-1]):
        lo, hi = xmin + table - 1, 2 * (xmin + table)
        while zeta(gamma, hi) / z0 >= u[i]:
            lo, hi = hi, 2 * hi
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if zeta(gamma, mid) / z0 >= u[i]:
                lo = mid
            else:
                hi = mid
        out[i] = lo
    return out
