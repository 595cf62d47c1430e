import bz2
import gzip
import io
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from firstlink.synthetic import synthetic_dump
from firstlink.wikiparse import (
    DumpError,
    compute_regions,
    extract_first_link,
    is_valid_link,
    iter_link_candidates,
    iter_pages,
    load_blocklist,
    parse_dump,
    parse_redirect,
    scan_flags,
    shard_parse,
)
from markup_corpus import CORPUS, FRAGMENTS, random_markup

@pytest.mark.parametrize("markup, expected", CORPUS, ids=[f"case{i:02d}" for i in range(len(CORPUS))])
def test_corpus(markup, expected):
    assert extract_first_link(markup) == expected
    assert compute_regions(markup).first_link() == expected


def test_corpus_size():
    assert len(CORPUS) >= 30


@pytest.mark.parametrize(
    "target, ok",
    [
        ("File:Train.jpg", False),
        ("Rail transport", True),
        ("wikt:train", False),
        ("Category:Foo", False),
        ("category:foo", False),
        ("Talk:Train", False),
        ("Wikipedia talk:X", False),
        ("Portal:Trains", False),
        ("Special:Random", False),
        ("es:Tren", False),
        ("zh-yue:X", False),
        ("Photo.PNG", False),
        ("https://example.org", False),
        ("//example.org", False),
        ("mailto:a@b.c", False),
        ("", False),
        ("   ", False),
        ("#Section", False),
        ("Star Wars: Episode IV", True),
        ("2001: A Space Odyssey", True),
        ("Tree of life (disambiguation)", True),
        ("A{{b}}", False),
        (":Category:Foo", False),
    ],
)
def test_is_valid_link(target, ok):
    assert is_valid_link(target) is ok


def test_blocklist_override(tmp_path):
    path = tmp_path / "block.txt"
    path.write_text("# custom\nStar Wars\n\n", encoding="utf-8")
    block = load_blocklist(path)
    assert block == frozenset({"star wars"})
    assert not is_valid_link("Star Wars: Episode IV", block)
    assert is_valid_link("Category:Foo", block)  # replaced default list
    assert not is_valid_link("fr:Train", block)  # languages always blocked
    assert extract_first_link("[[Star Wars: X]] [[Y]]", block) == "Y"


@pytest.mark.parametrize(
    "markup, expected",
    [
        ("#REDIRECT [[Train]]", "Train"),
        ("#redirect [[Train#History]]", "Train"),
        ("  #Redirect:[[rail_transport]]", "Rail transport"),
        ("#REDIRECT [[Train|label]]", "Train"),
        ("'''Train''' is...", None),
        ("text\n#REDIRECT [[Train]]", None),
        ("#REDIRECT [[#Section]]", None),
    ],
)
def test_parse_redirect(markup, expected):
    assert parse_redirect(markup) == expected


def test_candidates_offsets_and_order():
    text = "(x [[a]]) [[b]] {{t}} [[c|d]]"
    cands = list(iter_link_candidates(text))
    assert [(c.target, c.offset) for c in cands] == [("B", 10), ("C", 22)]


def test_unclosed_constructs_keep_flags():
    assert scan_flags("{{a").template_depth == 1
    assert scan_flags("<ref>x").tag_depth == 1
    assert scan_flags("<ref x").in_tag_header
    assert scan_flags("<!-- x").comment_active
    assert scan_flags("(((").paren_depth == 3
    assert scan_flags("{{a}} <ref>b</ref> (c) [[d]]").all_clear()


def test_parens_inside_target_do_not_raise_flag():
    assert extract_first_link("[[Tree of life (biology)|x]] [[y]]") == "Tree of life (biology)"
    assert scan_flags("[[Tree of life (biology]]").paren_depth == 0


def agree(markup: str) -> bool:
    single = [(c.offset, c.target) for c in iter_link_candidates(markup)]
    return single == compute_regions(markup).candidates()


def test_scanner_matches_region_oracle_randomized():
    rnd = random.Random(20160620)
    samples = [random_markup(rnd) for _ in range(10_000)]
    bad = [s for s in samples if not agree(s)]
    assert bad == []
    with_links = sum(bool(compute_regions(s).candidates()) for s in samples)
    assert with_links > 2000


@settings(max_examples=300, deadline=None)
@given(st.lists(st.sampled_from(FRAGMENTS), max_size=30).map("".join))
def test_scanner_matches_region_oracle(markup):
    assert agree(markup)
    first = extract_first_link(markup)
    assert first == compute_regions(markup).first_link()


@settings(max_examples=300, deadline=None)
@given(st.lists(st.sampled_from(FRAGMENTS), max_size=30).map("".join))
def test_no_link_inside_flag_regions(markup):
    reg = compute_regions(markup)
    for cand in iter_link_candidates(markup):
        assert not reg.hidden(cand.offset)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.sampled_from(FRAGMENTS), max_size=30).map("".join))
def test_prepending_valid_link_wins(markup):
    assert extract_first_link("[[Prepended article]] " + markup) == "Prepended article"


def test_deterministic():
    text = CORPUS[1][0]
    assert {extract_first_link(text) for _ in range(5)} == {"Natural science"}


# --- dumps -----------------------------------------------------------------

HEAD = ('<mediawiki xmlns="http://www.mediawiki.org/xml/export-0.10/">'
        '<siteinfo><namespaces><namespace key="0" /><namespace key="1">Talk</namespace>'
        '</namespaces></siteinfo>')


def page(title, text, ns=0, redirect=None):
    red = f'<redirect title="{redirect}" />' if redirect else ""
    return (f"<page><title>{title}</title><ns>{ns}</ns>{red}<revision>"
            f"<text xml:space=\"preserve\">{text}</text></revision></page>")


def dump(*pages) -> bytes:
    return (HEAD + "".join(pages) + "</mediawiki>").encode()


def test_two_page_dump():
    data = dump(
        page("Train", "'''Train''' is a [[rail transport|form of transport]]."),
        page("Physics", "{{Infobox}} '''Physics''' (from [[Greek language|Greek]]) is the [[natural science]]."),
    )
    assert list(parse_dump(data)) == [("Train", "Rail transport"), ("Physics", "Natural science")]


def test_talk_only_dump():
    assert list(parse_dump(dump(page("Talk:Train", "[[Train]]", ns=1)))) == []


def test_namespace_from_title_without_ns_element():
    data = (HEAD + "<page><title>Talk:Train</title><revision><text>[[Train]]</text></revision></page>"
            + "</mediawiki>").encode()
    pages = list(iter_pages(data))
    assert pages[0].namespace == "Talk"
    assert list(parse_dump(data)) == []


def test_redirect_dump():
    data = dump(page("Railway", "#REDIRECT [[Rail transport]]", redirect="Rail transport"))
    assert list(parse_dump(data)) == [("Railway", "Rail transport")]
    data = dump(page("Railway", "#redirect [[rail_transport#x]]"))
    (p,) = iter_pages(data)
    assert p.is_redirect and p.redirect_target == "Rail transport"


def test_page_without_link():
    assert list(parse_dump(dump(page("Lonely", "No links.")))) == [("Lonely", None)]


def test_first_revision_wins():
    data = (HEAD + "<page><title>A</title><ns>0</ns><revision><text>[[First]]</text></revision>"
            "<revision><text>[[Second]]</text></revision></page></mediawiki>").encode()
    assert list(parse_dump(data)) == [("A", "First")]


def test_escaped_markup():
    data = dump(page("A", "&lt;ref&gt;[[Hidden]]&lt;/ref&gt; [[Shown]]"))
    assert list(parse_dump(data)) == [("A", "Shown")]


def test_malformed_xml_reports_offset():
    data = dump(page("A", "[[B]]"))[:-5] + b"<oops"
    with pytest.raises(DumpError, match=r"byte \d+"):
        list(parse_dump(data))
    with pytest.raises(DumpError, match="byte 19 "):  # start of the mismatched close tag
        list(parse_dump(b"<mediawiki><page></mediawiki>"))


def test_oversized_page_skipped(caplog):
    data = dump(page("Big", "x" * 500 + "[[B]]"), page("Small", "[[C]]"))
    with caplog.at_level("WARNING"):
        out = list(parse_dump(data, page_cap=100))
    assert out == [("Small", "C")]
    assert "page cap" in caplog.text


def test_empty_dumps(tmp_path):
    assert list(parse_dump(b"")) == []
    assert list(parse_dump(b"<mediawiki></mediawiki>")) == []
    empty = tmp_path / "empty.xml"
    empty.write_bytes(b"")
    assert shard_parse(empty, workers=2) == []


def test_streaming_in_small_chunks(monkeypatch):
    import firstlink.wikiparse.dump as dump_mod

    xml, expected = synthetic_dump(300, seed=5)
    monkeypatch.setattr(dump_mod, "CHUNK_BYTES", 37)
    assert list(parse_dump(io.BytesIO(xml))) == expected


@pytest.mark.parametrize("opener, suffix", [(bz2.compress, ".bz2"), (gzip.compress, ".gz")])
def test_compressed_dumps(tmp_path, opener, suffix):
    xml, expected = synthetic_dump(100, seed=2)
    path = tmp_path / f"dump.xml{suffix}"
    path.write_bytes(opener(xml))
    assert shard_parse(path) == expected


def test_xz_dump(tmp_path):
    import lzma

    xml, expected = synthetic_dump(50, seed=4)
    path = tmp_path / "dump.xml.xz"
    path.write_bytes(lzma.compress(xml))
    assert list(parse_dump(path)) == expected


def test_synthetic_dump_expected_edges():
    xml, expected = synthetic_dump(2000, seed=11)
    assert list(parse_dump(xml)) == expected


def test_shard_parse_worker_invariance(tmp_path):
    xml, expected = synthetic_dump(3000, seed=3)
    path = tmp_path / "dump.xml"
    path.write_bytes(xml)
    serial = shard_parse(path, workers=1)
    assert serial == expected
    for w in (2, 4):
        assert shard_parse(path, workers=w, batch_pages=97) == serial


def test_shard_parse_rejects_zero_workers(tmp_path):
    with pytest.raises(ValueError):
        shard_parse(tmp_path / "x.xml", workers=0)
