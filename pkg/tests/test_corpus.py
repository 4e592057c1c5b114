import json
import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from diachron.aligner import ParagraphPair
from diachron.corpus import (CONTEMPORARY, HISTORICAL, DatasetError, DatasetVariant, Edition,
                             ManifestError, MarkupError, build_all_variants, build_corpus,
                             build_pairs, build_variant, clean_paragraph, deduplicate,
                             extract_paragraphs, load_manifest, match_editions,
                             metadata_similarity, quartiles, variant_stats)
from diachron.synthetic import (contemporary_lexicon, make_paragraph, synthetic_pairs,
                                write_edition_corpus)

LEXICON = contemporary_lexicon(1500, seed=1, prefixed=False)


def hist(id, author="Bolesław Prus", title="Lalka", year=1890, paragraphs=()):
    return Edition(id, HISTORICAL, author, title, year, list(paragraphs))


def cont(id, author="Bolesław Prus", title="Lalka", year=2010, paragraphs=()):
    return Edition(id, CONTEMPORARY, author, title, year, list(paragraphs))


def pair(pid, novel, src, tgt):
    return ParagraphPair(pid, novel, src, tgt, 2.0)


# -- extraction ------------------------------------------------------------------------

def test_extract_examples():
    assert extract_paragraphs("<p>Ala ma kota.</p>", "xml") == ["Ala ma kota."]
    assert extract_paragraphs("''decyzya''", "mediawiki") == ["decyzya"]
    assert extract_paragraphs("Pierwszy\nwiersz.\n\n  \nDrugi.\n", "plain") == [
        "Pierwszy wiersz.", "Drugi."]


def test_extract_mediawiki_strips_markup():
    doc = """{{Nagłówek|autor=Prus|tytuł=Lalka}}
== Tom I ==
<!-- uwaga -->
Pan [[Stanisław Wokulski|Wokulski]] był '''kupcem'''.<ref>Przypis {{c|x}}</ref>

* {{c|Rozdział}} drugi<br/>ciąg dalszy&nbsp;tu.

{| class="x"
| komórka
|}
[[Kategoria:Lalka]] [http://example.org strona] {{korekta|jenerał|generał}}
__NOTOC__"""
    assert extract_paragraphs(doc, "mediawiki") == [
        "Pan Wokulski był kupcem.",
        "Rozdział drugi ciąg dalszy tu.",
        "strona generał",  # korekta shows the corrected reading
    ]


@pytest.mark.parametrize("doc,line", [
    ("ok\n\n{{szablon|\nbez końca", 3),
    ("a\nb }}", 2),
    ("[[link bez końca", 1),
    ("a\n\nb]] c", 3),
])
def test_extract_mediawiki_errors(doc, line):
    with pytest.raises(MarkupError) as info:
        extract_paragraphs(doc, "mediawiki")
    assert info.value.line == line


def test_extract_xml_structure():
    doc = """<?xml version="1.0"?>
<utwor><rdf:RDF xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#">meta</rdf:RDF>
<powiesc><nazwa_utworu>Lalka</nazwa_utworu>
<akap>Pan <begin id="b1"/><motyw id="m1">Pieniądz</motyw>Wokulski <pe>przypis</pe>kupiec.</akap>
<akap_dialog>--- Dzień dobry.</akap_dialog><akap>   </akap>
</powiesc></utwor>"""
    assert extract_paragraphs(doc, "xml") == ["Pan Wokulski kupiec.", "--- Dzień dobry."]


def test_extract_xml_error_has_location():
    with pytest.raises(MarkupError) as info:
        extract_paragraphs("<akap>a</akap>\n<akap>b</akop>", "xml")
    assert info.value.line == 2 and info.value.column is not None


def test_extract_unknown_format():
    with pytest.raises(ValueError, match="unknown format"):
        extract_paragraphs("x", "docx")


# -- cleaning --------------------------------------------------------------------------

@pytest.mark.parametrize("raw,clean", [
    ("café", "cafe"),
    ("żółć", "żółć"),
    ("ŻÓŁĆ Źdźbło", "ŻÓŁĆ Źdźbło"),
    ("— Dzień dobry — rzekł.", "Dzień dobry — rzekł."),
    ("„Cytat”…", '"Cytat"...'),
    ("JAN: Witaj.", "Witaj."),
    ("– HRABIA. Tak.", "Tak."),
    ("  dużo   \n spacji ", "dużo spacji"),
    ("Dvořák, Ørsted, Straße", "Dvorak, Orsted, Strasse"),
    ("ＡＢＣ", "ABC"),
    ("é", "e"),
    ("NATO jest sojuszem", "NATO jest sojuszem"),
])
def test_clean_paragraph_examples(raw, clean):
    assert clean_paragraph(raw) == clean


@given(st.text(alphabet=st.sampled_from(list("aąéÉ—–- :.JANś„”…́ÅŁ\n")), max_size=30))
def test_clean_paragraph_idempotent(s):
    once = clean_paragraph(s)
    assert clean_paragraph(once) == once


# -- edition matching ------------------------------------------------------------------

def test_metadata_similarity_concrete_values():
    assert metadata_similarity("H. Sienkiewicz", "Henryk Sienkiewicz") == pytest.approx(13 / 18)
    assert metadata_similarity("Bolesław Prus", "BOLESLAW  prus") == 1.0


def test_match_identical_and_disjoint():
    h, c = hist("h1"), cont("c1")
    assert match_editions([h], [c]) == [(h, c)]
    assert match_editions([h], [cont("c2", title="Faraon")]) == []


def test_match_near_miss_is_diagnosed():
    diags = []
    h = hist("h1", author="H. Sienkiewicz", title="Potop")
    c = cont("c1", author="Henryk Sienkiewicz", title="Potop")
    assert match_editions([h], [c], diagnostics=diags) == []
    assert [(d.kind, d.historical, d.contemporary) for d in diags] == [("near-miss", "h1", "c1")]
    assert match_editions([h], [c], author_threshold=0.7) == [(h, c)]


def test_match_picks_oldest_and_newest():
    hs = [hist("h2", year=1901), hist("h1", year=1887)]
    cs = [cont("c1", year=1990), cont("c2", year=2015)]
    [(h, c)] = match_editions(hs, cs)
    assert (h.id, c.id) == ("h1", "c2")


def test_match_does_not_chain_similar_titles():
    diags = []
    hs = [hist(f"h{k}", title=f"Opowiadanie nr {k}") for k in range(3)]
    cs = [cont(f"c{k}", title=f"Opowiadanie nr {k}") for k in range(3)]
    matches = match_editions(hs, cs, diagnostics=diags)
    assert [(h.id, c.id) for h, c in matches] == [("h0", "c0"), ("h1", "c1"), ("h2", "c2")]
    assert {d.kind for d in diags} == {"ambiguous"}


def test_edition_validation():
    with pytest.raises(ValueError):
        hist("x", year=0)
    with pytest.raises(ValueError):
        Edition("x", "library", "a", "b", 1900)


# -- pair building ---------------------------------------------------------------------

def _paragraphs(n, seed):
    rng = random.Random(seed)
    return [make_paragraph(rng, LEXICON, sentences=(2, 4)) for _ in range(n)]


def test_build_pairs_identical_editions():
    paras = _paragraphs(10, 1)
    pairs = build_pairs((hist("h", paragraphs=paras), cont("c", paragraphs=paras)))
    assert [(p.src, p.tgt) for p in pairs] == list(zip(paras, paras))
    assert {p.novel_id for p in pairs} == {"h~c"}
    assert len({p.pair_id for p in pairs}) == 10


def test_build_pairs_unrelated_books_gate():
    drops = []
    pairs = build_pairs((hist("h", paragraphs=_paragraphs(10, 2)),
                         cont("c", paragraphs=_paragraphs(10, 3))), drops=drops)
    assert pairs == []
    assert drops[0]["reason"] == "edition-quality" and drops[0]["quality"] < 0.9


def test_build_pairs_garbled_paragraph():
    paras = _paragraphs(10, 4)
    garbled = list(paras)
    garbled[6] = _paragraphs(1, 5)[0]
    drops = []
    pairs = build_pairs((hist("h", paragraphs=garbled), cont("c", paragraphs=paras)), drops=drops)
    assert len(pairs) == 9
    assert paras[6] not in {p.tgt for p in pairs}
    assert [d["reason"] for d in drops] == ["bead-score"]


def test_deduplicate():
    a, b = pair("1", "n", "x", "y"), pair("2", "n", "x", "y")
    c = pair("3", "n", "x", "z")
    assert deduplicate([a, b]) == [a]
    assert deduplicate([a, c]) == [a, c]
    assert deduplicate(deduplicate([a, b, c, b])) == deduplicate([a, b, c, b])


# -- variants --------------------------------------------------------------------------

@pytest.fixture(scope="module")
def corpus_pairs():
    return synthetic_pairs(n_novels=20, paragraphs=(10, 40), seed=3)


def test_pruning_keeps_exactly_changed_pairs():
    pairs = [pair(str(k), f"n{k % 3}", "a", "a" if k < 65 else "b") for k in range(100)]
    v = build_variant(pairs, pruning=True, separation=False, seed=0)
    assert len(v.train) + len(v.test) == 35
    assert len(v.test) == 7


def test_quartiles_ranking_and_ties():
    counts = {"a": 5, "b": 9, "c": 5, "d": 1, "e": 7}
    assert quartiles(counts) == [["b", "e"], ["a"], ["c"], ["d"]]
    q = quartiles({f"n{k:02d}": k for k in range(20)})
    assert [len(x) for x in q] == [5, 5, 5, 5]
    assert q[0][0] == "n19"


def test_separation_properties(corpus_pairs):
    v = build_variant(corpus_pairs, pruning=False, separation=True, seed=11)
    by_id = {p.pair_id: p for p in corpus_pairs}
    train_novels = {by_id[i].novel_id for i in v.train}
    test_novels = {by_id[i].novel_id for i in v.test}
    assert not train_novels & test_novels
    assert test_novels == set(v.test_novels) and len(test_novels) == 16
    counts = Counter(p.novel_id for p in corpus_pairs)
    for q in quartiles(counts):
        assert len(set(q) & test_novels) == 4
    assert sorted(v.train + v.test) == sorted(by_id)


def test_separation_needs_more_than_sixteen_novels():
    pairs = [pair(f"{k}", f"n{k:02d}", "a", "b") for k in range(16)]
    with pytest.raises(DatasetError, match="more than 16"):
        build_variant(pairs, pruning=False, separation=True, seed=0)


def test_empty_variant_error():
    with pytest.raises(DatasetError, match="empty"):
        build_variant([pair("1", "n", "a", "a")], pruning=True, separation=False, seed=0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_variant_invariants(corpus_pairs, seed):
    variants = build_all_variants(corpus_pairs, seed)
    by_id = {p.pair_id: p for p in corpus_pairs}
    stats = {}
    for v in variants:
        assert not set(v.train) & set(v.test)
        eligible = [p.pair_id for p in corpus_pairs if not (v.pruning and p.src == p.tgt)]
        assert sorted(v.train + v.test) == sorted(eligible)
        if v.pruning:
            assert all(by_id[i].src != by_id[i].tgt for i in v.train + v.test)
        s = variant_stats(v, corpus_pairs)
        assert (s.train, s.test) == (len(v.train), len(v.test))
        stats[(v.pruning, v.separation)] = s
    for pruning in (False, True):
        a, b = stats[(pruning, False)], stats[(pruning, True)]
        assert (a.characters, a.words) == (b.characters, b.words)


def test_variant_determinism_and_manifest_roundtrip(corpus_pairs):
    a = build_variant(corpus_pairs, True, False, seed=5)
    b = build_variant(corpus_pairs, True, False, seed=5)
    assert a.to_json() == b.to_json()
    assert build_variant(corpus_pairs, True, False, seed=6).to_json() != a.to_json()
    again = DatasetVariant.from_manifest(json.loads(a.to_json({"scorer": "x"})))
    assert (again.train, again.test, again.config["scorer"]) == (a.train, a.test, "x")


def test_variant_stats_counts_both_sides():
    pairs = [pair("1", "n", "Ala ma", "Ala ma kota")]
    v = DatasetVariant(False, False, 0, ["1"], [])
    assert tuple(variant_stats(v, pairs)) == (1, 0, 17, 5)
    assert tuple(variant_stats(DatasetVariant(False, False, 0, [], []), pairs)) == (0, 0, 0, 0)


# -- manifests and end to end ----------------------------------------------------------

def test_load_manifest_collects_problems(tmp_path):
    (tmp_path / "a.txt").write_text("Jeden.\n\nDwa.\n", encoding="utf-8")
    (tmp_path / "bad.wiki").write_text("{{otwarte", encoding="utf-8")
    lines = [
        {"id": "a", "source": HISTORICAL, "author": "x", "title": "y", "year": 1900, "path": "a.txt"},
        {"id": "a", "source": HISTORICAL, "author": "x", "title": "y", "year": 1900, "path": "a.txt"},
        {"id": "b", "source": HISTORICAL, "author": "x", "title": "y", "year": 1900},
        {"id": "c", "source": "nowhere", "author": "x", "title": "y", "year": 1900, "path": "a.txt"},
        {"id": "d", "source": HISTORICAL, "author": "x", "title": "y", "year": 1, "path": "bad.wiki"},
        {"id": "e", "source": HISTORICAL, "author": "x", "title": "y", "year": 1, "path": "no.txt"},
    ]
    (tmp_path / "m.jsonl").write_text("\n".join(json.dumps(r) for r in lines) + "\n{oops\n",
                                      encoding="utf-8")
    with pytest.raises(ManifestError) as info:
        load_manifest(tmp_path / "m.jsonl")
    problems = info.value.problems
    assert len(problems) == 6
    assert "duplicate id" in problems[0] and "missing path" in problems[1]
    assert "unknown source" in problems[2] and "line 1" in problems[3]
    assert "invalid JSON" in problems[5]


def test_build_corpus_on_synthetic_editions(tmp_path):
    manifest = write_edition_corpus(tmp_path, n_novels=6, seed=2)
    build = build_corpus(load_manifest(manifest))
    assert len(build.matches) == 6
    assert all(h[2:] == c[2:] for h, c in build.matches)
    assert not [d for d in build.drops if d["reason"] == "edition-quality"]
    assert len(build.pairs) > 40
    assert len({p.pair_id for p in build.pairs}) == len(build.pairs)
