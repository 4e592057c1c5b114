"""From raw edition files to aligned paragraph pairs and train/test variants.

Stages: paragraph extraction (MediaWiki, XML, plain text), character
cleanup, fuzzy author/title matching of editions, alignment with quality
gates, deduplication, and the four pruning x separation dataset variants.
"""
from __future__ import annotations

import html
import json
import logging
import math
import random
import re
import unicodedata
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

from . import aligner
from .aligner import ParagraphPair
from .metrics import edit_distance
from .rules import words

log = logging.getLogger(__name__)

HISTORICAL = "historical-archive"
CONTEMPORARY = "contemporary-library"
FORMATS = ("mediawiki", "xml", "plain")


class MarkupError(ValueError):
    def __init__(self, message, line=None, column=None):
        self.line, self.column = line, column
        where = f"line {line}" + (f", column {column}" if column is not None else "")
        super().__init__(f"{where}: {message}" if line is not None else message)


class DatasetError(ValueError):
    pass


@dataclass
class Edition:
    id: str
    source: str
    author: str
    title: str
    year: int
    paragraphs: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.source not in (HISTORICAL, CONTEMPORARY):
            raise ValueError(f"edition {self.id}: unknown source {self.source!r}")
        if not isinstance(self.year, int) or self.year <= 0:
            raise ValueError(f"edition {self.id}: year must be a positive integer")
        if self.paragraphs is None:
            raise ValueError(f"edition {self.id}: paragraphs must not be None")


# -- paragraph extraction -----------------------------------------------------

_WIKI_COMMENT = re.compile(r"<!--.*?-->", re.S)
_WIKI_DROP_BLOCKS = re.compile(
    r"<(ref|noinclude|math|gallery|score)\b[^>]*?/>|<(ref|noinclude|math|gallery|score)\b[^>]*>.*?</\2\s*>",
    re.S | re.I)
_WIKI_TABLE = re.compile(r"^\{\|.*?^\|\}[ \t]*$", re.S | re.M)
_WIKI_HEADING = re.compile(r"^=+[^=\n].*?=+[ \t]*$", re.M)
_WIKI_MAGIC = re.compile(r"__[A-ZĄĆĘŁŃÓŚŹŻ]+__")
_WIKI_EXT_LINK = re.compile(r"\[(?:https?|ftp)://[^\s\]]+(?: ([^\]]*))?\]")
_WIKI_QUOTES = re.compile(r"'{2,5}")
_WIKI_BR = re.compile(r"<br\s*/?>", re.I)
_TAG = re.compile(r"</?[A-Za-z][^<>]*?/?>")
_WIKI_LIST = re.compile(r"^[*#:;]+[ \t]*", re.M)
_NON_TEXT_NAMESPACES = ("kategoria", "category", "plik", "file", "image", "grafika", "obraz")

# templates that wrap running text: value is the positional argument to keep
_TEXT_TEMPLATES = {
    "c": 1, "center": 1, "f": 1, "roz": 1, "rozstrzelony": 1, "wersaliki": 1,
    "kap": 1, "korekta": 2, "tab": 0, "pk": 0,
}


def _line_of(text, pos):
    return text.count("\n", 0, pos) + 1


def _replace_templates(text):
    """Expand or drop ``{{...}}`` templates, innermost first."""
    out = []
    stack = []  # indices into out where a template started
    i = 0
    while i < len(text):
        if text.startswith("{{", i):
            stack.append((len(out), i))
            out.append("")
            i += 2
        elif text.startswith("}}", i) and stack:
            start, src_pos = stack.pop()
            body = "".join(out[start + 1:])
            del out[start:]
            out.append(_template_text(body))
            i += 2
        elif text.startswith("}}", i):
            raise MarkupError("unmatched '}}'", _line_of(text, i))
        else:
            out.append(text[i])
            i += 1
    if stack:
        raise MarkupError("unclosed '{{' template", _line_of(text, stack[-1][1]))
    return "".join(out)


def _template_text(body):
    name, *args = body.split("|")
    keep = _TEXT_TEMPLATES.get(name.strip().lower())
    if not keep:
        return ""
    positional = [a for a in args if "=" not in a]
    return positional[keep - 1] if len(positional) >= keep else ""


def _replace_links(text):
    out = []
    i = 0
    while True:
        j = text.find("[[", i)
        if j < 0:
            out.append(text[i:])
            break
        k = text.find("]]", j)
        if k < 0:
            raise MarkupError("unclosed '[[' link", _line_of(text, j))
        inner = text[j + 2:k]
        if "[[" in inner:
            raise MarkupError("nested '[[' link", _line_of(text, j))
        out.append(text[i:j])
        target, _, label = inner.partition("|")
        ns = target.split(":", 1)[0].strip().lower() if ":" in target else ""
        if ns not in _NON_TEXT_NAMESPACES:
            out.append(label if label else target)
        i = k + 2
    result = "".join(out)
    if "]]" in result:
        raise MarkupError("unmatched ']]'", _line_of(result, result.find("]]")))
    return result


def _split_blocks(text):
    blocks = re.split(r"\n[ \t]*\n", text)
    return [" ".join(b.split()) for b in blocks if b.strip()]


def _extract_mediawiki(doc):
    text = doc.replace("\r\n", "\n")
    text = _WIKI_COMMENT.sub("", text)
    text = _WIKI_DROP_BLOCKS.sub("", text)
    text = _replace_templates(text)
    text = _WIKI_TABLE.sub("", text)
    text = _WIKI_HEADING.sub("", text)
    text = _WIKI_MAGIC.sub("", text)
    text = _replace_links(text)
    text = _WIKI_EXT_LINK.sub(lambda m: m.group(1) or "", text)
    text = _WIKI_QUOTES.sub("", text)
    text = _WIKI_BR.sub(" ", text)
    text = _TAG.sub("", text)
    text = _WIKI_LIST.sub("", text)
    text = html.unescape(text)
    return _split_blocks(text)


# Wolne Lektury-style paragraph elements and in-text metadata to skip
XML_PARAGRAPHS = {"p", "akap", "akap_cd", "akap_dialog", "akapit", "akapit_dialog"}
XML_SKIP = {"RDF", "motyw", "begin", "end", "pa", "pe", "pr", "pt", "nota_red",
            "uwaga", "extra", "didaskalia_meta", "abstrakt", "nota"}
_XML_DECL = re.compile(r"^\s*<\?xml[^>]*\?>")
_ROOT = "<diachron-root>"


def _local(tag):
    return tag.rsplit("}", 1)[-1] if isinstance(tag, str) else ""


def _xml_text(elem):
    parts = [elem.text or ""]
    for child in elem:
        if _local(child.tag) not in XML_SKIP:
            parts.append(_xml_text(child))
        parts.append(child.tail or "")
    return "".join(parts)


def _extract_xml(doc):
    body = _XML_DECL.sub(lambda m: "\n" * m.group().count("\n"), doc)
    body = re.sub(r"<!DOCTYPE[^>]*>", "", body)
    try:
        root = ET.fromstring(_ROOT + body + _ROOT.replace("<", "</"))
    except ET.ParseError as exc:
        line, col = exc.position
        if line == 1:
            col -= len(_ROOT)
        reason = re.sub(r": line \d+, column \d+$", "", str(exc))
        raise MarkupError(f"malformed XML: {reason}", line, col) from None
    paragraphs = []

    def walk(elem):
        name = _local(elem.tag)
        if name in XML_SKIP:
            return
        if name in XML_PARAGRAPHS:
            text = " ".join(_xml_text(elem).split())
            if text:
                paragraphs.append(text)
            return
        for child in elem:
            walk(child)

    walk(root)
    return paragraphs


def extract_paragraphs(document: str, format: str) -> list[str]:
    """Split a document into markup-free paragraphs, in document order."""
    if format == "mediawiki":
        return _extract_mediawiki(document)
    if format == "xml":
        return _extract_xml(document)
    if format == "plain":
        return _split_blocks(document.replace("\r\n", "\n"))
    raise ValueError(f"unknown format {format!r}; expected one of {', '.join(FORMATS)}")


# -- character cleanup ---------------------------------------------------------

POLISH_LETTERS = frozenset("ąćęłńóśźżĄĆĘŁŃÓŚŹŻ")
NORMAL_FORM = "NFC"

_LETTER_FOLDS = {"ø": "o", "Ø": "O", "đ": "d", "Đ": "D", "ı": "i", "ŀ": "l", "Ŀ": "L",
                 "æ": "ae", "Æ": "AE", "œ": "oe", "Œ": "OE", "ß": "ss", "ħ": "h", "Ħ": "H"}
_PUNCT_FOLDS = {
    "„": '"', "”": '"', "“": '"', "‟": '"', "«": '"', "»": '"', "″": '"',
    "‘": "'", "’": "'", "‚": "'", "‛": "'", "′": "'", "‹": "'", "›": "'",
    "…": "...", "‐": "-", "‑": "-", "‒": "-", "­": "", "​": "", "‌": "",
    "‍": "", "﻿": "",
}
_CAPS = "A-ZĄĆĘŁŃÓŚŹŻ"
# leading quotation dash, and an all-caps speaker cue such as "JAN:" or "HRABIA."
DIALOGUE_PREFIXES = (
    re.compile(r"^[—–-]+\s*"),
    re.compile(rf"^[{_CAPS}][{_CAPS}]+(?: [{_CAPS}]+)*\s*[:.]\s+"),
)


def _fold_char(ch):
    if ch.isascii() or ch in POLISH_LETTERS:
        return ch
    if ch in _PUNCT_FOLDS:
        return _PUNCT_FOLDS[ch]
    if ch in _LETTER_FOLDS:
        return _LETTER_FOLDS[ch]
    if 0xFF01 <= ord(ch) <= 0xFF5E:  # fullwidth ASCII
        return chr(ord(ch) - 0xFEE0)
    if unicodedata.combining(ch):
        return ""
    if unicodedata.category(ch).startswith("L"):
        base = "".join(c for c in unicodedata.normalize("NFKD", ch) if not unicodedata.combining(c))
        if base and base.isascii():
            return base
    return ch


def clean_paragraph(paragraph: str) -> str:
    """Fold non-Polish letter variants to ASCII, tidy punctuation, drop dialogue prefixes."""
    text = unicodedata.normalize(NORMAL_FORM, paragraph)
    text = "".join(_fold_char(c) for c in text)
    text = " ".join(text.split())
    while True:
        before = text
        for prefix in DIALOGUE_PREFIXES:
            text = prefix.sub("", text, count=1)
        if text == before:
            break
    return unicodedata.normalize(NORMAL_FORM, text.strip())


def preprocess(edition: Edition) -> Edition:
    paragraphs = [p for p in (clean_paragraph(x) for x in edition.paragraphs) if p]
    return Edition(edition.id, edition.source, edition.author, edition.title, edition.year,
                   paragraphs)


# -- edition matching --------------------------------------------------------------

def fold_metadata(text: str) -> str:
    text = text.replace("ł", "l").replace("Ł", "L")
    text = "".join(c for c in unicodedata.normalize("NFKD", text) if not unicodedata.combining(c))
    text = re.sub(r"[\W_]+", " ", text.casefold())
    return " ".join(text.split())


def metadata_similarity(a: str, b: str) -> float:
    """1 minus normalized edit distance after case and diacritic folding."""
    fa, fb = fold_metadata(a), fold_metadata(b)
    if not fa and not fb:
        return 1.0
    return 1.0 - edit_distance(fa, fb) / max(len(fa), len(fb))


@dataclass(frozen=True)
class MatchDiagnostic:
    kind: str  # near-miss, ambiguous
    historical: str
    contemporary: str
    author_similarity: float
    title_similarity: float


NEAR_MISS_MARGIN = 0.2
EPS = 1e-9


def match_editions(historical, contemporary, author_threshold=0.85, title_threshold=0.85,
                   diagnostics: list | None = None) -> list[tuple[Edition, Edition]]:
    """Pair the oldest historical edition with the newest contemporary one per novel.

    Two editions are linked when author and title similarity both reach
    their thresholds and each is the other's best-scoring candidate (exact
    ties allowed, so identical reprints group together).  Linked editions
    form one novel.  Near misses and threshold-passing links that lose to a
    better candidate are appended to ``diagnostics``.
    """
    diags = diagnostics if diagnostics is not None else []
    candidates = []
    for h in historical:
        for c in contemporary:
            a = metadata_similarity(h.author, c.author)
            t = metadata_similarity(h.title, c.title)
            if a >= author_threshold and t >= title_threshold:
                candidates.append((h, c, a, t))
            elif a >= author_threshold - NEAR_MISS_MARGIN and t >= title_threshold - NEAR_MISS_MARGIN:
                diags.append(MatchDiagnostic("near-miss", h.id, c.id, a, t))

    best_h: dict[str, float] = {}
    best_c: dict[str, float] = {}
    for h, c, a, t in candidates:
        best_h[h.id] = max(best_h.get(h.id, 0.0), a + t)
        best_c[c.id] = max(best_c.get(c.id, 0.0), a + t)

    parent: dict = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for h, c, a, t in candidates:
        if a + t >= best_h[h.id] - EPS and a + t >= best_c[c.id] - EPS:
            parent[find(("h", h.id))] = find(("c", c.id))
        else:
            diags.append(MatchDiagnostic("ambiguous", h.id, c.id, a, t))

    groups: dict = {}
    for h in historical:
        groups.setdefault(find(("h", h.id)), ([], []))[0].append(h)
    for c in contemporary:
        groups.setdefault(find(("c", c.id)), ([], []))[1].append(c)

    matches = []
    for hs, cs in groups.values():
        if not hs or not cs:
            continue
        oldest = min(hs, key=lambda e: (e.year, e.id))
        newest = min(cs, key=lambda e: (-e.year, e.id))
        matches.append((oldest, newest))
    matches.sort(key=lambda m: (m[0].id, m[1].id))
    return matches


# -- pair building ------------------------------------------------------------------

def novel_id(historical: Edition, contemporary: Edition) -> str:
    return f"{historical.id}~{contemporary.id}"


def build_pairs(edition_pair, bead_threshold=1.0, edition_threshold=0.9, band=None,
                drops: list | None = None) -> list[ParagraphPair]:
    """Align one matched edition pair and keep the well-scored beads.

    The whole edition pair is dropped when its average bead score is below
    ``edition_threshold``.  Drop reasons are appended to ``drops``.
    """
    hist, cont = edition_pair
    nid = novel_id(hist, cont)
    result = aligner.align(hist.paragraphs, cont.paragraphs, band=band)
    quality = aligner.edition_pair_quality(result)
    if quality < edition_threshold:
        reason = {"novel_id": nid, "reason": "edition-quality", "quality": quality}
        log.info("dropping %s: edition quality %.3f < %.3f", nid, quality, edition_threshold)
        if drops is not None:
            drops.append(reason)
        return []
    pairs = aligner.filter_beads(result, bead_threshold, novel_id=nid)
    if drops is not None:
        for bead in result.beads:
            if bead.is_null:
                drops.append({"novel_id": nid, "reason": "null-bead", "bead": bead.to_dict()})
            elif bead.score < bead_threshold:
                drops.append({"novel_id": nid, "reason": "bead-score", "bead": bead.to_dict()})
    return pairs


def deduplicate(pairs):
    seen = set()
    out = []
    for p in pairs:
        key = (p.src, p.tgt)
        if key not in seen:
            seen.add(key)
            out.append(p)
    return out


# -- dataset variants -----------------------------------------------------------------

TEST_FRACTION = 0.2
NOVELS_PER_QUARTILE = 4


@dataclass
class DatasetVariant:
    pruning: bool
    separation: bool
    seed: int
    train: list[str]
    test: list[str]
    test_novels: list[str] = field(default_factory=list)
    config: dict = field(default_factory=dict)

    @property
    def id(self):
        return f"{'pruned' if self.pruning else 'full'}-{'separated' if self.separation else 'mixed'}"

    def manifest(self, extra=None) -> dict:
        return {
            "variant": self.id, "pruning": self.pruning, "separation": self.separation,
            "seed": self.seed, "train": self.train, "test": self.test,
            "test_novels": self.test_novels, "config": {**self.config, **(extra or {})},
        }

    def to_json(self, extra=None) -> str:
        return json.dumps(self.manifest(extra), ensure_ascii=False, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_manifest(cls, d):
        return cls(d["pruning"], d["separation"], d["seed"], list(d["train"]), list(d["test"]),
                   list(d.get("test_novels", [])), dict(d.get("config", {})))


def quartiles(counts: dict[str, int]) -> list[list[str]]:
    """Novels ranked by pair count (descending, ties by id) cut into four quartiles."""
    ranked = sorted(counts, key=lambda k: (-counts[k], k))
    n = len(ranked)
    bounds = [math.ceil(k * n / 4) for k in range(5)]
    return [ranked[bounds[k]:bounds[k + 1]] for k in range(4)]


def build_variant(pairs, pruning: bool, separation: bool, seed: int,
                  test_fraction=TEST_FRACTION, novels_per_quartile=NOVELS_PER_QUARTILE) -> DatasetVariant:
    eligible = [p for p in pairs if not (pruning and p.src == p.tgt)]
    if not eligible:
        raise DatasetError("variant would be empty")
    rng = random.Random(seed)
    config = {"test_fraction": test_fraction, "novels_per_quartile": novels_per_quartile}

    if separation:
        counts: dict[str, int] = {}
        for p in eligible:
            counts[p.novel_id] = counts.get(p.novel_id, 0) + 1
        need = 4 * novels_per_quartile
        if len(counts) <= need:
            raise DatasetError(f"separation needs more than {need} novels, got {len(counts)}")
        test_novels = []
        for q in quartiles(counts):
            if len(q) < novels_per_quartile:
                raise DatasetError(f"a quartile has only {len(q)} novels")
            test_novels += rng.sample(q, novels_per_quartile)
        chosen = set(test_novels)
        train = [p.pair_id for p in eligible if p.novel_id not in chosen]
        test = [p.pair_id for p in eligible if p.novel_id in chosen]
        return DatasetVariant(pruning, True, seed, train, test, sorted(test_novels), config)

    ids = [p.pair_id for p in eligible]
    shuffled = ids[:]
    rng.shuffle(shuffled)
    held = set(shuffled[:round(len(ids) * test_fraction)])
    train = [i for i in ids if i not in held]
    test = [i for i in ids if i in held]
    return DatasetVariant(pruning, False, seed, train, test, [], config)


def build_all_variants(pairs, seed: int, **kwargs) -> list[DatasetVariant]:
    return [build_variant(pairs, pruning, separation, seed, **kwargs)
            for separation in (False, True) for pruning in (False, True)]


class VariantStats(NamedTuple):
    train: int
    test: int
    characters: int
    words: int


def variant_stats(variant: DatasetVariant, pairs) -> VariantStats:
    """Split sizes plus character and word totals over both sides of every pair."""
    by_id = {p.pair_id: p for p in pairs}
    chars = nwords = 0
    for pid in variant.train + variant.test:
        p = by_id[pid]
        chars += len(p.src) + len(p.tgt)
        nwords += len(words(p.src)) + len(words(p.tgt))
    return VariantStats(len(variant.train), len(variant.test), chars, nwords)


def format_stats_table(rows) -> str:
    """Plain-text table of ``(variant, stats)`` rows."""
    header = ("Pruning", "Separation", "Train", "Test", "Characters", "Words")
    body = [("Yes" if v.pruning else "No", "Yes" if v.separation else "No",
             f"{s.train:,}", f"{s.test:,}", f"{s.characters:,}", f"{s.words:,}") for v, s in rows]
    widths = [max(len(x) for x in col) for col in zip(header, *body)]
    lines = []
    for k, row in enumerate([header] + body):
        lines.append("  ".join(c.ljust(w) if i < 2 else c.rjust(w)
                               for i, (c, w) in enumerate(zip(row, widths))).rstrip())
        if k == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


# -- manifests ----------------------------------------------------------------------

class ManifestError(ValueError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


_FORMAT_BY_SUFFIX = {".xml": "xml", ".wiki": "mediawiki", ".mediawiki": "mediawiki",
                     ".txt": "plain"}


def load_manifest(path) -> list[Edition]:
    """Read a JSONL edition manifest and extract each referenced content file.

    Each record needs ``id``, ``source``, ``author``, ``title``, ``year`` and
    ``path`` (relative to the manifest); ``format`` defaults from the file
    suffix.  All problems are collected before raising :class:`ManifestError`.
    """
    path = Path(path)
    editions, problems = [], []
    seen = set()
    with open(path, encoding="utf-8") as f:
        lines = f.read().splitlines()
    for n, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            problems.append(f"{path.name}:{n}: invalid JSON ({exc.msg})")
            continue
        missing = [k for k in ("id", "source", "author", "title", "year", "path") if k not in rec]
        if missing:
            problems.append(f"{path.name}:{n}: missing {', '.join(missing)}")
            continue
        if rec["id"] in seen:
            problems.append(f"{path.name}:{n}: duplicate id {rec['id']!r}")
            continue
        seen.add(rec["id"])
        content = path.parent / rec["path"]
        fmt = rec.get("format") or _FORMAT_BY_SUFFIX.get(content.suffix, "plain")
        try:
            text = content.read_text(encoding="utf-8")
            paragraphs = extract_paragraphs(text, fmt)
            editions.append(Edition(rec["id"], rec["source"], rec["author"], rec["title"],
                                    rec["year"], paragraphs))
        except (OSError, ValueError) as exc:
            problems.append(f"{path.name}:{n}: {rec['id']}: {exc}")
    if problems:
        raise ManifestError(problems)
    return editions


@dataclass
class BuildConfig:
    seed: int = 0
    bead_threshold: float = 1.0
    edition_threshold: float = 0.9
    author_threshold: float = 0.85
    title_threshold: float = 0.85
    band: int | None = None
    test_fraction: float = TEST_FRACTION
    novels_per_quartile: int = NOVELS_PER_QUARTILE


@dataclass
class CorpusBuild:
    pairs: list[ParagraphPair]
    matches: list[tuple[str, str]]
    match_diagnostics: list[MatchDiagnostic]
    drops: list[dict]


def build_corpus(editions, config: BuildConfig | None = None) -> CorpusBuild:
    """Preprocess, match, align and deduplicate a set of editions."""
    config = config or BuildConfig()
    editions = [preprocess(e) for e in editions]
    hist = [e for e in editions if e.source == HISTORICAL]
    cont = [e for e in editions if e.source == CONTEMPORARY]
    diags: list[MatchDiagnostic] = []
    matches = match_editions(hist, cont, config.author_threshold, config.title_threshold, diags)
    drops: list[dict] = []
    pairs = []
    for pair in matches:
        pairs += build_pairs(pair, config.bead_threshold, config.edition_threshold,
                             config.band, drops)
    return CorpusBuild(deduplicate(pairs), [(h.id, c.id) for h, c in matches], diags, drops)
