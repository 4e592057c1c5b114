"""Monotone paragraph alignment between two editions of the same text.

Beads pair up to two consecutive paragraphs on one side with up to two on the
other (shapes 1-1, 1-2, 2-1, 1-0, 0-1).  A dynamic program picks the bead
sequence maximizing the summed bead scores minus per-shape penalties.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

DEFAULT_PENALTIES = {(1, 1): 0.0, (1, 2): 0.25, (2, 1): 0.25, (1, 0): 0.45, (0, 1): 0.45}
# candidate shapes ordered by the boundary they reach, for deterministic ties
SHAPES = [(0, 1), (1, 0), (1, 1), (1, 2), (2, 1)]
EPS = 1e-9
# trigram cosine reached by unrelated same-language prose; rescaled to 0
LEXICAL_FLOOR = 0.35
SCORER_VERSION = f"length-ratio+trigram-cosine(floor={LEXICAL_FLOOR})"


@dataclass(frozen=True)
class ParagraphPair:
    pair_id: str
    novel_id: str
    src: str
    tgt: str
    score: float = 0.0


@dataclass(frozen=True)
class AlignmentBead:
    src: tuple[int, ...]
    tgt: tuple[int, ...]
    score: float

    @property
    def shape(self):
        return (len(self.src), len(self.tgt))

    @property
    def is_null(self):
        return not self.src or not self.tgt

    def to_dict(self):
        return {"src": list(self.src), "tgt": list(self.tgt), "score": self.score}


@dataclass
class AlignmentResult:
    beads: list[AlignmentBead]
    src: list[str] = field(default_factory=list, repr=False)
    tgt: list[str] = field(default_factory=list, repr=False)

    @property
    def average_score(self) -> float:
        scores = [b.score for b in self.beads if not b.is_null]
        return sum(scores) / len(scores) if scores else 0.0

    def objective(self, penalties=None) -> float:
        return bead_objective(self.beads, penalties)


def bead_objective(beads, penalties=None) -> float:
    penalties = penalties or DEFAULT_PENALTIES
    return sum(b.score - penalties[b.shape] for b in beads)


def _grams(text):
    text = text.casefold()
    if len(text) < 3:
        return Counter([text]) if text else Counter()
    return Counter(text[i:i + 3] for i in range(len(text) - 2))


@lru_cache(maxsize=65536)
def _profile(text):
    grams = _grams(text)
    return grams, math.sqrt(sum(v * v for v in grams.values()))


def trigram_cosine(a: str, b: str) -> float:
    ga, na = _profile(a)
    gb, nb = _profile(b)
    if not na or not nb:
        return 0.0
    if len(ga) > len(gb):
        ga, gb = gb, ga
    dot = sum(v * gb[k] for k, v in ga.items() if k in gb)
    return min(1.0, dot / (na * nb))


def length_ratio(a: str, b: str) -> float:
    if not a or not b:
        return 0.0
    return min(len(a), len(b)) / max(len(a), len(b))


def lexical_overlap(a: str, b: str, floor: float = LEXICAL_FLOOR) -> float:
    """Trigram cosine rescaled so that ``floor`` maps to 0 and 1 stays 1."""
    return max(0.0, (trigram_cosine(a, b) - floor) / (1.0 - floor))


def similarity(src_par: str, tgt_par: str) -> float:
    """Bead quality in [0, 2]: length ratio plus rescaled trigram cosine.

    Identical non-empty paragraphs score 2.0.  Unrelated paragraphs get
    little more than their length ratio, so 1.0 separates usable pairs from
    misaligned ones.
    """
    if src_par == tgt_par and src_par:
        return 2.0
    return length_ratio(src_par, tgt_par) + lexical_overlap(src_par, tgt_par)


def align(src: list[str], tgt: list[str], penalties=None, band: int | None = None,
          scorer=similarity) -> AlignmentResult:
    """Best monotone bead sequence covering both paragraph lists.

    Ties on the objective go to the alignment with more 1-1 beads, then to
    the one whose bead boundaries are lexicographically earliest.  ``band``
    optionally restricts the search to cells within that many target
    paragraphs of the diagonal, trading exactness for speed on long texts.
    """
    penalties = penalties or DEFAULT_PENALTIES
    n, m = len(src), len(tgt)
    joined_src = [src[i] + " " + src[i + 1] for i in range(n - 1)]
    joined_tgt = [tgt[j] + " " + tgt[j + 1] for j in range(m - 1)]

    def in_band(i, j):
        if band is None or n == 0 or m == 0:
            return True
        return abs(j - i * m / n) <= band

    def bead_score(i, j, di, dj):
        if di == 0 or dj == 0:
            return 0.0
        s = src[i] if di == 1 else joined_src[i]
        t = tgt[j] if dj == 1 else joined_tgt[j]
        return scorer(s, t)

    # best[i][j]: (objective, n_one_to_one, shape, score) for src[i:], tgt[j:]
    NEG = (-math.inf, 0, None, 0.0)
    best = [[NEG] * (m + 1) for _ in range(n + 1)]
    best[n][m] = (0.0, 0, None, 0.0)
    for i in range(n, -1, -1):
        for j in range(m, -1, -1):
            if (i, j) == (n, m) or not in_band(i, j):
                continue
            cur = NEG
            for di, dj in SHAPES:
                ni, nj = i + di, j + dj
                if ni > n or nj > m:
                    continue
                nxt = best[ni][nj]
                if nxt[0] == -math.inf:
                    continue
                score = bead_score(i, j, di, dj)
                obj = nxt[0] + score - penalties[(di, dj)]
                ones = nxt[1] + ((di, dj) == (1, 1))
                if obj > cur[0] + EPS or (abs(obj - cur[0]) <= EPS and ones > cur[1]):
                    cur = (obj, ones, (di, dj), score)
            best[i][j] = cur

    beads = []
    i = j = 0
    if best[0][0][0] == -math.inf:
        raise ValueError("band too narrow to connect the two texts")
    while (i, j) != (n, m):
        _, _, (di, dj), score = best[i][j]
        beads.append(AlignmentBead(tuple(range(i, i + di)), tuple(range(j, j + dj)), score))
        i, j = i + di, j + dj
    return AlignmentResult(beads, list(src), list(tgt))


def filter_beads(result: AlignmentResult, threshold: float = 1.0,
                 novel_id: str = "") -> list[ParagraphPair]:
    """Turn non-null beads scoring at least ``threshold`` into paragraph pairs."""
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    pairs = []
    for k, bead in enumerate(result.beads):
        if bead.is_null or bead.score < threshold:
            continue
        src = " ".join(result.src[i] for i in bead.src)
        tgt = " ".join(result.tgt[j] for j in bead.tgt)
        pair_id = f"{novel_id}:{k:05d}" if novel_id else f"{k:05d}"
        pairs.append(ParagraphPair(pair_id, novel_id, src, tgt, bead.score))
    return pairs


def edition_pair_quality(result: AlignmentResult) -> float:
    return result.average_score
