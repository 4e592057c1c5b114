import random

import pytest
from hypothesis import given, settings, strategies as st

from diachron.aligner import (AlignmentBead, AlignmentResult, align, edition_pair_quality,
                              filter_beads, length_ratio, similarity, trigram_cosine)
from diachron.reverse import invert_ruleset
from diachron.rules import default_ruleset
from diachron.synthetic import contemporary_lexicon, historicize, make_paragraph
from oracles import bead_sequences, brute_align_objective, sequence_objective

LEXICON = contemporary_lexicon(1500, seed=0, prefixed=False)


def paragraph_pool(seed=3):
    """Twelve paragraphs: distinct texts, aged copies, a join, a fragment and a short line."""
    rng = random.Random(seed)
    gen = invert_ruleset(default_ruleset())
    base = [make_paragraph(rng, LEXICON, sentences=(1, 2)) for _ in range(6)]
    aged = [historicize(p, gen, rng, rate=0.8) for p in base[:3]]
    return base + aged + [base[0] + " " + base[1], base[3][:20], "Krótko."]


POOL = paragraph_pool()


def shapes(result):
    return [b.shape for b in result.beads]


# -- similarity ---------------------------------------------------------------------

def test_similarity_examples():
    assert similarity("Ala ma kota.", "Ala ma kota.") == 2.0
    assert similarity("abc", "") == 0.0
    assert similarity("", "") == 0.0
    assert similarity("decyzya padła", "decyzja padła") > 1.5


@given(st.text(max_size=30), st.text(max_size=30))
def test_similarity_bounds_and_symmetry(a, b):
    s = similarity(a, b)
    assert 0.0 <= s <= 2.0
    assert s == pytest.approx(similarity(b, a))
    assert 0.0 <= trigram_cosine(a, b) <= 1.0 + 1e-12
    assert 0.0 <= length_ratio(a, b) <= 1.0


def test_similarity_is_case_folded():
    assert trigram_cosine("Decyzja", "decyzja") == pytest.approx(1.0)


def test_unrelated_paragraphs_score_below_threshold():
    rng = random.Random(11)
    paras = [make_paragraph(rng, LEXICON) for _ in range(1001)]
    scores = [similarity(a, b) for a, b in zip(paras, paras[1:])]
    assert sum(s >= 1.0 for s in scores) / len(scores) < 0.02
    assert max(scores) < 1.2


def test_related_paragraphs_score_above_threshold():
    rng = random.Random(12)
    gen = invert_ruleset(default_ruleset())
    for _ in range(60):
        p = make_paragraph(rng, LEXICON)
        assert similarity(historicize(p, gen, rng, rate=0.8), p) >= 1.5


# -- align ----------------------------------------------------------------------------

def test_identity_alignment():
    result = align(POOL[:6], POOL[:6])
    assert shapes(result) == [(1, 1)] * 6
    assert all(b.score == 2.0 for b in result.beads)
    assert edition_pair_quality(result) == 2.0


def test_split_fixture():
    a, b, c = POOL[3], POOL[4], POOL[5]
    result = align([a, b + " " + c], [a, b, c])
    assert shapes(result) == [(1, 1), (1, 2)]
    brute = max(bead_sequences(2, 3), key=lambda s: sequence_objective([a, b + " " + c], [a, b, c], s))
    assert brute == [(1, 1), (1, 2)]


def test_empty_inputs():
    assert align([], []).beads == []
    assert edition_pair_quality(align([], [])) == 0.0
    assert shapes(align([], ["X"])) == [(0, 1)]
    assert shapes(align(["X"], [])) == [(1, 0)]
    assert align([], ["X"]).average_score == 0.0


def _check_cover(result, n, m):
    src = [i for b in result.beads for i in b.src]
    tgt = [j for b in result.beads for j in b.tgt]
    assert src == list(range(n)) and tgt == list(range(m))
    assert all(b.shape in {(1, 1), (1, 2), (2, 1), (1, 0), (0, 1)} for b in result.beads)


def test_dp_matches_brute_force_on_pool():
    rng = random.Random(7)
    for _ in range(200):
        src = [rng.choice(POOL) for _ in range(rng.randint(0, 6))]
        tgt = [rng.choice(POOL) for _ in range(rng.randint(0, 6))]
        result = align(src, tgt)
        _check_cover(result, len(src), len(tgt))
        assert result.objective() == pytest.approx(brute_align_objective(src, tgt), abs=1e-9)


def test_tie_break_prefers_one_to_one_beads():
    rng = random.Random(8)
    for _ in range(60):
        src = [rng.choice(POOL) for _ in range(rng.randint(1, 5))]
        tgt = [rng.choice(POOL) for _ in range(rng.randint(1, 5))]
        scored = [(sequence_objective(src, tgt, s), s) for s in bead_sequences(len(src), len(tgt))]
        top = max(o for o, _ in scored)
        best_ones = max(s.count((1, 1)) for o, s in scored if o >= top - 1e-9)
        assert shapes(align(src, tgt)).count((1, 1)) == best_ones


def test_tie_break_is_lexicographic_on_boundaries():
    # with a constant scorer, every 1-1 sequence ties; the earliest boundaries win
    result = align(["a", "b"], ["c", "d"], scorer=lambda s, t: 1.0)
    assert shapes(result) == [(1, 1), (1, 1)]
    # two null beads beat a costly 1-1 bead; both orders tie, target-first is earlier
    result = align(["a"], ["b"], scorer=lambda s, t: 0.0,
                   penalties={(1, 1): 1.0, (1, 2): 0.25, (2, 1): 0.25, (1, 0): 0.45, (0, 1): 0.45})
    assert shapes(result) == [(0, 1), (1, 0)]
    # equal objective and equal 1-1 counts: the earlier boundary (1, 1) beats (1, 2)
    result = align(["a", "b"], ["c", "d", "e"], scorer=lambda s, t: 1.0,
                   penalties={(1, 1): 0.0, (1, 2): 0.0, (2, 1): 0.0, (1, 0): 1.0, (0, 1): 1.0})
    assert shapes(result) == [(1, 1), (1, 2)]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from(POOL[:6]), min_size=1, max_size=6, unique=True))
def test_identity_recovery_property(paras):
    assert shapes(align(paras, paras)) == [(1, 1)] * len(paras)


def test_split_recovery_rate():
    rng = random.Random(5)
    trials = 200
    recovered = 0
    for _ in range(trials):
        tgt = [make_paragraph(rng, LEXICON) for _ in range(rng.randint(3, 10))]
        k = rng.randrange(len(tgt) - 1)
        src = tgt[:k] + [tgt[k] + " " + tgt[k + 1]] + tgt[k + 2:]
        result = align(src, tgt)
        recovered += any(b.src == (k,) and b.tgt == (k, k + 1) for b in result.beads)
    assert recovered / trials >= 0.95


def test_band_is_exact_when_wide_enough():
    rng = random.Random(6)
    tgt = [make_paragraph(rng, LEXICON) for _ in range(30)]
    src = tgt[:10] + [tgt[10] + " " + tgt[11]] + tgt[12:]
    assert shapes(align(src, tgt, band=3)) == shapes(align(src, tgt))


# -- filter ---------------------------------------------------------------------------

def test_filter_beads():
    result = AlignmentResult(
        [AlignmentBead((0,), (0,), 2.0), AlignmentBead((1,), (1, 2), 1.4),
         AlignmentBead((2,), (), 0.0), AlignmentBead((3,), (3,), 0.4),
         AlignmentBead((4, 5), (4,), 1.0), AlignmentBead((), (5,), 0.0)],
        ["a", "b", "c", "d", "e", "f"], ["A", "B", "C", "D", "E", "F"])
    pairs = filter_beads(result, 1.0, novel_id="n1")
    assert [(p.src, p.tgt) for p in pairs] == [("a", "A"), ("b", "B C"), ("e f", "E")]
    assert [p.pair_id for p in pairs] == ["n1:00000", "n1:00001", "n1:00004"]
    assert len(filter_beads(result, 0.0)) == 4
    assert result.average_score == pytest.approx((2.0 + 1.4 + 0.4 + 1.0) / 4)
    with pytest.raises(ValueError):
        filter_beads(result, -1)


def test_edition_quality_of_unrelated_texts():
    rng = random.Random(13)
    a = [make_paragraph(rng, LEXICON) for _ in range(12)]
    b = [make_paragraph(rng, LEXICON) for _ in range(12)]
    assert edition_pair_quality(align(a, b)) < 1.2
