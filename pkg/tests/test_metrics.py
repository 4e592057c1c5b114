import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from diachron.aligner import ParagraphPair
from diachron.metrics import (EmptyReferenceError, align_predictions, cer, corpus_rates,
                              edit_distance, edit_script, evaluate, format_table,
                              read_predictions, wer)
from oracles import brute_edit_distance

short = st.text(alphabet="abcd", max_size=8)


def pair(pid, src, tgt):
    return ParagraphPair(pid, "n", src, tgt, 2.0)


@pytest.mark.parametrize("a,b,d", [("kot", "kot", 0), ("kot", "kos", 1), ("", "abc", 3),
                                   ("abc", "", 3), ("kitten", "sitting", 3)])
def test_edit_distance_examples(a, b, d):
    assert edit_distance(a, b) == d


def test_edit_distance_matches_oracle_on_seeded_pairs():
    rng = random.Random(2024)
    for _ in range(1000):
        a = "".join(rng.choice("abcd") for _ in range(rng.randint(0, 8)))
        b = "".join(rng.choice("abcd") for _ in range(rng.randint(0, 8)))
        assert edit_distance(a, b) == brute_edit_distance(a, b), (a, b)


@given(short, short, short)
def test_metric_axioms(a, b, c):
    assert edit_distance(a, b) == edit_distance(b, a)
    assert edit_distance(a, c) <= edit_distance(a, b) + edit_distance(b, c)
    assert (edit_distance(a, b) == 0) == (a == b)


@given(short, short)
def test_edit_script_is_minimal_and_valid(a, b):
    ops = edit_script(a, b)
    assert sum(op != "match" for op, _, _ in ops) == edit_distance(a, b)
    out = []
    for op, i, j in ops:
        if op in ("match", "sub", "ins"):
            out.append(b[j])
        if op == "match":
            assert a[i] == b[j]
    assert "".join(out) == b
    assert [i for _, i, _ in ops if i is not None] == list(range(len(a)))


def test_edit_distance_on_word_lists():
    assert edit_distance(["nie", "ma"], ["niema"]) == 2


def test_cer_examples():
    assert cer("abc", "abc") == 0.0
    assert cer("abd", "abc") == pytest.approx(1 / 3)
    assert cer("", "ab") == 1.0
    with pytest.raises(EmptyReferenceError):
        cer("a", "")


def test_wer_examples():
    assert wer("nie ma", "nie ma") == 0.0
    assert wer("niema", "nie ma") == 1.0
    assert wer("a b c", "a b") == 0.5
    with pytest.raises(EmptyReferenceError):
        wer("a", " 12 ")


@given(st.lists(st.sampled_from(["ala", "ma", "kota"]), min_size=1, max_size=5),
       st.lists(st.sampled_from([" ", ", ", "! ", " - "]), min_size=5, max_size=5))
def test_wer_ignores_separators(ws, seps):
    plain = " ".join(ws)
    decorated = "".join(w + s for w, s in zip(ws, seps))
    assert wer(decorated, plain) == 0.0
    assert cer(plain, plain) == 0.0


def test_evaluate_identity_and_single_pair():
    pairs = [pair("a", "x", "Ala ma kota."), pair("b", "y", "abc")]
    rep = evaluate(pairs, [p.tgt for p in pairs], system="oracle")
    assert (rep.cer, rep.wer) == (0.0, 0.0)
    rep = evaluate([pair("c", "abd", "abc")], ["abd"])
    assert rep.cer == pytest.approx(1 / 3)
    assert rep.wer == 1.0


def test_evaluate_length_mismatch():
    with pytest.raises(ValueError):
        evaluate([pair("a", "x", "y")], [])


def test_empty_reference_flagged_not_fatal():
    pairs = [pair("a", "x", ""), pair("b", "ab", "ab"), pair("c", "12", "34")]
    rep = evaluate(pairs, ["zzz", "ab", "34"])
    assert rep.empty_references == ["a", "c"]
    assert (rep.cer, rep.wer) == (0.0, 0.0)


@given(st.lists(st.tuples(st.text("ab ", min_size=1, max_size=10),
                          st.text("ab ", max_size=10)), min_size=1, max_size=8))
def test_micro_average_identity(rows):
    pairs = [pair(str(k), h, r) for k, (r, h) in enumerate(rows)]
    rep = evaluate(pairs, [h for _, h in rows])
    kept = [r for r in rep.records if not r.empty_reference]
    chars = sum(r.char_ref_len for r in kept)
    if chars:
        assert rep.cer == pytest.approx(float(Fraction(sum(r.char_edits for r in kept), chars)))
    assert (rep.cer, rep.wer) == corpus_rates(rep.records)


def test_micro_not_macro():
    pairs = [pair("a", "", "ab"), pair("b", "", "abcdefgh")]
    rep = evaluate(pairs, ["ab", "abcdefgx"])
    assert rep.cer == pytest.approx(1 / 10)  # macro would give 1/16


def test_report_json_and_table():
    rep = evaluate([pair("a", "", "abc")], ["abd"], system="identity", variant="pruned-mixed",
                   pruning=True, separation=False)
    data = json.loads(rep.to_json())
    assert data["system"] == "identity" and data["records"][0]["char_edits"] == 1
    assert "records" not in json.loads(rep.to_json(records=False))
    table = format_table([rep]).splitlines()
    assert table[0].split() == ["Method", "Pruning", "Separation", "CER", "WER"]
    assert table[2].split() == ["identity", "Yes", "No", "0.3333", "1.0000"]


def test_predictions_roundtrip_and_misalignment():
    pairs = [pair("a", "", "x"), pair("b", "", "y")]
    lines = ['{"pair_id": "b", "hypothesis": "y"}', "", '{"pair_id": "a", "hypothesis": "x"}']
    assert align_predictions(pairs, read_predictions(lines)) == ["x", "y"]
    with pytest.raises(ValueError, match="1 missing"):
        align_predictions(pairs, {"a": "x"})
    with pytest.raises(ValueError, match="unexpected"):
        align_predictions(pairs, {"a": "x", "b": "y", "c": "z"})
    with pytest.raises(ValueError, match="duplicate"):
        read_predictions([lines[0], lines[0]])
    with pytest.raises(ValueError, match="missing"):
        read_predictions(['{"pair_id": "a"}'])
