"""Character and word error rates, and corpus-level evaluation reports."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Sequence

from .rules import words


class EmptyReferenceError(ValueError):
    pass


def edit_distance(a: Sequence, b: Sequence) -> int:
    """Levenshtein distance with unit costs for insertion, deletion and substitution.

    Uses the bit-parallel formulation (one column of the DP table per
    machine word, here a Python integer), after trimming shared affixes.
    Elements must be hashable.
    """
    lo = 0
    while lo < len(a) and lo < len(b) and a[lo] == b[lo]:
        lo += 1
    hi_a, hi_b = len(a), len(b)
    while hi_a > lo and hi_b > lo and a[hi_a - 1] == b[hi_b - 1]:
        hi_a, hi_b = hi_a - 1, hi_b - 1
    a, b = a[lo:hi_a], b[lo:hi_b]
    if len(a) < len(b):
        a, b = b, a
    m = len(b)
    if m == 0:
        return len(a)

    peq: dict = {}
    for i, x in enumerate(b):
        peq[x] = peq.get(x, 0) | (1 << i)
    full = (1 << m) - 1
    top = 1 << (m - 1)
    pv, mv, score = full, 0, m
    for x in a:
        eq = peq.get(x, 0)
        xv = eq | mv
        xh = (((eq & pv) + pv) ^ pv) | eq
        ph = (mv | ~(xh | pv)) & full
        mh = pv & xh
        if ph & top:
            score += 1
        elif mh & top:
            score -= 1
        ph = ((ph << 1) | 1) & full
        mh = (mh << 1) & full
        pv = (mh | ~(xv | ph)) & full
        mv = ph & xv
    return score


def edit_script(a: Sequence, b: Sequence) -> list[tuple[str, int | None, int | None]]:
    """One minimal edit script as ``(op, i, j)`` triples.

    ``op`` is one of ``match``, ``sub``, ``del`` (``j`` is None) or ``ins``
    (``i`` is None).  Ties prefer the diagonal, then deletion.
    """
    n, m = len(a), len(b)
    d = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        d[i][0] = i
    for j in range(m + 1):
        d[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            d[i][j] = min(d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] != b[j - 1]))
    ops = []
    i, j = n, m
    while i or j:
        if i and j and d[i][j] == d[i - 1][j - 1] + (a[i - 1] != b[j - 1]):
            ops.append(("match" if a[i - 1] == b[j - 1] else "sub", i - 1, j - 1))
            i, j = i - 1, j - 1
        elif i and d[i][j] == d[i - 1][j] + 1:
            ops.append(("del", i - 1, None))
            i -= 1
        else:
            ops.append(("ins", None, j - 1))
            j -= 1
    ops.reverse()
    return ops


def cer(hypothesis: str, reference: str) -> float:
    if not reference:
        raise EmptyReferenceError("CER is undefined for an empty reference")
    return edit_distance(hypothesis, reference) / len(reference)


def wer(hypothesis: str, reference: str) -> float:
    ref = words(reference)
    if not ref:
        raise EmptyReferenceError("WER is undefined for a reference without words")
    return edit_distance(words(hypothesis), ref) / len(ref)


@dataclass
class PairRecord:
    pair_id: str
    char_edits: int
    char_ref_len: int
    word_edits: int
    word_ref_len: int
    empty_reference: bool = False


@dataclass
class EvalReport:
    system: str
    version: str
    variant: str
    cer: float
    wer: float
    records: list[PairRecord] = field(default_factory=list)
    pruning: bool | None = None
    separation: bool | None = None

    @property
    def empty_references(self):
        return [r.pair_id for r in self.records if r.empty_reference]

    def to_dict(self):
        return asdict(self)

    def to_json(self, records=True):
        d = self.to_dict()
        if not records:
            d.pop("records")
        return json.dumps(d, ensure_ascii=False, indent=2, sort_keys=True)


def evaluate(pairs, hypotheses: Sequence[str], system="system", version="", variant="",
             pruning=None, separation=None) -> EvalReport:
    """Score hypotheses against the ``tgt`` side of aligned pairs (micro-averaged).

    Pairs whose reference is empty are flagged and contribute nothing.
    """
    if len(pairs) != len(hypotheses):
        raise ValueError(f"{len(hypotheses)} hypotheses for {len(pairs)} pairs")
    records = []
    for pair, hyp in zip(pairs, hypotheses):
        ref = pair.tgt
        ref_words = words(ref)
        if not ref or not ref_words:
            records.append(PairRecord(pair.pair_id, 0, 0, 0, 0, empty_reference=True))
            continue
        records.append(PairRecord(
            pair.pair_id,
            edit_distance(hyp, ref), len(ref),
            edit_distance(words(hyp), ref_words), len(ref_words),
        ))
    return EvalReport(system, version, variant, *corpus_rates(records), records,
                      pruning=pruning, separation=separation)


def corpus_rates(records) -> tuple[float, float]:
    chars = sum(r.char_ref_len for r in records)
    nwords = sum(r.word_ref_len for r in records)
    c = sum(r.char_edits for r in records) / chars if chars else 0.0
    w = sum(r.word_edits for r in records) / nwords if nwords else 0.0
    return c, w


def _yes_no(flag):
    return "-" if flag is None else ("Yes" if flag else "No")


def format_table(reports: Sequence[EvalReport]) -> str:
    """Plain-text results table: one row per method, pruning and separation."""
    header = ("Method", "Pruning", "Separation", "CER", "WER")
    rows = [(r.system, _yes_no(r.pruning), _yes_no(r.separation), f"{r.cer:.4f}", f"{r.wer:.4f}")
            for r in reports]
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    lines = []
    for k, row in enumerate([header] + rows):
        cells = [str(c).ljust(w) if i < 3 else str(c).rjust(w)
                 for i, (c, w) in enumerate(zip(row, widths))]
        lines.append("  ".join(cells).rstrip())
        if k == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def read_predictions(lines) -> dict[str, str]:
    """Parse prediction JSONL (``{"pair_id": ..., "hypothesis": ...}`` per line)."""
    out = {}
    for n, line in enumerate(lines, 1):
        if not line.strip():
            continue
        obj = json.loads(line)
        try:
            pid, hyp = obj["pair_id"], obj["hypothesis"]
        except KeyError as exc:
            raise ValueError(f"prediction line {n}: missing {exc}") from None
        if pid in out:
            raise ValueError(f"prediction line {n}: duplicate pair_id {pid!r}")
        out[pid] = hyp
    return out


def align_predictions(pairs, predictions: dict[str, str]) -> list[str]:
    ids = {p.pair_id for p in pairs}
    missing = [p.pair_id for p in pairs if p.pair_id not in predictions]
    extra = sorted(set(predictions) - ids)
    if missing or extra:
        raise ValueError(f"predictions misaligned with test set: "
                         f"{len(missing)} missing (e.g. {missing[:3]}), "
                         f"{len(extra)} unexpected (e.g. {extra[:3]})")
    return [predictions[p.pair_id] for p in pairs]
