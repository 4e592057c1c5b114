"""Reference systems: copy-through and a token memorization normalizer."""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .metrics import edit_distance, edit_script
from .rules import tokenize, words


def identity_normalize(text: str) -> str:
    return text


@dataclass(frozen=True)
class MemorizationTable:
    """Majority replacement per source token, with how often it was observed."""

    entries: dict[str, tuple[str, int]] = field(default_factory=dict)

    def __len__(self):
        return len(self.entries)

    def __contains__(self, token):
        return token in self.entries

    def get(self, token, default=None):
        hit = self.entries.get(token)
        return hit[0] if hit else default

    def to_tsv(self) -> str:
        return "".join(f"{k}\t{v}\t{n}\n" for k, (v, n) in sorted(self.entries.items()))

    @classmethod
    def from_tsv(cls, text: str) -> "MemorizationTable":
        entries = {}
        for n, line in enumerate(text.splitlines(), 1):
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise ValueError(f"line {n}: expected token, replacement, count")
            entries[cols[0]] = (cols[1], int(cols[2]))
        return cls(entries)


def token_alignments(src_words: list[str], tgt_words: list[str]):
    """Yield ``(source token, target string)`` pairs from a word-level edit script.

    Matches and substitutions give one-to-one pairs.  A substitution next to
    an insertion may instead pair the source token with the inserted word, or
    with both words joined (a split of one token into two); whichever target
    is closest to the source wins.  Other insertions and deletions are ignored.
    """
    ops = edit_script(src_words, tgt_words)
    used = set()
    for k, (op, i, j) in enumerate(ops):
        if op not in ("match", "sub"):
            continue
        src = src_words[i]
        if op == "match":
            yield src, tgt_words[j]
            continue
        options = [(edit_distance(src, tgt_words[j]), tgt_words[j], None)]
        for nb in (k - 1, k + 1):
            if 0 <= nb < len(ops) and ops[nb][0] == "ins" and nb not in used:
                jj = ops[nb][2]
                joined = f"{tgt_words[min(j, jj)]} {tgt_words[max(j, jj)]}"
                options.append((edit_distance(src, joined.replace(" ", "")), joined, nb))
                options.append((edit_distance(src, tgt_words[jj]), tgt_words[jj], nb))
        _, target, nb = min(options, key=lambda o: (o[0], o[2] is not None, o[1]))
        if nb is not None:
            used.add(nb)
        yield src, target


def train_memorizer(train_pairs) -> MemorizationTable:
    counts: dict[str, Counter] = defaultdict(Counter)
    for pair in train_pairs:
        for src, tgt in token_alignments(words(pair.src), words(pair.tgt)):
            counts[src][tgt] += 1
    entries = {}
    for src, c in counts.items():
        target, n = min(c.items(), key=lambda kv: (-kv[1], kv[0]))
        entries[src] = (target, n)
    return MemorizationTable(entries)


def memorizer_normalize(text: str, table: MemorizationTable) -> str:
    return "".join(table.get(t.text, t.text) if t.is_word else t.text for t in tokenize(text))
