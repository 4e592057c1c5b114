"""File formats shared by the pipeline stages: escaped TSV, JSONL, atomic writes."""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .aligner import ParagraphPair

PAIR_COLUMNS = ("pair_id", "novel_id", "score", "src", "tgt")

_ESCAPES = {"\\": "\\\\", "\t": "\\t", "\n": "\\n", "\r": "\\r"}
_UNESCAPES = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}


def escape(text: str) -> str:
    return "".join(_ESCAPES.get(c, c) for c in text)


def unescape(text: str) -> str:
    out = []
    it = iter(text)
    for c in it:
        if c == "\\":
            nxt = next(it, "")
            out.append(_UNESCAPES.get(nxt, "\\" + nxt))
        else:
            out.append(c)
    return "".join(out)


def atomic_write(path, text: str) -> None:
    """Write text to ``path`` via a temporary file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def jsonl(records) -> str:
    return "".join(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n" for r in records)


def read_jsonl(path) -> list:
    with open(path, encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


def format_pairs_tsv(pairs) -> str:
    lines = ["\t".join(PAIR_COLUMNS)]
    for p in pairs:
        lines.append("\t".join([escape(p.pair_id), escape(p.novel_id), repr(float(p.score)),
                                escape(p.src), escape(p.tgt)]))
    return "\n".join(lines) + "\n"


def parse_pairs_tsv(text: str) -> list[ParagraphPair]:
    lines = text.split("\n")  # escaped fields never contain \n, but may hold other breaks
    if not lines or tuple(lines[0].split("\t")) != PAIR_COLUMNS:
        raise ValueError(f"pair TSV must start with header {' '.join(PAIR_COLUMNS)}")
    pairs = []
    for n, line in enumerate(lines[1:], 2):
        if not line:
            continue
        cols = line.split("\t")
        if len(cols) != 5:
            raise ValueError(f"line {n}: expected 5 columns, got {len(cols)}")
        pid, novel, score, src, tgt = cols
        pairs.append(ParagraphPair(unescape(pid), unescape(novel), unescape(src),
                                   unescape(tgt), float(score)))
    return pairs


def read_pairs_tsv(path) -> list[ParagraphPair]:
    with open(path, encoding="utf-8") as f:
        return parse_pairs_tsv(f.read())


def read_paragraph_file(path) -> list[str]:
    """One paragraph per line, with newlines inside paragraphs escaped."""
    with open(path, encoding="utf-8") as f:
        return [unescape(line.rstrip("\n")) for line in f if line.strip()]
