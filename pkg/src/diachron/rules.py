"""Deterministic rule-based normalizer: ordered regex rewrites, a word map and exceptions.

A :class:`RuleSet` is loaded from a line-oriented, TAB-separated text file::

    # comment (attached to the next RULE)
    HEADER  <name>  <version>
    RULE    <id>  <pattern>  <replacement>  [INVERTIBLE]
    MAP     <token>  <replacement>
    EXCEPT  <token>

Replacements use ``$n`` group references.  Each word token goes through the
exception list, then the word map, then every rule once in file order.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, NamedTuple

from . import pattern as pat

WORD_RE = re.compile(r"[^\W\d_]+(?:-[^\W\d_]+)*")

WORD_MAP = "word_map"
EXCEPTION_SKIP = "exception-skip"


class RulesetError(ValueError):
    def __init__(self, message, line=None, rule_id=None):
        self.line = line
        self.rule_id = rule_id
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class Token:
    text: str
    start: int
    end: int
    kind: str  # "word" or "separator"

    @property
    def span(self):
        return (self.start, self.end)

    @property
    def is_word(self):
        return self.kind == "word"


def tokenize(text: str) -> list[Token]:
    """Split text into alternating word and separator tokens.

    Words are runs of letters, with hyphens allowed only between letters.
    Concatenating the token texts gives back ``text``.
    """
    tokens = []
    pos = 0
    for m in WORD_RE.finditer(text):
        if m.start() > pos:
            tokens.append(Token(text[pos:m.start()], pos, m.start(), "separator"))
        tokens.append(Token(m.group(), m.start(), m.end(), "word"))
        pos = m.end()
    if pos < len(text):
        tokens.append(Token(text[pos:], pos, len(text), "separator"))
    return tokens


def words(text: str) -> list[str]:
    return [t.text for t in tokenize(text) if t.is_word]


@dataclass(frozen=True)
class Rule:
    id: str
    pattern: str
    replacement: str
    invertible: bool = False
    comment: str | None = None
    regex: re.Pattern = field(init=False, repr=False, compare=False)
    template: str = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        try:
            pat.parse(self.pattern)
            regex = re.compile(self.pattern)
        except (re.error, pat.PatternSyntaxError) as exc:
            raise RulesetError(f"rule {self.id}: bad pattern {self.pattern!r}: {exc}",
                               rule_id=self.id) from None
        object.__setattr__(self, "regex", regex)
        parts = pat.parse_replacement(self.replacement)
        object.__setattr__(self, "template", pat.to_python_template(parts))

    @property
    def group_refs(self) -> list[int]:
        return [p for p in pat.parse_replacement(self.replacement) if isinstance(p, int)]

    @property
    def arity_ok(self) -> bool:
        return all(0 <= n <= self.regex.groups for n in self.group_refs)

    def apply(self, word: str) -> str:
        """Rewrite all non-overlapping matches, left to right."""
        return self.regex.sub(self.template, word)


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[Rule, ...] = ()
    word_map: dict[str, str] = field(default_factory=dict)
    exceptions: frozenset[str] = frozenset()
    name: str = "unnamed"
    version: str = "0"

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "exceptions", frozenset(self.exceptions))
        seen = set()
        for rule in self.rules:
            if rule.id in seen:
                raise RulesetError(f"duplicate rule id {rule.id!r}", rule_id=rule.id)
            seen.add(rule.id)
        clash = self.exceptions & self.word_map.keys()
        if clash:
            raise RulesetError(f"tokens both mapped and excepted: {sorted(clash)}")

    @property
    def label(self):
        return f"{self.name}@{self.version}"

    def rule(self, rule_id):
        for r in self.rules:
            if r.id == rule_id:
                return r
        raise KeyError(rule_id)


def _capitalized(token):
    return token[:1].isupper() and token[1:] == token[1:].lower()


def _recapitalize(text):
    return text[:1].upper() + text[1:]


def lookup(token: str, table) -> tuple[bool, str | None]:
    """Find ``token`` in a set or mapping, retrying initial-capital tokens in lowercase.

    Returns ``(hit, value)``; for mappings the value is re-capitalized when the
    lowercase retry was used.
    """
    if token in table:
        return True, table[token] if isinstance(table, dict) else None
    if _capitalized(token):
        low = token.lower()
        if low in table:
            if isinstance(table, dict):
                return True, _recapitalize(table[low])
            return True, None
    return False, None


def parse_ruleset(source: str, strict: bool = True) -> RuleSet:
    """Parse ruleset file text.

    With ``strict`` (the default) a replacement referencing a missing group is
    an error; :func:`lint_ruleset` callers pass ``strict=False`` to get it
    reported as a diagnostic instead.
    """
    rules: list[Rule] = []
    word_map: dict[str, str] = {}
    exceptions: set[str] = set()
    name, version = "unnamed", "0"
    ids: set[str] = set()
    comment: list[str] = []

    for lineno, raw in enumerate(source.splitlines(), 1):
        line = raw.rstrip("\r")
        if not line.strip():
            comment = []
            continue
        if line.lstrip().startswith("#"):
            comment.append(line.lstrip()[1:].strip())
            continue
        fields = line.split("\t")
        kind = fields[0]
        if kind == "HEADER":
            if len(fields) != 3:
                raise RulesetError("HEADER needs name and version", lineno)
            name, version = fields[1], fields[2]
        elif kind == "RULE":
            if len(fields) not in (4, 5) or (len(fields) == 5 and fields[4] != "INVERTIBLE"):
                raise RulesetError("expected RULE<TAB>id<TAB>pattern<TAB>replacement[<TAB>INVERTIBLE]",
                                   lineno)
            rule_id = fields[1]
            if not rule_id:
                raise RulesetError("empty rule id", lineno)
            if rule_id in ids:
                raise RulesetError(f"duplicate rule id {rule_id!r}", lineno, rule_id)
            try:
                rule = Rule(rule_id, fields[2], fields[3], len(fields) == 5,
                            " ".join(comment) or None)
            except RulesetError as exc:
                raise RulesetError(str(exc), lineno, rule_id) from None
            if strict and not rule.arity_ok:
                raise RulesetError(f"rule {rule_id}: replacement references a missing group",
                                   lineno, rule_id)
            ids.add(rule_id)
            rules.append(rule)
        elif kind == "MAP":
            if len(fields) != 3:
                raise RulesetError("expected MAP<TAB>token<TAB>replacement", lineno)
            key = _check_token(fields[1], lineno)
            if key in word_map:
                raise RulesetError(f"duplicate MAP key {key!r}", lineno)
            if key in exceptions:
                raise RulesetError(f"{key!r} is both MAP and EXCEPT", lineno)
            word_map[key] = fields[2]
        elif kind == "EXCEPT":
            if len(fields) != 2:
                raise RulesetError("expected EXCEPT<TAB>token", lineno)
            key = _check_token(fields[1], lineno)
            if key in word_map:
                raise RulesetError(f"{key!r} is both MAP and EXCEPT", lineno)
            exceptions.add(key)
        else:
            raise RulesetError(f"unknown directive {kind!r}", lineno)
        comment = []

    return RuleSet(tuple(rules), word_map, frozenset(exceptions), name, version)


def _check_token(key, lineno):
    if not WORD_RE.fullmatch(key):
        raise RulesetError(f"{key!r} is not a single word token", lineno)
    return key


def format_ruleset(ruleset: RuleSet) -> str:
    lines = [f"HEADER\t{ruleset.name}\t{ruleset.version}"]
    for r in ruleset.rules:
        if r.comment:
            lines.append(f"# {r.comment}")
        row = ["RULE", r.id, r.pattern, r.replacement] + (["INVERTIBLE"] if r.invertible else [])
        lines.append("\t".join(row))
    lines += [f"MAP\t{k}\t{v}" for k, v in ruleset.word_map.items()]
    lines += [f"EXCEPT\t{k}" for k in sorted(ruleset.exceptions)]
    return "\n".join(lines) + "\n"


def load_ruleset(path) -> RuleSet:
    with open(path, encoding="utf-8") as f:
        return parse_ruleset(f.read())


def default_ruleset_text() -> str:
    return resources.files("diachron").joinpath("data/default.rules").read_text("utf-8")


def default_ruleset() -> RuleSet:
    return parse_ruleset(default_ruleset_text())


# -- normalization ---------------------------------------------------------

class Step(NamedTuple):
    source: str  # rule id, "word_map" or "exception-skip"
    before: str
    after: str


@dataclass
class TokenTrace:
    token: str
    span: tuple[int, int]
    output: str
    steps: list[Step] = field(default_factory=list)

    def to_dict(self):
        return {"token": self.token, "span": list(self.span), "output": self.output,
                "steps": [list(s) for s in self.steps]}


@dataclass
class NormalizationTrace:
    ruleset: str
    tokens: list[TokenTrace] = field(default_factory=list)

    def to_jsonl(self) -> str:
        return "".join(
            json.dumps({"ruleset": self.ruleset, **t.to_dict()}, ensure_ascii=False) + "\n"
            for t in self.tokens
        )


def normalize_token(token: Token | str, ruleset: RuleSet) -> tuple[str, TokenTrace]:
    if isinstance(token, Token):
        if not token.is_word:
            raise ValueError("normalize_token expects a word token")
        text, span = token.text, token.span
    else:
        text, span = token, (0, len(token))

    trace = TokenTrace(text, span, text)
    hit, _ = lookup(text, ruleset.exceptions)
    if hit:
        trace.steps.append(Step(EXCEPTION_SKIP, text, text))
        return text, trace
    hit, mapped = lookup(text, ruleset.word_map)
    if hit:
        trace.steps.append(Step(WORD_MAP, text, mapped))
        trace.output = mapped
        return mapped, trace

    current = text
    for rule in ruleset.rules:
        after = rule.apply(current)
        if after != current:
            trace.steps.append(Step(rule.id, current, after))
            current = after
    trace.output = current
    return current, trace


def normalize_word(word: str, ruleset: RuleSet) -> str:
    return normalize_token(word, ruleset)[0]


def normalize_text(text: str, ruleset: RuleSet) -> tuple[str, NormalizationTrace]:
    trace = NormalizationTrace(ruleset.label)
    out = []
    for tok in tokenize(text):
        if tok.is_word:
            norm, entry = normalize_token(tok, ruleset)
            trace.tokens.append(entry)
            out.append(norm)
        else:
            out.append(tok.text)
    return "".join(out), trace


def replay(entry: TokenTrace, ruleset: RuleSet) -> str:
    """Re-run the recorded steps of one token and return the resulting text.

    Raises ``ValueError`` if a step does not reproduce its recorded output.
    """
    current = entry.token
    for step in entry.steps:
        if step.before != current:
            raise ValueError(f"step {step.source} starts from {step.before!r}, not {current!r}")
        if step.source == EXCEPTION_SKIP:
            after = current
        elif step.source == WORD_MAP:
            hit, after = lookup(current, ruleset.word_map)
            if not hit:
                raise ValueError(f"{current!r} not in word map")
        else:
            after = ruleset.rule(step.source).apply(current)
        if after != step.after:
            raise ValueError(f"step {step.source} gives {after!r}, trace says {step.after!r}")
        current = after
    return current


# -- lint -------------------------------------------------------------------

@dataclass(frozen=True)
class Diagnostic:
    code: str  # empty-match, shadowed, arity
    rule_id: str
    message: str

    def __str__(self):
        return f"{self.rule_id}: {self.code}: {self.message}"


def lint_ruleset(ruleset: RuleSet, probe: Iterable[str] | None = None) -> list[Diagnostic]:
    """Report risky rules.

    Checks for patterns that can match the empty string, replacements that
    reference groups the pattern lacks, and (when a probe word list is given)
    rules that never fire because an earlier rule rewrites every probe word
    they would match.
    """
    diags = []
    for rule in ruleset.rules:
        if pat.min_width(rule.pattern) == 0:
            diags.append(Diagnostic("empty-match", rule.id,
                                    f"pattern {rule.pattern!r} can match the empty string"))
        if not rule.arity_ok:
            diags.append(Diagnostic(
                "arity", rule.id,
                f"replacement uses group {max(rule.group_refs)} but pattern has "
                f"{rule.regex.groups}"))

    if probe is not None:
        probe_words = sorted({w for text in probe for w in words(text)})
        rules = list(ruleset.rules)
        for j, later in enumerate(rules):
            hits = [w for w in probe_words if later.regex.search(w)]
            if not hits:
                continue
            for earlier in rules[:j]:
                if all(later.regex.search(earlier.apply(w)) is None for w in hits):
                    diags.append(Diagnostic(
                        "shadowed", later.id,
                        f"rule {earlier.id} rewrites all {len(hits)} probe words it matches"))
                    break
    return diags
