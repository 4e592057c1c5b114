"""Structural analysis of rewrite-rule patterns.

Rule patterns are ordinary regular expressions restricted to a small dialect
(classes, alternation, quantifiers, groups, ``\\A``/``\\Z``/``\\b`` and
lookaround).  Matching is delegated to :mod:`re`; this module only parses the
pattern text far enough to answer questions ``re`` cannot: the minimum match
width, the top-level split into capture groups and literal context, and the
finite set of strings a literal slot can match.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

ANCHORS = {"A", "Z", "b", "B"}
CLASS_ESCAPES = set("dDwWsS")
SIMPLE_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "f": "\f", "v": "\v"}
MAX_CLASS_EXPANSION = 64


class PatternSyntaxError(ValueError):
    pass


@dataclass
class Node:
    kind: str  # lit, class, any, anchor, group, look, repeat
    start: int
    end: int
    text: str = ""
    chars: tuple[str, ...] | None = None
    index: int | None = None
    alternatives: list[list["Node"]] = field(default_factory=list)
    child: "Node | None" = None
    min: int = 0
    max: int | None = None


class _Parser:
    def __init__(self, pattern: str):
        self.p = pattern
        self.i = 0
        self.groups = 0

    def error(self, msg):
        raise PatternSyntaxError(f"{msg} at position {self.i}")

    def peek(self, k=0):
        j = self.i + k
        return self.p[j] if j < len(self.p) else ""

    def parse(self):
        alts = self.alternation()
        if self.i != len(self.p):
            self.error("unbalanced parenthesis")
        return alts

    def alternation(self):
        alts = [self.sequence()]
        while self.peek() == "|":
            self.i += 1
            alts.append(self.sequence())
        return alts

    def sequence(self):
        nodes = []
        while self.i < len(self.p) and self.peek() not in "|)":
            atom = self.atom()
            nodes.append(self.quantified(atom))
        return nodes

    def quantified(self, atom):
        c = self.peek()
        if c == "?":
            lo, hi = 0, 1
            self.i += 1
        elif c == "*":
            lo, hi = 0, None
            self.i += 1
        elif c == "+":
            lo, hi = 1, None
            self.i += 1
        elif c == "{":
            m = re.compile(r"\{(\d*)(,?)(\d*)\}").match(self.p, self.i)
            if not m or not (m.group(1) or m.group(3)):
                return atom  # a literal brace, as in re
            lo = int(m.group(1) or 0)
            hi = (int(m.group(3)) if m.group(3) else None) if m.group(2) else lo
            self.i = m.end()
        else:
            return atom
        if atom.kind in ("anchor", "look"):
            self.error("nothing to repeat")
        if self.peek() in ("?", "+"):
            self.i += 1
        return Node("repeat", atom.start, self.i, child=atom, min=lo, max=hi)

    def atom(self):
        start = self.i
        c = self.peek()
        if c == "(":
            return self.group()
        if c == "[":
            return self.char_class()
        if c == "\\":
            nxt = self.peek(1)
            if not nxt:
                self.error("trailing backslash")
            self.i += 2
            if nxt in ANCHORS:
                return Node("anchor", start, self.i, text=nxt)
            if nxt in CLASS_ESCAPES:
                return Node("class", start, self.i, chars=None)
            if nxt.isdigit():
                self.error("backreferences are not supported")
            return Node("lit", start, self.i, text=SIMPLE_ESCAPES.get(nxt, nxt))
        if c == ".":
            self.i += 1
            return Node("any", start, self.i)
        if c in "^$":
            self.i += 1
            return Node("anchor", start, self.i, text="A" if c == "^" else "Z")
        if c in "*+?":
            self.error("nothing to repeat")
        self.i += 1
        return Node("lit", start, self.i, text=c)

    def group(self):
        start = self.i
        self.i += 1
        kind, index = "group", None
        if self.peek() == "?":
            head = self.p[self.i:self.i + 3]
            if head.startswith("?:"):
                self.i += 2
            elif head.startswith("?=") or head.startswith("?!"):
                kind = "look"
                self.i += 2
            elif head in ("?<=", "?<!"):
                kind = "look"
                self.i += 3
            elif head.startswith("?P<") or (head.startswith("?<") and head[2:3].isalpha()):
                end = self.p.find(">", self.i)
                if end < 0:
                    self.error("unterminated group name")
                self.i = end + 1
                self.groups += 1
                index = self.groups
            else:
                self.error("unsupported group syntax")
        else:
            self.groups += 1
            index = self.groups
        alts = self.alternation()
        if self.peek() != ")":
            self.error("missing )")
        self.i += 1
        text = self.p[start:self.i]
        return Node(kind, start, self.i, text=text, index=index, alternatives=alts)

    def char_class(self):
        start = self.i
        self.i += 1
        negated = self.peek() == "^"
        if negated:
            self.i += 1
        items: list[str] | None = []
        first = True
        while True:
            c = self.peek()
            if not c:
                self.error("unterminated character class")
            if c == "]" and not first:
                self.i += 1
                break
            first = False
            if c == "\\":
                nxt = self.peek(1)
                self.i += 2
                if nxt in CLASS_ESCAPES or nxt in ANCHORS:
                    items = None
                    continue
                ch = SIMPLE_ESCAPES.get(nxt, nxt)
            else:
                ch = c
                self.i += 1
            if self.peek() == "-" and self.peek(1) not in ("]", ""):
                self.i += 1
                hi = self.peek()
                if hi == "\\":
                    hi = self.peek(1)
                    self.i += 1
                self.i += 1
                if ord(hi) < ord(ch):
                    self.error("bad character range")
                if items is not None:
                    if ord(hi) - ord(ch) >= MAX_CLASS_EXPANSION:
                        items = None
                    else:
                        items.extend(chr(o) for o in range(ord(ch), ord(hi) + 1))
            elif items is not None:
                items.append(ch)
        if negated or items is None:
            chars = None
        else:
            chars = tuple(dict.fromkeys(items))
        return Node("class", start, self.i, text=self.p[start:self.i], chars=chars)


def parse(pattern: str) -> list[list[Node]]:
    """Parse a pattern into a list of alternative node sequences."""
    return _Parser(pattern).parse()


def _seq_min(seq):
    return sum(_node_min(n) for n in seq)


def _node_min(node):
    if node.kind in ("lit", "class", "any"):
        return 1
    if node.kind in ("anchor", "look"):
        return 0
    if node.kind == "group":
        return min(_seq_min(s) for s in node.alternatives)
    if node.kind == "repeat":
        return node.min * _node_min(node.child)
    raise AssertionError(node.kind)


def min_width(pattern: str) -> int:
    """Length of the shortest string the pattern can consume."""
    return min(_seq_min(s) for s in parse(pattern))


def _expand(node, limit):
    """Finite set of strings a context-free literal node matches, or None."""
    if node.kind == "lit":
        return [node.text]
    if node.kind == "class":
        return list(node.chars) if node.chars else None
    if node.kind == "repeat":
        if node.max is None or node.max > 2:
            return None
        inner = _expand(node.child, limit)
        if inner is None:
            return None
        out = []
        for n in range(node.min, node.max + 1):
            out.extend("".join(p) for p in itertools.product(inner, repeat=n))
        return out if len(out) <= limit else None
    return None


def expand_literal(nodes: list[Node], limit: int = 16) -> list[str] | None:
    """All strings matched by a run of literal nodes, in pattern order."""
    options = [""]
    for node in nodes:
        sub = _expand(node, limit)
        if sub is None:
            return None
        options = [a + b for a in options for b in sub]
        if len(options) > limit:
            return None
    return list(dict.fromkeys(options))


@dataclass
class Slot:
    """Literal context between two top-level capture groups."""

    lead: list[Node]
    body: list[Node]
    trail: list[Node]

    @property
    def lead_text(self):
        return "".join(n.text if n.kind == "look" else "\\" + n.text for n in self.lead)

    @property
    def trail_text(self):
        return "".join(n.text if n.kind == "look" else "\\" + n.text for n in self.trail)


def split_top_level(pattern: str):
    """Split a pattern into alternating slots and capture-group source texts.

    Returns ``(slots, groups)`` with ``len(slots) == len(groups) + 1``, or
    ``None`` when the top level is not a plain sequence of literal context and
    capture groups.  Zero-width assertions may appear only at slot edges.
    """
    alts = parse(pattern)
    if len(alts) != 1:
        return None
    slots: list[list[Node]] = [[]]
    groups: list[str] = []
    for node in alts[0]:
        if node.kind == "group" and node.index is not None:
            groups.append(node.text)
            slots.append([])
        else:
            slots[-1].append(node)
    out = []
    for nodes in slots:
        lead, trail = [], []
        while nodes and (nodes[0].kind == "anchor" or _is_lookbehind(nodes[0])):
            lead.append(nodes.pop(0))
        while nodes and (nodes[-1].kind == "anchor" or _is_lookahead(nodes[-1])):
            trail.insert(0, nodes.pop())
        if any(n.kind in ("anchor", "look", "group", "any") for n in nodes):
            return None
        out.append(Slot(lead, nodes, trail))
    return out, groups


def _is_lookbehind(node):
    return node.kind == "look" and node.text.startswith("(?<")


def _is_lookahead(node):
    return node.kind == "look" and not node.text.startswith("(?<")


REF = re.compile(r"\$(\d+)|\\(.)", re.S)


def parse_replacement(template: str) -> list[str | int]:
    """Split a ``$n`` replacement template into literal strings and group numbers."""
    parts: list[str | int] = []
    pos = 0
    buf = ""
    for m in REF.finditer(template):
        buf += template[pos:m.start()]
        if m.group(1) is not None:
            if buf:
                parts.append(buf)
                buf = ""
            parts.append(int(m.group(1)))
        else:
            buf += m.group(2)
        pos = m.end()
    buf += template[pos:]
    if buf:
        parts.append(buf)
    return parts


def to_python_template(parts: list[str | int]) -> str:
    return "".join(
        f"\\g<{p}>" if isinstance(p, int) else p.replace("\\", "\\\\") for p in parts
    )


def to_dollar_template(parts: list[str | int]) -> str:
    return "".join(
        f"${p}" if isinstance(p, int) else p.replace("\\", "\\\\").replace("$", "\\$")
        for p in parts
    )
