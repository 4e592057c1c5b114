"""Historical spelling variants of contemporary words, for query expansion.

Variants come from the inverted word map and from mechanically inverted
rules flagged ``INVERTIBLE``.  Every candidate is checked against the forward
normalizer, so each emitted variant normalizes back to the query's form.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from . import pattern as pat
from .rules import RuleSet, normalize_text, normalize_word, tokenize

DEFAULT_MAX_VARIANTS = 16


@dataclass(frozen=True)
class InverseRule:
    rule_id: str
    regex: re.Pattern
    templates: tuple[str, ...]  # python-style replacement templates


@dataclass(frozen=True)
class VariantGenerator:
    ruleset: RuleSet
    inverse_map: dict[str, tuple[str, ...]] = field(default_factory=dict)
    inverse_rules: tuple[InverseRule, ...] = ()
    max_variants: int = DEFAULT_MAX_VARIANTS
    diagnostics: tuple[str, ...] = ()

    def __post_init__(self):
        if self.max_variants < 1:
            raise ValueError("max_variants must be positive")


def invert_rule(rule) -> InverseRule:
    """Swap the literal context of a rule with the literal text of its replacement.

    The pattern must be a sequence of literal slots and capture groups, and
    the replacement must reference the groups once each, in order.  A slot
    may match a few alternative strings (``[jy]``, ``-?``); the inverse then
    offers each of them.  Raises ``ValueError`` for other shapes.
    """
    split = pat.split_top_level(rule.pattern)
    if split is None:
        raise ValueError("pattern is not literal context around capture groups")
    slots, groups = split
    parts = pat.parse_replacement(rule.replacement)
    refs = [p for p in parts if isinstance(p, int)]
    if refs != list(range(1, len(groups) + 1)):
        raise ValueError("replacement must use each group once, in order")

    # literal replacement text between consecutive group references
    repl_slots = [""]
    for p in parts:
        if isinstance(p, int):
            repl_slots.append("")
        else:
            repl_slots[-1] += p

    inv_pattern = []
    choices = []
    for k, slot in enumerate(slots):
        options = pat.expand_literal(slot.body)
        if options is None:
            raise ValueError(f"slot {k} is not a finite literal")
        inv_pattern.append(slot.lead_text + re.escape(repl_slots[k]) + slot.trail_text)
        if k < len(groups):
            inv_pattern.append(groups[k])
        choices.append(options)

    if pat.min_width("".join(inv_pattern)) == 0:
        raise ValueError("inverse pattern would match the empty string")

    templates = []
    for combo in _product(choices):
        out: list[str | int] = []
        for k, literal in enumerate(combo):
            if literal:
                out.append(literal)
            if k < len(groups):
                out.append(k + 1)
        templates.append(pat.to_python_template(out))
    return InverseRule(rule.id, re.compile("".join(inv_pattern)), tuple(dict.fromkeys(templates)))


def _product(choices):
    combos = [[]]
    for opts in choices:
        combos = [c + [o] for c in combos for o in opts]
    return combos


def invert_ruleset(ruleset: RuleSet, max_variants: int = DEFAULT_MAX_VARIANTS) -> VariantGenerator:
    inverse_map: dict[str, list[str]] = {}
    for hist, contemporary in ruleset.word_map.items():
        inverse_map.setdefault(contemporary, []).append(hist)
    inverse_rules = []
    diagnostics = []
    for rule in ruleset.rules:
        if not rule.invertible:
            continue
        try:
            inverse_rules.append(invert_rule(rule))
        except ValueError as exc:
            diagnostics.append(f"{rule.id}: not invertible: {exc}")
    return VariantGenerator(
        ruleset,
        {k: tuple(sorted(set(v))) for k, v in inverse_map.items()},
        tuple(inverse_rules),
        max_variants,
        tuple(diagnostics),
    )


def _map_hits(text, inverse_map):
    """Inverse-map entries for ``text``, retrying initial-capital text in lowercase."""
    if text in inverse_map:
        return set(inverse_map[text])
    low = text.lower()
    if text[:1].isupper() and text[1:] == low[1:] and low in inverse_map:
        return {h[:1].upper() + h[1:] for h in inverse_map[low]}
    return set()


def _candidates(word, gen):
    out = _map_hits(word, gen.inverse_map)
    for inv in gen.inverse_rules:
        for pos in range(len(word) + 1):
            m = inv.regex.match(word, pos)
            if m is None or m.end() == m.start():
                continue
            for template in inv.templates:
                out.add(word[:m.start()] + m.expand(template) + word[m.end():])
    return out


def historical_variants(word: str, gen: VariantGenerator) -> list[str]:
    """Sorted historical spellings of ``word`` that normalize to what ``word`` does.

    The word itself is always included; at most ``gen.max_variants`` are returned.
    """
    target = normalize_word(word, gen.ruleset)
    sound = sorted(c for c in _candidates(word, gen) - {word}
                   if normalize_word(c, gen.ruleset) == target)
    return sorted([word] + sound[:gen.max_variants - 1])


def phrase_variants(phrase: str, gen: VariantGenerator) -> list[str]:
    """Variants of a multi-word phrase from the inverted word map (``na pewno`` -> ``napewno``)."""
    target = normalize_text(phrase, gen.ruleset)[0]
    sound = sorted(c for c in _map_hits(phrase, gen.inverse_map) - {phrase}
                   if normalize_text(c, gen.ruleset)[0] == target)
    return sorted([phrase] + sound[:gen.max_variants - 1])


def _disjunction(variants):
    return variants[0] if len(variants) == 1 else "(" + " OR ".join(variants) + ")"


def segments(text: str, gen: VariantGenerator):
    """Yield ``(surface, variants)`` for each piece of ``text``.

    Separators come with ``variants=None``.  Space-separated words forming a
    multi-word word-map target (``na pewno``) are kept together.
    """
    tokens = tokenize(text)
    phrase_len = max((k.count(" ") + 1 for k in gen.inverse_map if " " in k), default=1)
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if not tok.is_word:
            yield tok.text, None
            i += 1
            continue
        for n in range(phrase_len, 1, -1):
            end = i + 2 * n - 1
            window = tokens[i:end]
            if len(window) < 2 * n - 1 or any(t.text != " " for t in window[1::2]):
                continue
            phrase = "".join(t.text for t in window)
            variants = phrase_variants(phrase, gen)
            if len(variants) > 1:
                yield phrase, variants
                i = end
                break
        else:
            yield tok.text, historical_variants(tok.text, gen)
            i += 1


def expand_query(query: str, gen: VariantGenerator) -> tuple[str, list[dict]]:
    """Replace each word by an OR-group of its variants; separators are kept.

    Returns the boolean expression and a structured form, one
    ``{"term", "variants"}`` object per word (or multi-word map entry).
    """
    out, terms = [], []
    for surface, variants in segments(query, gen):
        if variants is None:
            out.append(surface)
        else:
            out.append(_disjunction(variants))
            terms.append({"term": surface, "variants": variants})
    return "".join(out), terms


def variants_json(word: str, gen: VariantGenerator) -> str:
    return json.dumps({"term": word, "variants": historical_variants(word, gen)}, ensure_ascii=False)
