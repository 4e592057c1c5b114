"""Diachronic spelling normalization: rules, alignment, datasets, evaluation, search."""

__version__ = "0.1.0"

from .aligner import AlignmentBead, AlignmentResult, ParagraphPair, align, filter_beads, similarity
from .baselines import identity_normalize, memorizer_normalize, train_memorizer
from .metrics import EvalReport, cer, edit_distance, evaluate, wer
from .reverse import expand_query, historical_variants, invert_ruleset
from .rules import (Rule, RuleSet, Token, default_ruleset, lint_ruleset, load_ruleset,
                    normalize_text, normalize_token, parse_ruleset, tokenize)

__all__ = [
    "AlignmentBead", "AlignmentResult", "EvalReport", "ParagraphPair", "Rule", "RuleSet",
    "Token", "align", "cer", "default_ruleset", "edit_distance", "evaluate", "expand_query",
    "filter_beads", "historical_variants", "identity_normalize", "invert_ruleset",
    "lint_ruleset", "load_ruleset", "memorizer_normalize", "normalize_text",
    "normalize_token", "parse_ruleset", "similarity", "tokenize", "train_memorizer", "wer",
]
