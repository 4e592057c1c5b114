"""
Normalizing historical spelling
===============================

The shipped ruleset rewrites pre-reform Polish spellings word by word.
"""

from diachron import default_ruleset, normalize_text

ruleset = default_ruleset()
print(ruleset.label, "with", len(ruleset.rules), "rules")

# Rules apply once each, in file order, to every word token.
text = "Jenerał podjął decyzyę: niema odwrotu, teorya musi ustąpić praktyce."
modern, trace = normalize_text(text, ruleset)
print(modern)

# The trace records which rule (or dictionary entry) changed each word.
for entry in trace.tokens:
    for source, before, after in entry.steps:
        print(f"  {before:>10} -> {after:<10} by {source}")
