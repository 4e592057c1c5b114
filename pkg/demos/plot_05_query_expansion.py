"""
Searching historical texts with modern queries
==============================================

Inverting the ruleset yields old spellings of a modern word.  Every variant
is checked to normalize back to the query.
"""

from diachron import default_ruleset, expand_query, historical_variants, invert_ruleset

gen = invert_ruleset(default_ruleset())

for word in ["decyzja", "teoria", "generał", "blisko", "kot"]:
    print(word, historical_variants(word, gen))

# Whole queries become boolean expressions; multi-word map targets stay together.
expression, terms = expand_query("generał na pewno zmienił teorię", gen)
print(expression)
