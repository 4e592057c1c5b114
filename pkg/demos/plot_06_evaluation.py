"""
Comparing normalizers
=====================

The rule-based normalizer against two reference systems on a synthetic
corpus whose old spellings come from the inverted ruleset.
"""

from diachron import identity_normalize, memorizer_normalize, normalize_text
from diachron.baselines import train_memorizer
from diachron.corpus import build_variant
from diachron.metrics import evaluate, format_table
from diachron.rules import default_ruleset
from diachron.synthetic import synthetic_pairs

ruleset = default_ruleset()
pairs = synthetic_pairs(n_novels=20, seed=0)
by_id = {p.pair_id: p for p in pairs}

reports = []
for pruning, separation in [(False, False), (True, True)]:
    variant = build_variant(pairs, pruning, separation, seed=42)
    train = [by_id[i] for i in variant.train]
    test = [by_id[i] for i in variant.test]
    table = train_memorizer(train)
    systems = {
        "transducers": [normalize_text(p.src, ruleset)[0] for p in test],
        "identity": [identity_normalize(p.src) for p in test],
        "memorizer": [memorizer_normalize(p.src, table) for p in test],
    }
    for name, hyps in systems.items():
        reports.append(evaluate(test, hyps, system=name, variant=variant.id,
                                pruning=pruning, separation=separation))

print(format_table(reports))
