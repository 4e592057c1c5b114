"""
Building the four dataset variants
==================================

From a manifest of historical (MediaWiki) and contemporary (XML) editions
to paragraph pairs and the pruned / separated train-test splits.
"""

import tempfile
from pathlib import Path

from diachron.corpus import (build_all_variants, build_corpus, format_stats_table,
                             load_manifest, variant_stats)
from diachron.synthetic import write_edition_corpus

workdir = Path(tempfile.mkdtemp())
manifest = write_edition_corpus(workdir, n_novels=20, seed=1)
print(manifest.read_text().splitlines()[0])

# Editions are cleaned, matched by author and title, then aligned.
build = build_corpus(load_manifest(manifest))
print(len(build.matches), "matched novels,", len(build.pairs), "pairs")

# Pruning drops unchanged pairs; separation holds out whole novels.
variants = build_all_variants(build.pairs, seed=7)
print(format_stats_table([(v, variant_stats(v, build.pairs)) for v in variants]))
