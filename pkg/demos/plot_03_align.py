"""
Aligning two editions paragraph by paragraph
============================================

Editions differ in spelling and sometimes in paragraph breaks.  The aligner
finds the best monotone sequence of 1-1, 1-2, 2-1 and null beads.
"""

from diachron import align, filter_beads

modern = [
    "Pan Wokulski wszedł do sklepu.",
    "Rzecki spojrzał na niego z daleka.",
    "Była to decyzja trudna, lecz konieczna.",
    "Nikt nie protestował.",
]
# the old edition joins two paragraphs and spells "decyzya"
old = [
    "Pan Wokulski wszedł do sklepu.",
    "Rzecki spojrzał na niego z daleka. Była to decyzya trudna, lecz konieczna.",
    "Nikt nie protestował.",
]

result = align(old, modern)
for bead in result.beads:
    print(bead.shape, bead.src, bead.tgt, round(bead.score, 3))
print("average score", round(result.average_score, 3))

# Beads scoring at least 1.0 become training pairs.
for pair in filter_beads(result, threshold=1.0, novel_id="lalka"):
    print(pair.pair_id, "|", pair.src, "|", pair.tgt)
