"""
Character and word error rates
==============================

CER and WER are edit distances divided by the reference length.
"""

from diachron import cer, edit_distance, wer
from diachron.aligner import ParagraphPair
from diachron.metrics import evaluate, format_table

print(edit_distance("decyzya", "decyzja"))
print(round(cer("decyzya", "decyzja"), 4))

# A merged word costs a substitution plus a deletion at the word level.
print(wer("niema czasu", "nie ma czasu"))

# Corpus scores are micro-averaged: total edits over total reference length.
pairs = [ParagraphPair("1", "n", "Niema go.", "Nie ma go."),
         ParagraphPair("2", "n", "Teorya.", "Teoria.")]
report = evaluate(pairs, [p.src for p in pairs], system="identity")
print(format_table([report]))
