"""
Post-editing effort metrics
===========================

Two views of the same rater work: character-level minimum edit distance
(MED) between the shown text and its post-edit, and word-level TER with
block shifts, aggregated into a corpus HTER percentage.
"""

from blindpe.metrics import bin_med, corpus_hter, med, ter_edits, tokenize

shown = "The contract enters into force on the first of January."
postedit = "The contract comes into force on January first."

# MED counts single-character insertions, deletions and substitutions.
distance = med(shown, postedit)
print("MED:", distance, "->", bin_med(distance).value)

# An untouched segment is an exact match; anything above 5 characters of
# editing counts as high effort.
print("MED 0:", bin_med(0).value, "/ MED 6:", bin_med(6).value)

# TER works on tokens and may move a whole block for the cost of one edit.
hyp = tokenize("on January first the contract comes into force")
ref = tokenize("the contract comes into force on January first")
breakdown = ter_edits(hyp, ref)
print(
    "TER edits:", breakdown.total_edits,
    f"({breakdown.shifts} shift, {breakdown.substitutions} sub,",
    f"{breakdown.insertions} ins, {breakdown.deletions} del)",
)

# Corpus HTER micro-averages edits over reference tokens, in percent.
pairs = [
    (tokenize(shown), tokenize(postedit)),
    (hyp, ref),
]
print("corpus HTER:", corpus_hter(pairs))
