"""
Preparing blinded rater materials
=================================

Starting from a source-aligned corpus that carries both a human and a
machine translation per segment, the interleaver picks one of the two for
each rater-visible row and records the choice in a separately stored key.
"""

from blindpe.corpus import AlignedDocument, AlignedSegment
from blindpe.interleave import (
    BalanceScope,
    PreparationConfig,
    interleave,
    partition_sections,
    write_key,
    write_prepared,
)

# A miniature corpus: six segments, each with its HT and MT candidate.
doc = AlignedDocument(
    language_pair="de-en",
    segments=tuple(
        AlignedSegment(
            id=f"seg{i}",
            source=f"Deutscher Ausgangssatz {i}.",
            ht=f"Human translation {i}.",
            mt=f"Machine translation {i}.",
        )
        for i in range(1, 7)
    ),
)

# One rater sees all six segments. The seed makes the run reproducible:
# the same seed always yields the same assignment, byte for byte.
cfg = PreparationConfig(
    seed=42,
    raters=("rater-a",),
    segments_per_rater=6,
    balance_scope=BalanceScope.PER_SECTION,
)
sections = partition_sections(doc, cfg)
prepared, key = interleave(doc, sections, cfg)

# The rater-visible document: no origin column, no HT/MT labels anywhere.
print(write_prepared(prepared[0]))

# The key stays with the operator. An even section always splits 3/3.
print(write_key(key))
origins = [entry.origin.value for entry in key.entries.values()]
print("split:", origins.count("HT"), "HT /", origins.count("MT"), "MT")
