"""
The whole pipeline in one script
================================

Prepare blinded materials, simulate a rater filling them in, join the
annotations back with the key, and run the full analysis. The same steps
are available on the command line as `blindpe prepare / ingest / analyze`.
"""

from blindpe.analysis import analyze, exclude_incomplete, results_csv
from blindpe.corpus import AlignedDocument, AlignedSegment
from blindpe.interleave import PreparationConfig, interleave, partition_sections
from blindpe.records import AnnotationRecord, ErrorFlags

doc = AlignedDocument(
    language_pair="de-en",
    segments=tuple(
        AlignedSegment(
            id=f"seg{i}",
            source=f"Deutscher Satz {i}.",
            ht=f"A carefully worded sentence number {i}.",
            mt=f"A machine worded sentence number {i}.",
        )
        for i in range(1, 21)
    ),
)

cfg = PreparationConfig(seed=7, raters=("rater-a",), segments_per_rater=20)
prepared, key = interleave(doc, partition_sections(doc, cfg), cfg)

# Simulate the rater: edit every third segment, flag one omission, copy
# the rest unchanged (an unedited copy still counts as completed work).
records = []
for i, row in enumerate(prepared[0].rows):
    edited = row.target + " Indeed." if i % 3 == 0 else row.target
    records.append(
        AnnotationRecord(
            segment_id=row.segment_id,
            rater_id="rater-a",
            postedited=edited,
            flags=ErrorFlags(omission=(i == 4)),
            completed=True,
            shown_target=row.target,
        )
    )

# Unblinding happens only here, operator-side, with the key in hand.
dataset, summary = exclude_incomplete(records, key, language_pair="de-en")
print(f"kept {len(dataset.records)} records, excluded {summary.excluded}")

results = analyze(dataset)
for comp in results.comparisons:
    marker = " *" if comp.significant else ""
    print(
        f"{comp.name:12s} HT {comp.ht.count}/{comp.ht.n}  "
        f"MT {comp.mt.count}/{comp.mt.n}  p={comp.fisher.p:.3f}{marker}"
    )

print()
print(results_csv(results, seed=7, reproducible=True))
