from __future__ import annotations

import pytest

from blindpe.analysis import EvalDataset
from blindpe.corpus import AlignedDocument, AlignedSegment, Origin
from blindpe.interleave import UnblindedRecord
from blindpe.records import AnnotationRecord, ErrorFlags

# Table-shaped fixture counts per language pair:
# (n_ht, n_mt, {comparison: (ht_count, mt_count)})
TABLE3 = {
    "de-en": (150, 150, {"terminology": (8, 15), "omission": (1, 5), "typography": (3, 4), "med0": (20, 37), "med5": (12, 19)}),
    "de-fr": (237, 238, {"terminology": (27, 39), "omission": (14, 12), "typography": (5, 3), "med0": (67, 90), "med5": (53, 75)}),
    "de-it": (244, 248, {"terminology": (18, 19), "omission": (4, 1), "typography": (8, 6), "med0": (65, 50), "med5": (30, 27)}),
}

_BASE_TARGET = "ein ruhiger beispielsatz ohne besonderheiten"


def synthetic_dataset(language_pair: str) -> EvalDataset:
    """An EvalDataset whose contingency tables reproduce the fixture counts.

    Error flags are assigned to the first k records per category; MED bins
    are realised through post-edits of 6, 1 or 0 characters (med5 counts are
    a subset of med0 counts, as in any real sample).
    """
    n_ht, n_mt, counts = TABLE3[language_pair]
    records = []
    for origin, n in ((Origin.HT, n_ht), (Origin.MT, n_mt)):
        col = 0 if origin is Origin.HT else 1
        med0, med5 = counts["med0"][col], counts["med5"][col]
        for i in range(n):
            if i < med5:
                postedit = _BASE_TARGET + "!" * 6
            elif i < med0:
                postedit = _BASE_TARGET + "!"
            else:
                postedit = _BASE_TARGET
            record = AnnotationRecord(
                segment_id=f"{origin.value.lower()}-{i}",
                rater_id="r1",
                postedited=postedit,
                flags=ErrorFlags(
                    terminology=i < counts["terminology"][col],
                    omission=i < counts["omission"][col],
                    typography=i < counts["typography"][col],
                ),
                completed=True,
                shown_target=_BASE_TARGET,
            )
            records.append(UnblindedRecord(record=record, origin=origin, shown_target=_BASE_TARGET))
    return EvalDataset(language_pair=language_pair, records=tuple(records))


@pytest.fixture
def table3_datasets() -> dict[str, EvalDataset]:
    return {lp: synthetic_dataset(lp) for lp in TABLE3}


def small_corpus(n: int = 6, prefix: str = "s") -> AlignedDocument:
    segments = tuple(
        AlignedSegment(
            id=f"{prefix}{i}",
            source=f"Quelle {i}",
            ht=f"menschliche uebersetzung {i}",
            mt=f"maschinelle uebersetzung {i}",
        )
        for i in range(1, n + 1)
    )
    return AlignedDocument(language_pair="de-xx", segments=segments)


@pytest.fixture
def corpus6() -> AlignedDocument:
    return small_corpus(6)
