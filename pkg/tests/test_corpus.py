import io

import pytest

from blindpe.corpus import (
    AlignedDocument,
    AlignedSegment,
    CorpusFormatError,
    escape_cell,
    load_aligned,
    report_as_json,
    report_as_text,
    serialize,
    unescape_cell,
    validate,
)

WELL_FORMED = (
    "id\tsource\tht\tmt\n"
    "s1\tQuelle eins\tHT eins\tMT eins\n"
    "s2\tQuelle zwei\tHT zwei\tMT zwei\n"
    "s3\tQuelle drei\tHT drei\tMT drei\n"
)


def test_load_preserves_row_order():
    doc = load_aligned(WELL_FORMED)
    assert len(doc) == 3
    assert doc.segment_ids() == ["s1", "s2", "s3"]
    assert doc.segments[1].ht == "HT zwei"


def test_empty_cell_reports_row_and_column():
    text = "id\tsource\tht\tmt\ns1\tQ\tH\t\n"
    with pytest.raises(CorpusFormatError) as exc:
        load_aligned(text)
    assert "row 2" in str(exc.value)
    assert "mt" in str(exc.value)


def test_duplicate_id_cites_offender():
    text = "id\tsource\tht\tmt\ns7\tQ\tH\tM\ns7\tQ2\tH2\tM2\n"
    with pytest.raises(CorpusFormatError) as exc:
        load_aligned(text)
    assert "s7" in str(exc.value)


def test_wrong_column_count():
    text = "id\tsource\tht\tmt\ns1\tQ\tH\n"
    with pytest.raises(CorpusFormatError) as exc:
        load_aligned(text)
    assert "3" in str(exc.value)


def test_invalid_utf8_reports_row():
    bad = b"id\tsource\tht\tmt\ns1\tQ\tH\t\xff\xfe\n"
    with pytest.raises(CorpusFormatError) as exc:
        load_aligned(io.BytesIO(bad))
    assert "UTF-8" in str(exc.value)
    assert exc.value.row == 2


def test_round_trip_identity():
    doc = load_aligned(WELL_FORMED)
    again = load_aligned(serialize(doc))
    assert again == doc
    assert serialize(again) == serialize(doc)


def test_escaped_cells_round_trip():
    segment = AlignedSegment(id="s1", source="a\tb", ht="c\nd", mt="e\\f")
    doc = AlignedDocument(language_pair="de-en", segments=(segment,))
    text = serialize(doc)
    assert "\t".join(("s1", "a\\tb", "c\\nd", "e\\\\f")) in text
    assert load_aligned(text).segments[0] == segment


@pytest.mark.parametrize("cell", ["plain", "tab\there", "new\nline", "back\\slash", "\\t literal"])
def test_cell_escaping_is_invertible(cell):
    assert unescape_cell(escape_cell(cell)) == cell


def test_nfc_normalization_at_load():
    decomposed = "Café"
    text = f"id\tsource\tht\tmt\ns1\t{decomposed}\tH\tM\n"
    doc = load_aligned(text)
    assert doc.segments[0].source == "Café"


def test_metadata_comments_parsed():
    text = "# language_pair: de-fr\n# domain: insurance\n" + WELL_FORMED
    doc = load_aligned(text)
    assert doc.language_pair == "de-fr"
    assert doc.metadata["domain"] == "insurance"


def test_validate_accepts_everything_load_accepts():
    assert validate(load_aligned(WELL_FORMED)) == []


def test_validate_flags_empty_source():
    doc = AlignedDocument(
        language_pair="de-en",
        segments=(AlignedSegment(id="s1", source="", ht="h", mt="m"),),
    )
    findings = validate(doc)
    assert len(findings) == 1
    assert findings[0].segment_id == "s1"


def test_validate_enumerates_all_violations():
    # 5-segment fixture: two duplicate ids plus one empty ht = 3 findings
    segs = (
        AlignedSegment("a", "q", "h", "m"),
        AlignedSegment("b", "q", "h", "m"),
        AlignedSegment("a", "q", "h", "m"),
        AlignedSegment("b", "q", "", "m"),
        AlignedSegment("c", "q", "h", "m"),
    )
    findings = validate(AlignedDocument(language_pair="de-en", segments=segs))
    assert len(findings) == 3
    reasons = sorted(f.message for f in findings)
    assert sum("duplicate" in r for r in reasons) == 2
    assert sum("empty ht" in r for r in reasons) == 1


def test_report_serializations():
    doc = AlignedDocument(
        language_pair="de-en",
        segments=(AlignedSegment(id="s1", source="", ht="h", mt="m"),),
    )
    findings = validate(doc)
    assert report_as_text(findings) == "error\ts1\tempty source text\n"
    assert "empty source text" in report_as_json(findings)
