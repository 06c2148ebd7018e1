import random

import pytest
from hypothesis import given, strategies as st

from blindpe.metrics import (
    EditThresholds,
    MedBin,
    bin_med,
    corpus_hter,
    descriptive_stats,
    med,
    tokenize,
)

from oracles import dp_levenshtein

MIXED_ALPHABET = "abcdeäöüßéàç日本語 .,"
texts = st.text(alphabet=MIXED_ALPHABET, max_size=25)


class TestMed:
    def test_identity(self):
        assert med("Der Vertrag gilt.", "Der Vertrag gilt.") == 0

    def test_pure_insertion(self):
        assert med("", "abc") == 3

    def test_kitten_sitting(self):
        assert med("kitten", "sitting") == dp_levenshtein("kitten", "sitting") == 3

    def test_unicode_scalars_not_bytes(self):
        assert med("é", "e") == 1
        assert med("日本", "日米") == 1

    @given(texts, texts)
    def test_matches_dp_oracle(self, a, b):
        assert med(a, b) == dp_levenshtein(a, b)

    @given(texts, texts)
    def test_symmetry(self, a, b):
        assert med(a, b) == med(b, a)

    @given(texts)
    def test_identity_of_indiscernibles(self, a):
        assert med(a, a) == 0

    @given(texts, texts, texts)
    def test_triangle_inequality(self, a, b, c):
        assert med(a, c) <= med(a, b) + med(b, c)


class TestBinMed:
    def test_zero_is_exact(self):
        assert bin_med(0) is MedBin.EXACT

    def test_threshold_boundaries_are_strict(self):
        assert bin_med(5) is MedBin.EDITED
        assert bin_med(6) is MedBin.HIGH_EFFORT

    def test_one_is_edited(self):
        assert bin_med(1) is MedBin.EDITED

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            bin_med(-1)

    def test_invalid_thresholds_rejected(self):
        with pytest.raises(ValueError):
            EditThresholds(5, 5)

    def test_partition_counts(self):
        values = [random.Random(0).randint(0, 12) for _ in range(500)]
        bins = [bin_med(v) for v in values]
        exact = bins.count(MedBin.EXACT)
        high = bins.count(MedBin.HIGH_EFFORT)
        assert exact + bins.count(MedBin.EDITED) + high == len(values)
        assert len(values) - exact == sum(v > 0 for v in values)
        assert high <= sum(v > 0 for v in values)


class TestTokenize:
    def test_punctuation_standalone(self):
        assert tokenize("Hello, world.") == ["Hello", ",", "world", "."]

    def test_empty(self):
        assert tokenize("") == []

    def test_whitespace_collapse(self):
        assert tokenize("a  b") == ["a", "b"]

    def test_case_sensitive(self):
        assert tokenize("Haus") != tokenize("haus")


class TestCorpusHter:
    def test_single_substitution_over_ten(self):
        hyp = "a b c d e f g h i X".split()
        ref = "a b c d e f g h i j".split()
        assert corpus_hter([(hyp, ref)]) == 10.00

    def test_identical_pairs_zero(self):
        pairs = [(["a", "b"], ["a", "b"])] * 5
        assert corpus_hter(pairs) == 0.00

    def test_micro_average(self):
        # (2 edits, 5 ref) + (0 edits, 5 ref) = 2/10
        p1 = ("x y c d e".split(), "a b c d e".split())
        p2 = ("a b c d e".split(), "a b c d e".split())
        assert corpus_hter([p1, p2]) == 20.00

    def test_reorder_invariance(self):
        p1 = ("x y c d e".split(), "a b c d e".split())
        p2 = ("a b".split(), "a c d".split())
        assert corpus_hter([p1, p2]) == corpus_hter([p2, p1])

    def test_empty_list_rejected(self):
        with pytest.raises(ValueError):
            corpus_hter([])


class TestDescriptiveStats:
    def test_constant_sample(self):
        s = descriptive_stats([0, 0, 0])
        assert (s.min, s.max, s.avg, s.med, s.sd) == (0, 0, 0, 0, 0)

    def test_skewed_sample(self):
        s = descriptive_stats([0, 0, 10])
        assert s.min == 0 and s.max == 10
        assert s.avg == pytest.approx(3.33, abs=0.005)
        assert s.med == 0
        assert s.sd == pytest.approx(5.77, abs=0.005)  # sample sd, n-1

    def test_even_n_median_convention(self):
        assert descriptive_stats([1, 2, 3, 4]).med == 2.5

    def test_single_value(self):
        assert descriptive_stats([7]).sd == 0.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            descriptive_stats([])
