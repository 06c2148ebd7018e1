"""blindpe: blind comparative evaluation of human and machine translation.

Prepares randomized interleaved documents for blinded post-editing studies,
collects rater annotations, and computes post-editing effort metrics and
categorical significance statistics.
"""

__version__ = "0.1.0"

from blindpe.corpus import AlignedDocument, AlignedSegment, Origin, load_aligned
from blindpe.interleave import PreparationConfig, interleave, partition_sections, unblind
from blindpe.metrics import EditThresholds, bin_med, corpus_hter, med, ter_edits, tokenize
from blindpe.stats import (
    ContingencyTable2x2,
    chi_square,
    fisher_exact_two_tailed,
    g_test,
    wilson_ci,
)
from blindpe.analysis import AnalysisConfig, analyze, build_contingency, exclude_incomplete

__all__ = [
    "AlignedDocument",
    "AlignedSegment",
    "AnalysisConfig",
    "ContingencyTable2x2",
    "EditThresholds",
    "Origin",
    "PreparationConfig",
    "analyze",
    "bin_med",
    "build_contingency",
    "chi_square",
    "corpus_hter",
    "exclude_incomplete",
    "fisher_exact_two_tailed",
    "g_test",
    "interleave",
    "load_aligned",
    "med",
    "partition_sections",
    "ter_edits",
    "tokenize",
    "unblind",
    "wilson_ci",
]
