"""Post-editing effort metrics.

MED is a character-level Levenshtein distance over Unicode scalar values
(inputs are NFC-normalized at corpus load). TER follows the classic
greedy-shift formulation: repeatedly apply the block shift that maximally
reduces the word-level edit distance to the reference, then count the
remaining insert/delete/substitute edits; HTER is TER with the rater's
post-edit as the reference. Tokenization, case sensitivity, the 10-token
shift cap and the shift tie-breaking below are this package's frozen
comparability contract.
"""

from __future__ import annotations

import re
import statistics
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

_TOKEN_RE = re.compile(r"\w+|[^\w\s]", re.UNICODE)

SHIFT_CAP = 10


@dataclass(frozen=True)
class EditThresholds:
    """Bin boundaries for MED: edited means MED > edited_threshold, high
    effort means MED > high_effort_threshold (both strict)."""

    edited_threshold: int = 0
    high_effort_threshold: int = 5

    def __post_init__(self):
        if not (0 <= self.edited_threshold < self.high_effort_threshold):
            raise ValueError("need 0 <= edited_threshold < high_effort_threshold")


class MedBin(Enum):
    EXACT = "exact"
    EDITED = "edited"
    HIGH_EFFORT = "high_effort"


@dataclass(frozen=True)
class TerBreakdown:
    insertions: int
    deletions: int
    substitutions: int
    shifts: int
    ref_tokens: int

    @property
    def total_edits(self) -> int:
        return self.insertions + self.deletions + self.substitutions + self.shifts


@dataclass(frozen=True)
class DescriptiveStats:
    min: float
    max: float
    avg: float
    med: float
    sd: float


def med(original: str, postedited: str) -> int:
    """Character-level Levenshtein distance with unit costs."""
    a, b = original, postedited
    # strip common affixes; post-edits mostly agree with the shown text
    lo = 0
    while lo < len(a) and lo < len(b) and a[lo] == b[lo]:
        lo += 1
    hi = 0
    while hi < len(a) - lo and hi < len(b) - lo and a[len(a) - 1 - hi] == b[len(b) - 1 - hi]:
        hi += 1
    a, b = a[lo : len(a) - hi], b[lo : len(b) - hi]
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        for j, cb in enumerate(b, start=1):
            cur[j] = min(
                prev[j] + 1,
                cur[j - 1] + 1,
                prev[j - 1] + (ca != cb),
            )
        prev = cur
    return prev[-1]


def bin_med(value: int, thresholds: EditThresholds = EditThresholds()) -> MedBin:
    if value < 0:
        raise ValueError("MED values are non-negative")
    if value == 0:
        return MedBin.EXACT
    if value > thresholds.high_effort_threshold:
        return MedBin.HIGH_EFFORT
    return MedBin.EDITED


def tokenize(text: str) -> list[str]:
    """Whitespace split with punctuation characters as standalone tokens;
    case-sensitive."""
    return _TOKEN_RE.findall(text)


def _lev(hyp: Sequence[str], ref: Sequence[str]) -> int:
    return med_seq(hyp, ref)


def med_seq(a: Sequence, b: Sequence) -> int:
    """Levenshtein distance over arbitrary token sequences."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ta in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        for j, tb in enumerate(b, start=1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ta != tb))
        prev = cur
    return prev[-1]


def _lev_align(hyp: Sequence[str], ref: Sequence[str]):
    """Full-table Levenshtein with a deterministic backtrace.

    Returns (distance, ops) where ops are (op, hyp_index, ref_index) tuples
    with op in {match, sub, del, ins}; indices are -1 where inapplicable.
    """
    n, m = len(hyp), len(ref)
    dp = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        dp[i][0] = i
    for j in range(m + 1):
        dp[0][j] = j
    for i in range(1, n + 1):
        row = dp[i]
        prev = dp[i - 1]
        for j in range(1, m + 1):
            row[j] = min(prev[j] + 1, row[j - 1] + 1, prev[j - 1] + (hyp[i - 1] != ref[j - 1]))
    ops = []
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and dp[i][j] == dp[i - 1][j - 1] + (hyp[i - 1] != ref[j - 1]):
            ops.append(("match" if hyp[i - 1] == ref[j - 1] else "sub", i - 1, j - 1))
            i, j = i - 1, j - 1
        elif i > 0 and dp[i][j] == dp[i - 1][j] + 1:
            ops.append(("del", i - 1, -1))
            i -= 1
        else:
            ops.append(("ins", -1, j - 1))
            j -= 1
    ops.reverse()
    return dp[n][m], ops


def _ref_blocks(ref: Sequence[str], cap: int) -> set[tuple[str, ...]]:
    blocks = set()
    for length in range(1, min(cap, len(ref)) + 1):
        for j in range(len(ref) - length + 1):
            blocks.add(tuple(ref[j : j + length]))
    return blocks


def _best_shift(cur: list[str], ref: Sequence[str], misaligned: set[int]):
    """The legal shift minimizing the resulting edit distance.

    A legal shift moves a block of at most SHIFT_CAP tokens that exactly
    matches some reference subsequence and contains at least one currently
    misaligned token. Ties break on (resulting distance, earliest block
    start, shortest block, earliest destination). Returns
    (distance, sequence, unique) or None when no legal shift exists.
    """
    blocks = _ref_blocks(ref, SHIFT_CAP)
    best_key = None
    best_seq = None
    unique = True
    for start in range(len(cur)):
        for length in range(1, min(SHIFT_CAP, len(cur) - start) + 1):
            block = tuple(cur[start : start + length])
            if block not in blocks:
                continue
            if not any(start <= m < start + length for m in misaligned):
                continue
            rest = cur[:start] + cur[start + length :]
            for dest in range(len(rest) + 1):
                if dest == start:
                    continue
                cand = rest[:dest] + list(block) + rest[dest:]
                if cand == cur:
                    continue
                dist = med_seq(cand, ref)
                key = (dist, start, length, dest)
                if best_key is None or key < best_key:
                    if best_key is not None and dist == best_key[0] and cand != best_seq:
                        unique = False
                    best_key, best_seq = key, cand
                elif dist == best_key[0] and cand != best_seq:
                    unique = False
    if best_key is None:
        return None
    return best_key[0], best_seq, unique


def ter_edits_detailed(
    hypothesis: Sequence[str], reference: Sequence[str]
) -> tuple[TerBreakdown, bool]:
    """Like :func:`ter_edits`, also reporting whether every greedy shift
    choice was unique (no distance ties among candidate shifts)."""
    hyp = list(hypothesis)
    ref = list(reference)
    if not ref:
        if not hyp:
            return TerBreakdown(0, 0, 0, 0, 0), True
        raise ValueError("empty reference with nonempty hypothesis: HTER undefined")

    shifts = 0
    all_unique = True
    dist, ops = _lev_align(hyp, ref)
    while dist > 0:
        misaligned = {i for op, i, _ in ops if op in ("sub", "del")}
        found = _best_shift(hyp, ref, misaligned)
        if found is None:
            break
        new_dist, new_seq, unique = found
        if new_dist >= dist:
            break
        if not unique:
            all_unique = False
        hyp = new_seq
        shifts += 1
        dist, ops = _lev_align(hyp, ref)

    counts = {"ins": 0, "del": 0, "sub": 0}
    for op, _, _ in ops:
        if op in counts:
            counts[op] += 1
    breakdown = TerBreakdown(
        insertions=counts["ins"],
        deletions=counts["del"],
        substitutions=counts["sub"],
        shifts=shifts,
        ref_tokens=len(ref),
    )
    return breakdown, all_unique


def ter_edits(hypothesis: Sequence[str], reference: Sequence[str]) -> TerBreakdown:
    """Greedy-shift TER edit counts for one hypothesis/reference pair."""
    breakdown, _ = ter_edits_detailed(hypothesis, reference)
    return breakdown


def corpus_hter(pairs: Iterable[tuple[Sequence[str], Sequence[str]]]) -> float:
    """Micro-averaged TER over (hypothesis, reference) token pairs, as a
    percentage rounded to 2 decimals."""
    total_edits = 0
    total_ref = 0
    n = 0
    for hyp, ref in pairs:
        breakdown = ter_edits(hyp, ref)
        total_edits += breakdown.total_edits
        total_ref += breakdown.ref_tokens
        n += 1
    if n == 0:
        raise ValueError("corpus_hter needs at least one pair")
    if total_ref == 0:
        raise ValueError("corpus_hter: all references empty")
    return round(100.0 * total_edits / total_ref, 2)


def descriptive_stats(values: Sequence[int | float]) -> DescriptiveStats:
    """min/max/mean/median/sample-sd summary; sd is 0 for a single value."""
    if not values:
        raise ValueError("descriptive_stats needs a nonempty sample")
    return DescriptiveStats(
        min=float(min(values)),
        max=float(max(values)),
        avg=statistics.fmean(values),
        med=float(statistics.median(values)),
        sd=statistics.stdev(values) if len(values) > 1 else 0.0,
    )
