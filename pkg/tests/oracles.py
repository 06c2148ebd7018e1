"""Independent reference implementations used only to check the library.

These are deliberately written without reusing any code path from the
package: full-table DP for edit distance, exhaustive shift-sequence search
for TER, and rational-arithmetic hypergeometric sums for Fisher's test.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb


def dp_levenshtein(a, b) -> int:
    """Full-table Levenshtein over sequences or strings."""
    n, m = len(a), len(b)
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        table[i][0] = i
    for j in range(m + 1):
        table[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            table[i][j] = min(
                table[i - 1][j] + 1,
                table[i][j - 1] + 1,
                table[i - 1][j - 1] + cost,
            )
    return table[n][m]


class _Sentinel:
    """Compares unequal to every real token, so substituting it for hyp[p]
    forces any optimal alignment of the probe to leave position p unmatched."""

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return 0


_SENTINEL = _Sentinel()


def _misaligned_positions(hyp: tuple, ref: tuple) -> set[int]:
    """Hypothesis positions left unmatched by at least one optimal alignment.

    Alignment-independent, unlike any single-backtrace implementation: the
    distance is unchanged when hyp[p] is replaced by a never-matching token
    exactly if some optimal alignment does not match p.
    """
    base = dp_levenshtein(hyp, ref)
    out = set()
    for p in range(len(hyp)):
        probe = hyp[:p] + (_SENTINEL,) + hyp[p + 1 :]
        if dp_levenshtein(probe, ref) == base:
            out.add(p)
    return out


def _legal_shifts(cur: tuple, ref: tuple, cap: int = 10):
    ref_blocks = {
        ref[j : j + length]
        for length in range(1, min(cap, len(ref)) + 1)
        for j in range(len(ref) - length + 1)
    }
    misaligned = _misaligned_positions(cur, ref)
    results = []
    for start in range(len(cur)):
        for length in range(1, min(cap, len(cur) - start) + 1):
            block = cur[start : start + length]
            if block not in ref_blocks:
                continue
            if not any(start <= p < start + length for p in misaligned):
                continue
            rest = cur[:start] + cur[start + length :]
            for dest in range(len(rest) + 1):
                if dest == start:
                    continue
                cand = rest[:dest] + block + rest[dest:]
                if cand != cur:
                    results.append(cand)
    return results


@lru_cache(maxsize=None)
def _oracle_rec(cur: tuple, ref: tuple, depth: int) -> int:
    best = dp_levenshtein(cur, ref)
    if depth == 0 or best == 0:
        return best
    for cand in set(_legal_shifts(cur, ref)):
        best = min(best, 1 + _oracle_rec(cand, ref, depth - 1))
    return best


def exhaustive_ter(hyp, ref, max_shifts: int = 3) -> int:
    """Minimal total edits over all legal shift sequences up to max_shifts."""
    return _oracle_rec(tuple(hyp), tuple(ref), max_shifts)


def rational_fisher_two_tailed(a: int, b: int, c: int, d: int) -> Fraction:
    """Exact two-tailed Fisher p as a rational number, using the same
    selection rule as R (point prob <= observed * (1 + 1e-7)) but evaluated
    in integer arithmetic."""
    r1, r2 = a + b, c + d
    c1 = a + c
    n = r1 + r2
    if 0 in (r1, r2, c1, n - c1):
        return Fraction(1)
    lo = max(0, c1 - r2)
    hi = min(c1, r1)
    numerators = {k: comb(r1, k) * comb(r2, c1 - k) for k in range(lo, hi + 1)}
    denominator = comb(n, c1)
    obs = numerators[a]
    # pk <= obs * (1 + 1e-7)  <=>  pk * 10**7 <= obs * (10**7 + 1)
    total = sum(nk for nk in numerators.values() if nk * 10**7 <= obs * (10**7 + 1))
    return min(Fraction(1), Fraction(total, denominator))
