"""Categorical inference over 2x2 origin-by-property contingency tables.

The two-tailed Fisher's exact test sums all hypergeometric point
probabilities not exceeding the observed one times (1 + 1e-7); this
relative-tolerance rule matches R's fisher.test and reproduces its
published p-values. Point probabilities are evaluated in log space via a
cached log-factorial table. G and chi-square p-values use the df=1
chi-square survival function erfc(sqrt(x/2)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from statistics import NormalDist

_REL_TOL = 1e-7

_log_fact: list[float] = [0.0]


def _lf(n: int) -> float:
    """log(n!) from a growing cached table."""
    while len(_log_fact) <= n:
        _log_fact.append(_log_fact[-1] + math.log(len(_log_fact)))
    return _log_fact[n]


class TestMethod(Enum):
    FISHER_TWO_TAILED = "fisher_two_tailed"
    G_TEST = "g_test"
    CHI_SQUARE = "chi_square"
    CHI_SQUARE_YATES = "chi_square_yates"


@dataclass(frozen=True)
class ContingencyTable2x2:
    """Counts a,b = property present/absent in HT rows; c,d likewise MT."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if min(self.a, self.b, self.c, self.d) < 0:
            raise ValueError("contingency counts must be non-negative")

    @property
    def n(self) -> int:
        return self.a + self.b + self.c + self.d

    @property
    def row_sums(self) -> tuple[int, int]:
        return (self.a + self.b, self.c + self.d)

    @property
    def col_sums(self) -> tuple[int, int]:
        return (self.a + self.c, self.b + self.d)

    def has_zero_margin(self) -> bool:
        return 0 in self.row_sums or 0 in self.col_sums

    def expected(self) -> tuple[float, float, float, float]:
        r1, r2 = self.row_sums
        c1, c2 = self.col_sums
        n = self.n
        return (r1 * c1 / n, r1 * c2 / n, r2 * c1 / n, r2 * c2 / n)


@dataclass(frozen=True)
class TestOutcome:
    method: TestMethod
    statistic: float | None
    p: float
    significant: bool
    degenerate: bool = False


@dataclass(frozen=True)
class ProportionCI:
    k: int
    n: int
    level: float
    lo: float
    hi: float


def _chi2_sf_df1(x: float) -> float:
    """Survival function of chi-square with one degree of freedom."""
    return math.erfc(math.sqrt(x / 2.0))


def _log_hypergeom_pmf(k: int, r1: int, r2: int, c1: int, n: int) -> float:
    return (
        _lf(r1)
        - _lf(k)
        - _lf(r1 - k)
        + _lf(r2)
        - _lf(c1 - k)
        - _lf(r2 - (c1 - k))
        - (_lf(n) - _lf(c1) - _lf(n - c1))
    )


def fisher_exact_two_tailed(t: ContingencyTable2x2, alpha: float = 0.05) -> TestOutcome:
    """Two-tailed Fisher's exact test with margins fixed.

    Degenerate margins (an all-zero row or column) yield p = 1.0 by
    convention, flagged as degenerate.
    """
    if t.has_zero_margin():
        return TestOutcome(
            method=TestMethod.FISHER_TWO_TAILED,
            statistic=None,
            p=1.0,
            significant=1.0 <= alpha,
            degenerate=True,
        )
    r1, r2 = t.row_sums
    c1, _ = t.col_sums
    n = t.n
    lo = max(0, c1 - r2)
    hi = min(c1, r1)
    p_obs = math.exp(_log_hypergeom_pmf(t.a, r1, r2, c1, n))
    cutoff = p_obs * (1.0 + _REL_TOL)
    p = 0.0
    for k in range(lo, hi + 1):
        pk = math.exp(_log_hypergeom_pmf(k, r1, r2, c1, n))
        if pk <= cutoff:
            p += pk
    p = min(p, 1.0)
    return TestOutcome(
        method=TestMethod.FISHER_TWO_TAILED,
        statistic=None,
        p=p,
        significant=p <= alpha,
    )


def fisher_one_tailed(t: ContingencyTable2x2) -> float:
    """Hypergeometric tail p in the observed direction: upper tail when the
    observed cell a is at or above its expectation, lower tail otherwise."""
    if t.has_zero_margin():
        return 1.0
    r1, r2 = t.row_sums
    c1, _ = t.col_sums
    n = t.n
    lo = max(0, c1 - r2)
    hi = min(c1, r1)
    expected_a = r1 * c1 / n
    if t.a >= expected_a:
        ks = range(t.a, hi + 1)
    else:
        ks = range(lo, t.a + 1)
    return min(1.0, sum(math.exp(_log_hypergeom_pmf(k, r1, r2, c1, n)) for k in ks))


def g_test(t: ContingencyTable2x2, alpha: float = 0.05) -> TestOutcome:
    """Likelihood-ratio (G) test of independence, df = 1."""
    if t.has_zero_margin():
        raise ValueError("G test undefined for tables with a zero margin")
    g = 0.0
    for obs, exp in zip((t.a, t.b, t.c, t.d), t.expected()):
        if obs > 0:
            g += obs * math.log(obs / exp)
    g *= 2.0
    g = max(g, 0.0)
    p = min(1.0, _chi2_sf_df1(g))
    return TestOutcome(method=TestMethod.G_TEST, statistic=g, p=p, significant=p <= alpha)


def chi_square(t: ContingencyTable2x2, yates: bool = False, alpha: float = 0.05) -> TestOutcome:
    """Pearson chi-square test of independence, optionally with Yates'
    continuity correction, df = 1."""
    if t.has_zero_margin():
        raise ValueError("chi-square test undefined for tables with a zero margin")
    correction = 0.5 if yates else 0.0
    stat = 0.0
    for obs, exp in zip((t.a, t.b, t.c, t.d), t.expected()):
        diff = max(abs(obs - exp) - correction, 0.0)
        stat += diff * diff / exp
    p = min(1.0, _chi2_sf_df1(stat))
    method = TestMethod.CHI_SQUARE_YATES if yates else TestMethod.CHI_SQUARE
    return TestOutcome(method=method, statistic=stat, p=p, significant=p <= alpha)


def wilson_ci(k: int, n: int, level: float = 0.95) -> ProportionCI:
    """Wilson score confidence interval for a binomial proportion."""
    if n < 1:
        raise ValueError("wilson_ci needs n >= 1")
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    z = 1.959964 if level == 0.95 else NormalDist().inv_cdf((1.0 + level) / 2.0)
    phat = k / n
    z2 = z * z
    denom = 1.0 + z2 / n
    centre = (phat + z2 / (2 * n)) / denom
    half = (z / denom) * math.sqrt(phat * (1 - phat) / n + z2 / (4 * n * n))
    # exact endpoints at the boundary; rounding must not violate lo <= k/n <= hi
    lo = 0.0 if k == 0 else max(0.0, min(centre - half, phat))
    hi = 1.0 if k == n else min(1.0, max(centre + half, phat))
    return ProportionCI(k=k, n=n, level=level, lo=lo, hi=hi)
