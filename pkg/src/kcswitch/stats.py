"""Group means and the two-sample testing protocol.

Normality is checked with Shapiro-Wilk on each group; Welch's t-test and the
Mann-Whitney U test are both run, and the U test decides significance
whenever either group looks non-normal.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from statistics import NormalDist
from typing import Callable, Iterable, Sequence

import numpy as np

from kcswitch import kernels
from kcswitch._special import norm_sf, t_two_sided
from kcswitch.corpus import Category, Chart, Corpus, Gender, Song
from kcswitch.features import (DEFAULT_CONFIG, FEATURE_NAMES, FeatureConfig,
                               FeatureVector, extract_features)

ALPHA = 0.05
NORMALITY_ALPHA = 0.05
EXACT_U_MAX = 64


class StatsError(ValueError):
    """Input outside a test's domain (too few points, zero variance...)."""


class Method(str, enum.Enum):
    WELCH = "Welch"
    MANN_WHITNEY = "MannWhitney"
    SHAPIRO_WILK = "ShapiroWilk"


@dataclass(frozen=True)
class TestResult:
    __test__ = False

    method: Method
    statistic: float
    p_value: float
    detail: float | None = None
    exact: bool | None = None


# ---------------------------------------------------------------- descriptive

def _mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values)


def _var(values: Sequence[float]) -> float:
    m = _mean(values)
    return math.fsum((v - m) ** 2 for v in values) / (len(values) - 1)


def group_means(songs: Corpus | Iterable[Song], by: Sequence[str] = ("chart", "gender"),
                config: FeatureConfig = DEFAULT_CONFIG,
                vectors: dict | None = None) -> dict[tuple, FeatureVector | None]:
    """Mean feature vector for every combination of the ``by`` attributes.

    Every combination of enum values appears in the result; cells without
    songs map to ``None`` rather than to a zero vector.
    """
    domains = {"chart": list(Chart), "gender": list(Gender), "category": list(Category)}
    songs = list(songs)
    cells = {key: [] for key in itertools.product(*(domains[attr] for attr in by))}
    for song in songs:
        vec = vectors[song] if vectors is not None else extract_features(song, config)
        cells[tuple(getattr(song, attr) for attr in by)].append(vec)
    out = {}
    for key, vecs in cells.items():
        if not vecs:
            out[key] = None
            continue
        cols = list(zip(*(v.as_tuple() for v in vecs)))
        out[key] = FeatureVector(*(math.fsum(c) / len(c) for c in cols))
    return out


# ----------------------------------------------------------------- Shapiro-Wilk

_SW_C1 = (0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056)
_SW_C2 = (0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633)
_SW_C3 = (0.5440, -0.39978, 0.025054, -6.714e-4)
_SW_C4 = (1.3822, -0.77857, 0.062767, -0.0020322)
_SW_C5 = (-1.5861, -0.31082, -0.083751, 0.0038915)
_SW_C6 = (-0.4803, -0.082676, 0.0030302)
_SW_G = (-2.273, 0.459)


def _poly(coefs, x):
    # coefficients in increasing order of power
    result = 0.0
    for c in reversed(coefs):
        result = result * x + c
    return result


def _sw_coefficients(n: int) -> list[float]:
    """Royston's approximation to the half-vector of Shapiro-Wilk weights."""
    half = n // 2
    if n == 3:
        return [math.sqrt(0.5)]
    inv = NormalDist().inv_cdf
    m = [inv((i - 0.375) / (n + 0.25)) for i in range(1, half + 1)]
    summ2 = 2.0 * math.fsum(v * v for v in m)
    ssumm2 = math.sqrt(summ2)
    rsn = 1.0 / math.sqrt(n)
    a1 = _poly(_SW_C1, rsn) - m[0] / ssumm2
    if n > 5:
        a2 = -m[1] / ssumm2 + _poly(_SW_C2, rsn)
        fac = math.sqrt((summ2 - 2.0 * m[0] ** 2 - 2.0 * m[1] ** 2)
                        / (1.0 - 2.0 * a1 ** 2 - 2.0 * a2 ** 2))
        return [a1, a2] + [-v / fac for v in m[2:]]
    fac = math.sqrt((summ2 - 2.0 * m[0] ** 2) / (1.0 - 2.0 * a1 ** 2))
    return [a1] + [-v / fac for v in m[1:]]


def shapiro_wilk(sample: Sequence[float]) -> TestResult:
    """Shapiro-Wilk W with Royston's (1995) p-value approximation; 3 <= n <= 5000."""
    x = sorted(float(v) for v in sample)
    n = len(x)
    if n < 3:
        raise StatsError(f"Shapiro-Wilk needs at least 3 observations, got {n}")
    if n > 5000:
        raise StatsError(f"Shapiro-Wilk approximation is valid up to n=5000, got {n}")
    if x[-1] == x[0]:
        raise StatsError("Shapiro-Wilk is undefined for a constant sample")
    a = _sw_coefficients(n)
    centre = _mean(x)
    ssq = math.fsum((v - centre) ** 2 for v in x)
    num = math.fsum(a[i] * (x[n - 1 - i] - x[i]) for i in range(len(a)))
    w = min(num * num / ssq, 1.0)

    if n == 3:
        p = (6.0 / math.pi) * (math.asin(math.sqrt(w)) - math.asin(math.sqrt(0.75)))
        return TestResult(Method.SHAPIRO_WILK, w, min(max(p, 0.0), 1.0))
    if w >= 1.0:
        return TestResult(Method.SHAPIRO_WILK, w, 1.0)
    y = math.log(1.0 - w)
    if n <= 11:
        gamma = _poly(_SW_G, n)
        if y >= gamma:
            return TestResult(Method.SHAPIRO_WILK, w, 0.0)
        y = -math.log(gamma - y)
        mu = _poly(_SW_C3, n)
        sigma = math.exp(_poly(_SW_C4, n))
    else:
        ln = math.log(n)
        mu = _poly(_SW_C5, ln)
        sigma = math.exp(_poly(_SW_C6, ln))
    p = norm_sf((y - mu) / sigma)
    return TestResult(Method.SHAPIRO_WILK, w, min(max(p, 0.0), 1.0))


# ------------------------------------------------------------------------ Welch

def welch_t_test(a: Sequence[float], b: Sequence[float]) -> TestResult:
    """Two-sided Welch t-test; ``detail`` holds the Welch-Satterthwaite df."""
    a = [float(v) for v in a]
    b = [float(v) for v in b]
    na, nb = len(a), len(b)
    if na < 2 or nb < 2:
        raise StatsError(f"Welch's t-test needs >= 2 values per sample, got {na} and {nb}")
    va, vb = _var(a), _var(b)
    if va == 0.0 and vb == 0.0:
        raise StatsError("Welch's t-test is undefined when both samples are constant")
    sa, sb = va / na, vb / nb
    se2 = sa + sb
    t = (_mean(a) - _mean(b)) / math.sqrt(se2)
    df = se2 * se2 / (sa * sa / (na - 1) + sb * sb / (nb - 1))
    return TestResult(Method.WELCH, t, t_two_sided(t, df), detail=df)


# ----------------------------------------------------------------- Mann-Whitney

def midranks(values: Sequence[float]) -> tuple[list[float], list[int]]:
    """1-based ranks with ties sharing their average rank, plus tie-group sizes."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    ties = []
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        ties.append(j - i + 1)
        i = j + 1
    return ranks, ties


def mann_whitney_u(a: Sequence[float], b: Sequence[float],
                   exact_max: int = EXACT_U_MAX) -> TestResult:
    """Two-sided Mann-Whitney U test.

    ``statistic`` is U for sample ``a`` and ``detail`` the complementary U for
    ``b``. Without ties and with ``len(a) * len(b) <= exact_max`` the p-value
    is exact, from all ways of drawing ``len(a)`` ranks out of ``1..n``.
    Otherwise the normal approximation with tie and continuity correction is
    used.
    """
    a = [float(v) for v in a]
    b = [float(v) for v in b]
    na, nb = len(a), len(b)
    if na < 1 or nb < 1:
        raise StatsError("Mann-Whitney U needs at least one value per sample")
    n = na + nb
    ranks, ties = midranks(a + b)
    rank_sum = math.fsum(ranks[:na])
    u = rank_sum - na * (na + 1) / 2.0
    u_other = na * nb - u
    has_ties = any(t > 1 for t in ties)

    if not has_ties and na * nb <= exact_max:
        pool = np.arange(1, n + 1, dtype=np.int_)
        n_le, n_ge, n_total = kernels.rank_sum_tail_counts(pool, na, int(round(rank_sum)))
        p = min(1.0, 2 * min(n_le, n_ge) / n_total)
        return TestResult(Method.MANN_WHITNEY, u, p, detail=u_other, exact=True)

    mu = na * nb / 2.0
    tie_term = math.fsum(t ** 3 - t for t in ties) / (n * (n - 1)) if n > 1 else 0.0
    var = na * nb / 12.0 * ((n + 1) - tie_term)
    if var <= 0.0:
        return TestResult(Method.MANN_WHITNEY, u, 1.0, detail=u_other, exact=False)
    z = max(abs(u - mu) - 0.5, 0.0) / math.sqrt(var)
    p = min(1.0, 2.0 * norm_sf(z))
    return TestResult(Method.MANN_WHITNEY, u, p, detail=u_other, exact=False)


# ------------------------------------------------------------ group comparison

@dataclass(frozen=True)
class GroupComparison:
    feature_name: str
    group_labels: tuple[str, str]
    means: tuple[float, float]
    n: tuple[int, int]
    welch: TestResult
    mannwhitney: TestResult
    normality: tuple[TestResult | None, TestResult | None]
    significant: bool
    alpha: float

    @property
    def normal(self) -> bool:
        """True only if both groups pass Shapiro-Wilk at the 5% level."""
        return all(r is not None and r.p_value >= NORMALITY_ALPHA for r in self.normality)

    @property
    def decisive(self) -> TestResult:
        return self.welch if self.normal else self.mannwhitney


def _normality(values):
    try:
        return shapiro_wilk(values)
    except StatsError:
        # constant or oversize group: no evidence of normality
        return None


def compare_samples(a: Sequence[float], b: Sequence[float], feature_name: str = "",
                    labels: tuple[str, str] = ("A", "B"), alpha: float = ALPHA,
                    exact_max: int = EXACT_U_MAX) -> GroupComparison:
    for label, sample in zip(labels, (a, b)):
        if len(sample) < 3:
            raise StatsError(f"group {label!r} has {len(sample)} songs; at least 3 required")
    welch = welch_t_test(a, b)
    mw = mann_whitney_u(a, b, exact_max=exact_max)
    normality = (_normality(a), _normality(b))
    normal = all(r is not None and r.p_value >= NORMALITY_ALPHA for r in normality)
    decisive = welch if normal else mw
    return GroupComparison(
        feature_name=feature_name,
        group_labels=tuple(labels),
        means=(_mean(a), _mean(b)),
        n=(len(a), len(b)),
        welch=welch,
        mannwhitney=mw,
        normality=normality,
        significant=decisive.p_value < alpha,
        alpha=alpha,
    )


def compare_groups(songs: Corpus | Iterable[Song], feature: str,
                   split: tuple[Callable[[Song], bool], Callable[[Song], bool]],
                   labels: tuple[str, str] = ("A", "B"), alpha: float = ALPHA,
                   config: FeatureConfig = DEFAULT_CONFIG, vectors: dict | None = None,
                   exact_max: int = EXACT_U_MAX) -> GroupComparison:
    """Compare one feature between the songs picked by two predicates."""
    if feature not in FEATURE_NAMES:
        raise ValueError(f"unknown feature {feature!r}")
    songs = list(songs)

    def values(pred):
        out = []
        for song in songs:
            if pred(song):
                vec = vectors[song] if vectors is not None else extract_features(song, config)
                out.append(float(getattr(vec, feature)))
        return out

    return compare_samples(values(split[0]), values(split[1]), feature, labels, alpha,
                           exact_max=exact_max)


@dataclass(frozen=True)
class ComparisonSpec:
    feature: str
    feature_label: str
    comparison: str
    group_labels: tuple[str, str]
    split: tuple[Callable[[Song], bool], Callable[[Song], bool]]


def _is(chart=None, gender=None, category=None):
    def pred(song):
        return ((chart is None or song.chart == chart)
                and (gender is None or song.gender == gender)
                and (category is None or song.category == category))
    return pred


def _gender_rows(feature, label, chart, chart_name):
    return ComparisonSpec(
        feature, label, f"Boy groups vs. girl groups ({chart_name})", ("Boy groups", "Girl groups"),
        (_is(chart, Gender.M, Category.GROUP), _is(chart, Gender.F, Category.GROUP)))


def _chart_rows(gender, who):
    return ComparisonSpec(
        "kor_ratio", "Korean lyric ratio", f"{who}: Hot 100 vs. Global 200",
        ("Hot 100", "Global 200"),
        (_is(Chart.HOT100, gender, Category.GROUP), _is(Chart.GLOBAL200, gender, Category.GROUP)))


# The six hypotheses tested on group (non-solo) songs.
STANDARD_COMPARISONS = (
    _gender_rows("code_switch_count", "Code-switching", Chart.HOT100, "Hot 100"),
    _gender_rows("kor_ratio", "Korean lyric ratio", Chart.HOT100, "Hot 100"),
    _gender_rows("code_switch_count", "Code-switching", Chart.GLOBAL200, "Global 200"),
    _gender_rows("kor_ratio", "Korean lyric ratio", Chart.GLOBAL200, "Global 200"),
    _chart_rows(Gender.M, "Boy groups"),
    _chart_rows(Gender.F, "Girl groups"),
)
