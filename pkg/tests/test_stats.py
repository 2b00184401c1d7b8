import math
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
import scipy.special
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from kcswitch._special import betainc, norm_sf, t_sf
from kcswitch.corpus import Category, Chart, Corpus, Gender
from kcswitch.features import FeatureVector
from kcswitch.stats import (Method, StatsError, compare_groups, compare_samples, group_means,
                            mann_whitney_u, midranks, shapiro_wilk, welch_t_test)
from kcswitch.synthetic import make_song


def brute_force_u_pvalue(a, b):
    """Two-sided permutation p-value of U, by direct pairwise comparison."""
    pooled = list(a) + list(b)
    na = len(a)

    def u_stat(x, y):
        return sum((xi > yj) + 0.5 * (xi == yj) for xi in x for yj in y)

    observed = u_stat(a, b)
    le = ge = total = 0
    for idx in combinations(range(len(pooled)), na):
        chosen = set(idx)
        x = [pooled[i] for i in idx]
        y = [pooled[i] for i in range(len(pooled)) if i not in chosen]
        u = u_stat(x, y)
        total += 1
        le += u <= observed
        ge += u >= observed
    return min(Fraction(1), Fraction(2 * min(le, ge), total))


# ------------------------------------------------------------ special functions

@pytest.mark.parametrize("a,b,x", [(0.5, 0.5, 0.3), (2.0, 3.0, 0.7), (50.0, 0.5, 0.99),
                                   (1.4705, 0.5, 0.55), (500.0, 0.5, 0.999), (3.0, 200.0, 0.01)])
def test_betainc_against_scipy(a, b, x):
    assert betainc(a, b, x) == pytest.approx(scipy.special.betainc(a, b, x), rel=1e-10, abs=1e-14)


@pytest.mark.parametrize("df", [1, 2.9411764705882355, 10, 57.3])
@pytest.mark.parametrize("t", [-4.0, -1.5, 0.0, 0.3, 2.0, 7.5])
def test_t_sf_against_scipy(t, df):
    assert t_sf(t, df) == pytest.approx(scipy.stats.t.sf(t, df), rel=1e-9, abs=1e-15)


def test_t_converges_to_normal():
    for t in np.linspace(-4, 4, 81):
        assert abs(t_sf(t, 1000) - norm_sf(t)) < 1e-3


def test_norm_sf():
    assert norm_sf(0.0) == 0.5
    assert norm_sf(1.959963984540054) == pytest.approx(0.025, rel=1e-12)


# -------------------------------------------------------------------- Welch

def test_welch_hand_values():
    r = welch_t_test([1, 2, 3], [2, 4, 6])
    assert r.method is Method.WELCH
    assert r.statistic == pytest.approx(-2 / math.sqrt(5 / 3), abs=1e-12)
    assert r.statistic == pytest.approx(-1.5492, abs=1e-4)
    assert r.detail == pytest.approx(50 / 17, abs=1e-12)
    assert r.p_value == pytest.approx(scipy.stats.t.sf(abs(r.statistic), 50 / 17) * 2, rel=1e-10)


def test_welch_identical_samples():
    r = welch_t_test([1, 5, 2], [1, 5, 2])
    assert r.statistic == 0.0 and r.p_value == 1.0


def test_welch_domain_errors():
    with pytest.raises(StatsError):
        welch_t_test([1], [1, 2])
    with pytest.raises(StatsError):
        welch_t_test([3, 3], [4, 4, 4])
    assert welch_t_test([3, 3, 3], [1, 2, 3]).p_value < 1


@settings(max_examples=100)
@given(st.lists(st.floats(-100, 100), min_size=2, max_size=15),
       st.lists(st.floats(-100, 100), min_size=2, max_size=15))
def test_welch_antisymmetric_and_matches_scipy(a, b):
    if np.var(a) < 1e-6 and np.var(b) < 1e-6:
        return
    ab, ba = welch_t_test(a, b), welch_t_test(b, a)
    assert ab.statistic == pytest.approx(-ba.statistic, rel=1e-12, abs=1e-12)
    assert ab.p_value == pytest.approx(ba.p_value, rel=1e-12)
    ref = scipy.stats.ttest_ind(a, b, equal_var=False)
    assert ab.statistic == pytest.approx(ref.statistic, rel=1e-7, abs=1e-9)
    assert ab.p_value == pytest.approx(ref.pvalue, rel=1e-6, abs=1e-12)


# ------------------------------------------------------------- Mann-Whitney

def test_midranks():
    ranks, ties = midranks([10, 20, 20, 5])
    assert ranks == [2.0, 3.5, 3.5, 1.0]
    assert sorted(ties) == [1, 1, 2]


def test_mwu_exact_small():
    r = mann_whitney_u([1, 2], [3, 4])
    assert r.statistic == 0 and r.detail == 4
    assert r.exact is True
    assert r.p_value == pytest.approx(1 / 3, abs=1e-15)


def test_mwu_identical_with_ties():
    a = [1, 2, 2, 3, 5]
    r = mann_whitney_u(a, a)
    assert r.exact is False
    assert r.statistic == len(a) ** 2 / 2
    assert r.p_value == 1.0


def test_mwu_large_matches_scipy():
    rng = np.random.default_rng(5)
    a, b = rng.normal(size=30).round(1), rng.normal(0.4, size=25).round(1)
    r = mann_whitney_u(a, b)
    ref = scipy.stats.mannwhitneyu(a, b, alternative="two-sided", method="asymptotic")
    assert r.exact is False
    assert r.statistic == ref.statistic
    assert r.p_value == pytest.approx(ref.pvalue, rel=1e-9)


def test_mwu_exact_matches_scipy_exact():
    rng = np.random.default_rng(11)
    for na, nb in [(3, 7), (8, 8), (1, 9), (5, 12)]:
        a, b = rng.normal(size=na), rng.normal(size=nb)
        r = mann_whitney_u(a, b)
        ref = scipy.stats.mannwhitneyu(a, b, alternative="two-sided", method="exact")
        assert r.exact
        assert r.p_value == pytest.approx(ref.pvalue, rel=1e-12)


def test_mwu_brute_force_spot_check():
    a, b = [0.3, 2.5, 1.1], [4.0, 0.2, 3.3, 5.1]
    assert mann_whitney_u(a, b).p_value == float(brute_force_u_pvalue(a, b))


def test_mwu_threshold_configurable():
    a, b = list(range(10)), [x + 0.5 for x in range(10)]
    assert mann_whitney_u(a, b).exact is False          # 100 > 64
    assert mann_whitney_u(a, b, exact_max=100).exact is True


def test_mwu_empty():
    with pytest.raises(StatsError):
        mann_whitney_u([], [1.0])


# ------------------------------------------------------------- Shapiro-Wilk

def test_shapiro_three_points():
    r = shapiro_wilk([1, 2, 3])
    assert r.statistic == pytest.approx(1.0, abs=1e-6)
    assert 0 <= r.p_value <= 1


@pytest.mark.parametrize("sample", [[5, 5, 5, 5], [1, 2], list(range(5001))])
def test_shapiro_domain(sample):
    with pytest.raises(StatsError):
        shapiro_wilk(sample)


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7, 11, 12, 20, 100, 1000, 5000])
def test_shapiro_against_scipy(n):
    rng = np.random.default_rng(n)
    for x in (rng.normal(size=n), rng.exponential(size=n)):
        r = shapiro_wilk(x)
        ref = scipy.stats.shapiro(x)
        assert r.statistic == pytest.approx(ref.statistic, abs=1e-6)
        assert r.p_value == pytest.approx(ref.pvalue, abs=1e-5)


@settings(max_examples=100)
@given(st.lists(st.integers(-50, 50), min_size=3, max_size=40), st.floats(0.1, 100),
       st.floats(-1e3, 1e3))
def test_shapiro_affine_invariance(x, scale, shift):
    if len(set(x)) == 1:
        return
    w = shapiro_wilk(x).statistic
    assert shapiro_wilk([scale * v + shift for v in x]).statistic == pytest.approx(w, abs=1e-9)


# ---------------------------------------------------------------- grouping

def _corpus():
    spec = [
        ("h1", "사랑해 love", Gender.M, Chart.HOT100),
        ("h2", "사랑해 사랑해 love love", Gender.M, Chart.HOT100),
        ("h3", "love you baby", Gender.F, Chart.HOT100),
        ("g1", "나는 너를", Gender.F, Chart.GLOBAL200),
    ]
    return Corpus(tuple(make_song(t, lyr, g, Category.GROUP, c) for t, lyr, g, c in spec))


def test_group_means():
    means = group_means(_corpus())
    assert means[(Chart.HOT100, Gender.M)].kor_ratio == pytest.approx(0.5)
    assert means[(Chart.HOT100, Gender.M)].code_switch_count == pytest.approx(1.0)
    assert means[(Chart.HOT100, Gender.F)].eng_ratio == 1.0
    assert means[(Chart.GLOBAL200, Gender.F)].kor_ratio == 1.0
    assert means[(Chart.GLOBAL200, Gender.M)] is None
    assert len(means) == 4


def test_group_means_two_point():
    s1, s2 = make_song("a", "x"), make_song("b", "y")
    vectors = {s1: FeatureVector(kor_ratio=0.2), s2: FeatureVector(kor_ratio=0.4)}
    means = group_means([s1, s2], by=("gender",), vectors=vectors)
    assert means[(Gender.F,)].kor_ratio == pytest.approx(0.3)
    assert means[(Gender.M,)] is None


def test_compare_identical_groups():
    a = [0.1, 0.3, 0.2, 0.25, 0.4, 0.15]
    cmp = compare_samples(a, list(a), "kor_ratio", ("boys", "girls"))
    assert cmp.welch.p_value == pytest.approx(1.0)
    assert cmp.mannwhitney.p_value == pytest.approx(1.0)
    assert not cmp.significant
    assert cmp.means == (pytest.approx(0.2333333333), pytest.approx(0.2333333333))


def test_decisive_rule():
    rng = np.random.default_rng(3)
    normal_a, normal_b = rng.normal(0, 1, 40), rng.normal(0.8, 1, 40)
    cmp = compare_samples(normal_a, normal_b)
    assert cmp.normal and cmp.decisive is cmp.welch
    assert cmp.significant == (cmp.welch.p_value < 0.05)
    skewed = rng.exponential(size=40) ** 3
    cmp = compare_samples(skewed, normal_b)
    assert not cmp.normal and cmp.decisive is cmp.mannwhitney
    assert cmp.significant == (cmp.mannwhitney.p_value < 0.05)


def test_compare_groups_undersized():
    corpus = _corpus()
    with pytest.raises(StatsError, match="girls"):
        compare_groups(corpus, "kor_ratio",
                       (lambda s: True, lambda s: s.gender == Gender.F and s.chart == Chart.HOT100),
                       labels=("all", "girls"))
    with pytest.raises(ValueError):
        compare_groups(corpus, "nonsense", (lambda s: True, lambda s: True))
