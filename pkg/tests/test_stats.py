import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from scipy import stats as sps

from tslec import stats

# (distribution, statistic, df) -> upper-tail reference from scipy
QUANTILES = [
    ("t", 2.015, (5,)), ("t", 2.571, (5,)), ("t", 4.032, (5,)),
    ("t", 1.699, (29,)), ("t", 2.045, (29,)), ("t", 3.659, (29,)),
    ("t", 2.002, (58,)), ("t", 3.467, (58,)),
    ("F", 2.683, (3, 116)), ("F", 5.95, (3, 116)),
    ("chi2", 3.841, (1,)), ("chi2", 10.828, (1,)),
]


def _ours(kind, x, df):
    if kind == "t":
        return stats.t_sf_two_sided(x, *df)
    if kind == "F":
        return stats.f_sf(x, *df)
    return stats.chi2_sf(x, *df)


def _ref(kind, x, df):
    if kind == "t":
        return 2 * sps.t.sf(x, *df)
    if kind == "F":
        return sps.f.sf(x, *df)
    return sps.chi2.sf(x, *df)


@pytest.mark.parametrize("kind,x,df", QUANTILES)
def test_reference_quantiles(kind, x, df):
    assert abs(_ours(kind, x, df) - _ref(kind, x, df)) < 1e-4


@given(st.floats(0.01, 1e3), st.floats(0.01, 1e3), st.floats(0.0, 1.0))
def test_betainc_against_scipy(a, b, x):
    from scipy.special import betainc
    assert abs(stats.betainc(a, b, x) - betainc(a, b, x)) < 1e-8


@given(st.floats(0.1, 200), st.floats(0.0, 400))
def test_gammaincc_against_scipy(s, x):
    from scipy.special import gammaincc
    assert abs(stats.gammainc_upper(s, x) - gammaincc(s, x)) < 1e-8


def test_t_cdf():
    assert stats.t_cdf(0.0, 10) == 0.5
    assert stats.t_cdf(2.0, 10) == pytest.approx(sps.t.cdf(2.0, 10), abs=1e-10)
    assert stats.t_cdf(-2.0, 10) == pytest.approx(sps.t.cdf(-2.0, 10), abs=1e-10)


def test_mean_std_examples():
    assert stats.mean_std([1, 2, 3]) == (2.0, 1.0)
    assert stats.mean_std([5, 5, 5, 5]) == (5.0, 0.0)
    assert stats.mean_std([0, 10])[1] == pytest.approx(math.sqrt(50))
    assert stats.mean_std([3]) == (3.0, None)
    assert stats.median([3, 1, 2, 4]) == 2.5


def test_confidence_interval_examples():
    xs = np.random.default_rng(0).normal(size=30)
    xs = (xs - xs.mean()) / xs.std(ddof=1) * 0.841 + 12.825
    lo, hi = stats.confidence_interval_95(list(xs))
    assert (lo, hi) == pytest.approx((12.524, 13.126), abs=1e-3)
    assert stats.confidence_interval_95([2.0] * 5) == (2.0, 2.0)
    lo, hi = stats.confidence_interval_95([-2.0, 2.0, -2.0, 2.0])
    assert (lo, hi) == pytest.approx((-1.96 * math.sqrt(16 / 3) / 2, 1.96 * math.sqrt(16 / 3) / 2))
    assert stats.confidence_interval_95([1.0]) is None


def test_ci_example_n4_sd2():
    xs = [-math.sqrt(3), -math.sqrt(3), math.sqrt(3), math.sqrt(3)]  # mean 0, sd 2
    assert stats.mean_std(xs)[1] == pytest.approx(2.0)
    assert stats.confidence_interval_95(xs) == pytest.approx((-1.96, 1.96))


def test_welch_examples():
    r = stats.welch_t_test([1, 2, 3], [1, 2, 3])
    assert (r.statistic, r.p_value, r.effect_size) == (0.0, 1.0, 0.0)
    r = stats.welch_t_test([1, 2, 3, 4, 5], [2, 3, 4, 5, 6])
    ref = sps.ttest_ind([1, 2, 3, 4, 5], [2, 3, 4, 5, 6], equal_var=False)
    assert r.statistic == pytest.approx(-1.0)
    assert r.p_value == pytest.approx(0.3466, abs=1e-4)
    assert r.p_value == pytest.approx(ref.pvalue, abs=1e-10)
    r = stats.welch_t_test([4.0] * 3, [4.0] * 3)
    assert (r.statistic, r.p_value) == (0.0, 1.0)
    r = stats.welch_t_test([5.0] * 3, [4.0] * 3)
    assert r.statistic == math.inf and r.p_value == 0.0
    with pytest.raises(ValueError):
        stats.welch_t_test([1.0], [1.0, 2.0])


def _standardized(n, mean, sd, seed):
    xs = np.random.default_rng(seed).normal(size=n)
    return list((xs - xs.mean()) / xs.std(ddof=1) * sd + mean)


def test_cohens_d_examples():
    assert stats.cohens_d([1, 2, 3], [1, 2, 3]) == 0.0
    xs, ys = _standardized(30, 1, 1, 0), _standardized(30, 0, 1, 1)
    assert stats.welch_t_test(xs, ys).effect_size == pytest.approx(1.0)
    assert stats.cohens_d_from_stats(12.825, 0.841, 30, 4.477, 0.326, 30) == pytest.approx(13.09, abs=0.05)
    assert stats.cohens_d([1.0, 1.0], [2.0, 2.0]) is None


sample = st.lists(st.floats(-100, 100), min_size=3, max_size=20)


@given(sample, sample)
def test_welch_antisymmetric_and_scale_invariant(xs, ys):
    a = stats.welch_t_test(xs, ys)
    assume(math.isfinite(a.statistic) and a.effect_size is not None)
    assume(stats.mean_std(xs)[1] > 1e-6 and stats.mean_std(ys)[1] > 1e-6)
    b = stats.welch_t_test(ys, xs)
    assert b.statistic == pytest.approx(-a.statistic, rel=1e-9, abs=1e-12)
    assert b.effect_size == pytest.approx(-a.effect_size, rel=1e-9, abs=1e-12)
    assert b.p_value == pytest.approx(a.p_value, rel=1e-9, abs=1e-12)
    c = stats.welch_t_test([3.5 * x for x in xs], [3.5 * y for y in ys])
    assert c.statistic == pytest.approx(a.statistic, rel=1e-9, abs=1e-9)
    assert c.p_value == pytest.approx(a.p_value, rel=1e-9, abs=1e-12)
    assert c.effect_size == pytest.approx(a.effect_size, rel=1e-9, abs=1e-9)
    ref = sps.ttest_ind(xs, ys, equal_var=False)
    assert a.p_value == pytest.approx(ref.pvalue, abs=1e-8)


def test_pearson_examples():
    assert stats.pearson_r([(x, 2 * x + 1) for x in range(10)]).statistic == pytest.approx(1.0)
    assert stats.pearson_r([(x, -x) for x in range(10)]).statistic == pytest.approx(-1.0)
    assert stats.pearson_r([(1, 1), (2, 2)]) is None
    assert stats.pearson_r([(1, 1), (1, 2), (1, 3)]) is None
    rng = np.random.default_rng(0)
    hits = 0
    for _ in range(200):
        pts = list(zip(rng.random(1000), rng.random(1000)))
        hits += abs(stats.pearson_r(pts).statistic) < 0.1
    assert hits / 200 > 0.99


@given(st.lists(st.tuples(st.floats(-50, 50), st.floats(-50, 50)), min_size=4, max_size=30),
       st.floats(0.1, 10), st.floats(-10, 10))
def test_pearson_affine_invariance_and_oracle(pairs, scale, shift):
    r = stats.pearson_r(pairs)
    assume(r is not None)
    xs, ys = zip(*pairs)
    assume(np.std(xs) > 1e-3 and np.std(ys) > 1e-3)
    r2 = stats.pearson_r([(scale * x + shift, y) for x, y in pairs])
    assert r2.statistic == pytest.approx(r.statistic, abs=1e-9)
    ref = sps.pearsonr(xs, ys)
    assert r.statistic == pytest.approx(ref.statistic, abs=1e-9)
    assert r.p_value == pytest.approx(ref.pvalue, abs=1e-6)


def test_anova_examples():
    r = stats.one_way_anova([[1, 2, 3]] * 3)
    assert (r.statistic, r.p_value) == (0.0, 1.0)
    a, b = [1.0, 2.0, 3.0, 4.0], [2.5, 3.5, 4.5, 5.5]
    pooled_t = sps.ttest_ind(a, b, equal_var=True).statistic
    assert stats.one_way_anova([a, b]).statistic == pytest.approx(pooled_t**2)
    groups = [[1, 2, 3, 4], [2, 3, 4, 6], [5, 6, 8, 9]]
    ref = sps.f_oneway(*groups)
    r = stats.one_way_anova(groups)
    assert r.statistic == pytest.approx(ref.statistic) and r.p_value == pytest.approx(ref.pvalue, abs=1e-10)


@given(st.lists(st.lists(st.floats(-20, 20), min_size=2, max_size=8), min_size=2, max_size=5))
def test_anova_f_nonnegative(groups):
    r = stats.one_way_anova(groups)
    assert r.statistic >= 0 and 0 <= r.p_value <= 1


@given(st.floats(0.0, 50.0), st.floats(0.0, 50.0))
def test_f_tail_decreasing(f1, f2):
    lo, hi = sorted((f1, f2))
    assert stats.f_sf(hi, 3, 116) <= stats.f_sf(lo, 3, 116) + 1e-15


def test_chi_square_examples():
    r = stats.chi_square_2x2(25, 25, 25, 25)
    assert (r.statistic, r.p_value) == (0.0, 1.0)
    assert stats.chi_square_2x2(50, 0, 0, 50).statistic == pytest.approx(100.0)
    r = stats.chi_square_2x2(30, 20, 15, 35)
    # hand computation: 100 * (30*35 - 20*15)^2 / (50*50*45*55)
    assert r.statistic == pytest.approx(100 * 750**2 / (50 * 50 * 45 * 55))
    assert r.statistic == pytest.approx(9.09, abs=0.01)
    ref = sps.chi2_contingency([[30, 20], [15, 35]], correction=False)
    assert r.p_value == pytest.approx(ref.pvalue, abs=1e-10)
    assert stats.chi_square_2x2(0, 0, 3, 4) is None


def test_bonferroni_examples():
    assert stats.bonferroni([0.01]) == [(0.01, True)]
    assert stats.bonferroni([0.02] * 3) == [(pytest.approx(0.06), False)] * 3
    assert stats.bonferroni([0.001, 0.9]) == [(0.002, True), (1.0, False)]


def test_sign_test():
    r = stats.sign_test([1.0] * 10)
    assert r.p_value == pytest.approx(2 / 2**10)
    assert r.p_value == pytest.approx(sps.binomtest(10, 10).pvalue)
    diffs = [1] * 18 + [-1] * 7 + [0] * 5
    assert stats.sign_test(diffs).p_value == pytest.approx(sps.binomtest(18, 25).pvalue, abs=1e-12)
    assert stats.sign_test([0, 0]).p_value == 1.0
