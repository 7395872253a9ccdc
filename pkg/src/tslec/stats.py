"""Small, dependency-free statistics kernel.

Distribution tails go through the regularized incomplete beta and gamma
functions, evaluated with Lentz's continued-fraction method.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

_EPS = 1e-15
_TINY = 1e-300
_MAX_ITER = 500


@dataclass
class TestResult:
    statistic: float
    p_value: float
    effect_size: Optional[float] = None
    ci_low: Optional[float] = None
    ci_high: Optional[float] = None
    n1: int = 0
    n2: int = 0
    df: Optional[tuple] = None

    __test__ = False  # keep pytest from collecting this class

    def as_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


# --- special functions -------------------------------------------------------

def _betacf(a: float, b: float, x: float) -> float:
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"betacf failed to converge for a={a}, b={b}, x={x}")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    # continued fraction converges fast only on this side of the mean
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def gammainc_upper(s: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(s, x)."""
    if s <= 0:
        raise ValueError("s must be positive")
    if x <= 0:
        return 1.0
    log_front = -x + s * math.log(x) - math.lgamma(s)
    if x < s + 1.0:
        term = total = 1.0 / s
        ap = s
        for _ in range(_MAX_ITER):
            ap += 1.0
            term *= x / ap
            total += term
            if abs(term) < abs(total) * _EPS:
                return max(0.0, 1.0 - total * math.exp(log_front))
        raise ArithmeticError("gamma series failed to converge")
    b = x + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return math.exp(log_front) * h
    raise ArithmeticError("gamma continued fraction failed to converge")


def t_sf_two_sided(t: float, df: float) -> float:
    if math.isinf(t):
        return 0.0
    return min(1.0, betainc(df / 2.0, 0.5, df / (df + t * t)))


def t_cdf(t: float, df: float) -> float:
    tail = 0.5 * t_sf_two_sided(t, df)
    return 1.0 - tail if t >= 0 else tail


def f_sf(f: float, d1: float, d2: float) -> float:
    if f <= 0:
        return 1.0
    if math.isinf(f):
        return 0.0
    return betainc(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f))


def chi2_sf(x: float, df: float) -> float:
    if math.isinf(x):
        return 0.0
    return gammainc_upper(df / 2.0, x / 2.0)


# --- descriptive -------------------------------------------------------------

def mean_std(xs: Sequence[float]) -> tuple[float, Optional[float]]:
    n = len(xs)
    if n == 0:
        raise ValueError("empty sample")
    m = math.fsum(xs) / n
    if n < 2:
        return m, None
    var = math.fsum((x - m) ** 2 for x in xs) / (n - 1)
    return m, math.sqrt(var)


def median(xs: Sequence[float]) -> float:
    s = sorted(xs)
    n = len(s)
    mid = n // 2
    return s[mid] if n % 2 else 0.5 * (s[mid - 1] + s[mid])


def confidence_interval_95(xs: Sequence[float]) -> Optional[tuple[float, float]]:
    if len(xs) < 2:
        return None
    m, s = mean_std(xs)
    half = 1.96 * s / math.sqrt(len(xs))
    return m - half, m + half


def _pooled_sd(n1, s1, n2, s2) -> float:
    return math.sqrt(((n1 - 1) * s1**2 + (n2 - 1) * s2**2) / (n1 + n2 - 2))


def cohens_d_from_stats(m1, s1, n1, m2, s2, n2) -> Optional[float]:
    sp = _pooled_sd(n1, s1, n2, s2)
    if sp == 0:
        return 0.0 if m1 == m2 else None
    return (m1 - m2) / sp


def cohens_d(xs: Sequence[float], ys: Sequence[float]) -> Optional[float]:
    m1, s1 = mean_std(xs)
    m2, s2 = mean_std(ys)
    return cohens_d_from_stats(m1, s1, len(xs), m2, s2, len(ys))


# --- tests -------------------------------------------------------------------

def welch_t_test(xs: Sequence[float], ys: Sequence[float]) -> TestResult:
    n1, n2 = len(xs), len(ys)
    if n1 < 2 or n2 < 2:
        raise ValueError("each sample needs at least two observations")
    m1, s1 = mean_std(xs)
    m2, s2 = mean_std(ys)
    d = cohens_d_from_stats(m1, s1, n1, m2, s2, n2)
    v1, v2 = s1**2 / n1, s2**2 / n2
    se2 = v1 + v2
    if se2 == 0:
        if m1 == m2:
            return TestResult(0.0, 1.0, d, n1=n1, n2=n2)
        return TestResult(math.copysign(math.inf, m1 - m2), 0.0, d, n1=n1, n2=n2)
    t = (m1 - m2) / math.sqrt(se2)
    df = se2**2 / (v1**2 / (n1 - 1) + v2**2 / (n2 - 1))
    return TestResult(t, t_sf_two_sided(t, df), d, n1=n1, n2=n2, df=(df,))


def pearson_r(pairs: Sequence[tuple[float, float]]) -> Optional[TestResult]:
    n = len(pairs)
    if n < 3:
        return None
    xs = [p[0] for p in pairs]
    ys = [p[1] for p in pairs]
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    sxx = math.fsum((x - mx) ** 2 for x in xs)
    syy = math.fsum((y - my) ** 2 for y in ys)
    if sxx == 0 or syy == 0:
        return None
    sxy = math.fsum((x - mx) * (y - my) for x, y in pairs)
    r = max(-1.0, min(1.0, sxy / math.sqrt(sxx * syy)))
    df = n - 2
    if abs(r) == 1.0:
        p = 0.0
    else:
        p = t_sf_two_sided(r * math.sqrt(df / (1.0 - r * r)), df)
    return TestResult(r, p, n1=n, df=(df,))


def one_way_anova(groups: Sequence[Sequence[float]]) -> TestResult:
    k = len(groups)
    if k < 2 or any(len(g) < 2 for g in groups):
        raise ValueError("need >= 2 groups with >= 2 observations each")
    n = sum(len(g) for g in groups)
    grand = math.fsum(math.fsum(g) for g in groups) / n
    means = [math.fsum(g) / len(g) for g in groups]
    ssb = math.fsum(len(g) * (m - grand) ** 2 for g, m in zip(groups, means))
    ssw = math.fsum(math.fsum((x - m) ** 2 for x in g) for g, m in zip(groups, means))
    d1, d2 = k - 1, n - k
    if ssw == 0:
        f = 0.0 if ssb == 0 else math.inf
    else:
        f = (ssb / d1) / (ssw / d2)
    return TestResult(f, f_sf(f, d1, d2), n1=n, df=(d1, d2))


def chi_square_2x2(a: int, b: int, c: int, d: int) -> Optional[TestResult]:
    rows = (a + b, c + d)
    cols = (a + c, b + d)
    if min(rows + cols) <= 0:
        return None
    n = a + b + c + d
    stat = n * (a * d - b * c) ** 2 / (rows[0] * rows[1] * cols[0] * cols[1])
    return TestResult(stat, chi2_sf(stat, 1), n1=n, df=(1,))


def bonferroni(p_values: Sequence[float], alpha: float = 0.05) -> list[tuple[float, bool]]:
    k = len(p_values)
    out = []
    for p in p_values:
        adj = min(1.0, p * k)
        out.append((adj, adj < alpha))
    return out


def sign_test(differences: Sequence[float]) -> TestResult:
    """Exact two-sided binomial sign test; zero differences are dropped."""
    pos = sum(1 for x in differences if x > 0)
    neg = sum(1 for x in differences if x < 0)
    n = pos + neg
    if n == 0:
        return TestResult(0.0, 1.0)
    k = min(pos, neg)
    tail = math.fsum(math.comb(n, i) for i in range(k + 1)) / 2.0**n
    return TestResult(float(pos), min(1.0, 2.0 * tail), n1=pos, n2=neg)
