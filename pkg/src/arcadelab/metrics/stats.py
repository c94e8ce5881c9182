"""Student-t tail probabilities and Welch's unequal-variance t-test."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

_TINY = 1e-300
_EPS = 1e-16


def _beta_cf(a: float, b: float, x: float, max_iter: int = 10_000) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c, d = 1.0, 1.0 - qab * x / qap
    d = 1.0 / (d if abs(d) > _TINY else _TINY)
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > _TINY else _TINY)
        c = 1.0 + aa / c
        c = c if abs(c) > _TINY else _TINY
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > _TINY else _TINY)
        c = 1.0 + aa / c
        c = c if abs(c) > _TINY else _TINY
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    log_front = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x)
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _beta_cf(a, b, x) / a
    return 1.0 - math.exp(log_front) * _beta_cf(b, a, 1.0 - x) / b


def t_cdf(t: float, df: float) -> float:
    """CDF of Student's t with ``df`` (possibly fractional) degrees of freedom."""
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    tail = 0.5 * betainc(df / 2.0, 0.5, df / (df + t * t))
    return 1.0 - tail if t > 0 else tail


def t_two_tailed_p(t: float, df: float) -> float:
    if math.isinf(t):
        return 0.0
    return betainc(df / 2.0, 0.5, df / (df + t * t))


@dataclass(frozen=True)
class WelchResult:
    t: float
    df: float
    p: float
    outcome: str  # a_better | b_better | not_significant


def welch_statistic(a, b) -> tuple[float, float]:
    """Welch t statistic and Welch-Satterthwaite degrees of freedom."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na, nb = a.size, b.size
    va, vb = a.var(ddof=1), b.var(ddof=1)
    sa, sb = va / na, vb / nb
    se2 = sa + sb
    diff = a.mean() - b.mean()
    if se2 == 0.0:
        return (0.0 if diff == 0 else math.copysign(math.inf, diff)), math.inf
    df = se2 * se2 / (sa * sa / (na - 1) + sb * sb / (nb - 1))
    return float(diff / math.sqrt(se2)), float(df)


def welch_test(samples_a, samples_b, confidence: float = 0.99) -> WelchResult:
    """Two-tailed Welch test; significant when p < 1 - confidence."""
    a = np.asarray(samples_a, dtype=np.float64)
    b = np.asarray(samples_b, dtype=np.float64)
    if a.size < 2 or b.size < 2:
        raise ValueError("Welch test needs at least 2 samples per side")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("samples must be finite")
    t, df = welch_statistic(a, b)
    if math.isinf(df):
        # both sides have zero variance
        if t == 0.0:
            return WelchResult(0.0, df, 1.0, "not_significant")
        warnings.warn("zero variance on both sides; deciding by the means alone", RuntimeWarning, stacklevel=2)
        return WelchResult(t, df, 0.0, "a_better" if t > 0 else "b_better")
    p = t_two_tailed_p(t, df)
    if p < 1.0 - confidence:
        outcome = "a_better" if t > 0 else "b_better"
    else:
        outcome = "not_significant"
    return WelchResult(t, df, p, outcome)
