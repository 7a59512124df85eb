"""Correlation and two-predictor OLS with an F-test.

Implements exactly the analysis the benchmark module reports: pairwise
Pearson correlations, ordinary least squares of the response on two
predictors plus an intercept, the overall F statistic

    F = (R^2 / 2) / ((1 - R^2) / (n - 3)),

its p-value from the F distribution via the regularized incomplete beta
function (computed here with the standard continued-fraction expansion), and
adjusted R^2 = 1 - (1 - R^2)(n - 1)/(n - 3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class CollinearityError(ValueError):
    """The design matrix is rank-deficient (predictors are collinear)."""


def pearson_r(x, y) -> float:
    """Sample Pearson correlation; errors on zero-variance input."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("pearson_r needs two equal-length vectors")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = float(np.dot(dx, dx))
    sy = float(np.dot(dy, dy))
    if sx == 0.0 or sy == 0.0:
        raise ValueError("pearson_r is undefined for a zero-variance vector")
    return float(np.dot(dx, dy) / math.sqrt(sx * sy))


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz method)."""
    max_iterations = 300
    eps = 3e-16
    fpmin = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < fpmin:
        d = fpmin
    d = 1.0 / d
    h = d
    for m in range(1, max_iterations + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            break
    return h


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if a <= 0 or b <= 0:
        raise ValueError("shape parameters must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b


def f_survival(f_stat: float, df_num: int, df_den: int) -> float:
    """P(F >= f_stat) for the F distribution with (df_num, df_den) dof."""
    if math.isinf(f_stat):
        return 0.0
    if f_stat <= 0:
        return 1.0
    x = df_den / (df_den + df_num * f_stat)
    return regularized_incomplete_beta(df_den / 2.0, df_num / 2.0, x)


@dataclass
class RegressionReport:
    """Log-scale correlation and regression summary for timed query records."""

    n: int
    r_size_time: float
    r_return_time: float
    r_size_return: float
    intercept: float
    beta_size: float
    beta_return: float
    r_squared: float
    adj_r_squared: float
    f_stat: float
    df: tuple[int, int]
    p_value: float

    @property
    def p_display(self) -> str:
        if self.p_value < 1e-12:
            return "< 1e-12"
        return format(self.p_value, ".4g")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "pearson_r": {
                "log_size_vs_log_time": self.r_size_time,
                "log_return_vs_log_time": self.r_return_time,
                "log_size_vs_log_return": self.r_size_return,
            },
            "ols": {
                "intercept": self.intercept,
                "beta_size": self.beta_size,
                "beta_return": self.beta_return,
            },
            "r_squared": self.r_squared,
            "adj_r_squared": self.adj_r_squared,
            "f_stat": self.f_stat,
            "df": list(self.df),
            "p_value": self.p_value,
            "p_display": self.p_display,
        }

    def to_text(self) -> str:
        lines = [
            f"n = {self.n}",
            f"Pearson r (log size, log time)   = {self.r_size_time:.4f}",
            f"Pearson r (log return, log time) = {self.r_return_time:.4f}",
            f"Pearson r (log size, log return) = {self.r_size_return:.4f}",
            "log time ~ intercept + b_size*log size + b_return*log return",
            f"  intercept = {self.intercept:.6f}",
            f"  b_size    = {self.beta_size:.6f}",
            f"  b_return  = {self.beta_return:.6f}",
            f"F = {self.f_stat:.4g}, df = [{self.df[0]}, {self.df[1]}], "
            f"p = {self.p_display}, Adj R^2 = {self.adj_r_squared:.4f}",
        ]
        return "\n".join(lines)


def fit_two_predictor(x1, x2, y) -> RegressionReport:
    """OLS of y on [1, x1, x2]; all correlation/fit numbers in one report.

    Raises :class:`CollinearityError` when the design matrix is singular and
    ValueError when the response has no variance.
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(y)
    if n < 4:
        raise ValueError(f"need at least 4 observations, got {n}")
    design = np.column_stack([np.ones(n), x1, x2])
    if np.linalg.matrix_rank(design) < 3:
        raise CollinearityError("predictors are collinear (design matrix is singular)")
    coef, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    fitted = design @ coef
    residual = y - fitted
    sst = float(np.sum((y - y.mean()) ** 2))
    if sst == 0.0:
        raise ValueError("response has zero variance")
    ssr = float(np.sum(residual**2))
    r_squared = 1.0 - ssr / sst
    df = (2, n - 3)
    if r_squared >= 1.0:
        f_stat = math.inf
    else:
        f_stat = (r_squared / 2.0) / ((1.0 - r_squared) / (n - 3))
    p_value = f_survival(f_stat, *df)
    adj = 1.0 - (1.0 - r_squared) * (n - 1) / (n - 3)
    return RegressionReport(
        n=n,
        r_size_time=pearson_r(x1, y),
        r_return_time=pearson_r(x2, y),
        r_size_return=pearson_r(x1, x2),
        intercept=float(coef[0]),
        beta_size=float(coef[1]),
        beta_return=float(coef[2]),
        r_squared=r_squared,
        adj_r_squared=adj,
        f_stat=f_stat,
        df=df,
        p_value=p_value,
    )
