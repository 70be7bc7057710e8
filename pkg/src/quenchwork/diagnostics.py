"""Statistical panels for work and trace samples.

Histograms use the Freedman-Diaconis width ``h = 2 IQR / n^(1/3)`` exactly
(edges start at the sample minimum and step by ``h``).  Q-Q plots use the
plotting positions ``(i - 0.5) / n``.  Kurtosis is reported raw, with the
``sqrt(24/n)`` error bar and the ``6/(n+1)`` small-sample bias quoted
alongside rather than corrected for.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
import scipy.stats

__all__ = [
    "HistogramSpec",
    "QQData",
    "MomentReport",
    "Ellipse",
    "Correlation",
    "fd_bin_width",
    "fd_histogram",
    "qq_normal",
    "moment_report",
    "theory_ellipse",
    "ellipse_coverage",
    "scatter_correlation",
    "CHI2_2DOF_95",
]

CHI2_2DOF_95 = -2.0 * np.log(0.05)


@dataclass(frozen=True)
class HistogramSpec:
    bin_width: float
    edges: np.ndarray
    counts: np.ndarray
    density: np.ndarray


@dataclass(frozen=True)
class QQData:
    theoretical_q: np.ndarray
    empirical_q: np.ndarray
    residuals: np.ndarray

    def slope(self):
        """Least-squares slope of empirical on theoretical quantiles."""
        return float(np.polyfit(self.theoretical_q, self.empirical_q, 1)[0])


@dataclass(frozen=True)
class MomentReport:
    n: int
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float
    se_variance: float
    se_kurtosis: float
    kurtosis_bias_note: float

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class Ellipse:
    """Axis-aligned ellipse ``x^2/sx^2 + y^2/sy^2 = 1`` centred at ``center``."""

    semi_axes: tuple[float, float]
    center: tuple[float, float] = (0.0, 0.0)
    level: float = 0.95

    def contains(self, x, y):
        sx, sy = self.semi_axes
        cx, cy = self.center
        return ((np.asarray(x) - cx) / sx) ** 2 + ((np.asarray(y) - cy) / sy) ** 2 <= 1.0

    def outline(self, points=200):
        t = np.linspace(0.0, 2.0 * np.pi, points)
        return (self.center[0] + self.semi_axes[0] * np.cos(t),
                self.center[1] + self.semi_axes[1] * np.sin(t))


@dataclass(frozen=True)
class Correlation:
    r: float
    se: float
    n: int


def fd_bin_width(samples):
    x = np.asarray(samples, dtype=float)
    q75, q25 = np.percentile(x, [75, 25])
    return 2.0 * (q75 - q25) / len(x) ** (1.0 / 3.0)


def fd_histogram(samples):
    """Normalised histogram on Freedman-Diaconis bins.

    Raises
    ------
    ValueError
        For fewer than two samples or a zero interquartile range.
    """
    x = np.asarray(samples, dtype=float)
    if len(x) < 2:
        raise ValueError("need at least two samples")
    h = fd_bin_width(x)
    if h <= 0:
        raise ValueError("interquartile range is zero; Freedman-Diaconis width undefined")
    lo, hi = x.min(), x.max()
    nbins = max(1, int(np.ceil((hi - lo) / h)))
    edges = lo + h * np.arange(nbins + 1)
    if edges[-1] < hi:
        edges = np.append(edges, edges[-1] + h)
    counts, _ = np.histogram(x, bins=edges)
    density = counts / (len(x) * h)
    return HistogramSpec(bin_width=h, edges=edges, counts=counts, density=density)


def qq_normal(samples, mu=None, sigma=None):
    """Standardised sample quantiles against ``Phi^{-1}((i - 0.5)/n)``.

    ``mu``/``sigma`` default to the sample mean and standard deviation.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    n = len(x)
    if n < 10:
        raise ValueError("Q-Q plot needs n >= 10")
    mu = x.mean() if mu is None else mu
    sigma = x.std(ddof=1) if sigma is None else sigma
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    theo = scipy.stats.norm.ppf((np.arange(1, n + 1) - 0.5) / n)
    emp = (x - mu) / sigma
    return QQData(theoretical_q=theo, empirical_q=emp, residuals=emp - theo)


def moment_report(samples):
    x = np.asarray(samples, dtype=float)
    n = len(x)
    if n < 4:
        raise ValueError("moment report needs n >= 4")
    mean = x.mean()
    d = x - mean
    m2 = np.mean(d**2)
    if m2 == 0:
        raise ValueError("zero variance")
    var = d @ d / (n - 1)
    return MomentReport(
        n=n,
        mean=float(mean),
        variance=float(var),
        skewness=float(np.mean(d**3) / m2**1.5),
        excess_kurtosis=float(np.mean(d**4) / m2**2 - 3.0),
        se_variance=float(var * np.sqrt(2.0 / (n - 1))),
        se_kurtosis=float(np.sqrt(24.0 / n)),
        kurtosis_bias_note=6.0 / (n + 1),
    )


def theory_ellipse(r, s, level=0.95, standardized=False):
    """Gaussian-limit contour of ``(Re Tr U^r, Re Tr U^s)``.

    Each coordinate has variance ``r/2`` (resp. ``s/2``) and they are
    uncorrelated, so the ``level`` contour has semi-axes ``sqrt(q r/2)`` and
    ``sqrt(q s/2)`` with ``q`` the chi-square(2) quantile.  In standardised
    coordinates it is a circle of radius ``sqrt(q)``.
    """
    if r < 1 or s < 1:
        raise ValueError("powers must be >= 1")
    q = -2.0 * np.log1p(-level)
    if standardized:
        return Ellipse(semi_axes=(np.sqrt(q), np.sqrt(q)), level=level)
    return Ellipse(semi_axes=(np.sqrt(q * r / 2.0), np.sqrt(q * s / 2.0)), level=level)


def ellipse_coverage(ellipse, x, y):
    """Fraction of points inside and its binomial standard error at the nominal level."""
    inside = ellipse.contains(x, y)
    n = len(inside)
    return float(inside.mean()), float(np.sqrt(ellipse.level * (1 - ellipse.level) / n))


def scatter_correlation(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    if n < 30:
        raise ValueError("correlation needs n >= 30")
    if x.std() == 0 or y.std() == 0:
        raise ValueError("degenerate coordinate: zero variance")
    r = float(np.corrcoef(x, y)[0, 1])
    return Correlation(r=r, se=1.0 / np.sqrt(n), n=n)
