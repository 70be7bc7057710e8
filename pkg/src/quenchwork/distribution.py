r"""Work densities: Fourier inversion, Monte Carlo pushforward, Gaussian reference.

The inversion evaluates

    P(w) = (1/2 pi) int exp(-i u w) chi(u) du

with trapezoid weights on a uniform, symmetric ``u`` grid.  The sum is a
chirp-z transform (FFT based), so the output grid is free of the usual
``dw = 2 pi / (M du)`` coupling.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.signal
import scipy.stats

__all__ = [
    "CharfnTable",
    "DensityTable",
    "InversionWarning",
    "unwrap_from_origin",
    "gaussian_charfn",
    "default_u_grid",
    "invert_charfn",
    "mc_density",
    "gaussian_reference",
    "density_cdf",
    "ks_distance",
    "NEGATIVE_TOL",
]

NEGATIVE_TOL = 1e-6
DECAY_TOL = 1e-8
METHODS = ("toeplitz", "product", "mc", "gaussian")


class InversionWarning(UserWarning):
    pass


@dataclass(frozen=True)
class CharfnTable:
    """Characteristic function samples ``chi(u)`` with provenance.

    ``center`` is the mean of the distribution when known (``N eps0 - E0``);
    ``log_chi`` carries a continuous branch of ``log chi`` if the producer
    tracked one.
    """

    u: np.ndarray
    chi: np.ndarray
    method: str
    e0_shift: float = 0.0
    log_chi: np.ndarray | None = None
    center: float | None = None
    zeros: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        u = np.asarray(self.u, dtype=float)
        chi = np.asarray(self.chi, dtype=complex)
        if u.shape != chi.shape or u.ndim != 1:
            raise ValueError("u and chi must be 1-d arrays of equal length")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "chi", chi)


@dataclass(frozen=True)
class DensityTable:
    """Density on a uniform grid; ``norm_defect = sum(p) dw - 1`` after clipping."""

    w: np.ndarray
    p: np.ndarray
    norm_defect: float
    method: str = ""
    clipped_mass: float = 0.0
    decay_warning: bool = False

    @property
    def dw(self):
        return float(self.w[1] - self.w[0])

    def mass(self):
        return float(np.sum(self.p) * self.dw)

    def mean(self):
        return float(np.sum(self.w * self.p) * self.dw / self.mass())

    def variance(self):
        mu = self.mean()
        return float(np.sum((self.w - mu) ** 2 * self.p) * self.dw / self.mass())


def unwrap_from_origin(u, phase):
    """Unwrap ``phase`` along ``u`` outward from the point nearest ``u = 0``."""
    order = np.argsort(u)
    ph = np.asarray(phase, dtype=float)[order]
    i0 = int(np.argmin(np.abs(np.asarray(u)[order])))
    out = np.empty_like(ph)
    out[i0:] = np.unwrap(ph[i0:])
    out[: i0 + 1] = np.unwrap(ph[: i0 + 1][::-1])[::-1]
    result = np.empty_like(out)
    result[order] = out
    return result


def gaussian_charfn(u, variance, mean=0.0):
    """Table for ``exp(i u mean - u^2 variance / 2)``."""
    u = np.asarray(u, dtype=float)
    log_chi = 1j * u * mean - 0.5 * variance * u**2
    return CharfnTable(u=u, chi=np.exp(log_chi), method="gaussian",
                       log_chi=log_chi, center=float(mean))


def default_u_grid(sigma, points=4096):
    """``points`` equispaced values on ``[-8/sigma, 8/sigma]``."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return np.linspace(-8.0 / sigma, 8.0 / sigma, points)


def _estimate_center(table):
    # slope of the phase at u = 0
    if table.log_chi is not None:
        phase = table.log_chi.imag
    else:
        phase = np.unwrap(np.angle(table.chi))
    i0 = int(np.argmin(np.abs(table.u)))
    i1 = min(i0 + 1, len(table.u) - 1)
    return float((phase[i1] - phase[i0]) / (table.u[i1] - table.u[i0]))


def invert_charfn(table, w_points=1024, w_span=None, center=None):
    """Fourier-invert a characteristic function table onto a ``w`` grid.

    Parameters
    ----------
    table : CharfnTable
        Needs a uniform grid symmetric about ``u = 0``.
    w_points : int
        Number of output points.
    w_span : float, optional
        Width of the output grid; defaults to the Nyquist limit ``pi / du``.
    center : float, optional
        Middle of the output grid; defaults to ``table.center`` or, failing
        that, the phase slope of ``chi`` at the origin.

    Returns
    -------
    DensityTable
        Negative ringing above ``-1e-6`` is clipped to zero (recorded in
        ``clipped_mass``); a ``decay_warning`` is set when ``|chi|`` at the
        grid ends exceeds ``1e-8``.
    """
    u, chi = table.u, table.chi
    if len(u) < 3:
        raise ValueError("need at least three u points")
    du = np.diff(u)
    step = du[0]
    if step <= 0 or not np.allclose(du, step, rtol=1e-9, atol=0.0):
        raise ValueError("u grid must be uniform and increasing")
    if not np.isclose(u[0], -u[-1], rtol=0.0, atol=1e-9 * step):
        raise ValueError("u grid must be symmetric about 0")
    if w_span is None:
        w_span = np.pi / step
    if step * w_span > np.pi * (1 + 1e-12):
        raise ValueError(f"w_span={w_span} violates Nyquist: du * w_span must be <= pi")
    decay = max(abs(chi[0]), abs(chi[-1])) > DECAY_TOL
    if decay:
        warnings.warn("characteristic function has not decayed at the grid ends",
                      InversionWarning, stacklevel=2)
    if center is None:
        center = table.center if table.center is not None else _estimate_center(table)

    w0 = center - 0.5 * w_span
    dw = w_span / (w_points - 1)
    weights = np.full(len(u), step)
    weights[0] = weights[-1] = 0.5 * step
    # sum_j g_j exp(-i u_j w_k),  u_j = u_0 + j du,  w_k = w0 + k dw
    g = weights * chi * np.exp(-1j * u * w0)
    ratio = np.exp(-1j * step * dw)
    spectrum = scipy.signal.czt(g, m=w_points, w=ratio, a=1.0)
    p = (np.exp(-1j * u[0] * dw * np.arange(w_points)) * spectrum).real / (2.0 * np.pi)
    w = w0 + dw * np.arange(w_points)

    negative = p < 0
    clipped = float(-np.sum(p[negative]) * dw) + 0.0
    if np.any(p < -NEGATIVE_TOL):
        warnings.warn(f"density has negative values down to {p.min():.3g}",
                      InversionWarning, stacklevel=2)
    p = np.where(negative & (p >= -NEGATIVE_TOL), 0.0, p)
    defect = float(np.sum(p) * dw - 1.0)
    return DensityTable(w=w, p=p, norm_defect=defect, method=table.method,
                        clipped_mass=clipped, decay_warning=bool(decay))


def mc_density(batch, e0_shift=0.0, n_dim=None):
    """Histogram density of ``W + N eps0 - E0`` with Freedman-Diaconis bins.

    ``batch`` is a :class:`~quenchwork.work.WorkSampleBatch` or a plain array
    of (centred) work values; ``n_dim`` supplies ``N`` for the latter.
    """
    from .diagnostics import fd_histogram

    if hasattr(batch, "values"):
        values = np.asarray(batch.values, dtype=float)
        eps0 = batch.coefficients.eps0
        n_dim = batch.config.matrix_dim if n_dim is None else n_dim
    else:
        values = np.asarray(batch, dtype=float)
        eps0 = 0.0
    if len(values) < 100:
        raise ValueError(f"mc_density needs n >= 100 samples, got {len(values)}")
    shift = (n_dim or 0) * eps0 - e0_shift
    hist = fd_histogram(values + shift)
    centres = 0.5 * (hist.edges[:-1] + hist.edges[1:])
    return DensityTable(w=centres, p=hist.density,
                        norm_defect=float(np.sum(hist.density) * hist.bin_width - 1.0),
                        method="mc")


def gaussian_reference(coeffs, e0, n, w=None, w_points=1024, span_sigmas=8.0):
    """Normal density with mean ``N eps0 - E0`` and the Gaussian-core variance."""
    from .work import theoretical_variance

    var = theoretical_variance(coeffs)
    if var <= 0:
        raise ValueError("Gaussian reference needs positive variance")
    mean = n * coeffs.eps0 - e0
    sigma = np.sqrt(var)
    if w is None:
        w = np.linspace(mean - span_sigmas * sigma, mean + span_sigmas * sigma, w_points)
    w = np.asarray(w, dtype=float)
    p = scipy.stats.norm.pdf(w, loc=mean, scale=sigma)
    dw = w[1] - w[0]
    return DensityTable(w=w, p=p, norm_defect=float(np.sum(p) * dw - 1.0), method="gaussian")


def density_cdf(table):
    """CDF of a density table as a callable (trapezoid, linear interpolation)."""
    w, p = table.w, table.p
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (p[1:] + p[:-1]) * np.diff(w))])
    cum /= cum[-1]

    def cdf(x):
        return np.interp(x, w, cum, left=0.0, right=1.0)

    return cdf


def ks_distance(samples, cdf):
    """Kolmogorov-Smirnov distance between a sample and a CDF callable."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = len(x)
    f = cdf(x)
    upper = np.arange(1, n + 1) / n - f
    lower = f - np.arange(n) / n
    return float(max(upper.max(), lower.max()))
