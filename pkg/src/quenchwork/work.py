r"""The work variable as a linear statistic of power traces.

For a dispersion with Fourier content

    eps(theta) = eps0 + sum_r (a_r cos r theta + b_r sin r theta)

the work variable built from a Haar unitary is

    W = sum_r (a_r Re Tr U^r + b_r Im Tr U^r),

centred: the ``N eps0 - E0`` offset is applied only when a distribution is
formed (see :mod:`quenchwork.distribution`).

Coefficients may also be supplied as complex ``alpha_r`` of the form
``sum_r (alpha_r Tr U^r + conj(alpha_r) Tr U^-r)``; they are converted once,
``a_r = 2 Re alpha_r`` and ``b_r = -2 Im alpha_r``, and the conversion is
recorded on the instance.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .sampling import SampleConfig, TraceVector, sample_traces

__all__ = [
    "ModeCoefficients",
    "WorkSampleBatch",
    "MomentEstimate",
    "work_value",
    "work_values",
    "theoretical_variance",
    "skewness_proxy",
    "jackknife_mean",
    "mixed_moment_mc",
    "sample_work",
]


@dataclass(frozen=True)
class ModeCoefficients:
    """Real Fourier data ``(eps0, a, b)`` of a dispersion; ``a[r-1]`` multiplies ``cos r theta``.

    ``alpha_input`` records that the values were converted from complex
    ``alpha_r`` via ``a_r = 2 Re alpha_r``, ``b_r = -2 Im alpha_r``.
    """

    eps0: float
    a: np.ndarray
    b: np.ndarray
    alpha_input: bool = False

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.a, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        if a.size == 0 and b.size == 0:
            a = b = np.zeros(0)
        elif b.size == 0:
            b = np.zeros_like(a)
        elif a.size == 0:
            a = np.zeros_like(b)
        if a.shape != b.shape or a.ndim != 1:
            raise ValueError(f"a and b must have equal length, got {a.shape} and {b.shape}")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and np.isfinite(self.eps0)):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "eps0", float(self.eps0))

    @classmethod
    def from_alpha(cls, alpha, eps0=0.0):
        """Build from complex ``alpha_r`` (the ``Tr U^r`` weights)."""
        alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
        return cls(eps0=eps0, a=2.0 * alpha.real, b=-2.0 * alpha.imag, alpha_input=True)

    @classmethod
    def from_modes(cls, modes, alpha, eps0=0.0):
        """Real weights ``alpha`` placed on the listed harmonics, ``a_r = 2 alpha_r``.

        ``from_modes([2, 4], [x, y])`` puts ``a_2 = 2x``, ``a_4 = 2y`` and zeros elsewhere.
        """
        modes = np.asarray(modes, dtype=int)
        full = np.zeros(int(modes.max()), dtype=complex)
        full[modes - 1] = np.asarray(alpha, dtype=float)
        return cls.from_alpha(full, eps0=eps0)

    @property
    def m(self):
        return len(self.a)

    @property
    def alpha(self):
        return 0.5 * (self.a - 1j * self.b)

    def __add__(self, other):
        m = max(self.m, other.m)
        a = np.zeros(m)
        b = np.zeros(m)
        for c in (self, other):
            a[: c.m] += c.a
            b[: c.m] += c.b
        return ModeCoefficients(self.eps0 + other.eps0, a, b)

    def dispersion(self, theta):
        """Evaluate ``eps(theta)`` on an array of angles."""
        theta = np.asarray(theta, dtype=float)
        out = np.full(theta.shape, self.eps0)
        for r in range(1, self.m + 1):
            if self.a[r - 1]:
                out += self.a[r - 1] * np.cos(r * theta)
            if self.b[r - 1]:
                out += self.b[r - 1] * np.sin(r * theta)
        return out

    def to_json(self):
        return {"eps0": self.eps0, "a": self.a.tolist(), "b": self.b.tolist(),
                "converted_from_alpha": self.alpha_input}

    @classmethod
    def from_json(cls, data):
        if "alpha_re" in data or "alpha_im" in data:
            re = np.asarray(data.get("alpha_re", []), dtype=float)
            im = np.asarray(data.get("alpha_im", np.zeros_like(re)), dtype=float)
            if re.size == 0:
                re = np.zeros_like(im)
            return cls.from_alpha(re + 1j * im, eps0=data.get("eps0", 0.0))
        return cls(eps0=data.get("eps0", 0.0), a=data.get("a", []), b=data.get("b", []),
                   alpha_input=bool(data.get("converted_from_alpha", False)))


@dataclass(frozen=True)
class WorkSampleBatch:
    values: np.ndarray
    config: SampleConfig
    coefficients: ModeCoefficients

    def __post_init__(self):
        if len(self.values) != self.config.n_samples:
            raise ValueError("batch length does not match config.n_samples")


@dataclass(frozen=True)
class MomentEstimate:
    value: complex
    se: float
    n: int

    def within(self, target, n_se=3.0):
        return abs(self.value - target) <= n_se * self.se


def _trace_array(traces):
    if isinstance(traces, TraceVector):
        return traces.values
    return np.asarray(traces)


def work_value(traces, coeffs):
    """``sum_{r<=m} (a_r Re T_r + b_r Im T_r)`` for a single trace vector."""
    t = _trace_array(traces)
    if t.ndim != 1:
        raise ValueError("work_value takes a single trace vector; use work_values for batches")
    if len(t) < coeffs.m:
        raise ValueError(f"need {coeffs.m} traces, got {len(t)}")
    t = t[: coeffs.m]
    return float(np.dot(coeffs.a, t.real) + np.dot(coeffs.b, t.imag))


def work_values(traces, coeffs):
    """Vectorised :func:`work_value` over rows of an ``(n, m')`` trace array."""
    t = np.asarray(traces)
    if t.shape[-1] < coeffs.m:
        raise ValueError(f"need {coeffs.m} traces per sample, got {t.shape[-1]}")
    t = t[..., : coeffs.m]
    return t.real @ coeffs.a + t.imag @ coeffs.b


def theoretical_variance(coeffs):
    """Gaussian-core variance ``(1/2) sum_r r (a_r^2 + b_r^2)``."""
    r = np.arange(1, coeffs.m + 1)
    return 0.5 * float(np.sum(r * (coeffs.a**2 + coeffs.b**2)))


def skewness_proxy(coeffs):
    """Return ``(S_m, T_m, T_m / S_m**1.5)``.

    ``S_m = sum r (a_r^2 + b_r^2)`` and ``T_m = sum r^{3/2} (|a_r|^3 + |b_r|^3)``;
    the ratio is a dimensionless stand-in for the size of the cubic cumulant.
    """
    r = np.arange(1, coeffs.m + 1)
    s = float(np.sum(r * (coeffs.a**2 + coeffs.b**2)))
    t = float(np.sum(r**1.5 * (np.abs(coeffs.a) ** 3 + np.abs(coeffs.b) ** 3)))
    if s == 0.0:
        raise ValueError("S_m = 0: skewness proxy undefined for all-zero coefficients")
    return s, t, t / s**1.5


def jackknife_mean(x):
    """Mean of ``x`` and its delete-one jackknife standard error (real or complex)."""
    x = np.asarray(x)
    n = len(x)
    if n < 2:
        raise ValueError("jackknife needs at least two samples")
    loo = (x.sum() - x) / (n - 1)
    centre = loo.mean()
    se = np.sqrt((n - 1) / n * np.sum(np.abs(loo - centre) ** 2))
    return x.mean(), float(se)


def mixed_moment_mc(batch, powers: Sequence[tuple[int, bool]], threads=1):
    """Monte Carlo estimate of ``E prod T_r`` (or ``conj(T_r)`` when flagged).

    Parameters
    ----------
    batch : SampleConfig or array_like, shape (n, m)
        Either a sampling configuration or already-drawn trace vectors.
    powers : sequence of (r, conjugated)
        ``[(2, False), (2, False), (2, True), (2, True)]`` is ``E |T_2|^4``.

    Returns
    -------
    MomentEstimate
        Sample mean of the product with its jackknife standard error.
    """
    if isinstance(batch, SampleConfig):
        traces = sample_traces(batch, threads=threads)
    else:
        traces = np.asarray(batch)
    n = len(traces)
    if n < 1000:
        raise ValueError(f"mixed moments need n >= 1000 samples, got {n}")
    prod = np.ones(n, dtype=complex)
    for r, conj in powers:
        if not 1 <= r <= traces.shape[1]:
            raise ValueError(f"power {r} not available (max {traces.shape[1]})")
        col = traces[:, r - 1]
        prod *= np.conj(col) if conj else col
    value, se = jackknife_mean(prod)
    return MomentEstimate(value=complex(value), se=se, n=n)


def sample_work(config, coeffs, threads=1):
    """Draw ``config.n_samples`` work values for ``coeffs``."""
    if config.max_power < coeffs.m:
        raise ValueError(f"config.max_power={config.max_power} < number of modes {coeffs.m}")
    traces = sample_traces(config, threads=threads)
    return WorkSampleBatch(values=work_values(traces, coeffs), config=config, coefficients=coeffs)
