r"""Toeplitz determinants of the symbol ``exp(i u eps(theta))``.

``D_N(f)`` is the determinant of the ``N x N`` matrix ``(c_{j-k})`` built from
the Fourier coefficients of ``f``.  By Heine's identity it equals
``E prod_j f(theta_j)`` over Haar eigenangles, so

    chi_W(u) = exp(-i u E0) D_N(exp(i u eps))

is the characteristic function of the work variable shifted by ``N eps0 - E0``.

Dense LU is used throughout; it stays reliable near zeros of ``chi`` where
Levinson-type recursions break down.  For analytic symbols the deviation of
``D_N`` from its strong-Szego limit falls below double precision long before
``N`` reaches a few dozen, so :func:`szego_deviation` evaluates that
deviation separately through the Borodin-Okounkov Fredholm determinant,
where it is available to full relative accuracy.
"""
from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .distribution import CharfnTable, unwrap_from_origin
from .work import theoretical_variance

__all__ = [
    "SymbolTable",
    "ToeplitzResult",
    "default_grid_size",
    "symbol_from_dispersion",
    "toeplitz_determinant",
    "charfn_toeplitz",
    "szego_asymptote",
    "szego_relative_deviation",
    "szego_deviation",
    "log_charfn_curvature",
]

MIN_GRID = 4096


def _next_pow2(n):
    return 1 << max(0, int(np.ceil(np.log2(max(n, 1)))))


def default_grid_size(m, n):
    """``max(4096, 16 m, 8 N)`` rounded up to a power of two."""
    return _next_pow2(max(MIN_GRID, 16 * m, 8 * n))


@dataclass(frozen=True)
class SymbolTable:
    """Symbol samples on ``M`` uniform angles and their DFT coefficients.

    ``fourier[k]`` (numpy FFT ordering) is ``c_k`` for ``0 <= k < M/2`` and
    ``c_{k-M}`` above; use :meth:`coefficient` for signed indices.
    """

    grid_size: int
    theta: np.ndarray
    values: np.ndarray
    fourier: np.ndarray

    @property
    def kmax(self):
        return self.grid_size // 2 - 1

    def coefficient(self, k):
        k = np.asarray(k)
        if np.any(np.abs(k) > self.kmax):
            raise ValueError(f"|k| must be <= {self.kmax}")
        return self.fourier[k % self.grid_size]

    def reconstruct(self, theta=None):
        """Evaluate the truncated Fourier series ``sum_{|k|<=kmax} c_k e^{ik theta}``."""
        theta = self.theta if theta is None else np.asarray(theta, dtype=float)
        k = np.arange(-self.kmax, self.kmax + 1)
        return np.exp(1j * np.outer(theta, k)) @ self.coefficient(k)


@dataclass(frozen=True)
class ToeplitzResult:
    dim: int
    log_det: complex
    det: complex
    singular: bool = False


def symbol_from_dispersion(coeffs, u, grid_size=MIN_GRID):
    """Tabulate ``exp(i u eps(theta))`` and its Fourier coefficients.

    Raises
    ------
    ValueError
        If ``grid_size`` is not a power of two or is below ``8 m``.
    """
    m = max(coeffs.m, 1)
    if grid_size < 8 * m or grid_size & (grid_size - 1):
        raise ValueError(
            f"grid_size must be a power of two >= 8*m = {8 * m}, got {grid_size}"
        )
    theta = 2.0 * np.pi * np.arange(grid_size) / grid_size
    if u == 0:
        values = np.ones(grid_size, dtype=complex)
        fourier = np.zeros(grid_size, dtype=complex)
        fourier[0] = 1.0
    else:
        values = np.exp(1j * u * coeffs.dispersion(theta))
        fourier = np.fft.fft(values) / grid_size
    return SymbolTable(grid_size=grid_size, theta=theta, values=values, fourier=fourier)


def toeplitz_determinant(sym, n):
    """Determinant of ``(c_{j-k})_{j,k<n}`` by pivoted LU.

    The log-determinant is the sum of the complex logs of the pivots plus
    ``i pi`` per row swap; its imaginary part is only defined mod ``2 pi``.
    An exactly singular matrix gives ``det = 0`` with ``singular=True``.
    """
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    if n - 1 > sym.kmax:
        raise ValueError(f"symbol grid too small for N={n}; need grid_size > {2 * n}")
    k = np.arange(n)
    mat = scipy.linalg.toeplitz(sym.coefficient(k), sym.coefficient(-k))
    with warnings.catch_warnings():
        # exact singularity is reported through the result flag instead
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(mat, check_finite=False)
    pivots = np.diag(lu)
    if np.any(pivots == 0):
        return ToeplitzResult(dim=n, log_det=complex(-np.inf), det=0j, singular=True)
    swaps = int(np.count_nonzero(piv != k))
    log_det = complex(np.sum(np.log(pivots.astype(complex))) + 1j * np.pi * (swaps % 2))
    return ToeplitzResult(dim=n, log_det=log_det, det=complex(np.exp(log_det)))


def charfn_toeplitz(coeffs, e0, u_grid, n, grid_size=None, threads=1):
    """``chi_W(u) = exp(-i u E0) D_N(exp(i u eps))`` on ``u_grid``.

    Returns a :class:`~quenchwork.distribution.CharfnTable` whose ``log_chi``
    has its imaginary part unwrapped continuously away from ``u = 0``; grid
    points where the determinant vanishes are listed in ``zeros`` and break
    the unwrapping there.
    """
    u = np.asarray(u_grid, dtype=float)
    if not np.all(np.isfinite(u)):
        raise ValueError("u grid must be finite")
    grid = grid_size or default_grid_size(coeffs.m, n)

    def one(uu):
        return toeplitz_determinant(symbol_from_dispersion(coeffs, uu, grid), n)

    if threads > 1 and len(u) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, u))
    else:
        results = [one(uu) for uu in u]

    singular = np.array([r.singular for r in results])
    log_d = np.array([r.log_det for r in results])
    log_chi = log_d - 1j * u * e0
    if not singular.any() and len(u) > 1:
        log_chi = log_chi.real + 1j * unwrap_from_origin(u, log_chi.imag)
    chi = np.where(singular, 0j, np.exp(log_chi))
    return CharfnTable(
        u=u,
        chi=chi,
        method="toeplitz",
        e0_shift=float(e0),
        log_chi=log_chi,
        center=n * coeffs.eps0 - e0,
        zeros=u[singular],
    )


def szego_asymptote(coeffs, u, n):
    """Strong-Szego limit ``exp(i u N eps0 - (u^2/4) sum r (a_r^2 + b_r^2))``."""
    return complex(np.exp(1j * u * n * coeffs.eps0 - 0.5 * u**2 * theoretical_variance(coeffs)))


def _exp_series(p, length):
    # coefficients of exp(sum_{k>=1} p[k-1] z^k) up to z^(length-1)
    out = np.zeros(length, dtype=complex)
    out[0] = 1.0
    kp = np.arange(1, len(p) + 1) * np.asarray(p)
    for j in range(1, length):
        kk = min(j, len(p))
        out[j] = np.dot(kp[:kk], out[j - 1 :: -1][:kk]) / j
    return out


def _fredholm_logdet(k):
    # log det(I - K); trace series when K is small keeps relative accuracy
    norm = np.linalg.norm(k, 2)
    if norm < 0.25:
        total = 0j
        power = np.eye(len(k), dtype=complex)
        for j in range(1, 200):
            power = power @ k
            term = np.trace(power) / j
            total -= term
            if abs(term) <= 1e-18 * abs(total):
                break
        return total
    sign, logabs = np.linalg.slogdet(np.eye(len(k)) - k)
    return np.log(sign) + logabs


def szego_relative_deviation(coeffs, u, n, extra=64):
    """Exact ``D_N / szego_asymptote - 1`` for the symbol ``exp(i u eps)``.

    Uses the Borodin-Okounkov identity
    ``D_N(f) = G(f)^N E(f) det(I - Q_N H(b) H(c~) Q_N)`` with
    ``b = f_- / f_+`` and ``c = f_+ / f_-`` from the Wiener-Hopf split of
    ``f``.  The Fourier coefficients of ``b`` and ``c`` come from exact
    power-series recurrences, so super-exponentially small deviations are
    resolved far below machine epsilon.
    """
    if coeffs.m == 0 or u == 0:
        return 0j
    v_plus = 0.5j * u * (coeffs.a - 1j * coeffs.b)  # coefficient of e^{+i r theta}
    v_minus = 0.5j * u * (coeffs.a + 1j * coeffs.b)
    length = n + 2 * extra + 2
    a_ser = _exp_series(-v_plus, length)   # exp(-V_+), powers z^p
    b_ser = _exp_series(v_minus, length)   # exp(V_-), powers z^-q
    c_ser = _exp_series(v_plus, length)    # exp(V_+)
    d_ser = _exp_series(-v_minus, length)  # exp(-V_-)
    idx = np.arange(length)
    # b_j = sum_q A_{j+q} B_q and c_{-j} = sum_p C_p D_{j+p}, for j = 0..length-1
    b_pos = np.array([np.dot(a_ser[j:], b_ser[: length - j]) for j in idx])
    c_neg = np.array([np.dot(d_ser[j:], c_ser[: length - j]) for j in idx])
    j = np.arange(extra)
    hb = b_pos[np.minimum(n + j[:, None] + j[None, :] + 1, length - 1)]
    hc = c_neg[np.minimum(n + j[:, None] + j[None, :] + 1, length - 1)]
    kernel = hb @ hc
    return complex(np.expm1(_fredholm_logdet(kernel)))


def szego_deviation(coeffs, u, n):
    """``|D_N(exp(i u eps)) - szego_asymptote(coeffs, u, N)|`` at full relative accuracy."""
    return abs(szego_asymptote(coeffs, u, n)) * abs(szego_relative_deviation(coeffs, u, n))


def log_charfn_curvature(coeffs, n, step=1e-3, grid_size=None):
    """``-d^2/du^2 log|chi(u)|`` at ``u = 0`` by central differences.

    For ``N >= max r`` this is exactly the work variance.
    """
    table = charfn_toeplitz(coeffs, 0.0, [-step, 0.0, step], n, grid_size=grid_size)
    lr = table.log_chi.real
    return -(lr[0] - 2.0 * lr[1] + lr[2]) / step**2
