r"""Free-fermion chains: finite-range XX hoppings and the XY quench.

XY conventions (recorded in every output's metadata):

* Bloch vector ``d(k) = (gamma sin k, 0, h - cos k)``, quasiparticle energy
  ``eps(k) = 2 |d(k)|`` (the positive BdG branch).
* Bogoliubov angle ``theta_k = atan2(gamma sin k, h - cos k) / 2``.
* Momentum sector ``k_j = (2j - 1) pi / L``, ``j = 1..L/2`` (antiperiodic).
* Loschmidt amplitude ``G(t) = prod_k [cos(eps_f t) - i sin(eps_f t) cos(2 dtheta_k)]``.
  In this orientation the unquenched state evolves as ``prod_k exp(-i eps_f t)``,
  so the initial energy consistent with it is ``E0 = sum_k eps_i(k)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .distribution import CharfnTable, unwrap_from_origin
from .work import ModeCoefficients

__all__ = [
    "XXChain",
    "QuenchXY",
    "EffectiveDispersion",
    "xx_mode_coefficients",
    "bogoliubov_angle",
    "xy_dispersion",
    "loschmidt_factors",
    "loschmidt_xy_product",
    "block_symbol_check",
    "effective_dispersion",
    "initial_energy",
    "charfn_xy_product",
    "PAULI",
]

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

BRANCHES = ("bdg", "signed")


@dataclass(frozen=True)
class XXChain:
    hoppings: tuple
    mu: float = 0.0

    @property
    def m(self):
        return len(self.hoppings)


@dataclass(frozen=True)
class QuenchXY:
    """Sudden quench ``(gamma_i, h_i) -> (gamma_f, h_f)`` on an even ring of ``L`` sites.

    ``branch="signed"`` switches to the Jordan-Wigner style signed energy
    ``sgn(h - cos k) 2|d(k)|`` with angles on the ``arctan`` branch; it agrees
    with the default whenever both fields exceed 1.
    """

    gamma_i: float
    h_i: float
    gamma_f: float
    h_f: float
    L: int = 200
    branch: str = "bdg"

    def __post_init__(self):
        if self.L < 2 or self.L % 2:
            raise ValueError(f"L must be a positive even integer, got {self.L}")
        if self.branch not in BRANCHES:
            raise ValueError(f"branch must be one of {BRANCHES}")

    @property
    def momenta(self):
        j = np.arange(1, self.L // 2 + 1)
        return (2 * j - 1) * np.pi / self.L

    def metadata(self):
        return {
            "sector": "antiperiodic k_j=(2j-1)pi/L, j=1..L/2",
            "branch": self.branch,
            "loschmidt_orientation": "G(t)=prod[cos(eps_f t) - i sin(eps_f t) cos(2 dtheta)]",
            "e0": "sum_k eps_i(k)",
            "gamma_i": self.gamma_i, "h_i": self.h_i,
            "gamma_f": self.gamma_f, "h_f": self.h_f, "L": self.L,
        }


@dataclass(frozen=True)
class EffectiveDispersion:
    """Fourier data of ``eps~(k) = eps_f(k) cos(2 dtheta_k)``.

    ``alpha_tilde[m]`` holds the coefficient of ``e^{imk}`` for ``m >= 0``;
    negative orders follow from reality.
    """

    alpha_tilde: np.ndarray
    sigma2: float
    threshold: float = 1e-13

    def coefficient(self, m):
        m = np.asarray(m)
        c = self.alpha_tilde[np.abs(m)]
        return np.where(m < 0, np.conj(c), c)

    def mode_coefficients(self, cutoff=1e-12):
        """``ModeCoefficients`` truncated after the last ``|alpha~_m| > cutoff``."""
        mags = np.abs(self.alpha_tilde[1:])
        keep = np.nonzero(mags > cutoff)[0]
        m_star = int(keep[-1]) + 1 if keep.size else 0
        return ModeCoefficients.from_alpha(self.alpha_tilde[1 : m_star + 1],
                                           eps0=float(self.alpha_tilde[0].real))


def xx_mode_coefficients(chain):
    """``a_r = 2 J_r``, ``b_r = 0``, ``eps0 = -mu``."""
    a = 2.0 * np.asarray(chain.hoppings, dtype=float)
    return ModeCoefficients(eps0=-chain.mu, a=a, b=np.zeros_like(a))


def bogoliubov_angle(gamma, h, k):
    """``theta_k = atan2(gamma sin k, h - cos k) / 2``."""
    return 0.5 * np.arctan2(gamma * np.sin(k), h - np.cos(k))


def _bloch(gamma, h, k):
    return np.stack([gamma * np.sin(k), np.zeros_like(k), h - np.cos(k)])


def xy_dispersion(gamma, h, k):
    """Quasiparticle energy ``2 sqrt((h - cos k)^2 + gamma^2 sin^2 k)``."""
    k = np.asarray(k, dtype=float)
    return 2.0 * np.hypot(h - np.cos(k), gamma * np.sin(k))


def _energy_and_cos(q, k):
    eps_f = xy_dispersion(q.gamma_f, q.h_f, k)
    if q.branch == "bdg":
        dtheta = bogoliubov_angle(q.gamma_f, q.h_f, k) - bogoliubov_angle(q.gamma_i, q.h_i, k)
        return eps_f, np.cos(2.0 * dtheta)
    sf = np.where(q.h_f - np.cos(k) < 0, -1.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ti = 0.5 * np.arctan(q.gamma_i * np.sin(k) / (q.h_i - np.cos(k)))
        tf = 0.5 * np.arctan(q.gamma_f * np.sin(k) / (q.h_f - np.cos(k)))
    return sf * eps_f, np.cos(2.0 * (tf - ti))


def loschmidt_factors(q, t, k=None):
    """Per-momentum factors ``cos(eps_f t) - i sin(eps_f t) cos(2 dtheta_k)``."""
    k = q.momenta if k is None else np.asarray(k, dtype=float)
    eps_f, c = _energy_and_cos(q, k)
    x = np.multiply.outer(np.asarray(t, dtype=float), eps_f)
    return np.cos(x) - 1j * np.sin(x) * c


def loschmidt_xy_product(q, t):
    """Loschmidt amplitude ``G(t)`` as a product over the momentum sector."""
    f = loschmidt_factors(q, t)
    return np.prod(f, axis=-1)[()]


def block_symbol_check(q, t, k):
    r"""Both sides of the pair-block determinant identity at one momentum.

    Builds ``Phi(k, t) = (I - C0) + C0 exp(-i H(k) t)`` with
    ``C0 = (I - d_i.sigma / |d_i|) / 2`` for ``k`` and ``-k`` and returns
    ``(det[Phi(k) (+) Phi(-k)], factor(k, t)**2)``.  ``H(k) = -eps_f d_f.sigma/|d_f|``:
    this orientation matches the product formula's ``-i`` convention.
    """
    eye = np.eye(2, dtype=complex)
    blocks = []
    for kk in (k, -k):
        kk = np.array(kk, dtype=float)
        di = _bloch(q.gamma_i, q.h_i, kk)
        df = _bloch(q.gamma_f, q.h_f, kk)
        di_sigma = sum(c * s for c, s in zip(di / np.linalg.norm(di), PAULI))
        df_sigma = sum(c * s for c, s in zip(df / np.linalg.norm(df), PAULI))
        eps_f = 2.0 * np.linalg.norm(df)
        c0 = 0.5 * (eye - di_sigma)
        h = -eps_f * df_sigma
        blocks.append((eye - c0) + c0 @ scipy.linalg.expm(-1j * h * t))
    det_phi = complex(np.linalg.det(scipy.linalg.block_diag(*blocks)))
    factor = complex(loschmidt_factors(q, t, np.array([k]))[0])
    return det_phi, factor**2


def effective_dispersion(q, grid_size=4096, threshold=1e-13):
    """Fourier coefficients of ``eps~(k) = eps_f(k) cos(2 dtheta_k)`` by an ``M``-point DFT."""
    if grid_size < 1024 or grid_size & (grid_size - 1):
        raise ValueError("grid_size must be a power of two >= 1024")
    k = 2.0 * np.pi * np.arange(grid_size) / grid_size
    eps_f, c = _energy_and_cos(q, k)
    coeffs = np.fft.fft(eps_f * c) / grid_size
    alpha = coeffs[: grid_size // 2]
    m = np.arange(len(alpha))
    keep = (np.abs(alpha) > threshold) & (m >= 1)
    sigma2 = 2.0 * float(np.sum(m[keep] * np.abs(alpha[keep]) ** 2))
    return EffectiveDispersion(alpha_tilde=alpha, sigma2=sigma2, threshold=threshold)


def initial_energy(q):
    """``E0 = sum_k eps_i(k)`` over the momentum sector (see module notes)."""
    k = q.momenta
    eps_i = xy_dispersion(q.gamma_i, q.h_i, k)
    if q.branch == "signed":
        eps_i = np.where(q.h_i - np.cos(k) < 0, -1.0, 1.0) * eps_i
    return float(np.sum(eps_i))


def charfn_xy_product(q, u_grid):
    """``chi_W(u) = exp(-i u E0) G(-u)`` from the exact product formula."""
    u = np.asarray(u_grid, dtype=float)
    e0 = initial_energy(q)
    logs = np.log(loschmidt_factors(q, -u)).sum(axis=-1) - 1j * u * e0
    if len(u) > 1:
        logs = logs.real + 1j * unwrap_from_origin(u, logs.imag)
    eps_f, c = _energy_and_cos(q, q.momenta)
    return CharfnTable(u=u, chi=np.exp(logs), method="product", e0_shift=e0,
                       log_chi=logs, center=float(np.sum(eps_f * c) - e0))
