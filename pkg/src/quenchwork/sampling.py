r"""Haar unitaries on U(N) and Gaussian surrogates for their power traces.

Every sample ``i`` draws from its own generator seeded by ``(seed, i)``, so a
batch is a pure function of ``(seed, N, m, n)``; the number of worker threads
only changes scheduling, never the samples themselves.

The surrogate replaces ``Tr U^r`` by independent draws from CN(0, r): real and
imaginary parts independent, each of variance ``r/2``.
"""
from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._errors import NumericalError

__all__ = [
    "SampleMode",
    "SampleConfig",
    "TraceVector",
    "sample_stream",
    "sample_haar_unitary",
    "traces_of_powers",
    "sample_surrogate_traces",
    "sample_traces",
    "UNITARITY_TOL",
]

UNITARITY_TOL = 1e-10

# samples per batched QR call
_CHUNK = 256


class SampleMode(str, enum.Enum):
    HAAR = "haar"
    SURROGATE = "surrogate"


@dataclass(frozen=True)
class SampleConfig:
    """Size and seed of a trace-sampling run."""

    matrix_dim: int
    max_power: int
    n_samples: int
    seed: int = 0
    mode: SampleMode = SampleMode.HAAR

    def __post_init__(self):
        for name in ("matrix_dim", "max_power", "n_samples"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        object.__setattr__(self, "mode", SampleMode(self.mode))


@dataclass(frozen=True)
class TraceVector:
    """``values[r-1] = Tr U^r`` for ``r = 1..m`` of one sample."""

    values: np.ndarray
    matrix_dim: int

    def __len__(self):
        return len(self.values)


def sample_stream(seed, index):
    """Independent generator for sample ``index`` of the run seeded by ``seed``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


def _ginibre(n, rng):
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)


def _haar_from_ginibre(z):
    # works on stacks (..., N, N): Q with columns rotated by phase(diag R)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    phase = d / np.abs(d)
    return q * phase[..., None, :]


def sample_haar_unitary(n, stream):
    """Draw an ``n x n`` Haar-distributed unitary.

    Parameters
    ----------
    n : int
        Matrix dimension, ``n >= 1``.
    stream : numpy.random.Generator
        Source of randomness.

    Returns
    -------
    U : ndarray, shape (n, n), complex
    """
    if n < 1:
        raise ValueError(f"matrix dimension must be >= 1, got {n}")
    return _haar_from_ginibre(_ginibre(n, stream))


def _power_sums(eigs, m):
    # eigs: (..., N) -> (..., m) with column r-1 = sum_j eigs_j**r
    out = np.empty(eigs.shape[:-1] + (m,), dtype=complex)
    power = np.ones_like(eigs)
    for r in range(m):
        power = power * eigs
        out[..., r] = power.sum(axis=-1)
    return out


def _product_traces(u, m):
    # Tr U^(a+b) = sum(U^a * (U^b)^T); needs only ceil(m/2) - 1 products
    half = (m + 1) // 2
    powers = [u]
    for _ in range(half - 1):
        powers.append(powers[-1] @ u)
    out = np.empty(u.shape[:-2] + (m,), dtype=complex)
    for r in range(1, m + 1):
        a, b = (r + 1) // 2, r // 2
        if b == 0:
            out[..., r - 1] = np.trace(powers[a - 1], axis1=-2, axis2=-1)
        else:
            out[..., r - 1] = np.einsum("...ij,...ji->...", powers[a - 1], powers[b - 1])
    return out


def traces_of_powers(u, m, *, seed=None):
    """Power traces ``(Tr U, ..., Tr U^m)`` from one eigendecomposition.

    ``seed`` is only used to label the error raised if LAPACK fails.
    """
    if m < 1:
        raise ValueError(f"max power must be >= 1, got {m}")
    u = np.asarray(u)
    try:
        eigs = np.linalg.eigvals(u)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"eigendecomposition did not converge (N={u.shape[-1]}, seed={seed})"
        ) from exc
    return TraceVector(values=_power_sums(eigs, m), matrix_dim=u.shape[-1])


def sample_surrogate_traces(m, stream):
    """One surrogate trace vector: ``T_r ~ CN(0, r)`` independently in ``r``."""
    if m < 1:
        raise ValueError(f"max power must be >= 1, got {m}")
    scale = np.sqrt(np.arange(1, m + 1) / 2.0)
    z = stream.standard_normal((2, m))
    return TraceVector(values=scale * (z[0] + 1j * z[1]), matrix_dim=0)


def _haar_chunk(config, start, stop):
    n = config.matrix_dim
    z = np.stack([_ginibre(n, sample_stream(config.seed, i)) for i in range(start, stop)])
    return _product_traces(_haar_from_ginibre(z), config.max_power)


def _surrogate_chunk(config, start, stop):
    return np.stack(
        [sample_surrogate_traces(config.max_power, sample_stream(config.seed, i)).values
         for i in range(start, stop)]
    )


def sample_traces(config, threads=1):
    """Trace vectors for every sample of ``config``.

    Returns
    -------
    T : ndarray, shape (n_samples, max_power), complex
        Row ``i`` holds ``(Tr U_i, ..., Tr U_i^m)`` for sample ``i``.
    """
    worker = _haar_chunk if config.mode is SampleMode.HAAR else _surrogate_chunk
    bounds = [(s, min(s + _CHUNK, config.n_samples)) for s in range(0, config.n_samples, _CHUNK)]
    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda b: worker(config, *b), bounds))
    else:
        parts = [worker(config, *b) for b in bounds]
    return np.concatenate(parts, axis=0)
