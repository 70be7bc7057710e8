"""
From characteristic function to work density
============================================

Invert the Toeplitz chi by a chirp-z sum and compare against the Gaussian
reference and a Monte Carlo histogram.
"""

import numpy as np

from quenchwork.distribution import (
    default_u_grid,
    density_cdf,
    gaussian_reference,
    invert_charfn,
    ks_distance,
    mc_density,
)
from quenchwork.sampling import SampleConfig
from quenchwork.toeplitz import charfn_toeplitz
from quenchwork.work import ModeCoefficients, sample_work, theoretical_variance

coeffs = ModeCoefficients.from_alpha([1.0, 0.7, 0.5])
sigma = np.sqrt(theoretical_variance(coeffs))
table = charfn_toeplitz(coeffs, 0.0, default_u_grid(sigma, 1025), n=80)
dens = invert_charfn(table, w_points=512, w_span=16 * sigma)
print(f"mass defect {dens.norm_defect:.1e}, variance {dens.variance():.4f}")

ref = gaussian_reference(coeffs, e0=0.0, n=80, w=dens.w)
print(f"max |p - gaussian| / peak = {np.abs(dens.p - ref.p).max() / ref.p.max():.2e}")

batch = sample_work(SampleConfig(80, 3, 1000, seed=4), coeffs)
hist = mc_density(batch)
print(f"histogram: {len(hist.w)} FD bins of width {hist.dw:.3f}")
print(f"KS distance {ks_distance(batch.values, density_cdf(dens)):.4f}"
      f" (95% band {1.63 / np.sqrt(1000):.4f})")

# a few points of the density
for i in range(0, 512, 64):
    print(f"w={dens.w[i]:+7.2f}  p={dens.p[i]:.5f}  gaussian={ref.p[i]:.5f}")
