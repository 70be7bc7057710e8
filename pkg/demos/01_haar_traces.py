"""
Traces of powers of Haar unitaries
==================================

Draw CUE matrices, take power traces and look at their second moments.
"""

import numpy as np

from quenchwork.sampling import SampleConfig, sample_haar_unitary, sample_stream, sample_traces

# one matrix, drawn from its own reproducible stream
u = sample_haar_unitary(6, sample_stream(seed=1, index=0))
print("unitarity defect:", np.abs(u.conj().T @ u - np.eye(6)).max())

# E|Tr U^r|^2 grows like r until it saturates at N
for n_dim in (3, 40):
    t = sample_traces(SampleConfig(n_dim, 6, 4000, seed=2))
    second = (np.abs(t) ** 2).mean(axis=0)
    print(f"N={n_dim:3d}  E|T_r|^2 =", np.round(second, 2), " min(r,N) =",
          np.minimum(np.arange(1, 7), n_dim))

# the Gaussian surrogate replaces T_r by independent CN(0, r) draws
s = sample_traces(SampleConfig(1, 6, 4000, seed=2, mode="surrogate"))
print("surrogate E|T_r|^2 =", np.round((np.abs(s) ** 2).mean(axis=0), 2))

# different powers are uncorrelated
t = sample_traces(SampleConfig(40, 3, 4000, seed=3))
print("corr(Re T1, Re T2) =", round(np.corrcoef(t[:, 0].real, t[:, 1].real)[0, 1], 3))
