"""Nilpotent realizations of truncated entire series.

The degree-N truncation of ``e^z`` is realized by a nilpotent matrix whose
size grows like N^2/2.  Its norm stays bounded because the n-th root of 1/n!
decays, so the realizations converge on every disc.
"""

import math

import numpy as np

from ncrealize import MatrixTuple, TruncatedSeries, evaluate, quasinilpotent_1d, quasinilpotent_nc, radius_estimate
from ncrealize.entire import joint_spectral_radius

for N in (5, 10, 20):
    q = quasinilpotent_1d([1 / math.factorial(n) for n in range(N + 1)])
    cert = q.certificate()
    print(f"N={N:2d} dim={q.dim:3d} norm={q.norm():7.3f} nilpotent at {cert['nilpotency_index']}")

# %% the realization evaluates to the Taylor polynomial of exp on a matrix
q = quasinilpotent_1d([1 / math.factorial(n) for n in range(21)])
X = MatrixTuple([np.array([[0.2, 1.0], [0.0, -0.3]])])
taylor = sum(np.linalg.matrix_power(X.mats[0], n) / math.factorial(n) for n in range(21))
print("max |f(X) - Taylor| =", np.abs(evaluate(q.realization, X) - taylor).max())

# %% two variables: a word-weighted series
f = TruncatedSeries.from_function(lambda w: 1 / math.factorial(len(w)) ** 2, 2, 4)
qn = quasinilpotent_nc(f)
jsr = joint_spectral_radius(qn.realization.A, 6)
print("d=2 dim", qn.dim, "rho_m", np.round(jsr.sequence, 3), "nilpotent at", jsr.nilpotent_at)
print("radius estimate of e^z at N=40:", radius_estimate(
    TruncatedSeries(1, 40, {(1,) * n: 1 / math.factorial(n) for n in range(41)})).radius)
