"""Poles of the restriction ``z -> f(zX)`` and their numerical verification.

For a minimal realization, the poles are reciprocals of the nonzero
eigenvalues of ``sum_j X_j (x) A_j``.  Each candidate is checked by fitting
the growth of ``f(zX)`` on small circles around it.
"""

import numpy as np

from ncrealize import MatrixTuple, compile_expr, kalman_minimize, parse
from ncrealize.spectral import restriction_poles, verify_all_poles

rng = np.random.default_rng(1)

r = kalman_minimize(compile_expr(parse("inv(1 - z1)*inv(1 - z1) + inv(1 - 2 z2)"), 2))
X = MatrixTuple.random(rng, 2, 2)
report = restriction_poles(r, X)
print("state dim", r.dim, "level", X.n)
for b in report.blocks:
    print(f"lambda {b.eigenvalue:.4f}  pole {b.pole:.4f}  mult {b.algebraic_multiplicity}  order <= {b.order_bound}")

# %% circle fits: the slope of log peak vs log radius is -order
for v in verify_all_poles(r, X, report):
    print(f"pole {v.pole:.4f}: {v.verdict}, fitted order {v.order}, slope {v.slope:.3f}")
