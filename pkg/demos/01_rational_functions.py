"""Compile a rational expression, minimize it and evaluate it on matrices.

Run with ``python3 demos/01_rational_functions.py``.
"""

import numpy as np

from ncrealize import (
    MatrixTuple,
    compile_expr,
    evaluate,
    interpret,
    is_minimal,
    kalman_minimize,
    parse,
    to_string,
)

rng = np.random.default_rng(0)

# %% parse and compile
# the inverse of 1 - z1 z2 is the free geometric series in the word z1 z2
e = parse("inv(1 - z1*z2) + z2")
print("expression:", to_string(e))
fm = compile_expr(e, d=2)
print("FM realization, state dim", fm.dim)

# %% coefficients agree with the series oracle
series = interpret(e, 2, 6)
for w in [(), (2,), (1, 2), (2, 1), (1, 2, 1, 2)]:
    print(f"coeff {w}: realization {fm.coeff(w):.3f}  oracle {series[w]:.3f}")

# %% minimization
# the result is a descriptor realization; its state carries the constant term,
# so it can be one larger than the FM state
r = kalman_minimize(fm)
print("minimal dim", r.dim, "is minimal:", is_minimal(r).minimal)

# %% evaluation on a pair of 3x3 matrices; compare with a direct formula
X = MatrixTuple.random(rng, 2, 3, 0.3)
X1, X2 = X.mats
direct = np.linalg.inv(np.eye(3) - X1 @ X2) + X2
print("max |f(X) - direct| =", np.abs(evaluate(r, X) - direct).max())
