"""Realizations about a matrix centre and Taylor-Taylor terms.

Moving the centre from 0 to a tuple ``Y`` gives a realization whose value at
``X`` equals ``f(X)`` for ``X`` of the size of ``Y``.  The Taylor-Taylor term
for a word is also the top-right block of ``f`` at a block upper-triangular
point.
"""

import numpy as np

from ncrealize import MatrixTuple, compile_expr, parse
from ncrealize.matcentre import matcentre_eval, matcentre_from_fm, tt_term, tt_term_by_blocks
from ncrealize.realization import eval_fm

rng = np.random.default_rng(3)
fm = compile_expr(parse("inv(1 - z1*z2 - z2)"), 2)
Y = MatrixTuple.random(rng, 2, 2, 0.2)
mc = matcentre_from_fm(fm, Y)
print(mc)

X = MatrixTuple.random(rng, 2, 2, 0.2)
print("max |centred(X) - f(X)| =", np.abs(matcentre_eval(mc, X) - eval_fm(fm, X)).max())

H = MatrixTuple.random(rng, 2, 2, 0.5)
for w in [(1,), (1, 2), (2, 2, 1)]:
    a, b = tt_term(mc, w, H), tt_term_by_blocks(fm, Y, w, H)
    print(f"word {w}: |tt - block corner| = {np.abs(a - b).max():.2e}")
