"""Realizations of an NC function around a matrix centre ``Y`` of level ``m``.

Starting from an FM realization ``(A, B, C, D)`` and ``P = L_A(Y)^{-1}`` the
structured data are the linear maps on ``m x m`` matrices

    bA_j(G) = P (G (x) A_j),
    bB_j(G) = P (G (x) B_j) + P (G (x) A_j) P (Y (x) B),    Y (x) B = sum_k Y_k (x) B_k,

with ``bC = I_m (x) C`` and ``bD = f(Y)``.  At a point ``X`` of level ``s m``

    f(X) = I_s (x) bD + (I_s (x) bC) (I - sum_j bA_j(X_j - I_s (x) Y_j))^{-1} sum_j bB_j(X_j - I_s (x) Y_j),

where each map acts on an ``s x s`` block matrix block by block (ampliation).
Sums, products and inverses keep the maps as composed callables, so nothing
of size ``m^2 dim`` is ever materialised.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, NotInvertibleError, StructuralError
from .fps import INVERSION_TOL, check_word, words_up_to
from .jsonio import SCHEMA, enc_matrix
from .linalg import SINGULARITY_TOL, lu_with_rcond, solve_checked
from .realization import FMRealization, MatrixTuple, _check_point, eval_fm, pencil_apply, to_fm


def _ampliate(phi, G, m, rows, cols):
    # (id_s (x) phi)(sum E_pq (x) G_pq) = sum E_pq (x) phi(G_pq)
    s = G.shape[0] // m
    out = np.zeros((s * rows, s * cols), dtype=complex)
    for p in range(s):
        for q in range(s):
            blk = G[p * m:(p + 1) * m, q * m:(q + 1) * m]
            if np.any(blk):
                out[p * rows:(p + 1) * rows, q * cols:(q + 1) * cols] = phi(blk)
    return out


class MatrixCentreRealization:
    """Abstract matrix-centre realization ``(bA, bB, bC, bD)`` about ``Y``.

    Subclasses supply ``A_map(j, G)`` (``state x state``) and ``B_map(j, G)``
    (``state x m``); ``C`` is ``m x state`` and ``D`` is ``m x m``.
    """

    Y: MatrixTuple
    C: np.ndarray
    D: np.ndarray

    @property
    def m(self):
        return self.Y.n

    @property
    def d(self):
        return self.Y.d

    @property
    def state_dim(self):
        return self.C.shape[1]

    def A_map(self, j, G):
        raise NotImplementedError

    def B_map(self, j, G):
        raise NotImplementedError

    def A_amp(self, j, G):
        """``(id_s (x) bA_j)(G)`` for an ``s m x s m`` matrix ``G``."""
        return _ampliate(lambda g: self.A_map(j, g), G, self.m, self.state_dim, self.state_dim)

    def B_amp(self, j, G):
        return _ampliate(lambda g: self.B_map(j, g), G, self.m, self.state_dim, self.m)

    def __call__(self, X):
        return matcentre_eval(self, X)

    def __repr__(self):
        return f"{type(self).__name__}(d={self.d}, m={self.m}, state_dim={self.state_dim})"


class CentredFM(MatrixCentreRealization):
    """Matrix-centre realization built from an FM realization and a centre ``Y``."""

    def __init__(self, fm: FMRealization, Y: MatrixTuple, tol=SINGULARITY_TOL):
        Y = _check_point(fm, Y)
        self.fm = fm
        self.Y = Y
        m, dim = Y.n, fm.dim
        L = pencil_apply(fm.A, Y)
        fac, rcond = lu_with_rcond(L)
        if m * dim and (fac is None or rcond < tol):
            raise DomainError(f"centre outside the domain: L_A(Y) has rcond={rcond:.3e}", rcond)
        self.rcond = rcond
        self.P = solve_checked(L, np.eye(m * dim, dtype=complex), tol) if m * dim else np.zeros((0, 0), dtype=complex)
        YB = sum(np.kron(Yk, Bk[:, None]) for Yk, Bk in zip(Y.mats, fm.B)) if dim else np.zeros((0, m))
        self._PYB = self.P @ YB
        self.C = np.kron(np.eye(m), fm.C[None, :])
        self.D = eval_fm(fm, Y, tol)

    def A_map(self, j, G):
        return self.P @ np.kron(G, self.fm.A[j])

    def B_map(self, j, G):
        GA = self.P @ np.kron(G, self.fm.A[j])
        return self.P @ np.kron(G, self.fm.B[j][:, None]) + GA @ self._PYB

    def A_amp(self, j, G):
        # block (p, q) of the ampliation is P (G_pq (x) A_j), i.e. (I_s (x) P)(G (x) A_j)
        s = G.shape[0] // self.m
        return np.kron(np.eye(s), self.P) @ np.kron(G, self.fm.A[j])

    def to_dict(self):
        return {
            "schema": SCHEMA,
            "kind": "matrix-centre",
            "d": self.d,
            "m": self.m,
            "state_dim": self.state_dim,
            "centre": self.Y.to_dict(),
            "fm": self.fm.to_dict(),
            "P": enc_matrix(self.P),
            "rcond": self.rcond,
            "D": enc_matrix(self.D),
        }


class _Sum(MatrixCentreRealization):
    def __init__(self, f, g):
        self.f, self.g, self.Y = f, g, f.Y
        self.C = np.concatenate([f.C, g.C], axis=1)
        self.D = f.D + g.D

    def A_map(self, j, G):
        n1, n2 = self.f.state_dim, self.g.state_dim
        out = np.zeros((n1 + n2, n1 + n2), dtype=complex)
        out[:n1, :n1] = self.f.A_map(j, G)
        out[n1:, n1:] = self.g.A_map(j, G)
        return out

    def B_map(self, j, G):
        return np.concatenate([self.f.B_map(j, G), self.g.B_map(j, G)], axis=0)


class _Product(MatrixCentreRealization):
    def __init__(self, f, g):
        self.f, self.g, self.Y = f, g, f.Y
        self.C = np.concatenate([f.C, f.D @ g.C], axis=1)
        self.D = f.D @ g.D

    def A_map(self, j, G):
        n1, n2 = self.f.state_dim, self.g.state_dim
        out = np.zeros((n1 + n2, n1 + n2), dtype=complex)
        out[:n1, :n1] = self.f.A_map(j, G)
        out[:n1, n1:] = self.f.B_map(j, G) @ self.g.C
        out[n1:, n1:] = self.g.A_map(j, G)
        return out

    def B_map(self, j, G):
        return np.concatenate([self.f.B_map(j, G) @ self.g.D, self.g.B_map(j, G)], axis=0)


class _Inverse(MatrixCentreRealization):
    def __init__(self, f, Dinv):
        self.f, self.Y = f, f.Y
        self.Dinv = Dinv
        self.C = Dinv @ f.C
        self.D = Dinv

    def A_map(self, j, G):
        return self.f.A_map(j, G) - self.f.B_map(j, G) @ self.C

    def B_map(self, j, G):
        return -self.f.B_map(j, G) @ self.Dinv


def matcentre_from_fm(r, Y, tol=SINGULARITY_TOL) -> CentredFM:
    """Matrix-centre realization of ``r`` about ``Y``; descriptor inputs are converted to FM first."""
    return CentredFM(to_fm(r), Y if isinstance(Y, MatrixTuple) else MatrixTuple(Y), tol)


def _same_centre(f, g):
    if f.Y.mats.shape != g.Y.mats.shape or not np.array_equal(f.Y.mats, g.Y.mats):
        raise StructuralError("matrix-centre realizations about different centres")


def matcentre_add(f, g) -> MatrixCentreRealization:
    _same_centre(f, g)
    return _Sum(f, g)


def matcentre_mul(f, g) -> MatrixCentreRealization:
    _same_centre(f, g)
    return _Product(f, g)


def matcentre_invert(f, tol=INVERSION_TOL) -> MatrixCentreRealization:
    """Inverse about ``Y``; requires ``bD = f(Y)`` invertible."""
    fac, rcond = lu_with_rcond(f.D)
    if fac is None or rcond <= tol:
        raise NotInvertibleError(f"f(Y) is singular (rcond={rcond:.3e}); not invertible at the centre")
    return _Inverse(f, np.linalg.inv(f.D))


def matcentre_eval(mc: MatrixCentreRealization, X, tol=SINGULARITY_TOL) -> np.ndarray:
    """Evaluate at a level ``s m`` tuple through the centred pencil ``L_bA(X - I_s (x) Y)``."""
    X = X if isinstance(X, MatrixTuple) else MatrixTuple(X)
    m = mc.m
    if X.d != mc.d:
        raise StructuralError(f"point has {X.d} matrices but realization has d={mc.d}")
    if X.n % m:
        raise StructuralError(f"point level {X.n} is not a multiple of the centre level {m}")
    s = X.n // m
    H = X.mats - np.array([np.kron(np.eye(s), Yj) for Yj in mc.Y.mats])
    out = np.kron(np.eye(s), mc.D)
    N = mc.state_dim
    if N == 0:
        return out
    L = np.eye(s * N, dtype=complex)
    rhs = np.zeros((s * N, s * m), dtype=complex)
    for j in range(mc.d):
        if np.any(H[j]):
            L -= mc.A_amp(j, H[j])
            rhs += mc.B_amp(j, H[j])
    sol = solve_checked(L, rhs, tol, what="centred pencil")
    return out + np.kron(np.eye(s), mc.C) @ sol


def tt_term(mc: MatrixCentreRealization, w, H) -> np.ndarray:
    """Taylor-Taylor term ``bC bA_{i1}(H_{i1}) ... bA_{i(k-1)}(H_{i(k-1)}) bB_{ik}(H_{ik})``.

    This is the term indexed by the transposed word ``w^t``; the empty word
    gives ``bD``.
    """
    w = check_word(w, mc.d)
    H = H if isinstance(H, MatrixTuple) else MatrixTuple(H)
    if H.n != mc.m:
        raise StructuralError(f"direction has level {H.n}, centre has level {mc.m}")
    if not w:
        return mc.D.copy()
    out = mc.C
    for i in w[:-1]:
        out = out @ mc.A_map(i - 1, H[i - 1])
    return out @ mc.B_map(w[-1] - 1, H[w[-1] - 1])


def block_corner_point(Y, w, H) -> MatrixTuple:
    """Level ``(k+1) m`` point with ``Y`` on the block diagonal and ``H_{i_p}`` at block ``(p, p+1)`` of slot ``i_p``."""
    Y = Y if isinstance(Y, MatrixTuple) else MatrixTuple(Y)
    H = H if isinstance(H, MatrixTuple) else MatrixTuple(H)
    k, m = len(w), Y.n
    X = np.array([np.kron(np.eye(k + 1), Yj) for Yj in Y.mats])
    for p, i in enumerate(w):
        X[i - 1, p * m:(p + 1) * m, (p + 1) * m:(p + 2) * m] = H[i - 1]
    return MatrixTuple(X)


def tt_term_by_blocks(r, Y, w, H, tol=SINGULARITY_TOL) -> np.ndarray:
    """Independent path: the upper-right ``m x m`` corner of ``f`` at :func:`block_corner_point`."""
    r = to_fm(r)
    Y = Y if isinstance(Y, MatrixTuple) else MatrixTuple(Y)
    w = check_word(w, r.d)
    if not w:
        return eval_fm(r, Y, tol)
    m = Y.n
    F = eval_fm(r, block_corner_point(Y, w, H), tol)
    return F[:m, -m:]


def tt_table(mc, H, up_to):
    return [(w, tt_term(mc, w, H)) for w in words_up_to(mc.d, up_to)]


__all__ = [
    "MatrixCentreRealization",
    "CentredFM",
    "matcentre_from_fm",
    "matcentre_add",
    "matcentre_mul",
    "matcentre_invert",
    "matcentre_eval",
    "tt_term",
    "tt_table",
    "block_corner_point",
    "tt_term_by_blocks",
]
