"""Descriptor and Fornasini-Marchesini realizations over finite state spaces.

A descriptor realization ``(A, b, c)`` has coefficients ``b^* A^w c`` with
``A^w = A_{i1} ... A_{ik}`` for ``w = i1...ik``, and transfer function

    h(X) = (I_n (x) b)^* L_A(X)^{-1} (I_n (x) c),   L_A(X) = I - sum_j X_j (x) A_j.

An FM realization ``(A, B, C, D)`` has transfer function

    h(X) = D I_n + (I_n (x) C) L_A(X)^{-1} sum_j X_j (x) B_j,

so its coefficients are ``D`` on the empty word and ``C A^{i1...i(k-1)} B_{ik}``
otherwise.  Kronecker products always put the level (matrix-point) factor
first: ``X_j (x) A_j``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NotInvertibleError, StructuralError
from .fps import EMPTY, INVERSION_TOL, TruncatedSeries, check_word, pruned, words_up_to
from .jsonio import SCHEMA, dec_matrices, dec_matrix, dec_scalar, dec_vector, enc_matrix, enc_scalar, enc_vector
from .linalg import SINGULARITY_TOL, krylov_basis, lu_with_rcond, solve_checked


def _as_tuple(mats, name="tuple"):
    a = np.asarray(mats, dtype=complex)
    if a.ndim == 2:
        a = a[None]
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise StructuralError(f"{name} must be a d-tuple of square matrices, got shape {a.shape}")
    return a


@dataclass(frozen=True, eq=False)
class MatrixTuple:
    """A point ``X = (X_1, ..., X_d)`` of n x n complex matrices."""

    mats: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mats", _as_tuple(self.mats, "MatrixTuple"))

    @property
    def d(self):
        return self.mats.shape[0]

    @property
    def n(self):
        return self.mats.shape[1]

    def __getitem__(self, j):
        return self.mats[j]

    def __iter__(self):
        return iter(self.mats)

    def __len__(self):
        return self.d

    @classmethod
    def scalars(cls, *values):
        return cls(np.array(values, dtype=complex).reshape(len(values), 1, 1))

    @classmethod
    def zeros(cls, d, n):
        return cls(np.zeros((d, n, n), dtype=complex))

    @classmethod
    def random(cls, rng, d, n, scale=1.0):
        g = rng.standard_normal((d, n, n)) + 1j * rng.standard_normal((d, n, n))
        return cls(scale * g / np.sqrt(2))

    def __add__(self, other):
        return MatrixTuple(self.mats + other.mats)

    def __sub__(self, other):
        return MatrixTuple(self.mats - other.mats)

    def __mul__(self, z):
        return MatrixTuple(self.mats * z)

    __rmul__ = __mul__

    def similar(self, S):
        """Joint similarity ``S^{-1} X S``."""
        S = np.asarray(S, dtype=complex)
        Si = np.linalg.inv(S)
        return MatrixTuple(np.einsum("ab,jbc,cd->jad", Si, self.mats, S, optimize=True))

    def direct_sum(self, other):
        n, m = self.n, other.n
        out = np.zeros((self.d, n + m, n + m), dtype=complex)
        out[:, :n, :n] = self.mats
        out[:, n:, n:] = other.mats
        return MatrixTuple(out)

    def ampliate(self, s):
        """``I_s (x) X``."""
        return MatrixTuple(np.array([np.kron(np.eye(s), X) for X in self.mats]))

    def monomial(self, w):
        """``X^w = X_{i1} ... X_{ik}`` (identity for the empty word)."""
        out = np.eye(self.n, dtype=complex)
        for i in w:
            out = out @ self.mats[i - 1]
        return out

    def row_norm(self):
        return row_norm(self.mats)

    def to_dict(self):
        return {"schema": SCHEMA, "kind": "tuple", "d": self.d, "n": self.n, "X": [enc_matrix(X) for X in self.mats]}

    @classmethod
    def from_dict(cls, doc):
        try:
            d, n = int(doc["d"]), int(doc["n"])
            return cls(dec_matrices(doc["X"], d, n))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed tuple document: {exc}") from exc


def row_norm(mats) -> float:
    """``sqrt(|| sum X_j X_j^* ||)``, the norm of the row ``[X_1 ... X_d]``."""
    a = _as_tuple(mats)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(np.concatenate(list(a), axis=1), 2))


def col_norm(mats) -> float:
    """``sqrt(|| sum X_j^* X_j ||)``, the norm of the column ``[X_1; ...; X_d]``."""
    a = _as_tuple(mats)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(np.concatenate(list(a), axis=0), 2))


def _word_product(A, w, dim):
    out = np.eye(dim, dtype=complex)
    for i in w:
        out = out @ A[i - 1]
    return out


@dataclass(frozen=True, eq=False)
class DescriptorRealization:
    """``(A, b, c)`` with ``A`` of shape ``(d, dim, dim)``."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=complex)
        if A.ndim != 3 or A.shape[1] != A.shape[2]:
            raise StructuralError(f"A must have shape (d, dim, dim), got {A.shape}")
        b = np.asarray(self.b, dtype=complex).reshape(-1)
        c = np.asarray(self.c, dtype=complex).reshape(-1)
        if b.shape[0] != A.shape[1] or c.shape[0] != A.shape[1]:
            raise StructuralError("b and c must have length dim")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    kind = "descriptor"

    @property
    def d(self):
        return self.A.shape[0]

    @property
    def dim(self):
        return self.A.shape[1]

    def coeff(self, w):
        w = check_word(w, self.d)
        return complex(np.vdot(self.b, _word_product(self.A, w, self.dim) @ self.c))

    def __call__(self, X):
        return eval_descriptor(self, X)

    def series(self, degree_bound):
        return series_from_realization(self, degree_bound)

    def similar(self, S):
        """Realization ``(S A S^{-1}, S^{-*} b, S c)`` with identical coefficients."""
        S = np.asarray(S, dtype=complex)
        Si = np.linalg.inv(S)
        return DescriptorRealization(np.einsum("ab,jbc,cd->jad", S, self.A, Si, optimize=True), Si.conj().T @ self.b, S @ self.c)

    def to_dict(self):
        return {
            "schema": SCHEMA,
            "kind": "descriptor",
            "d": self.d,
            "dim": self.dim,
            "A": [enc_matrix(a) for a in self.A],
            "b": enc_vector(self.b),
            "c": enc_vector(self.c),
        }

    def __repr__(self):
        return f"DescriptorRealization(d={self.d}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class FMRealization:
    """``(A, B, C, D)``: ``A`` is ``(d, dim, dim)``, ``B`` is ``(d, dim)``, ``C`` a row of length dim."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: complex

    def __post_init__(self):
        A = np.asarray(self.A, dtype=complex)
        if A.ndim != 3 or A.shape[1] != A.shape[2]:
            raise StructuralError(f"A must have shape (d, dim, dim), got {A.shape}")
        d, dim = A.shape[0], A.shape[1]
        B = np.asarray(self.B, dtype=complex).reshape(d, dim)
        C = np.asarray(self.C, dtype=complex).reshape(dim)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", complex(self.D))

    kind = "fm"

    @property
    def d(self):
        return self.A.shape[0]

    @property
    def dim(self):
        return self.A.shape[1]

    @classmethod
    def constant(cls, value, d):
        return cls(np.zeros((d, 0, 0)), np.zeros((d, 0)), np.zeros(0), value)

    @classmethod
    def variable(cls, j, d):
        B = np.zeros((d, 1))
        B[j - 1, 0] = 1.0
        return cls(np.zeros((d, 1, 1)), B, np.ones(1), 0.0)

    def coeff(self, w):
        w = check_word(w, self.d)
        if not w:
            return self.D
        return complex(self.C @ _word_product(self.A, w[:-1], self.dim) @ self.B[w[-1] - 1])

    def __call__(self, X):
        return eval_fm(self, X)

    def series(self, degree_bound):
        return series_from_realization(self, degree_bound)

    def similar(self, S):
        S = np.asarray(S, dtype=complex)
        Si = np.linalg.inv(S)
        return FMRealization(np.einsum("ab,jbc,cd->jad", S, self.A, Si, optimize=True), self.B @ S.T, self.C @ Si, self.D)

    def to_dict(self):
        return {
            "schema": SCHEMA,
            "kind": "fm",
            "d": self.d,
            "dim": self.dim,
            "A": [enc_matrix(a) for a in self.A],
            "B": [enc_vector(v) for v in self.B],
            "C": enc_vector(self.C),
            "D": enc_scalar(self.D),
        }

    def __repr__(self):
        return f"FMRealization(d={self.d}, dim={self.dim}, D={self.D:.6g})"


def realization_from_dict(doc):
    try:
        kind, d, dim = doc["kind"], int(doc["d"]), int(doc["dim"])
        A = dec_matrices(doc["A"], d, dim) if dim else np.zeros((d, 0, 0), dtype=complex)
        if kind == "descriptor":
            return DescriptorRealization(A, dec_vector(doc["b"]), dec_vector(doc["c"]))
        if kind == "fm":
            B = np.array([dec_vector(v) for v in doc["B"]], dtype=complex).reshape(d, dim)
            return FMRealization(A, B, dec_vector(doc["C"]), dec_scalar(doc["D"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed realization document: {exc}") from exc
    raise InputError(f"unknown realization kind {kind!r}")


# -- evaluation -------------------------------------------------------------


def _check_point(r, X):
    if not isinstance(X, MatrixTuple):
        X = MatrixTuple(X)
    if X.d != r.d:
        raise StructuralError(f"point has {X.d} matrices but realization has d={r.d}")
    return X


def pencil_apply(A, X) -> np.ndarray:
    """``L_A(X) = I - sum_j X_j (x) A_j`` as an ``(n dim) x (n dim)`` matrix."""
    A = _as_tuple(A, "A")
    X = X if isinstance(X, MatrixTuple) else MatrixTuple(X)
    if X.d != A.shape[0]:
        raise StructuralError(f"point has {X.d} matrices but tuple has d={A.shape[0]}")
    N = X.n * A.shape[1]
    L = np.eye(N, dtype=complex)
    for Xj, Aj in zip(X.mats, A):
        L -= np.kron(Xj, Aj)
    return L


def pencil_rcond(A, X) -> float:
    return lu_with_rcond(pencil_apply(A, X))[1]


def eval_descriptor(r: DescriptorRealization, X, tol=SINGULARITY_TOL) -> np.ndarray:
    X = _check_point(r, X)
    n = X.n
    if r.dim == 0:
        return np.zeros((n, n), dtype=complex)
    Ic = np.kron(np.eye(n), r.c[:, None])
    sol = solve_checked(pencil_apply(r.A, X), Ic, tol)
    return np.kron(np.eye(n), r.b.conj()[None, :]) @ sol


def eval_fm(r: FMRealization, X, tol=SINGULARITY_TOL) -> np.ndarray:
    X = _check_point(r, X)
    n = X.n
    out = r.D * np.eye(n, dtype=complex)
    if r.dim == 0:
        return out
    rhs = sum(np.kron(Xj, Bj[:, None]) for Xj, Bj in zip(X.mats, r.B))
    sol = solve_checked(pencil_apply(r.A, X), rhs, tol)
    return out + np.kron(np.eye(n), r.C[None, :]) @ sol


def evaluate(r, X, tol=SINGULARITY_TOL):
    return eval_fm(r, X, tol) if isinstance(r, FMRealization) else eval_descriptor(r, X, tol)


def coeff(r, w) -> complex:
    return r.coeff(w)


def series_from_realization(r, degree_bound: int) -> TruncatedSeries:
    """All coefficients up to ``degree_bound`` by breadth-first propagation.

    Row vectors ``b^* A^w`` (or ``C A^w``) for the words of one length are
    stacked and multiplied by every ``A_j`` to get the next length, so the
    rows stay in graded-lex order.
    """
    d, dim = r.d, r.dim
    out = []
    if isinstance(r, FMRealization):
        out.append(r.D)
        rows = r.C[None, :]
        for n in range(1, degree_bound + 1):
            out.extend((rows @ r.B.T).reshape(-1))
            if n < degree_bound:
                rows = np.einsum("wk,jkl->wjl", rows, r.A, optimize=True).reshape(rows.shape[0] * d, dim)
    else:
        rows = r.b.conj()[None, :]
        for n in range(degree_bound + 1):
            out.extend(rows @ r.c)
            if n < degree_bound:
                rows = np.einsum("wk,jkl->wjl", rows, r.A, optimize=True).reshape(rows.shape[0] * d, dim)
    return pruned(d, degree_bound, dict(zip(words_up_to(d, degree_bound), out)))


# -- arithmetic -------------------------------------------------------------


def _same_d(r, s):
    if r.d != s.d:
        raise StructuralError(f"realizations over d={r.d} and d={s.d}")


def _block_diag_tuple(A1, A2):
    d, n, m = A1.shape[0], A1.shape[1], A2.shape[1]
    out = np.zeros((d, n + m, n + m), dtype=complex)
    out[:, :n, :n] = A1
    out[:, n:, n:] = A2
    return out


def descriptor_add(r: DescriptorRealization, s: DescriptorRealization) -> DescriptorRealization:
    _same_d(r, s)
    return DescriptorRealization(_block_diag_tuple(r.A, s.A), np.concatenate([r.b, s.b]), np.concatenate([r.c, s.c]))


def descriptor_mul(r: DescriptorRealization, s: DescriptorRealization) -> DescriptorRealization:
    _same_d(r, s)
    A = _block_diag_tuple(r.A, s.A)
    n = r.dim
    for j in range(r.d):
        A[j, :n, n:] = np.outer(r.A[j] @ r.c, s.b.conj())
    b = np.concatenate([r.b, np.vdot(r.c, r.b) * s.b])
    c = np.concatenate([np.zeros(n), s.c])
    return DescriptorRealization(A, b, c)


def descriptor_invert(r: DescriptorRealization, tol=INVERSION_TOL) -> DescriptorRealization:
    s = np.vdot(r.b, r.c)
    if abs(s) <= tol:
        raise NotInvertibleError(f"b*c = {s} vanishes; function is not invertible at 0")
    n, d = r.dim, r.d
    A = np.zeros((d, n + 1, n + 1), dtype=complex)
    for j in range(d):
        Ajc = r.A[j] @ r.c
        A[j, :n, :n] = r.A[j] - np.outer(Ajc, r.b.conj()) / s
        A[j, :n, n] = Ajc / s
    b = np.concatenate([-r.b, [1.0]]) / np.vdot(r.c, r.b)
    c = np.concatenate([np.zeros(n), [1.0]])
    return DescriptorRealization(A, b, c)


def fm_add(r: FMRealization, s: FMRealization) -> FMRealization:
    _same_d(r, s)
    return FMRealization(
        _block_diag_tuple(r.A, s.A),
        np.concatenate([r.B, s.B], axis=1),
        np.concatenate([r.C, s.C]),
        r.D + s.D,
    )


def fm_mul(r: FMRealization, s: FMRealization) -> FMRealization:
    _same_d(r, s)
    n = r.dim
    A = _block_diag_tuple(r.A, s.A)
    for j in range(r.d):
        A[j, :n, n:] = np.outer(r.B[j], s.C)
    B = np.concatenate([r.B * s.D, s.B], axis=1)
    C = np.concatenate([r.C, r.D * s.C])
    return FMRealization(A, B, C, r.D * s.D)


def fm_invert(r: FMRealization, tol=INVERSION_TOL) -> FMRealization:
    D = r.D
    if abs(D) <= tol:
        raise NotInvertibleError(f"D = {D} vanishes; function is not invertible at 0")
    A = np.array([r.A[j] - np.outer(r.B[j], r.C) / D for j in range(r.d)]).reshape(r.A.shape)
    return FMRealization(A, -r.B / D, r.C / D, 1.0 / D)


def fm_scale(r: FMRealization, alpha) -> FMRealization:
    alpha = complex(alpha)
    return FMRealization(r.A, r.B, alpha * r.C, alpha * r.D)


def descriptor_scale(r: DescriptorRealization, alpha) -> DescriptorRealization:
    return DescriptorRealization(r.A, r.b, complex(alpha) * r.c)


# -- conversions and shifts ---------------------------------------------------


def fm_from_descriptor(r: DescriptorRealization) -> FMRealization:
    """Restrict to ``H' = span{A^w c : w != ()}`` with ``B_j = A_j c``, ``C = (P b)^*``, ``D = b^* c``."""
    seeds = [((j + 1,), r.A[j] @ r.c) for j in range(r.d)]
    V, _ = krylov_basis(r.A, seeds)
    A = np.einsum("ka,jkl,lb->jab", V.conj(), r.A, V, optimize=True)
    B = np.array([V.conj().T @ (r.A[j] @ r.c) for j in range(r.d)]).reshape(r.d, V.shape[1])
    C = r.b.conj() @ V
    return FMRealization(A, B, C, np.vdot(r.b, r.c))


def descriptor_from_fm(r: FMRealization) -> DescriptorRealization:
    """Descriptor on ``H (+) C``: ``A_hat_j = [[A_j, B_j], [0, 0]]``, ``b = C^* (+) conj(D)``, ``c = 0 (+) 1``."""
    n, d = r.dim, r.d
    A = np.zeros((d, n + 1, n + 1), dtype=complex)
    A[:, :n, :n] = r.A
    A[:, :n, n] = r.B
    b = np.concatenate([r.C.conj(), [np.conj(r.D)]])
    c = np.concatenate([np.zeros(n), [1.0]])
    return DescriptorRealization(A, b, c)


def shift_realization(r: DescriptorRealization, j: int, side: str = "left") -> DescriptorRealization:
    """Realization of the backward shift of ``r``.

    ``left``: coefficients ``w -> r_{jw}``, realized by ``(A, A_j^* b, c)``.
    ``right``: coefficients ``w -> r_{wj}``, realized by ``(A, b, A_j c)``.
    """
    check_word((j,), r.d)
    if side == "left":
        return DescriptorRealization(r.A, r.A[j - 1].conj().T @ r.b, r.c)
    if side == "right":
        return DescriptorRealization(r.A, r.b, r.A[j - 1] @ r.c)
    raise InputError(f"side must be 'left' or 'right', got {side!r}")


def to_descriptor(r) -> DescriptorRealization:
    return descriptor_from_fm(r) if isinstance(r, FMRealization) else r


def to_fm(r) -> FMRealization:
    return fm_from_descriptor(r) if isinstance(r, DescriptorRealization) else r


def random_descriptor(rng, d, dim, scale=0.5) -> DescriptorRealization:
    """Random complex realization with ``col_norm(A) == scale``."""
    A = rng.standard_normal((d, dim, dim)) + 1j * rng.standard_normal((d, dim, dim))
    if dim:
        A *= scale / col_norm(A)
    b = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    c = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return DescriptorRealization(A, b, c)


def random_fm(rng, d, dim, scale=0.5) -> FMRealization:
    A = rng.standard_normal((d, dim, dim)) + 1j * rng.standard_normal((d, dim, dim))
    if dim:
        A *= scale / col_norm(A)
    B = rng.standard_normal((d, dim)) + 1j * rng.standard_normal((d, dim))
    C = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    D = complex(rng.standard_normal(), rng.standard_normal())
    return FMRealization(A, B, C, D)


__all__ = [
    "EMPTY",
    "MatrixTuple",
    "DescriptorRealization",
    "FMRealization",
    "pencil_apply",
    "pencil_rcond",
    "eval_descriptor",
    "eval_fm",
    "evaluate",
    "coeff",
    "series_from_realization",
    "descriptor_add",
    "descriptor_mul",
    "descriptor_invert",
    "descriptor_scale",
    "fm_add",
    "fm_mul",
    "fm_invert",
    "fm_scale",
    "fm_from_descriptor",
    "descriptor_from_fm",
    "shift_realization",
    "row_norm",
    "col_norm",
    "realization_from_dict",
    "to_descriptor",
    "to_fm",
    "random_descriptor",
    "random_fm",
]
