"""Jointly nilpotent monomial realizations and quasinilpotent realizations of entire series.

The building block is the truncated backward shift ``S_n^* = sum_j E_{j,j+1}``
of size ``n+1``.  For a word ``alpha = i1...in`` the tuple ``T(alpha)`` keeps
the superdiagonal entry ``(j, j+1)`` in slot ``i_j``; with ``b = e_1`` and
``c = e_{n+1}`` it realizes the monomial ``z^alpha``.

Block-diagonal sums of scaled ``T(w)`` then realize any truncated series with
coefficients reproduced exactly (the n-th roots recombine in the n-th power).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .fps import EMPTY, TruncatedSeries, check_word, words_up_to
from .realization import DescriptorRealization, col_norm, row_norm

DIM_CAP = 20000


def truncated_backward_shift(n: int) -> np.ndarray:
    """Integer matrix ``S_n^*`` of size ``n+1`` (ones on the superdiagonal)."""
    return np.eye(n + 1, k=1, dtype=np.int64)


def shift_tuple(alpha, d: int) -> np.ndarray:
    """Integer tuple ``T(alpha)`` of shape ``(d, n+1, n+1)``."""
    alpha = check_word(alpha, d)
    n = len(alpha)
    T = np.zeros((d, n + 1, n + 1), dtype=np.int64)
    for j, letter in enumerate(alpha):
        T[letter - 1, j, j + 1] = 1
    return T


def monomial_realization(alpha, d: int) -> DescriptorRealization:
    """Minimal jointly nilpotent realization ``(T(alpha), e_1, e_{n+1})`` of ``z^alpha``.

    The empty word yields the one-dimensional realization ``(0, 1, 1)`` of the
    constant 1.
    """
    T = shift_tuple(alpha, d)
    n1 = T.shape[1]
    b = np.zeros(n1)
    c = np.zeros(n1)
    b[0] = 1.0
    c[-1] = 1.0
    return DescriptorRealization(T.astype(complex), b, c)


def adjunction_power(A, m: int) -> np.ndarray:
    """``Ad^m(I)`` where ``Ad(X) = sum_j A_j X A_j^*``.

    Integer input stays integer, so identities for ``T(alpha)`` can be
    checked exactly.
    """
    if m < 0:
        raise InputError("m must be non-negative")
    A = np.asarray(A)
    if A.ndim == 2:
        A = A[None]
    X = np.eye(A.shape[1], dtype=A.dtype)
    At = np.conj(np.transpose(A, (0, 2, 1)))
    for _ in range(m):
        X = sum(A[j] @ X @ At[j] for j in range(A.shape[0]))
    return X


@dataclass(frozen=True)
class JSRResult:
    sequence: tuple
    estimate: float
    nilpotent_at: int | None

    def to_dict(self):
        return {"sequence": list(self.sequence), "estimate": self.estimate, "nilpotent_at": self.nilpotent_at}


def joint_spectral_radius(A, max_m: int) -> JSRResult:
    """``rho_m = ||Ad^m(I)||^(1/2m)`` for ``m = 1..max_m``.

    The estimate is ``rho_{max_m}``; once ``Ad^m(I)`` is exactly zero the
    sequence is zero from there on and ``nilpotent_at`` records the first such
    ``m``.
    """
    if max_m < 1:
        raise InputError("max_m must be at least 1")
    A = np.asarray(A)
    if A.ndim == 2:
        A = A[None]
    At = np.conj(np.transpose(A, (0, 2, 1)))
    X = np.eye(A.shape[1], dtype=A.dtype)
    seq = []
    nil_at = None
    for m in range(1, max_m + 1):
        if nil_at is None:
            X = sum(A[j] @ X @ At[j] for j in range(A.shape[0]))
            if not np.any(X):
                nil_at = m
        if nil_at is not None:
            seq.append(0.0)
        else:
            seq.append(float(np.linalg.norm(X, 2)) ** (1.0 / (2 * m)))
    return JSRResult(tuple(seq), seq[-1], nil_at)


@dataclass(frozen=True)
class Block:
    word: tuple
    offset: int
    size: int
    root: complex


@dataclass(frozen=True, eq=False)
class QuasinilpotentRealization:
    """Block-diagonal jointly nilpotent realization reproducing a truncated series.

    ``blocks`` lists every nonzero word with its offset in the state space and
    the n-th root of the coefficient used for that block.
    """

    realization: DescriptorRealization
    degree: int
    blocks: tuple

    @property
    def dim(self):
        return self.realization.dim

    @property
    def d(self):
        return self.realization.d

    def norm(self):
        return row_norm(self.realization.A) if self.d > 1 else float(np.linalg.norm(self.realization.A[0], 2))

    def certificate(self):
        jsr = joint_spectral_radius(self.realization.A, self.degree + 1)
        return {
            "degree": self.degree,
            "dim": self.dim,
            "block_count": len(self.blocks),
            "row_norm": row_norm(self.realization.A),
            "col_norm": col_norm(self.realization.A),
            "predicted_row_norm": predicted_row_norm(self),
            "nilpotency_index": jsr.nilpotent_at,
        }


def _root(a: complex, n: int, branch: int = 0) -> complex:
    # principal n-th root rotated to the requested branch
    return cmath.exp(cmath.log(a) / n) * cmath.exp(2j * cmath.pi * branch / n)


def predicted_row_norm(q: QuasinilpotentRealization) -> float:
    """``d * max_w (n^2 |a_w|)^(1/n)`` over the stored blocks (zero if none)."""
    d = q.d
    vals = [d * (len(b.word) ** 2) ** (1.0 / len(b.word)) * abs(b.root) for b in q.blocks if b.word]
    return max(vals, default=0.0)


def _assemble(d, pieces, a0, dim_cap):
    dim = 1 + sum(len(w) + 1 for w, _ in pieces)
    if dim > dim_cap:
        raise InputError(f"construction needs {dim} states, above the cap {dim_cap}")
    A = np.zeros((d, dim, dim), dtype=complex)
    b = np.zeros(dim, dtype=complex)
    c = np.zeros(dim, dtype=complex)
    b[0] = 1.0
    c[0] = a0
    blocks = [Block(EMPTY, 0, 1, complex(a0))]
    off = 1
    for w, (scale, weight, root) in pieces:
        n = len(w)
        for j, letter in enumerate(w):
            A[letter - 1, off + j, off + j + 1] = scale
        b[off] = weight
        c[off + n] = weight
        blocks.append(Block(w, off, n + 1, root))
        off += n + 1
    return DescriptorRealization(A, b, c), tuple(blocks)


def quasinilpotent_1d(coeffs, branches=None, dim_cap=DIM_CAP) -> QuasinilpotentRealization:
    """Nilpotent realization of ``sum_{n<=N} a_n z^n`` from a coefficient list.

    Block ``n`` is ``(n^2)^(1/n) a_n^(1/n) S_n^*`` with ``b_n = e_1/n`` and
    ``c_n = e_{n+1}/n``; the zeroth block is ``(0, 1, a_0)``.  Zero
    coefficients get no block.  ``branches`` maps ``n`` to the root branch
    index (default principal).
    """
    a = [complex(x) for x in coeffs]
    if not a:
        raise InputError("need at least the constant coefficient")
    branches = branches or {}
    pieces = []
    for n in range(1, len(a)):
        if a[n] == 0:
            continue
        root = _root(a[n], n, branches.get(n, 0))
        pieces.append(((1,) * n, ((n * n) ** (1.0 / n) * root, 1.0 / n, root)))
    r, blocks = _assemble(1, pieces, a[0], dim_cap)
    return QuasinilpotentRealization(r, len(a) - 1, blocks)


def quasinilpotent_nc(f: TruncatedSeries, N: int | None = None, branches=None, dim_cap=DIM_CAP) -> QuasinilpotentRealization:
    """Jointly nilpotent realization of the degree-``N`` truncation of ``f``.

    Block for the word ``w`` (``|w| = n``) is ``d (n^2)^(1/n) a_w^(1/n) T(w)``
    with ``b_w = e_1 / (n sqrt(d)^n)`` and ``c_w = e_{n+1} / (n sqrt(d)^n)``;
    ``b^* A^alpha c`` then telescopes to ``a_alpha``.  ``branches`` maps words
    to root branch indices.
    """
    N = f.degree_bound if N is None else N
    if N > f.degree_bound:
        raise InputError(f"series known to degree {f.degree_bound}, construction asked for {N}")
    d = f.d
    branches = branches or {}
    pieces = []
    for w in words_up_to(d, N):
        if not w:
            continue
        a = f[w]
        if a == 0:
            continue
        n = len(w)
        root = _root(a, n, branches.get(w, 0))
        weight = 1.0 / (n * np.sqrt(d) ** n)
        pieces.append((w, (d * (n * n) ** (1.0 / n) * root, weight, root)))
    r, blocks = _assemble(d, pieces, f[EMPTY], dim_cap)
    return QuasinilpotentRealization(r, N, blocks)


def cauchy_gap(f: TruncatedSeries, N: int, M: int) -> float:
    """``sup_{N < n <= M} d (n^2)^(1/n) max_{|w|=n} |a_w|^(1/n)``: row-norm distance of the degree-N and degree-M constructions."""
    d = f.d
    best = 0.0
    for w, a in f.coeffs.items():
        n = len(w)
        if N < n <= M:
            best = max(best, d * (n * n) ** (1.0 / n) * abs(a) ** (1.0 / n))
    return best
