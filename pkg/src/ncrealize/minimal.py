"""Controllable/observable subspaces, Kalman minimization and similarity recovery."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError, StructuralError
from .linalg import RANK_TOL, krylov_basis
from .realization import DescriptorRealization, FMRealization, _word_product, to_descriptor

SIMILARITY_TOL = 1e-7
EPS = np.finfo(float).eps
CHOP_FACTOR = 16.0


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Orthonormal columns ``Q`` spanning a subspace of ``C^ambient_dim``."""

    Q: np.ndarray
    rank_tolerance: float = RANK_TOL
    words: tuple = field(default=())

    @property
    def ambient_dim(self):
        return self.Q.shape[0]

    @property
    def rank(self):
        return self.Q.shape[1]

    def projector(self):
        return self.Q @ self.Q.conj().T

    def is_full(self):
        return self.rank == self.ambient_dim


def controllable_span(A, c, rank_tol=RANK_TOL) -> SubspaceBasis:
    """Orthonormal basis of ``span{A^w c}``.

    ``words[k]`` is the word whose Krylov vector contributed column ``k``.
    """
    A = np.asarray(A, dtype=complex)
    Q, words = krylov_basis(A, [((), np.asarray(c, dtype=complex))], rank_tol)
    return SubspaceBasis(Q, rank_tol, tuple(words))


def observable_span(A, b, rank_tol=RANK_TOL) -> SubspaceBasis:
    """Orthonormal basis of ``span{A^{*w} b}`` (adjoint tuple, seed ``b``)."""
    A = np.asarray(A, dtype=complex)
    Astar = np.conj(np.transpose(A, (0, 2, 1)))
    Q, words = krylov_basis(Astar, [((), np.asarray(b, dtype=complex))], rank_tol)
    return SubspaceBasis(Q, rank_tol, tuple(words))


@dataclass(frozen=True)
class MinimalityReport:
    minimal: bool
    controllable_rank: int
    observable_rank: int
    dim: int

    def __bool__(self):
        return self.minimal

    def to_dict(self):
        return {
            "minimal": self.minimal,
            "controllable_rank": self.controllable_rank,
            "observable_rank": self.observable_rank,
            "dim": self.dim,
        }


def is_minimal(r, rank_tol=RANK_TOL) -> MinimalityReport:
    """Minimal iff both the controllable and the observable spans are the whole state space.

    FM realizations use ``span{A^w B_j}`` and ``span{A^{*w} C^*}``.
    """
    if isinstance(r, FMRealization):
        ctrl = krylov_basis(r.A, [((j + 1,), r.B[j]) for j in range(r.d)], rank_tol)[0].shape[1]
        Astar = np.conj(np.transpose(r.A, (0, 2, 1)))
        obs = krylov_basis(Astar, [((), r.C.conj())], rank_tol)[0].shape[1]
    else:
        ctrl = controllable_span(r.A, r.c, rank_tol).rank
        obs = observable_span(r.A, r.b, rank_tol).rank
    return MinimalityReport(ctrl == r.dim and obs == r.dim, ctrl, obs, r.dim)


@dataclass(frozen=True, eq=False)
class KalmanReport:
    input_dim: int
    controllable_rank: int
    observable_rank: int
    output_dim: int
    Q: np.ndarray

    def to_dict(self):
        return {
            "input_dim": self.input_dim,
            "controllable_rank": self.controllable_rank,
            "observable_rank": self.observable_rank,
            "output_dim": self.output_dim,
        }


def kalman_minimize(r, rank_tol=RANK_TOL, return_report=False):
    """Compress ``r`` to ``M = C_{A,c} (-) (O_{A,b}^perp n C_{A,c})``.

    With ``Q`` an orthonormal basis of ``M`` the output is ``(Q^* A Q, Q^* b, Q^* c)``.
    ``M`` is the part of the controllable space seen by the observable one: the
    row space of ``Vo^* Vc`` pulled back through ``Vc``.  FM inputs are first
    converted to descriptor form.
    """
    r = to_descriptor(r)
    ctrl = controllable_span(r.A, r.c, rank_tol)
    obs = observable_span(r.A, r.b, rank_tol)
    Vc, Vo = ctrl.Q, obs.Q
    if Vc.shape[1] == 0 or Vo.shape[1] == 0:
        Q = np.zeros((r.dim, 0), dtype=complex)
    else:
        K = Vo.conj().T @ Vc
        _, s, Wh = np.linalg.svd(K)
        keep = int(np.sum(s > rank_tol))
        Q = Vc @ Wh[:keep].conj().T
    A0 = np.einsum("ka,jkl,lb->jab", Q.conj(), r.A, Q, optimize=True)
    # entries at the rounding level of the compression are zero: left in, they
    # give a numerically zero map a spurious spectrum and a finite domain
    A0[np.abs(A0) <= CHOP_FACTOR * max(r.dim, 1) * EPS * np.linalg.norm(r.A)] = 0.0
    out = DescriptorRealization(A0, Q.conj().T @ r.b, Q.conj().T @ r.c)
    if return_report:
        return out, KalmanReport(r.dim, ctrl.rank, obs.rank, out.dim, Q)
    return out


@dataclass(frozen=True, eq=False)
class SimilarityResult:
    found: bool
    S: np.ndarray | None
    residual: float
    intertwining_error: float

    def __bool__(self):
        return self.found


def _krylov_words(ctrl: SubspaceBasis, d):
    words = list(ctrl.words)
    seen = set(words)
    for w in ctrl.words:
        for j in range(1, d + 1):
            w2 = (j,) + w
            if w2 not in seen:
                seen.add(w2)
                words.append(w2)
    return words


def similarity_between_minimal(r, r2, tol=SIMILARITY_TOL, rank_tol=RANK_TOL) -> SimilarityResult:
    """Find ``S`` with ``S A_j S^{-1} = A'_j``, ``S c = c'`` and ``S^* b' = b``.

    ``S`` is the least-squares solution of ``S [A^w c]_w = [A'^w c']_w`` over
    the words selected by the controllable Krylov sweep of ``r`` and their
    one-letter extensions.  Inputs must be minimal with equal dimensions.
    """
    r, r2 = to_descriptor(r), to_descriptor(r2)
    if r.d != r2.d:
        raise StructuralError(f"realizations over d={r.d} and d={r2.d}")
    if r.dim != r2.dim:
        raise StructuralError(
            f"minimal realizations of dimensions {r.dim} and {r2.dim}: finite minimal realizations "
            "of one function have equal dimension, so these realize different functions"
        )
    for name, x in (("first", r), ("second", r2)):
        if not is_minimal(x, rank_tol):
            raise PreconditionError(f"{name} realization is not minimal")
    n = r.dim
    if n == 0:
        return SimilarityResult(True, np.zeros((0, 0), dtype=complex), 0.0, 0.0)
    ctrl = controllable_span(r.A, r.c, rank_tol)
    words = _krylov_words(ctrl, r.d)
    K = np.array([_word_product(r.A, w, n) @ r.c for w in words]).T
    K2 = np.array([_word_product(r2.A, w, n) @ r2.c for w in words]).T
    St, *_ = np.linalg.lstsq(K.T, K2.T, rcond=None)
    S = St.T
    scale = max(1.0, np.linalg.norm(K2))
    residual = float(np.linalg.norm(S @ K - K2) / scale)
    if np.linalg.matrix_rank(S) < n:
        return SimilarityResult(False, None, residual, np.inf)
    Si = np.linalg.inv(S)
    err = max(
        max(np.linalg.norm(S @ r.A[j] @ Si - r2.A[j]) for j in range(r.d)) / max(1.0, np.linalg.norm(r2.A)),
        np.linalg.norm(S.conj().T @ r2.b - r.b) / max(1.0, np.linalg.norm(r.b)),
    )
    found = residual < tol and err < tol
    return SimilarityResult(found, S if found else None, residual, float(err))
