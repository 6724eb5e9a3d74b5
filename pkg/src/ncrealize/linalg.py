"""Small dense linear-algebra kernels shared across modules."""

import warnings

import numpy as np
import scipy.linalg as sla

from .errors import DomainError

SINGULARITY_TOL = 1e-10
RANK_TOL = 1e-10


def lu_with_rcond(M):
    """LU factorisation of ``M`` and a LAPACK 1-norm reciprocal condition estimate."""
    M = np.asarray(M, dtype=complex)
    if M.shape[0] == 0:
        return None, 1.0
    anorm = np.linalg.norm(M, 1)
    if not np.isfinite(anorm):
        return None, 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(M, check_finite=False)
    if anorm == 0.0:
        return (lu, piv), 0.0
    gecon = sla.get_lapack_funcs("gecon", (lu,))
    rcond, info = gecon(lu, anorm, norm="1")
    if np.any(np.diag(lu) == 0):
        rcond = 0.0
    return (lu, piv), float(rcond)


def solve_checked(M, rhs, tol=SINGULARITY_TOL, what="pencil"):
    """Solve ``M x = rhs``; raise :class:`DomainError` when ``M`` is numerically singular."""
    rhs = np.asarray(rhs, dtype=complex)
    if np.asarray(M).shape[0] == 0:
        return rhs.copy()
    fac, rcond = lu_with_rcond(M)
    if fac is None or rcond < tol:
        raise DomainError(f"{what} is singular (rcond={rcond:.3e} < {tol:.1e})", rcond)
    return sla.lu_solve(fac, rhs, check_finite=False)


def _mgs2(Q, v):
    # modified Gram-Schmidt, applied twice
    for _ in range(2):
        for q in Q:
            v = v - np.vdot(q, v) * q
    return v


def krylov_basis(mats, seeds, rank_tol=RANK_TOL):
    """Orthonormal basis of the smallest subspace containing ``seeds`` and invariant under ``mats``.

    The sweep is breadth-first: level 0 are the seeds, level k+1 applies every
    ``mats[j]`` to the vectors accepted at level k.  A candidate is accepted when
    its residual after orthogonalisation exceeds ``rank_tol`` times the norm of
    the matrix (or seed scale) that produced it.

    Parameters
    ----------
    mats : array (d, n, n)
    seeds : list of (label, vector)
        ``label`` is a word; candidates from ``mats[j]`` get label ``(j+1,) + label``.

    Returns
    -------
    Q : array (n, r) with orthonormal columns
    labels : list of the words whose vectors were accepted
    """
    mats = np.asarray(mats, dtype=complex)
    d, n = mats.shape[0], mats.shape[-1]
    basis, labels = [], []
    seed_scale = max((np.linalg.norm(v) for _, v in seeds), default=0.0)
    if n == 0 or seed_scale == 0.0:
        return np.zeros((n, 0), dtype=complex), []
    mat_norms = [np.linalg.norm(mats[j], 2) for j in range(d)]

    def offer(label, v, scale):
        if len(basis) >= n:
            return None
        r = _mgs2(basis, np.asarray(v, dtype=complex))
        nr = np.linalg.norm(r)
        if nr > rank_tol * scale and nr > 0:
            basis.append(r / nr)
            labels.append(tuple(label))
            return basis[-1]
        return None

    frontier = []
    for label, v in seeds:
        q = offer(label, v, seed_scale)
        if q is not None:
            frontier.append((label, q))
    while frontier and len(basis) < n:
        nxt = []
        for label, q in frontier:
            for j in range(d):
                if mat_norms[j] == 0.0:
                    continue
                q2 = offer((j + 1,) + tuple(label), mats[j] @ q, mat_norms[j])
                if q2 is not None:
                    nxt.append(((j + 1,) + tuple(label), q2))
        frontier = nxt
    Q = np.array(basis, dtype=complex).T if basis else np.zeros((n, 0), dtype=complex)
    return Q, labels
