"""Pencil invertibility, poles of restrictions ``g_X(z) = f(zX)`` and related probes.

With ``M = sum_j X_j (x) A_j`` the restriction of a descriptor realization to
the complex line through ``X`` is

    g_X(z) = (I (x) b)^* (I - z M)^{-1} (I (x) c),

so its poles sit among the reciprocals of the nonzero eigenvalues of ``M``.
Eigenvalues are grouped into clusters, each cluster gets a spectral
projector from an ordered Schur form and a Jordan-order bound from the rank
chain of its nilpotent part.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.optimize import linear_sum_assignment

from .errors import InputError, NumericalError, PreconditionError
from .linalg import SINGULARITY_TOL, lu_with_rcond
from .minimal import is_minimal
from .realization import (
    MatrixTuple,
    _check_point,
    col_norm,
    evaluate,
    pencil_apply,
    series_from_realization,
    to_descriptor,
)

EIGEN_FLOOR = 1e-9
CLUSTER_TOL = 1e-7
FIT_RADII = np.geomspace(1e-2, 1e-4, 5)
FIT_RESIDUAL = 0.2
CONTOUR_POINTS = 256
NILPOTENT_TOL = 1e-12


def pencil_condition(A, X, tol=SINGULARITY_TOL):
    """Reciprocal condition estimate of ``L_A(X)`` and the flag ``rcond >= tol``."""
    rcond = lu_with_rcond(pencil_apply(A, X))[1]
    return rcond, bool(rcond >= tol)


def pencil_operator(A, X) -> np.ndarray:
    """``M = sum_j X_j (x) A_j``, so that ``L_A(zX) = I - z M``."""
    A = np.asarray(A, dtype=complex)
    X = X if isinstance(X, MatrixTuple) else MatrixTuple(X)
    return sum(np.kron(Xj, Aj) for Xj, Aj in zip(X.mats, A))


# -- eigenvalue clusters ------------------------------------------------------


def _cluster(vals, tol):
    # single-linkage grouping of eigenvalues closer than tol
    vals = list(vals)
    groups = []
    for v in vals:
        hit = [g for g in groups if min(abs(v - u) for u in g) <= tol]
        merged = [v]
        for g in hit:
            merged.extend(g)
            groups.remove(g)
        groups.append(merged)
    return groups


@dataclass(frozen=True, eq=False)
class SpectralBlock:
    """One cluster of eigenvalues of ``M``.

    ``order_bound`` is the index of nilpotency of ``(M - lam) E`` on the
    range of the projector ``E``; it bounds the pole order at ``z = 1/lam``.
    """

    eigenvalue: complex
    pole: complex
    algebraic_multiplicity: int
    geometric_multiplicity: int
    order_bound: int
    projector: np.ndarray = field(repr=False)

    @property
    def riesz_rank(self):
        return self.algebraic_multiplicity

    def to_dict(self):
        return {
            "eigenvalue": [self.eigenvalue.real, self.eigenvalue.imag],
            "pole": [self.pole.real, self.pole.imag],
            "algebraic_multiplicity": self.algebraic_multiplicity,
            "geometric_multiplicity": self.geometric_multiplicity,
            "order_bound": self.order_bound,
            "riesz_rank": self.riesz_rank,
        }


def _schur_block(M, lam, tol, scale):
    # reorder the Schur form so the cluster around lam comes first
    T, Q, k = sla.schur(M, output="complex", sort=lambda z: abs(z - lam) <= tol)
    if k == 0:
        raise NumericalError(f"Schur reordering lost the eigenvalue {lam:.6g}")
    n = M.shape[0]
    T11, T12, T22 = T[:k, :k], T[:k, k:], T[k:, k:]
    R = sla.solve_sylvester(T11, -T22, T12) if k < n else np.zeros((k, 0), dtype=complex)
    P = np.zeros((n, n), dtype=complex)
    P[:k, :k] = np.eye(k)
    P[:k, k:] = R
    E = Q @ P @ Q.conj().T
    # rank chain of the nilpotent part on the cluster
    N = (T11 - lam * np.eye(k)) / scale
    ranks = [k]
    Nk = np.eye(k, dtype=complex)
    while ranks[-1] > 0 and len(ranks) <= k:
        Nk = Nk @ N
        s = np.linalg.svd(Nk, compute_uv=False)
        ranks.append(int(np.sum(s > tol / scale)))
    order = next(i for i, r in enumerate(ranks) if r == 0)
    return E, k, k - ranks[1], max(order, 1)


def _nilpotent_count(M, vals, scale, floor, nil_tol):
    # Size of the largest group of smallest-modulus eigenvalues whose Schur
    # block is numerically nilpotent.  Rounding splits a defective zero
    # eigenvalue of multiplicity k into a ring of radius ~ eps^(1/k) ||M||,
    # far above the plain floor; such a ring is zero to working precision.
    mods = np.sort(np.abs(vals))
    best = int(np.sum(mods <= floor * scale))
    n = M.shape[0]
    for k in range(n, best, -1):
        if mods[k - 1] > nil_tol ** (1.0 / k) * scale:
            continue
        # cut halfway (geometrically) to the next eigenvalue: reordering perturbs the moduli
        cut = np.sqrt(mods[k - 1] * mods[k]) if k < n else 2.0 * mods[k - 1]
        T, _, kk = sla.schur(M, output="complex", sort=lambda z, t=cut: abs(z) <= t)
        if kk != k:
            continue
        if np.linalg.norm(np.linalg.matrix_power(T[:k, :k] / scale, k), 2) <= nil_tol:
            return k
    return best


def spectral_blocks(M, eigen_floor=EIGEN_FLOOR, cluster_tol=CLUSTER_TOL):
    """Clusters of nonzero eigenvalues of ``M``, sorted by decreasing modulus.

    Eigenvalues below ``eigen_floor * ||M||`` count as zero, and so does a
    group of smallest eigenvalues whose Schur block ``N`` of size ``k``
    satisfies ``||(N / ||M||)^k|| <= NILPOTENT_TOL`` (a rounding-split
    defective zero).  Eigenvalues within ``cluster_tol * ||M||`` of each other
    form one cluster.
    """
    M = np.asarray(M, dtype=complex)
    if M.size == 0:
        return []
    scale = np.linalg.norm(M, 2)
    if scale == 0.0:
        return []
    try:
        # eigenvalues from the Schur form itself, so the reordering below sees the same numbers
        T0 = sla.schur(M, output="complex")[0]
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"Schur decomposition failed on a {M.shape[0]}x{M.shape[0]} pencil operator: {exc}") from exc
    vals = np.diag(T0)
    zeros = _nilpotent_count(M, vals, scale, eigen_floor, NILPOTENT_TOL)
    vals = vals[np.argsort(np.abs(vals), kind="stable")][zeros:]
    tol = cluster_tol * scale
    blocks = []
    for group in _cluster(vals, tol):
        lam = complex(np.mean(group))
        spread = max(abs(v - lam) for v in group)
        E, k, geo, order = _schur_block(M, lam, spread + tol, scale)
        blocks.append(SpectralBlock(lam, 1.0 / lam, k, geo, order, E))
    blocks.sort(key=lambda b: -abs(b.eigenvalue))
    return blocks


@dataclass(frozen=True, eq=False)
class PoleReport:
    """Pole candidates ``z = 1/lam`` of ``g_X`` with Jordan-order bounds."""

    level: int
    state_dim: int
    operator_norm: float
    blocks: tuple

    @property
    def eigenvalues(self):
        return [b.eigenvalue for b in self.blocks]

    @property
    def poles(self):
        return [b.pole for b in self.blocks]

    def multiset(self):
        """Eigenvalues repeated by algebraic multiplicity."""
        return np.array([b.eigenvalue for b in self.blocks for _ in range(b.algebraic_multiplicity)], dtype=complex)

    def to_dict(self):
        return {
            "kind": "pole-report",
            "level": self.level,
            "state_dim": self.state_dim,
            "operator_norm": self.operator_norm,
            "poles": [b.to_dict() for b in self.blocks],
        }


def restriction_poles(r, X, eigen_floor=EIGEN_FLOOR, cluster_tol=CLUSTER_TOL) -> PoleReport:
    """Pole candidates of ``z -> f(zX)`` from the spectrum of ``sum_j X_j (x) A_j``.

    FM inputs use their own state tuple ``A``; the extra descriptor coordinate
    only adds the eigenvalue 0.
    """
    X = _check_point(r, X)
    M = pencil_operator(r.A, X)
    blocks = spectral_blocks(M, eigen_floor, cluster_tol)
    return PoleReport(X.n, r.dim, float(np.linalg.norm(M, 2)) if M.size else 0.0, tuple(blocks))


# -- numerical pole verification ---------------------------------------------


@dataclass(frozen=True)
class PoleVerdict:
    pole: complex
    verdict: str
    order: int | None
    slope: float
    radii: tuple
    peaks: tuple
    minimal: bool

    def to_dict(self):
        return {
            "pole": [self.pole.real, self.pole.imag],
            "verdict": self.verdict,
            "order": self.order,
            "slope": self.slope,
            "radii": list(self.radii),
            "peaks": list(self.peaks),
            "minimal": self.minimal,
        }


def restriction_value(r, X, z) -> np.ndarray:
    """``g_X(z) = f(zX)`` without the domain check (used next to poles)."""
    X = _check_point(r, X)
    return evaluate(r, MatrixTuple(z * X.mats), tol=0.0)


def verify_pole_actual(r, X, z, others=(), n_angles=16, radii=FIT_RADII, residual=FIT_RESIDUAL) -> PoleVerdict:
    """Decide whether ``g_X`` blows up at ``z`` by a log-log fit over shrinking circles.

    The circle radii are ``radii * s`` with ``s = min(|z|, dist(z, others))``
    so the largest circle stays well inside the distance to neighbouring
    candidates.  On each circle the mean of ``g`` (the constant Laurent term)
    is subtracted before taking the peak, so an analytic background does not
    flatten the fit.  The fitted slope of ``log peak`` against ``log radius``
    is then ``-k`` for a pole of order ``k`` and ``+1`` or more at a regular
    point (verdict ``"regular"``); a slope further than ``residual`` from an
    integer gives ``"indeterminate"``.
    """
    X = _check_point(r, X)
    z = complex(z)
    scale = abs(z)
    for w in others:
        dist = abs(complex(w) - z)
        if dist > 0:
            scale = min(scale, dist)
    if scale == 0.0:
        raise InputError("pole candidate at the origin")
    rad = np.asarray(radii) * scale
    theta = 2 * np.pi * (np.arange(n_angles) + 0.5) / n_angles
    peaks = []
    for rho in rad:
        vals = np.array([restriction_value(r, X, z + rho * np.exp(1j * t)) for t in theta])
        centred = vals - vals.mean(axis=0)
        peaks.append(max(np.linalg.norm(v, 2) for v in centred))
    peaks = np.asarray(peaks)
    minimal = bool(is_minimal(r))
    if not np.all(np.isfinite(peaks)) or np.any(peaks == 0):
        return PoleVerdict(z, "indeterminate", None, float("nan"), tuple(rad), tuple(peaks), minimal)
    slope = float(np.polyfit(np.log(rad), np.log(peaks), 1)[0])
    k = int(round(-slope))
    if abs(-slope - k) > residual:
        verdict, order = "indeterminate", None
    elif k <= 0:
        verdict, order = "regular", 0
    else:
        verdict, order = "pole", k
    return PoleVerdict(z, verdict, order, slope, tuple(rad), tuple(peaks), minimal)


def verify_all_poles(r, X, report: PoleReport | None = None):
    report = restriction_poles(r, X) if report is None else report
    poles = report.poles
    return [verify_pole_actual(r, X, z, [w for w in poles if w != z]) for z in poles]


# -- contour integrals --------------------------------------------------------


def contour_projector(A, centre, radius, n_points=CONTOUR_POINTS) -> np.ndarray:
    """``(1/2 pi i) \\oint (lam I - A)^{-1} d lam`` over a circle, by the trapezoid rule."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    t = 2 * np.pi * np.arange(n_points) / n_points
    out = np.zeros((n, n), dtype=complex)
    eye = np.eye(n)
    for tk in t:
        w = radius * np.exp(1j * tk)
        # d lam = i w dt, and the 1/(2 pi i) cancels the i
        out += np.linalg.solve((centre + w) * eye - A, eye) * w
    return out / n_points


def riesz_check(A, n_points=CONTOUR_POINTS):
    """Compare contour-integrated residues with Schur projectors for every nonzero cluster of ``A``.

    Each circle has radius half the distance to the nearest other eigenvalue
    (zero included).  Returns a list of ``(eigenvalue, error)``.
    """
    A = np.asarray(A, dtype=complex)
    blocks = spectral_blocks(A)
    allvals = sla.eigvals(A)
    out = []
    for b in blocks:
        others = allvals[np.abs(allvals - b.eigenvalue) > CLUSTER_TOL * max(1.0, np.linalg.norm(A, 2))]
        gap = min(np.min(np.abs(others - b.eigenvalue)) if others.size else abs(b.eigenvalue), abs(b.eigenvalue))
        E = contour_projector(A, b.eigenvalue, 0.5 * gap, n_points)
        out.append((b.eigenvalue, float(np.linalg.norm(E - b.projector, 2))))
    return out


# -- domains of minimal realizations -----------------------------------------


def _match_spectra(u, v):
    if u.size != v.size:
        return False, np.inf
    if u.size == 0:
        return True, 0.0
    cost = np.abs(u[:, None] - v[None, :])
    i, j = linear_sum_assignment(cost)
    err = float(np.max(cost[i, j]))
    return True, err


@dataclass(frozen=True)
class DomainAgreement:
    samples: int
    agree: int
    both_invertible: int
    both_singular: int
    minimal: tuple
    spectra_error: float | None
    order_bounds_match: bool | None

    @property
    def all_agree(self):
        return self.agree == self.samples

    def to_dict(self):
        return {
            "kind": "domain-agreement",
            "samples": self.samples,
            "agree": self.agree,
            "both_invertible": self.both_invertible,
            "both_singular": self.both_singular,
            "minimal": list(self.minimal),
            "spectra_error": self.spectra_error,
            "order_bounds_match": self.order_bounds_match,
        }


def seeded_singular_point(A, W) -> tuple:
    """Scale ``W`` so that ``L_A`` is singular there: ``X = W / mu`` for a nonzero eigenvalue ``mu``.

    Returns ``(X, mu)``; ``X`` is ``None`` when ``sum W_j (x) A_j`` is nilpotent.
    """
    W = W if isinstance(W, MatrixTuple) else MatrixTuple(W)
    M = pencil_operator(A, W)
    vals = sla.eigvals(M)
    nz = vals[np.abs(vals) > EIGEN_FLOOR * max(np.linalg.norm(M, 2), 1e-300)]
    if nz.size == 0:
        return None, None
    mu = complex(nz[np.argmax(np.abs(nz))])
    return MatrixTuple(W.mats / mu), mu


def domain_agreement(r, r2, rng, samples=200, level=2, degree=6, tol=SINGULARITY_TOL, coeff_tol=1e-8) -> DomainAgreement:
    """Compare pencil invertibility of two realizations of one function.

    Points are Gaussian tuples at ``level`` with row norms spread over
    ``(0, 3 / col_norm)`` plus adversarial points made singular for either
    pencil.  In one variable the nonzero spectra are matched as multisets.
    Coefficients are checked up to ``degree`` first.
    """
    r, r2 = to_descriptor(r), to_descriptor(r2)
    if r.d != r2.d:
        raise PreconditionError(f"realizations over d={r.d} and d={r2.d}")
    s1, s2 = series_from_realization(r, degree), series_from_realization(r2, degree)
    scale = max(1.0, max((abs(v) for v in s1.coeffs.values()), default=0.0))
    if not s1.allclose(s2, atol=coeff_tol * scale):
        raise PreconditionError("realizations are not coefficient-equal up to the test degree")
    minimal = (bool(is_minimal(r)), bool(is_minimal(r2)))
    d = r.d
    cn = max(col_norm(r.A), col_norm(r2.A), 1e-12)
    points = []
    n_adv = min(samples // 4, 20)
    for k in range(samples - 2 * n_adv):
        X = MatrixTuple.random(rng, d, level)
        t = rng.uniform(0.0, 3.0) / cn
        points.append(MatrixTuple(X.mats * t / max(X.row_norm(), 1e-300)))
    for A in (r.A, r2.A):
        for _ in range(n_adv):
            X, _ = seeded_singular_point(A, MatrixTuple.random(rng, d, level))
            if X is not None:
                points.append(X)
    agree = inv = sing = 0
    for X in points:
        f1 = pencil_condition(r.A, X, tol)[1]
        f2 = pencil_condition(r2.A, X, tol)[1]
        agree += f1 == f2
        inv += f1 and f2
        sing += (not f1) and (not f2)
    spectra_error, orders_match = None, None
    if d == 1:
        b1 = spectral_blocks(r.A[0])
        b2 = spectral_blocks(r2.A[0])
        u = np.array([b.eigenvalue for b in b1 for _ in range(b.algebraic_multiplicity)], dtype=complex)
        v = np.array([b.eigenvalue for b in b2 for _ in range(b.algebraic_multiplicity)], dtype=complex)
        ok, spectra_error = _match_spectra(u, v)
        if ok and len(b1) == len(b2):
            o1 = sorted((round(b.eigenvalue.real, 6), round(b.eigenvalue.imag, 6), b.order_bound) for b in b1)
            o2 = sorted((round(b.eigenvalue.real, 6), round(b.eigenvalue.imag, 6), b.order_bound) for b in b2)
            orders_match = [o[2] for o in o1] == [o[2] for o in o2]
        else:
            orders_match = False
    return DomainAgreement(len(points), agree, inv, sing, minimal, spectra_error, orders_match)


# -- random compact truncations -----------------------------------------------


def compact_truncation(rng, d, n, decay=1.5) -> np.ndarray:
    """Leading ``n x n`` section of a random compact tuple.

    Entries are complex Gaussians damped by ``(1 + i + k)^(-decay)``, which
    makes the tuple Schatten-class for ``decay > 1`` in the infinite limit.
    """
    g = rng.standard_normal((d, n, n)) + 1j * rng.standard_normal((d, n, n))
    i = np.arange(n)
    damp = (1.0 + i[:, None] + i[None, :]) ** (-float(decay))
    return g * damp / np.sqrt(2.0)


# -- Schatten norms and Zariski probes ------------------------------------------


def schatten_norm(M, p) -> float:
    """``(tr |M|^p)^(1/p)``: the p-norm of the singular values (``p = inf`` gives the operator norm)."""
    p = float(p)
    if not p >= 1:
        raise InputError(f"Schatten p-norm needs p >= 1, got {p}")
    s = sla.svdvals(np.atleast_2d(np.asarray(M, dtype=complex)))
    if s.size == 0:
        return 0.0
    if np.isinf(p):
        return float(s.max())
    top = s.max()
    if top == 0.0:
        return 0.0
    return float(top * np.sum((s / top) ** p) ** (1.0 / p))


def line_singular_parameters(A, X0, X1) -> np.ndarray:
    """Finite ``t`` with ``L_A(X0 + t X1)`` singular.

    ``L_A(X0 + t X1) = (I - M0) - t M1``, so these are the finite generalized
    eigenvalues of the pair ``(I - M0, M1)``.
    """
    M0 = pencil_operator(A, X0)
    M1 = pencil_operator(A, X1)
    n = M0.shape[0]
    w = sla.eigvals(np.eye(n) - M0, M1, homogeneous_eigvals=True)
    alpha, beta = w
    scale = max(np.abs(alpha).max(initial=0.0), 1.0)
    finite = np.abs(beta) > 1e-12 * scale
    return alpha[finite] / beta[finite]


@dataclass(frozen=True)
class ProbeReport:
    level: int
    trials: int
    invertible: int
    line_counts: tuple
    seeded_errors: tuple

    @property
    def fraction(self):
        return self.invertible / self.trials if self.trials else 1.0

    def to_dict(self):
        return {
            "kind": "zariski-probe",
            "level": self.level,
            "trials": self.trials,
            "invertible": self.invertible,
            "fraction": self.fraction,
            "line_singular_counts": list(self.line_counts),
            "seeded_errors": list(self.seeded_errors),
            "note": "singular parameters are finite-section (matrix pencil) eigenvalues",
        }


def zariski_probe(A, level, trials, rng, lines=5, tol=SINGULARITY_TOL) -> ProbeReport:
    """Fraction of Gaussian points with invertible pencil, plus line probes.

    Each line ``X0 + t X1`` is built through a seeded singular point
    ``X_s = W / mu`` at a random parameter ``t0``; the report lists the number
    of finite singular parameters per line and the distance from ``t0`` to the
    nearest one found.
    """
    A = np.asarray(A, dtype=complex)
    if A.ndim == 2:
        A = A[None]
    d = A.shape[0]
    hits = 0
    for _ in range(trials):
        X = MatrixTuple.random(rng, d, level)
        hits += pencil_condition(A, X, tol)[1]
    counts, errors = [], []
    for _ in range(lines):
        X1 = MatrixTuple.random(rng, d, level)
        Xs, _ = seeded_singular_point(A, MatrixTuple.random(rng, d, level))
        if Xs is None:
            # nilpotent pencil operator: no singular points at all on a random line
            X0 = MatrixTuple.random(rng, d, level)
            counts.append(int(line_singular_parameters(A, X0, X1).size))
            continue
        t0 = complex(rng.standard_normal(), rng.standard_normal())
        X0 = Xs - X1 * t0
        ts = line_singular_parameters(A, X0, X1)
        counts.append(int(ts.size))
        errors.append(float(np.min(np.abs(ts - t0))) if ts.size else float("inf"))
    return ProbeReport(level, trials, hits, tuple(counts), tuple(errors))


__all__ = [
    "pencil_condition",
    "compact_truncation",
    "pencil_operator",
    "SpectralBlock",
    "spectral_blocks",
    "PoleReport",
    "restriction_poles",
    "PoleVerdict",
    "restriction_value",
    "verify_pole_actual",
    "verify_all_poles",
    "contour_projector",
    "riesz_check",
    "DomainAgreement",
    "domain_agreement",
    "seeded_singular_point",
    "schatten_norm",
    "line_singular_parameters",
    "ProbeReport",
    "zariski_probe",
]
