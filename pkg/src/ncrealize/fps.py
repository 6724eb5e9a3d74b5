"""Words over {1..d} and truncated free formal power series.

Words are plain tuples of 1-based letters, ``()`` being the empty word.
A :class:`TruncatedSeries` stores the coefficients of all words up to a
degree bound and is deliberately simple: it is the brute-force oracle that
the realization code is checked against.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping

import numpy as np

from .errors import AlphabetError, InputError, NotInvertibleError

Word = tuple

PRUNE_TOL = 1e-14
INVERSION_TOL = 1e-12

EMPTY = ()


def check_word(w, d: int) -> Word:
    w = tuple(int(i) for i in w)
    for i in w:
        if not 1 <= i <= d:
            raise AlphabetError(f"letter {i} outside alphabet 1..{d}")
    return w


def word_concat(u: Word, v: Word) -> Word:
    return tuple(u) + tuple(v)


def word_transpose(w: Word) -> Word:
    """Letter reversal ``i1...in -> in...i1``."""
    return tuple(reversed(w))


def words_of_length(d: int, n: int) -> Iterator[Word]:
    """All words of length ``n`` in lexicographic order."""
    return itertools.product(range(1, d + 1), repeat=n)


def words_up_to(d: int, n: int) -> Iterator[Word]:
    """All words of length ``<= n`` in graded-lexicographic order."""
    for k in range(n + 1):
        yield from words_of_length(d, k)


def graded_lex_key(w: Word):
    return (len(w), tuple(w))


def word_str(w: Word) -> str:
    return "∅" if not w else "".join(f"z{i}" for i in w)


def pruned(d, degree_bound, coeffs, tol=PRUNE_TOL) -> "TruncatedSeries":
    """Series from computed coefficients, dropping those with ``|v| <= tol``."""
    return TruncatedSeries(d, degree_bound, {w: v for w, v in coeffs.items() if abs(v) > tol})


@dataclass(frozen=True)
class TruncatedSeries:
    """Free formal power series in ``d`` variables known up to ``degree_bound``.

    Coefficients are stored sparsely; missing words have coefficient zero.
    Instances are treated as immutable.  Given coefficients are kept as they
    are (exact zeros dropped); results of arithmetic are pruned below
    ``PRUNE_TOL`` by :func:`pruned`.
    """

    d: int
    degree_bound: int
    coeffs: Mapping[Word, complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.d < 1:
            raise AlphabetError("a series needs at least one variable")
        if self.degree_bound < 0:
            raise InputError("degree_bound must be non-negative")
        clean = {}
        for w, v in self.coeffs.items():
            w = check_word(w, self.d)
            if len(w) > self.degree_bound:
                continue
            v = complex(v)
            if v != 0:
                clean[w] = v
        object.__setattr__(self, "coeffs", dict(sorted(clean.items(), key=lambda kv: graded_lex_key(kv[0]))))

    # -- construction -----------------------------------------------------

    @classmethod
    def zero(cls, d, degree_bound):
        return cls(d, degree_bound, {})

    @classmethod
    def constant(cls, value, d, degree_bound):
        return cls(d, degree_bound, {EMPTY: value})

    @classmethod
    def variable(cls, j, d, degree_bound):
        return cls(d, degree_bound, {(j,): 1.0})

    @classmethod
    def monomial(cls, w, d, degree_bound, value=1.0):
        return cls(d, degree_bound, {tuple(w): value})

    @classmethod
    def from_function(cls, func, d, degree_bound):
        """Series whose coefficient on ``w`` is ``func(w)``."""
        return cls(d, degree_bound, {w: func(w) for w in words_up_to(d, degree_bound)})

    # -- access -----------------------------------------------------------

    def __getitem__(self, w) -> complex:
        return self.coeffs.get(tuple(w), 0j)

    coeff = __getitem__

    def homogeneous(self, n) -> dict:
        return {w: v for w, v in self.coeffs.items() if len(w) == n}

    def constant_term(self) -> complex:
        return self[EMPTY]

    def truncate(self, degree_bound) -> "TruncatedSeries":
        return TruncatedSeries(self.d, min(degree_bound, self.degree_bound), self.coeffs)

    def dense(self, degree=None) -> np.ndarray:
        """Coefficients of every word up to ``degree`` in graded-lex order."""
        degree = self.degree_bound if degree is None else degree
        return np.array([self[w] for w in words_up_to(self.d, degree)], dtype=complex)

    def allclose(self, other, atol=1e-10, degree=None) -> bool:
        degree = min(self.degree_bound, other.degree_bound) if degree is None else degree
        words = set(self.coeffs) | set(other.coeffs)
        return all(abs(self[w] - other[w]) <= atol for w in words if len(w) <= degree)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.d, self.degree_bound, self.coeffs) == (other.d, other.degree_bound, other.coeffs)

    def __hash__(self):
        return hash((self.d, self.degree_bound, tuple(self.coeffs.items())))

    def __repr__(self):
        terms = " + ".join(f"({v:.6g}){word_str(w)}" for w, v in list(self.coeffs.items())[:8])
        more = " + ..." if len(self.coeffs) > 8 else ""
        return f"TruncatedSeries(d={self.d}, N={self.degree_bound}: {terms or '0'}{more})"

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        return series_add(self, _coerce(other, self))

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return series_add(self, -_coerce(other, self))

    def __rsub__(self, other):
        return series_add(_coerce(other, self), -self)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return series_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        if isinstance(other, TruncatedSeries):
            return series_mul(other, self)
        return self.scale(other)

    def scale(self, alpha) -> "TruncatedSeries":
        alpha = complex(alpha)
        return pruned(self.d, self.degree_bound, {w: alpha * v for w, v in self.coeffs.items()})

    def invert(self, tol=INVERSION_TOL):
        return series_invert(self, tol)

    def transpose(self):
        return series_transpose(self)


def _coerce(x, like: TruncatedSeries) -> TruncatedSeries:
    if isinstance(x, TruncatedSeries):
        return x
    return TruncatedSeries.constant(x, like.d, like.degree_bound)


def _check_alphabet(f, g):
    if f.d != g.d:
        raise AlphabetError(f"series over {f.d} and {g.d} variables cannot be combined")


def series_add(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    _check_alphabet(f, g)
    bound = min(f.degree_bound, g.degree_bound)
    out = {}
    for src in (f.coeffs, g.coeffs):
        for w, v in src.items():
            if len(w) <= bound:
                out[w] = out.get(w, 0j) + v
    return pruned(f.d, bound, out)


def _by_length(coeffs, bound):
    groups = [[] for _ in range(bound + 1)]
    for w, v in coeffs.items():
        if len(w) <= bound:
            groups[len(w)].append((w, v))
    return groups


def series_mul(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product ``(fg)_w = sum_{w=uv} f_u g_v``."""
    _check_alphabet(f, g)
    bound = min(f.degree_bound, g.degree_bound)
    fg, gg = _by_length(f.coeffs, bound), _by_length(g.coeffs, bound)
    out = {}
    for a in range(bound + 1):
        for b in range(bound + 1 - a):
            for u, fu in fg[a]:
                for v, gv in gg[b]:
                    w = u + v
                    out[w] = out.get(w, 0j) + fu * gv
    return pruned(f.d, bound, out)


def series_invert(f: TruncatedSeries, tol=INVERSION_TOL) -> TruncatedSeries:
    """Multiplicative inverse, degree by degree.

    With ``g_0 = 1/f_0`` the homogeneous part of degree ``n`` is
    ``g_n = -(1/f_0) sum_{k=1..n} f_k g_{n-k}``, which is the word-wise
    recursion ``g_w = -(1/f_0) sum_{w=uv, u != ()} f_u g_v``.
    """
    f0 = f[EMPTY]
    if abs(f0) <= tol:
        raise NotInvertibleError(f"constant term {f0} vanishes; series is not invertible")
    inv0 = 1.0 / f0
    fg = _by_length(f.coeffs, f.degree_bound)
    g_parts = [{EMPTY: inv0}]
    for n in range(1, f.degree_bound + 1):
        part = {}
        for k in range(1, n + 1):
            for u, fu in fg[k]:
                for v, gv in g_parts[n - k].items():
                    w = u + v
                    part[w] = part.get(w, 0j) - inv0 * fu * gv
        g_parts.append({w: v for w, v in part.items() if abs(v) > PRUNE_TOL})
    out = {}
    for part in g_parts:
        out.update(part)
    return pruned(f.d, f.degree_bound, out)


def backward_shift(f: TruncatedSeries, j: int, side: str = "left") -> TruncatedSeries:
    """Strip letter ``j``: left gives ``w -> f_{jw}``, right gives ``w -> f_{wj}``."""
    check_word((j,), f.d)
    if side not in ("left", "right"):
        raise InputError(f"side must be 'left' or 'right', got {side!r}")
    out = {}
    for w, v in f.coeffs.items():
        if not w:
            continue
        if side == "left" and w[0] == j:
            out[w[1:]] = v
        elif side == "right" and w[-1] == j:
            out[w[:-1]] = v
    return TruncatedSeries(f.d, max(f.degree_bound - 1, 0), out)


def series_transpose(f: TruncatedSeries) -> TruncatedSeries:
    return TruncatedSeries(f.d, f.degree_bound, {word_transpose(w): v for w, v in f.coeffs.items()})


@dataclass(frozen=True)
class RadiusEstimate:
    radius: float
    roots: tuple
    window: tuple

    def __float__(self):
        return self.radius


def radius_estimate(f: TruncatedSeries, window=None) -> RadiusEstimate:
    """Estimate the row-ball radius of convergence from finitely many degrees.

    ``roots[n-1] = (sum_{|w|=n} |f_w|^2)^(1/2n)`` for ``n = 1..N``; the radius
    is ``1 / max(roots over the tail window)``.  The default window is the
    last quarter of the available degrees.  A series with all tail roots
    zero has radius ``inf``.
    """
    N = f.degree_bound
    if N < 2:
        raise InputError("radius estimation needs degree_bound >= 2")
    sq = np.zeros(N + 1)
    for w, v in f.coeffs.items():
        sq[len(w)] += abs(v) ** 2
    # log-space root: (sq)^(1/2n) underflows for factorial decay otherwise
    roots = []
    for n in range(1, N + 1):
        roots.append(0.0 if sq[n] == 0 else math.exp(math.log(sq[n]) / (2 * n)))
    if window is None:
        window = (max(1, N - max(1, math.ceil(N / 4)) + 1), N)
    lo, hi = window
    tail = max(roots[lo - 1:hi])
    radius = math.inf if tail == 0 else 1.0 / tail
    return RadiusEstimate(radius, tuple(roots), (lo, hi))

