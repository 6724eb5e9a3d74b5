import itertools
import math

import numpy as np
import pytest

from ncrealize.entire import (
    adjunction_power,
    cauchy_gap,
    joint_spectral_radius,
    monomial_realization,
    predicted_row_norm,
    quasinilpotent_1d,
    quasinilpotent_nc,
    shift_tuple,
    truncated_backward_shift,
)
from ncrealize.errors import InputError
from ncrealize.fps import TruncatedSeries, words_up_to
from ncrealize.realization import eval_descriptor, row_norm


def E(n1, j):
    out = np.zeros((n1, n1), dtype=np.int64)
    out[j - 1, j - 1] = 1
    return out


def word_product(T, w):
    out = np.eye(T.shape[1], dtype=np.int64)
    for letter in w:
        out = out @ T[letter - 1]
    return out


def test_backward_shift_matrix():
    assert np.array_equal(truncated_backward_shift(1), [[0, 1], [0, 0]])
    assert truncated_backward_shift(3).dtype == np.int64


def test_monomial_examples():
    r = monomial_realization((1,), 1)
    assert np.array_equal(r.A[0], [[0, 1], [0, 0]])
    assert r.coeff((1,)) == 1 and r.coeff(()) == 0 and r.coeff((1, 1)) == 0
    T = shift_tuple((1, 2), 2)
    assert np.array_equal(T[0], E(3, 1) @ truncated_backward_shift(2))
    assert np.array_equal(T[1], E(3, 2) @ truncated_backward_shift(2))
    m = monomial_realization((1, 2), 2)
    assert m.coeff((1, 2)) == 1 and m.coeff((2, 1)) == 0
    for w in itertools.product((1, 2), repeat=3):
        assert not np.any(word_product(T, w))


def test_monomial_delta_exhaustive():
    for d in (1, 2, 3):
        for alpha in words_up_to(d, 3):
            if not alpha:
                continue
            T = shift_tuple(alpha, d)
            n1 = len(alpha) + 1
            for w in words_up_to(d, 4):
                v = word_product(T, w)[0, n1 - 1]
                assert v == (1 if w == alpha else 0)


def test_rowpisom_identities_integer():
    for d in (1, 2, 3):
        for alpha in words_up_to(d, 4):
            if not alpha:
                continue
            T = shift_tuple(alpha, d)
            n1 = len(alpha) + 1
            I = np.eye(n1, dtype=np.int64)
            TT = sum(T[k] @ T[k].T for k in range(d))
            assert np.array_equal(TT, I - E(n1, n1))
            C = np.transpose(T, (0, 2, 1))
            CC = sum(C[k] @ C[k].T for k in range(d))
            assert np.array_equal(CC, I - E(n1, 1))
            # pairwise orthogonal ranges and sources
            for j in range(d):
                for k in range(d):
                    if j != k:
                        assert not np.any(T[j].T @ T[k])
                        assert not np.any(T[j] @ T[k].T)


def test_selection_rules():
    for d in (1, 2):
        for alpha in words_up_to(d, 3):
            if not alpha:
                continue
            T = shift_tuple(alpha, d)
            n = len(alpha)
            e1 = np.eye(n + 1, dtype=np.int64)[:, 0]
            en1 = np.eye(n + 1, dtype=np.int64)[:, n]
            for beta in words_up_to(d, 3):
                m = len(beta)
                v = word_product(T, beta) @ en1
                expect = np.eye(n + 1, dtype=np.int64)[:, n - m] if alpha[n - m :] == beta and m <= n else 0 * en1
                assert np.array_equal(v, expect)
                u = word_product(T, beta).T @ e1
                expect = np.eye(n + 1, dtype=np.int64)[:, m] if alpha[:m] == beta and m <= n else 0 * e1
                assert np.array_equal(u, expect)


def test_adjunction_lemma():
    for d in (1, 2, 3):
        for alpha in words_up_to(d, 4):
            if not alpha:
                continue
            T = shift_tuple(alpha, d)
            n = len(alpha)
            assert np.array_equal(adjunction_power(T, 0), np.eye(n + 1, dtype=np.int64))
            for m in range(1, n + 1):
                expect = sum(E(n + 1, j) for j in range(1, n - m + 2))
                assert np.array_equal(adjunction_power(T, m), expect)
            assert not np.any(adjunction_power(T, n + 1))


def test_adjunction_negative():
    with pytest.raises(InputError):
        adjunction_power(np.zeros((1, 2, 2)), -1)


def test_jsr_examples():
    res = joint_spectral_radius([[[0.7]]], 5)
    assert all(v == pytest.approx(0.7) for v in res.sequence)
    res = joint_spectral_radius(shift_tuple((1, 2, 1), 2), 6)
    assert res.nilpotent_at == 4 and res.estimate == 0.0
    assert res.sequence[3:] == (0.0, 0.0, 0.0)
    res = joint_spectral_radius(np.full((2, 1, 1), 1 / math.sqrt(2)), 8)
    assert res.estimate == pytest.approx(1.0)
    with pytest.raises(InputError):
        joint_spectral_radius([[[1.0]]], 0)


def test_qn1d_examples():
    N = 12
    a = [1 / math.factorial(n + 1) for n in range(N + 1)]
    q = quasinilpotent_1d(a)
    for n in range(N + 1):
        assert abs(q.realization.coeff((1,) * n) - a[n]) <= 1e-13 * a[n]
    q5 = quasinilpotent_1d([5.0])
    assert q5.dim == 1 and q5.realization.coeff(()) == 5
    assert q5.realization.coeff((1,)) == 0


def test_qn1d_dimension_and_norm():
    N = 20
    a = [1 / math.factorial(n) for n in range(N + 1)]
    q = quasinilpotent_1d(a)
    assert q.dim == 1 + sum(n + 1 for n in range(1, N + 1))
    expect = max((n * n / math.factorial(n)) ** (1 / n) for n in range(1, N + 1))
    assert np.linalg.norm(q.realization.A[0], 2) == pytest.approx(expect, rel=1e-12)
    assert q.norm() == pytest.approx(expect, rel=1e-12)
    assert joint_spectral_radius(q.realization.A, N + 1).nilpotent_at == N + 1


def test_qn1d_negative_and_complex_coefficients():
    a = [0.5, -2.0, 1j, 0.0, -0.25 + 0.5j]
    q = quasinilpotent_1d(a)
    for n, an in enumerate(a):
        assert q.realization.coeff((1,) * n) == pytest.approx(an, abs=1e-14)
    alt = quasinilpotent_1d(a, branches={2: 1, 4: 3})
    for n, an in enumerate(a):
        assert alt.realization.coeff((1,) * n) == pytest.approx(an, abs=1e-14)


def test_qn1d_evaluates_taylor_polynomial():
    N = 20
    a = [1 / math.factorial(n) for n in range(N + 1)]
    q = quasinilpotent_1d(a)
    for z in np.linspace(-3, 3, 13):
        taylor = sum(a[n] * z**n for n in range(N + 1))
        val = eval_descriptor(q.realization, [[[z]]])[0, 0]
        assert abs(val - taylor) <= 1e-10 * max(1, abs(taylor))


def test_qnc_examples():
    const = quasinilpotent_nc(TruncatedSeries.constant(1.0, 2, 3))
    assert const.realization.coeff(()) == 1
    assert const.realization.coeff((1,)) == 0
    f = TruncatedSeries.from_function(lambda w: 1 / math.factorial(len(w)), 2, 4)
    q = quasinilpotent_nc(f)
    assert q.dim == 1 + sum(2**n * (n + 1) for n in range(1, 5))
    for w in words_up_to(2, 4):
        exact = 1 / math.factorial(len(w))
        assert abs(q.realization.coeff(w) - exact) <= 1e-12 * exact
    expect = 2 * max((n * n) ** (1 / n) * (1 / math.factorial(n)) ** (1 / n) for n in range(1, 5))
    assert predicted_row_norm(q) == pytest.approx(expect, rel=1e-12)
    assert row_norm(q.realization.A) == pytest.approx(expect, rel=1e-10)
    assert not np.any(adjunction_power(q.realization.A, 5))
    assert np.any(adjunction_power(q.realization.A, 4))


def test_qnc_errors():
    f = TruncatedSeries.from_function(lambda w: 1.0, 2, 3)
    with pytest.raises(InputError):
        quasinilpotent_nc(f, N=4)
    with pytest.raises(InputError):
        quasinilpotent_nc(f, dim_cap=10)


def test_qnc_certificate():
    f = TruncatedSeries.from_function(lambda w: 0.5 ** len(w), 3, 2)
    cert = quasinilpotent_nc(f).certificate()
    assert cert["nilpotency_index"] == 3
    assert cert["row_norm"] == pytest.approx(cert["predicted_row_norm"], rel=1e-10)


def test_cauchy_gap_shrinks_for_entire_series():
    f = TruncatedSeries(1, 30, {(1,) * n: 1 / math.factorial(n) for n in range(31)})
    gaps = [cauchy_gap(f, N, 30) for N in (5, 10, 15)]
    assert gaps[0] > gaps[1] > gaps[2]
