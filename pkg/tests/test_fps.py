import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncrealize.errors import AlphabetError, NotInvertibleError
from ncrealize.fps import (
    TruncatedSeries,
    backward_shift,
    radius_estimate,
    series_add,
    series_invert,
    series_mul,
    series_transpose,
    word_concat,
    word_transpose,
    words_up_to,
)


def random_series(rng, d, N, density=0.7, const=None):
    coeffs = {}
    for w in words_up_to(d, N):
        if rng.random() < density:
            coeffs[w] = complex(rng.standard_normal(), rng.standard_normal())
    if const is not None:
        coeffs[()] = const
    return TruncatedSeries(d, N, coeffs)


def test_word_concat_examples():
    assert word_concat((), (1, 2)) == (1, 2)
    assert word_concat((1, 2), (1,)) == (1, 2, 1)
    assert word_concat((2,), ()) == (2,)


def test_word_transpose_examples():
    assert word_transpose((1, 2, 3)) == (3, 2, 1)
    assert word_transpose(()) == ()
    assert word_transpose((1, 1)) == (1, 1)


def test_monoid_laws_exhaustive():
    for d in (1, 2, 3):
        words = list(words_up_to(d, 4 if d < 3 else 3))
        for u in words:
            assert word_concat((), u) == u == word_concat(u, ())
            assert word_transpose(word_transpose(u)) == u
        sample = words[:: max(1, len(words) // 12)]
        for u, v, w in itertools.product(sample, repeat=3):
            assert word_concat(word_concat(u, v), w) == word_concat(u, word_concat(v, w))
            assert len(word_concat(u, v)) == len(u) + len(v)


def test_add_examples():
    f = TruncatedSeries(1, 3, {(): 1, (1,): 1})
    g = TruncatedSeries(1, 3, {(1,): 1})
    assert series_add(f, g).coeffs == {(): 1, (1,): 2}
    assert series_add(f, TruncatedSeries.zero(1, 3)) == f
    h = series_add(TruncatedSeries(2, 2, {(1, 2): 1}), TruncatedSeries(2, 2, {(2, 1): 1}))
    assert h.coeffs == {(1, 2): 1, (2, 1): 1}


def test_add_alphabet_mismatch():
    with pytest.raises(AlphabetError):
        series_add(TruncatedSeries.zero(1, 2), TruncatedSeries.zero(2, 2))


def test_mul_noncommutative_and_unit():
    z1 = TruncatedSeries.variable(1, 2, 3)
    z2 = TruncatedSeries.variable(2, 2, 3)
    assert (z1 * z2).coeffs == {(1, 2): 1}
    assert (z2 * z1).coeffs == {(2, 1): 1}
    f = random_series(np.random.default_rng(0), 2, 3)
    assert series_mul(TruncatedSeries.constant(1, 2, 3), f) == f


def test_mul_geometric_square():
    N = 10
    geo = TruncatedSeries(1, N, {(1,) * n: 1 for n in range(N + 1)})
    sq = geo * geo
    # direct convolution loop
    for n in range(N + 1):
        expect = sum(1 for k in range(n + 1))
        assert sq[(1,) * n] == expect == n + 1


def test_degree_bound_is_min():
    f = TruncatedSeries.variable(1, 1, 5)
    g = TruncatedSeries.variable(1, 1, 3)
    assert (f + g).degree_bound == 3
    assert (f * g).degree_bound == 3


def test_invert_examples():
    f = TruncatedSeries(1, 8, {(): 1, (1,): -1})
    assert series_invert(f).coeffs == {(1,) * n: 1 for n in range(9)}
    assert series_invert(TruncatedSeries.constant(2, 1, 4)).coeffs == {(): 0.5}
    g = TruncatedSeries(2, 5, {(): 1, (1,): -1, (2,): -1})
    inv = series_invert(g)
    # every word has exactly one factorisation into single letters
    for w in words_up_to(2, 5):
        assert inv[w] == pytest.approx(1.0, abs=1e-14)


def test_invert_vanishing_constant():
    with pytest.raises(NotInvertibleError):
        series_invert(TruncatedSeries.variable(1, 2, 3))


def test_invert_property_random():
    rng = np.random.default_rng(1)
    for _ in range(10):
        d = int(rng.integers(1, 4))
        c = complex(rng.uniform(0.5, 2)) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        f = random_series(rng, d, 4, const=c)
        prod = f * series_invert(f)
        unit = TruncatedSeries.constant(1, d, 4)
        assert prod.allclose(unit, atol=1e-10)
        assert (series_invert(f) * f).allclose(unit, atol=1e-10)


def test_ring_laws_random():
    rng = np.random.default_rng(2)
    for d in (1, 2, 3):
        f, g, h = (random_series(rng, d, 3) for _ in range(3))
        assert ((f + g) + h).allclose(f + (g + h), atol=1e-12)
        assert ((f * g) * h).allclose(f * (g * h), atol=1e-12)
        assert (f * (g + h)).allclose(f * g + f * h, atol=1e-12)
        assert ((f + g) * h).allclose(f * h + g * h, atol=1e-12)


def test_backward_shift_examples():
    z12 = TruncatedSeries(2, 3, {(1, 2): 1})
    assert backward_shift(z12, 1, "left").coeffs == {(2,): 1}
    assert backward_shift(z12, 2, "right").coeffs == {(1,): 1}
    assert backward_shift(z12, 2, "left").coeffs == {}
    assert backward_shift(z12, 1, "left").degree_bound == 2


def test_transpose_examples_and_antihomomorphism():
    assert series_transpose(TruncatedSeries(2, 2, {(1, 2): 1})).coeffs == {(2, 1): 1}
    pal = TruncatedSeries(2, 3, {(1, 2, 1): 2, (2,): 1, (): 3})
    assert series_transpose(pal) == pal
    rng = np.random.default_rng(3)
    for d in (2, 3):
        f, g = random_series(rng, d, 4), random_series(rng, d, 4)
        assert series_transpose(series_transpose(f)) == f
        lhs = series_transpose(f * g)
        rhs = series_transpose(g) * series_transpose(f)
        assert lhs.allclose(rhs, atol=1e-12)


def test_shift_commutes_with_transpose():
    rng = np.random.default_rng(4)
    f = random_series(rng, 3, 4)
    for j in (1, 2, 3):
        assert series_transpose(backward_shift(f, j, "left")) == backward_shift(series_transpose(f), j, "right")


def test_radius_examples():
    N = 40
    geo = TruncatedSeries(1, N, {(1,) * n: 1 for n in range(N + 1)})
    est = radius_estimate(geo)
    assert all(r == pytest.approx(1.0) for r in est.roots)
    assert est.radius == pytest.approx(1.0)
    ones2 = TruncatedSeries.from_function(lambda w: 1.0, 2, 10)
    est2 = radius_estimate(ones2)
    assert all(r == pytest.approx(math.sqrt(2)) for r in est2.roots)
    assert est2.radius == pytest.approx(1 / math.sqrt(2))


def test_radius_factorial_grows_with_degree():
    radii = []
    for N in (10, 20, 40):
        # coefficients above the pruning floor only; exp(-n log n) decay
        f = TruncatedSeries(1, N, {(1,) * n: 1 / math.factorial(n) for n in range(N + 1)})
        radii.append(radius_estimate(f).radius)
    assert radii[0] < radii[1] < radii[2]


def test_radius_zero_series_is_infinite():
    assert radius_estimate(TruncatedSeries.constant(3, 1, 5)).radius == math.inf


def test_pruning_applies_to_arithmetic_only():
    f = TruncatedSeries(1, 3, {(1,): 1e-15, (): 1.0, (1, 1): 0.0})
    assert f.coeffs == {(): 1.0, (1,): 1e-15}
    g = TruncatedSeries(1, 3, {(1,): -1e-15 + 1e-30})
    assert (1,) not in (f + g).coeffs
    assert (1,) not in (f * TruncatedSeries.constant(1.0, 1, 3) + g).coeffs


def test_radius_exponential_at_degree_40():
    N = 40
    f = TruncatedSeries(1, N, {(1,) * n: 1 / math.factorial(n) for n in range(N + 1)})
    est = radius_estimate(f)
    tail = [math.factorial(n) ** (1 / n) for n in range(31, N + 1)]
    assert est.radius == pytest.approx(min(tail), rel=1e-10)
    assert est.radius > 10


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 3), max_size=5), st.lists(st.integers(1, 3), max_size=5))
def test_transpose_of_concat(u, v):
    u, v = tuple(u), tuple(v)
    assert word_transpose(word_concat(u, v)) == word_concat(word_transpose(v), word_transpose(u))
