import numpy as np
import pytest

from ncrealize.entire import monomial_realization
from ncrealize.errors import DomainError, NotInvertibleError, StructuralError
from ncrealize.fps import TruncatedSeries, backward_shift
from ncrealize.realization import (
    DescriptorRealization,
    FMRealization,
    MatrixTuple,
    col_norm,
    descriptor_add,
    descriptor_from_fm,
    descriptor_invert,
    descriptor_mul,
    eval_descriptor,
    eval_fm,
    fm_add,
    fm_from_descriptor,
    fm_invert,
    fm_mul,
    pencil_apply,
    random_descriptor,
    random_fm,
    realization_from_dict,
    row_norm,
    series_from_realization,
    shift_realization,
)

RNG = np.random.default_rng(20261016)


def close(f, g, tol=1e-9):
    words = set(f.coeffs) | set(g.coeffs)
    return all(abs(f[w] - g[w]) <= tol * max(1.0, abs(g[w])) for w in words)


def test_pencil_examples():
    X = MatrixTuple.random(RNG, 2, 3)
    assert np.allclose(pencil_apply(np.zeros((2, 2, 2)), X), np.eye(6))
    assert np.allclose(pencil_apply([[[1.0]]], [[[2.0]]]), [[-1.0]])
    A = RNG.standard_normal((1, 2, 2))
    D = MatrixTuple([np.diag([0.3, -0.7])])
    L = pencil_apply(A, D)
    assert np.allclose(L[:2, 2:], 0) and np.allclose(L[2:, :2], 0)
    assert np.allclose(L[:2, :2], pencil_apply(A, [[[0.3]]]))
    assert np.allclose(L[2:, 2:], pencil_apply(A, [[[-0.7]]]))


def test_kronecker_order_level_first():
    A = np.array([[[1.0, 2.0], [3.0, 4.0]]])
    X = np.array([[[0.0, 1.0], [0.0, 0.0]]])
    assert np.allclose(pencil_apply(A, X), np.eye(4) - np.kron(X[0], A[0]))


def test_eval_descriptor_examples():
    r = DescriptorRealization([[[0.5]]], [1.0], [1.0])
    assert eval_descriptor(r, [[[1.0]]])[0, 0] == pytest.approx(2.0)
    z = DescriptorRealization(RNG.standard_normal((2, 3, 3)), np.zeros(3), RNG.standard_normal(3))
    assert np.allclose(eval_descriptor(z, MatrixTuple.random(RNG, 2, 2, 0.1)), 0)
    m = monomial_realization((1, 2), 2)
    X = MatrixTuple([[[0, 1], [0, 0]], [[0, 0], [1, 0]]])
    assert np.allclose(eval_descriptor(m, X), np.diag([1.0, 0.0]))


def test_eval_fm_examples():
    const = FMRealization(np.zeros((1, 0, 0)), np.zeros((1, 0)), np.zeros(0), 3.0)
    assert np.allclose(eval_fm(const, MatrixTuple.random(RNG, 1, 2)), 3 * np.eye(2))
    aff = FMRealization([[[0.0]]], [[-1.0]], [1.0], 1.0)
    assert eval_fm(aff, [[[3.0]]])[0, 0] == pytest.approx(-2.0)
    assert eval_fm(fm_invert(aff), [[[0.5]]])[0, 0] == pytest.approx(2.0)


def test_singular_pencil_raises_with_rcond():
    r = DescriptorRealization([[[1.0]]], [1.0], [1.0])
    with pytest.raises(DomainError) as info:
        eval_descriptor(r, [[[1.0]]])
    assert info.value.rcond < 1e-10


def test_coeff_examples():
    r = DescriptorRealization([[[0.5]]], [1.0], [1.0])
    for n in range(6):
        assert r.coeff((1,) * n) == pytest.approx(0.5**n)
    s = random_descriptor(RNG, 2, 3)
    assert s.coeff(()) == pytest.approx(np.vdot(s.b, s.c))
    f = random_fm(RNG, 2, 3)
    assert f.coeff(()) == f.D


def test_coeff_word_order():
    r = random_descriptor(RNG, 2, 3)
    w = (1, 2, 2)
    expect = np.vdot(r.b, r.A[0] @ r.A[1] @ r.A[1] @ r.c)
    assert r.coeff(w) == pytest.approx(expect)
    f = random_fm(RNG, 2, 3)
    assert f.coeff(w) == pytest.approx(f.C @ f.A[0] @ f.A[1] @ f.B[1])


@pytest.mark.parametrize("seed", range(6))
def test_descriptor_arithmetic_oracle(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 4))
    r = random_descriptor(rng, d, int(rng.integers(1, 5)))
    s = random_descriptor(rng, d, int(rng.integers(1, 5)))
    N = 6 if d < 3 else 5
    fr, fs = r.series(N), s.series(N)
    assert close(series_from_realization(descriptor_add(r, s), N), fr + fs)
    assert close(series_from_realization(descriptor_mul(r, s), N), fr * fs)
    assert close(series_from_realization(descriptor_invert(r), N), fr.invert())


@pytest.mark.parametrize("seed", range(6))
def test_fm_arithmetic_oracle(seed):
    rng = np.random.default_rng(100 + seed)
    d = int(rng.integers(1, 4))
    r = random_fm(rng, d, int(rng.integers(1, 5)))
    s = random_fm(rng, d, int(rng.integers(1, 5)))
    N = 6 if d < 3 else 5
    fr, fs = r.series(N), s.series(N)
    assert close(fm_add(r, s).series(N), fr + fs)
    assert close(fm_mul(r, s).series(N), fr * fs)
    assert close(fm_invert(r).series(N), fr.invert())
    assert close(fm_invert(fm_invert(r)).series(N), fr)


def test_invert_of_one_minus_z():
    r = DescriptorRealization([[[0.0]]], [1.0], [1.0])
    one_minus = descriptor_add(DescriptorRealization([[[0.0]]], [1.0], [1.0]), DescriptorRealization([[[0.0, 1.0], [0.0, 0.0]]], [-1.0, 0.0], [0.0, 1.0]))
    s = descriptor_invert(one_minus).series(6)
    assert all(s[(1,) * n] == pytest.approx(1.0) for n in range(7))
    assert r.coeff(()) == 1


def test_not_invertible_at_zero():
    with pytest.raises(NotInvertibleError):
        descriptor_invert(DescriptorRealization([[[0.0]]], [1.0], [0.0]))
    with pytest.raises(NotInvertibleError):
        fm_invert(FMRealization.variable(1, 1))


def test_structural_mismatch():
    with pytest.raises(StructuralError):
        fm_add(random_fm(RNG, 1, 2), random_fm(RNG, 2, 2))
    with pytest.raises(StructuralError):
        eval_descriptor(random_descriptor(RNG, 2, 2), MatrixTuple.random(RNG, 3, 2))


@pytest.mark.parametrize("seed", range(5))
def test_conversions_preserve_coefficients(seed):
    rng = np.random.default_rng(200 + seed)
    d = int(rng.integers(1, 4))
    r = random_descriptor(rng, d, 4)
    N = 6 if d < 3 else 5
    fr = r.series(N)
    f = fm_from_descriptor(r)
    assert f.dim <= r.dim
    assert close(f.series(N), fr, 1e-12)
    back = descriptor_from_fm(f)
    assert back.dim == f.dim + 1
    assert close(back.series(N), fr, 1e-12)
    g = random_fm(rng, d, 3)
    assert close(fm_from_descriptor(descriptor_from_fm(g)).series(N), g.series(N), 1e-12)


def test_conversion_constants():
    c = DescriptorRealization(np.zeros((2, 2, 2)), [1.0, 2.0], [3.0, 1.0])
    f = fm_from_descriptor(c)
    assert f.dim == 0 and f.D == pytest.approx(5.0)
    g = descriptor_from_fm(FMRealization.constant(2.5, 2))
    assert np.vdot(g.b, g.c) == pytest.approx(2.5)


def test_shift_realizations():
    rng = np.random.default_rng(7)
    r = random_descriptor(rng, 2, 3)
    f = r.series(6)
    for j in (1, 2):
        for side in ("left", "right"):
            sr = shift_realization(r, j, side)
            assert sr.dim == r.dim
            assert close(sr.series(5), backward_shift(f, j, side))
    lr = shift_realization(shift_realization(r, 1, "left"), 2, "right")
    rl = shift_realization(shift_realization(r, 2, "right"), 1, "left")
    for w in [(), (1,), (2, 1)]:
        assert lr.coeff(w) == pytest.approx(r.coeff((1,) + w + (2,)))
        assert rl.coeff(w) == pytest.approx(r.coeff((1,) + w + (2,)))
    m = shift_realization(monomial_realization((1, 2), 2), 1, "left")
    assert close(m.series(4), TruncatedSeries(2, 4, {(2,): 1}), 1e-14)


def test_norms():
    U = np.linalg.qr(RNG.standard_normal((3, 3)))[0]
    assert row_norm([U, np.zeros((3, 3))]) == pytest.approx(1.0)
    for d in (1, 2, 3):
        I = np.array([np.eye(2)] * d)
        assert row_norm(I) == pytest.approx(np.sqrt(d))
        assert col_norm(I) == pytest.approx(np.sqrt(d))
    assert row_norm(np.zeros((2, 3, 3))) == 0.0


def test_nc_function_axioms():
    rng = np.random.default_rng(8)
    r = random_descriptor(rng, 2, 3, scale=0.5)
    X = MatrixTuple.random(rng, 2, 2, 0.3)
    Z = MatrixTuple.random(rng, 2, 1, 0.3)
    F = eval_descriptor(r, X.direct_sum(Z))
    assert F.shape == (3, 3)
    assert np.allclose(F[:2, :2], eval_descriptor(r, X), atol=1e-10)
    assert np.allclose(F[2:, 2:], eval_descriptor(r, Z), atol=1e-10)
    assert np.allclose(F[:2, 2:], 0, atol=1e-12)
    # similarity with a well-conditioned S
    U, _, Vh = np.linalg.svd(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
    S = U @ np.diag([1.0, 0.2]) @ Vh
    Si = np.linalg.inv(S)
    lhs = eval_descriptor(r, X.similar(S))
    assert np.allclose(lhs, Si @ eval_descriptor(r, X) @ S, atol=1e-8)


def test_geometric_series_consistency():
    rng = np.random.default_rng(9)
    r = random_descriptor(rng, 2, 3, scale=1.0)
    X = MatrixTuple.random(rng, 2, 2)
    X = X * (0.5 / (X.row_norm() * col_norm(r.A)))
    exact = eval_descriptor(r, X)
    s = r.series(12)
    errs = []
    partial = np.zeros((2, 2), dtype=complex)
    for n in range(13):
        for w, v in s.homogeneous(n).items():
            partial = partial + v * X.monomial(w)
        errs.append(np.linalg.norm(partial - exact))
    C = errs[0] + 1.0
    assert all(e <= C * 0.5**n * (np.linalg.norm(r.b) * np.linalg.norm(r.c) + 1) for n, e in enumerate(errs))
    assert errs[-1] < 1e-3


def test_fm_inverse_eval_identity():
    rng = np.random.default_rng(10)
    for _ in range(5):
        r = random_fm(rng, 2, 3)
        X = MatrixTuple.random(rng, 2, 3, 0.4)
        assert np.allclose(eval_fm(fm_invert(r), X) @ eval_fm(r, X), np.eye(3), atol=1e-8)


def test_json_roundtrip():
    for r in (random_descriptor(RNG, 2, 3), random_fm(RNG, 3, 2)):
        back = realization_from_dict(r.to_dict())
        assert type(back) is type(r)
        assert np.allclose(back.A, r.A)
        assert close(back.series(4), r.series(4), 1e-15)
    X = MatrixTuple.random(RNG, 2, 3)
    assert np.allclose(MatrixTuple.from_dict(X.to_dict()).mats, X.mats)
