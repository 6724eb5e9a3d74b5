import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncrealize.errors import NotInvertibleError, ParseError
from ncrealize.expr import (
    Add,
    Const,
    Inv,
    Mul,
    Neg,
    Scale,
    Sub,
    Var,
    compile_expr,
    interpret,
    parse,
    random_expression,
    to_dict,
    to_string,
    value_at_zero,
)
from ncrealize.fps import words_up_to
from ncrealize.minimal import kalman_minimize, similarity_between_minimal

ONE = Const(1 + 0j)


def test_parse_examples():
    assert parse("z1*z2 - z2*z1") == Sub(Mul(Var(1), Var(2)), Mul(Var(2), Var(1)))
    assert parse("inv(1 - z1 - z2)") == Inv(Sub(Sub(ONE, Var(1)), Var(2)))
    assert parse("(1 - z1)^-1 * (1 - z2)^-1") == Mul(Inv(Sub(ONE, Var(1))), Inv(Sub(ONE, Var(2))))


def test_parse_whitespace_and_implicit_product():
    assert parse(" z1 z2 ") == parse("z1*z2") == Mul(Var(1), Var(2))
    assert parse("z1(z2)") == Mul(Var(1), Var(2))
    assert parse("2z1") == Scale(2 + 0j, Var(1))
    assert parse("2*z1") == Mul(Const(2 + 0j), Var(1))


def test_unary_minus_binds_tighter_than_plus():
    assert parse("-z1 + z2") == Add(Neg(Var(1)), Var(2))
    assert parse("-z1*z2") == Mul(Neg(Var(1)), Var(2))


def test_complex_literals():
    e = parse("(1-2i) z1")
    assert value_at_zero(parse("(1-2i)")) == 1 - 2j
    assert value_at_zero(parse("1+2i")) == 1 + 2j
    assert isinstance(e, Scale) and e.factor == 1 - 2j


@pytest.mark.parametrize("bad, pos", [("z1 +", 4), ("inv(z1", 6), ("z1 $ z2", 3), ("(z1))", 4)])
def test_parse_errors_have_positions(bad, pos):
    with pytest.raises(ParseError) as info:
        parse(bad)
    assert info.value.position == pos


def test_variable_out_of_range():
    with pytest.raises(ParseError):
        parse("z3 + z1", d=2)
    with pytest.raises(ParseError):
        parse("z0")


def test_compile_examples():
    f = compile_expr(parse("z1"), 1).series(5)
    assert f.coeffs == {(1,): 1}
    g = compile_expr(parse("inv(1 - z1*z2)"), 2).series(8)
    for w in words_up_to(2, 8):
        expect = 1.0 if len(w) % 2 == 0 and w == (1, 2) * (len(w) // 2) else 0.0
        assert abs(g[w] - expect) < 1e-12
    h = compile_expr(parse("inv(1 - z1 - z2)"), 2).series(6)
    assert all(abs(h[w] - 1) < 1e-12 for w in words_up_to(2, 6))


def test_compile_not_invertible_names_subexpression():
    with pytest.raises(NotInvertibleError, match="z1 - z2"):
        compile_expr(parse("1 + inv(z1 - z2)"), 2)
    with pytest.raises(NotInvertibleError):
        interpret(parse("inv(z1)"), 1, 4)


def test_compile_dimension_bound():
    e = parse("inv(1 - z1) * z2 + inv(2 + z1 z2)")
    r = compile_expr(e, 2)
    # leaves contribute one state each, inversions one more
    assert r.dim <= 4 + 2


@pytest.mark.parametrize("seed", range(10))
def test_compile_matches_interpret(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 4))
    e = random_expression(rng, d, int(rng.integers(1, 5)))
    N = 6 if d < 3 else 5
    a = compile_expr(e, d).series(N)
    b = interpret(e, d, N)
    for w in set(a.coeffs) | set(b.coeffs):
        assert abs(a[w] - b[w]) <= 1e-9 * max(1, abs(b[w]))


def test_minimize_independent_of_parse_tree():
    r1 = kalman_minimize(compile_expr(parse("z1*inv(1-z1)"), 1))
    r2 = kalman_minimize(compile_expr(parse("inv(1-z1)-1"), 1))
    assert r1.dim == r2.dim == 2
    assert similarity_between_minimal(r1, r2).found


def test_to_dict_shape():
    doc = to_dict(parse("2z1 - inv(z2 + 1)"))
    assert doc["node"] == "Sub"
    assert doc["left"] == {"node": "Scale", "factor": [2.0, 0.0], "arg": {"node": "Var", "index": 1}}
    assert doc["right"]["node"] == "Inv"


def test_random_expression_is_deterministic():
    a = random_expression(np.random.default_rng(3), 2, 4)
    b = random_expression(np.random.default_rng(3), 2, 4)
    assert a == b


# -- round trip ---------------------------------------------------------------

_numbers = st.sampled_from([1.0, 2.0, 0.5, -3.0, 1.25, 0.0, 1e-3, 2.5e7])
_consts = st.builds(complex, _numbers, st.sampled_from([0.0, 0.0, 1.0, -2.0]))


def _tree(children):
    return st.one_of(
        st.builds(Add, children, children),
        st.builds(Sub, children, children),
        st.builds(Mul, children, children),
        st.builds(Neg, children),
        st.builds(Inv, children),
        st.builds(Scale, _consts, children),
    )


_exprs = st.recursive(st.one_of(st.builds(Const, _consts), st.builds(Var, st.integers(1, 3))), _tree, max_leaves=8)


@settings(max_examples=300, deadline=None)
@given(_exprs)
def test_print_parse_round_trip(e):
    text = to_string(e)
    assert parse(text) == e
    assert to_string(parse(text)) == text


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_round_trip_random_expressions(seed):
    e = random_expression(np.random.default_rng(seed), 3, 4)
    assert parse(to_string(e)) == e
