"""Parser, printer, evaluator, and symbolic derivative tests."""

import pytest
from hypothesis import given, settings, strategies as st

from seqwarp.expressions import (
    BinOp,
    Call,
    Const,
    DomainError,
    Neg,
    ParseError,
    Var,
    differentiate,
    evaluate,
    free_variables,
    parse,
    to_string,
)

XY = ("x", "y")


class TestParse:
    def test_ast_structure(self):
        e = parse("x^2 + sin(y)", XY)
        assert e == BinOp("+", BinOp("^", Var("x"), Const(2.0)), Call("sin", Var("y")))

    def test_product_of_calls(self):
        e = parse("exp(x1)*cosh(x2)", ("x1", "x2"))
        assert e == BinOp("*", Call("exp", Var("x1")), Call("cosh", Var("x2")))

    def test_malformed_input_offset(self):
        with pytest.raises(ParseError) as err:
            parse("x +* y", XY)
        assert err.value.offset == 3

    def test_unclosed_call_offset_is_end_of_text(self):
        with pytest.raises(ParseError) as err:
            parse("exp(x1", ("x1",))
        assert err.value.offset == len("exp(x1")

    def test_empty(self):
        with pytest.raises(ParseError):
            parse("   ", XY)

    def test_unknown_identifier(self):
        with pytest.raises(ParseError, match="unknown identifier 'z'"):
            parse("x + z", XY)

    def test_unknown_function(self):
        with pytest.raises(ParseError, match="unknown function 'foo'"):
            parse("foo(x)", XY)

    def test_unexpected_character(self):
        with pytest.raises(ParseError) as err:
            parse("x + $y", XY)
        assert err.value.offset == 4

    def test_trailing_garbage(self):
        with pytest.raises(ParseError):
            parse("x + y)", XY)

    def test_whitespace_insensitive(self):
        assert parse(" x\t+ y ", XY) == parse("x+y", XY)

    def test_precedence_and_associativity(self):
        assert evaluate(parse("2 + 3 * 4", ()), {}) == 14.0
        assert evaluate(parse("2^3^2", ()), {}) == pytest.approx(512.0)  # right-assoc
        assert evaluate(parse("6 / 3 / 2", ()), {}) == 1.0  # left-associative
        assert evaluate(parse("-2^2", ()), {}) == -4.0  # ^ binds tighter than -
        assert evaluate(parse("2e-1 + 1.5E1", ()), {}) == pytest.approx(15.2)


class TestEvaluate:
    def test_linear(self):
        assert evaluate(parse("2*x", XY), {"x": 3.0}) == 6.0

    def test_exp_zero(self):
        assert evaluate(parse("exp(x)", XY), {"x": 0.0}) == 1.0

    def test_sqrt_negative_is_domain_error(self):
        with pytest.raises(DomainError):
            evaluate(parse("sqrt(x)", XY), {"x": -1.0})

    def test_log_domain(self):
        with pytest.raises(DomainError):
            evaluate(parse("log(x)", XY), {"x": 0.0})

    def test_division_by_zero_names_subexpression(self):
        with pytest.raises(DomainError, match="1.0 / x"):
            evaluate(parse("1/x", XY), {"x": 0.0})

    def test_negative_base_integer_power(self):
        assert evaluate(parse("x^3", XY), {"x": -2.0}) == -8.0

    def test_negative_base_fractional_power_rejected(self):
        with pytest.raises(DomainError):
            evaluate(parse("x^0.5", XY), {"x": -2.0})

    def test_expression_exponent(self):
        assert evaluate(parse("x^y", XY), {"x": 2.0, "y": 3.0}) == pytest.approx(8.0)

    def test_unbound_variable(self):
        with pytest.raises(ValueError, match="unbound"):
            evaluate(parse("x + y", XY), {"x": 1.0})


class TestDifferentiate:
    CASES = [
        ("x^2 + sin(y)", {"x": 0.7, "y": 0.3}),
        ("exp(x)*cosh(y)", {"x": -0.2, "y": 0.9}),
        ("tanh(x*y) + sqrt(2 + x)", {"x": 0.4, "y": -1.1}),
        ("log(2 + sin(x)) / (1 + y^2)", {"x": 1.3, "y": 0.5}),
        ("x^y", {"x": 1.7, "y": 2.3}),
        ("tan(x) - sinh(y)*x", {"x": 0.6, "y": 0.2}),
    ]

    @pytest.mark.parametrize("text,point", CASES)
    def test_against_finite_differences(self, text, point):
        from conftest import fd_gradient

        e = parse(text, point)
        coords = sorted(point)
        x0 = [point[c] for c in coords]

        def fn(xs):
            return evaluate(e, dict(zip(coords, xs)))

        fd = fd_gradient(fn, x0)
        for i, c in enumerate(coords):
            exact = evaluate(differentiate(e, c), point)
            assert exact == pytest.approx(fd[i], rel=1e-6, abs=1e-8)

    def test_constant_derivative_is_zero(self):
        assert differentiate(parse("3.5", ()), "x") == Const(0.0)


def test_free_variables():
    assert free_variables(parse("x*sin(y) + 2", XY)) == {"x", "y"}
    assert free_variables(parse("4.2", ())) == frozenset()


# ---------------------------------------------------------------------------
# Round-trip property: printing then parsing rebuilds the same tree
# ---------------------------------------------------------------------------

_FN_NAMES = st.sampled_from(
    ["sin", "cos", "tan", "sinh", "cosh", "tanh", "exp", "log", "sqrt"]
)
_VARS = st.sampled_from(["x", "y", "z_1"])
_CONSTS = st.floats(
    min_value=0.0, max_value=1e6, allow_nan=False, allow_infinity=False
).map(Const)


def _expr_strategy():
    leaves = st.one_of(_CONSTS, _VARS.map(Var))

    def extend(children):
        return st.one_of(
            children.map(Neg),
            st.tuples(_FN_NAMES, children).map(lambda t: Call(*t)),
            st.tuples(st.sampled_from("+-*/^"), children, children).map(
                lambda t: BinOp(*t)
            ),
        )

    return st.recursive(leaves, extend, max_leaves=24)


@settings(max_examples=300, deadline=None)
@given(_expr_strategy())
def test_print_parse_round_trip(e):
    assert parse(to_string(e), ("x", "y", "z_1")) == e

