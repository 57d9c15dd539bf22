"""Forward-mode jet tests: frozen values, finite-difference cross-checks,
and the bitwise Hessian symmetry guarantee."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import expr_fn, fd_gradient, fd_hessian
from seqwarp.expressions import DomainError, parse
from seqwarp.jets import eval_jet


class TestFrozenValues:
    def test_square(self):
        value, grad, hess = eval_jet(parse("x^2", ("x",)), {"x": 3.0}, 2)
        assert value == 9.0
        assert grad.tolist() == [6.0]
        assert hess.tolist() == [[2.0]]

    def test_product_first_order(self):
        value, grad = eval_jet(parse("sin(x)*y", ("x", "y")), {"x": 0.0, "y": 2.0}, 1)
        assert value == 0.0
        assert grad.tolist() == [2.0, 0.0]

    def test_exp_all_orders_match_fd(self):
        e = parse("exp(x)", ("x",))
        value, grad, hess = eval_jet(e, {"x": 1.0}, 2)
        assert value == pytest.approx(math.e, rel=1e-12)
        fn = expr_fn(e, ["x"])
        fd_g = fd_gradient(fn, np.array([1.0]))
        fd_h = fd_hessian(fn, np.array([1.0]))
        assert grad[0] == pytest.approx(fd_g[0], rel=1e-6)
        assert hess[0, 0] == pytest.approx(fd_h[0, 0], rel=1e-6)

    def test_constant_jet_is_exactly_flat(self):
        value, grad, hess = eval_jet(parse("7", ("x", "y")), {"x": 0.3, "y": 2.0}, 2)
        assert value == 7.0
        assert not grad.any()
        assert not hess.any()


SMOOTH_CASES = [
    ("x^2*sin(y) + cosh(x)", {"x": 0.8, "y": -0.6}),
    ("exp(x)*tanh(y) + x*y^3", {"x": -0.4, "y": 1.2}),
    ("log(3 + sin(x)) * sqrt(4 + y^2)", {"x": 2.1, "y": 0.7}),
    ("1/(2 + cos(x)) + tan(y)", {"x": 0.5, "y": 0.9}),
    ("(2 + sin(x))^3 / (1 + y^2)", {"x": 1.0, "y": -0.3}),
    ("x^y", {"x": 2.5, "y": 1.7}),
    ("sinh(x*y)", {"x": 0.3, "y": 0.8}),
]


@pytest.mark.parametrize("text,point", SMOOTH_CASES)
def test_gradient_matches_central_differences(text, point):
    coords = sorted(point)
    e = parse(text, coords)
    _, grad = eval_jet(e, point, 1, coords)
    fd = fd_gradient(expr_fn(e, coords), np.array([point[c] for c in coords]))
    assert grad == pytest.approx(fd, rel=1e-6, abs=1e-9)


@pytest.mark.parametrize("text,point", SMOOTH_CASES)
def test_hessian_matches_central_differences(text, point):
    coords = sorted(point)
    e = parse(text, coords)
    _, _, hess = eval_jet(e, point, 2, coords)
    fd = fd_hessian(expr_fn(e, coords), np.array([point[c] for c in coords]))
    assert hess == pytest.approx(fd, rel=2e-5, abs=1e-6)


@pytest.mark.parametrize("text,point", SMOOTH_CASES)
def test_hessian_bitwise_symmetric(text, point):
    coords = sorted(point)
    _, _, hess = eval_jet(parse(text, coords), point, 2, coords)
    assert np.array_equal(hess, hess.T)


class TestPowers:
    def test_integer_power_negative_base(self):
        value, grad, hess = eval_jet(parse("x^3", ("x",)), {"x": -2.0}, 2)
        assert (value, grad[0], hess[0, 0]) == (-8.0, 12.0, -12.0)

    def test_negative_integer_power(self):
        value, grad = eval_jet(parse("x^-2", ("x",)), {"x": 2.0}, 1)
        assert value == 0.25
        assert grad[0] == pytest.approx(-2.0 * 2.0**-3)

    def test_fractional_power_matches_sqrt(self):
        a = eval_jet(parse("x^0.5", ("x",)), {"x": 2.3}, 2)
        b = eval_jet(parse("sqrt(x)", ("x",)), {"x": 2.3}, 2)
        assert a[0] == pytest.approx(b[0], rel=1e-14)
        assert a[1][0] == pytest.approx(b[1][0], rel=1e-12)
        assert a[2][0, 0] == pytest.approx(b[2][0, 0], rel=1e-12)

    def test_fractional_power_domain(self):
        with pytest.raises(DomainError):
            eval_jet(parse("x^0.5", ("x",)), {"x": -1.0}, 1)

    def test_division_by_zero(self):
        with pytest.raises(DomainError):
            eval_jet(parse("1/x", ("x",)), {"x": 0.0}, 2)


def test_coordinate_order_controls_component_order():
    e = parse("x + 2*y", ("x", "y"))
    _, grad = eval_jet(e, {"x": 0.0, "y": 0.0}, 1, coords=("y", "x"))
    assert grad.tolist() == [2.0, 1.0]


def test_unknown_order():
    with pytest.raises(ValueError):
        eval_jet(parse("x", ("x",)), {"x": 1.0}, 3)


@settings(max_examples=150, deadline=None)
@given(
    case=st.integers(min_value=0, max_value=len(SMOOTH_CASES) - 1),
    dx=st.floats(min_value=-0.3, max_value=0.3),
    dy=st.floats(min_value=-0.3, max_value=0.3),
)
def test_gradient_fd_agreement_on_random_points(case, dx, dy):
    # random points inside safe neighborhoods of the curated inputs
    text, base = SMOOTH_CASES[case]
    coords = sorted(base)
    point = {coords[0]: base[coords[0]] + dx, coords[1]: base[coords[1]] + dy}
    e = parse(text, coords)
    _, grad = eval_jet(e, point, 1, coords)
    fd = fd_gradient(expr_fn(e, coords), np.array([point[c] for c in coords]))
    scale = 1.0 + float(np.max(np.abs(fd)))
    assert np.max(np.abs(grad - fd)) <= 1e-6 * scale
