"""Forward-mode differentiation of expressions: exact gradients and Hessians.

Expressions are evaluated over dual numbers (value + gradient) or
hyper-dual numbers (value + gradient + Hessian), so first and second
partial derivatives come out exact to rounding.  Curvature work needs
exact second derivatives of metric entries; finite differences exist in
the test suite only, as an independent cross-check.

The Hessians produced here are symmetric bitwise: every update is built
from symmetric outer-product combinations.
"""

from __future__ import annotations

import math
from typing import Mapping, Sequence

import numpy as np

from .expressions import (
    MAX_UNROLLED_EXPONENT,
    BinOp,
    Call,
    Const,
    DomainError,
    Expr,
    ExpressionError,
    Neg,
    Var,
    integer_exponent,
    to_string,
)

__all__ = ["Dual", "HyperDual", "eval_jet"]


def _fn_table(name: str, x: float, node: Expr) -> tuple[float, float, float]:
    """Value and first two derivatives of a unary function at ``x``."""
    if name == "sin":
        s, c = math.sin(x), math.cos(x)
        return s, c, -s
    if name == "cos":
        s, c = math.sin(x), math.cos(x)
        return c, -s, -c
    if name == "tan":
        t = math.tan(x)
        d = 1.0 + t * t
        return t, d, 2.0 * t * d
    if name == "sinh":
        return math.sinh(x), math.cosh(x), math.sinh(x)
    if name == "cosh":
        return math.cosh(x), math.sinh(x), math.cosh(x)
    if name == "tanh":
        t = math.tanh(x)
        d = 1.0 - t * t
        return t, d, -2.0 * t * d
    if name == "exp":
        e = math.exp(x)
        return e, e, e
    if name == "log":
        if x <= 0.0:
            raise DomainError(f"log of non-positive value {x!r} in {to_string(node)!r}")
        return math.log(x), 1.0 / x, -1.0 / (x * x)
    if name == "sqrt":
        if x < 0.0:
            raise DomainError(f"sqrt of negative value {x!r} in {to_string(node)!r}")
        if x == 0.0:
            raise DomainError(f"sqrt derivative at zero in {to_string(node)!r}")
        r = math.sqrt(x)
        return r, 0.5 / r, -0.25 / (x * r)
    raise ExpressionError(f"unknown function {name!r}")


class Dual:
    """First-order jet: value plus gradient with respect to n coordinates."""

    __slots__ = ("value", "grad")

    def __init__(self, value: float, grad: np.ndarray):
        self.value = value
        self.grad = grad

    @classmethod
    def constant(cls, value: float, n: int) -> "Dual":
        return cls(value, np.zeros(n))

    @classmethod
    def seed(cls, value: float, index: int, n: int) -> "Dual":
        g = np.zeros(n)
        g[index] = 1.0
        return cls(value, g)

    def __add__(self, o: "Dual") -> "Dual":
        return Dual(self.value + o.value, self.grad + o.grad)

    def __sub__(self, o: "Dual") -> "Dual":
        return Dual(self.value - o.value, self.grad - o.grad)

    def __neg__(self) -> "Dual":
        return Dual(-self.value, -self.grad)

    def __mul__(self, o: "Dual") -> "Dual":
        return Dual(self.value * o.value, self.value * o.grad + o.value * self.grad)

    def reciprocal(self, node: Expr) -> "Dual":
        if self.value == 0.0:
            raise DomainError(f"division by zero in {to_string(node)!r}")
        v = 1.0 / self.value
        return Dual(v, -v * v * self.grad)

    def chain(self, f: float, df: float, _d2f: float) -> "Dual":
        return Dual(f, df * self.grad)


class HyperDual:
    """Second-order jet: value, gradient, and bitwise-symmetric Hessian."""

    __slots__ = ("value", "grad", "hess")

    def __init__(self, value: float, grad: np.ndarray, hess: np.ndarray):
        self.value = value
        self.grad = grad
        self.hess = hess

    @classmethod
    def constant(cls, value: float, n: int) -> "HyperDual":
        return cls(value, np.zeros(n), np.zeros((n, n)))

    @classmethod
    def seed(cls, value: float, index: int, n: int) -> "HyperDual":
        g = np.zeros(n)
        g[index] = 1.0
        return cls(value, g, np.zeros((n, n)))

    def __add__(self, o: "HyperDual") -> "HyperDual":
        return HyperDual(self.value + o.value, self.grad + o.grad, self.hess + o.hess)

    def __sub__(self, o: "HyperDual") -> "HyperDual":
        return HyperDual(self.value - o.value, self.grad - o.grad, self.hess - o.hess)

    def __neg__(self) -> "HyperDual":
        return HyperDual(-self.value, -self.grad, -self.hess)

    def __mul__(self, o: "HyperDual") -> "HyperDual":
        cross = np.outer(self.grad, o.grad)
        return HyperDual(
            self.value * o.value,
            self.value * o.grad + o.value * self.grad,
            self.value * o.hess + o.value * self.hess + cross + cross.T,
        )

    def reciprocal(self, node: Expr) -> "HyperDual":
        if self.value == 0.0:
            raise DomainError(f"division by zero in {to_string(node)!r}")
        v = 1.0 / self.value
        outer = np.outer(self.grad, self.grad)
        return HyperDual(v, -v * v * self.grad, -v * v * self.hess + 2.0 * v**3 * outer)

    def chain(self, f: float, df: float, d2f: float) -> "HyperDual":
        return HyperDual(
            f,
            df * self.grad,
            df * self.hess + d2f * np.outer(self.grad, self.grad),
        )


def _int_power(u, n: int, cls, node: Expr, dim: int):
    if n == 0:
        return cls.constant(1.0, dim)
    if abs(n) > MAX_UNROLLED_EXPONENT:
        # analytic power rule; integer exponents keep negative bases legal
        if u.value == 0.0 and n < 0:
            raise DomainError(f"zero raised to a negative power in {to_string(node)!r}")
        f = u.value**n
        df = n * u.value ** (n - 1)
        d2f = n * (n - 1) * u.value ** (n - 2)
        return u.chain(f, df, d2f)
    out = u
    for _ in range(abs(n) - 1):
        out = out * u
    if n < 0:
        out = out.reciprocal(node)
    return out


def _eval(e: Expr, env: dict, cls, dim: int):
    if isinstance(e, Const):
        return cls.constant(e.value, dim)
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise ExpressionError(f"unbound variable {e.name!r}") from None
    if isinstance(e, Neg):
        return -_eval(e.arg, env, cls, dim)
    if isinstance(e, Call):
        u = _eval(e.arg, env, cls, dim)
        return u.chain(*_fn_table(e.fn, u.value, e))
    if isinstance(e, BinOp):
        if e.op == "^":
            u = _eval(e.left, env, cls, dim)
            n = integer_exponent(e.right)
            if n is not None:
                return _int_power(u, n, cls, node=e, dim=dim)
            if u.value <= 0.0:
                raise DomainError(
                    f"power with non-positive base {u.value!r} in {to_string(e)!r}"
                )
            if isinstance(e.right, Const):
                c = e.right.value
                f = u.value**c
                return u.chain(f, c * u.value ** (c - 1.0), c * (c - 1.0) * u.value ** (c - 2.0))
            w = _eval(e.right, env, cls, dim)
            logu = u.chain(*_fn_table("log", u.value, e))
            prod = w * logu
            return prod.chain(*_fn_table("exp", prod.value, e))
        a = _eval(e.left, env, cls, dim)
        b = _eval(e.right, env, cls, dim)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        return a * b.reciprocal(e)
    raise TypeError(f"not an expression node: {e!r}")


def eval_jet(
    e: Expr,
    point: Mapping[str, float],
    order: int,
    coords: Sequence[str] | None = None,
):
    """Evaluate with derivatives up to ``order`` (1 or 2).

    Returns ``(value, gradient)`` for order 1 and
    ``(value, gradient, hessian)`` for order 2, with derivative components
    ordered by ``coords`` (sorted point keys when omitted).
    """
    if coords is None:
        coords = sorted(point)
    n = len(coords)
    if order == 1:
        env = {name: Dual.seed(float(point[name]), i, n) for i, name in enumerate(coords)}
        out = _eval(e, env, Dual, n)
        return out.value, out.grad
    if order == 2:
        env = {
            name: HyperDual.seed(float(point[name]), i, n) for i, name in enumerate(coords)
        }
        out = _eval(e, env, HyperDual, n)
        return out.value, out.grad, out.hess
    raise ValueError(f"order must be 1 or 2, got {order!r}")
