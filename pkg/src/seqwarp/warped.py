"""Sequential warped products and their closed-form geometry.

A sequential warped product couples three charts: an inner warped product
of the first two factors (warping ``f``, a positive function of the first
factor) is warped again over the third factor by ``h``, a positive
function of the first two factors jointly.  The ambient metric is block
diagonal: ``g1 (+) f^2 g2 (+) h^2 g3``.

Two routes to the ambient curvature live side by side:

* ``flatten_to_chart`` assembles the ambient metric as one chart and hands
  it to the brute-force machinery in :mod:`seqwarp.chart`;
* ``connection_closed`` / ``curvature_closed`` / ``ricci_closed`` build the
  same objects from factor geometry plus warping corrections, block by
  block, never touching the ambient chart.

Disagreement between the routes is a bug by definition; the verification
suite sweeps all coordinate-basis combinations of both.

Note on signs: the closed-form curvature below is written for the
curvature operator R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z -
nabla_[X,Y] Z used by :mod:`seqwarp.chart`.  Sources that adopt the
reversed operator state the same block structure with the warping
correction terms negated; the oracle-equivalence sweep pins the variant
used here.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .chart import ChartFrame, FactorManifold, GeometryError
from .expressions import BinOp, Const, Expr, free_variables

__all__ = [
    "SequentialWarpedProduct",
    "ProductPoint",
    "BlockVector",
    "PositivityError",
    "CoordinateCollisionError",
    "WarpedFrame",
    "ambient_metric_at",
    "flatten_to_chart",
    "inner_chart",
    "connection_closed",
    "curvature_closed",
    "ricci_closed",
    "scalar_closed",
    "factor_scalars_closed",
]


class PositivityError(GeometryError):
    """A warping function failed to be positive at a sampled point."""


class CoordinateCollisionError(GeometryError):
    """Factor charts share a coordinate name."""


def _squared(e: Expr) -> Expr:
    return BinOp("^", e, Const(2.0))


def _scaled(scale: Expr, entry: Expr) -> Expr:
    if isinstance(entry, Const) and entry.value == 0.0:
        return entry
    return BinOp("*", scale, entry)


@dataclass(frozen=True)
class SequentialWarpedProduct:
    """Three factor charts plus the warping expressions ``f`` and ``h``."""

    m1: FactorManifold
    m2: FactorManifold
    m3: FactorManifold
    f: Expr
    h: Expr

    def __post_init__(self):
        names: set[str] = set()
        for fac in (self.m1, self.m2, self.m3):
            overlap = names & set(fac.coords)
            if overlap:
                raise CoordinateCollisionError(
                    f"coordinate name(s) {sorted(overlap)} appear in more than one factor"
                )
            names |= set(fac.coords)
        extra_f = free_variables(self.f) - set(self.m1.coords)
        if extra_f:
            raise GeometryError(
                f"inner warping depends on {sorted(extra_f)}, not coordinates of {self.m1.name!r}"
            )
        inner = set(self.m1.coords) | set(self.m2.coords)
        extra_h = free_variables(self.h) - inner
        if extra_h:
            raise GeometryError(
                f"outer warping depends on {sorted(extra_h)}, outside the first two factors"
            )

    @property
    def factors(self) -> tuple[FactorManifold, FactorManifold, FactorManifold]:
        return (self.m1, self.m2, self.m3)

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.m1.dim, self.m2.dim, self.m3.dim)

    @property
    def dim(self) -> int:
        return self.m1.dim + self.m2.dim + self.m3.dim

    @property
    def coords(self) -> tuple[str, ...]:
        return self.m1.coords + self.m2.coords + self.m3.coords

    @property
    def block_slices(self) -> tuple[slice, slice, slice]:
        d1, d2, d3 = self.dims
        return (slice(0, d1), slice(d1, d1 + d2), slice(d1 + d2, d1 + d2 + d3))

    def split(self, point: Sequence[float]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        p = np.asarray(point, dtype=float)
        if p.shape != (self.dim,):
            raise GeometryError(f"expected {self.dim} ambient coordinates, got {p.shape}")
        s1, s2, s3 = self.block_slices
        return p[s1], p[s2], p[s3]


@dataclass(frozen=True)
class ProductPoint:
    """A point given per factor; ``ambient`` concatenates the blocks."""

    p1: tuple[float, ...]
    p2: tuple[float, ...]
    p3: tuple[float, ...]

    @property
    def ambient(self) -> np.ndarray:
        return np.concatenate([self.p1, self.p2, self.p3]).astype(float)


def _as_ambient(point) -> np.ndarray:
    if isinstance(point, ProductPoint):
        return point.ambient
    return np.asarray(point, dtype=float)


@dataclass
class BlockVector:
    """A tangent vector split along the three factor blocks."""

    x1: np.ndarray
    x2: np.ndarray
    x3: np.ndarray

    @classmethod
    def zeros(cls, product: SequentialWarpedProduct) -> "BlockVector":
        d1, d2, d3 = product.dims
        return cls(np.zeros(d1), np.zeros(d2), np.zeros(d3))

    @classmethod
    def basis(cls, product: SequentialWarpedProduct, index: int) -> "BlockVector":
        vec = np.zeros(product.dim)
        vec[index] = 1.0
        return cls.from_ambient(product, vec)

    @classmethod
    def from_ambient(cls, product: SequentialWarpedProduct, vec) -> "BlockVector":
        v = np.asarray(vec, dtype=float)
        s1, s2, s3 = product.block_slices
        return cls(v[s1].copy(), v[s2].copy(), v[s3].copy())

    @property
    def ambient(self) -> np.ndarray:
        return np.concatenate([self.x1, self.x2, self.x3])

    @property
    def inner(self) -> np.ndarray:
        """Components along the first two blocks (the inner warped product)."""
        return np.concatenate([self.x1, self.x2])


def flatten_to_chart(product: SequentialWarpedProduct) -> FactorManifold:
    """The ambient metric as a single chart (input to the brute-force route)."""
    m1, m2, m3 = product.factors
    f2, h2 = _squared(product.f), _squared(product.h)
    dim = product.dim
    zero = Const(0.0)
    rows = [[zero] * dim for _ in range(dim)]
    offsets = (0, m1.dim, m1.dim + m2.dim)
    scales: tuple[Expr | None, ...] = (None, f2, h2)
    for fac, off, scale in zip(product.factors, offsets, scales):
        for i in range(fac.dim):
            for j in range(fac.dim):
                entry = fac.metric[i][j]
                rows[off + i][off + j] = entry if scale is None else _scaled(scale, entry)
    signature = (
        "lorentzian"
        if any(fac.signature == "lorentzian" for fac in product.factors)
        else "riemannian"
    )
    periods = None
    if all(fac.periods is not None for fac in product.factors):
        periods = tuple(p for fac in product.factors for p in fac.periods)
    return FactorManifold(
        name=f"{m1.name}*{m2.name}*{m3.name}",
        coords=product.coords,
        metric=tuple(tuple(row) for row in rows),
        signature=signature,
        periods=periods,
    )


def inner_chart(product: SequentialWarpedProduct) -> FactorManifold:
    """The first two factors as one chart with metric g1 (+) f^2 g2."""
    m1, m2 = product.m1, product.m2
    f2 = _squared(product.f)
    dim = m1.dim + m2.dim
    zero = Const(0.0)
    rows = [[zero] * dim for _ in range(dim)]
    for i in range(m1.dim):
        for j in range(m1.dim):
            rows[i][j] = m1.metric[i][j]
    for i in range(m2.dim):
        for j in range(m2.dim):
            rows[m1.dim + i][m1.dim + j] = _scaled(f2, m2.metric[i][j])
    signature = "lorentzian" if "lorentzian" in (m1.signature, m2.signature) else "riemannian"
    return FactorManifold(
        name=f"{m1.name}*{m2.name}",
        coords=m1.coords + m2.coords,
        metric=tuple(tuple(row) for row in rows),
        signature=signature,
    )


class WarpedFrame:
    """Pointwise geometry of a sequential warped product, computed lazily.

    Bundles the three factor frames, the inner-chart frame carrying the
    outer warping, and the warping jets; every closed-form operation at a
    fixed point reads from here so repeated sweeps stay cheap.
    """

    def __init__(self, product: SequentialWarpedProduct, point):
        self.product = product
        self.point = _as_ambient(point)
        self.p1, self.p2, self.p3 = product.split(self.point)

    @cached_property
    def frame1(self) -> ChartFrame:
        return ChartFrame(self.product.m1, self.p1)

    @cached_property
    def frame2(self) -> ChartFrame:
        return ChartFrame(self.product.m2, self.p2)

    @cached_property
    def frame3(self) -> ChartFrame:
        return ChartFrame(self.product.m3, self.p3)

    @cached_property
    def inner_frame(self) -> ChartFrame:
        return ChartFrame(inner_chart(self.product), np.concatenate([self.p1, self.p2]))

    # -- warping data ---------------------------------------------------------

    @cached_property
    def f_value(self) -> float:
        value = self.frame1.field_jets(self.product.f)[0]
        if value <= 0.0:
            raise PositivityError(
                f"inner warping is {value!r} (must be positive) at {self.p1.tolist()}"
            )
        return value

    @cached_property
    def h_value(self) -> float:
        value = self.inner_frame.field_jets(self.product.h)[0]
        if value <= 0.0:
            raise PositivityError(
                f"outer warping is {value!r} (must be positive) at {self.point.tolist()}"
            )
        return value

    @cached_property
    def df(self) -> np.ndarray:
        return self.frame1.field_jets(self.product.f)[1]

    @cached_property
    def grad_f(self) -> np.ndarray:
        return self.frame1.inverse @ self.df

    @cached_property
    def hess_f(self) -> np.ndarray:
        return self.frame1.hessian(self.product.f)

    @cached_property
    def lap_f(self) -> float:
        return float(np.einsum("ij,ij->", self.frame1.inverse, self.hess_f))

    @cached_property
    def grad_f_norm2(self) -> float:
        return float(self.df @ self.grad_f)

    @cached_property
    def dh(self) -> np.ndarray:
        return self.inner_frame.field_jets(self.product.h)[1]

    @cached_property
    def grad_h(self) -> np.ndarray:
        return self.inner_frame.inverse @ self.dh

    @cached_property
    def hess_h(self) -> np.ndarray:
        return self.inner_frame.hessian(self.product.h)

    @cached_property
    def lap_h(self) -> float:
        return float(np.einsum("ij,ij->", self.inner_frame.inverse, self.hess_h))

    @cached_property
    def grad_h_norm2(self) -> float:
        return float(self.dh @ self.grad_h)

    @cached_property
    def raised_hess_f(self) -> np.ndarray:
        """(nabla grad f)^k_a on the first factor."""
        return self.frame1.inverse @ self.hess_f

    @cached_property
    def raised_hess_h(self) -> np.ndarray:
        """(nabla grad h)^k_a on the inner chart."""
        return self.inner_frame.inverse @ self.hess_h

    # -- ambient assembly -----------------------------------------------------

    @cached_property
    def ambient_metric(self) -> np.ndarray:
        d = self.product.dim
        out = np.zeros((d, d))
        s1, s2, s3 = self.product.block_slices
        out[s1, s1] = self.frame1.metric
        out[s2, s2] = self.f_value**2 * self.frame2.metric
        out[s3, s3] = self.h_value**2 * self.frame3.metric
        return out

    @cached_property
    def ambient_inverse(self) -> np.ndarray:
        d = self.product.dim
        out = np.zeros((d, d))
        s1, s2, s3 = self.product.block_slices
        out[s1, s1] = self.frame1.inverse
        out[s2, s2] = self.frame2.inverse / self.f_value**2
        out[s3, s3] = self.frame3.inverse / self.h_value**2
        return out

    def split_inner(self, vec: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        d1 = self.product.m1.dim
        return vec[:d1], vec[d1:]

    # -- closed forms -----------------------------------------------------------

    def connection(self, x: BlockVector, y: BlockVector) -> BlockVector:
        """Levi-Civita derivative of constant-component block fields."""
        fr1, fr2, fr3 = self.frame1, self.frame2, self.frame3
        f, h = self.f_value, self.h_value

        g2xy = float(x.x2 @ fr2.metric @ y.x2)
        g3xy = float(x.x3 @ fr3.metric @ y.x3)
        x_lnf = float(self.df @ x.x1) / f
        y_lnf = float(self.df @ y.x1) / f
        x_lnh = float(self.dh @ x.inner) / h
        y_lnh = float(self.dh @ y.inner) / h

        grad_h1, grad_h2 = self.split_inner(self.grad_h)

        out1 = (
            np.einsum("kij,i,j->k", fr1.christoffel, x.x1, y.x1)
            - f * g2xy * self.grad_f
            - h * g3xy * grad_h1
        )
        out2 = (
            np.einsum("kij,i,j->k", fr2.christoffel, x.x2, y.x2)
            + x_lnf * y.x2
            + y_lnf * x.x2
            - h * g3xy * grad_h2
        )
        out3 = (
            np.einsum("kij,i,j->k", fr3.christoffel, x.x3, y.x3)
            + x_lnh * y.x3
            + y_lnh * x.x3
        )
        return BlockVector(out1, out2, out3)

    def curvature(self, x: BlockVector, y: BlockVector, z: BlockVector) -> BlockVector:
        """Curvature operator R(X, Y)Z assembled block by block."""
        fr1, fr2, fr3 = self.frame1, self.frame2, self.frame3
        f, h = self.f_value, self.h_value
        grad_f_n2, grad_h_n2 = self.grad_f_norm2, self.grad_h_norm2

        g2 = fr2.metric
        g3 = fr3.metric
        g2xz, g2yz = float(x.x2 @ g2 @ z.x2), float(y.x2 @ g2 @ z.x2)
        g3xz, g3yz = float(x.x3 @ g3 @ z.x3), float(y.x3 @ g3 @ z.x3)

        hfxz = float(x.x1 @ self.hess_f @ z.x1)
        hfyz = float(y.x1 @ self.hess_f @ z.x1)
        hh_xz = float(x.inner @ self.hess_h @ z.inner)
        hh_yz = float(y.inner @ self.hess_h @ z.inner)

        out1 = np.einsum("labc,a,b,c->l", fr1.riemann_up, x.x1, y.x1, z.x1)
        out2 = np.einsum("labc,a,b,c->l", fr2.riemann_up, x.x2, y.x2, z.x2)
        out3 = np.einsum("labc,a,b,c->l", fr3.riemann_up, x.x3, y.x3, z.x3)

        # fiber-of-f block, correction to the factor curvature
        out2 += grad_f_n2 * (g2xz * y.x2 - g2yz * x.x2)
        # mixed first/second blocks through the Hessian of f
        out2 += (hfxz / f) * y.x2 - (hfyz / f) * x.x2
        out1 += -f * g2yz * (self.raised_hess_f @ x.x1) + f * g2xz * (
            self.raised_hess_f @ y.x1
        )
        # third block against the inner chart through the Hessian of h
        out3 += (hh_xz / h) * y.x3 - (hh_yz / h) * x.x3
        inner_corr = -h * g3yz * (self.raised_hess_h @ x.inner) + h * g3xz * (
            self.raised_hess_h @ y.inner
        )
        c1, c2 = self.split_inner(inner_corr)
        out1 += c1
        out2 += c2
        # fiber-of-h correction
        out3 += grad_h_n2 * (g3xz * y.x3 - g3yz * x.x3)

        return BlockVector(out1, out2, out3)

    @cached_property
    def ricci(self) -> np.ndarray:
        m2, m3 = self.product.m2.dim, self.product.m3.dim
        f, h = self.f_value, self.h_value
        d1 = self.product.m1.dim

        hh = self.hess_h
        b11 = (
            self.frame1.ricci
            - (m2 / f) * self.hess_f
            - (m3 / h) * hh[:d1, :d1]
        )
        b22 = (
            self.frame2.ricci
            - (f * self.lap_f + (m2 - 1) * self.grad_f_norm2) * self.frame2.metric
            - (m3 / h) * hh[d1:, d1:]
        )
        b33 = self.frame3.ricci - (
            h * self.lap_h + (m3 - 1) * self.grad_h_norm2
        ) * self.frame3.metric

        d = self.product.dim
        out = np.zeros((d, d))
        s1, s2, s3 = self.product.block_slices
        out[s1, s1] = b11
        out[s2, s2] = b22
        out[s3, s3] = b33
        return out

    @cached_property
    def scalar(self) -> float:
        return float(np.einsum("ij,ij->", self.ambient_inverse, self.ricci))

    def factor_scalars(self, qe=None) -> tuple[float, float, float]:
        """Factor scalar curvatures by contraction, or the closed rank-one
        decomposition values when ``qe = (alpha, beta, U)`` is supplied."""
        if qe is None:
            return (self.frame1.scalar, self.frame2.scalar, self.frame3.scalar)
        alpha, beta, u = qe
        u = (
            u
            if isinstance(u, BlockVector)
            else BlockVector.from_ambient(self.product, u)
        )
        m1, m2, m3 = self.product.dims
        f, h = self.f_value, self.h_value
        g1u = float(u.x1 @ self.frame1.metric @ u.x1)
        g2u = float(u.x2 @ self.frame2.metric @ u.x2)
        g3u = float(u.x3 @ self.frame3.metric @ u.x3)
        s1 = alpha * m1 + beta * g1u + (m2 / f) * self.lap_f + (m3 / h) * self.lap_h
        s2 = (
            (alpha * f**2 + f * self.lap_f + (m2 - 1) * self.grad_f_norm2) * m2
            + beta * f**4 * g2u
            + (m3 / h) * self.lap_h
        )
        s3 = (
            alpha * h**2 + h * self.lap_h + (m3 - 1) * self.grad_h_norm2
        ) * m3 + beta * h**4 * g3u
        return (s1, s2, s3)


# ---------------------------------------------------------------------------
# Module-level operations
# ---------------------------------------------------------------------------

def ambient_metric_at(product: SequentialWarpedProduct, point) -> np.ndarray:
    return WarpedFrame(product, point).ambient_metric


def connection_closed(
    product: SequentialWarpedProduct, point, x: BlockVector, y: BlockVector
) -> BlockVector:
    return WarpedFrame(product, point).connection(x, y)


def curvature_closed(
    product: SequentialWarpedProduct, point, x: BlockVector, y: BlockVector, z: BlockVector
) -> BlockVector:
    return WarpedFrame(product, point).curvature(x, y, z)


def ricci_closed(product: SequentialWarpedProduct, point) -> np.ndarray:
    return WarpedFrame(product, point).ricci


def scalar_closed(product: SequentialWarpedProduct, point) -> float:
    return WarpedFrame(product, point).scalar


def factor_scalars_closed(
    product: SequentialWarpedProduct, point, qe=None
) -> tuple[float, float, float]:
    return WarpedFrame(product, point).factor_scalars(qe)
