"""The *-algebra of functions on a measured groupoid: convolution,
involution, identity, modular twists and tensor products."""

from dataclasses import dataclass

import numpy as np

from .measure import MeasuredGroupoid

__all__ = [
    "ConvalgError",
    "BaseMismatch",
    "GFunction",
    "gfunction",
    "delta_function",
    "convolve",
    "involution",
    "identity_element",
    "delta_twist",
    "tensor",
]


class ConvalgError(Exception):
    pass


class BaseMismatch(ConvalgError):
    pass


@dataclass(frozen=True, eq=False)
class GFunction:
    """Complex function on the arrow set, the finite stand-in for a
    compactly supported continuous function."""

    base: MeasuredGroupoid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != (self.base.n_arrows,):
            raise ConvalgError("need one value per arrow")
        if not np.all(np.isfinite(vals.real)) or not np.all(np.isfinite(vals.imag)):
            raise ConvalgError("function values must be finite")
        object.__setattr__(self, "values", vals)

    def __add__(self, other):
        _same_base(self, other)
        return GFunction(self.base, self.values + other.values)

    def __sub__(self, other):
        _same_base(self, other)
        return GFunction(self.base, self.values - other.values)

    def __mul__(self, scalar):
        return GFunction(self.base, self.values * scalar)

    __rmul__ = __mul__

    def __repr__(self):
        return "GFunction(%d values)" % len(self.values)


def gfunction(mg, values):
    return GFunction(mg, values)


def delta_function(mg, arrow):
    """Indicator of a single arrow."""
    vals = np.zeros(mg.n_arrows, dtype=np.complex128)
    vals[arrow] = 1.0
    return GFunction(mg, vals)


def _same_base(f, g):
    if f.base is not g.base:
        raise BaseMismatch("functions live on different measured groupoids")


def convolve(f, g):
    """Convolution (f*g)(a) = sum over the fiber at s(a) of
    f(a.h) g(inv h) w(s(h))."""
    _same_base(f, g)
    mg = f.base
    gg = mg.groupoid
    out = np.zeros(gg.n_arrows, dtype=np.complex128)
    ginv_w = g.values[gg.inv] * mg.w_s  # h -> g(inv h) w(s(h))
    for pos, x in enumerate(gg.units):
        etas = gg.r_fiber(x)  # h with r(h) = x, i.e. composable after a
        gammas = gg.s_fiber(x)  # a with s(a) = x
        prods = gg.comp[np.ix_(gammas, etas)]
        out[gammas] = f.values[prods] @ ginv_w[etas]
    return GFunction(mg, out)


def involution(f):
    """f*(a) = conj(f(inv a))."""
    return GFunction(f.base, np.conj(f.values[f.base.groupoid.inv]))


def identity_element(mg):
    """Two-sided convolution unit: 1/w on units, zero elsewhere."""
    vals = np.zeros(mg.n_arrows, dtype=np.complex128)
    g = mg.groupoid
    vals[g.units] = 1.0 / mg.haar.w
    return GFunction(mg, vals)


def delta_twist(f, z):
    """Pointwise multiplication by delta**z (principal branch)."""
    factor = np.exp(z * np.log(f.base.delta))
    return GFunction(f.base, f.values * factor)


def tensor(f1, f2, prod_mg):
    """Tensor product on a product measured groupoid built by
    measure.product_measured from the two bases."""
    if prod_mg.factors is None or not (
        prod_mg.factors[0] is f1.base and prod_mg.factors[1] is f2.base
    ):
        raise BaseMismatch(
            "product groupoid was not built from the bases of the factors"
        )
    return GFunction(prod_mg, np.outer(f1.values, f2.values).reshape(-1))
