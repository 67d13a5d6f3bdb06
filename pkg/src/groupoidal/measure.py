"""Haar systems, quasi-invariant measures, the modular function and all
scalar norms on functions (mixed (p,q) norms and plain L^p norms).

A Haar system is stored through its unit-weight function w, which in the
finite case is equivalent to left invariance: any left-invariant per-arrow
table satisfies table[gamma] = table[s(gamma)], so invalid Haar data is
unrepresentable internally.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import groupoid as gpd

__all__ = [
    "MeasureError",
    "NonPositiveWeight",
    "BadExponent",
    "InvalidHaarTable",
    "HaarSystem",
    "MeasuredGroupoid",
    "haar_from_table",
    "build",
    "product_measured",
    "is_unimodular",
    "mixed_norm",
    "lp_norm",
]

INF = math.inf
COCYCLE_TOL = 1e-12


class MeasureError(Exception):
    pass


class NonPositiveWeight(MeasureError):
    pass


class BadExponent(MeasureError):
    pass


class InvalidHaarTable(MeasureError):
    pass


@dataclass(frozen=True, eq=False)
class HaarSystem:
    """Fiberwise weights: lambda^x({gamma}) = w(s(gamma)) for gamma in G^x."""

    w: np.ndarray  # indexed by unit position


@dataclass(frozen=True, eq=False)
class MeasuredGroupoid:
    """Finite measured groupoid with every derived weight precomputed.

    Per-arrow arrays: nu, nu_inv, nu0 (the three measures), delta (modular
    function), w_s / w_r (Haar weight at source/range, i.e. the left and
    right Haar fiber weights), mu_r / mu_s (unit measure at range/source).
    """

    groupoid: gpd.Groupoid
    haar: HaarSystem
    mu: np.ndarray
    w_s: np.ndarray
    w_r: np.ndarray
    mu_r: np.ndarray
    mu_s: np.ndarray
    nu: np.ndarray
    nu_inv: np.ndarray
    nu0: np.ndarray
    delta: np.ndarray
    factors: tuple = None

    @property
    def n_arrows(self):
        return self.groupoid.n_arrows

    def __repr__(self):
        return "MeasuredGroupoid(%d arrows, %d units, unimodular=%s)" % (
            self.n_arrows,
            self.groupoid.n_units,
            is_unimodular(self),
        )


def _unit_array(g, values, what):
    values = np.asarray(values, dtype=float)
    if values.ndim == 0:
        values = np.full(g.n_units, float(values))
    if values.shape != (g.n_units,):
        raise MeasureError("%s must have one value per unit" % what)
    if not np.all(values > 0.0):
        raise NonPositiveWeight("%s must be strictly positive" % what)
    return values


def haar_from_table(g, table):
    """Validate an externally supplied per-arrow Haar table.

    Left invariance forces the weight to depend on the source unit only
    (table[gamma] = table[s(gamma)]); returns the unit-weight vector w.
    """
    table = np.asarray(table, dtype=float)
    if table.shape != (g.n_arrows,):
        raise InvalidHaarTable("table must have one value per arrow")
    if not np.all(table > 0.0):
        raise InvalidHaarTable("Haar weights must be strictly positive")
    if not np.array_equal(table, table[g.s]):
        bad = int(np.nonzero(table != table[g.s])[0][0])
        raise InvalidHaarTable(
            "weight at arrow %d differs from its source unit (not left invariant)"
            % bad
        )
    return table[g.units]


def build(g, w, mu):
    """Assemble a MeasuredGroupoid from unit weights w (Haar) and mu.

    All derived measures are populated and the structural identities
    (left invariance, delta cocycle, inversion symmetries) are asserted
    exhaustively.
    """
    w = _unit_array(g, w, "Haar weight w")
    mu = _unit_array(g, mu, "unit measure mu")
    per_arrow_w = np.zeros(g.n_arrows)
    per_arrow_w[g.units] = w
    per_arrow_mu = np.zeros(g.n_arrows)
    per_arrow_mu[g.units] = mu

    w_s = per_arrow_w[g.s]
    w_r = per_arrow_w[g.r]
    mu_r = per_arrow_mu[g.r]
    mu_s = per_arrow_mu[g.s]
    nu = mu_r * w_s
    nu_inv = mu_s * w_r
    nu0 = np.sqrt(nu * nu_inv)
    delta = nu / nu_inv

    mg = MeasuredGroupoid(
        groupoid=g,
        haar=HaarSystem(w=w),
        mu=mu,
        w_s=w_s,
        w_r=w_r,
        mu_r=mu_r,
        mu_s=mu_s,
        nu=nu,
        nu_inv=nu_inv,
        nu0=nu0,
        delta=delta,
    )
    _assert_invariants(mg)
    return mg


def _assert_invariants(mg):
    g = mg.groupoid
    a_idx, b_idx = np.nonzero(g.comp >= 0)
    prod = g.comp[a_idx, b_idx]
    # left invariance: lambda^{r(a)}({ab}) = lambda^{s(a)}({b})
    if not np.array_equal(mg.w_s[prod], mg.w_s[b_idx]):
        raise MeasureError("left invariance violated")
    # nu_inv is the inverse image of nu, nu0 is inversion invariant
    assert np.array_equal(mg.nu_inv, mg.nu[g.inv])
    assert np.allclose(mg.nu0, mg.nu0[g.inv], rtol=COCYCLE_TOL, atol=0.0)
    # modular cocycle and inversion rule
    dprod = mg.delta[a_idx] * mg.delta[b_idx]
    if not np.allclose(mg.delta[prod], dprod, rtol=COCYCLE_TOL, atol=0.0):
        raise MeasureError("modular cocycle identity violated")
    if not np.allclose(
        mg.delta[g.inv] * mg.delta, 1.0, rtol=COCYCLE_TOL, atol=0.0
    ):
        raise MeasureError("delta(inverse) != 1/delta")
    if not np.allclose(mg.delta[g.units], 1.0, rtol=COCYCLE_TOL, atol=0.0):
        raise MeasureError("delta != 1 on units")


def product_measured(mg1, mg2, size_cap=None):
    """Product measured groupoid with tensor Haar and unit measures."""
    g = gpd.product(mg1.groupoid, mg2.groupoid, size_cap=size_cap)
    w = np.outer(mg1.haar.w, mg2.haar.w).reshape(-1)
    mu = np.outer(mg1.mu, mg2.mu).reshape(-1)
    out = build(g, w, mu)
    object.__setattr__(out, "factors", (mg1, mg2))
    return out


def is_unimodular(mg, tol=1e-9):
    """True iff the modular function is 1 everywhere (within tol)."""
    return bool(np.max(np.abs(mg.delta - 1.0)) <= tol)


def _values(f):
    values = getattr(f, "values", f)
    return np.asarray(values, dtype=np.complex128)


def _check_exponent(p, name):
    if p != INF and not p >= 1.0:
        raise BadExponent("%s must be in [1, inf], got %r" % (name, p))


def mixed_norm(mg, f, p, q):
    """Mixed (p,q) norm: L^p over each range fiber against the Haar weights,
    then L^q over the unit space against mu; max replaces the essential sup
    at infinite exponents (all measures have full support)."""
    _check_exponent(p, "p")
    _check_exponent(q, "q")
    g = mg.groupoid
    vals = np.abs(_values(f))
    fiber_of = g.unit_pos[g.r]
    if p == INF:
        inner = np.zeros(g.n_units)
        np.maximum.at(inner, fiber_of, vals)
    else:
        inner = np.bincount(
            fiber_of, weights=(vals**p) * mg.w_s, minlength=g.n_units
        ) ** (1.0 / p)
    if q == INF:
        return float(inner.max()) if inner.size else 0.0
    return float(((inner**q) * mg.mu).sum() ** (1.0 / q))


def lp_norm(mg, f, p, which="nu"):
    """Plain L^p norm against nu, nu_inv or nu0."""
    _check_exponent(p, "p")
    weights = {"nu": mg.nu, "nu_inv": mg.nu_inv, "nu0": mg.nu0}
    if which not in weights:
        raise MeasureError("unknown measure %r (nu, nu_inv or nu0)" % (which,))
    vals = np.abs(_values(f))
    if p == INF:
        return float(vals.max()) if vals.size else 0.0
    return float(((vals**p) * weights[which]).sum() ** (1.0 / p))
