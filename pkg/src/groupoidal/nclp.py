"""Non-commutative L^q elements and norms, the beta-Fourier transforms,
Plancherel and Hausdorff-Young checks, coefficient functions and the
spatial-derivative consistency checks.

The finite-dimensional L^q norm is defined by the trace formula
(Tr |rho^(1/2q) L(f) rho^(1/2q)|^q)^(1/q) and cross-validated against the
independent spatial route |T|^q rho' in M, (Tr .)^(1/q).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import numkit
from .convalg import GFunction, involution
from .measure import INF, BadExponent, lp_norm, mixed_norm
from .repmod import left_op, span_residual

__all__ = [
    "NclpError",
    "NotInLq",
    "LqElement",
    "FourierData",
    "HYResult",
    "conjugate_exponent",
    "fourier",
    "fourier_p",
    "lq_element",
    "lq_norm",
    "lq_norm_spatial",
    "plancherel_check",
    "hy_check",
    "lq_lower_by_duality",
    "coefficient_function",
    "spatial_derivative_check",
]

MEMBER_TOL = 1e-8


class NclpError(Exception):
    pass


class NotInLq(NclpError):
    pass


def conjugate_exponent(p):
    """q with 1/p + 1/q = 1 in extended reals; p = 1 maps to inf exactly."""
    if p == 1:
        return INF
    if p == INF:
        return 1.0
    return p / (p - 1.0)


@dataclass(frozen=True, eq=False)
class FourierData:
    """The operator Delta^alpha L(f) Delta^alpha with beta = 1/(1-2 alpha)."""

    alpha: complex
    beta: complex
    f: GFunction
    matrix: np.ndarray


@dataclass(frozen=True, eq=False)
class LqElement:
    """Candidate element of L^q: a matrix with certified homogeneity -1/q and
    stored membership/positivity residuals of h = |T|^q rho'."""

    matrix: np.ndarray
    exponent: float
    provenance: str = ""
    homogeneity_residual: float = field(default=np.nan)
    membership_residual: float = field(default=np.nan)


def fourier(ctx, f, alpha):
    """beta-Fourier transform: Delta^alpha L(f) Delta^alpha."""
    ctx.check_base(f)
    da = ctx.delta_power(alpha)
    mat = np.outer(da, da) * left_op(ctx, f)
    denom = 1.0 - 2.0 * alpha
    beta = INF if denom == 0 else 1.0 / denom
    return FourierData(alpha=alpha, beta=beta, f=f, matrix=mat)


def fourier_p(ctx, f, p):
    """F_p(f) = Delta^(1/2q) L(f) Delta^(1/2q), q conjugate to p; lands in
    L^q."""
    q = conjugate_exponent(p)
    alpha = 0.0 if q == INF else 1.0 / (2.0 * q)
    return fourier(ctx, f, alpha)


def _pinv_psd(m):
    """Moore-Penrose inverse of a PSD matrix through its spectrum."""
    dec = numkit.eigh(m)
    vals = dec.values
    cut = numkit.INV_TOL * max(vals[-1], 0.0) if vals.size else 0.0
    inv = np.zeros_like(vals)
    keep = vals > max(cut, 0.0)
    inv[keep] = 1.0 / vals[keep]
    return (dec.vectors * inv) @ dec.vectors.conj().T


def polar(t):
    """Polar decomposition t = u |t| with u a partial isometry on the
    support of |t|."""
    t = np.asarray(t, dtype=np.complex128)
    abst = numkit.psd_power(t.conj().T @ t, 0.5)
    u = t @ _pinv_psd(abst)
    return u, abst


def _membership_data(ctx, h):
    """(off-block, zero-homogeneity, negativity) residuals of membership of
    h in M, computed through the decomposable/homogeneous characterization
    that scales past the commutant-solve cap."""
    from .repmod import homogeneity_residual

    fd = ctx.fiber_decomposition()
    scale = max(numkit.frobenius(h), 1.0)
    off = fd.off_block_mass(h) / scale
    if off > 0.1:
        return off, np.inf, np.inf
    homog = homogeneity_residual(ctx, h, 0.0, tol=np.inf) / scale
    hs = (h + h.conj().T) / 2.0
    dec = numkit.eigh(hs, tol=1e-6)
    neg = max(0.0, -float(dec.values[0])) / scale
    return off, homog, neg


def lq_element(ctx, matrix, q, provenance=""):
    """Certify a matrix as an L^q element: homogeneity degree -1/q plus
    membership of |T|^q rho' in the positive part of M (residuals stored,
    enforcement happens in lq_norm_spatial)."""
    from .repmod import homogeneity_residual

    matrix = np.asarray(matrix, dtype=np.complex128)
    if q != INF and q < 1:
        raise BadExponent("exponent q must be >= 1 or inf, got %r" % (q,))
    degree = 0.0 if q == INF else -1.0 / q
    scale = max(numkit.frobenius(matrix), 1.0)
    homog = homogeneity_residual(ctx, matrix, degree, tol=np.inf) / scale
    if q == INF:
        h = matrix
    else:
        absq = numkit.psd_power(matrix.conj().T @ matrix, q / 2.0)
        h = absq @ ctx.densities().rho_prime
    member = max(_membership_data(ctx, h))
    return LqElement(
        matrix=matrix,
        exponent=q,
        provenance=provenance,
        homogeneity_residual=float(homog),
        membership_residual=float(member),
    )


def lq_norm(ctx, f, q):
    """Trace-route L^q norm: (Tr |rho^(1/2q) L(f) rho^(1/2q)|^q)^(1/q);
    q = inf is the operator norm of L(f)."""
    ctx.check_base(f)
    if q != INF and q < 1:
        raise BadExponent("exponent q must be >= 1 or inf, got %r" % (q,))
    lf = left_op(ctx, f)
    if q == INF:
        return numkit.opnorm(lf)
    rq = numkit.psd_power(ctx.densities().rho, 1.0 / (2.0 * q))
    return numkit.trace_abs_power(rq @ lf @ rq, q) ** (1.0 / q)


def lq_norm_spatial(ctx, elem, tol=MEMBER_TOL):
    """Spatial-route norm: form |T|^q spectrally, check h = |T|^q rho' lies
    in the positive part of M, return (Tr h)^(1/q).  Independent of the
    trace route."""
    t = elem.matrix
    q = elem.exponent
    if q == INF:
        off, homog, neg = _membership_data(ctx, t)
        if max(off, homog) > tol:
            raise NotInLq("operator escapes M (residual %g)" % max(off, homog))
        return numkit.opnorm(t)
    absq = numkit.psd_power(t.conj().T @ t, q / 2.0)
    h = absq @ ctx.densities().rho_prime
    off, homog, neg = _membership_data(ctx, h)
    if max(off, homog, neg) > tol:
        raise NotInLq(
            "|T|^q rho' fails membership/positivity (off %g, homog %g, neg %g)"
            % (off, homog, neg)
        )
    tr = np.trace(h)
    return float(max(tr.real, 0.0)) ** (1.0 / q)


def plancherel_check(ctx, f):
    """(lhs, rhs, residual) for ||F_2(f)||_2 = ||f||_{L^2(nu_0)}."""
    lhs = lq_norm(ctx, f, 2.0)
    rhs = lp_norm(ctx.mg, f, 2.0, "nu0")
    residual = abs(lhs - rhs) / max(rhs, 1e-30)
    return lhs, rhs, residual


@dataclass(frozen=True)
class HYResult:
    p: float
    q: float
    lhs: float
    rhs: float
    margin: float
    passed: bool


def hy_check(ctx, f, p, tol=1e-9):
    """Hausdorff-Young check at exponent p in [1,2]:
    ||F_p(f)||_q <= max(||f||_{p,q}, ||f*||_{p,q})."""
    if not 1.0 <= p <= 2.0:
        raise BadExponent("Hausdorff-Young needs p in [1,2], got %r" % (p,))
    q = conjugate_exponent(p)
    lhs = lq_norm(ctx, f, q)
    rhs = max(mixed_norm(ctx.mg, f, p, q), mixed_norm(ctx.mg, involution(f), p, q))
    margin = rhs - lhs
    return HYResult(
        p=p, q=q, lhs=lhs, rhs=rhs, margin=margin, passed=bool(lhs <= rhs * (1 + tol))
    )


def _random_gfunction(ctx, rng):
    n = ctx.dim
    vals = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2.0)
    return GFunction(ctx.mg, vals)


def lq_lower_by_duality(ctx, elem, samples, rng=None, include_aligned=True):
    """Duality lower bound sup |(T xi, S eta)| / (||S||_q' ||L(xi)|| ||L(eta)||)
    over sampled S in the conjugate space and sampled left-bounded vectors;
    bounded above by the norm of T (the easy direction of the
    characterization of L^p by bilinear bounds)."""
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(0) if rng is None else rng
    t = elem.matrix
    e = elem.exponent
    ep = conjugate_exponent(e)
    best = 0.0

    def ratio(s_mat, s_norm, xi_c, eta_c):
        lxi = numkit.opnorm(left_op(ctx, ctx.from_coords(xi_c)))
        leta = numkit.opnorm(left_op(ctx, ctx.from_coords(eta_c)))
        denom = s_norm * lxi * leta
        if denom <= 0.0:
            return 0.0
        return abs((s_mat @ eta_c).conj() @ (t @ xi_c)) / denom

    for _ in range(samples):
        g = _random_gfunction(ctx, rng)
        alpha = 0.0 if ep == INF else 1.0 / (2.0 * ep)
        s_mat = fourier(ctx, g, alpha).matrix
        s_norm = lq_norm(ctx, g, ep)
        xi = rng.standard_normal(ctx.dim) + 1j * rng.standard_normal(ctx.dim)
        eta = rng.standard_normal(ctx.dim) + 1j * rng.standard_normal(ctx.dim)
        best = max(best, ratio(s_mat, s_norm, xi, eta))

    if include_aligned and e != INF and numkit.frobenius(t) > 0.0:
        # the witness aligned with T's polar data achieves the norm at the
        # convolution identity vector
        u, abst = polar(t)
        s_mat = u @ numkit.psd_power(abst, e - 1.0)
        s_norm = lq_norm_spatial(ctx, lq_element(ctx, s_mat, ep, "aligned"))
        uvec = ctx.to_coords(_identity_vector(ctx))
        best = max(best, ratio(s_mat, s_norm, uvec, uvec))
    return best


def _identity_vector(ctx):
    from .convalg import identity_element

    return identity_element(ctx.mg)


def coefficient_function(ctx, xi, eta):
    """Matrix coefficient of the left regular representation on the range
    fiber field, normalized so it is the density of f -> (L(f) xi | eta)
    with respect to the symmetric measure nu_0."""
    ctx.check_base(xi)
    ctx.check_base(eta)
    g = ctx.mg.groupoid
    scale = 1.0 / np.sqrt(ctx.delta)
    xip = xi.values * scale
    etap = eta.values * scale
    kernel = np.conj(etap) * ctx.mg.w_s
    out = np.zeros(ctx.dim, dtype=np.complex128)
    for x in g.units:
        fib = g.r_fiber(x)  # gamma' in G^x
        gammas = fib  # arrows with r(gamma) = x form the same index set
        translate = g.comp[np.ix_(g.inv[gammas], fib)]
        out[gammas] = (xip[translate] * kernel[fib][None, :]).sum(axis=1)
    return GFunction(ctx.mg, out)


@dataclass(frozen=True)
class SpatialDerivativeReport:
    defining: float
    weight_match: float
    homogeneity: float


def spatial_derivative_check(ctx, xi, n_probe=6, rng=None):
    """Consistency of the spatial derivative of phi = (. xi | xi): build
    T = Delta^(1/2) L(F~) Delta^(1/2) from the coefficient function F and
    report (a) the defining property ||T^(1/2) z||^2 = phi(L(z) L(z)†) on
    random vectors, (b) h = T rho' in M with Tr(h m) = phi(m) on the M
    basis, (c) the homogeneity residual at degree -1."""
    from .repmod import homogeneity_residual

    ctx.check_base(xi)
    rng = np.random.default_rng(7) if rng is None else rng
    g = ctx.mg.groupoid
    coeff = coefficient_function(ctx, xi, xi)
    f_tilde = GFunction(ctx.mg, coeff.values[g.inv])
    d2 = np.sqrt(ctx.delta)
    t = np.outer(d2, d2) * left_op(ctx, f_tilde)
    t = (t + t.conj().T) / 2.0
    t_half = numkit.psd_power(t, 0.5)  # raises NotPSD on a real failure

    xic = ctx.to_coords(xi)
    worst_a = 0.0
    for _ in range(n_probe):
        z = rng.standard_normal(ctx.dim) + 1j * rng.standard_normal(ctx.dim)
        lz = left_op(ctx, ctx.from_coords(z))
        lhs = float(((abs(t_half @ z)) ** 2).sum())
        rhs = float((xic.conj() @ (lz @ (lz.conj().T @ xic))).real)
        worst_a = max(worst_a, abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs)))

    vn = ctx.vn_data()
    h = t @ vn.rho_prime
    worst_b = span_residual(vn.m_onb, h)
    for b in vn.m_basis:
        lhs = complex(np.trace(h @ b))
        rhs = complex(xic.conj() @ (b @ xic))
        scale = max(1.0, float((abs(xic) ** 2).sum()) * numkit.frobenius(b))
        worst_b = max(worst_b, abs(lhs - rhs) / scale)
    norm_sq = float((abs(xic) ** 2).sum())
    worst_b = max(
        worst_b, abs(complex(np.trace(h)) - norm_sq) / max(1.0, norm_sq)
    )

    worst_c = homogeneity_residual(ctx, t, -1.0)
    return SpatialDerivativeReport(
        defining=worst_a, weight_match=worst_b, homogeneity=worst_c
    )
