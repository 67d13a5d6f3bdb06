"""Numeric witnesses for the interpolation proof path: the analytic family
f_z with its fiber-maximum weights, the boundary-line estimates, the A/B/C
decomposition, the duality witness eta_z, and the tensor-power sharpening.

The family is only defined for 1 < p < 2; the endpoint inequalities are
checked directly in nclp.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import numkit
from .convalg import GFunction, delta_twist, involution, tensor
from .groupoid import default_size_cap
from .measure import BadExponent, lp_norm, mixed_norm, product_measured
from .nclp import (
    conjugate_exponent,
    fourier_p,
    lq_norm,
    polar,
)
from .repmod import RepContext, left_op

__all__ = [
    "InterpError",
    "ZeroFunction",
    "EpsilonRuleViolated",
    "SizeCapExceeded",
    "StripFamily",
    "DualityWitness",
    "strip_family",
    "f_z",
    "line_one_estimate",
    "line_half_estimate",
    "xi_z_scan",
    "build_duality_witness",
    "duality_witness_scan",
    "tensor_sharpening",
    "default_grid",
    "DEFAULT_T_GRID",
]

DEFAULT_RE = (0.5, 0.6, 0.75, 0.9, 1.0)
DEFAULT_T_GRID = (0.0, 0.5, -0.5, 2.0, -2.0)


class InterpError(Exception):
    pass


class ZeroFunction(InterpError):
    pass


class EpsilonRuleViolated(InterpError):
    pass


class SizeCapExceeded(InterpError):
    pass


def default_grid():
    """Default closed-strip grid (1/2 <= Re z <= 1)."""
    return [x + 1j * t for x in DEFAULT_RE for t in DEFAULT_T_GRID]


@dataclass(frozen=True, eq=False)
class StripFamily:
    """The analytic deformation data of f at exponent p: fiber maxima
    M(x, y) = max(||f^x||_p, ||f_y||_p), an epsilon satisfying the rule
    eps^(q-p) ||f||_p^p <= 1, and the clipped maxima max(M, eps)."""

    ctx: RepContext
    f: GFunction
    p: float
    q: float
    p_inv: float
    r_norms: np.ndarray  # ||f^x||_p per unit (range fibers, left Haar)
    s_norms: np.ndarray  # ||f_y||_p per unit (source fibers, right Haar)
    m_matrix: np.ndarray
    eps: float
    m_eps: np.ndarray


def strip_family(ctx, f, p, eps=None):
    """Build the interpolation family.

    The default epsilon is the largest value satisfying the rule for both
    ||f||_{L^p(nu)} and ||f||_{L^p(nu^-1)}; the one-sided rule of the
    inner-line estimate is not enough to bound the C part of the
    nu^-1 integral, so the symmetric choice is used.
    """
    ctx.check_base(f)
    if not 1.0 < p < 2.0:
        raise BadExponent("strip family needs 1 < p < 2, got %r" % (p,))
    if not np.any(f.values != 0):
        raise ZeroFunction("the zero function has no interpolation family")
    q = conjugate_exponent(p)
    mg = ctx.mg
    g = mg.groupoid
    absp = np.abs(f.values) ** p
    r_norms = np.bincount(
        g.unit_pos[g.r], weights=absp * mg.w_s, minlength=g.n_units
    ) ** (1.0 / p)
    s_norms = np.bincount(
        g.unit_pos[g.s], weights=absp * mg.w_r, minlength=g.n_units
    ) ** (1.0 / p)
    m_matrix = np.maximum.outer(r_norms, s_norms)

    nu_p = lp_norm(mg, f, p, "nu")
    nu_inv_p = lp_norm(mg, f, p, "nu_inv")
    if eps is None:
        eps = float(max(nu_p, nu_inv_p) ** (-p / (q - p)))
    else:
        eps = float(eps)
        if eps <= 0.0:
            raise EpsilonRuleViolated("epsilon must be positive")
        if eps ** (q - p) * nu_p**p > 1.0 + 1e-12:
            raise EpsilonRuleViolated(
                "eps^(q-p) ||f||_p^p = %g exceeds 1" % (eps ** (q - p) * nu_p**p)
            )
    return StripFamily(
        ctx=ctx,
        f=f,
        p=p,
        q=q,
        p_inv=1.0 / p,
        r_norms=r_norms,
        s_norms=s_norms,
        m_matrix=m_matrix,
        eps=eps,
        m_eps=np.maximum(m_matrix, eps),
    )


def f_z(family, z):
    """The deformed function: sgn(f) |f|^(pz) M_eps(r, s)^(q - z(p+q)) on the
    support of f.  At z = 1/p the exponent identity gives back f itself."""
    f = family.f
    if z == family.p_inv:
        return GFunction(f.base, f.values.copy())
    g = f.base.groupoid
    sup = f.values != 0
    out = np.zeros(f.base.n_arrows, dtype=np.complex128)
    av = np.abs(f.values[sup])
    sgn = f.values[sup] / av
    me = family.m_eps[g.unit_pos[g.r[sup]], g.unit_pos[g.s[sup]]]
    out[sup] = (
        sgn
        * np.exp(family.p * z * np.log(av))
        * np.exp((family.q - z * (family.p + family.q)) * np.log(me))
    )
    return GFunction(f.base, out)


@dataclass(frozen=True)
class LineOnePoint:
    t: float
    norm_1inf: float
    norm_1inf_star: float
    opnorm: float


def line_one_estimate(family, t_grid=DEFAULT_T_GRID):
    """Evaluate ||f_{1+it}||_{1,inf}, the same for the involution, and
    ||L(f_{1+it})|| at each grid point (the proof bounds all three by 2)."""
    ctx = family.ctx
    out = []
    for t in t_grid:
        fz = f_z(family, 1.0 + 1j * t)
        out.append(
            LineOnePoint(
                t=float(t),
                norm_1inf=mixed_norm(ctx.mg, fz, 1.0, math.inf),
                norm_1inf_star=mixed_norm(ctx.mg, involution(fz), 1.0, math.inf),
                opnorm=numkit.opnorm(left_op(ctx, fz)),
            )
        )
    return out


def abc_partition(family):
    """Partition of the support of f: A where the range-fiber norm dominates
    (and clears eps), B where the source-fiber norm does, C where the fiber
    maximum sits at or below eps.  Ties resolve A, then B."""
    f = family.f
    g = f.base.groupoid
    sup = f.values != 0
    ar = family.r_norms[g.unit_pos[g.r]]
    bs = family.s_norms[g.unit_pos[g.s]]
    a = sup & (ar >= bs) & (ar >= family.eps)
    b = sup & ~a & (bs >= ar) & (bs >= family.eps)
    c = sup & ~a & ~b
    return a, b, c


@dataclass(frozen=True)
class LineHalfPoint:
    t: float
    parts_nu: tuple
    parts_nu_inv: tuple
    total_nu: float
    total_nu_inv: float
    f2_norm: float


def line_half_estimate(family, t_grid=DEFAULT_T_GRID):
    """At z = 1/2 + it, split the integral of |f_z|^2 over the A/B/C parts
    against both nu and nu^-1 (each part is bounded by 1 in the proof, the
    total by 3), and evaluate ||F_2(delta^(it/2) f_z)||_2 (bounded by
    sqrt(3))."""
    ctx = family.ctx
    mg = ctx.mg
    a, b, c = abc_partition(family)
    out = []
    for t in t_grid:
        fz = f_z(family, 0.5 + 1j * t)
        dens = np.abs(fz.values) ** 2
        parts_nu = tuple(float((dens[m] * mg.nu[m]).sum()) for m in (a, b, c))
        parts_ni = tuple(float((dens[m] * mg.nu_inv[m]).sum()) for m in (a, b, c))
        f2 = lq_norm(ctx, delta_twist(fz, 0.5j * t), 2.0)
        out.append(
            LineHalfPoint(
                t=float(t),
                parts_nu=parts_nu,
                parts_nu_inv=parts_ni,
                total_nu=sum(parts_nu),
                total_nu_inv=sum(parts_ni),
                f2_norm=f2,
            )
        )
    return out


def _xi_z_vector(family, z, xi_coords):
    ctx = family.ctx
    dz = ctx.delta_power((1.0 - z) / 2.0)
    lf = left_op(ctx, f_z(family, z))
    return dz * (lf @ (dz * xi_coords))


@dataclass(frozen=True)
class XiScan:
    grid: tuple
    norms: tuple
    sup_boundary: float
    sup_interior: float
    bound: float
    analyticity_residual: float


def xi_z_scan(family, xi, grid=None, rng=None):
    """Evaluate xi_z = Delta^((1-z)/2) L(f_z) Delta^((1-z)/2) xi over the
    strip grid; the proof bounds the boundary norms by
    2 max(||xi||, ||L(xi)||).  The analyticity diagnostic compares z ->
    (xi_z, eta) against its Cauchy mean on an interior circle."""
    ctx = family.ctx
    grid = default_grid() if grid is None else list(grid)
    rng = np.random.default_rng(11) if rng is None else rng
    xic = ctx.to_coords(xi)
    norms = []
    for z in grid:
        vz = _xi_z_vector(family, z, xic)
        norms.append(float(np.sqrt((abs(vz) ** 2).sum())))
    on_boundary = [
        abs(z.real - 0.5) < 1e-12 or abs(z.real - 1.0) < 1e-12 for z in grid
    ]
    sup_b = max(
        (n for n, bd in zip(norms, on_boundary) if bd), default=0.0
    )
    sup_i = max(
        (n for n, bd in zip(norms, on_boundary) if not bd), default=0.0
    )
    xin = float(np.sqrt((abs(xic) ** 2).sum()))
    bound = 2.0 * max(xin, numkit.opnorm(left_op(ctx, xi)))

    # Cauchy mean-value smoke test on an interior circle
    center, radius, npts = 0.75, 0.15, 24
    eta = rng.standard_normal(ctx.dim) + 1j * rng.standard_normal(ctx.dim)
    ring = [
        center + radius * np.exp(2j * np.pi * k / npts) for k in range(npts)
    ]
    ring_vals = [
        complex(eta.conj() @ _xi_z_vector(family, z, xic)) for z in ring
    ]
    direct = complex(eta.conj() @ _xi_z_vector(family, center, xic))
    mean = sum(ring_vals) / npts
    residual = abs(mean - direct) / max(1.0, abs(direct))
    return XiScan(
        grid=tuple(grid),
        norms=tuple(norms),
        sup_boundary=sup_b,
        sup_interior=sup_i,
        bound=bound,
        analyticity_residual=residual,
    )


@dataclass(frozen=True, eq=False)
class DualityWitness:
    """S = F_{p'}(g) normalized to ||S||_p <= 1, its polar parts, and the
    pairing vectors."""

    s_matrix: np.ndarray
    u: np.ndarray
    abs_s: np.ndarray
    xi: GFunction
    eta: GFunction
    s_norm: float
    reconstruction_residual: float


def build_duality_witness(family, g_fn, xi, eta):
    """Construct the witness from a generator function g (S = the p-Fourier
    image of g, rescaled to unit L^p norm) and pairing vectors xi, eta."""
    ctx = family.ctx
    ctx.check_base(g_fn)
    p = family.p
    s0 = fourier_p(ctx, g_fn, family.q).matrix  # alpha = 1/(2p): lands in L^p
    nrm = lq_norm(ctx, g_fn, p)
    if nrm <= 0.0:
        raise ZeroFunction("witness generator must be nonzero")
    s = s0 / nrm
    u, abs_s = polar(s)
    recon = numkit.frobenius(u @ abs_s - s) / max(numkit.frobenius(s), 1e-300)
    return DualityWitness(
        s_matrix=s,
        u=u,
        abs_s=abs_s,
        xi=xi,
        eta=eta,
        s_norm=1.0,
        reconstruction_residual=recon,
    )


def _abs_power_supported(abs_s, w):
    """|S|^w on the support of |S| (principal branch, zero on the kernel)."""
    dec = numkit.eigh(abs_s)
    vals = dec.values
    cut = numkit.INV_TOL * max(vals[-1], 0.0) if vals.size else 0.0
    powered = np.zeros(vals.shape, dtype=np.complex128)
    keep = vals > max(cut, 0.0)
    powered[keep] = np.exp(w * np.log(vals[keep]))
    return (dec.vectors * powered) @ dec.vectors.conj().T


@dataclass(frozen=True)
class WitnessScan:
    grid: tuple
    values: tuple
    sup_abs: float
    bound: float
    cauchy_schwarz_margin: float
    h_at_p_inv_residual: float


def duality_witness_scan(family, witness, grid=None):
    """H(z) = (xi_z, eta_conj(z)) with eta_z = U |S|^(pz) eta; the lemma
    bounds |H| by 2 ||L(xi)|| ||L(eta)|| on the closed strip, and at
    z = 1/p the function returns the pairing (F_p(f) xi, S eta)."""
    ctx = family.ctx
    grid = default_grid() if grid is None else list(grid)
    p = family.p
    xic = ctx.to_coords(witness.xi)
    etac = ctx.to_coords(witness.eta)
    values = []
    cs_margin = np.inf
    for z in grid:
        viz = _xi_z_vector(family, z, xic)
        eta_zbar = witness.u @ (_abs_power_supported(witness.abs_s, p * np.conj(z)) @ etac)
        h = complex(eta_zbar.conj() @ viz)
        values.append(h)
        if abs(z.real - 0.5) < 1e-12:
            lim = float(np.sqrt((abs(viz) ** 2).sum()) * np.sqrt((abs(eta_zbar) ** 2).sum()))
            cs_margin = min(cs_margin, lim - abs(h))
    bound = 2.0 * numkit.opnorm(left_op(ctx, witness.xi)) * numkit.opnorm(
        left_op(ctx, witness.eta)
    )
    # H(1/p) against the direct pairing
    viz = _xi_z_vector(family, family.p_inv, xic)
    direct = complex(
        (witness.s_matrix @ etac).conj() @ (fourier_p(ctx, family.f, p).matrix @ xic)
    )
    h_inv = complex(
        (witness.u @ (_abs_power_supported(witness.abs_s, p * family.p_inv) @ etac)).conj()
        @ viz
    )
    h_res = abs(h_inv - direct) / max(1.0, abs(direct))
    return WitnessScan(
        grid=tuple(grid),
        values=tuple(values),
        sup_abs=max(abs(v) for v in values),
        bound=bound,
        cauchy_schwarz_margin=float(cs_margin),
        h_at_p_inv_residual=h_res,
    )


@dataclass(frozen=True)
class TensorReport:
    p: float
    q: float
    fp_norm: float
    big_norm: float
    power: int
    mult_residual: float
    bounds: tuple
    geo_bound: float
    max_bound: float


def tensor_sharpening(ctx, f, p, n, size_cap=None):
    """Tensor-power sharpening of the weak (constant 2) inequality: build
    F = (f* (x) f)^(x n) on the 2n-fold product, check multiplicativity of
    the Fourier norm, and report the bounds 2^(1/2k) (||f||_{p,q}
    ||f*||_{p,q})^(1/2) down to the geometric-mean limit."""
    if n < 1:
        raise InterpError("tensor power must be >= 1")
    cap = default_size_cap() if size_cap is None else size_cap
    total = ctx.mg.n_arrows ** (2 * n)
    if total > cap:
        raise SizeCapExceeded(
            "product with %d arrows exceeds the size cap %d" % (total, cap)
        )
    q = conjugate_exponent(p)
    fp_norm = lq_norm(ctx, f, q)
    nf = mixed_norm(ctx.mg, f, p, q)
    nfs = mixed_norm(ctx.mg, involution(f), p, q)

    mg_level = ctx.mg
    fn_level = None
    for _ in range(n):
        prod = product_measured(mg_level, mg_level, size_cap=cap)
        if fn_level is None:
            fn_level = tensor(involution(f), f, prod)
        else:
            fn_level = tensor(fn_level, fn_level, prod)
        mg_level = prod
    big_ctx = RepContext(mg_level)
    big_norm = lq_norm(big_ctx, fn_level, q)
    expected = fp_norm ** (2 * n)
    mult_residual = abs(big_norm - expected) / max(expected, 1e-300)
    bounds = tuple(
        2.0 ** (1.0 / (2.0 * k)) * math.sqrt(nf * nfs) for k in range(1, n + 1)
    )
    return TensorReport(
        p=p,
        q=q,
        fp_norm=fp_norm,
        big_norm=big_norm,
        power=2 * n,
        mult_residual=mult_residual,
        bounds=bounds,
        geo_bound=math.sqrt(nf * nfs),
        max_bound=max(nf, nfs),
    )
