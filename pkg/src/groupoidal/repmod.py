"""Regular representation and the modular package: H = L^2(G, nu_inv),
left/right convolution operators, Delta, J, the von Neumann algebra M with
its commutant, canonical weights and densities, fiber decomposition and
homogeneity of decomposable operators.

Adjoints are taken in the orthonormalized basis e_gamma = delta_gamma /
sqrt(nu_inv({gamma})), so dagger is the conjugate transpose; in that basis
Delta is diagonal and J is "conjugate coordinates, then permute by the
inverse map" (J is never materialized as a complex matrix).
"""

from dataclasses import dataclass

import numpy as np

from . import numkit
from .convalg import GFunction, convolve, delta_twist
from .numkit import _mgs

__all__ = [
    "RepmodError",
    "DensityNotPositive",
    "CommutantSolveFailed",
    "NotDecomposable",
    "NotInAlgebra",
    "BaseMismatch",
    "RepContext",
    "VNData",
    "AntilinearMap",
    "left_op",
    "right_op",
    "modular_ops",
    "commutation_check",
    "vn_data",
    "weight_phi0",
    "weight_psi0",
    "fiber_decomposition",
    "homogeneity_residual",
    "left_bounded_norm",
    "span_residual",
]

VN_CAP = 20
SPAN_TOL = 1e-8


class RepmodError(Exception):
    pass


class DensityNotPositive(RepmodError):
    pass


class CommutantSolveFailed(RepmodError):
    pass


class NotDecomposable(RepmodError):
    pass


class NotInAlgebra(RepmodError):
    pass


class BaseMismatch(RepmodError):
    pass


class AntilinearMap:
    """Antilinear map on coordinates: conjugate, scale by a positive diagonal,
    then permute.  v -> (conj(scale * v))[perm-gather]."""

    def __init__(self, perm, scale=None):
        self.perm = np.asarray(perm)
        self.scale = None if scale is None else np.asarray(scale, dtype=float)

    def __call__(self, v):
        v = np.asarray(v, dtype=np.complex128)
        if self.scale is not None:
            v = v * self.scale
        return np.conj(v[self.perm])

    def conjugate_op(self, a):
        """The linear matrix of v -> self(a @ self(v)) (defined for the
        scale-free involution J)."""
        if self.scale is not None:
            raise RepmodError("conjugation is only defined for the involution J")
        return np.conj(a)[np.ix_(self.perm, self.perm)]


@dataclass(frozen=True, eq=False)
class VNData:
    """The von Neumann algebra data: M basis (left convolvers of delta
    functions), commutant basis, canonical density rho (of phi_0 against the
    matrix trace restricted to M) and its J-conjugate rho_prime."""

    ctx: "RepContext"
    m_basis: np.ndarray
    m_onb: np.ndarray
    mprime_basis: np.ndarray
    mprime_onb: np.ndarray
    rho: np.ndarray
    rho_prime: np.ndarray
    rho_coeff: np.ndarray

    @property
    def dim_m(self):
        return self.m_basis.shape[0]

    @property
    def dim_mprime(self):
        return self.mprime_basis.shape[0]


class _Densities:
    def __init__(self, rho, rho_prime, coeff):
        self.rho = rho
        self.rho_prime = rho_prime
        self.coeff = coeff


class RepContext:
    """L^2(G, nu_inv) with its orthonormalized basis and cached operator
    structure.  Immutable after construction; vn_data and the densities are
    computed once and cached."""

    def __init__(self, mg):
        self.mg = mg
        g = mg.groupoid
        self.dim = g.n_arrows
        self.sqrt_nu_inv = np.sqrt(mg.nu_inv)
        self.delta = mg.delta
        inv = g.inv
        # closed-form left operator: L(f)[a, b] = f(a b^-1) sqrt(w(r a) w(r b))
        lidx = g.comp[:, inv]
        self._lmask = lidx >= 0
        self._lidx = np.where(self._lmask, lidx, 0)
        self._lscale = np.sqrt(np.outer(mg.w_r, mg.w_r))
        # right operator: R(g)[a, b] = g(b^-1 a) w(s b) sqrt(mu(s a)/mu(s b))
        ridx = g.comp[inv, :].T
        self._rmask = ridx >= 0
        self._ridx = np.where(self._rmask, ridx, 0)
        self._rscale = mg.w_s[None, :] * np.sqrt(
            np.outer(mg.mu_s, 1.0 / mg.mu_s)
        )
        # sparse triplets of each M basis matrix L(delta_gamma)
        self._basis_rows = []
        self._basis_cols = []
        self._basis_vals = []
        for gamma in range(self.dim):
            cols = g.r_fiber(g.s[gamma])
            rows = g.comp[gamma, cols]
            vals = np.sqrt(mg.w_r[rows] * mg.w_r[cols])
            self._basis_rows.append(rows)
            self._basis_cols.append(cols)
            self._basis_vals.append(vals)
        self._vn = None
        self._densities = None
        self._fibers = None

    # -- coordinates ---------------------------------------------------

    def check_base(self, f):
        if f.base is not self.mg:
            raise BaseMismatch("function lives on a different measured groupoid")

    def to_coords(self, f):
        self.check_base(f)
        return f.values * self.sqrt_nu_inv

    def from_coords(self, v):
        return GFunction(self.mg, np.asarray(v, dtype=np.complex128) / self.sqrt_nu_inv)

    # -- modular data ----------------------------------------------------

    @property
    def delta_matrix(self):
        return np.diag(self.delta).astype(np.complex128)

    def delta_power(self, z):
        """Diagonal of Delta**z (principal branch)."""
        return np.exp(z * np.log(self.delta))

    @property
    def j_map(self):
        return AntilinearMap(self.mg.groupoid.inv)

    @property
    def s_map(self):
        return AntilinearMap(self.mg.groupoid.inv, scale=np.sqrt(self.delta))

    def conjugate_by_j(self, a):
        return self.j_map.conjugate_op(a)

    # -- cached heavyweight data ------------------------------------------

    def densities(self):
        if self._densities is None:
            self._densities = _solve_densities(self)
        return self._densities

    def vn_data(self, cap=VN_CAP):
        if self._vn is None:
            self._vn = _build_vn_data(self, cap)
        return self._vn

    def fiber_decomposition(self):
        if self._fibers is None:
            self._fibers = FiberDecomposition(self)
        return self._fibers


def left_op(ctx, f):
    """Matrix of xi -> f * xi in the orthonormal basis."""
    ctx.check_base(f)
    return (ctx._lmask * f.values[ctx._lidx] * ctx._lscale).astype(np.complex128)


def right_op(ctx, g):
    """Matrix of xi -> xi * g in the orthonormal basis."""
    ctx.check_base(g)
    return (ctx._rmask * g.values[ctx._ridx] * ctx._rscale).astype(np.complex128)


def modular_ops(ctx):
    """The triple (Delta, J, S = J Delta^(1/2)); Delta as a dense diagonal
    matrix, J and S as antilinear coordinate maps."""
    return ctx.delta_matrix, ctx.j_map, ctx.s_map


def commutation_check(ctx, f, z):
    """Operator-norm residual of Delta^z L(f) Delta^-z = L(delta^z f)."""
    ctx.check_base(f)
    dz = ctx.delta_power(z)
    lhs = left_op(ctx, f) * np.outer(dz, 1.0 / dz)
    rhs = left_op(ctx, delta_twist(f, z))
    return numkit.opnorm(lhs - rhs)


def _basis_matrix(ctx, gamma):
    out = np.zeros((ctx.dim, ctx.dim), dtype=np.complex128)
    out[ctx._basis_rows[gamma], ctx._basis_cols[gamma]] = ctx._basis_vals[gamma]
    return out


def _solve_densities(ctx):
    """Solve Tr(rho L(delta_gamma)) = phi_0(L(delta_gamma)) inside M."""
    n = ctx.dim
    mg = ctx.mg
    g = mg.groupoid
    gram = np.zeros((n, n), dtype=np.complex128)
    dense = np.zeros((n, n), dtype=np.complex128)
    for eta in range(n):
        dense[:] = 0.0
        dense[ctx._basis_rows[eta], ctx._basis_cols[eta]] = ctx._basis_vals[eta]
        col = np.empty(n, dtype=np.complex128)
        for gamma in range(n):
            col[gamma] = (
                ctx._basis_vals[gamma]
                * dense[ctx._basis_cols[gamma], ctx._basis_rows[gamma]]
            ).sum()
        gram[:, eta] = col
    rhs = np.zeros(n, dtype=np.complex128)
    rhs[g.units] = mg.mu
    coeff = numkit.solve_linear(gram, rhs)

    rho = np.zeros((n, n), dtype=np.complex128)
    for gamma in range(n):
        rho[ctx._basis_rows[gamma], ctx._basis_cols[gamma]] += (
            coeff[gamma] * ctx._basis_vals[gamma]
        )
    rho = (rho + rho.conj().T) / 2.0
    spec = numkit.eigh(rho)
    top = max(abs(spec.values[0]), abs(spec.values[-1]))
    if spec.values[0] <= numkit.INV_TOL * max(top, 1e-300):
        raise DensityNotPositive(
            "canonical weight density is not strictly positive (min eig %g)"
            % spec.values[0]
        )
    rho_prime = ctx.conjugate_by_j(rho)
    return _Densities(rho, rho_prime, coeff)


def span_residual(onb_rows, x):
    """Relative distance of a matrix to the span of Frobenius-orthonormal
    basis rows (each row a vectorized matrix)."""
    v = np.asarray(x, dtype=np.complex128).reshape(-1)
    nrm = np.sqrt((abs(v) ** 2).sum())
    if nrm == 0.0:
        return 0.0
    proj = (onb_rows.conj() @ v) @ onb_rows
    return float(np.sqrt((abs(v - proj) ** 2).sum()) / nrm)


def _build_vn_data(ctx, cap):
    n = ctx.dim
    if n > cap:
        raise CommutantSolveFailed(
            "commutant solve needs %d^2 unknowns; raise cap=%d explicitly "
            "if you accept the cost" % (n, cap)
        )
    m_basis = np.stack([_basis_matrix(ctx, gamma) for gamma in range(n)])
    m_onb = _mgs(m_basis.reshape(n, -1).T).T.copy()

    # commutant: nullspace of the stacked commutation constraints
    eye = np.eye(n)
    normal = np.zeros((n * n, n * n), dtype=np.complex128)
    for b in m_basis:
        c = np.kron(b, eye) - np.kron(eye, b.T)
        normal += c.conj().T @ c
    spec = numkit.eigh(normal, tol=1e-6)
    cut = 1e-10 * max(spec.values[-1], 1.0)
    null = spec.values <= cut
    dim_mp = int(null.sum())
    if dim_mp != n:
        raise CommutantSolveFailed(
            "commutant dimension %d does not match dim M = %d" % (dim_mp, n)
        )
    mprime_basis = spec.vectors[:, null].T.reshape(dim_mp, n, n).copy()
    mprime_onb = mprime_basis.reshape(dim_mp, -1).copy()  # already orthonormal

    # every basis element of M commutes with every basis element of M'
    worst = 0.0
    for b in m_basis:
        for c in mprime_basis:
            comm = b @ c - c @ b
            scale = max(numkit.frobenius(b) * numkit.frobenius(c), 1e-300)
            worst = max(worst, numkit.frobenius(comm) / scale)
    if worst > SPAN_TOL:
        raise CommutantSolveFailed(
            "commutant candidate fails to commute with M (residual %g)" % worst
        )

    dens = ctx.densities()
    rho, rho_prime = dens.rho, dens.rho_prime
    if span_residual(m_onb, rho) > SPAN_TOL:
        raise DensityNotPositive("density rho escapes the algebra M")
    if span_residual(mprime_onb, rho_prime) > SPAN_TOL:
        raise DensityNotPositive("dual density rho' escapes the commutant")
    # Delta = rho * rho'^-1 (the spatial-derivative factorization)
    factor = rho @ numkit.psd_power(rho_prime, -1.0)
    if numkit.frobenius(factor - ctx.delta_matrix) > SPAN_TOL * max(
        numkit.frobenius(ctx.delta_matrix), 1e-300
    ):
        raise RepmodError("Delta does not factor as rho (J rho J)^-1")

    return VNData(
        ctx=ctx,
        m_basis=m_basis,
        m_onb=m_onb,
        mprime_basis=mprime_basis,
        mprime_onb=mprime_onb,
        rho=rho,
        rho_prime=rho_prime,
        rho_coeff=dens.coeff,
    )


def vn_data(ctx, cap=VN_CAP):
    return ctx.vn_data(cap)


def weight_phi0(vn, m):
    """phi_0(m) = Tr(rho m) for m in M."""
    if span_residual(vn.m_onb, m) > SPAN_TOL:
        raise NotInAlgebra("argument is not in M within tolerance")
    return complex(np.trace(vn.rho @ m))


def weight_psi0(vn, mp):
    """psi_0(m') = Tr(rho' m') for m' in the commutant (the linear extension
    of the dual weight; it matches phi_0(J m' J) on positive elements)."""
    if span_residual(vn.mprime_onb, mp) > SPAN_TOL:
        raise NotInAlgebra("argument is not in M' within tolerance")
    return complex(np.trace(vn.rho_prime @ mp))


class FiberDecomposition:
    """Source-fiber blocks H_x = L^2(G_x, lambda_x) and the right translation
    isometries R(gamma): H_{s(gamma)} -> H_{r(gamma)}."""

    def __init__(self, ctx):
        self.ctx = ctx
        g = ctx.mg.groupoid
        self.fibers = [g.s_fiber(x) for x in g.units]
        pos = np.full(g.n_arrows, -1, dtype=np.int64)
        for fib in self.fibers:
            pos[fib] = np.arange(len(fib))
        self.pos = pos

    def block(self, t, unit_pos):
        fib = self.fibers[unit_pos]
        return t[np.ix_(fib, fib)]

    def off_block_mass(self, t):
        rest = t.copy()
        for fib in self.fibers:
            rest[np.ix_(fib, fib)] = 0.0
        return numkit.frobenius(rest)

    def right_translation(self, gamma):
        """Permutation matrix of beta -> beta gamma^-1 from the source fiber
        of s(gamma) to the source fiber of r(gamma)."""
        g = self.ctx.mg.groupoid
        src = g.unit_pos[g.s[gamma]]
        dst = g.unit_pos[g.r[gamma]]
        cols = self.fibers[src]
        rows = g.comp[cols, g.inv[gamma]]
        out = np.zeros((len(self.fibers[dst]), len(cols)), dtype=np.complex128)
        out[self.pos[rows], np.arange(len(cols))] = 1.0
        return out


def fiber_decomposition(ctx):
    return ctx.fiber_decomposition()


def homogeneity_residual(ctx, t, alpha, tol=SPAN_TOL):
    """max over arrows of || R(gamma) T_{s(gamma)} - delta^-alpha T_{r(gamma)}
    R(gamma) ||; raises NotDecomposable when the off-block mass of T exceeds
    tolerance."""
    t = np.asarray(t, dtype=np.complex128)
    fd = ctx.fiber_decomposition()
    off = fd.off_block_mass(t)
    if off > tol * max(numkit.frobenius(t), 1.0):
        raise NotDecomposable(
            "operator is not decomposable over source fibers (off-block %g)" % off
        )
    g = ctx.mg.groupoid
    worst = 0.0
    blocks = [fd.block(t, k) for k in range(len(fd.fibers))]
    for gamma in range(ctx.dim):
        src = g.unit_pos[g.s[gamma]]
        dst = g.unit_pos[g.r[gamma]]
        rg = fd.right_translation(gamma)
        lhs = rg @ blocks[src]
        rhs = float(ctx.delta[gamma]) ** (-alpha) * (blocks[dst] @ rg)
        worst = max(worst, numkit.opnorm(lhs - rhs))
    return worst


def left_bounded_norm(ctx, xi):
    """Operator norm of f -> xi * f, built column by column through the
    convolution (an independent code path from left_op)."""
    ctx.check_base(xi)
    n = ctx.dim
    mat = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        e = np.zeros(n, dtype=np.complex128)
        e[j] = 1.0
        mat[:, j] = ctx.to_coords(convolve(xi, ctx.from_coords(e)))
    return numkit.opnorm(mat)
