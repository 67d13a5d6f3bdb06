"""Dense complex linear-algebra kernels used by every other module.

All decompositions run through one deterministic cyclic Jacobi eigensolver
(compiled extension when available, numpy fallback otherwise); matrix powers
are always spectral, never Padé/Schur, because the spectra are the point.
"""

import os
from typing import NamedTuple

import numpy as np

_forced = os.environ.get("GROUPOIDAL_NUMKIT_BACKEND", "").strip().lower()
if _forced == "python":
    from . import _jacobi_py as _kernel

    BACKEND = "python"
elif _forced == "cython":
    from . import _jacobi as _kernel

    BACKEND = "cython"
else:
    try:
        from . import _jacobi as _kernel

        BACKEND = "cython"
    except ImportError:
        from . import _jacobi_py as _kernel

        BACKEND = "python"

__all__ = [
    "BACKEND",
    "HermEig",
    "NumkitError",
    "NotHermitian",
    "NoConvergence",
    "NotPSD",
    "SingularNegativePower",
    "Inconsistent",
    "EQ_TOL",
    "PSD_TOL",
    "INV_TOL",
    "eigh",
    "svd_values",
    "psd_power",
    "psd_power_complex",
    "solve_linear",
    "trace_abs_power",
    "frobenius",
    "opnorm",
]

# Default tolerances: equality checks are relative, PSD admission allows a
# tiny negative tail, the invertibility threshold decides support cutoffs.
EQ_TOL = 1e-9
PSD_TOL = 1e-10
INV_TOL = 1e-12


class NumkitError(Exception):
    """Base class for numerical-kernel failures."""


class NotHermitian(NumkitError):
    pass


class NoConvergence(NumkitError):
    pass


class NotPSD(NumkitError):
    pass


class SingularNegativePower(NumkitError):
    pass


class Inconsistent(NumkitError):
    pass


class HermEig(NamedTuple):
    """Spectral data of a Hermitian matrix: ascending values, unitary columns."""

    values: np.ndarray
    vectors: np.ndarray


def _as_matrix(a):
    a = np.ascontiguousarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError("expected a 2-d array, got shape %r" % (a.shape,))
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError("matrix entries must be finite")
    return a


def frobenius(a):
    """Frobenius norm."""
    a = np.asarray(a)
    return float(np.sqrt((a.real**2 + a.imag**2).sum()))


def eigh(a, tol=EQ_TOL):
    """Spectral decomposition of a Hermitian matrix by cyclic Jacobi.

    Raises NotHermitian when ``norm(a - a†) > tol * norm(a)`` and
    NoConvergence if the sweep budget runs out (never seen in practice).
    """
    a = _as_matrix(a)
    n, m = a.shape
    if n != m:
        raise NotHermitian("matrix is not square: %d x %d" % (n, m))
    scale = frobenius(a)
    if frobenius(a - a.conj().T) > tol * max(scale, 1e-300):
        raise NotHermitian("matrix deviates from its adjoint beyond tolerance")
    work = np.ascontiguousarray((a + a.conj().T) / 2.0)
    values, vectors, sweeps = _kernel.cyclic_jacobi(work)
    if sweeps < 0:
        raise NoConvergence("Jacobi sweep budget exhausted")
    order = np.argsort(values, kind="stable")
    return HermEig(values[order], np.ascontiguousarray(vectors[:, order]))


def _mgs(v):
    """Modified Gram-Schmidt re-orthonormalization of the columns of v."""
    v = v.copy()
    for j in range(v.shape[1]):
        for k in range(j):
            v[:, j] -= (v[:, k].conj() @ v[:, j]) * v[:, k]
        nrm = np.sqrt((v[:, j].conj() @ v[:, j]).real)
        if nrm > 0.0:
            v[:, j] /= nrm
    return v


def svd_values(a):
    """Singular values, descending.

    Computed as eigh of the smaller Gram matrix followed by a safeguard
    re-orthogonalization; each value is then recovered as ``norm(A v)`` so
    that small singular values keep absolute (not square-root) accuracy.
    """
    a = _as_matrix(a)
    rows, cols = a.shape
    if min(rows, cols) == 0:
        return np.zeros(0)
    if cols > rows:
        a = a.conj().T
        rows, cols = cols, rows
    gram = a.conj().T @ a
    dec = eigh(gram, tol=1e-6)
    av = a @ _mgs(dec.vectors)
    sig = np.sqrt((av.real**2 + av.imag**2).sum(axis=0))
    sig.sort()
    return sig[::-1].copy()


def trace_abs_power(a, q):
    """``sum(sigma_i ** q)`` over singular values; ``q = inf`` gives the
    operator norm."""
    if q != np.inf and q < 1:
        raise ValueError("exponent q must be >= 1 or inf, got %r" % (q,))
    sig = svd_values(a)
    if sig.size == 0:
        return 0.0
    if q == np.inf:
        return float(sig[0])
    return float((sig**q).sum())


def opnorm(a):
    """Operator (spectral) norm."""
    return trace_abs_power(a, np.inf)


def psd_power(a, t, tol=PSD_TOL):
    """Spectral power ``a**t`` of a positive semidefinite matrix.

    Zero eigenvalues map to zero for ``t > 0`` (so ``t = 0`` yields the
    support projection); negative powers require the spectrum to clear the
    invertibility threshold, else SingularNegativePower.
    """
    a = _as_matrix(a)
    dec = eigh(a)
    vals = dec.values
    scale = max(abs(vals[0]), abs(vals[-1])) if vals.size else 0.0
    if vals.size and vals[0] < -tol * max(scale, 1e-300):
        raise NotPSD("minimum eigenvalue %g below PSD tolerance" % vals[0])
    cut = INV_TOL * max(scale, 1e-300)
    if t < 0 and vals.size and vals[0] <= cut:
        raise SingularNegativePower(
            "negative power of a numerically singular matrix"
        )
    pos = np.clip(vals, 0.0, None)
    powered = np.zeros_like(pos)
    support = pos > cut
    powered[support] = pos[support] ** t
    out = (dec.vectors * powered) @ dec.vectors.conj().T
    return (out + out.conj().T) / 2.0


def psd_power_complex(a, z):
    """Principal-branch complex power of a strictly positive matrix."""
    a = _as_matrix(a)
    dec = eigh(a)
    vals = dec.values
    scale = max(abs(vals[0]), abs(vals[-1])) if vals.size else 0.0
    if vals.size and vals[0] <= INV_TOL * max(scale, 1e-300):
        raise SingularNegativePower("complex power needs a positive definite input")
    powered = np.exp(z * np.log(vals))
    return (dec.vectors * powered) @ dec.vectors.conj().T


def solve_linear(a, b, tol=EQ_TOL):
    """Minimal-norm least-squares solution of ``a x = b``.

    Raises Inconsistent when the residual exceeds ``tol * max(1, norm(b))``.
    """
    a = _as_matrix(a)
    b = np.asarray(b, dtype=np.complex128).reshape(-1)
    if b.shape[0] != a.shape[0]:
        raise ValueError("shape mismatch between matrix and right-hand side")
    gram = a.conj().T @ a
    dec = eigh(gram, tol=1e-6)
    vals = dec.values
    cut = (INV_TOL * max(vals[-1], 0.0)) if vals.size else 0.0
    inv = np.zeros_like(vals)
    keep = vals > max(cut, 0.0)
    inv[keep] = 1.0 / vals[keep]
    x = dec.vectors @ (inv * (dec.vectors.conj().T @ (a.conj().T @ b)))
    residual = np.sqrt((abs(a @ x - b) ** 2).sum())
    if residual > tol * max(1.0, np.sqrt((abs(b) ** 2).sum())):
        raise Inconsistent("system is inconsistent: residual %g" % residual)
    return x
