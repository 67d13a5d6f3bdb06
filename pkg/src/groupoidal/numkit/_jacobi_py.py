"""Pure-numpy cyclic Jacobi kernel, the fallback for the compiled extension.

Both backends run the identical sweep order and rotation formulas so that
results agree to rounding; keep any change here in sync with ``_jacobi.pyx``.
"""

import numpy as np

MAX_SWEEPS = 64
JACOBI_EPS = 1e-14


def cyclic_jacobi(a):
    """Diagonalize a Hermitian matrix in place by cyclic Jacobi rotations.

    ``a`` must be a square C-contiguous complex128 array (it is destroyed).
    Returns ``(values, vectors, sweeps)`` with unsorted real eigenvalues,
    the accumulated unitary, and the number of completed sweeps, or
    ``sweeps = -1`` when the sweep budget ran out.
    """
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    if n <= 1:
        return a.diagonal().real.copy(), v, 0

    scale = np.sqrt((a.real * a.real + a.imag * a.imag).sum())
    if scale == 0.0:
        return np.zeros(n), v, 0
    stop = JACOBI_EPS * scale
    skip = stop / (2.0 * n)

    for sweep in range(MAX_SWEEPS):
        upper = np.triu(a, 1)
        off = np.sqrt(2.0 * (upper.real**2 + upper.imag**2).sum())
        if off <= stop:
            return a.diagonal().real.copy(), v, sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                m = abs(apq)
                if m <= skip:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * m)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                ph = apq / m
                phc = ph.conjugate()

                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - (s * phc) * cq
                a[:, q] = s * cp + (c * phc) * cq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - (s * ph) * rq
                a[q, :] = s * rp + (c * ph) * rq
                a[p, p] = app - t * m
                a[q, q] = aqq + t * m
                a[p, q] = 0.0
                a[q, p] = 0.0

                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - (s * phc) * vq
                v[:, q] = s * vp + (c * phc) * vq

    return a.diagonal().real.copy(), v, -1
