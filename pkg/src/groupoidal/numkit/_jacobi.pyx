# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled cyclic Jacobi kernel.

Mirror of ``_jacobi_py.cyclic_jacobi``: identical sweep order and rotation
formulas, so the two backends agree to rounding.
"""

import numpy as np

from libc.math cimport sqrt

MAX_SWEEPS = 64
JACOBI_EPS = 1e-14

ctypedef double complex cplx


def cyclic_jacobi(a):
    """In-place cyclic Jacobi on a square C-contiguous complex128 array.

    Returns ``(values, vectors, sweeps)``; ``sweeps = -1`` means the sweep
    budget was exhausted before the off-diagonal mass dropped below target.
    """
    cdef cplx[:, ::1] am = a
    cdef Py_ssize_t n = am.shape[0]
    v_arr = np.eye(n, dtype=np.complex128)
    cdef cplx[:, ::1] vm = v_arr
    if n <= 1:
        return np.asarray(a).diagonal().real.copy(), v_arr, 0

    cdef double scale = 0.0, off, stop, skip
    cdef double m, app, aqq, tau, t, c, s
    cdef cplx apq, ph, phc, xp, xq
    cdef Py_ssize_t i, p, q, sweep

    for p in range(n):
        for q in range(n):
            apq = am[p, q]
            scale += apq.real * apq.real + apq.imag * apq.imag
    scale = sqrt(scale)
    if scale == 0.0:
        return np.zeros(n), v_arr, 0
    stop = JACOBI_EPS * scale
    skip = stop / (2.0 * n)

    for sweep in range(MAX_SWEEPS):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = am[p, q]
                off += apq.real * apq.real + apq.imag * apq.imag
        off = sqrt(2.0 * off)
        if off <= stop:
            return np.asarray(a).diagonal().real.copy(), v_arr, sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = am[p, q]
                m = sqrt(apq.real * apq.real + apq.imag * apq.imag)
                if m <= skip:
                    continue
                app = am[p, p].real
                aqq = am[q, q].real
                tau = (aqq - app) / (2.0 * m)
                if tau >= 0.0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                ph = apq / m
                phc = ph.conjugate()

                for i in range(n):
                    xp = am[i, p]
                    xq = am[i, q]
                    am[i, p] = c * xp - (s * phc) * xq
                    am[i, q] = s * xp + (c * phc) * xq
                for i in range(n):
                    xp = am[p, i]
                    xq = am[q, i]
                    am[p, i] = c * xp - (s * ph) * xq
                    am[q, i] = s * xp + (c * ph) * xq
                am[p, p] = app - t * m
                am[q, q] = aqq + t * m
                am[p, q] = 0.0
                am[q, p] = 0.0

                for i in range(n):
                    xp = vm[i, p]
                    xq = vm[i, q]
                    vm[i, p] = c * xp - (s * phc) * xq
                    vm[i, q] = s * xp + (c * phc) * xq

    return np.asarray(a).diagonal().real.copy(), v_arr, -1
