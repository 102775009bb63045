# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: Jacobi eigensolver, Schrodinger RHS, expectations.

Mirrors lyapctrl.kernels._pure function-for-function.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport hypot, sqrt, fabs

cnp.import_array()

DEF OFF_TOL = 1e-14
DEF MAX_SWEEPS = 60


cdef inline double _cabs(double complex z) noexcept:
    return hypot(z.real, z.imag)


cdef void _phase_fix(double complex[:, ::1] v, Py_ssize_t n, Py_ssize_t col) noexcept:
    cdef Py_ssize_t i, j
    cdef double complex x, rot
    cdef double a
    for i in range(n):
        x = v[i, col]
        a = _cabs(x)
        if a > 1e-12:
            rot = a / x
            for j in range(n):
                v[j, col] = v[j, col] * rot
            return


def _eigh2(a):
    cdef double complex[:, :] am = np.ascontiguousarray(a, dtype=complex)
    cdef double a00 = am[0, 0].real
    cdef double a11 = am[1, 1].real
    cdef double complex b = am[0, 1]
    cdef double m = 0.5 * (a00 + a11)
    cdef double r = hypot(0.5 * (a00 - a11), _cabs(b))
    w = np.array([m - r, m + r])
    v = np.empty((2, 2), dtype=complex)
    cdef double complex[:, ::1] vm = v
    cdef Py_ssize_t k
    cdef double nrm
    if _cabs(b) > 1e-300 * max(1.0, fabs(a00) + fabs(a11)) and r > 0.0:
        for k in range(2):
            vm[0, k] = b
            vm[1, k] = (m + (2 * k - 1) * r) - a00
            nrm = sqrt(_cabs(vm[0, k]) ** 2 + _cabs(vm[1, k]) ** 2)
            vm[0, k] = vm[0, k] / nrm
            vm[1, k] = vm[1, k] / nrm
            _phase_fix(vm, 2, k)
    else:
        if a00 <= a11:
            vm[0, 0] = 1; vm[1, 0] = 0
            vm[0, 1] = 0; vm[1, 1] = 1
        else:
            vm[0, 0] = 0; vm[1, 0] = 1
            vm[0, 1] = 1; vm[1, 1] = 0
    return w, v


def eigh_herm(a):
    """Cyclic-Jacobi eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues ascending, eigenvectors as orthonormal columns),
    deterministic for identical input.
    """
    a = np.ascontiguousarray(a, dtype=complex)
    cdef Py_ssize_t n = a.shape[0]
    if n == 1:
        return np.array([a[0, 0].real]), np.eye(1, dtype=complex)
    if n == 2:
        return _eigh2(a)

    m_arr = a.copy()
    v_arr = np.eye(n, dtype=complex)
    cdef double complex[:, ::1] m = m_arr
    cdef double complex[:, ::1] v = v_arr
    cdef double scale = max(1.0, float(np.max(np.abs(m_arr))))
    cdef Py_ssize_t p, q, i, sweep
    cdef double off, app, aqq, tau, t, c, s
    cdef double complex apq, phase, pf, xp, xq

    for sweep in range(MAX_SWEEPS):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += _cabs(m[p, q]) ** 2
        if sqrt(off) <= OFF_TOL * scale * n:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p, q]
                if _cabs(apq) <= OFF_TOL * scale * 1e-2:
                    continue
                app = m[p, p].real
                aqq = m[q, q].real
                phase = apq / _cabs(apq)
                tau = (aqq - app) / (2.0 * _cabs(apq))
                t = (1.0 if tau >= 0.0 else -1.0) / (fabs(tau) + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                pf = phase.real - 1j * phase.imag
                for i in range(n):
                    xp = m[i, p]
                    xq = m[i, q]
                    m[i, p] = c * xp - s * pf * xq
                    m[i, q] = s * xp + c * pf * xq
                for i in range(n):
                    xp = m[p, i]
                    xq = m[q, i]
                    m[p, i] = c * xp - s * phase * xq
                    m[q, i] = s * xp + c * phase * xq
                m[p, q] = 0.0
                m[q, p] = 0.0
                for i in range(n):
                    xp = v[i, p]
                    xq = v[i, q]
                    v[i, p] = c * xp - s * pf * xq
                    v[i, q] = s * xp + c * pf * xq

    w = np.empty(n)
    for p in range(n):
        w[p] = m[p, p].real
    order = np.argsort(w, kind="stable")
    w = w[order]
    v_arr = np.ascontiguousarray(v_arr[:, order])
    v = v_arr
    for p in range(n):
        _phase_fix(v, n, p)
    return w, v_arr


def schrodinger_rhs(h, psi):
    """-i H psi with hbar = 1."""
    cdef double complex[:, :] hm = h
    cdef double complex[:] pm = psi
    cdef Py_ssize_t n = hm.shape[0]
    out = np.empty(n, dtype=complex)
    cdef double complex[:] om = out
    cdef Py_ssize_t i, j
    cdef double complex acc
    for i in range(n):
        acc = 0
        for j in range(n):
            acc = acc + hm[i, j] * pm[j]
        om[i] = -1j * acc
    return out


def expect(m, psi):
    """<psi| m |psi> without any reality assumption."""
    cdef double complex[:, :] mm = m
    cdef double complex[:] pm = psi
    cdef Py_ssize_t n = mm.shape[0]
    cdef Py_ssize_t i, j
    cdef double complex acc = 0, row
    for i in range(n):
        row = 0
        for j in range(n):
            row = row + mm[i, j] * pm[j]
        acc = acc + (pm[i].real - 1j * pm[i].imag) * row
    return complex(acc)
