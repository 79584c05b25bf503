# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``_kernels_py``; keep the arithmetic order identical."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, NAN

cnp.import_array()

PRINTED = 0
NU = 1


def jacobi_recurrence(long n, double a, double b, x):
    cdef cnp.ndarray[cnp.double_t, ndim=1] xs = np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef Py_ssize_t m = xs.shape[0], i
    cdef long k
    cdef cnp.ndarray[cnp.double_t, ndim=1] out = np.empty(m, dtype=np.float64)
    cdef double ab = a + b, ab2 = a * a - b * b
    cdef double c, lead, low, p_prev, p, p_new, xi
    for i in range(m):
        if n == 0:
            out[i] = 1.0
            continue
        xi = xs[i]
        p_prev = 1.0
        p = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * xi
        for k in range(2, n + 1):
            c = 2.0 * k + ab
            lead = 2.0 * k * (k + ab) * (c - 2.0)
            low = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c
            p_new = ((c - 1.0) * (c * (c - 2.0) * xi + ab2) * p - low * p_prev) / lead
            p_prev = p
            p = p_new
        out[i] = p
    return out.reshape(np.shape(x))


def second_derivative(f, double h, int order=4):
    cdef cnp.ndarray[cnp.double_t, ndim=1] v = np.ascontiguousarray(f, dtype=np.float64)
    cdef Py_ssize_t m = v.shape[0], i
    cdef cnp.ndarray[cnp.double_t, ndim=1] out
    cdef double hh = h * h
    if order == 4:
        out = np.empty(max(m - 4, 0), dtype=np.float64)
        for i in range(2, m - 2):
            out[i - 2] = (-v[i + 2] + 16.0 * v[i + 1] - 30.0 * v[i] + 16.0 * v[i - 1] - v[i - 2]) / (12.0 * hh)
        return out
    if order == 2:
        out = np.empty(max(m - 2, 0), dtype=np.float64)
        for i in range(1, m - 1):
            out[i - 1] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / hh
        return out
    raise ValueError(f"unsupported stencil order {order}")


cdef inline double _clamped_sqrt(double v) nogil:
    if v < 0.0:
        if v >= -1e-12:
            return 0.0
        return NAN
    return sqrt(v)


cdef double _condition(int cond, long n, double E, double m0, double alpha,
                       double V0, double q) nogil:
    cdef double r1, r2, eta2, d, xi1, xi2, xi3, a5, a7, a8, a9, r8, r9, r
    if cond == 0:
        r1 = _clamped_sqrt(m0 * m0 - E * E)
        r2 = _clamped_sqrt(0.25 + 2.0 * V0 * (E - m0) / (q * alpha * alpha))
        return r1 / alpha + r2 - (n + 0.5)
    eta2 = 1.0 / (4.0 * alpha * alpha)
    d = E * E - m0 * m0
    xi1 = -eta2 * q * q * d
    xi2 = 2.0 * eta2 * q * d + 8.0 * eta2 * V0 * (E - m0)
    xi3 = -eta2 * d
    a5 = 0.5 * (-q + 2.0 * q)
    a7 = -xi2
    a8 = xi3
    a9 = -q * a7 + q * q * a8 + (a5 * a5 + xi1)
    r8 = _clamped_sqrt(a8)
    r9 = _clamped_sqrt(a9)
    r = r9 - q * r8
    return (-q * n - (2 * n + 1) * a5 + (2 * n + 1) * r - n * (n - 1) * q
            + a7 - 2.0 * q * a8 + 2.0 * r8 * r9)


def condition_value(int cond, long n, double E, double m0, double alpha, double V0, double q):
    return _condition(cond, n, E, m0, alpha, V0, q)


def level_roots(int cond, long n, double m0, double alpha, double V0, double q,
                double lo, double hi, Py_ssize_t scan_points, double tol):
    cdef cnp.ndarray[cnp.double_t, ndim=1] grid = np.linspace(lo, hi, scan_points)
    cdef cnp.ndarray[cnp.double_t, ndim=1] vals = np.empty(scan_points, dtype=np.float64)
    cdef Py_ssize_t i
    cdef int it
    cdef double fi, fj, a, b, fa, fm, mid, width = tol * m0
    roots = []
    for i in range(scan_points):
        vals[i] = _condition(cond, n, grid[i], m0, alpha, V0, q)
    for i in range(scan_points):
        fi = vals[i]
        if fi == 0.0:
            roots.append(grid[i])
            continue
        if i + 1 == scan_points:
            break
        fj = vals[i + 1]
        if not (fi * fj < 0.0):
            continue
        a = grid[i]
        b = grid[i + 1]
        fa = fi
        for it in range(200):
            if b - a <= width:
                break
            mid = 0.5 * (a + b)
            fm = _condition(cond, n, mid, m0, alpha, V0, q)
            if fm == 0.0:
                a = mid
                b = mid
                break
            if (fm < 0.0) == (fa < 0.0):
                a = mid
                fa = fm
            else:
                b = mid
        roots.append(0.5 * (a + b))
    return roots
