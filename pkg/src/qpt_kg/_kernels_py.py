"""Pure numpy/Python kernels; the reference twin of ``_kernels.pyx``.

Arithmetic is written in the same order as the Cython version so both
backends produce identical floats for identical inputs.
"""
from __future__ import annotations

import math

import numpy as np

PRINTED = 0
NU = 1


def jacobi_recurrence(n, a, b, x):
    x = np.asarray(x)
    x = np.ascontiguousarray(x, dtype=np.result_type(x.dtype, np.float64))
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev
    p = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x
    ab = a + b
    ab2 = a * a - b * b
    for k in range(2, n + 1):
        c = 2.0 * k + ab
        lead = 2.0 * k * (k + ab) * (c - 2.0)
        mid = (c - 1.0) * (c * (c - 2.0) * x + ab2)
        low = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c
        p_prev, p = p, (mid * p - low * p_prev) / lead
    return p


def second_derivative(f, h, order=4):
    """Central second difference on the interior nodes (drops order//2 nodes per side)."""
    f = np.asarray(f)
    f = np.ascontiguousarray(f, dtype=np.result_type(f.dtype, np.float64))
    if order == 4:
        return (-f[4:] + 16.0 * f[3:-1] - 30.0 * f[2:-2] + 16.0 * f[1:-3] - f[:-4]) / (12.0 * h * h)
    if order == 2:
        return (f[2:] - 2.0 * f[1:-1] + f[:-2]) / (h * h)
    raise ValueError(f"unsupported stencil order {order}")


def _clamped_sqrt(v):
    if v < 0.0:
        if v >= -1e-12:
            return 0.0
        return math.nan
    return math.sqrt(v)


def condition_value(cond, n, E, m0, alpha, V0, q):
    """Scalar quantization function; NaN outside the admissible window."""
    if cond == PRINTED:
        r1 = _clamped_sqrt(m0 * m0 - E * E)
        r2 = _clamped_sqrt(0.25 + 2.0 * V0 * (E - m0) / (q * alpha * alpha))
        return r1 / alpha + r2 - (n + 0.5)
    # generic NU condition specialized to a1 = 1, a2 = a3 = -q
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
    return (
        -q * n
        - (2 * n + 1) * a5
        + (2 * n + 1) * r
        - n * (n - 1) * q
        + a7
        - 2.0 * q * a8
        + 2.0 * r8 * r9
    )


def level_roots(cond, n, m0, alpha, V0, q, lo, hi, scan_points, tol):
    """Sign-change scan of [lo, hi] followed by bisection to width tol * m0.

    Returns the sorted roots, including any scan node where the function is
    exactly zero.
    """
    grid = np.linspace(lo, hi, scan_points)
    vals = np.array([condition_value(cond, n, e, m0, alpha, V0, q) for e in grid])
    roots = []
    width = tol * m0
    for i in range(scan_points):
        fi = vals[i]
        if fi == 0.0:
            roots.append(float(grid[i]))
            continue
        if i + 1 == scan_points:
            break
        fj = vals[i + 1]
        if not (fi * fj < 0.0):
            continue
        a, b, fa = float(grid[i]), float(grid[i + 1]), fi
        for _ in range(200):
            if b - a <= width:
                break
            mid = 0.5 * (a + b)
            fm = condition_value(cond, n, mid, m0, alpha, V0, q)
            if fm == 0.0:
                a = b = mid
                break
            if (fm < 0.0) == (fa < 0.0):
                a, fa = mid, fm
            else:
                b = mid
        roots.append(0.5 * (a + b))
    return roots
