"""Jacobi polynomials P_n^{(a,b)}(x) for arbitrary real a, b and real x.

The parameters produced by the bound-state problem are non-classical (b is
usually negative, often below -1) and the argument 1 + 2 q s lies outside
[-1, 1], so evaluation goes through the three-term recurrence, which is a
polynomial identity valid for every real a, b, x.  When the recurrence's
leading coefficient 2k (k + a + b)(2k + a + b - 2) vanishes for some k the
explicit binomial sum is used instead.
"""
from __future__ import annotations

import math

import numpy as np

from . import kernels


def _binom(top: float, k: int) -> float:
    # generalized binomial coefficient C(top, k) for real top
    out = 1.0
    for j in range(k):
        out *= (top - j) / (j + 1)
    return out


def _binomial_sum(n, a, b, x):
    x = np.asarray(x, dtype=float)
    lo, hi = 0.5 * (x - 1.0), 0.5 * (x + 1.0)
    total = np.zeros_like(x)
    for m in range(n + 1):
        total = total + _binom(n + a, n - m) * _binom(n + b, m) * lo**m * hi ** (n - m)
    return total


def _recurrence_breaks(n, a, b) -> bool:
    for k in range(2, n + 1):
        lead = 2.0 * k * (k + a + b) * (2.0 * k + a + b - 2.0)
        if abs(lead) < 1e-12 * k**3:
            return True
    return False


def jacobi_eval(n: int, a: float, b: float, x):
    """Value of the degree-n Jacobi polynomial; scalar in, scalar out."""
    if n < 0 or int(n) != n:
        raise ValueError(f"degree must be a nonnegative integer, got {n}")
    n = int(n)
    for name, v in (("a", a), ("b", b)):
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v}")
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise ValueError("x must be finite")
    # overflow surfaces as the OverflowError below, not as numpy warnings
    with np.errstate(over="ignore", invalid="ignore"):
        if _recurrence_breaks(n, a, b):
            out = _binomial_sum(n, a, b, xa)
        else:
            out = np.asarray(kernels.jacobi_recurrence(n, float(a), float(b), xa.ravel())).reshape(xa.shape)
    if not np.all(np.isfinite(out)):
        raise OverflowError(f"Jacobi value overflowed for n={n}, a={a}, b={b}, x={x}")
    return out.item() if out.ndim == 0 else out


def jacobi_at_one(n: int, a: float, b: float = 0.0) -> float:
    """P_n^{(a,b)}(1) = Gamma(a + n + 1) / (n! Gamma(a + 1)) as the product prod (a + k)/k."""
    if n < 0:
        raise ValueError(f"degree must be nonnegative, got {n}")
    out = 1.0
    for k in range(1, n + 1):
        out *= (a + k) / k
    return out


def jacobi_derivative(n: int, a: float, b: float, x):
    """d/dx P_n^{(a,b)} = (n + a + b + 1)/2 * P_{n-1}^{(a+1,b+1)}."""
    if n == 0:
        z = np.zeros_like(np.asarray(x, dtype=float))
        return z.item() if z.ndim == 0 else z
    return 0.5 * (n + a + b + 1.0) * jacobi_eval(n - 1, a + 1.0, b + 1.0, x)
