"""q-deformed hyperbolic functions, the q-Poschl-Teller well and the mass profile.

All functions accept scalars or numpy arrays and return the same shape.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SingularityError(ArithmeticError):
    """Raised where cosh_q vanishes (only possible for q < 0)."""


@dataclass(frozen=True)
class DeformedParams:
    q: float
    alpha: float
    V0: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if self.q == 0:
            raise ValueError("q = 0 is not allowed: the quantization condition divides by q")
        if not -1 < self.q <= 1:
            raise ValueError(f"q must lie in (-1, 1], got {self.q}")


@dataclass(frozen=True)
class MassParams:
    m0: float
    deformed: DeformedParams

    def __post_init__(self):
        if not self.m0 > 0:
            raise ValueError(f"m0 must be > 0, got {self.m0}")


def _out(x):
    return x.item() if isinstance(x, np.ndarray) and x.ndim == 0 else x


def sinh_q(z, q):
    z = np.asarray(z, dtype=float)
    return _out(0.5 * (np.exp(z) - q * np.exp(-z)))


def cosh_q(z, q):
    z = np.asarray(z, dtype=float)
    return _out(0.5 * (np.exp(z) + q * np.exp(-z)))


def _checked_cosh_q(z, q):
    z = np.asarray(z, dtype=float)
    ep, em = np.exp(z), q * np.exp(-z)
    c = 0.5 * (ep + em)
    # cancellation test: e^z + q e^{-z} == 0 up to rounding
    if np.any(np.abs(c) <= 4 * np.finfo(float).eps * np.maximum(ep, np.abs(em))):
        raise SingularityError(f"cosh_q vanishes at z = ln(-q)/2 for q = {q}")
    return c


def tanh_q(z, q):
    c = _checked_cosh_q(z, q)
    return _out(np.asarray(sinh_q(z, q)) / c)


def sech_q(z, q):
    return _out(1.0 / _checked_cosh_q(z, q))


def well_profile(x, p: DeformedParams):
    """Return s/(1 + q s)^2 with s = exp(-2 alpha x); the shape shared by V and m."""
    s = np.exp(-2.0 * p.alpha * np.asarray(x, dtype=float))
    den = 1.0 + p.q * s
    if np.any(den == 0):
        raise SingularityError(f"1 + q exp(-2 alpha x) vanishes for q = {p.q}")
    return s / den**2


def potential(x, p: DeformedParams):
    """q-Poschl-Teller well -V0 / cosh_q^2(alpha x), evaluated in rational form."""
    return _out(-4.0 * p.V0 * well_profile(x, p))


def potential_sech_form(x, p: DeformedParams):
    """Same well through sech_q directly; overflows for large alpha x, kept for identity checks."""
    return _out(-p.V0 * np.asarray(sech_q(p.alpha * np.asarray(x, dtype=float), p.q)) ** 2)


def mass(x, mp: MassParams):
    """Position-dependent mass m0 + 4 V0 s/(1 + q s)^2."""
    return _out(mp.m0 + 4.0 * mp.deformed.V0 * well_profile(x, mp.deformed))
