"""Parametric Nikiforov-Uvarov machinery.

The equation handled is

    psi'' + (a1 - a2 s) / (s (1 - a3 s)) psi'
          + (-xi1 s^2 + xi2 s - xi3) / (s (1 - a3 s))^2 psi = 0

and everything downstream (k, pi, tau, the quantization condition and the
wavefunction exponents) is expressed through the derived constants a4..a13.

``root_sign`` selects the sign taken for sqrt(a8).  The usual choice is +1,
which gives the factor s^{+sqrt(a8)} in the wavefunction; -1 selects the
other Frobenius branch at s = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

RADICAND_CLAMP = 1e-12


class NUDomainError(ValueError):
    """A radicand required by the method is negative."""


@dataclass(frozen=True)
class StandardForm:
    a1: float
    a2: float
    a3: float
    xi1: float
    xi2: float
    xi3: float


@dataclass(frozen=True)
class DerivedParams:
    a4: float
    a5: float
    a6: float
    a7: float
    a8: float
    a9: float
    a10: float
    a11: float
    a12: float
    a13: float
    sqrt_a8: float
    sqrt_a9: float


def _sqrt(value: float, name: str) -> float:
    if value < 0:
        if value >= -RADICAND_CLAMP:
            return 0.0
        raise NUDomainError(f"negative radicand {name} = {value!r}")
    return math.sqrt(value)


def derive_params(sf: StandardForm, root_sign: int = 1) -> DerivedParams:
    a4 = 0.5 * (1.0 - sf.a1)
    a5 = 0.5 * (sf.a2 - 2.0 * sf.a3)
    a6 = a5 * a5 + sf.xi1
    a7 = 2.0 * a4 * a5 - sf.xi2
    a8 = a4 * a4 + sf.xi3
    a9 = sf.a3 * a7 + sf.a3 * sf.a3 * a8 + a6
    r8 = root_sign * _sqrt(a8, "a8 = a4^2 + xi3")
    r9 = _sqrt(a9, "a9 = a3 a7 + a3^2 a8 + a6")
    return DerivedParams(
        a4=a4,
        a5=a5,
        a6=a6,
        a7=a7,
        a8=a8,
        a9=a9,
        a10=sf.a1 + 2.0 * a4 + 2.0 * r8,
        a11=sf.a2 - 2.0 * a5 + 2.0 * (r9 + sf.a3 * r8),
        a12=a4 + r8,
        a13=a5 - (r9 + sf.a3 * r8),
        sqrt_a8=r8,
        sqrt_a9=r9,
    )


def k_value(sf: StandardForm, dp: DerivedParams) -> float:
    """k that turns the radicand of pi(s) into a perfect square (negative-root choice)."""
    return -(dp.a7 + 2.0 * sf.a3 * dp.a8) - 2.0 * dp.sqrt_a8 * dp.sqrt_a9


def pi_radicand(s, sf: StandardForm, dp: DerivedParams, k: float | None = None):
    """Quadratic under the square root of pi(s) for a given k (defaults to :func:`k_value`)."""
    if k is None:
        k = k_value(sf, dp)
    return (dp.a6 - k * sf.a3) * s * s + (dp.a7 + k) * s + dp.a8


def pi_discriminant(sf: StandardForm, dp: DerivedParams, k: float | None = None) -> float:
    """Discriminant of :func:`pi_radicand`; zero exactly when the radicand is a perfect square."""
    if k is None:
        k = k_value(sf, dp)
    return (dp.a7 + k) ** 2 - 4.0 * (dp.a6 - k * sf.a3) * dp.a8


def pi_polynomial(s, sf: StandardForm, dp: DerivedParams, branch: str = "bound"):
    """pi(s) = a4 + a5 s -/+ [(sqrt(a9) + a3 sqrt(a8)) s - sqrt(a8)].

    ``branch="bound"`` takes the minus sign, ``"other"`` the plus sign.
    """
    sign = {"bound": -1.0, "other": 1.0}[branch]
    return dp.a4 + dp.a5 * s + sign * ((dp.sqrt_a9 + sf.a3 * dp.sqrt_a8) * s - dp.sqrt_a8)


def tau_polynomial(s, sf: StandardForm, dp: DerivedParams, branch: str = "bound"):
    """tau(s) = (a1 - a2 s) + 2 pi(s)."""
    return sf.a1 - sf.a2 * s + 2.0 * pi_polynomial(s, sf, dp, branch)


def lambda_values(n: int, sf: StandardForm, dp: DerivedParams) -> tuple[float, float]:
    """(lambda, lambda_n) on the bound branch; quantization means they coincide."""
    pi_slope = dp.a5 - (dp.sqrt_a9 + sf.a3 * dp.sqrt_a8)
    tau_slope = -(sf.a2 - 2.0 * dp.a5) - 2.0 * (dp.sqrt_a9 + sf.a3 * dp.sqrt_a8)
    sigma_second = -2.0 * sf.a3
    lam = k_value(sf, dp) + pi_slope
    lam_n = -n * tau_slope - 0.5 * n * (n - 1) * sigma_second
    return lam, lam_n


def quantization_residual(n: int, sf: StandardForm, dp: DerivedParams) -> float:
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    r = dp.sqrt_a9 + sf.a3 * dp.sqrt_a8
    return (
        sf.a2 * n
        - (2 * n + 1) * dp.a5
        + (2 * n + 1) * r
        + n * (n - 1) * sf.a3
        + dp.a7
        + 2.0 * sf.a3 * dp.a8
        + 2.0 * dp.sqrt_a8 * dp.sqrt_a9
    )


@dataclass(frozen=True)
class FactorExponents:
    rho_s_exp: float
    rho_u_exp: float
    phi_s_exp: float
    phi_u_exp: float
    jacobi_a: float
    jacobi_b: float


def factor_exponents(sf: StandardForm, dp: DerivedParams) -> FactorExponents:
    """Exponents of rho(s) = s^. (1 - a3 s)^., phi(s) = s^. (1 - a3 s)^. and the Jacobi superscripts.

    The Jacobi factor is P_n^{(jacobi_a, jacobi_b)}(1 - 2 a3 s).  a3 = 0 is the
    exponential limit of the method and is not supported.
    """
    if sf.a3 == 0:
        raise NUDomainError("a3 = 0 (exponential limit) is not supported")
    rho_u = dp.a11 / sf.a3 - dp.a10 - 1.0
    return FactorExponents(
        rho_s_exp=dp.a10 - 1.0,
        rho_u_exp=rho_u,
        phi_s_exp=dp.a12,
        phi_u_exp=-dp.a12 - dp.a13 / sf.a3,
        jacobi_a=dp.a10 - 1.0,
        jacobi_b=rho_u,
    )
