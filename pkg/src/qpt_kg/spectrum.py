"""Energy quantization for the q-Poschl-Teller Klein-Gordon problem.

Two quantization functions are available:

``"printed"``
    (1/alpha) sqrt(m0^2 - E^2) + sqrt(1/4 + 2 V0 (E - m0)/(q alpha^2)) - (n + 1/2),
    the closed-form condition.  This is the default.
``"nu"``
    the generic Nikiforov-Uvarov condition evaluated on the problem's
    standard form with the decaying (+sqrt(a8)) branch.

The two do not share roots in general; see README.md.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

from . import kernels
from .nu_engine import RADICAND_CLAMP, StandardForm, derive_params, factor_exponents, quantization_residual

log = logging.getLogger(__name__)

CONDITIONS = {"printed": kernels.PRINTED, "nu": kernels.NU}


class ParameterError(ValueError):
    """Invalid physical parameters."""


class QuantizationDomainError(ValueError):
    """Energy outside the admissible window of the quantization condition."""


@dataclass(frozen=True)
class ProblemParams:
    m0: float
    V0: float
    alpha: float
    q: float
    eta2: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("m0", "V0", "alpha", "q"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ParameterError(f"{name} must be a finite real number, got {v!r}")
        if self.m0 <= 0:
            raise ParameterError(f"m0 must be > 0, got {self.m0}")
        if self.alpha <= 0:
            raise ParameterError(f"alpha must be > 0, got {self.alpha}")
        if self.q == 0:
            raise ParameterError(
                "q = 0 is not allowed: the quantization condition contains 2 V0 (E - m0)/(q alpha^2)"
            )
        if not -1 < self.q <= 1:
            raise ParameterError(f"q must lie in (-1, 1], got {self.q}")
        object.__setattr__(self, "eta2", 1.0 / (4.0 * self.alpha**2))

    def as_dict(self) -> dict:
        return {"m0": self.m0, "V0": self.V0, "alpha": self.alpha, "q": self.q}


@dataclass(frozen=True)
class BoundState:
    n: int
    E: float
    branch: str
    eps: float
    jacobi_a: float
    jacobi_b: float

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "E": self.E,
            "branch": self.branch,
            "eps": self.eps,
            "jacobi_a": self.jacobi_a,
            "jacobi_b": self.jacobi_b,
        }


@dataclass
class SpectrumReport:
    params: ProblemParams
    states: list[BoundState]
    windows: list[tuple[float, float]]
    condition: str = "printed"
    residuals: list[float | None] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)


def standard_form(p: ProblemParams, E: float) -> StandardForm:
    d = E * E - p.m0 * p.m0
    return StandardForm(
        a1=1.0,
        a2=-p.q,
        a3=-p.q,
        xi1=-p.eta2 * p.q * p.q * d,
        xi2=2.0 * p.eta2 * p.q * d + 8.0 * p.eta2 * p.V0 * (E - p.m0),
        xi3=-p.eta2 * d,
    )


def _well_radicand(E: float, p: ProblemParams) -> float:
    return 0.25 + 2.0 * p.V0 * (E - p.m0) / (p.q * p.alpha**2)


def quantization_lhs(E: float, n: int, p: ProblemParams) -> float:
    """Residual of the closed-form condition; zero at a quantized energy."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    r1 = p.m0 * p.m0 - E * E
    if -RADICAND_CLAMP <= r1 < 0:
        r1 = 0.0
    if r1 < 0:
        raise QuantizationDomainError(f"|E| > m0: rest-mass radicand m0^2 - E^2 = {r1!r} < 0")
    r2 = _well_radicand(E, p)
    if -RADICAND_CLAMP <= r2 < 0:
        r2 = 0.0
    if r2 < 0:
        raise QuantizationDomainError(
            f"well radicand 1/4 + 2 V0 (E - m0)/(q alpha^2) = {r2!r} < 0 at E = {E!r}"
        )
    return math.sqrt(r1) / p.alpha + math.sqrt(r2) - (n + 0.5)


def nu_condition(E: float, n: int, p: ProblemParams, root_sign: int = 1) -> float:
    """Generic NU quantization residual on this problem's standard form."""
    sf = standard_form(p, E)
    return quantization_residual(n, sf, derive_params(sf, root_sign))


def admissible_windows(p: ProblemParams) -> list[tuple[float, float]]:
    """Sub-intervals of [-m0, m0] where both radicands are nonnegative."""
    lo, hi = -p.m0, p.m0
    c = 2.0 * p.V0 / (p.q * p.alpha**2)
    if c > 0:
        lo = max(lo, p.m0 - 0.25 / c)
    elif c < 0:
        hi = min(hi, p.m0 - 0.25 / c)
    if lo > hi:
        return []
    return [(lo, hi)]


def make_state(n: int, E: float, p: ProblemParams) -> BoundState:
    sf = standard_form(p, E)
    fe = factor_exponents(sf, derive_params(sf))
    return BoundState(
        n=n,
        E=E,
        branch="particle" if E >= 0 else "antiparticle",
        eps=math.sqrt(max(p.eta2 * (p.m0 * p.m0 - E * E), 0.0)),
        jacobi_a=fe.jacobi_a,
        jacobi_b=fe.jacobi_b,
    )


def _level(n, p, tol, scan_points, condition):
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    if scan_points < 100:
        raise ValueError(f"scan_points must be >= 100, got {scan_points}")
    cond = CONDITIONS[condition]
    states, thresholds = [], []
    for lo, hi in admissible_windows(p):
        roots = kernels.level_roots(cond, n, p.m0, p.alpha, p.V0, p.q, lo, hi, scan_points, tol)
        for E in roots:
            if abs(E) >= p.m0 * (1.0 - 10.0 * tol):
                thresholds.append(E)
            else:
                states.append(make_state(n, E, p))
    return states, thresholds


def solve_level(
    n: int,
    p: ProblemParams,
    tol: float = 1e-10,
    scan_points: int = 10_000,
    condition: str = "printed",
) -> list[BoundState]:
    """All non-threshold roots of the chosen quantization condition for level n."""
    return _level(n, p, tol, scan_points, condition)[0]


def _sort_key(state: BoundState):
    return (state.branch, state.n, state.E)


def solve_spectrum(
    p: ProblemParams,
    n_max: int,
    tol: float = 1e-10,
    scan_points: int = 10_000,
    condition: str = "printed",
    verify: bool = True,
) -> SpectrumReport:
    """Solve levels 0..n_max; each state is checked against the ODE residual oracle.

    States failing the residual check stay in the report (so callers can
    see them) and are listed under ``diagnostics["residual_failures"]``.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    if p.V0 < 0:
        warnings.warn("V0 < 0: the well is repulsive in the potential convention used here", stacklevel=2)
    states, thresholds = [], []
    for n in range(n_max + 1):
        found, th = _level(n, p, tol, scan_points, condition)
        states.extend(found)
        thresholds.extend((n, E) for E in th)
    states.sort(key=_sort_key)

    residuals: list[float | None] = []
    failures = []
    if verify:
        from .verify import RESIDUAL_LIMIT, ode_residual

        for st in states:
            r, _ = ode_residual(st, p, h=1e-3 / p.alpha)
            residuals.append(r)
            if not r < RESIDUAL_LIMIT:
                failures.append({"n": st.n, "E": st.E, "residual": r})
                log.warning("state n=%d E=%r fails the ODE residual check (%.3g)", st.n, st.E, r)
    else:
        residuals = [None] * len(states)

    diagnostics = {
        "scan_points": scan_points,
        "tol": tol,
        "n_max": n_max,
        "thresholds_excluded": [{"n": n, "E": E} for n, E in thresholds],
        "residual_failures": failures,
        "negative_v0": p.V0 < 0,
    }
    return SpectrumReport(
        params=p,
        states=states,
        windows=admissible_windows(p),
        condition=condition,
        residuals=residuals,
        diagnostics=diagnostics,
    )
