"""Independent numerical oracles for the closed-form results.

The binding oracle substitutes the assembled eigenfunction into

    psi'' + [(E^2 - m0^2) + 8 V0 s/(1 + q s)^2 (E - m0)] psi = 0,   s = exp(-2 alpha x)

on a uniform x grid with a central stencil.  It needs no boundary condition
at x = 0.  The finite-difference spectrum is advisory: it has to pick one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import _kernels_py, qdeform
from .spectrum import BoundState, ProblemParams, make_state, solve_spectrum
from .wavefunction import (
    SampledFunction,
    decay_length,
    exponents,
    node_count,
    normalize,
    psi,
    psi_extended,
)

RESIDUAL_LIMIT = 1e-6
ORDER_WINDOW = (3.5, 4.5)
PERTURBATION_RATIO = 100.0
ROUNDING_FLOOR = 1e-13
MAX_RESIDUAL_POINTS = 4_000_000


class GridError(ValueError):
    pass


class LinearizationError(ArithmeticError):
    pass


@dataclass
class ConvergenceFit:
    order: float
    fit_residual: float
    residuals: list[float]
    h_list: list[float]
    floor_hit: bool


@dataclass
class VerificationReport:
    state: BoundState
    residual_max: float
    conv_order: float
    conv_fit_residual: float
    oracle_energy: float | None = None
    flags: dict[str, bool] = field(default_factory=dict)
    binding: tuple[str, ...] = ()
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.flags[name] for name in self.binding)


def _second_derivative(f, h, order):
    # longdouble input keeps the rounding floor well under the truncation error
    return _kernels_py.second_derivative(f, h, order)


def ode_residual(
    state: BoundState,
    p: ProblemParams,
    h: float = 1e-3,
    order: int = 4,
    x_max: float | None = None,
) -> tuple[float, SampledFunction]:
    """Max-norm residual scaled by max|psi| * m0^2, and the residual profile over x."""
    if state.eps <= 0:
        raise GridError("threshold state: eps = 0, no decaying eigenfunction to test")
    if x_max is None:
        x_max = decay_length(state, p)
    npts = int(math.ceil(x_max / h)) + 1
    if npts > MAX_RESIDUAL_POINTS:
        npts = MAX_RESIDUAL_POINTS
    ld = np.longdouble
    x = np.arange(npts, dtype=ld) * ld(h)
    f = psi_extended(x, state, p)
    scale = float(np.max(np.abs(f)))
    if not scale > 0:
        raise ValueError("psi vanishes identically on the grid")
    if np.count_nonzero(np.abs(f) > 1e-6 * scale) < 200:
        raise GridError(f"grid too coarse: fewer than 200 nodes where |psi| > 1e-6 max|psi| (h = {h})")
    d2 = _second_derivative(f, ld(h), order)
    cut = order // 2
    xi = x[cut:-cut]
    s = np.exp(-2 * ld(p.alpha) * xi)
    E, m0 = ld(state.E), ld(p.m0)
    coeff = (E * E - m0 * m0) + 8 * ld(p.V0) * s / (1 + ld(p.q) * s) ** 2 * (E - m0)
    r = (d2 + coeff * f[cut:-cut]) / (scale * p.m0**2)
    profile = SampledFunction(
        variable="x",
        nodes=xi.astype(float),
        values=r.astype(float),
        meta={"spacing": "uniform-in-x", "step": h, "stencil_order": order},
    )
    return float(np.max(np.abs(r))), profile


def convergence_order(
    state: BoundState,
    p: ProblemParams,
    h_list=(1e-2, 5e-3, 2.5e-3),
    order: int = 4,
) -> ConvergenceFit:
    """Least-squares slope of log(residual) against log(h)."""
    if len(h_list) < 3:
        raise ValueError("need at least three spacings")
    x_max = decay_length(state, p)
    res = [ode_residual(state, p, h=h, order=order, x_max=x_max)[0] for h in h_list]
    lh, lr = np.log(np.asarray(h_list)), np.log(np.maximum(res, 1e-300))
    A = np.vstack([lh, np.ones_like(lh)]).T
    coef, *_ = np.linalg.lstsq(A, lr, rcond=None)
    fit = float(np.sqrt(np.mean((A @ coef - lr) ** 2)))
    return ConvergenceFit(
        order=float(coef[0]),
        fit_residual=fit,
        residuals=[float(v) for v in res],
        h_list=[float(v) for v in h_list],
        floor_hit=min(res) < ROUNDING_FLOOR,
    )


def _fd_matrices(p: ProblemParams, L: float, N: int, bc0: str):
    if bc0 == "dirichlet":
        h = L / (N + 1)
        x = h * np.arange(1, N + 1)
    elif bc0 == "neumann":
        h = L / N
        x = h * (np.arange(N) + 0.5)
    else:
        raise ValueError(f"bc0 must be 'dirichlet' or 'neumann', got {bc0!r}")
    main = np.full(N, -2.0)
    if bc0 == "neumann":
        main[0] = -1.0
    D2 = sp.diags([np.ones(N - 1), main, np.ones(N - 1)], [-1, 0, 1]) / (h * h)
    s = np.exp(-2.0 * p.alpha * x)
    g = 8.0 * p.V0 * s / (1.0 + p.q * s) ** 2
    K = (D2 - sp.diags(p.m0 * g + p.m0 * p.m0)).tocsr()
    C = sp.diags(g).tocsr()
    return K, C


def companion(K, C):
    """First companion form of E^2 I + E C + K: eigenvalues of [[0, I], [-K, -C]]."""
    N = K.shape[0]
    return sp.bmat([[None, sp.identity(N)], [-K, -C]]).tocsc()


def fd_spectrum(
    p: ProblemParams,
    L: float = 40.0,
    N: int = 2000,
    bc0: str = "neumann",
    solver: str = "sparse",
    shifts: int = 17,
    k_per_shift: int = 6,
) -> list[float]:
    """Real eigenvalues in (-m0, m0) of the discretized quadratic eigenproblem.

    Second-order differences on (0, L), Dirichlet at x = L and ``bc0`` at
    x = 0.  ``solver="dense"`` diagonalizes the full companion matrix;
    ``"sparse"`` runs shift-invert Arnoldi at ``shifts`` points spread over
    (-m0, m0).
    """
    if N < 200:
        raise ValueError("N must be >= 200")
    K, C = _fd_matrices(p, L, N, bc0)
    A = companion(K, C)
    if solver == "dense":
        ev = scipy.linalg.eigvals(A.toarray())
    elif solver == "sparse":
        found = []
        for sigma in np.linspace(-p.m0, p.m0, shifts + 2)[1:-1]:
            try:
                vals = spla.eigs(A, k=k_per_shift, sigma=sigma, return_eigenvectors=False, tol=1e-12)
            except spla.ArpackNoConvergence as exc:
                vals = exc.eigenvalues
            found.append(vals)
        ev = np.concatenate(found)
    else:
        raise ValueError(f"unknown solver {solver!r}")
    if not np.all(np.isfinite(ev)):
        raise LinearizationError("non-finite eigenvalues from the companion linearization")
    ev = ev[np.abs(ev.imag) <= 1e-8 * p.m0].real
    ev = np.sort(ev[(ev > -p.m0) & (ev < p.m0)])
    out: list[float] = []
    for e in ev:
        if not out or e - out[-1] > 1e-9 * p.m0:
            out.append(float(e))
    return out


def limit_checks(p: ProblemParams) -> dict[str, bool]:
    flags = {}
    free = ProblemParams(m0=p.m0, V0=0.0, alpha=p.alpha, q=p.q)
    flags["v0_zero_empty_spectrum"] = not solve_spectrum(free, n_max=3, verify=False).states

    z = np.linspace(-10.0, 10.0, 2001)
    pairs = [
        (qdeform.sinh_q(z, 1.0), np.sinh(z)),
        (qdeform.cosh_q(z, 1.0), np.cosh(z)),
        (qdeform.tanh_q(z, 1.0), np.tanh(z)),
        (qdeform.sech_q(z, 1.0), 1.0 / np.cosh(z)),
    ]
    dev = max(float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b)))) for a, b in pairs)
    flags["q1_reduction"] = dev < 1e-14

    mp = qdeform.MassParams(p.m0, qdeform.DeformedParams(q=p.q, alpha=p.alpha, V0=p.V0))
    far = qdeform.mass(20.0 / p.alpha, mp)
    # one ulp of m0 absorbs the rounding of m0 + (tiny profile term)
    flags["mass_far_field"] = bool(abs(far - p.m0) <= 4.0 * abs(p.V0) * math.exp(-40.0) + np.spacing(p.m0))
    return flags


def log_slope_near_zero(state: BoundState, p: ProblemParams, ks=range(3, 9)) -> list[float]:
    """d ln|psi| / d ln s at s = 10^-k, by a symmetric difference in ln s."""
    out = []
    for k in ks:
        s = 10.0**-k
        d = 1e-4
        hi = abs(psi(s * math.exp(d), state, p))
        lo = abs(psi(s * math.exp(-d), state, p))
        out.append((math.log(hi) - math.log(lo)) / (2 * d))
    return out


def verify_state(
    state: BoundState,
    p: ProblemParams,
    h: float | None = None,
    h_list=None,
    perturbation: float = 1e-3,
    with_fd: bool = False,
) -> VerificationReport:
    """Run every oracle on one state; residual, order, perturbation and the two limits bind."""
    if h is None:
        h = 1e-3 / p.alpha
    if h_list is None:
        h_list = tuple(v / p.alpha for v in (1e-2, 5e-3, 2.5e-3))
    r, _ = ode_residual(state, p, h=h)
    fit = convergence_order(state, p, h_list)
    shifted = make_state(state.n, state.E + perturbation * p.m0, p)
    r_shift, _ = ode_residual(shifted, p, h=h)
    ratio = r_shift / r if r > 0 else math.inf

    fe = exponents(state, p)
    slopes = log_slope_near_zero(state, p)
    mags = [abs(psi(10.0**-k, state, p)) for k in range(3, 9)]
    decay_ok = all(b < a for a, b in zip(mags, mags[1:])) and abs(slopes[-1] - fe.phi_s_exp) < 1e-3

    from .jacobi import jacobi_eval

    a_n = normalize(state, p)
    edge = psi(1.0 - 1e-12, state, p, "L2")
    phi1 = (1.0 + p.q) ** fe.phi_u_exp
    target = a_n * phi1 * jacobi_eval(state.n, fe.jacobi_a, fe.jacobi_b, 1.0 + 2.0 * p.q)
    origin_ok = math.isfinite(edge) and abs(edge - target) <= 1e-6 * max(abs(target), 1e-300)

    nodes = node_count(state, p)
    flags = {
        "residual": r < RESIDUAL_LIMIT,
        "convergence_order": fit.floor_hit or ORDER_WINDOW[0] <= fit.order <= ORDER_WINDOW[1],
        "perturbation_sensitivity": ratio > PERTURBATION_RATIO,
        "decay_limit": decay_ok,
        "origin_finite": origin_ok,
        "node_count": nodes == state.n,
    }
    oracle = None
    details = {
        "residuals_by_h": dict(zip(fit.h_list, fit.residuals)),
        "floor_hit": fit.floor_hit,
        "perturbed_residual": r_shift,
        "perturbation_ratio": ratio,
        "log_slopes": slopes,
        "phi_s_exp": fe.phi_s_exp,
        "nodes": nodes,
        "jacobi_b_le_minus_one": fe.jacobi_b <= -1,
    }
    if with_fd:
        best = {}
        for bc in ("neumann", "dirichlet"):
            ev = fd_spectrum(p, bc0=bc)
            best[bc] = min(ev, key=lambda e: abs(e - state.E)) if ev else None
        cands = [e for e in best.values() if e is not None]
        oracle = min(cands, key=lambda e: abs(e - state.E)) if cands else None
        flags["fd_oracle"] = oracle is not None and abs(oracle - state.E) < 1e-2 * p.m0
        details["fd_nearest"] = best
    return VerificationReport(
        state=state,
        residual_max=r,
        conv_order=fit.order,
        conv_fit_residual=fit.fit_residual,
        oracle_energy=oracle,
        flags=flags,
        binding=("residual", "convergence_order", "perturbation_sensitivity", "decay_limit", "origin_finite"),
        details=details,
    )
