"""Bound states of the Klein-Gordon equation with a q-deformed Poschl-Teller
well and matching position-dependent mass, via the parametric
Nikiforov-Uvarov method, with numerical oracles for every closed form."""
from .kernels import BACKEND
from .spectrum import (
    BoundState,
    ProblemParams,
    SpectrumReport,
    admissible_windows,
    quantization_lhs,
    solve_level,
    solve_spectrum,
    standard_form,
)

__all__ = [
    "BACKEND",
    "BoundState",
    "ProblemParams",
    "SpectrumReport",
    "admissible_windows",
    "quantization_lhs",
    "solve_level",
    "solve_spectrum",
    "standard_form",
]
__version__ = "0.1.0"
