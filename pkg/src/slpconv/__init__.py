"""Critical Rayleigh numbers for a rigid-rigid layer with uniform internal heating.

Shifted-Legendre Galerkin method with exact inner products, checked against
a finite-difference oracle.
"""
__version__ = "0.1.0"

from .galerkin import (
    BasicStateParams,
    ProblemParams,
    assemble,
    basic_state_profile,
    convergence_study,
    critical_rayleigh,
    neutral_curve,
    rayleigh,
    secular_determinant,
    solve_rayleigh,
)
from .inner_products import InnerProductKind, closed_form, exact_integral, validate_table
from .oracle import fd_rayleigh, oracle_rayleigh, richardson
