"""Exact symbolic engine for (3,6)-distributions, their prolongations and B3 models."""

from __future__ import annotations

from .chart import Chart, Echelon, OneForm, SymbolDecl, VectorField, kernel_frame, lie_bracket, substitute_chart
from .flags import Distribution, Splitting, derived_flag, reduce_by_integrable
from .hamiltonian import hamiltonian_of, poisson_bracket, verify_tangency_claim
from .models import build_example_family, build_model, gradation_algebra
from .prolongation import prolong_dual, prolong_fiber_line, prolong_projective, prolong_svc_cone
from .scalar import Scalar, parse_scalar
from .structures import check_b3_13, check_b3_23, check_b3_123

__version__ = "0.1.0"

__all__ = [
    "Chart",
    "Echelon",
    "OneForm",
    "SymbolDecl",
    "VectorField",
    "kernel_frame",
    "lie_bracket",
    "substitute_chart",
    "Distribution",
    "Splitting",
    "derived_flag",
    "reduce_by_integrable",
    "hamiltonian_of",
    "poisson_bracket",
    "verify_tangency_claim",
    "build_example_family",
    "build_model",
    "gradation_algebra",
    "prolong_dual",
    "prolong_fiber_line",
    "prolong_projective",
    "prolong_svc_cone",
    "Scalar",
    "parse_scalar",
    "check_b3_13",
    "check_b3_23",
    "check_b3_123",
]
