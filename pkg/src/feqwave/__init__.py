"""Solutions of F(x + F(x)) = -F(x) and the freezing fields they generate."""
from .errors import FeqError
from .fixtures import Fixture, fixture, oracle_compare
from .freezing import (
    FieldGrid, FieldPair, FreezingProblem, bridge_identity_check, build_wave_profile,
    generator_pair, reflection_identity_check, residual_pde, sample_grid, synthesize_fields,
    validate_problem, verify_freezing_boundary,
)
from .funceq import (
    SolutionF, builtin_family, find_fixed_point, involution_from_even_profile,
    residual_functional_eq, solution_from_involution, transform,
)
from .functions import Interval, ScalarFn
from .inversion import MonotoneFn, build_inverse, invert_at
from .report import ResidualReport

__version__ = "0.1.0"

__all__ = [
    "FeqError", "Fixture", "fixture", "oracle_compare", "FieldGrid", "FieldPair",
    "FreezingProblem", "bridge_identity_check", "build_wave_profile", "generator_pair",
    "reflection_identity_check", "residual_pde", "sample_grid", "synthesize_fields",
    "validate_problem", "verify_freezing_boundary", "SolutionF", "builtin_family",
    "find_fixed_point", "involution_from_even_profile", "residual_functional_eq",
    "solution_from_involution", "transform", "Interval", "ScalarFn", "MonotoneFn",
    "build_inverse", "invert_at", "ResidualReport",
]
