# Core discrete derivative package
from core.dgrad.force_scheme import (
    SchemeVariant,
    DegeneracyMode,
    DegeneracyPolicy,
    DissipationCase,
    DissipationConfig,
    ForceScheme,
)
from core.dgrad.discrete_gradient import (
    ForceEvaluation,
    Multipliers,
    conservation_fn,
    dissipation_fn_f,
    dissipation_fn_s,
    conservative_force,
    alpha_coefficients,
    combined_force,
    gonzalez_force,
    g_equivariant_force,
    evaluate_force,
    velocity_beta,
    algorithmic_velocity,
    algorithmic_velocity_generic,
    one_d_discrete_derivative,
    lagrange_multipliers,
    velocity_multipliers,
    hessian_metric,
    finite_difference_hessian,
)

__all__ = [
    "SchemeVariant",
    "DegeneracyMode",
    "DegeneracyPolicy",
    "DissipationCase",
    "DissipationConfig",
    "ForceScheme",
    "ForceEvaluation",
    "Multipliers",
    "conservation_fn",
    "dissipation_fn_f",
    "dissipation_fn_s",
    "conservative_force",
    "alpha_coefficients",
    "combined_force",
    "gonzalez_force",
    "g_equivariant_force",
    "evaluate_force",
    "velocity_beta",
    "algorithmic_velocity",
    "algorithmic_velocity_generic",
    "one_d_discrete_derivative",
    "lagrange_multipliers",
    "velocity_multipliers",
    "hessian_metric",
    "finite_difference_hessian",
]
