"""Explicit constructions: warped ends, collapsing families, the R^3 profile pieces."""
from __future__ import annotations

from .catalog import CATALOG, build, describe
from .collapse import (CollapseFamily, FamilyCondition, MetricFamily, collapse_exponent,
                       collapse_family, family_condition_check)
from .examples import cone, example1_end, example2_plane, example3_growth_model, example3_limit_ratio
from .lemma31 import (Lemma31Report, RadialPotential, conformal_quadratic_construction,
                      path_integral_bound)
from .prop3 import (FlowBound, Gluing, MorsePotential, Prop3Estimates, e_block_curvature,
                    e_block_profile, e_block_warp, morse_potential, prop3_gluing_table,
                    prop3_gradient_flow_bound, prop3_flow_profile, prop3_log_estimates,
                    prop3_potential, u_profile)

__all__ = [
    "CATALOG", "build", "describe",
    "CollapseFamily", "FamilyCondition", "MetricFamily", "collapse_exponent", "collapse_family",
    "family_condition_check",
    "cone", "example1_end", "example2_plane", "example3_growth_model", "example3_limit_ratio",
    "Lemma31Report", "RadialPotential", "conformal_quadratic_construction", "path_integral_bound",
    "FlowBound", "Gluing", "MorsePotential", "Prop3Estimates", "e_block_curvature",
    "e_block_profile", "e_block_warp", "morse_potential", "prop3_gluing_table",
    "prop3_gradient_flow_bound", "prop3_flow_profile", "prop3_log_estimates", "prop3_potential",
    "u_profile",
]
