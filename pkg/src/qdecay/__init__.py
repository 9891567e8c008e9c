"""Numerical verification of quadratic curvature decay and volume growth on explicit metrics."""
from __future__ import annotations

__version__ = "0.1.0"

from .charts import conformal, flat, hyperbolic_plane, polar_plane, rotational_plane, round_sphere, scaled, warped_metric
from .comparison import (comparison_params, cosh_inequality_holds, mean_curvature_bound_check,
                         model_profile, riccati_defect, riccati_profile, toponogov_threshold,
                         volume_comparison_check)
from .curvature import (conformal_riemann, doubly_warped_sectional, ricci, riemann, sectional,
                        warped_sectional)
from .growth import (ball_volume, decay_constant, distance_estimate, gauss_bonnet_limit,
                     geodesic_trace, growth_curve, lower_decay_check, slow_growth_check)
from .logspace import LogQuantity, log_sum
from .metric import ChartedMetric, TwoPlane, orthonormal_plane
from .profiles import Warp, WarpedProfile

__all__ = [
    "__version__", "ChartedMetric", "TwoPlane", "orthonormal_plane", "Warp", "WarpedProfile",
    "conformal", "flat", "hyperbolic_plane", "polar_plane", "rotational_plane", "round_sphere",
    "scaled", "warped_metric",
    "comparison_params", "cosh_inequality_holds", "mean_curvature_bound_check", "model_profile",
    "riccati_defect", "riccati_profile", "toponogov_threshold", "volume_comparison_check",
    "conformal_riemann", "doubly_warped_sectional", "ricci", "riemann", "sectional",
    "warped_sectional",
    "ball_volume", "decay_constant", "distance_estimate", "gauss_bonnet_limit", "geodesic_trace",
    "growth_curve", "lower_decay_check", "slow_growth_check", "LogQuantity", "log_sum",
]
