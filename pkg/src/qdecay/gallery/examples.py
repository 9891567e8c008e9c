"""Warped ends, capped planes and the doubling growth model."""
from __future__ import annotations

import math
import warnings

import numpy as np

from ..charts import rotational_plane, warped_metric
from ..errors import ParameterError
from ..growth import GrowthCurve
from ..metric import ChartedMetric
from ..profiles import Warp, WarpedProfile


def example1_end(c: float, base_dim: int = 1, base_curvature: float = 1.0) -> ChartedMetric:
    """``dt^2 + t^{2c} h`` on ``[1, inf) x base`` with the basepoint on ``{t = 1}``.

    A one-dimensional base is a circle of length 2 pi; otherwise ``h`` has
    constant curvature ``base_curvature``. Ball volumes grow like
    ``t^{(n-1)c + 1}``.
    """
    if c < 1:
        warnings.warn(f"c = {c} < 1: outside the range where the end is complete and expanding",
                      stacklevel=2)
    prof = WarpedProfile(Warp.power(c), base_dim=base_dim,
                         base_curvature=base_curvature if base_dim >= 2 else 0.0)
    return warped_metric(prof, name="example1",
                         params={"c": c, "base_dim": base_dim, "base_curvature": base_curvature})


def example2_plane(c: float) -> ChartedMetric:
    """The plane ``dt^2 + t^{2c} dtheta^2`` for ``t >= 1``, capped smoothly inside ``t = 1``."""
    return rotational_plane(Warp.capped_power(c), name="example2", params={"c": c},
                            sample_t=(0.05, 20.0))


def example3_growth_model(A0: float = 1.0, L: float = 1.0, jmax: int = 10) -> GrowthCurve:
    """Ball volumes of the doubling model: piece ``j`` has scale ``L 2^j`` and area ``A0 4^j``.

    ``t_j = L 2^{j+1}`` and ``vol(B_{t_j}) = A0 (4^{j+1} - 1)/3``, so
    ``vol/t^2 -> A0/(3 L^2)``.
    """
    if A0 <= 0 or L <= 0:
        raise ParameterError("piece area and scale must be positive")
    if jmax < 0:
        raise ParameterError("jmax must be nonnegative")
    j = np.arange(jmax + 1)
    t = L * 2.0 ** (j + 1)
    vol = A0 * (4.0 ** (j + 1) - 1.0) / 3.0
    return GrowthCurve(2, t, vol, "model")


def example3_limit_ratio(A0: float = 1.0, L: float = 1.0) -> float:
    return A0 / (3.0 * L * L)


def cone(eps: float) -> ChartedMetric:
    """``dt^2 + (eps t)^2 dtheta^2`` from the apex; ``vol(B_t) = pi eps t^2``."""
    if eps <= 0:
        raise ParameterError("cone factor must be positive")
    prof = WarpedProfile(Warp.power(1.0, scale=eps), base_dim=1, domain=(0.0, math.inf))
    return warped_metric(prof, basepoint_t=0.0, name="cone", params={"eps": eps})
