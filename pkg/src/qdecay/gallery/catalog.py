"""Name -> builder table used by scenario files and ``qdecay list``."""
from __future__ import annotations

import inspect
import math
import warnings
from dataclasses import dataclass
from typing import Any, Callable

from .. import charts
from ..errors import ConfigError
from ..profiles import Warp
from .collapse import collapse_family
from .examples import cone, example1_end, example2_plane, example3_growth_model
from .lemma31 import RadialPotential, conformal_quadratic_construction
from .prop3 import prop3_log_estimates


@dataclass(frozen=True)
class Prop3Table:
    jmax: int

    def rows(self):
        return [prop3_log_estimates(j) for j in range(1, self.jmax + 1)]


def _lemma31(h: str | float = "flat", potential: str | float = "smoothed", rmax: float = 1e3):
    warp = Warp.power(1.0) if h == "flat" else Warp.capped_power(float(h))
    pot = (RadialPotential.smoothed_distance() if potential == "smoothed"
           else RadialPotential.constant(float(potential)))
    import numpy as np
    return conformal_quadratic_construction(warp, pot, radii=np.geomspace(10.0, rmax, 25))


def _example1(c: float, base_dim: int = 1, base_curvature: float = 1.0):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return example1_end(c, base_dim, base_curvature)


@dataclass(frozen=True)
class Entry:
    builder: Callable[..., Any]
    kind: str
    summary: str


CATALOG: dict[str, Entry] = {
    "flat": Entry(lambda n=2: charts.flat(int(n)), "metric", "Euclidean space, Cartesian chart"),
    "polar": Entry(charts.polar_plane, "metric", "flat plane in polar coordinates"),
    "sphere": Entry(charts.round_sphere, "metric", "unit round 2-sphere"),
    "hyperbolic": Entry(charts.hyperbolic_plane, "metric",
                        "hyperbolic plane dt^2 + e^{2t} dx^2 (divergence control)"),
    "cone": Entry(lambda eps=0.5: cone(float(eps)), "metric", "flat cone dt^2 + (eps t)^2 dtheta^2"),
    "example1": Entry(_example1, "metric", "warped end dt^2 + t^{2c} h over a space-form base"),
    "example2": Entry(lambda c: example2_plane(float(c)), "metric",
                      "capped plane dt^2 + t^{2c} dtheta^2 for t >= 1"),
    "example3": Entry(lambda A0=1.0, L=1.0, jmax=10: example3_growth_model(float(A0), float(L), int(jmax)),
                      "curve", "doubling growth model, vol(B_t) of order t^2"),
    "collapse": Entry(lambda f=1 / math.sqrt(2): collapse_family(float(f)), "collapse",
                      "collapsing torus end dt^2 + t^2 g(t)"),
    "prop3-estimates": Entry(lambda jmax=10: Prop3Table(int(jmax)), "prop3",
                             "log-space volume/distance estimates of the R^3 construction"),
    "lemma31": Entry(_lemma31, "lemma31", "conformal blow-up e^{2 phi} h with phi ~ distance"),
}


def build(name: str, params: dict | None = None):
    """Instantiate a catalog entry; unknown names or bad parameters are config errors."""
    if name not in CATALOG:
        raise ConfigError(f"unknown gallery name {name!r}; try `qdecay list`")
    entry = CATALOG[name]
    params = dict(params or {})
    try:
        inspect.signature(entry.builder).bind(**params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {name}: {exc}") from exc
    return entry.builder(**params)


def describe() -> list[tuple[str, str, str]]:
    out = []
    for name, entry in CATALOG.items():
        sig = str(inspect.signature(entry.builder))
        out.append((name, sig, entry.summary))
    return out
