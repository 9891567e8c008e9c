"""Collapsing torus ends ``dt^2 + t^2 g(t)`` and the one-parameter family conditions."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..charts import warped_metric
from ..errors import ParameterError
from ..metric import ChartedMetric
from ..profiles import Warp, WarpedProfile

Array = np.ndarray


@dataclass(frozen=True, eq=False)
class MetricFamily:
    """``t -> g(t)`` on a fixed manifold, with its first two ``t``-derivatives.

    Each callable maps an array of ``t`` to matrices ``(..., k, k)``.
    """

    g: Callable[[Array], Array]
    dg: Callable[[Array], Array]
    ddg: Callable[[Array], Array]
    label: str = "family"

    @classmethod
    def diagonal(cls, q: list[tuple[Callable, Callable, Callable]], label: str = "diag") -> "MetricFamily":
        """``diag(q_1^2, ..., q_k^2)`` from scale factors with two derivatives each."""

        def build(kind):
            def fn(t):
                t = np.asarray(t, dtype=float)
                out = np.zeros(t.shape + (len(q), len(q)))
                for i, (f, df, ddf) in enumerate(q):
                    a, a1, a2 = f(t), df(t), ddf(t)
                    out[..., i, i] = (a * a, 2 * a * a1, 2 * a1 * a1 + 2 * a * a2)[kind]
                return out
            return fn

        return cls(build(0), build(1), build(2), label)

    @classmethod
    def scalar(cls, s: Callable, ds: Callable, dds: Callable, k: int = 2,
               label: str = "scalar") -> "MetricFamily":
        """``s(t) g0`` with ``g0`` the identity."""

        def wrap(fn):
            def out(t):
                t = np.asarray(t, dtype=float)
                return fn(t)[..., None, None] * np.eye(k)
            return out

        return cls(wrap(s), wrap(ds), wrap(dds), label)


@dataclass(frozen=True, eq=False)
class CollapseFamily:
    f: float
    beta: float
    family: MetricFamily
    metric: ChartedMetric

    def torus_metric(self, t) -> Array:
        return self.family.g(t)


def collapse_exponent(f: float) -> float:
    """``beta = log f / log(1/2)``, so ``rho = t^{-beta}`` with ``beta`` in ``(0, 1]``."""
    if not (0.5 <= f < 1.0):
        raise ParameterError(f"collapse factor must lie in [1/2, 1), got {f}")
    return math.log(f) / math.log(0.5)


def _collapse_scale(beta: float):
    """``q(t) = log(1+t) t^{-beta}`` and two derivatives."""

    def q(t):
        return np.log1p(t) * t ** (-beta)

    def dq(t):
        return t ** (-beta) / (1 + t) - beta * np.log1p(t) * t ** (-beta - 1)

    def ddq(t):
        return (-t ** (-beta) / (1 + t) ** 2 - 2 * beta * t ** (-beta - 1) / (1 + t)
                + beta * (beta + 1) * np.log1p(t) * t ** (-beta - 2))

    return q, dq, ddq


def collapse_family(f: float) -> CollapseFamily:
    """The end ``dt^2 + a^2 dx^2 + b^2 dy^2`` on ``[1, inf) x T^2``.

    ``a = t log(1+t) t^{-beta}`` and ``b = t log(1+t)``, i.e. ``t^2 g(t)``
    with ``g(t) = diag(log^2(1+t) t^{-2 beta}, log^2(1+t))``.
    """
    beta = collapse_exponent(f)
    fam = MetricFamily.diagonal([_collapse_scale(beta), _collapse_scale(0.0)],
                                label=f"collapse(beta={beta:g})")
    prof = WarpedProfile(Warp.log_collapse(beta), base_dim=2, second=Warp.log_collapse(0.0))
    metric = warped_metric(prof, name="collapse", params={"f": f, "beta": beta},
                           sample_t=(1.0, 1e4))
    return CollapseFamily(f, beta, fam, metric)


@dataclass(frozen=True)
class FamilyCondition:
    sup_first: float
    sup_second: float
    sup_first_extended: float
    sup_second_extended: float
    t_range: tuple[float, float]
    extended_to: float
    ok: bool


def _relative_norm(g: Array, dg: Array) -> Array:
    """Largest ``|eigenvalue|`` of ``g^{-1} dg`` (the operator norm in ``g``)."""
    w, V = np.linalg.eigh(g)
    half = V @ (np.eye(g.shape[-1]) / np.sqrt(w)[..., None, :]) @ np.swapaxes(V, -1, -2)
    return np.max(np.abs(np.linalg.eigvalsh(half @ dg @ half)), axis=-1)


def _sups(family: MetricFamily, lo: float, hi: float, points: int):
    t = np.geomspace(lo, hi, points)
    g = family.g(t)
    s1 = float(np.max(t * _relative_norm(g, family.dg(t))))
    s2 = float(np.max(t**2 * _relative_norm(g, family.ddg(t))))
    return s1, s2


def family_condition_check(family: MetricFamily, t_range=(10.0, 1e4), extend: float = 10.0,
                           points_per_decade: int = 200, rel_tol: float = 0.1) -> FamilyCondition:
    """Suprema of ``t |g^{-1} g'|`` and ``t^2 |g^{-1} g''|`` and their stability.

    The sufficient condition is judged to hold when both suprema are finite
    and move by at most ``rel_tol`` when the range is extended ``extend``-fold.
    """
    lo, hi = map(float, t_range)
    if not (0 < lo < hi):
        raise ParameterError("range must satisfy 0 < lo < hi")
    pts = max(int(points_per_decade * math.log10(hi / lo)), 10)
    s1, s2 = _sups(family, lo, hi, pts)
    pts_x = max(int(points_per_decade * math.log10(hi * extend / lo)), 10)
    e1, e2 = _sups(family, lo, hi * extend, pts_x)

    def stable(a, b):
        return math.isfinite(a) and math.isfinite(b) and abs(b - a) <= rel_tol * max(abs(a), 1e-12)

    ok = stable(s1, e1) and stable(s2, e2)
    return FamilyCondition(s1, s2, e1, e2, (lo, hi), hi * extend, bool(ok))
