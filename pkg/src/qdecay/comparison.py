"""Quantitative comparison geometry for lower quadratic Ricci decay.

Covers the polynomial volume-growth exponents, the Riccati inequality for
the mean curvature of distance spheres and the resulting ``Pi <= alpha/t``
bound, the two volume comparison inequalities (with a fitted constant),
the excess function, the cosh triangle-comparison threshold and the
packing bound on boundary-component diameters.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_trapezoid, solve_ivp
from scipy.interpolate import CubicSpline
from scipy.optimize import bisect

from .errors import GridError, InputError, MonotonicityError, ParameterError


@dataclass(frozen=True)
class ComparisonParams:
    C: float
    n: int
    alpha: float
    N: float
    C0: float | None = None


def comparison_params(C: float, n: int) -> ComparisonParams:
    """Growth exponents for ``Ric >= -(n-1) C / d^2``.

    >>> comparison_params(2.0, 2)
    ComparisonParams(C=2.0, n=2, alpha=2.0, N=3.0, C0=None)
    """
    if C < 0:
        raise ParameterError(f"decay constant must be nonnegative, got {C}")
    if n < 2:
        raise ParameterError("dimension must be at least 2")
    root = math.sqrt(1.0 + 4.0 * C)
    alpha = (root + 1.0) / 2.0
    N = (n - 1) * (root - 1.0) / 2.0 + n
    return ComparisonParams(float(C), int(n), alpha, N)


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Mean curvature and area element of distance spheres along one radial geodesic."""

    t: np.ndarray
    Pi: np.ndarray
    eta: np.ndarray
    ric: np.ndarray | None = None

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        if t.ndim != 1 or np.any(np.diff(t) <= 0):
            raise GridError("radial grid must be strictly increasing")
        if np.any(np.asarray(self.eta) <= 0):
            raise InputError("area element must be positive")


def model_profile(alpha: float, n: int, t) -> RadialProfile:
    """The equality case ``Pi = alpha/t``, ``eta = t^{(n-1) alpha}``."""
    t = np.asarray(t, dtype=float)
    C = alpha * (alpha - 1.0)
    return RadialProfile(t, alpha / t, t ** ((n - 1) * alpha), -(n - 1) * C / t**2)


def riccati_profile(ric: Callable[[np.ndarray], np.ndarray], n: int, t,
                    slack: Callable[[np.ndarray], np.ndarray] | None = None,
                    t_start: float = 1e-4) -> RadialProfile:
    """Integrate ``Pi' = -Pi^2 - Ric/(n-1) - slack`` from the small-t expansion.

    The start value is ``1/t - Ric t / (3(n-1))``, which is where every
    smooth distance sphere begins.
    """
    t = np.asarray(t, dtype=float)
    if slack is None:
        slack = lambda s: 0.0 * s

    def rhs(s, y):
        return [-y[0] ** 2 - ric(s) / (n - 1) - slack(s), (n - 1) * y[0]]

    r0 = float(ric(t_start))
    y0 = [1.0 / t_start - r0 * t_start / (3 * (n - 1)), (n - 1) * math.log(t_start)]
    sol = solve_ivp(rhs, (t_start, t[-1]), y0, t_eval=t, method="DOP853",
                    rtol=1e-12, atol=1e-12)
    if not sol.success:
        raise GridError(f"profile integration failed: {sol.message}")
    return RadialProfile(t, sol.y[0], np.exp(sol.y[1]), np.asarray(ric(t), dtype=float))


def riccati_defect(profile: RadialProfile, ric_bound, n: int) -> np.ndarray:
    """``Pi' + Pi^2 + Ric/(n-1)`` on the grid; the inequality holds where it is <= 0."""
    t = np.asarray(profile.t, dtype=float)
    if t.size < 3:
        raise GridError("need at least three grid points to differentiate")
    Pi = np.asarray(profile.Pi, dtype=float)
    ric = ric_bound(t) if callable(ric_bound) else np.asarray(ric_bound, dtype=float)
    dPi = np.gradient(Pi, t, edge_order=2)
    return dPi + Pi**2 + ric / (n - 1)


@dataclass(frozen=True)
class MeanCurvatureCheck:
    ok: bool
    max_violation: float
    max_test_function: float


def mean_curvature_bound_check(profile: RadialProfile, params: ComparisonParams,
                               tol: float = 1e-9) -> MeanCurvatureCheck:
    """Check ``Pi <= alpha/t`` and the sign of the test function.

    The test function is ``exp(int_1^t Pi) * (t^alpha Pi - alpha t^{alpha-1})``.
    """
    t = np.asarray(profile.t, dtype=float)
    Pi = np.asarray(profile.Pi, dtype=float)
    a = params.alpha
    bound = a / t
    violation = float(max(0.0, np.max(Pi - bound)))
    integral = cumulative_trapezoid(Pi, t, initial=0.0)
    integral -= np.interp(1.0, t, integral)
    test = np.exp(integral) * (t**a * Pi - a * t ** (a - 1))
    max_test = float(np.max(test))
    ok = violation <= tol * max(1.0, float(np.max(np.abs(bound)))) and max_test <= tol * float(
        np.max(np.exp(integral) * t**a * np.abs(bound)))
    return MeanCurvatureCheck(bool(ok), violation, max_test)


@dataclass(frozen=True)
class VolumeComparison:
    C0_fitted: float
    comparison1_ok: bool
    comparison2_ok: bool
    C0_comparison1: float
    C0_comparison2: float
    C0_half_grid: float
    C0_half_range: float
    annulus_ratio_tail: float
    params: ComparisonParams


def _fit_C0(t, vol, params, t_max):
    spline = CubicSpline(np.log(t), np.log(vol))

    def V(s):
        return np.exp(spline(np.log(s)))

    vol_B1 = float(V(1.0))
    area_S1 = float(spline(0.0, 1) * vol_B1)  # d vol/dt at t=1
    mask = (t >= 3.0) & (t + 1.0 <= t_max)
    tt = t[mask]
    if tt.size == 0:
        raise GridError("curve must reach at least t = 4")
    c1 = (V(tt) - vol_B1) / (area_S1 * tt**params.N)
    c2 = (V(tt + 1.0) - V(tt - 1.0)) * (tt - 1.0) / V(tt - 1.0)
    return float(np.max(c1)), float(np.max(c2)), float(c2[-1])


def volume_comparison_check(curve, params: ComparisonParams, rel_tol: float = 0.05) -> VolumeComparison:
    """Fit the smallest ``C0`` making both volume comparisons hold for ``t >= 3``.

    Stability is judged twice: against the curve thinned to every other grid
    point (grid halving) and against the curve truncated to half its range.
    A flag is true only when the fitted constant moves by less than
    ``rel_tol`` in both cases.
    """
    t = np.asarray(curve.t, dtype=float)
    vol = np.asarray(curve.vol, dtype=float)
    if t[0] > 1.0 or t[-1] < 4.0:
        raise GridError("curve must cover [1, T] with T >= 4")
    if np.any(np.diff(vol) < 0):
        raise MonotonicityError("ball volumes must be nondecreasing")
    T = t[-1]
    c1, c2, tail = _fit_C0(t, vol, params, T)
    h1, h2, _ = _fit_C0(t[::2], vol[::2], params, t[::2][-1])
    keep = t <= max(T / 2.0, 4.0)
    r1, r2, _ = _fit_C0(t[keep], vol[keep], params, t[keep][-1])

    def stable(a, *others):
        return math.isfinite(a) and all(abs(o - a) <= rel_tol * abs(a) for o in others)

    ok1 = stable(c1, h1, r1)
    ok2 = stable(c2, h2, r2)
    C0 = max(c1, c2)
    return VolumeComparison(
        C0, ok1, ok2, c1, c2, max(h1, h2), max(r1, r2), tail, replace(params, C0=C0))


def excess(d_px: float, d_qx: float, d_pq: float) -> float:
    """``d(p,x) + d(q,x) - d(p,q)``."""
    if min(d_px, d_qx, d_pq) < 0:
        raise InputError("distances must be nonnegative")
    e = d_px + d_qx - d_pq
    if e < -1e-12 * max(1.0, d_pq):
        raise InputError("distances violate the triangle inequality")
    return max(e, 0.0)


def cosh_inequality_holds(lam) -> np.ndarray | bool:
    """Whether ``cosh(3/lam) <= cosh(2/lam)^2``."""
    lam = np.asarray(lam, dtype=float)
    out = np.cosh(3.0 / lam) <= np.cosh(2.0 / lam) ** 2
    return bool(out) if out.ndim == 0 else out


def toponogov_threshold(xtol: float = 1e-15) -> float:
    """The unique ``lam* > 0`` with ``cosh(3/lam*) = cosh(2/lam*)^2``.

    Above it the inequality fails, so no critical point can exist there.
    """

    def gap(lam):
        return math.cosh(3.0 / lam) - math.cosh(2.0 / lam) ** 2

    return bisect(gap, 1.0, 10.0, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=500)


def diameter_bound(annulus_volume: float, v_noncollapse: float, hop_radius: float = 2.0) -> float:
    """Packing bound on the diameter of a boundary component of ``B_t``.

    At most ``annulus_volume / v`` disjoint unit balls fit in the annulus and
    consecutive centers are at most ``2 * hop_radius`` apart.
    """
    if v_noncollapse <= 0:
        raise ParameterError("noncollapsing volume bound must be positive")
    if annulus_volume < 0:
        raise ParameterError("annulus volume must be nonnegative")
    return 2.0 * hop_radius * (annulus_volume / v_noncollapse)
