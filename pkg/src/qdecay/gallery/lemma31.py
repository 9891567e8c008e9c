"""Conformal blow-up ``g = e^{2 phi} h`` of a bounded-curvature capped surface.

With ``phi`` comparable to the distance in ``h`` and ``h``-bounded gradient
and Hessian, the weighted curvature ``e^{2 phi} |K_g|`` stays bounded while
``e^{-phi} d_g`` is bounded too, so ``|K_g| d_g^2`` is bounded. Both factors
are evaluated without ever forming ``e^{phi}``, which overflows long before
the sample radii of interest.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from ..charts import conformal, rotational_plane
from ..curvature import (ConformalData, _sectional_from, conformal_data, conformal_riemann,
                         riemann)
from ..errors import ConstructionError, ParameterError
from ..metric import ChartedMetric
from ..profiles import Warp

RadialFn = Callable[[float], float]


@dataclass(frozen=True)
class RadialPotential:
    """``phi(t)`` as a function of the ``h``-distance to the cap center."""

    phi: RadialFn
    dphi: RadialFn
    ddphi: RadialFn
    label: str

    @classmethod
    def smoothed_distance(cls) -> "RadialPotential":
        return cls(lambda t: math.sqrt(1 + t * t) - 1, lambda t: t / math.sqrt(1 + t * t),
                   lambda t: (1 + t * t) ** -1.5, "sqrt(1+t^2)-1")

    @classmethod
    def constant(cls, value: float) -> "RadialPotential":
        return cls(lambda t: value, lambda t: 0.0, lambda t: 0.0, f"const({value})")


@dataclass(frozen=True, eq=False)
class Lemma31Report:
    metric: ChartedMetric
    c_fitted: float
    radii: np.ndarray
    phi: np.ndarray
    d_g_scaled: np.ndarray        # e^{-phi} d_g
    weighted_K: np.ndarray        # e^{2 phi} K_g
    K_d2: np.ndarray              # K_g d_g^2
    C_fitted: float
    C_half_range: float
    distance_bound_ok: bool
    path_bound_ok: bool
    stable: bool


def _scaled_distance(pot: RadialPotential, t: float) -> float:
    """``e^{-phi(t)} int_0^t e^{phi(s)} ds``, evaluated with bounded integrands."""
    pt = pot.phi(t)
    split = max(0.0, t - 40.0)
    near = quad(lambda s: math.exp(pot.phi(s) - pt), split, t, epsabs=0.0, epsrel=1e-12,
                limit=200)[0]
    far = 0.0
    if split > 0:
        far = quad(lambda s: math.exp(pot.phi(s) - pt), 0.0, split, epsabs=1e-300,
                   epsrel=1e-10, limit=200)[0]
    return near + far


def conformal_quadratic_construction(
        h_warp: Warp | None = None, potential: RadialPotential | None = None,
        radii=None, angle: float = 0.3, tol: float = 1e-9) -> Lemma31Report:
    """Build ``g = e^{2 phi} h`` and certify quadratic decay on the sample radii.

    ``h`` is the capped surface ``dt^2 + f(t)^2 dtheta^2``; ``phi`` is radial.
    Radial lines from the cap center are minimizing in ``g`` as well, so
    ``d_g = int_0^t e^phi``. The constant ``c`` is fitted from ``d_h - phi``,
    ``|grad phi|`` and the ``h``-norm of ``Hess phi``; ``phi > d_h`` anywhere
    is a violation.
    """
    h_warp = Warp.power(1.0) if h_warp is None else h_warp
    pot = RadialPotential.smoothed_distance() if potential is None else potential
    radii = np.geomspace(10.0, 1e3, 25) if radii is None else np.asarray(radii, dtype=float)
    if np.any(radii <= 0):
        raise ParameterError("radii must be positive")
    h = rotational_plane(h_warp, name="h", sample_t=(0.05, float(radii.max())))

    # construction conditions on a grid covering the sample range
    grid = np.concatenate([np.linspace(0.0, 1.0, 50)[1:], np.geomspace(1.0, radii.max(), 400)])
    phi = np.array([pot.phi(t) for t in grid])
    d1 = np.array([pot.dphi(t) for t in grid])
    d2 = np.array([pot.ddphi(t) for t in grid])
    f, df, _ = h_warp(grid)
    hess = np.maximum(np.abs(d2), np.abs(df / f * d1))
    if np.any(phi > grid + tol * np.maximum(grid, 1.0)):
        i = int(np.argmax(phi - grid))
        raise ConstructionError(f"phi exceeds d_h at t={grid[i]:g}: phi={phi[i]:g}")
    c = float(max(np.max(grid - phi), np.max(np.abs(d1)), np.max(hess)))

    # weighted curvature through the conformal transformation law, lowered
    # and normalized with h so that no factor e^{2 phi} is ever formed
    wK = []
    for t in radii:
        p = np.array([t, angle])
        curv_h = riemann(h, p)
        data = conformal_data(h, p, 0.0, [pot.dphi(t), 0.0], [[pot.ddphi(t), 0.0], [0.0, 0.0]])
        R = conformal_riemann(curv_h, curv_h.metric, ConformalData(0.0, data.grad, data.hess))
        hm = curv_h.metric
        low = np.einsum("im,mjkl->ijkl", hm, R.up)
        wK.append(float(_sectional_from(low, hm, np.array([1.0, 0.0]), np.array([0.0, 1.0]))))
    wK = np.array(wK)
    scaled = np.array([_scaled_distance(pot, t) for t in radii])
    phis = np.array([pot.phi(t) for t in radii])
    Kd2 = wK * scaled**2
    C = float(np.max(np.abs(Kd2)))
    half = radii <= math.sqrt(radii.min() * radii.max())
    C_half = float(np.max(np.abs(Kd2[half])))
    stable = math.isfinite(C) and abs(C - C_half) <= 0.05 * max(C, 1e-12)
    dist_ok = bool(np.all(np.log(scaled) <= c + 1e-12))

    def phi_pts(p):
        return np.vectorize(pot.phi)(np.asarray(p, dtype=float)[..., 0])

    def dphi_pts(p):
        p = np.asarray(p, dtype=float)
        out = np.zeros(p.shape)
        out[..., 0] = np.vectorize(pot.dphi)(p[..., 0])
        return out

    def ddphi_pts(p):
        p = np.asarray(p, dtype=float)
        out = np.zeros(p.shape + (p.shape[-1],))
        out[..., 0, 0] = np.vectorize(pot.ddphi)(p[..., 0])
        return out

    def d_g(p):
        t = np.asarray(p, dtype=float)[..., 0]
        return np.vectorize(lambda s: quad(lambda x: math.exp(pot.phi(x)), 0.0, s,
                                           epsrel=1e-12, limit=200)[0])(t)

    def sampler(r, rng, count):
        target = float(r)
        hi = 1.0
        while d_g(np.array([hi, 0.0])) < target:
            hi *= 2.0
        t = brentq(lambda s: float(d_g(np.array([s, 0.0]))) - target, 0.0, hi, xtol=1e-13)
        return np.stack([np.full(count, t), rng.uniform(0.0, 2 * math.pi, count)], axis=-1)

    g = conformal(h, phi_pts, dphi_pts, ddphi_pts, name=f"lemma31[{pot.label}]",
                  distance_fn=d_g, sphere_sampler=sampler)
    # d_g <= e^{d_h} - 1 (from phi <= d_h along the radial h-geodesic), in logs
    log_dg = np.log(scaled) + phis
    log_bound = np.array([math.log(path_integral_bound(t)) if t < 700 else
                          t + math.log1p(-math.exp(-t)) for t in radii])
    path_ok = bool(np.all(log_dg <= log_bound + 1e-12))
    return Lemma31Report(g, c, radii, phis, scaled, wK, Kd2, C, C_half, dist_ok, path_ok, stable)


def path_integral_bound(d_h: float) -> float:
    """``int_0^{d_h} e^t dt = e^{d_h} - 1``, the length bound when ``phi <= d_h``."""
    return quad(math.exp, 0.0, d_h, epsabs=0.0, epsrel=1e-13)[0]
