"""Standard chart builders: flat space, warped products, rescaling, conformal change.

Every builder attaches a closed-form ``derivatives`` map so curvature
oracles can be compared without finite-difference noise.
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .errors import ParameterError
from .metric import ChartedMetric
from .profiles import Warp, WarpedProfile

Array = np.ndarray


def _zeros_jet(shape, n):
    return (np.zeros(shape + (n, n, n)), np.zeros(shape + (n, n, n, n)))


def flat(n: int = 2, half_width: float = 10.0) -> ChartedMetric:
    """Euclidean space in Cartesian coordinates, basepoint at the origin."""

    def components(p):
        p = np.asarray(p, dtype=float)
        return np.broadcast_to(np.eye(n), p.shape[:-1] + (n, n)).copy()

    def derivatives(p):
        p = np.asarray(p, dtype=float)
        return (components(p),) + _zeros_jet(p.shape[:-1], n)

    def distance(p):
        return np.linalg.norm(np.asarray(p, dtype=float), axis=-1)

    def sampler(r, rng, count):
        u = rng.normal(size=(count, n))
        return r * u / np.linalg.norm(u, axis=1, keepdims=True)

    inf = math.inf
    return ChartedMetric(
        n, components, ((-inf, inf),) * n, np.zeros(n), derivatives,
        name="flat", params={"n": n},
        sample_box=((-half_width, half_width),) * n,
        distance_fn=distance, sphere_sampler=sampler,
    )


def _stereo(x: Array, K: float):
    """Conformal factor S = sigma^2 of the stereographic space-form chart and its derivatives."""
    m = x.shape[-1]
    r2 = np.sum(x * x, axis=-1)
    q = 1.0 + K * r2
    S = 4.0 / q**2
    dS = -16.0 * K * x / q[..., None] ** 3
    ddS = (-16.0 * K * np.eye(m) / q[..., None, None] ** 3
           + 96.0 * K**2 * x[..., :, None] * x[..., None, :] / q[..., None, None] ** 4)
    return S, dS, ddS


def warped_metric(profile: WarpedProfile, basepoint_t: float | None = None,
                  radial_origin: float | None = None, name: str = "warped",
                  params: dict | None = None, sample_t: tuple[float, float] | None = None) -> ChartedMetric:
    """Chart ``(t, x_1..x_m)`` for ``dt^2 + f(t)^2 h``.

    A one-dimensional base uses an angle coordinate of period 2 pi. A base of
    dimension >= 2 uses the stereographic chart ``h = 4|dx|^2/(1 + K|x|^2)^2``.
    A doubly-warped profile uses torus coordinates of period 1.

    ``radial_origin`` fixes the closed-form distance ``|t - radial_origin|``
    attached to the chart; it is exact for capped profiles and for points on
    the basepoint's fibre, and a lower bound elsewhere.
    """
    m = profile.base_dim
    n = m + 1
    K = profile.base_curvature
    t_lo, t_hi = profile.domain
    if basepoint_t is None:
        basepoint_t = t_lo
    if radial_origin is None:
        radial_origin = basepoint_t
    warp = profile.warp
    second = profile.second

    def components(p):
        p = np.asarray(p, dtype=float)
        g = np.zeros(p.shape[:-1] + (n, n))
        g[..., 0, 0] = 1.0
        t = p[..., 0]
        if second is not None:
            g[..., 1, 1] = warp.f(t) ** 2
            g[..., 2, 2] = second.f(t) ** 2
        elif m == 1:
            g[..., 1, 1] = warp.f(t) ** 2
        else:
            S, _, _ = _stereo(p[..., 1:], K)
            F = warp.f(t) ** 2 * S
            for a in range(1, n):
                g[..., a, a] = F
        return g

    def derivatives(p):
        p = np.asarray(p, dtype=float)
        shape = p.shape[:-1]
        g = components(p)
        dg, ddg = _zeros_jet(shape, n)
        t = p[..., 0]
        if second is not None or m == 1:
            warps = [warp] if second is None else [warp, second]
            for a, w in enumerate(warps, start=1):
                f, df, ddf = w(t)
                dg[..., a, a, 0] = 2 * f * df
                ddg[..., a, a, 0, 0] = 2 * df**2 + 2 * f * ddf
            return g, dg, ddg
        f, df, ddf = warp(t)
        F, F1, F2 = f**2, 2 * f * df, 2 * df**2 + 2 * f * ddf
        S, dS, ddS = _stereo(p[..., 1:], K)
        for a in range(1, n):
            dg[..., a, a, 0] = F1 * S
            dg[..., a, a, 1:] = F[..., None] * dS
            ddg[..., a, a, 0, 0] = F2 * S
            ddg[..., a, a, 0, 1:] = F1[..., None] * dS
            ddg[..., a, a, 1:, 0] = F1[..., None] * dS
            ddg[..., a, a, 1:, 1:] = F[..., None, None] * ddS
        return g, dg, ddg

    inf = math.inf
    if second is not None:
        base_dom = ((-inf, inf), (-inf, inf))
        base_box = ((0.0, 1.0), (0.0, 1.0))
        periods = (None, 1.0, 1.0)
    elif m == 1:
        base_dom = ((-inf, inf),)
        base_box = ((0.0, 2 * math.pi),)
        periods = (None, 2 * math.pi)
    elif K < 0:
        w = 0.99 / math.sqrt(-K * m)
        base_dom = ((-w, w),) * m
        base_box = base_dom
        periods = (None,) * n
    else:
        base_dom = ((-inf, inf),) * m
        base_box = ((-1.0, 1.0),) * m
        periods = (None,) * n
    domain = ((t_lo, t_hi),) + base_dom
    if sample_t is None:
        sample_t = (t_lo if math.isfinite(t_lo) else -10.0,
                    t_hi if math.isfinite(t_hi) else (t_lo if math.isfinite(t_lo) else 0.0) + 10.0)
    base_center = [0.5 * (lo + hi) if (second is not None) else 0.0 for lo, hi in base_box]
    if m == 1 and second is None:
        base_center = [0.0]
    bp = np.array([basepoint_t] + base_center)
    base_lo = np.array([b[0] for b in base_box])
    base_hi = np.array([b[1] for b in base_box])

    def distance(p):
        return np.abs(np.asarray(p, dtype=float)[..., 0] - radial_origin)

    def sampler(r, rng, count):
        pts = np.empty((count, n))
        pts[:, 0] = radial_origin + r
        pts[:, 1:] = rng.uniform(base_lo, base_hi, size=(count, m))
        return pts

    return ChartedMetric(
        n, components, domain, bp, derivatives, name=name, params=params or {},
        sample_box=(sample_t,) + base_box, distance_fn=distance, sphere_sampler=sampler,
        profile=profile, radial_index=0, periods=periods,
    )


def rotational_plane(warp: Warp, name: str = "rotational", params: dict | None = None,
                     sample_t=(0.05, 10.0)) -> ChartedMetric:
    """Capped surface of revolution ``dt^2 + f(t)^2 dtheta^2`` with the cap center as basepoint."""
    prof = WarpedProfile(warp, base_dim=1, domain=(0.0, math.inf))
    return warped_metric(prof, basepoint_t=0.0, radial_origin=0.0, name=name,
                         params=params, sample_t=sample_t)


def polar_plane() -> ChartedMetric:
    return rotational_plane(Warp.power(1.0), name="flat-polar")


def round_sphere() -> ChartedMetric:
    """Unit 2-sphere in polar coordinates ``(theta, phi)``; basepoint at the north pole."""
    prof = WarpedProfile(Warp.space_form(1.0), base_dim=1, domain=(0.0, math.pi))
    return warped_metric(prof, basepoint_t=0.0, radial_origin=0.0, name="sphere",
                         sample_t=(0.1, math.pi - 0.1))


def hyperbolic_plane() -> ChartedMetric:
    """``dt^2 + e^{2t} dx^2`` (upper half-plane with ``y = e^{-t}``)."""
    prof = WarpedProfile(Warp.exponential(1.0), base_dim=1, domain=(-math.inf, math.inf))
    base = warped_metric(prof, basepoint_t=0.0, radial_origin=0.0, name="hyperbolic",
                         sample_t=(-5.0, 5.0))

    def distance(p):
        p = np.asarray(p, dtype=float)
        x, y = p[..., 1], np.exp(-p[..., 0])
        return np.arccosh(1.0 + (x**2 + (y - 1.0) ** 2) / (2.0 * y))

    def sampler(r, rng, count):
        theta = rng.uniform(0.0, 2 * math.pi, size=count)
        y = math.cosh(r) + math.sinh(r) * np.sin(theta)
        x = math.sinh(r) * np.cos(theta)
        return np.stack([-np.log(y), x], axis=-1)

    return base.with_(distance_fn=distance, sphere_sampler=sampler, periods=(None, None), profile=None,
                      sample_box=((-5.0, 5.0), (-5.0, 5.0)))


def scaled(metric: ChartedMetric, u: float) -> ChartedMetric:
    """The constant rescaling ``u^{-2} g`` on the same chart."""
    if u <= 0:
        raise ParameterError("rescaling factor must be positive")
    s = u**-2
    comp = metric.components

    def components(p):
        return s * comp(p)

    def derivatives(p):
        g, dg, ddg = metric.jet(p)
        return s * g, s * dg, s * ddg

    dist = None if metric.distance_fn is None else (lambda p: metric.distance_fn(p) / u)
    samp = None if metric.sphere_sampler is None else (
        lambda r, rng, count: metric.sphere_sampler(r * u, rng, count))
    return metric.with_(
        components=components,
        derivatives=derivatives if metric.derivatives is not None else None,
        name=f"{metric.name}/u^2", params={**metric.params, "u": u},
        distance_fn=dist, sphere_sampler=samp, profile=None,
    )


def conformal(h: ChartedMetric, phi: Callable, dphi: Callable, ddphi: Callable,
              name: str | None = None, distance_fn=None, sphere_sampler=None) -> ChartedMetric:
    """``e^{2 phi} h`` with the product rule applied to the jet of ``h``.

    ``phi``, ``dphi`` and ``ddphi`` map chart points to the value, coordinate
    gradient ``(..., n)`` and coordinate Hessian ``(..., n, n)``.
    """

    def components(p):
        p = np.asarray(p, dtype=float)
        return np.exp(2 * phi(p))[..., None, None] * h.components(p)

    def derivatives(p):
        p = np.asarray(p, dtype=float)
        hg, hd, hdd = h.jet(p)
        e = np.exp(2 * phi(p))
        a = dphi(p)
        A = ddphi(p)
        g = e[..., None, None] * hg
        dg = e[..., None, None, None] * (2 * hg[..., None] * a[..., None, None, :] + hd)
        ddg = e[..., None, None, None, None] * (
            4 * hg[..., None, None] * (a[..., :, None] * a[..., None, :])[..., None, None, :, :]
            + 2 * hg[..., None, None] * A[..., None, None, :, :]
            + 2 * hd[..., :, None] * a[..., None, None, None, :]
            + 2 * hd[..., None, :] * a[..., None, None, :, None]
            + hdd)
        return g, dg, ddg

    return h.with_(
        components=components, derivatives=derivatives,
        name=name or f"exp(2phi)*{h.name}", distance_fn=distance_fn,
        sphere_sampler=sphere_sampler, profile=None,
    )
