"""Distances, ball volumes and growth/decay diagnostics on charted metrics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import least_squares

from .curvature import christoffel, sectional_batch
from .errors import (BudgetError, CapError, DomainError, MethodError, NormalizationError,
                     ProfileError, RangeError, SampleError, ShapeError)
from .metric import ChartedMetric, eval_metric, inner, volume_density
from .netdist import GraphDistance


# -- data types ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GrowthCurve:
    n: int
    t: np.ndarray
    vol: np.ndarray
    method: str
    stderr: np.ndarray | None = None

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        vol = np.asarray(self.vol, dtype=float)
        if t.shape != vol.shape or t.ndim != 1:
            raise ShapeError("radii and volumes must be matching 1-D arrays")
        if np.any(vol < 0):
            raise ValueError("volumes must be nonnegative")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "vol", vol)

    def ratios(self) -> np.ndarray:
        return self.vol / self.t**self.n


@dataclass(frozen=True, eq=False)
class DecayReport:
    """Samples of ``K * d^2`` and the constants fitted from them.

    ``C`` is the sup of ``|K| d^2`` (two-sided) or of ``-K d^2`` clipped at
    zero (one-sided); ``inf_K_d2`` is the inf of ``K d^2`` over the sample.
    """

    points: np.ndarray
    planes: np.ndarray
    K: np.ndarray
    d: np.ndarray
    radii: np.ndarray
    per_radius_max: np.ndarray
    C: float
    inf_K_d2: float
    slope: float
    divergent: bool
    one_sided: bool = False

    @property
    def C_fitted(self) -> float:
        return self.C


@dataclass(frozen=True, eq=False)
class GeodesicPath:
    s: np.ndarray
    x: np.ndarray
    xdot: np.ndarray
    exited: bool
    speed_defect: float


@dataclass(frozen=True, eq=False)
class SlowGrowth:
    ratios: np.ndarray
    liminf_estimate: float
    reference_ratio: float
    slow: bool
    witness_t: np.ndarray
    witness_ratio: np.ndarray
    witness_slope: float
    tail_integral: float
    fraction: float = 0.1


# -- geodesics -------------------------------------------------------------------

def _geodesic_rhs(metric: ChartedMetric):
    n = metric.dim

    def rhs(_, y):
        x, v = y[:n], y[n:]
        if not metric.contains(x):
            # rejected stage; the step shrinks until the exit event fires
            return np.full(2 * n, np.nan)
        gamma = christoffel(metric, x)
        return np.concatenate([v, -np.einsum("ijk,j,k->i", gamma, v, v)])

    return rhs


def _exit_event(metric: ChartedMetric):
    lo, hi = metric._bounds()
    fd = metric.derivatives is None

    def event(_, y):
        x = y[: metric.dim]
        margin = 3.0 * metric.steps(x) if fd else 1e-9 * np.maximum(np.abs(x), 1.0)
        return float(np.min(np.concatenate([x - lo - margin, hi - x - margin])))

    event.terminal = True
    event.direction = -1
    return event


def _integrate(metric, p, v, length, rtol=1e-10, atol=1e-12, dense=None):
    y0 = np.concatenate([np.asarray(p, float), np.asarray(v, float)])
    return solve_ivp(_geodesic_rhs(metric), (0.0, length), y0, method="DOP853",
                     rtol=rtol, atol=atol, events=_exit_event(metric), t_eval=dense)


def geodesic_trace(metric: ChartedMetric, p, v, length: float, samples: int = 201,
                   rtol: float = 1e-11) -> GeodesicPath:
    """Integrate the geodesic equation from ``p`` with unit initial velocity ``v``.

    A path that reaches the chart boundary is truncated there and flagged.
    """
    p = metric.require(p)
    g0 = eval_metric(metric, p)
    speed = inner(g0, np.asarray(v, float), np.asarray(v, float))
    if abs(speed - 1.0) > 1e-8:
        raise NormalizationError(f"initial velocity must be unit, g(v, v) = {speed!r}")
    sol = _integrate(metric, p, v, length, rtol=rtol, atol=1e-12,
                     dense=np.linspace(0.0, length, samples))
    exited = sol.status == 1
    s, y = sol.t, sol.y
    if exited and sol.t_events[0].size:
        s = np.append(s, sol.t_events[0][0])
        y = np.concatenate([y, sol.y_events[0][0][:, None]], axis=1)
    n = metric.dim
    x, xdot = y[:n].T, y[n:].T
    g = eval_metric(metric, x)
    defect = float(np.max(np.abs(inner(g, xdot, xdot) - 1.0)))
    return GeodesicPath(s, x, xdot, bool(exited), defect)


# -- distances -------------------------------------------------------------------

def _shoot(metric: ChartedMetric, m: np.ndarray, max_nfev: int) -> float:
    bp = metric.basepoint
    if np.linalg.eigvalsh(metric.components(bp))[0] <= 1e-12:
        raise MethodError(f"{metric.name}: chart is singular at the basepoint; cannot shoot")

    def residual(u):
        sol = _integrate(metric, bp, u, 1.0, rtol=1e-10)
        if sol.status != 0:
            return np.full(metric.dim, 1e3)
        return sol.y[: metric.dim, -1] - m

    res = least_squares(residual, m - bp, xtol=1e-12, ftol=1e-12, max_nfev=max_nfev)
    if np.linalg.norm(res.fun) > 1e-7 * max(1.0, np.linalg.norm(m)):
        raise BudgetError("geodesic shooting did not reach the target within budget")
    g = eval_metric(metric, bp)
    return float(math.sqrt(inner(g, res.x, res.x)))


def distance_estimate(metric: ChartedMetric, m, method: str | Sequence[str] = "radial",
                      eps: float = 0.02, graph: GraphDistance | None = None,
                      max_nfev: int = 200) -> float:
    """``d(m0, m)`` by the requested method(s); the minimum over methods is returned."""
    m = metric.require(np.asarray(m, dtype=float))
    methods = [method] if isinstance(method, str) else list(method)
    if not methods:
        raise MethodError("no distance method requested")
    best = math.inf
    for name in methods:
        if name == "radial":
            if metric.distance_fn is None:
                raise MethodError(f"{metric.name} has no radial distance")
            d = float(metric.distance_fn(m))
        elif name == "graph":
            net = graph if graph is not None else GraphDistance(metric, eps)
            d = float(net(m)[0])
            if not math.isfinite(d):
                raise BudgetError("target not reachable on the epsilon-net")
        elif name == "shoot":
            d = _shoot(metric, m, max_nfev)
        else:
            raise MethodError(f"unknown distance method {name!r}")
        best = min(best, d)
    return best


# -- volumes ---------------------------------------------------------------------

def _radial_integral(fn, a: float, b: float) -> float:
    """``int_a^b fn``, split on a geometric mesh so long ranges stay accurate."""
    if b <= a:
        return 0.0
    edges = [a]
    start = max(a, 1e-3)
    if start > a:
        edges.append(min(start, b))
    if b > edges[-1]:
        k = max(int(math.ceil(4 * math.log10(b / edges[-1]))), 1)
        edges.extend(np.geomspace(edges[-1], b, k + 1)[1:])
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi > lo:
            total += quad(fn, lo, hi, epsabs=0.0, epsrel=1e-12, limit=200)[0]
    return total


def _quadrature_volume(metric: ChartedMetric, t: float) -> float:
    prof = metric.profile
    if prof is None or metric.radial_index != 0 or metric.distance_fn is None:
        raise MethodError(f"{metric.name} is not rotationally symmetric; use monte-carlo")
    try:
        base = prof.base_measure()
    except ProfileError as exc:
        raise MethodError(str(exc)) from exc
    origin = float(metric.basepoint[0])
    lo, hi = prof.domain
    a = max(lo, origin - t)
    b = min(hi, origin + t)
    return base * _radial_integral(lambda s: float(prof.area_element(s)), a, b)


def ball_volume(metric: ChartedMetric, t: float, method: str = "quadrature",
                samples: int = 200_000, seed: int = 0, tasks: int = 8,
                eps: float = 0.02, graph: GraphDistance | None = None) -> tuple[float, float]:
    """``(vol(B_t), standard error)``; the error is 0 for quadrature.

    Monte Carlo draws uniform chart points in the metric's sample box, which
    must contain the ball. Each task uses its own stream spawned from
    ``seed`` so results are reproducible for a fixed task count.
    """
    if t <= 0:
        raise ValueError("radius must be positive")
    if method == "quadrature":
        return _quadrature_volume(metric, t), 0.0
    if method != "monte-carlo":
        raise MethodError(f"unknown volume method {method!r}")
    if metric.distance_fn is not None and graph is None:
        dist = metric.distance_fn
    else:
        dist = graph if graph is not None else GraphDistance(metric, eps)
    box = np.array(metric.box(), dtype=float)
    box_vol = float(np.prod(box[:, 1] - box[:, 0]))
    streams = np.random.SeedSequence(seed).spawn(tasks)
    per = max(samples // tasks, 1)
    s1 = s2 = 0.0
    for ss in streams:
        rng = np.random.default_rng(ss)
        pts = rng.uniform(box[:, 0], box[:, 1], size=(per, metric.dim))
        w = volume_density(metric, pts) * (np.asarray(dist(pts)) <= t)
        s1 += float(np.sum(w))
        s2 += float(np.sum(w * w))
    N = per * tasks
    mean = s1 / N
    var = max(s2 / N - mean**2, 0.0)
    return box_vol * mean, box_vol * math.sqrt(var / N)


def growth_curve(metric: ChartedMetric, radii, method: str = "quadrature", **kwargs) -> GrowthCurve:
    radii = np.asarray(radii, dtype=float)
    out = [ball_volume(metric, float(r), method=method, **kwargs) for r in radii]
    vol = np.array([v for v, _ in out])
    err = np.array([e for _, e in out]) if method == "monte-carlo" else None
    return GrowthCurve(metric.dim, radii, vol, method, err)


# -- curvature decay -------------------------------------------------------------

# |K| d^2 is scale-free; values below this are roundoff on flat regions
DECAY_NOISE_FLOOR = 1e-10


def _loglog_slope(radii: np.ndarray, values: np.ndarray) -> float:
    if radii.size < 2 or np.all(values <= DECAY_NOISE_FLOOR):
        return 0.0
    floor = max(1e-12 * float(np.max(values)), DECAY_NOISE_FLOOR)
    x = np.log(radii)
    y = np.log(np.maximum(values, floor))
    return float(np.polyfit(x, y, 1)[0])


def _decay_samples(metric: ChartedMetric, radii, planes_per_point: int,
                   points_per_radius: int, seed: int, r_min: float):
    radii = np.asarray(radii, dtype=float)
    radii = radii[radii >= r_min]
    if radii.size == 0:
        raise SampleError(f"no sample radius at or above r_min = {r_min}")
    if metric.sphere_sampler is None:
        raise MethodError(f"{metric.name} has no distance-sphere sampler")
    n = metric.dim
    coord = [(np.eye(n)[i], np.eye(n)[j]) for i in range(n) for j in range(i + 1, n)]
    streams = np.random.SeedSequence(seed).spawn(radii.size)
    P, V, W, R = [], [], [], []
    for r, ss in zip(radii, streams):
        rng = np.random.default_rng(ss)
        pts = metric.sphere_sampler(float(r), rng, points_per_radius)
        for p in pts:
            pairs = list(coord)
            for _ in range(planes_per_point):
                pairs.append((rng.normal(size=n), rng.normal(size=n)))
            for v, w in pairs:
                P.append(p)
                V.append(v)
                W.append(w)
                R.append(r)
    P, V, W, R = map(np.asarray, (P, V, W, R))
    K = sectional_batch(metric, P, V, W)
    d = np.asarray(metric.distance_fn(P), dtype=float) if metric.distance_fn is not None else R
    return radii, P, np.stack([V, W], axis=1), K, d, R


def fit_decay(radii, K, d, R, one_sided: bool = False, slope_tol: float = 0.1):
    """Fitted constant, per-radius maxima, log-log slope and divergence flag."""
    if K.size == 0:
        raise SampleError("empty curvature sample")
    Kd2 = K * d**2
    vals = np.maximum(-Kd2, 0.0) if one_sided else np.abs(Kd2)
    per = np.array([float(np.max(vals[R == r])) for r in radii])
    slope = _loglog_slope(radii, per)
    return float(np.max(vals)), float(np.min(Kd2)), per, slope, bool(slope > slope_tol)


def decay_constant(metric: ChartedMetric, radii, planes_per_point: int = 4,
                   points_per_radius: int = 8, seed: int = 0, r_min: float = 5.0,
                   one_sided: bool = False) -> DecayReport:
    """Fit ``C`` in ``|K| <= C / d^2`` on distance spheres of the given radii.

    Every sampled point contributes the coordinate planes and
    ``planes_per_point`` random planes. The divergence flag is raised when
    the per-radius maximum of ``|K| d^2`` grows like a positive power of the
    radius (log-log slope above 0.1).
    """
    radii, P, planes, K, d, R = _decay_samples(
        metric, radii, planes_per_point, points_per_radius, seed, r_min)
    C, inf, per, slope, div = fit_decay(radii, K, d, R, one_sided)
    return DecayReport(P, planes, K, d, radii, per, C, inf, slope, div, one_sided)


def lower_decay_check(metric: ChartedMetric, radii, **kwargs) -> DecayReport:
    """One-sided fit of ``K >= -C / d^2``; positive curvature never counts."""
    return decay_constant(metric, radii, one_sided=True, **kwargs)


# -- volume growth ---------------------------------------------------------------

def volume_exponent(curve: GrowthCurve, t_min: float | None = None) -> float:
    """Least-squares slope of ``log vol`` against ``log t``."""
    mask = np.ones_like(curve.t, dtype=bool) if t_min is None else curve.t >= t_min
    mask &= curve.vol > 0
    if mask.sum() < 2:
        raise RangeError("need two positive volumes to fit an exponent")
    return float(np.polyfit(np.log(curve.t[mask]), np.log(curve.vol[mask]), 1)[0])


def growth_integral(curve: GrowthCurve) -> float:
    """Partial integral of ``vol(B_t)/t^n dt/t`` over the sampled range."""
    return float(np.trapezoid(curve.ratios(), np.log(curve.t)))


def slow_growth_check(curve: GrowthCurve, fraction: float = 0.1) -> SlowGrowth:
    """Finite-data test for ``liminf vol(B_t)/t^n = 0``.

    The flag needs both a large drop (top-decade minimum below ``fraction``
    of the first-decade median) and a decreasing witness subsequence: the
    decade-spaced ratios from the global peak to the top-decade minimum.
    """
    t = curve.t
    if t[0] <= 0 or t[-1] / t[0] < 100.0:
        raise RangeError("slow-growth check needs at least two decades of radii")
    r = curve.ratios()
    first = t <= 10.0 * t[0]
    top = t >= t[-1] / 10.0
    ref = float(np.median(r[first]))
    top_idx = np.nonzero(top)[0]
    i_end = int(top_idx[np.argmin(r[top])])
    i_start = int(np.argmax(r[: i_end + 1]))
    if i_end > i_start:
        marks = np.geomspace(t[i_start], t[i_end], max(int(math.log10(t[i_end] / t[i_start])) + 1, 2))
        idx = sorted({int(np.argmin(np.abs(np.log(t / m)))) for m in marks} | {i_start, i_end})
    else:
        idx = [i_end]
    wt, wr = t[idx], r[idx]
    slope = (float(np.polyfit(np.log(wt), np.log(np.maximum(wr, 1e-300)), 1)[0])
             if len(idx) > 1 and np.all(wr > 0) else 0.0)
    liminf = float(r[i_end])
    slow = liminf < fraction * ref and slope < 0.0
    return SlowGrowth(r, liminf, ref, bool(slow), wt, wr, slope, growth_integral(curve), fraction)


# -- Gauss-Bonnet on capped surfaces ---------------------------------------------

def _capped_profile(metric: ChartedMetric):
    prof = metric.profile
    if metric.dim != 2 or prof is None or prof.base_dim != 1 or prof.second is not None:
        raise ShapeError("Gauss-Bonnet needs a 2-D rotationally symmetric chart")
    f0, df0 = prof.warp.f(np.array(0.0)), prof.warp.df(np.array(0.0))
    if prof.domain[0] != 0.0 or abs(float(f0)) > 1e-8 or abs(float(df0) - 1.0) > 1e-8:
        raise CapError(f"profile is not smoothly capped at t=0: f(0)={float(f0)}, f'(0)={float(df0)}")
    return prof


def gauss_bonnet_disk(metric: ChartedMetric, T: float) -> float:
    """``(1/2pi) int_{B_T} K dA`` from the boundary term: ``1 - f'(T)``."""
    prof = _capped_profile(metric)
    if T <= 0:
        raise DomainError("radius must be positive")
    return float(1.0 - prof.warp(np.array(float(T)))[1])


def gauss_bonnet_area(metric: ChartedMetric, T: float, nodes: int = 20,
                      per_decade: int = 6, angles: int = 8) -> float:
    """``(1/2pi) int_{B_T} K dA`` by tensor-product quadrature on the generic engine."""
    _capped_profile(metric)
    t0 = min(1e-2, T / 2)
    k = max(int(math.ceil(per_decade * math.log10(T / t0))), 1)
    edges = np.concatenate([[0.0], np.geomspace(t0, T, k + 1)])
    x, w = np.polynomial.legendre.leggauss(nodes)
    lo, hi = edges[:-1, None], edges[1:, None]
    ts = (0.5 * (hi - lo) * x + 0.5 * (hi + lo)).ravel()
    wt = (0.5 * (hi - lo) * w).ravel()
    th = 2 * math.pi * np.arange(angles) / angles
    P = np.stack(np.meshgrid(ts, th, indexing="ij"), axis=-1).reshape(-1, 2)
    K = sectional_batch(metric, P, [1.0, 0.0], [0.0, 1.0])
    dens = volume_density(metric, P)
    integrand = (K * dens).reshape(ts.size, angles)
    return float(np.sum(wt[:, None] * integrand) * (2 * math.pi / angles) / (2 * math.pi))


@dataclass(frozen=True)
class GaussBonnetLimit:
    value: float
    T: float
    converged: bool
    history: tuple = field(default_factory=tuple)


def gauss_bonnet_limit(metric: ChartedMetric, T0: float = 10.0, factor: float = 10.0,
                       tol: float = 1e-6, T_max: float = 1e12) -> GaussBonnetLimit:
    """Follow ``1 - f'(T)`` along ``T0 * factor^k`` until successive values settle."""
    T = T0
    prev = gauss_bonnet_disk(metric, T)
    hist = [(T, prev)]
    while T * factor <= T_max:
        T *= factor
        val = gauss_bonnet_disk(metric, T)
        hist.append((T, val))
        if abs(val - prev) < tol:
            return GaussBonnetLimit(val, T, True, tuple(hist))
        prev = val
    return GaussBonnetLimit(prev, T, False, tuple(hist))
