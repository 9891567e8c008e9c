"""Chart-local Riemannian metrics and pointwise metric algebra.

A :class:`ChartedMetric` is a vectorized map from chart points ``(..., n)``
to symmetric matrices ``(..., n, n)``. Derivatives come from a closed-form
``derivatives`` map when the builder supplies one, and from fourth-order
central differences otherwise.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Mapping

import numpy as np

from .errors import DegeneracyError, DomainError, MetricValidityError, ShapeError

Array = np.ndarray

# first-derivative stencil weights (offset -> weight), fourth order
_D1 = {-2: 1.0 / 12, -1: -8.0 / 12, 1: 8.0 / 12, 2: -1.0 / 12}
# second-derivative stencil weights, fourth order
_D2 = {-2: -1.0 / 12, -1: 16.0 / 12, 0: -30.0 / 12, 1: 16.0 / 12, 2: -1.0 / 12}


@functools.lru_cache(maxsize=None)
def _stencil(n: int):
    """Offsets (S, n) and weight tables for first and second derivatives."""
    offsets = [np.zeros(n)]
    index = {tuple(np.zeros(n, dtype=int)): 0}

    def slot(off):
        key = tuple(int(o) for o in off)
        if key not in index:
            index[key] = len(offsets)
            offsets.append(np.asarray(off, dtype=float))
        return index[key]

    for k in range(n):
        for a in (-2, -1, 1, 2):
            off = np.zeros(n, dtype=int)
            off[k] = a
            slot(off)
    for k in range(n):
        for l in range(k + 1, n):
            for a in (-2, -1, 1, 2):
                for b in (-2, -1, 1, 2):
                    off = np.zeros(n, dtype=int)
                    off[k], off[l] = a, b
                    slot(off)
    S = len(offsets)
    W1 = np.zeros((n, S))
    W2 = np.zeros((n, n, S))
    for k in range(n):
        for a, w in _D1.items():
            off = np.zeros(n, dtype=int)
            off[k] = a
            W1[k, index[tuple(off)]] += w
        for a, w in _D2.items():
            off = np.zeros(n, dtype=int)
            off[k] = a
            W2[k, k, index[tuple(off)]] += w
        for l in range(k + 1, n):
            for a, wa in _D1.items():
                for b, wb in _D1.items():
                    off = np.zeros(n, dtype=int)
                    off[k], off[l] = a, b
                    W2[k, l, index[tuple(off)]] += wa * wb
            W2[l, k] = W2[k, l]
    return np.array(offsets), W1, W2


@dataclass(frozen=True, eq=False)
class ChartedMetric:
    """A smooth metric field on a box-shaped coordinate chart.

    ``components`` must broadcast over leading axes. ``domain`` holds one
    ``(lo, hi)`` pair per coordinate (infinite bounds allowed). The optional
    ``derivatives`` map returns ``(g, dg, ddg)`` with ``dg[..., i, j, k] =
    d_k g_ij`` and ``ddg[..., i, j, k, l] = d_k d_l g_ij``.

    ``distance_fn`` and ``sphere_sampler`` are closed-form helpers that
    builders attach when they know the distance to the basepoint (for
    rotationally symmetric charts this is the radial coordinate offset).
    """

    dim: int
    components: Callable[[Array], Array]
    domain: tuple[tuple[float, float], ...]
    basepoint: Array
    derivatives: Callable[[Array], tuple[Array, Array, Array]] | None = None
    fd_step: float = 1e-3
    name: str = "metric"
    params: Mapping[str, Any] = field(default_factory=dict)
    sample_box: tuple[tuple[float, float], ...] | None = None
    distance_fn: Callable[[Array], Array] | None = None
    sphere_sampler: Callable[[float, np.random.Generator, int], Array] | None = None
    profile: Any = None
    radial_index: int | None = None
    periods: tuple[float | None, ...] | None = None

    def __post_init__(self):
        if self.dim < 2:
            raise ShapeError("a charted metric needs dimension >= 2")
        if len(self.domain) != self.dim:
            raise ShapeError("domain must list one interval per coordinate")
        bp = np.asarray(self.basepoint, dtype=float)
        object.__setattr__(self, "basepoint", bp)
        if bp.shape != (self.dim,):
            raise ShapeError("basepoint has the wrong dimension")
        if not self.contains(bp):
            raise DomainError(f"basepoint {bp} outside chart domain")

    # -- domain handling -------------------------------------------------
    def _bounds(self):
        lo = np.array([d[0] for d in self.domain], dtype=float)
        hi = np.array([d[1] for d in self.domain], dtype=float)
        return lo, hi

    def contains(self, points) -> bool:
        p = np.asarray(points, dtype=float)
        lo, hi = self._bounds()
        return bool(np.all((p >= lo) & (p <= hi)))

    def require(self, points) -> Array:
        p = np.asarray(points, dtype=float)
        if p.shape[-1] != self.dim:
            raise ShapeError(f"expected points with last axis {self.dim}, got {p.shape}")
        if not self.contains(p):
            lo, hi = self._bounds()
            flat = p.reshape(-1, self.dim)
            bad = flat[~np.all((flat >= lo) & (flat <= hi), axis=-1)][0]
            raise DomainError(f"point {bad} outside chart domain of {self.name}")
        return p

    def box(self) -> tuple[tuple[float, float], ...]:
        """Finite box used for random sampling of chart points."""
        if self.sample_box is not None:
            return self.sample_box
        out = []
        for lo, hi in self.domain:
            lo2 = lo if math.isfinite(lo) else (hi - 10.0 if math.isfinite(hi) else -10.0)
            hi2 = hi if math.isfinite(hi) else lo2 + 10.0 + (0.0 if math.isfinite(lo) else 10.0)
            out.append((lo2, hi2))
        return tuple(out)

    def sample(self, rng: np.random.Generator, count: int) -> Array:
        b = np.array(self.box())
        return rng.uniform(b[:, 0], b[:, 1], size=(count, self.dim))

    # -- evaluation ------------------------------------------------------
    def steps(self, points) -> Array:
        """Per-coordinate finite-difference step at each point."""
        p = np.asarray(points, dtype=float)
        return self.fd_step * np.maximum(np.abs(p), 1.0)

    def jet(self, points) -> tuple[Array, Array, Array]:
        """``(g, dg, ddg)`` at ``points`` (closed form when available)."""
        p = self.require(points)
        if self.derivatives is not None:
            g, dg, ddg = self.derivatives(p)
            return np.asarray(g, float), np.asarray(dg, float), np.asarray(ddg, float)
        return self._fd_jet(p)

    def _fd_jet(self, p: Array):
        n = self.dim
        offsets, W1, W2 = _stencil(n)
        h = self.steps(p)
        pts = p[..., None, :] + offsets * h[..., None, :]
        if not self.contains(pts):
            raise DomainError(f"finite-difference stencil around {p} leaves the domain of {self.name}")
        G = np.asarray(self.components(pts), dtype=float)
        g = G[..., 0, :, :]
        # the float weights do not sum to exactly zero; differencing against
        # the center keeps constant components from picking up h^-2 noise
        G = G - g[..., None, :, :]
        dg = np.einsum("ks,...sij->...ijk", W1, G) / h[..., None, None, :]
        ddg = np.einsum("kls,...sij->...ijkl", W2, G)
        ddg = ddg / (h[..., None, None, :, None] * h[..., None, None, None, :])
        return g, dg, ddg

    def with_(self, **changes) -> "ChartedMetric":
        return replace(self, **changes)


def _validate(metric: ChartedMetric, p: Array, g: Array) -> None:
    sym_err = np.abs(g - np.swapaxes(g, -1, -2))
    scale = np.abs(g).max(axis=(-1, -2), keepdims=True)
    if np.any(sym_err > 1e-12 * scale):
        raise MetricValidityError(f"{metric.name}: component matrix not symmetric")
    if not np.all(np.isfinite(g)):
        raise MetricValidityError(f"{metric.name}: non-finite components")
    eig = np.linalg.eigvalsh(g)
    bad = eig[..., 0] <= 0
    if np.any(bad):
        where = np.asarray(p)[bad] if np.ndim(bad) else p
        raise MetricValidityError(
            f"{metric.name}: metric not positive definite at {np.atleast_2d(where)[0]}")


def eval_metric(metric: ChartedMetric, p) -> Array:
    """``g_ij(p)``, checked to be symmetric positive definite."""
    p = metric.require(p)
    g = np.asarray(metric.components(p), dtype=float)
    _validate(metric, p, g)
    return g


def volume_density(metric: ChartedMetric, p) -> Array | float:
    """Riemannian volume density ``sqrt(det g)``."""
    g = eval_metric(metric, p)
    det = np.linalg.det(g)
    if np.any(det <= 0):
        raise MetricValidityError(f"{metric.name}: det g <= 0")
    out = np.sqrt(det)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True, eq=False)
class TwoPlane:
    point: Array
    v: Array
    w: Array


def inner(g: Array, a: Array, b: Array) -> Array:
    return np.einsum("...i,...ij,...j->...", a, g, b)


def orthonormal_plane(metric: ChartedMetric, p, v, w) -> TwoPlane:
    """Gram-Schmidt the pair ``(v, w)`` with respect to ``g(p)``."""
    p = np.asarray(p, dtype=float)
    g = eval_metric(metric, p)
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    nv = math.sqrt(inner(g, v, v))
    nw = math.sqrt(inner(g, w, w))
    if nv == 0 or nw == 0:
        raise DegeneracyError("zero spanning vector")
    e1 = v / nv
    w_perp = w - inner(g, w, e1) * e1
    np_ = math.sqrt(max(inner(g, w_perp, w_perp), 0.0))
    if np_ <= 1e-12 * nw:
        raise DegeneracyError("spanning vectors are parallel")
    return TwoPlane(p, e1, w_perp / np_)
