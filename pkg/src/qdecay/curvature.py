"""Christoffel symbols, Riemann tensor, sectional and Ricci curvature.

Index convention::

    R^i_{jkl} = d_k G^i_{jl} - d_l G^i_{jk} + G^i_{km} G^m_{jl} - G^i_{lm} G^m_{jk}

so that ``R_{ijkl} v^i w^j v^k w^l = +1`` for an orthonormal pair on the unit
round sphere. Everything below works on batches: leading axes of the input
points are carried through.

Closed-form oracles for conformal changes and (doubly) warped products live
here too, so that the generic pipeline can be checked against formulas that
share none of its code.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneracyError, NormalizationError, ProfileError, ShapeError
from .metric import ChartedMetric, TwoPlane, inner
from .profiles import Warp, WarpedProfile

Array = np.ndarray


def christoffel_from_jet(g: Array, dg: Array) -> Array:
    ginv = np.linalg.inv(g)
    T = np.swapaxes(dg, -1, -2) + dg - np.moveaxis(dg, -1, -3)
    return 0.5 * np.einsum("...im,...mjk->...ijk", ginv, T)


def riemann_from_jet(g: Array, dg: Array, ddg: Array) -> tuple[Array, Array]:
    """Return ``(Gamma, R^i_{jkl})`` from a metric jet."""
    ginv = np.linalg.inv(g)
    # T[m, j, k] = d_j g_mk + d_k g_mj - d_m g_jk
    T = np.swapaxes(dg, -1, -2) + dg - np.moveaxis(dg, -1, -3)
    gamma = 0.5 * np.einsum("...im,...mjk->...ijk", ginv, T)
    # dT[m, j, k, l] = d_l T[m, j, k]
    dT = (np.swapaxes(ddg, -2, -3) + ddg
          - np.moveaxis(ddg, -2, -4))
    dginv = -np.einsum("...ia,...abl,...bm->...iml", ginv, dg, ginv)
    dgamma = 0.5 * (np.einsum("...iml,...mjk->...ijkl", dginv, T)
                    + np.einsum("...im,...mjkl->...ijkl", ginv, dT))
    R = (np.swapaxes(dgamma, -1, -2) - dgamma
         + np.einsum("...ikm,...mjl->...ijkl", gamma, gamma)
         - np.einsum("...ilm,...mjk->...ijkl", gamma, gamma))
    return gamma, R


def christoffel(metric: ChartedMetric, p) -> Array:
    """``Gamma^i_{jk}`` at ``p`` (batched over leading axes)."""
    g, dg, _ = metric.jet(p)
    return christoffel_from_jet(g, dg)


@dataclass(frozen=True, eq=False)
class CurvatureTensor:
    point: Array
    up: Array       # R^i_{jkl}
    metric: Array   # g_ij used for lowering

    @property
    def lowered(self) -> Array:
        return np.einsum("...im,...mjkl->...ijkl", self.metric, self.up)

    def symmetry_defect(self) -> float:
        """Largest violation of the pair symmetries and first Bianchi identity.

        Relative to the largest component of ``R_{ijkl}``.
        """
        R = self.lowered
        scale = max(np.abs(R).max(), 1e-300)
        errs = [
            R + np.swapaxes(R, -4, -3),
            R + np.swapaxes(R, -2, -1),
            R - np.moveaxis(R, (-4, -3), (-2, -1)),
            R + np.einsum("...ijkl->...iklj", R) + np.einsum("...ijkl->...iljk", R),
        ]
        return float(max(np.abs(e).max() for e in errs) / scale)


def riemann(metric: ChartedMetric, p) -> CurvatureTensor:
    g, dg, ddg = metric.jet(p)
    _, R = riemann_from_jet(g, dg, ddg)
    return CurvatureTensor(np.asarray(p, dtype=float), R, g)


def _sectional_from(Rlow: Array, g: Array, v: Array, w: Array) -> Array:
    # Work with the bivector v^w so nearly parallel coordinate pairs in a
    # strongly anisotropic metric do not lose the Gram determinant to
    # cancellation.
    B = v[..., :, None] * w[..., None, :] - v[..., None, :] * w[..., :, None]
    num = 0.25 * np.einsum("...ijkl,...ij,...kl->...", Rlow, B, B)
    den = 0.5 * np.einsum("...ij,...kl,...ik,...jl->...", B, B, g, g)
    scale = inner(g, v, v) * inner(g, w, w)
    if np.any(den <= 1e-24 * scale):
        raise DegeneracyError("degenerate 2-plane")
    return num / den


def sectional(metric: ChartedMetric, p, plane: TwoPlane) -> float:
    """Sectional curvature of ``plane`` at ``p``.

    The pair need not be orthonormal; the Gram determinant is divided out,
    which makes the value invariant under any change of basis of the plane.
    """
    curv = riemann(metric, p)
    return float(_sectional_from(curv.lowered, curv.metric, plane.v, plane.w))


def sectional_batch(metric: ChartedMetric, points, v, w) -> Array:
    """Sectional curvatures for matching batches of points and spanning pairs."""
    points = np.asarray(points, dtype=float)
    g, dg, ddg = metric.jet(points)
    _, R = riemann_from_jet(g, dg, ddg)
    Rlow = np.einsum("...im,...mjkl->...ijkl", g, R)
    v = np.broadcast_to(np.asarray(v, dtype=float), points.shape)
    w = np.broadcast_to(np.asarray(w, dtype=float), points.shape)
    return _sectional_from(Rlow, g, v, w)


def ricci_tensor(curv: CurvatureTensor) -> Array:
    return np.einsum("...kjkl->...jl", curv.up)


def ricci(metric: ChartedMetric, p, v) -> float:
    """``Ric(v, v)`` for a unit vector ``v``."""
    curv = riemann(metric, p)
    v = np.asarray(v, dtype=float)
    norm = inner(curv.metric, v, v)
    if abs(norm - 1.0) > 1e-10:
        raise NormalizationError(f"Ric(v, v) needs a unit vector, g(v, v) = {norm!r}")
    return float(np.einsum("jl,j,l->", ricci_tensor(curv), v, v))


def orthonormal_completion(g: Array, v: Array) -> Array:
    """Rows ``e_1..e_{n-1}`` completing unit ``v`` to a g-orthonormal basis."""
    n = len(v)
    basis = [v / np.sqrt(inner(g, v, v))]
    for k in range(n):
        e = np.zeros(n)
        e[k] = 1.0
        for b in basis:
            e = e - inner(g, e, b) * b
        nrm = np.sqrt(max(inner(g, e, e), 0.0))
        if nrm > 1e-8:
            basis.append(e / nrm)
        if len(basis) == n:
            break
    return np.array(basis[1:])


def ricci_by_planes(metric: ChartedMetric, p, v) -> float:
    """``sum_i K(v, e_i)`` over an orthonormal completion of ``v``."""
    curv = riemann(metric, p)
    v = np.asarray(v, dtype=float)
    Rlow = curv.lowered
    return float(sum(_sectional_from(Rlow, curv.metric, v, e)
                     for e in orthonormal_completion(curv.metric, v)))


# -- conformal change --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ConformalData:
    """Value, gradient and covariant Hessian of phi with respect to ``h``."""

    phi: float
    grad: Array
    hess: Array

    def __post_init__(self):
        hess = np.asarray(self.hess, dtype=float)
        if not np.allclose(hess, hess.T, rtol=1e-10, atol=1e-12):
            raise ShapeError("Hessian of phi must be symmetric")


def conformal_data(h: ChartedMetric, p, phi: float, dphi, ddphi) -> ConformalData:
    """Covariant derivatives of phi from its coordinate derivatives at ``p``."""
    gamma = christoffel(h, p)
    dphi = np.asarray(dphi, dtype=float)
    hess = np.asarray(ddphi, dtype=float) - np.einsum("cab,c->ab", gamma, dphi)
    return ConformalData(float(phi), dphi, 0.5 * (hess + hess.T))


def conformal_riemann(h_curvature: CurvatureTensor, h_metric: Array,
                      data: ConformalData) -> CurvatureTensor:
    """``R^i_{jkl}`` of ``g = e^{2 phi} h`` from the curvature of ``h``.

    Term-by-term transcription; ``tphi`` is ``phi_{;ab} - phi_{;a} phi_{;b}``
    and its index is raised with ``h``.
    """
    h = np.asarray(h_metric, dtype=float)
    n = h.shape[0]
    Rh = np.asarray(h_curvature.up, dtype=float)
    grad = np.asarray(data.grad, dtype=float)
    hess = np.asarray(data.hess, dtype=float)
    if Rh.shape != (n, n, n, n) or grad.shape != (n,) or hess.shape != (n, n):
        raise ShapeError("conformal data and curvature must share one dimension")
    hinv = np.linalg.inv(h)
    tphi = hess - np.outer(grad, grad)
    tphi_up = hinv @ tphi
    grad_sq = grad @ hinv @ grad
    delta = np.eye(n)
    R = (Rh
         - np.einsum("ik,jl->ijkl", tphi_up, h)
         + np.einsum("il,jk->ijkl", tphi_up, h)
         - np.einsum("ik,jl->ijkl", delta, tphi)
         + np.einsum("il,jk->ijkl", delta, tphi)
         - grad_sq * (np.einsum("ik,jl->ijkl", delta, h) - np.einsum("il,jk->ijkl", delta, h)))
    return CurvatureTensor(h_curvature.point, R, np.exp(2 * data.phi) * h)


# -- warped products -----------------------------------------------------------

def warped_sectional(profile: WarpedProfile, t) -> tuple[float, float]:
    """``(K_radial, K_tangential)`` of ``dt^2 + f^2 h``.

    ``K_tangential`` is NaN for a one-dimensional base, where no tangential
    2-plane exists.
    """
    f, df, ddf = profile.warp(t)
    if np.any(f <= 0):
        raise ProfileError(f"warp is not positive at t={t}")
    k_rad = -ddf / f
    if profile.base_dim >= 2:
        k_tan = (profile.base_curvature - df**2) / f**2
    else:
        k_tan = np.full_like(np.asarray(k_rad, dtype=float), np.nan)
    return k_rad, k_tan


def doubly_warped_sectional(a: Warp, b: Warp, t) -> tuple[float, float, float]:
    """``(K_ta, K_tb, K_ab)`` for ``dt^2 + a^2 dx^2 + b^2 dy^2``."""
    fa, da, dda = a(t)
    fb, db, ddb = b(t)
    if np.any(fa <= 0) or np.any(fb <= 0):
        raise ProfileError(f"warps must be positive at t={t}")
    return -dda / fa, -ddb / fb, -da * db / (fa * fb)
