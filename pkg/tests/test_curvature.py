from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdecay.charts import (conformal, flat, hyperbolic_plane, polar_plane, round_sphere, scaled,
                           warped_metric)
from qdecay.curvature import (conformal_data, conformal_riemann, doubly_warped_sectional, ricci,
                              ricci_by_planes, riemann, sectional, sectional_batch,
                              warped_sectional)
from qdecay.errors import ProfileError
from qdecay.metric import TwoPlane
from qdecay.profiles import Warp, WarpedProfile

vec = st.lists(st.floats(-1, 1), min_size=2, max_size=2)


def test_sphere_has_curvature_plus_one():
    K = sectional(round_sphere(), [1.0, 0.3], TwoPlane(None, np.array([1.0, 0]), np.array([0, 1.0])))
    assert K == pytest.approx(1.0, abs=1e-12)


def test_hyperbolic_has_curvature_minus_one():
    K = sectional_batch(hyperbolic_plane(), [[0.3, -1.2]], [1.0, 0.0], [0.3, 1.0])
    assert K[0] == pytest.approx(-1.0, abs=1e-12)


def test_flat_and_polar_have_zero_curvature():
    assert sectional_batch(flat(3), [[0.1, 0.2, 0.3]], [1, 0, 0], [0, 1, 1])[0] == 0.0
    assert abs(sectional_batch(polar_plane(), [[1.3, 0.2]], [1, 0], [0, 1])[0]) < 1e-14


def test_riemann_symmetries_hold():
    prof = WarpedProfile(Warp.power(1.7), base_dim=2, base_curvature=-1.0)
    curv = riemann(warped_metric(prof), [2.0, 0.1, 0.2])
    assert curv.symmetry_defect() < 1e-12


def test_warped_oracle_example():
    # dt^2 + t^4 dth^2: radial K = -c(c-1)/t^2 = -2/t^2
    kr, kt = warped_sectional(WarpedProfile(Warp.power(2.0)), 3.0)
    assert kr == pytest.approx(-2.0 / 9.0) and math.isnan(kt)


def test_warped_oracle_rejects_nonpositive_warp():
    with pytest.raises(ProfileError):
        warped_sectional(WarpedProfile(Warp.power(1.0, scale=-1.0)), 2.0)


def test_doubly_warped_matches_generic_engine():
    a, b = Warp.log_collapse(0.5), Warp.log_collapse(0.0)
    g = warped_metric(WarpedProfile(a, base_dim=2, second=b))
    t = 7.0
    want = doubly_warped_sectional(a, b, t)
    e = np.eye(3)
    got = [sectional_batch(g, [[t, 0.3, 0.6]], e[i], e[j])[0] for i, j in [(0, 1), (0, 2), (1, 2)]]
    assert np.allclose(got, want, rtol=1e-10)


@given(v=vec, w=vec, a=st.floats(0.2, 5), b=st.floats(-3, 3), c=st.floats(0.2, 5))
def test_sectional_is_basis_invariant(v, w, a, b, c):
    v, w = np.array(v), np.array(w)
    if abs(v[0] * w[1] - v[1] * w[0]) < 1e-2:
        return
    m = warped_metric(WarpedProfile(Warp.power(2.5)))
    p = [2.0, 0.4]
    k1 = sectional_batch(m, p, v, w)
    k2 = sectional_batch(m, p, a * v + b * w, c * w)
    assert k1 == pytest.approx(k2, rel=1e-9, abs=1e-12)


@given(u=st.floats(0.1, 20.0))
def test_scaled_metric_scales_curvature(u):
    # u^{-2} g has curvature u^2 K
    m = round_sphere()
    K = sectional_batch(scaled(m, u), [1.0, 0.5], [1, 0], [0, 1])
    assert K == pytest.approx(u * u, rel=1e-10)


def test_ricci_of_sphere_and_plane_sum():
    S = round_sphere()
    assert ricci(S, [1.0, 0.0], np.array([1.0, 0.0])) == pytest.approx(1.0)
    prof = WarpedProfile(Warp.space_form(-1.0), base_dim=2, base_curvature=1.0, domain=(0.0, math.inf))
    H3 = warped_metric(prof, basepoint_t=0.5)
    p = [1.2, 0.1, -0.3]
    assert ricci_by_planes(H3, p, np.array([1.0, 0, 0])) == pytest.approx(-2.0, abs=1e-10)
    assert ricci(H3, p, np.array([1.0, 0, 0])) == pytest.approx(-2.0, abs=1e-10)


@given(a=st.floats(-1, 1), b=st.floats(-1, 1), q=st.floats(-0.5, 0.5))
def test_conformal_law_matches_direct_computation(a, b, q):
    h = polar_plane()
    p = np.array([1.5, 0.7])

    def phi(x):
        x = np.asarray(x, float)
        return a * x[..., 0] + b * x[..., 1] + q * x[..., 0] * x[..., 1]

    def dphi(x):
        x = np.asarray(x, float)
        return np.stack([a + q * x[..., 1], b + q * x[..., 0]], axis=-1)

    def ddphi(x):
        x = np.asarray(x, float)
        out = np.zeros(x.shape[:-1] + (2, 2))
        out[..., 0, 1] = out[..., 1, 0] = q
        return out

    g = conformal(h, phi, dphi, ddphi)
    ch = riemann(h, p)
    want = conformal_riemann(ch, ch.metric, conformal_data(h, p, phi(p), dphi(p), ddphi(p))).up
    got = riemann(g, p).up
    assert np.max(np.abs(got - want)) <= 1e-9 * max(1.0, np.max(np.abs(want)))


def test_conformal_flat_to_sphere():
    # e^{2 phi} |dx|^2 with phi = log(2/(1+|x|^2)) is the unit sphere
    def phi(x):
        return np.log(2.0 / (1.0 + np.sum(np.asarray(x) ** 2, axis=-1)))

    def dphi(x):
        x = np.asarray(x, float)
        return -2 * x / (1 + np.sum(x**2, axis=-1))[..., None]

    def ddphi(x):
        x = np.asarray(x, float)
        s = 1 + np.sum(x**2, axis=-1)
        return (-2 * np.eye(2) / s[..., None, None]
                + 4 * x[..., :, None] * x[..., None, :] / (s**2)[..., None, None])

    g = conformal(flat(2), phi, dphi, ddphi)
    assert sectional_batch(g, [[0.3, -0.8]], [1, 0], [0, 1])[0] == pytest.approx(1.0, abs=1e-12)
