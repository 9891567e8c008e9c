from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdecay.charts import flat, polar_plane, round_sphere, warped_metric
from qdecay.errors import DegeneracyError, DomainError, MetricValidityError, ShapeError
from qdecay.metric import ChartedMetric, eval_metric, orthonormal_plane, volume_density
from qdecay.profiles import Warp, WarpedProfile, smoothstep


def test_flat_metric_is_identity():
    g = eval_metric(flat(3), np.zeros(3))
    assert np.array_equal(g, np.eye(3))


def test_point_outside_domain_is_rejected():
    with pytest.raises(DomainError):
        eval_metric(round_sphere(), [4.0, 0.0])


def test_dimension_one_chart_is_rejected():
    with pytest.raises(ShapeError):
        ChartedMetric(1, lambda p: np.ones(p.shape[:-1] + (1, 1)), ((0, 1),), [0.5])


def test_indefinite_metric_is_rejected():
    bad = flat(2).with_(components=lambda p: np.broadcast_to(np.diag([1.0, -1.0]),
                                                            np.shape(p)[:-1] + (2, 2)))
    with pytest.raises(MetricValidityError):
        eval_metric(bad, [0.0, 0.0])


def test_polar_density_is_radius():
    assert volume_density(polar_plane(), [2.5, 1.0]) == pytest.approx(2.5)


def test_orthonormal_plane_rejects_parallel_vectors():
    with pytest.raises(DegeneracyError):
        orthonormal_plane(flat(2), [0, 0], [1, 0], [2, 0])


def test_smoothstep_endpoints():
    x = np.array([0.0, 1.0])
    v, d1, d2 = smoothstep(x)
    assert np.allclose(v, [0, 1]) and np.allclose(d1, 0) and np.allclose(d2, 0)


@given(c=st.floats(-2.0, 3.0), t=st.floats(1.5, 30.0), x=st.floats(-0.4, 0.4))
def test_finite_difference_jet_matches_closed_form(c, t, x):
    g = warped_metric(WarpedProfile(Warp.power(c), base_dim=2, base_curvature=1.0))
    p = np.array([t, x, -x / 2])
    exact = g.jet(p)
    fd = g.with_(derivatives=None).jet(p)
    # truncation is relative; roundoff is of order eps |g| / h^2
    noise = 1e-8 * float(np.max(np.abs(exact[0])))
    for a, b in zip(exact, fd):
        assert np.max(np.abs(a - b)) <= 1e-6 * float(np.max(np.abs(a))) + noise


def test_constant_components_have_zero_fd_derivatives():
    # weight sums are not exactly zero in floating point; the jet must still vanish
    g = warped_metric(WarpedProfile(Warp.exponential(-0.75, 1.5), base_dim=2)).with_(derivatives=None)
    _, dg, ddg = g.jet(np.array([13.47, 0.1, -0.2]))
    assert np.all(dg[..., 0, 0, :] == 0.0) and np.all(ddg[..., 0, 0, :, :] == 0.0)


def test_capped_power_is_t_near_zero_and_power_far_out():
    w = Warp.capped_power(2.0)
    f, df, _ = w(np.array([0.1, 3.0]))
    assert f[0] == pytest.approx(0.1) and df[0] == pytest.approx(1.0)
    assert f[1] == pytest.approx(9.0) and df[1] == pytest.approx(6.0)


def test_sphere_base_measure():
    prof = WarpedProfile(Warp.power(1.0), base_dim=2, base_curvature=1.0)
    assert prof.base_measure() == pytest.approx(4 * math.pi)
