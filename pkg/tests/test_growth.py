from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdecay.charts import flat, hyperbolic_plane, polar_plane, round_sphere, scaled, warped_metric
from qdecay.errors import (CapError, MethodError, NormalizationError, RangeError, SampleError,
                           ShapeError)
from qdecay.gallery.examples import example2_plane
from qdecay.growth import (GrowthCurve, ball_volume, decay_constant, distance_estimate,
                           gauss_bonnet_area, gauss_bonnet_disk, gauss_bonnet_limit,
                           geodesic_trace, growth_curve, growth_integral, lower_decay_check,
                           slow_growth_check, volume_exponent)
from qdecay.profiles import Warp, WarpedProfile


def test_flat_geodesic_is_a_straight_line():
    path = geodesic_trace(flat(2), [0, 0], [0.6, 0.8], 5.0)
    assert np.allclose(path.x[-1], [3.0, 4.0], atol=1e-12)
    assert not path.exited and path.speed_defect < 1e-12


def test_sphere_great_circle_returns():
    S = round_sphere()
    p = np.array([math.pi / 2, 0.0])
    path = geodesic_trace(S, p, [0.0, 1.0], 2 * math.pi)
    assert path.x[-1][0] == pytest.approx(math.pi / 2, abs=1e-8)
    assert (path.x[-1][1] - 2 * math.pi) == pytest.approx(0.0, abs=1e-8)


def test_geodesic_leaving_chart_is_flagged():
    path = geodesic_trace(round_sphere(), [1.0, 0.0], [-1.0, 0.0], 3.0)
    assert path.exited and path.s[-1] < 1.0 + 1e-6


def test_geodesic_needs_unit_speed():
    with pytest.raises(NormalizationError):
        geodesic_trace(flat(2), [0, 0], [1.0, 1.0], 1.0)


def test_shooting_matches_hyperbolic_distance():
    H = hyperbolic_plane()
    m = np.array([0.4, 0.7])
    assert distance_estimate(H, m, "shoot") == pytest.approx(float(H.distance_fn(m)), abs=1e-9)


def test_shooting_from_singular_basepoint_is_refused():
    with pytest.raises(MethodError):
        distance_estimate(polar_plane(), [1.0, 0.5], "shoot")


def test_graph_distance_on_polar_chart():
    d = distance_estimate(polar_plane(), [2.0, 1.0], ["graph"], eps=0.02)
    assert d == pytest.approx(2.0, rel=0.015)


def test_unknown_distance_method():
    with pytest.raises(MethodError):
        distance_estimate(flat(2), [1, 1], "telepathy")


def test_quadrature_disk_volume_is_exact():
    vol, err = ball_volume(polar_plane(), 3.0)
    assert vol == pytest.approx(9 * math.pi, rel=1e-12) and err == 0.0


def test_capped_c_minus_2_has_finite_area():
    # f = t^{-2} beyond t = 1: area beyond is 2 pi (1 - 1/T)
    m = example2_plane(-2.0)
    inner, _ = ball_volume(m, 1.0)
    outer, _ = ball_volume(m, 100.0)
    assert outer - inner == pytest.approx(2 * math.pi * (1 - 1 / 100.0), rel=1e-10)


def test_monte_carlo_disk_volume_and_determinism():
    m = flat(2, half_width=2.5)
    v1, e1 = ball_volume(m, 2.0, method="monte-carlo", samples=80_000, seed=3)
    v2, e2 = ball_volume(m, 2.0, method="monte-carlo", samples=80_000, seed=3)
    assert (v1, e1) == (v2, e2)
    assert abs(v1 - 4 * math.pi) < 4 * e1


def test_growth_curve_exponent_of_flat_plane():
    c = growth_curve(polar_plane(), np.geomspace(1, 100, 20))
    assert volume_exponent(c) == pytest.approx(2.0, abs=1e-10)


def test_decay_flat_is_zero_and_example2_matches_closed_form():
    assert decay_constant(flat(2), [1, 2, 5], r_min=1.0).C == 0.0
    rep = decay_constant(example2_plane(2.0), np.geomspace(10, 1000, 7))
    assert rep.C == pytest.approx(2.0, rel=1e-9) and not rep.divergent


def test_decay_is_deterministic_for_a_seed():
    m = warped_metric(WarpedProfile(Warp.power(2.0), base_dim=2, base_curvature=1.0))
    a = decay_constant(m, [10, 20, 40], seed=7)
    b = decay_constant(m, [10, 20, 40], seed=7)
    assert np.array_equal(a.K, b.K) and a.C == b.C


def test_hyperbolic_decay_diverges():
    rep = decay_constant(hyperbolic_plane(), [1, 2, 4, 8], r_min=1.0)
    assert rep.divergent and rep.slope == pytest.approx(2.0, abs=1e-6)


@given(u=st.floats(0.5, 20.0))
def test_decay_constant_is_scale_invariant(u):
    m = example2_plane(2.0)
    radii = np.geomspace(10, 100, 4)
    a = decay_constant(m, radii).C
    sm = scaled(m, u).with_(distance_fn=lambda p: m.distance_fn(p) / u,
                            sphere_sampler=lambda r, rng, k: m.sphere_sampler(r * u, rng, k))
    b = decay_constant(sm, radii / u, r_min=0.0).C
    assert b == pytest.approx(a, rel=1e-9)


def test_lower_decay_ignores_positive_curvature():
    rep = lower_decay_check(round_sphere(), [0.5, 1.0, 2.0], r_min=0.5)
    assert rep.C == 0.0 and rep.inf_K_d2 > 0


def test_decay_needs_radii_above_minimum():
    with pytest.raises(SampleError):
        decay_constant(flat(2), [1.0, 2.0], r_min=5.0)


def test_slow_growth_flags():
    t = np.geomspace(1, 1e4, 60)
    fast = slow_growth_check(GrowthCurve(2, t, math.pi * t**2, "model"))
    slow = slow_growth_check(GrowthCurve(2, t, t**1.5, "model"))
    assert not fast.slow and slow.slow and slow.witness_slope < 0
    with pytest.raises(RangeError):
        slow_growth_check(GrowthCurve(2, t[:10], t[:10] ** 2, "model"))


def test_growth_integral_of_constant_ratio():
    t = np.geomspace(1, math.e**2, 101)
    assert growth_integral(GrowthCurve(2, t, 3 * t**2, "model")) == pytest.approx(6.0)


@given(c=st.floats(-3.0, 0.9))
def test_gauss_bonnet_boundary_matches_area(c):
    m = example2_plane(c)
    for T in (2.0, 10.0):
        assert gauss_bonnet_disk(m, T) == pytest.approx(gauss_bonnet_area(m, T), abs=1e-4)


def test_gauss_bonnet_limits():
    assert gauss_bonnet_limit(example2_plane(-2.0)).value == pytest.approx(1.0, abs=1e-9)
    assert gauss_bonnet_limit(polar_plane()).value == pytest.approx(0.0, abs=1e-12)
    assert gauss_bonnet_limit(example2_plane(0.5)).value == pytest.approx(1.0, abs=1e-3)


def test_gauss_bonnet_needs_capped_surface():
    with pytest.raises(CapError):
        gauss_bonnet_disk(warped_metric(WarpedProfile(Warp.power(2.0))), 5.0)
    with pytest.raises(ShapeError):
        gauss_bonnet_disk(flat(3), 1.0)
