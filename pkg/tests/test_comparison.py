from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdecay.comparison import (comparison_params, cosh_inequality_holds, diameter_bound, excess,
                               mean_curvature_bound_check, model_profile, riccati_defect,
                               riccati_profile, toponogov_threshold, volume_comparison_check)
from qdecay.errors import GridError, InputError, MonotonicityError, ParameterError
from qdecay.growth import GrowthCurve


@pytest.mark.parametrize("C,n,alpha,N", [(0, 2, 1, 2), (2, 2, 2, 3), (6, 3, 3, 7)])
def test_growth_exponents(C, n, alpha, N):
    p = comparison_params(C, n)
    assert p.alpha == pytest.approx(alpha) and p.N == pytest.approx(N)


def test_negative_decay_constant_is_rejected():
    with pytest.raises(ParameterError):
        comparison_params(-1.0, 2)


@given(C=st.floats(0, 100), n=st.integers(2, 6))
def test_exponents_are_consistent(C, n):
    p = comparison_params(C, n)
    # alpha solves alpha (alpha - 1) = C and N = (n-1) alpha + 1
    assert p.alpha * (p.alpha - 1) == pytest.approx(C, abs=1e-9 * max(1, C))
    assert p.N == pytest.approx((n - 1) * p.alpha + 1)
    assert p.N >= n


@pytest.mark.parametrize("alpha", [1.0, 2.0, 3.0])
def test_equality_case_has_zero_defect(alpha):
    t = np.geomspace(1, 100, 100_001)
    prof = model_profile(alpha, 2, t)
    assert np.max(np.abs(riccati_defect(prof, prof.ric, 2))) < 1e-7
    check = mean_curvature_bound_check(prof, comparison_params(alpha * (alpha - 1), 2))
    assert check.ok and check.max_violation == 0.0


def test_riccati_profile_of_flat_space_is_one_over_t():
    t = np.linspace(0.5, 10, 50)
    prof = riccati_profile(lambda s: 0.0 * s, 3, t)
    assert np.allclose(prof.Pi, 1 / t, rtol=1e-8)
    assert np.allclose(prof.eta, t**2, rtol=1e-6)


def test_riccati_profile_with_slack_respects_bound():
    # Ric = -(n-1) C/t^2 far out; extra slack keeps Pi below alpha/t
    C = 2.0
    t = np.geomspace(1, 100, 400)
    prof = riccati_profile(lambda s: -C / np.maximum(s, 1.0) ** 2, 2, t, slack=lambda s: 0.1 / (1 + s) ** 2)
    check = mean_curvature_bound_check(prof, comparison_params(C, 2))
    assert check.ok


def test_decreasing_grid_is_rejected():
    with pytest.raises(GridError):
        model_profile(1.0, 2, [2.0, 1.0, 3.0])


def test_flat_volume_comparison():
    t = np.geomspace(1, 100, 200)
    vc = volume_comparison_check(GrowthCurve(2, t, math.pi * t**2, "model"), comparison_params(0, 2))
    assert vc.comparison1_ok and vc.comparison2_ok
    assert vc.annulus_ratio_tail == pytest.approx(4.0, rel=0.02)


def test_volume_comparison_needs_monotone_volumes():
    t = np.geomspace(1, 100, 50)
    with pytest.raises(MonotonicityError):
        volume_comparison_check(GrowthCurve(2, t, 1 / t, "model"), comparison_params(0, 2))


def test_excess_is_zero_on_a_geodesic_and_checks_triangle():
    assert excess(1.0, 2.0, 3.0) == 0.0
    assert excess(2.0, 2.0, 3.0) == pytest.approx(1.0)
    with pytest.raises(InputError):
        excess(1.0, 1.0, 3.0)


def test_toponogov_threshold_value():
    lam = toponogov_threshold()
    assert 2.17 <= lam <= 2.20
    assert abs(math.cosh(3 / lam) - math.cosh(2 / lam) ** 2) < 1e-10


@given(s=st.floats(0.05, 0.999))
def test_cosh_inequality_direction(s):
    lam = toponogov_threshold()
    assert cosh_inequality_holds(lam * s)
    assert not cosh_inequality_holds(lam / s)


def test_diameter_bound_arithmetic():
    assert diameter_bound(100.0, 2.0) == pytest.approx(200.0)
    with pytest.raises(ParameterError):
        diameter_bound(1.0, 0.0)
