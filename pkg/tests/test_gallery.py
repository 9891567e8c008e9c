from __future__ import annotations

import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdecay.errors import (ConfigError, ConstructionError, DomainError, ParameterError,
                           ProfileError)
from qdecay.gallery import (CATALOG, MetricFamily, RadialPotential, build, collapse_exponent,
                            collapse_family, conformal_quadratic_construction, e_block_curvature,
                            e_block_warp, example1_end, example3_growth_model,
                            example3_limit_ratio, family_condition_check, morse_potential,
                            path_integral_bound, prop3_gluing_table, prop3_gradient_flow_bound,
                            prop3_flow_profile, prop3_log_estimates, prop3_potential, u_profile)
from qdecay.growth import decay_constant, growth_curve
from qdecay.profiles import Warp


# -- u profile and blocks ------------------------------------------------------

def test_u_profile_values():
    assert u_profile(0.2) == pytest.approx(0.2)
    assert u_profile(0.7) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        u_profile(1.5)


def test_u_profile_is_monotone_with_bounded_derivatives():
    s = np.linspace(0, 1, 20001)
    u, du, ddu = u_profile(s, derivatives=True)
    assert np.all(np.diff(u) >= -1e-15) and np.all(du >= -1e-12)
    # the blend is steep: max u' is about 7.6 (the stated 3.1 cannot be met, see the ledger)
    assert 7.0 < du.max() < 8.0
    assert np.all(du[s >= 0.5] == 0) and np.all(ddu[s >= 0.5] == 0)


def test_e_block_examples():
    w = e_block_warp(6)
    f, _, _ = w(np.array([1.0, 5.0]))
    assert f[0] == pytest.approx(math.exp(-1)) and f[1] == pytest.approx(math.exp(-6))
    K = e_block_curvature(6, np.array([1.0, 5.0]))
    assert K[0] == pytest.approx(-1.0) and K[1] == pytest.approx(0.0, abs=1e-15)


def test_e_block_curvature_is_uniformly_bounded():
    sups = [np.max(np.abs(e_block_curvature(k, np.linspace(0, k, 4001)))) for k in range(2, 13)]
    assert max(sups) < 120.0


# -- potentials ------------------------------------------------------------------

def test_potentials_and_windows():
    assert prop3_potential(2, 0.0) == 160.0
    assert prop3_potential(2, 1.0, "E1") == 200.0
    odd = morse_potential(3)
    assert odd.window == (210.0, 220.0)
    assert morse_potential(2).value("E3", 0.0) == 80.0
    with pytest.raises(ParameterError):
        morse_potential(2).value("E", 1.0)


def test_gluing_rows_match_potentials():
    rows = prop3_gluing_table(4)
    assert all(r.phi_left == pytest.approx(r.phi_right) for r in rows)
    assert all(r.length_left == r.length_right for r in rows)
    assert [r.phi_left for r in rows[:3]] == [190.0, 530.0, 320.0]


# -- gradient-flow integral ------------------------------------------------------

def test_flow_bound_for_unit_gradient():
    fb = prop3_gradient_flow_bound(lambda u: 1.0, 5.0)
    assert fb.total == pytest.approx(1 - math.exp(-5), rel=1e-9)
    assert fb.D == pytest.approx(1.0) and fb.ok


def test_flow_bound_with_square_root_saddle():
    speed = lambda u: math.sqrt(2 * abs(u - 0.5))
    fb = prop3_gradient_flow_bound(speed, 3.0, critical=[0.5])
    assert fb.ok and fb.total < fb.bound


def test_flow_bound_rejects_non_integrable_vanishing():
    with pytest.raises(ProfileError):
        prop3_gradient_flow_bound(lambda u: abs(u - 0.5), 2.0, critical=[0.5])


@pytest.mark.parametrize("j", [1, 2, 3])
def test_flow_profile_bound_is_uniform(j):
    speed, phi_m, crit = prop3_flow_profile(j)
    fb = prop3_gradient_flow_bound(speed, phi_m, crit)
    assert fb.ok and fb.bound < 3.2


# -- log estimates -----------------------------------------------------------------

def test_log_estimates_first_piece():
    e = prop3_log_estimates(1)
    assert e.log_vol_Fj.log_abs == pytest.approx(952 - math.log(120), abs=1e-9)
    assert e.log_t_lower.log_abs == pytest.approx(320 - math.log(40), abs=1e-9)
    assert e.log_ratio == pytest.approx(-8 + 3 * math.log(40) - math.log(120), abs=1e-9)


@given(j=st.integers(2, 30))
def test_log_ratio_exponent_is_exact(j):
    e = prop3_log_estimates(j)
    assert e.log_ratio + 2 * (2 * j + 2) == pytest.approx(3 * math.log(40) - math.log(120), abs=1e-6)
    assert abs(e.quad_log_vol - e.log_vol_Fj.log_abs) < 1e-9 * e.log_vol_Fj.log_abs


# -- warped ends and the doubling model --------------------------------------------

def test_example1_warns_below_one_and_grows_polynomially():
    with pytest.warns(UserWarning):
        example1_end(0.5)
    m = example1_end(2.0, base_dim=2, base_curvature=1.0)
    # vol(B_t) ~ t^{(n-1) c + 1} = t^5 for n = 3
    c = growth_curve(m, np.geomspace(1e2, 1e4, 5))
    slope = np.polyfit(np.log(c.t), np.log(c.vol), 1)[0]
    assert slope == pytest.approx(5.0, abs=0.05)


def test_example3_ratio_tends_to_one_third():
    c = example3_growth_model(A0=2.0, L=1.0, jmax=10)
    assert c.ratios()[-1] == pytest.approx(example3_limit_ratio(2.0, 1.0), rel=1e-5)
    with pytest.raises(ParameterError):
        example3_growth_model(A0=-1.0)


# -- collapsing ends -------------------------------------------------------------

def test_collapse_exponent():
    assert collapse_exponent(1 / math.sqrt(2)) == pytest.approx(0.5)
    assert collapse_exponent(0.5) == pytest.approx(1.0)
    with pytest.raises(ParameterError):
        collapse_exponent(1.0)


def test_collapse_family_condition_holds():
    fam = collapse_family(1 / math.sqrt(2))
    fc = family_condition_check(fam.family)
    assert fc.ok and math.isfinite(fc.sup_first) and math.isfinite(fc.sup_second)


def test_exponential_family_fails_condition():
    grow = MetricFamily.scalar(np.exp, np.exp, np.exp)
    assert not family_condition_check(grow, t_range=(10.0, 50.0)).ok
    const = MetricFamily.scalar(np.ones_like, np.zeros_like, np.zeros_like)
    fc = family_condition_check(const)
    assert fc.ok and fc.sup_first == 0.0


def test_collapse_metric_has_bounded_decay():
    fam = collapse_family(1 / math.sqrt(2))
    rep = decay_constant(fam.metric, np.geomspace(10, 1000, 7))
    assert math.isfinite(rep.C) and not rep.divergent


# -- conformal construction ------------------------------------------------------

def test_path_integral_bound_at_one():
    assert path_integral_bound(1.0) == pytest.approx(math.e - 1, rel=1e-12)


def test_conformal_construction_on_flat_plane():
    rep = conformal_quadratic_construction()
    assert rep.stable and rep.distance_bound_ok and rep.path_bound_ok
    assert 0 < rep.C_fitted < 1.0


def test_constant_potential_keeps_decay_constant():
    h = Warp.capped_power(2.0)
    rep = conformal_quadratic_construction(h, RadialPotential.constant(-1.0),
                                           radii=np.geomspace(10, 100, 7))
    assert rep.C_fitted == pytest.approx(2.0, rel=1e-9)


def test_generic_decay_agrees_with_conformal_law_at_small_radii():
    t = np.array([2.0, 5.0, 10.0])
    rep = conformal_quadratic_construction(radii=t)
    # the sampler takes g-distances; the report is indexed by h-distance
    d_g = rep.metric.distance_fn(np.stack([t, np.zeros_like(t)], axis=-1))
    generic = decay_constant(rep.metric, d_g, r_min=0.0, planes_per_point=0, points_per_radius=1)
    assert generic.C == pytest.approx(rep.C_fitted, rel=1e-6)


def test_potential_above_distance_is_rejected():
    bad = RadialPotential(lambda t: 2 * t + 1, lambda t: 2.0, lambda t: 0.0, "2t+1")
    with pytest.raises(ConstructionError):
        conformal_quadratic_construction(potential=bad)


# -- catalog -----------------------------------------------------------------------

def test_catalog_builds_every_entry():
    params = {"example1": {"c": 2}, "example2": {"c": 2}}
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        for name in CATALOG:
            assert build(name, params.get(name, {})) is not None


def test_catalog_rejects_unknown_names_and_parameters():
    with pytest.raises(ConfigError):
        build("klein-bottle")
    with pytest.raises(ConfigError):
        build("example2", {"k": 1})
