"""The acceptance suite: ten numbered criteria, each a list of evidenced sub-checks.

Every sub-check carries the numbers it was decided on. Wall times are kept
apart from the evidence so that two runs with one seed serialize identically.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .charts import conformal, flat, hyperbolic_plane, polar_plane, round_sphere, warped_metric
from .comparison import (comparison_params, cosh_inequality_holds, mean_curvature_bound_check,
                         model_profile, riccati_defect, toponogov_threshold,
                         volume_comparison_check)
from .curvature import (conformal_data, conformal_riemann, doubly_warped_sectional, riemann,
                        sectional_batch, warped_sectional)
from .gallery.collapse import collapse_family, family_condition_check
from .gallery.examples import example2_plane, example3_growth_model
from .gallery.prop3 import prop3_log_estimates
from .growth import (GrowthCurve, decay_constant, gauss_bonnet_area, gauss_bonnet_disk,
                     gauss_bonnet_limit, growth_curve, slow_growth_check, volume_exponent)
from .profiles import Warp, WarpedProfile
from .scenario import dumps


@dataclass
class SubCheck:
    name: str
    passed: bool
    evidence: dict


@dataclass
class Criterion:
    number: int
    title: str
    checks: list[SubCheck]
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"number": self.number, "title": self.title, "passed": self.passed,
                "checks": [{"name": c.name, "passed": c.passed, "evidence": c.evidence}
                           for c in self.checks]}


@dataclass
class AcceptanceReport:
    seed: int
    criteria: list[Criterion] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.criteria)

    def to_dict(self) -> dict:
        return {"seed": self.seed, "passed": self.passed,
                "criteria": [c.to_dict() for c in self.criteria]}

    def timing(self) -> dict:
        return {str(c.number): c.seconds for c in self.criteria}

    def lines(self) -> list[str]:
        out = []
        for c in self.criteria:
            failed = [s.name for s in c.checks if not s.passed]
            tail = "" if not failed else "  failing: " + ", ".join(failed)
            out.append(f"criterion {c.number:2d} {'PASS' if c.passed else 'FAIL'}  {c.title}{tail}")
        return out


def _rel(a, b, scale) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)) / np.maximum(np.abs(b), scale)))


# -- 1: oracle agreement -------------------------------------------------------------

def _random_warp(rng: np.random.Generator) -> Warp:
    kind = int(rng.integers(3))
    if kind == 0:
        return Warp.power(float(rng.uniform(-2.0, 3.0)), scale=float(rng.uniform(0.5, 2.0)))
    if kind == 1:
        return Warp.exponential(float(rng.uniform(-1.0, 1.0)), scale=float(rng.uniform(0.5, 2.0)))
    return Warp.log_collapse(float(rng.uniform(0.0, 1.0)))


def _oracle_warped(rng, count: int) -> dict:
    worst = 0.0
    for i in range(count):
        m = int(rng.integers(1, 4))
        K = float(rng.choice([-1.0, 0.0, 1.0])) if m >= 2 else 0.0
        prof = WarpedProfile(_random_warp(rng), base_dim=m, base_curvature=K)
        g = warped_metric(prof)
        if i % 2:
            g = g.with_(derivatives=None)
        t = float(rng.uniform(1.5, 20.0))
        p = np.concatenate([[t], rng.uniform(-0.4, 0.4, m)])
        k_rad, k_tan = warped_sectional(prof, t)
        e = np.eye(m + 1)
        worst = max(worst, _rel(sectional_batch(g, p, e[0], e[1]), k_rad, t**-2))
        if m >= 2:
            worst = max(worst, _rel(sectional_batch(g, p, e[1], e[2]), k_tan, t**-2))
    return {"configs": count, "max_rel_error": worst}


def _oracle_doubly(rng, count: int) -> dict:
    worst = 0.0
    for i in range(count):
        a = _random_warp(rng)
        b = Warp.power(float(rng.uniform(-1.0, 2.0))) if rng.random() < 0.5 else Warp.log_collapse(0.0)
        prof = WarpedProfile(a, base_dim=2, second=b)
        g = warped_metric(prof)
        if i % 2:
            g = g.with_(derivatives=None)
        t = float(rng.uniform(1.5, 20.0))
        p = np.array([t, rng.uniform(0, 1), rng.uniform(0, 1)])
        e = np.eye(3)
        want = doubly_warped_sectional(a, b, t)
        for (i1, i2), k in zip([(0, 1), (0, 2), (1, 2)], want):
            worst = max(worst, _rel(sectional_batch(g, p, e[i1], e[i2]), k, t**-2))
    return {"configs": count, "max_rel_error": worst}


def _random_background(rng, i: int):
    kind = i % 6
    if kind == 0:
        return polar_plane(), np.array([rng.uniform(0.5, 5.0), rng.uniform(0, 2 * math.pi)])
    if kind == 1:
        return round_sphere(), np.array([rng.uniform(0.3, 2.8), rng.uniform(0, 2 * math.pi)])
    if kind == 2:
        return hyperbolic_plane(), rng.uniform(-2.0, 2.0, 2)
    if kind == 3:
        return flat(2), rng.uniform(-2.0, 2.0, 2)
    if kind == 4:
        return flat(3), rng.uniform(-2.0, 2.0, 3)
    prof = WarpedProfile(_random_warp(rng), base_dim=2, base_curvature=float(rng.choice([-1.0, 0.0, 1.0])))
    return warped_metric(prof), np.concatenate([[rng.uniform(1.5, 10.0)], rng.uniform(-0.4, 0.4, 2)])


def _quadratic_potential(rng, n: int, center: np.ndarray):
    c0 = float(rng.uniform(-0.5, 0.5))
    b = rng.uniform(-0.5, 0.5, n)
    A = rng.uniform(-0.5, 0.5, (n, n))
    A = 0.5 * (A + A.T)

    def phi(p):
        y = np.asarray(p, dtype=float) - center
        return c0 + y @ b + 0.5 * np.einsum("...i,ij,...j->...", y, A, y)

    def dphi(p):
        y = np.asarray(p, dtype=float) - center
        return b + y @ A

    def ddphi(p):
        p = np.asarray(p, dtype=float)
        return np.broadcast_to(A, p.shape[:-1] + (n, n)).copy()

    return phi, dphi, ddphi


def _oracle_conformal(rng, count: int) -> dict:
    worst = 0.0
    for i in range(count):
        h, p = _random_background(rng, i)
        phi, dphi, ddphi = _quadratic_potential(rng, h.dim, p + rng.uniform(-0.2, 0.2, h.dim))
        g = conformal(h, phi, dphi, ddphi)
        if (i // 6) % 2:
            g = g.with_(derivatives=None)
        curv_h = riemann(h, p)
        data = conformal_data(h, p, float(phi(p)), dphi(p), ddphi(p))
        want = conformal_riemann(curv_h, curv_h.metric, data).up
        got = riemann(g, p).up
        scale = max(float(np.max(np.abs(want))), 1e-12)
        worst = max(worst, float(np.max(np.abs(got - want))) / scale)
    return {"configs": count, "max_rel_error": worst}


def criterion_1(seed: int) -> list[SubCheck]:
    streams = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(3)]
    t0 = time.perf_counter()
    w = _oracle_warped(streams[0], 120)
    d = _oracle_doubly(streams[1], 120)
    c = _oracle_conformal(streams[2], 120)
    elapsed = time.perf_counter() - t0
    return [
        SubCheck("warped", w["max_rel_error"] <= 1e-6 and w["configs"] >= 100, {**w, "tol": 1e-6}),
        SubCheck("doubly-warped", d["max_rel_error"] <= 1e-6 and d["configs"] >= 100, {**d, "tol": 1e-6}),
        SubCheck("conformal", c["max_rel_error"] <= 1e-5 and c["configs"] >= 100, {**c, "tol": 1e-5}),
        SubCheck("runtime", elapsed < 10.0, {"limit_s": 10.0}),
    ]


# -- 2: sign convention --------------------------------------------------------------

def criterion_2(seed: int) -> list[SubCheck]:
    rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(1)[0])
    S = round_sphere()
    pts = np.stack([rng.uniform(0.2, math.pi - 0.2, 50), rng.uniform(0, 2 * math.pi, 50)], axis=-1)
    Ks = sectional_batch(S, pts, rng.normal(size=(50, 2)), rng.normal(size=(50, 2)))
    H2 = hyperbolic_plane()
    hp = rng.uniform(-3.0, 3.0, (50, 2))
    Kh2 = sectional_batch(H2, hp, rng.normal(size=(50, 2)), rng.normal(size=(50, 2)))
    H3 = warped_metric(WarpedProfile(Warp.space_form(-1.0), base_dim=2, base_curvature=1.0,
                                     domain=(0.0, math.inf)), basepoint_t=0.5)
    h3p = np.concatenate([rng.uniform(0.5, 5.0, (50, 1)), rng.uniform(-1.0, 1.0, (50, 2))], axis=1)
    Kh3 = sectional_batch(H3, h3p, rng.normal(size=(50, 3)), rng.normal(size=(50, 3)))
    es = float(np.max(np.abs(Ks - 1.0)))
    eh = float(max(np.max(np.abs(Kh2 + 1.0)), np.max(np.abs(Kh3 + 1.0))))
    return [SubCheck("sphere", es <= 1e-8, {"max_error": es, "points": 50, "tol": 1e-8}),
            SubCheck("hyperbolic", eh <= 1e-8, {"max_error": eh, "points": 100, "tol": 1e-8})]


# -- 3: equality case of the Riccati comparison ------------------------------------

def criterion_3(seed: int) -> list[SubCheck]:
    t = np.geomspace(1.0, 100.0, 200_001)
    out = []
    for C in (0.0, 2.0, 6.0):
        for n in (2, 3):
            params = comparison_params(C, n)
            prof = model_profile(params.alpha, n, t)
            defect = float(np.max(np.abs(riccati_defect(prof, prof.ric, n))))
            mc = mean_curvature_bound_check(prof, params)
            # area element integrated from Pi (not read off the model)
            log_eta = cumulative_trapezoid((n - 1) * prof.Pi * t, np.log(t), initial=0.0)
            ratio = np.exp(log_eta - (n - 1) * params.alpha * np.log(t))
            spread = float(np.max(ratio) - np.min(ratio))
            ok = defect < 1e-8 and mc.max_violation == 0.0 and spread < 1e-8
            out.append(SubCheck(f"C={C:g},n={n}", ok,
                                {"alpha": params.alpha, "max_defect": defect,
                                 "violation": mc.max_violation, "eta_ratio_spread": spread}))
    return out


# -- 4: volume comparison ------------------------------------------------------------

def criterion_4(seed: int) -> list[SubCheck]:
    t = np.geomspace(1.0, 100.0, 200)
    out = []
    flat_curve = growth_curve(polar_plane(), t)
    vc = volume_comparison_check(flat_curve, comparison_params(0.0, 2))
    ev = {"C0_fitted": vc.C0_fitted, "C0_half_grid": vc.C0_half_grid,
          "C0_half_range": vc.C0_half_range}
    out.append(SubCheck("flat", bool(vc.comparison1_ok and vc.comparison2_ok), ev))
    err = abs(vc.annulus_ratio_tail - 4.0) / 4.0
    out.append(SubCheck("flat-annulus-ratio", err <= 0.02,
                        {"annulus_ratio": vc.annulus_ratio_tail, "rel_error": err, "tol": 0.02}))
    for alpha in (1.0, 2.0, 3.0):
        curve = GrowthCurve(2, t, t ** (alpha + 1) / (alpha + 1), "model")
        vc = volume_comparison_check(curve, comparison_params(alpha * (alpha - 1), 2))
        out.append(SubCheck(f"model-alpha={alpha:g}", bool(vc.comparison1_ok and vc.comparison2_ok),
                            {"C0_fitted": vc.C0_fitted, "C0_half_grid": vc.C0_half_grid,
                             "C0_half_range": vc.C0_half_range}))
    return out


# -- 5: log-space estimates ----------------------------------------------------------

def criterion_5(seed: int) -> list[SubCheck]:
    e1 = prop3_log_estimates(1)
    want_vol = 952.0 - math.log(120.0)
    want_t = 320.0 - math.log(40.0)
    ev = e1.log_vol_Fj.log_abs - want_vol
    et = e1.log_t_lower.log_abs - want_t
    rows = [prop3_log_estimates(j) for j in range(2, 11)]
    slope = float(np.polyfit([r.j for r in rows], [r.log_ratio for r in rows], 1)[0])
    return [
        SubCheck("log-vol-F1", abs(ev) <= 1e-9, {"value": e1.log_vol_Fj.log_abs, "target": want_vol,
                                                 "error": ev}),
        SubCheck("log-t2", abs(et) <= 1e-9, {"value": e1.log_t_lower.log_abs, "target": want_t,
                                             "error": et}),
        SubCheck("slope", abs(slope + 4.0) <= 1e-3, {"slope": slope, "target": -4.0, "tol": 1e-3}),
    ]


# -- 6: decay fitting ----------------------------------------------------------------

def criterion_6(seed: int) -> list[SubCheck]:
    t0 = time.perf_counter()
    radii = np.geomspace(10.0, 1e3, 13)
    rf = decay_constant(flat(2), [1.0, 2.0, 5.0, 10.0], seed=seed, r_min=1.0)
    r2 = decay_constant(example2_plane(2.0), radii, seed=seed)
    rh = decay_constant(hyperbolic_plane(), [1.0, 2.0, 4.0, 8.0, 16.0], seed=seed, r_min=1.0)
    elapsed = time.perf_counter() - t0
    return [
        SubCheck("flat", rf.C == 0.0, {"C": rf.C}),
        SubCheck("example2-c=2", 1.8 <= r2.C <= 2.2 and not r2.divergent,
                 {"C": r2.C, "range": [1.8, 2.2], "slope": r2.slope}),
        SubCheck("hyperbolic-diverges", rh.divergent, {"slope": rh.slope, "C": rh.C}),
        SubCheck("runtime", elapsed < 30.0, {"limit_s": 30.0}),
    ]


# -- 7: Gauss-Bonnet -----------------------------------------------------------------

def criterion_7(seed: int) -> list[SubCheck]:
    out = []
    agree = 0.0
    for c in (-2.0, 0.0, 0.5):
        m = example2_plane(c)
        lim = gauss_bonnet_limit(m)
        out.append(SubCheck(f"c={c:g}", abs(lim.value - 1.0) <= 1e-3,
                            {"limit": lim.value, "T": lim.T, "tol": 1e-3}))
        for T in (2.0, 10.0, 100.0):
            agree = max(agree, abs(gauss_bonnet_disk(m, T) - gauss_bonnet_area(m, T)))
    P = polar_plane()
    lim = gauss_bonnet_limit(P)
    for T in (2.0, 10.0, 100.0):
        agree = max(agree, abs(gauss_bonnet_disk(P, T) - gauss_bonnet_area(P, T)))
    out.append(SubCheck("flat", abs(lim.value) <= 1e-6, {"limit": lim.value, "tol": 1e-6}))
    out.append(SubCheck("boundary-vs-area", agree <= 1e-4, {"max_difference": agree, "tol": 1e-4}))
    return out


# -- 8: collapse family and the doubling model ---------------------------------------

def criterion_8(seed: int) -> list[SubCheck]:
    fam = collapse_family(1.0 / math.sqrt(2.0))
    fc = family_condition_check(fam.family)
    out = [SubCheck("family-suprema", fc.ok,
                    {"sup_first": fc.sup_first, "sup_first_extended": fc.sup_first_extended,
                     "sup_second": fc.sup_second, "sup_second_extended": fc.sup_second_extended,
                     "rel_tol": 0.1})]
    t = np.geomspace(10.0, 1e4, 61)
    r = growth_curve(fam.metric, t).ratios()
    rises = int(np.sum(np.diff(r) >= 0))
    out.append(SubCheck("ratio-decreasing", rises == 0,
                        {"increasing_steps": rises, "ratio_at_10": r[0], "ratio_max": float(np.max(r)),
                         "t_of_max": float(t[np.argmax(r)])}))
    drop = float(r[0] / r[-1])
    out.append(SubCheck("ratio-drop", drop >= 100.0, {"drop": drop, "required": 100.0}))
    long = growth_curve(fam.metric, np.geomspace(10.0, 1e10, 91))
    sg = slow_growth_check(long)
    out.append(SubCheck("collapse-slow", sg.slow,
                        {"liminf_estimate": sg.liminf_estimate, "reference": sg.reference_ratio,
                         "witness_slope": sg.witness_slope, "t_max": 1e10}))
    model = example3_growth_model(jmax=12)
    sm = slow_growth_check(model)
    slope = volume_exponent(model, t_min=16.0)
    out.append(SubCheck("model-not-slow", not sm.slow,
                        {"liminf_estimate": sm.liminf_estimate, "reference": sm.reference_ratio}))
    out.append(SubCheck("model-slope", abs(slope - 2.0) <= 0.01, {"slope": slope, "tol": 0.01}))
    return out


# -- 9: triangle-comparison threshold ------------------------------------------------

def criterion_9(seed: int) -> list[SubCheck]:
    lam = toponogov_threshold()
    res = math.cosh(3.0 / lam) - math.cosh(2.0 / lam) ** 2
    rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(1)[0])
    below = lam * rng.uniform(0.2, 1.0 - 1e-6, 200)
    above = lam * rng.uniform(1.0 + 1e-6, 10.0, 200)
    ok_below = bool(np.all(cosh_inequality_holds(below)))
    ok_above = bool(not np.any(cosh_inequality_holds(above)))
    return [
        SubCheck("threshold", 2.17 <= lam <= 2.20 and abs(res) < 1e-10,
                 {"lambda": lam, "residual": res, "range": [2.17, 2.20]}),
        SubCheck("direction", ok_below and ok_above,
                 {"holds_below": ok_below, "fails_above": ok_above, "samples_each_side": 200}),
    ]


CRITERIA: list[tuple[int, str, Callable[[int], list[SubCheck]]]] = [
    (1, "curvature engine vs closed-form oracles", criterion_1),
    (2, "sign convention", criterion_2),
    (3, "Riccati equality case", criterion_3),
    (4, "volume comparison constants", criterion_4),
    (5, "log-space construction estimates", criterion_5),
    (6, "decay fitting", criterion_6),
    (7, "Gauss-Bonnet integrality", criterion_7),
    (8, "collapse family and doubling model", criterion_8),
    (9, "triangle-comparison threshold", criterion_9),
]


def _run(seed: int) -> list[Criterion]:
    out = []
    for number, title, fn in CRITERIA:
        t0 = time.perf_counter()
        checks = fn(seed)
        out.append(Criterion(number, title, checks, time.perf_counter() - t0))
    return out


def run_acceptance(seed: int = 0, budget_s: float = 300.0) -> AcceptanceReport:
    """Run criteria 1-9, then a second pass to establish criterion 10 (determinism)."""
    t0 = time.perf_counter()
    first = _run(seed)
    second = _run(seed)
    a = dumps([c.to_dict() for c in first])
    b = dumps([c.to_dict() for c in second])
    elapsed = time.perf_counter() - t0
    det = Criterion(10, "determinism and budget", [
        SubCheck("identical-reruns", a == b, {"bytes": len(a.encode())}),
        SubCheck("runtime", elapsed < budget_s, {"limit_s": budget_s}),
    ], elapsed)
    return AcceptanceReport(seed, first + [det])
