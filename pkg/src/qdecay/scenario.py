"""Scenario configs, the check runner and report emission."""
from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .comparison import comparison_params, volume_comparison_check
from .errors import CapabilityError, ConfigError, QDecayError, ReportIOError
from .gallery.catalog import CATALOG, Prop3Table, build
from .gallery.collapse import CollapseFamily, family_condition_check
from .gallery.lemma31 import Lemma31Report
from .growth import (GrowthCurve, _capped_profile, decay_constant, gauss_bonnet_area,
                     gauss_bonnet_disk, gauss_bonnet_limit, growth_curve, lower_decay_check,
                     slow_growth_check, volume_exponent)
from .metric import ChartedMetric

# dependency order: distances feed decay fits, volumes feed growth and comparison
CHECK_ORDER = ("decay", "lower-decay", "growth", "comparison", "gauss-bonnet",
               "family-condition", "prop3-estimates")

_TOP_KEYS = {"name", "metric", "checks", "sampling", "tolerances", "expect", "output"}
_SAMPLING_KEYS = {"radii", "growth_radii", "comparison_radii", "points_per_radius",
                  "planes_per_point", "r_min", "volume_method", "mc_samples", "mc_tasks", "seed",
                  "exponent_t_min", "ratio_window"}
_TOLERANCE_DEFAULTS = {
    "slow_fraction": 0.1,
    "comparison_rel": 0.05,
    "gauss_bonnet_limit": 1e-3,
    "gauss_bonnet_agreement": 1e-4,
    "gauss_bonnet_T_max": 1e12,
    "family_rel": 0.1,
    "prop3_slope": 1e-3,
    "prop3_quadrature": 1e-9,
}


def _radii(radii_cfg, what: str) -> np.ndarray:
    if isinstance(radii_cfg, dict):
        try:
            lo, hi, count = float(radii_cfg["min"]), float(radii_cfg["max"]), int(radii_cfg["count"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"{what}: expected min, max and count") from exc
        if count < 2:
            raise ConfigError(f"{what}: count must be at least 2")
        if not (0 < lo < hi):
            raise ConfigError(f"{what}: need 0 < min < max")
        out = np.geomspace(lo, hi, count)
    else:
        try:
            out = np.asarray(radii_cfg, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{what}: expected a list of numbers") from exc
        if out.ndim != 1 or out.size == 0:
            raise ConfigError(f"{what}: expected a nonempty list")
    if np.any(~np.isfinite(out)) or np.any(out <= 0):
        raise ConfigError(f"{what}: radii must be positive and finite")
    if np.any(np.diff(out) <= 0):
        raise ConfigError(f"{what}: radii must be strictly increasing")
    return out


@dataclass
class ScenarioConfig:
    name: str
    metric: str
    params: dict
    checks: list[str]
    sampling: dict
    tolerances: dict
    expect: dict
    output: dict
    raw: dict = field(repr=False, default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        if not isinstance(data, dict):
            raise ConfigError("a scenario must be a JSON object")
        extra = set(data) - _TOP_KEYS
        if extra:
            raise ConfigError(f"unknown top-level keys: {sorted(extra)}")
        metric_cfg = data.get("metric")
        if isinstance(metric_cfg, str):
            name, params = metric_cfg, {}
        elif isinstance(metric_cfg, dict) and isinstance(metric_cfg.get("name"), str):
            name, params = metric_cfg["name"], dict(metric_cfg.get("params", {}))
        else:
            raise ConfigError("metric must be a gallery name or {name, params}")
        if name not in CATALOG:
            raise ConfigError(f"unknown gallery name {name!r}; try `qdecay list`")
        checks = data.get("checks")
        if not isinstance(checks, list) or not checks:
            raise ConfigError("checks must be a nonempty list")
        bad = [c for c in checks if c not in CHECK_ORDER]
        if bad:
            raise ConfigError(f"unknown checks {bad}; known: {list(CHECK_ORDER)}")
        sampling = dict(data.get("sampling", {}))
        extra = set(sampling) - _SAMPLING_KEYS
        if extra:
            raise ConfigError(f"unknown sampling keys: {sorted(extra)}")
        tol = dict(data.get("tolerances", {}))
        extra = set(tol) - set(_TOLERANCE_DEFAULTS)
        if extra:
            raise ConfigError(f"unknown tolerance keys: {sorted(extra)}")
        expect = dict(data.get("expect", {}))
        if set(expect) - set(checks):
            raise ConfigError("expectations given for checks that are not requested")
        cfg = cls(str(data.get("name", name)), name, params, list(checks), sampling,
                  {**_TOLERANCE_DEFAULTS, **tol}, expect, dict(data.get("output", {})), data)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> "ScenarioConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read scenario {path}: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
        return cls.from_dict(data)

    def validate(self) -> None:
        s = self.sampling
        for key in ("radii", "growth_radii", "comparison_radii"):
            if key in s:
                _radii(s[key], key)
        for key in ("points_per_radius", "planes_per_point", "mc_samples", "mc_tasks"):
            if key in s and (not isinstance(s[key], int) or s[key] < (0 if key == "planes_per_point" else 1)):
                raise ConfigError(f"{key} must be a positive integer")
        if "seed" in s and (not isinstance(s["seed"], int) or s["seed"] < 0):
            raise ConfigError("seed must be a nonnegative integer")
        method = s.get("volume_method", "auto")
        if method not in ("auto", "quadrature", "monte-carlo"):
            raise ConfigError(f"unknown volume method {method!r}")
        if method == "monte-carlo" and "seed" not in s:
            raise ConfigError("a seed is required when Monte Carlo sampling is requested")
        if "ratio_window" in s:
            w = s["ratio_window"]
            if not (isinstance(w, list) and len(w) == 2 and 0 < w[0] < w[1]):
                raise ConfigError("ratio_window must be [lo, hi] with 0 < lo < hi")

    def with_overrides(self, seed: int | None = None, out: str | None = None,
                       checks: list[str] | None = None) -> "ScenarioConfig":
        data = json.loads(json.dumps(self.raw))
        if seed is not None:
            data.setdefault("sampling", {})["seed"] = int(seed)
        if out is not None:
            data.setdefault("output", {})["dir"] = str(out)
        if checks:
            data["checks"] = list(checks)
            data["expect"] = {k: v for k, v in data.get("expect", {}).items() if k in checks}
        return ScenarioConfig.from_dict(data)

    @property
    def seed(self) -> int:
        return int(self.sampling.get("seed", 0))

    def echo(self) -> dict:
        return {"name": self.name, "metric": {"name": self.metric, "params": self.params},
                "checks": self.checks, "sampling": self.sampling, "tolerances": self.tolerances,
                "expect": self.expect}


@dataclass
class Report:
    config: dict
    results: dict
    provenance: dict
    curves: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.get("passed", False) for r in self.results.values())

    def to_dict(self) -> dict:
        return {"scenario": self.config, "results": self.results,
                "provenance": self.provenance, "passed": self.passed}


# -- JSON/CSV helpers ------------------------------------------------------------

def jsonable(obj: Any) -> Any:
    """Plain JSON values; non-finite floats become strings so output stays strict JSON."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def emit_report(report: Report, out_dir: str | Path, formats=("json", "csv")) -> list[Path]:
    """Write ``report.json``, one CSV per curve or table, and a ``timing.json`` sidecar.

    The main report and the CSVs are byte-stable for identical inputs; wall
    times live only in the sidecar.
    """
    out = Path(out_dir)
    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        if "json" in formats:
            p = out / "report.json"
            p.write_text(dumps(report.to_dict()))
            written.append(p)
            p = out / "timing.json"
            p.write_text(dumps(report.timing))
            written.append(p)
        if "csv" in formats:
            for name, (header, rows) in sorted(report.curves.items()):
                p = out / f"{name}.csv"
                p.write_text(_csv_text(header, rows))
                written.append(p)
    except OSError as exc:
        raise ReportIOError(f"cannot write report to {out}: {exc}") from exc
    return written


# -- checks ----------------------------------------------------------------------

def _in_range(value: float, bounds) -> bool:
    lo, hi = bounds
    return math.isfinite(value) and lo <= value <= hi


def _apply_expect(result: dict, expect: dict) -> None:
    """Compare reported values against ``expect`` entries; ranges are ``[lo, hi]``."""
    outcomes = {}
    for key, want in sorted(expect.items()):
        if key not in result:
            outcomes[key] = {"expected": want, "value": None, "ok": False}
            continue
        got = result[key]
        if isinstance(want, list) and len(want) == 2 and not isinstance(got, (bool, np.bool_)):
            ok = _in_range(float(got), want)
        else:
            ok = got == want
        outcomes[key] = {"expected": want, "value": got, "ok": bool(ok)}
    result["expectations"] = outcomes
    result["passed"] = bool(result["passed"] and all(o["ok"] for o in outcomes.values()))


class _Run:
    def __init__(self, cfg: ScenarioConfig, obj: Any):
        self.cfg = cfg
        self.obj = obj
        self.curves: dict = {}
        self.cache: dict = {}
        s = cfg.sampling
        self.radii = _radii(s["radii"], "radii") if "radii" in s else np.geomspace(10.0, 1e3, 13)

    # shared inputs ------------------------------------------------------
    def metric(self) -> ChartedMetric:
        o = self.obj
        if isinstance(o, ChartedMetric):
            return o
        if isinstance(o, (CollapseFamily, Lemma31Report)):
            return o.metric
        raise CapabilityError(f"{self.cfg.metric} does not provide a metric")

    def _decay_kwargs(self):
        s = self.cfg.sampling
        return dict(planes_per_point=int(s.get("planes_per_point", 4)),
                    points_per_radius=int(s.get("points_per_radius", 8)),
                    seed=self.cfg.seed, r_min=float(s.get("r_min", min(5.0, self.radii[0]))))

    def _volume_method(self, m: ChartedMetric) -> str:
        method = self.cfg.sampling.get("volume_method", "auto")
        if method == "auto":
            method = "quadrature" if m.profile is not None else "monte-carlo"
            if method == "monte-carlo" and "seed" not in self.cfg.sampling:
                raise ConfigError(f"{m.name} needs Monte Carlo volumes; give sampling.seed")
        return method

    def curve(self, key: str = "growth_radii") -> GrowthCurve:
        if key in self.cache:
            return self.cache[key]
        if isinstance(self.obj, GrowthCurve):
            c = self.obj
        else:
            m = self.metric()
            s = self.cfg.sampling
            if key in s:
                radii = _radii(s[key], key)
            elif key == "comparison_radii":
                radii = np.geomspace(1.0, max(float(self.radii[-1]), 4.0), 120)
            else:
                radii = self.radii
            method = self._volume_method(m)
            kw = {}
            if method == "monte-carlo":
                kw = dict(samples=int(s.get("mc_samples", 200_000)), tasks=int(s.get("mc_tasks", 8)),
                          seed=self.cfg.seed)
            c = growth_curve(m, radii, method=method, **kw)
        self.cache[key] = c
        return c

    # individual checks --------------------------------------------------
    def _decay(self, one_sided: bool) -> dict:
        name = "lower_decay" if one_sided else "decay"
        if isinstance(self.obj, Lemma31Report):
            rep = self.obj
            vals = np.maximum(-rep.K_d2, 0.0) if one_sided else np.abs(rep.K_d2)
            self.curves[name] = (["t", "max_neg_K_times_d2" if one_sided else "max_abs_K_times_d2"],
                                 list(zip(rep.radii, vals)))
            C = float(np.max(vals))
            out = {"C": C, "divergent": not rep.stable, "stable": rep.stable, "c_fitted": rep.c_fitted,
                   "distance_bound_ok": rep.distance_bound_ok, "path_bound_ok": rep.path_bound_ok,
                   "method": "conformal transformation law"}
            out["passed"] = bool(math.isfinite(C) and rep.stable and rep.distance_bound_ok)
            self.cache[name] = C
            return out
        m = self.metric()
        kw = self._decay_kwargs()
        rep = lower_decay_check(m, self.radii, **kw) if one_sided else decay_constant(m, self.radii, **kw)
        self.curves[name] = (["t", "max_neg_K_times_d2" if one_sided else "max_abs_K_times_d2"],
                             list(zip(rep.radii, rep.per_radius_max)))
        out = {"C": rep.C, "inf_K_d2": rep.inf_K_d2, "slope": rep.slope, "divergent": rep.divergent,
               "samples": int(rep.K.size), "radii": [float(rep.radii[0]), float(rep.radii[-1])]}
        out["passed"] = bool(math.isfinite(rep.C) and not rep.divergent)
        if "divergent" in self.cfg.expect.get("lower-decay" if one_sided else "decay", {}):
            out["passed"] = bool(math.isfinite(rep.C) or rep.divergent)
        self.cache[name] = rep.C
        return out

    def check_decay(self) -> dict:
        return self._decay(False)

    def check_lower_decay(self) -> dict:
        return self._decay(True)

    def check_growth(self) -> dict:
        c = self.curve()
        s = self.cfg.sampling
        err = c.stderr if c.stderr is not None else np.zeros_like(c.t)
        self.curves["growth"] = (["t", "vol", "stderr"], list(zip(c.t, c.vol, err)))
        r = c.ratios()
        out = {"method": c.method, "n": c.n, "t_range": [float(c.t[0]), float(c.t[-1])],
               "vol_first": float(c.vol[0]), "vol_last": float(c.vol[-1]),
               "ratio_first": float(r[0]), "ratio_last": float(r[-1])}
        t_min = s.get("exponent_t_min")
        out["exponent"] = volume_exponent(c, None if t_min is None else float(t_min))
        lo, hi = s.get("ratio_window", [float(c.t[0]), float(c.t[-1])])
        w = (c.t >= lo) & (c.t <= hi)
        rw = r[w]
        out["ratio_window"] = [float(lo), float(hi)]
        out["ratio_decreasing"] = bool(rw.size > 1 and np.all(np.diff(rw) < 0))
        out["ratio_drop"] = float(rw[0] / rw[-1]) if rw.size > 1 and rw[-1] > 0 else float("nan")
        if c.t[-1] / c.t[0] >= 100.0:
            sg = slow_growth_check(c, float(self.cfg.tolerances["slow_fraction"]))
            out.update(slow=sg.slow, liminf_estimate=sg.liminf_estimate,
                       reference_ratio=sg.reference_ratio, witness_t=sg.witness_t,
                       witness_ratio=sg.witness_ratio, witness_slope=sg.witness_slope,
                       tail_integral=sg.tail_integral)
        monotone = bool(np.all(np.diff(c.vol) >= -3 * (err[1:] + err[:-1])))
        out["volumes_nondecreasing"] = monotone
        out["passed"] = bool(monotone and np.all(np.isfinite(c.vol)) and np.all(c.vol > 0))
        return out

    def check_comparison(self) -> dict:
        C = self.cache.get("lower_decay", self.cache.get("decay"))
        source = "fitted decay"
        if C is None:
            if isinstance(self.obj, GrowthCurve):
                raise CapabilityError("comparison on a bare growth curve needs a decay check first")
            C = lower_decay_check(self.metric(), self.radii, **self._decay_kwargs()).C
            source = "lower decay fit"
        n = self.obj.n if isinstance(self.obj, GrowthCurve) else self.metric().dim
        params = comparison_params(float(C), int(n))
        vc = volume_comparison_check(self.curve("comparison_radii"), params,
                                     float(self.cfg.tolerances["comparison_rel"]))
        return {"C": params.C, "C_source": source, "alpha": params.alpha, "N": params.N,
                "C0_fitted": vc.C0_fitted, "C0_comparison1": vc.C0_comparison1,
                "C0_comparison2": vc.C0_comparison2, "C0_half_grid": vc.C0_half_grid,
                "C0_half_range": vc.C0_half_range, "annulus_ratio_tail": vc.annulus_ratio_tail,
                "comparison1_stable": vc.comparison1_ok, "comparison2_stable": vc.comparison2_ok,
                "passed": bool(vc.comparison1_ok and vc.comparison2_ok)}

    def check_gauss_bonnet(self) -> dict:
        m = self.metric()
        tol = self.cfg.tolerances
        lim = gauss_bonnet_limit(m, T_max=float(tol["gauss_bonnet_T_max"]))
        target = round(lim.value)
        agree = {}
        for T in (2.0, 10.0, 100.0):
            agree[str(T)] = abs(gauss_bonnet_disk(m, T) - gauss_bonnet_area(m, T))
        worst = max(agree.values())
        ok_lim = abs(lim.value - target) <= float(tol["gauss_bonnet_limit"])
        ok_agree = worst <= float(tol["gauss_bonnet_agreement"])
        return {"limit": lim.value, "limit_T": lim.T, "converged": lim.converged, "integer": target,
                "limit_error": abs(lim.value - target), "boundary_vs_area": agree,
                "boundary_vs_area_max": worst, "history": [list(h) for h in lim.history],
                "passed": bool(ok_lim and ok_agree)}

    def check_family_condition(self) -> dict:
        fc = family_condition_check(self.obj.family, rel_tol=float(self.cfg.tolerances["family_rel"]))
        return {"beta": self.obj.beta, "sup_first": fc.sup_first, "sup_second": fc.sup_second,
                "sup_first_extended": fc.sup_first_extended,
                "sup_second_extended": fc.sup_second_extended, "t_range": list(fc.t_range),
                "extended_to": fc.extended_to, "passed": fc.ok}

    def check_prop3_estimates(self) -> dict:
        rows = self.obj.rows()
        self.curves["prop3"] = (["j", "log_vol_Fj", "log_t_lower", "log_ratio"],
                                [(e.j, e.log_vol_Fj.log_abs, e.log_t_lower.log_abs, e.log_ratio)
                                 for e in rows])
        js = np.array([e.j for e in rows if e.j >= 2], dtype=float)
        lr = np.array([e.log_ratio for e in rows if e.j >= 2])
        slope = float(np.polyfit(js, lr, 1)[0]) if js.size >= 2 else float("nan")
        quad_err = max(max(abs(e.quad_log_vol - e.log_vol_Fj.log_abs),
                           abs(e.quad_log_t - e.log_t_lower.log_abs))
                       for e in rows)
        tol = self.cfg.tolerances
        ok = (math.isfinite(slope) and abs(slope + 4.0) <= float(tol["prop3_slope"])
              and quad_err <= float(tol["prop3_quadrature"]))
        return {"jmax": len(rows), "slope": slope, "quadrature_error": quad_err,
                "log_ratio_j1": rows[0].log_ratio, "passed": bool(ok)}


_CAPABLE = {
    "decay": (ChartedMetric, CollapseFamily, Lemma31Report),
    "lower-decay": (ChartedMetric, CollapseFamily, Lemma31Report),
    "growth": (ChartedMetric, CollapseFamily, GrowthCurve),
    "comparison": (ChartedMetric, CollapseFamily, GrowthCurve),
    "gauss-bonnet": (ChartedMetric,),
    "family-condition": (CollapseFamily,),
    "prop3-estimates": (Prop3Table,),
}


def _check_capability(cfg: ScenarioConfig, obj: Any) -> None:
    for check in cfg.checks:
        if not isinstance(obj, _CAPABLE[check]):
            raise CapabilityError(f"check {check!r} does not apply to {cfg.metric}")
        if check == "gauss-bonnet":
            try:
                _capped_profile(obj)
            except QDecayError as exc:
                raise CapabilityError(f"gauss-bonnet needs a capped 2-D surface: {exc}") from exc
        if check in ("decay", "lower-decay") and isinstance(obj, ChartedMetric) and obj.sphere_sampler is None:
            raise CapabilityError(f"{cfg.metric} has no distance-sphere sampler for {check}")


def run_scenario(cfg: ScenarioConfig) -> Report:
    """Build the metric, run the requested checks in dependency order, collect evidence.

    Errors inside a single check are recorded in its result; configuration
    and capability errors abort before any check runs.
    """
    obj = build(cfg.metric, cfg.params)
    _check_capability(cfg, obj)
    run = _Run(cfg, obj)
    results, timing = {}, {}
    for check in CHECK_ORDER:
        if check not in cfg.checks:
            continue
        t0 = time.perf_counter()
        try:
            res = getattr(run, "check_" + check.replace("-", "_"))()
        except ConfigError:
            raise
        except QDecayError as exc:
            res = {"passed": False, "error": f"{type(exc).__name__}: {exc}"}
        if "error" not in res:
            _apply_expect(res, cfg.expect.get(check, {}))
        results[check] = res
        timing[check] = time.perf_counter() - t0
    prov = {"seed": cfg.seed, "radii": run.radii, "tolerances": cfg.tolerances,
            "version": __version__, "wall_time": "timing.json"}
    return Report(cfg.echo(), results, prov, run.curves, timing)
