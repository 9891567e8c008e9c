from __future__ import annotations

import json
from pathlib import Path

import pytest

from qdecay.cli import main
from qdecay.errors import CapabilityError, ConfigError
from qdecay.scenario import ScenarioConfig, dumps, emit_report, run_scenario

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"


def cfg(**kw):
    return ScenarioConfig.from_dict(kw)


def test_example2_scenario_matches_closed_forms():
    rep = run_scenario(cfg(metric={"name": "example2", "params": {"c": -2}},
                           checks=["decay", "growth", "gauss-bonnet"]))
    assert rep.passed
    assert rep.results["decay"]["C"] == pytest.approx(6.0, rel=1e-9)
    assert rep.results["gauss-bonnet"]["limit"] == pytest.approx(1.0, abs=1e-6)
    assert rep.results["growth"]["vol_last"] < 4 * 3.1416


def test_flat_and_prop3_scenarios():
    assert run_scenario(cfg(metric="flat", checks=["decay"])).results["decay"]["C"] == 0.0
    rep = run_scenario(cfg(metric={"name": "prop3-estimates", "params": {"jmax": 10}},
                           checks=["prop3-estimates"]))
    assert rep.results["prop3-estimates"]["slope"] == pytest.approx(-4.0, abs=1e-6)
    header, rows = rep.curves["prop3"]
    assert header == ["j", "log_vol_Fj", "log_t_lower", "log_ratio"] and len(rows) == 10


@pytest.mark.parametrize("bad", [
    {"metric": "nope", "checks": ["decay"]},
    {"metric": "flat", "checks": []},
    {"metric": "flat", "checks": ["telepathy"]},
    {"metric": "flat", "checks": ["decay"], "sampling": {"radii": [3, 2, 1]}},
    {"metric": "flat", "checks": ["decay"], "sampling": {"radii": [-1, 2]}},
    {"metric": "flat", "checks": ["growth"], "sampling": {"volume_method": "monte-carlo"}},
    {"metric": "flat", "checks": ["decay"], "colour": "blue"},
    {"metric": {"name": "example2", "params": {"k": 2}}, "checks": ["decay"]},
])
def test_invalid_configs_are_config_errors(bad):
    with pytest.raises(ConfigError):
        run_scenario(ScenarioConfig.from_dict(bad))


def test_gauss_bonnet_on_3d_is_a_capability_error():
    with pytest.raises(CapabilityError):
        run_scenario(cfg(metric={"name": "example1", "params": {"c": 2, "base_dim": 2}},
                         checks=["gauss-bonnet"]))


def test_failing_check_is_recorded_not_fatal():
    rep = run_scenario(cfg(metric="polar", checks=["decay", "growth"],
                           sampling={"radii": [1, 2], "r_min": 5}))
    assert "SampleError" in rep.results["decay"]["error"] and not rep.results["decay"]["passed"]
    assert rep.results["growth"]["passed"] and not rep.passed


def test_report_files_are_byte_stable(tmp_path):
    c = cfg(metric={"name": "example2", "params": {"c": 2}}, checks=["decay", "growth"],
            sampling={"seed": 5})
    a = emit_report(run_scenario(c), tmp_path / "a")
    b = emit_report(run_scenario(c), tmp_path / "b")
    names = sorted(p.name for p in a)
    assert names == ["decay.csv", "growth.csv", "report.json", "timing.json"]
    for p in a:
        if p.name != "timing.json":
            assert p.read_bytes() == (tmp_path / "b" / p.name).read_bytes()
    assert (tmp_path / "a" / "growth.csv").read_text().splitlines()[0] == "t,vol,stderr"
    assert (tmp_path / "a" / "decay.csv").read_text().splitlines()[0] == "t,max_abs_K_times_d2"
    assert "wall" not in json.loads((tmp_path / "a" / "report.json").read_text())["results"]


def test_json_is_strict():
    text = dumps({"x": float("inf"), "y": float("nan")})
    assert json.loads(text) == {"x": "inf", "y": "nan"}


@pytest.mark.parametrize("path", sorted(SCENARIOS.glob("*.json")), ids=lambda p: p.stem)
def test_checked_in_scenarios_validate(path):
    ScenarioConfig.load(path)


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["run", str(SCENARIOS / "flat-decay.json"), "--out", str(tmp_path)]) == 0
    assert (tmp_path / "report.json").exists() and (tmp_path / "decay.csv").exists()
    assert main(["run", str(SCENARIOS / "criterion6-hyperbolic.json")]) == 0
    bad = tmp_path / "bad.json"
    bad.write_text('{"metric": "nope", "checks": ["decay"]}')
    assert main(["run", str(bad)]) == 2
    bad.write_text("{not json")
    assert main(["run", str(bad)]) == 2
    assert main(["run", str(SCENARIOS / "criterion6-example2-c2.json"), "--check", "growth"]) == 0
    assert main(["list"]) == 0
    assert "example3" in capsys.readouterr().out


def test_cli_reports_check_failure(tmp_path):
    c = {"metric": {"name": "example2", "params": {"c": 2}}, "checks": ["decay"],
         "expect": {"decay": {"C": [5.0, 6.0]}}}
    p = tmp_path / "c.json"
    p.write_text(json.dumps(c))
    assert main(["run", str(p)]) == 1


def test_cli_seed_override_changes_only_the_seed(tmp_path):
    c = ScenarioConfig.load(SCENARIOS / "example2-c-2.json").with_overrides(seed=11, out=str(tmp_path))
    assert c.seed == 11 and c.output["dir"] == str(tmp_path)
    assert c.checks == ["decay", "growth", "gauss-bonnet"]
