"""One test per acceptance sub-check, at the tolerance each criterion states.

The suite runs once at import; the per-criterion PASS/FAIL lines are printed
here and again in the terminal summary.
"""
from __future__ import annotations

import subprocess
import sys

import pytest

from qdecay.acceptance import run_acceptance

_REPORT = run_acceptance(seed=0)
for _line in _REPORT.lines():
    print(_line)

_CASES = [(c.number, s) for c in _REPORT.criteria for s in c.checks]


@pytest.mark.parametrize("number,sub", _CASES, ids=[f"c{n}-{s.name}" for n, s in _CASES])
def test_criterion(number, sub):
    assert sub.passed, f"criterion {number} / {sub.name}: {sub.evidence}"


def test_every_criterion_is_covered():
    assert [c.number for c in _REPORT.criteria] == list(range(1, 11))


def test_selftest_command_is_byte_identical(tmp_path):
    outs = []
    for k in range(2):
        d = tmp_path / str(k)
        proc = subprocess.run([sys.executable, "-m", "qdecay.cli", "selftest", "--seed", "0",
                               "--out", str(d)], capture_output=True, text=True, timeout=300)
        assert proc.returncode in (0, 1), proc.stderr
        assert len([ln for ln in proc.stdout.splitlines() if ln.startswith("criterion")]) == 10
        outs.append((d / "selftest.json").read_bytes())
    assert outs[0] == outs[1]
