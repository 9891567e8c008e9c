from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdecay.errors import ParameterError
from qdecay.logspace import LogQuantity, log_sum

val = st.floats(-1e6, 1e6).filter(lambda x: abs(x) > 1e-6)


@given(a=val, b=val)
def test_arithmetic_matches_floats(a, b):
    A, B = LogQuantity.from_value(a), LogQuantity.from_value(b)
    assert float(A * B) == pytest.approx(a * b, rel=1e-12)
    assert float(A / B) == pytest.approx(a / b, rel=1e-12)
    assert float(A + B) == pytest.approx(a + b, rel=1e-9, abs=1e-9 * (abs(a) + abs(b)))
    assert float(A - B) == pytest.approx(a - b, rel=1e-9, abs=1e-9 * (abs(a) + abs(b)))


def test_huge_magnitudes_stay_finite():
    x = LogQuantity.exp(240.0 * 100)   # e^{24000}
    y = x * x / LogQuantity.exp(24000.0)
    assert y.log() == pytest.approx(24000.0)
    assert (x - x).sign == 0


def test_powers_and_signs():
    m = LogQuantity.from_value(-2.0)
    assert float(m**3) == pytest.approx(-8.0)
    assert float(m**2) == pytest.approx(4.0)
    with pytest.raises(ParameterError):
        m**0.5


def test_invalid_states_are_rejected():
    with pytest.raises(ParameterError):
        LogQuantity(0, 1.0)
    with pytest.raises(ParameterError):
        LogQuantity(2, 1.0)
    with pytest.raises(ZeroDivisionError):
        LogQuantity.from_value(1.0) / LogQuantity.zero()
    with pytest.raises(ParameterError):
        LogQuantity.from_value(-1.0).log()


def test_log_sum_of_many_terms():
    s = log_sum([1000.0] * 10)
    assert s.log() == pytest.approx(1000.0 + math.log(10.0))
    assert log_sum([5.0, 5.0], [1, -1]).sign == 0
