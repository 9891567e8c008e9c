"""Signed numbers stored by the natural log of their magnitude."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import ParameterError


@dataclass(frozen=True)
class LogQuantity:
    """``sign * exp(log_abs)``; zero is ``sign == 0`` with ``log_abs == -inf``."""

    sign: int
    log_abs: float

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ParameterError(f"sign must be -1, 0 or 1, got {self.sign}")
        if (self.sign == 0) != (self.log_abs == -math.inf):
            raise ParameterError("sign 0 must pair with log magnitude -inf")
        if math.isnan(self.log_abs) or self.log_abs == math.inf:
            raise ParameterError("log magnitude must be finite or -inf")

    @classmethod
    def zero(cls) -> "LogQuantity":
        return cls(0, -math.inf)

    @classmethod
    def exp(cls, x: float) -> "LogQuantity":
        """The positive number ``e^x``."""
        return cls(1, float(x))

    @classmethod
    def from_value(cls, x: float) -> "LogQuantity":
        if x == 0:
            return cls.zero()
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_abs)

    def _coerce(self, other) -> "LogQuantity":
        return other if isinstance(other, LogQuantity) else LogQuantity.from_value(float(other))

    def __neg__(self) -> "LogQuantity":
        return LogQuantity(-self.sign, self.log_abs)

    def __add__(self, other) -> "LogQuantity":
        other = self._coerce(other)
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        val, sgn = logsumexp([self.log_abs, other.log_abs], b=[self.sign, other.sign],
                             return_sign=True)
        if sgn == 0 or val == -math.inf:
            return LogQuantity.zero()
        return LogQuantity(int(sgn), float(val))

    __radd__ = __add__

    def __sub__(self, other) -> "LogQuantity":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "LogQuantity":
        return self._coerce(other) - self

    def __mul__(self, other) -> "LogQuantity":
        other = self._coerce(other)
        if self.sign == 0 or other.sign == 0:
            return LogQuantity.zero()
        return LogQuantity(self.sign * other.sign, self.log_abs + other.log_abs)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "LogQuantity":
        other = self._coerce(other)
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero log quantity")
        if self.sign == 0:
            return self
        return LogQuantity(self.sign * other.sign, self.log_abs - other.log_abs)

    def __pow__(self, k: float) -> "LogQuantity":
        if self.sign < 0 and not float(k).is_integer():
            raise ParameterError("non-integer power of a negative quantity")
        if self.sign == 0:
            if k <= 0:
                raise ZeroDivisionError("nonpositive power of zero")
            return self
        sign = -1 if (self.sign < 0 and int(k) % 2) else 1
        return LogQuantity(sign, k * self.log_abs)

    def log(self) -> float:
        """Natural log of a positive quantity."""
        if self.sign <= 0:
            raise ParameterError("log of a nonpositive quantity")
        return self.log_abs


def log_sum(logs, signs=None) -> LogQuantity:
    """Sum of ``signs * exp(logs)`` without leaving log space."""
    logs = np.asarray(logs, dtype=float)
    val, sgn = logsumexp(logs, b=signs, return_sign=True)
    if sgn == 0 or val == -math.inf:
        return LogQuantity.zero()
    return LogQuantity(int(sgn), float(val))
