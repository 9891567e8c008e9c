"""Radial warp functions with closed-form first and second derivatives.

A :class:`Warp` is the triple ``(f, f', f'')`` of vectorized callables. A
:class:`WarpedProfile` pairs a warp with a constant-curvature base, which is
enough to describe ``dt^2 + f(t)^2 h`` (and, with a second warp, the
doubly-warped torus end ``dt^2 + a(t)^2 dx^2 + b(t)^2 dy^2``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ProfileError

Array = np.ndarray


def _psi(x):
    # e^{-1/x} for x > 0, zero otherwise, with its first two derivatives.
    x = np.asarray(x, dtype=float)
    pos = x > 0
    xs = np.where(pos, x, 1.0)
    e = np.where(pos, np.exp(-1.0 / xs), 0.0)
    d1 = np.where(pos, e / xs**2, 0.0)
    d2 = np.where(pos, e * (1.0 / xs**4 - 2.0 / xs**3), 0.0)
    return e, d1, d2


def smoothstep(x):
    """C-infinity step from 0 (x <= 0) to 1 (x >= 1) and its two derivatives.

    Every derivative vanishes at both ends, so gluing with it never creates
    a kink at any order.
    """
    x = np.asarray(x, dtype=float)
    p, p1, p2 = _psi(x)
    q, q1, q2 = _psi(1.0 - x)
    q1, q2 = -q1, q2
    s = p + q
    num1 = p1 * q - p * q1
    chi = p / s
    d1 = num1 / s**2
    d2 = (p2 * q - p * q2) / s**2 - 2.0 * num1 * (p1 + q1) / s**3
    return chi, d1, d2


@dataclass(frozen=True)
class Warp:
    f: Callable[[Array], Array]
    df: Callable[[Array], Array]
    ddf: Callable[[Array], Array]
    label: str = "warp"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.f(t), self.df(t), self.ddf(t)

    def scaled(self, s: float) -> "Warp":
        return Warp(lambda t: s * self.f(t), lambda t: s * self.df(t),
                    lambda t: s * self.ddf(t), f"{s}*{self.label}")

    @classmethod
    def power(cls, c: float, scale: float = 1.0) -> "Warp":
        """``scale * t**c``."""
        return cls(
            lambda t: scale * t**c,
            lambda t: scale * c * t ** (c - 1),
            lambda t: scale * c * (c - 1) * t ** (c - 2),
            f"{scale}*t^{c}",
        )

    @classmethod
    def exponential(cls, rate: float, scale: float = 1.0) -> "Warp":
        return cls(
            lambda t: scale * np.exp(rate * t),
            lambda t: scale * rate * np.exp(rate * t),
            lambda t: scale * rate**2 * np.exp(rate * t),
            f"{scale}*exp({rate}t)",
        )

    @classmethod
    def constant(cls, value: float = 1.0) -> "Warp":
        return cls(
            lambda t: np.full_like(np.asarray(t, dtype=float), value),
            lambda t: np.zeros_like(np.asarray(t, dtype=float)),
            lambda t: np.zeros_like(np.asarray(t, dtype=float)),
            f"{value}",
        )

    @classmethod
    def space_form(cls, K: float) -> "Warp":
        """The warp ``sn_K(t)`` that makes ``dt^2 + sn_K^2 h_round`` a space form."""
        if K > 0:
            r = math.sqrt(K)
            return cls(lambda t: np.sin(r * t) / r, lambda t: np.cos(r * t),
                       lambda t: -r * np.sin(r * t), f"sin_{K}")
        if K < 0:
            r = math.sqrt(-K)
            return cls(lambda t: np.sinh(r * t) / r, lambda t: np.cosh(r * t),
                       lambda t: r * np.sinh(r * t), f"sinh_{K}")
        return cls.power(1.0)

    @classmethod
    def log_collapse(cls, beta: float) -> "Warp":
        """``t**(1 - beta) * log(1 + t)``: collapsing torus factor."""
        p = 1.0 - beta

        def f(t):
            return t**p * np.log1p(t)

        def df(t):
            return p * t ** (p - 1) * np.log1p(t) + t**p / (1 + t)

        def ddf(t):
            return (p * (p - 1) * t ** (p - 2) * np.log1p(t)
                    + 2 * p * t ** (p - 1) / (1 + t) - t**p / (1 + t) ** 2)

        return cls(f, df, ddf, f"t^{p}log(1+t)")

    @classmethod
    def capped_power(cls, c: float, start: float = 0.25, stop: float = 1.0) -> "Warp":
        """Equal to ``t`` on ``[0, start]`` and ``t**c`` on ``[stop, inf)``.

        The blend in between is a smoothstep, so ``dt^2 + f^2 dtheta^2``
        closes up smoothly at ``t = 0``.
        """
        width = stop - start

        def parts(t):
            t = np.asarray(t, dtype=float)
            chi, d1, d2 = smoothstep((t - start) / width)
            tp = np.where(t > 0, t, 1.0)
            g = np.where(t > 0, tp**c, 0.0)
            g1 = np.where(t > 0, c * tp ** (c - 1), 0.0)
            g2 = np.where(t > 0, c * (c - 1) * tp ** (c - 2), 0.0)
            return t, chi, d1 / width, d2 / width**2, g, g1, g2

        def f(t):
            t, chi, _, _, g, _, _ = parts(t)
            return (1 - chi) * t + chi * g

        def df(t):
            t, chi, c1, _, g, g1, _ = parts(t)
            return (1 - chi) + chi * g1 + c1 * (g - t)

        def ddf(t):
            t, chi, c1, c2, g, g1, g2 = parts(t)
            return chi * g2 + 2 * c1 * (g1 - 1) + c2 * (g - t)

        return cls(f, df, ddf, f"cap(t^{c})")


@dataclass(frozen=True)
class WarpedProfile:
    """``dt^2 + f(t)^2 h`` with ``h`` of constant curvature ``base_curvature``.

    With ``second`` set, the profile instead describes the doubly-warped
    torus end ``dt^2 + f^2 dx^2 + second^2 dy^2`` (``base_dim`` must be 2 and
    the base is a flat torus).
    """

    warp: Warp
    base_dim: int = 1
    base_curvature: float = 0.0
    domain: tuple[float, float] = (1.0, math.inf)
    base_volume: float | None = None
    second: Warp | None = None

    def __post_init__(self):
        if self.base_dim < 1:
            raise ProfileError("base dimension must be at least 1")
        if self.second is not None and self.base_dim != 2:
            raise ProfileError("a doubly-warped profile needs a 2-dimensional torus base")

    @property
    def dim(self) -> int:
        return self.base_dim + 1

    def base_measure(self) -> float:
        """Total volume of the base (circle of length 2 pi unless set)."""
        if self.base_volume is not None:
            return self.base_volume
        if self.second is not None:
            return 1.0
        m = self.base_dim
        if m == 1:
            return 2 * math.pi
        if self.base_curvature > 0:
            rho = 1.0 / math.sqrt(self.base_curvature)
            return 2 * math.pi ** ((m + 1) / 2) / math.gamma((m + 1) / 2) * rho**m
        raise ProfileError("non-compact base needs an explicit base_volume")

    def area_element(self, t):
        """Area of the level set ``{t} x base`` per unit base volume."""
        t = np.asarray(t, dtype=float)
        if self.second is not None:
            return self.warp.f(t) * self.second.f(t)
        return self.warp.f(t) ** self.base_dim

    def check_positive(self, t) -> None:
        vals = np.atleast_1d(self.warp.f(np.asarray(t, dtype=float)))
        if self.second is not None:
            vals = np.minimum(vals, np.atleast_1d(self.second.f(np.asarray(t, dtype=float))))
        if np.any(~(vals > 0)):
            raise ProfileError(f"warp must be positive, got min {np.min(vals)!r}")
