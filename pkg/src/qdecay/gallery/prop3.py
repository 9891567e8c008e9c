"""Profile-level pieces of the quadratic-decay metric on R^3 with slow growth.

The pieces are the cusp blocks ``E(k)``, the piecewise-linear end behaviour
of the Morse potentials, the gradient-flow integral that bounds
``e^{-phi} d_g`` and the log-space volume/distance estimates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

from ..errors import DomainError, ParameterError, ProfileError
from ..logspace import LogQuantity
from ..profiles import Warp, WarpedProfile, smoothstep

LOWER, UPPER = 1.0 / 3.0, 0.5


# -- u profile and E(k) blocks ---------------------------------------------------

def u_profile(s, derivatives: bool = False):
    """Smooth nondecreasing ``u`` with ``u = s`` on ``[0, 1/3]`` and ``u = 1`` on ``[1/2, 1]``.

    Built as ``s + chi(s) (1 - s)`` with a flat-ended smoothstep ``chi`` on
    ``[1/3, 1/2]``; every derivative vanishes at ``s = 1/2``.
    """
    s = np.asarray(s, dtype=float)
    if np.any((s < 0) | (s > 1)):
        raise DomainError("u is defined on [0, 1]")
    w = UPPER - LOWER
    chi, c1, c2 = smoothstep((s - LOWER) / w)
    c1, c2 = c1 / w, c2 / w**2
    u = s + chi * (1 - s)
    if not derivatives:
        return u
    du = 1 - chi + c1 * (1 - s)
    ddu = c2 * (1 - s) - 2 * c1
    return u, du, ddu


def e_block_warp(k: float) -> Warp:
    """``f(r) = exp(-k u(r/k))`` on ``[0, k]``."""
    if k < 1:
        raise ParameterError("block length must be at least 1")

    def parts(r):
        s = np.clip(np.asarray(r, dtype=float) / k, 0.0, 1.0)
        u, du, ddu = u_profile(s, derivatives=True)
        return np.exp(-k * u), du, ddu

    def f(r):
        return parts(r)[0]

    def df(r):
        f, du, _ = parts(r)
        return -du * f

    def ddf(r):
        f, du, ddu = parts(r)
        return (du**2 - ddu / k) * f

    return Warp(f, df, ddf, f"E({k})")


def e_block_profile(k: float) -> WarpedProfile:
    return WarpedProfile(e_block_warp(k), base_dim=1, domain=(0.0, float(k)))


def e_block_curvature(k: float, r) -> np.ndarray:
    """``-f''/f = u''(r/k)/k - u'(r/k)^2`` on the block."""
    s = np.asarray(r, dtype=float) / k
    _, du, ddu = u_profile(s, derivatives=True)
    return ddu / k - du**2


# -- potentials ------------------------------------------------------------------

EVEN_SLOPES = {"E1": 40.0, "E2": 10.0, "E3": -40.0}
EVEN_SHIFT = {"E1": 0.0, "E2": 0.0, "E3": -80.0}
ODD_SLOPE = -10.0


@dataclass(frozen=True)
class MorsePotential:
    """End behaviour of the potential on one piece ``Sigma_i``.

    Even pieces carry a saddle with critical value in ``[offset - 80,
    offset]``; odd pieces carry a maximum with value in ``[offset, offset + 10]``.
    """

    piece: int
    kind: str
    j: int
    offset: float
    slopes: dict
    window: tuple[float, float]
    block_lengths: dict

    def value(self, end: str, distance: float) -> float:
        if distance < 0:
            raise DomainError("distance to the core must be nonnegative")
        if end not in self.slopes:
            raise ParameterError(f"piece {self.piece} has no end {end!r}")
        shift = EVEN_SHIFT.get(end, 0.0) if self.kind == "even" else 0.0
        return self.offset + shift + self.slopes[end] * distance

    def end_value(self, end: str) -> float:
        """Potential on the far boundary circle of the given end block."""
        return self.value(end, self.block_lengths[end])


def morse_potential(piece: int) -> MorsePotential:
    if piece < 1:
        raise ParameterError("piece index must be at least 1")
    j = piece // 2
    if piece % 2 == 0:
        off = 80.0 * j * j + 80.0 * j
        return MorsePotential(piece, "even", j, off, dict(EVEN_SLOPES), (off - 80.0, off),
                              {"E1": 2 * j + 2, "E2": 2 * j + 1, "E3": 2 * j - 2})
    off = 80.0 * j * j + 120.0 * j + 10.0
    return MorsePotential(piece, "odd", j, off, {"E": ODD_SLOPE}, (off, off + 10.0),
                          {"E": 2 * j})


def prop3_potential(piece: int, distance: float, end: str | None = None) -> float:
    """Potential at ``distance`` from the core along the given end of ``Sigma_piece``."""
    pot = morse_potential(piece)
    if end is None:
        end = "E1" if pot.kind == "even" else "E"
    return pot.value(end, distance)


@dataclass(frozen=True)
class Gluing:
    left: tuple[int, str]
    right: tuple[int, str]
    phi_left: float
    phi_right: float
    length_left: float
    length_right: float


def prop3_gluing_table(jmax: int) -> list[Gluing]:
    """Boundary matches between consecutive pieces.

    Each row pairs the far end of one block with the far end of the block it
    is glued to, listing the potential on both sides and the end-circle
    length ``e^{-k}`` of the block against the circle factor length
    ``e^{-i}`` it is identified with.
    """
    rows = []
    for j in range(1, jmax + 1):
        even = morse_potential(2 * j)
        odd = morse_potential(2 * j + 1)
        rows.append(Gluing((2 * j, "E2"), (2 * j + 1, "E"), even.end_value("E2"),
                           odd.end_value("E"), math.exp(-(2 * j + 1)), math.exp(-(2 * j + 1))))
        if j >= 2:
            prev = morse_potential(2 * j - 2)
            rows.append(Gluing((2 * j, "E3"), (2 * j - 2, "E1"), even.end_value("E3"),
                               prev.end_value("E1"), math.exp(-(2 * j - 2)),
                               math.exp(-(2 * j - 2))))
    return rows


# -- gradient-flow integral ------------------------------------------------------

@dataclass(frozen=True)
class FlowBound:
    total: float
    window_max: float
    D: float
    bound: float
    ok: bool
    windows: np.ndarray


def _singular_exponent(speed, u0, side):
    h1, h2 = 1e-6, 1e-9
    a, b = speed(u0 + side * h1), speed(u0 + side * h2)
    if a <= 0 or b <= 0:
        return math.inf
    return math.log(a / b) / math.log(h1 / h2)


def _integral(weight, speed, a, b, crit):
    """``int_a^b weight(u)/speed(u) du`` with square-root substitutions at critical ends."""
    if b <= a:
        return 0.0
    total = 0.0
    inner = sorted(c for c in crit if a < c < b)
    edges = [a] + inner + [b]
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (lo + hi)
        for x0, x1, sgn in ((lo, mid, 1.0), (hi, mid, -1.0)):
            L = abs(x1 - x0)
            if any(abs(x0 - c) < 1e-14 for c in crit):
                # u = x0 + sgn w^2 removes the 1/sqrt singularity. Below the
                # resolution of u the speed is replaced by its sqrt asymptote.
                h = 1e-7 * max(1.0, abs(x0))
                k = speed(x0 + sgn * h) / math.sqrt(h)

                def g(w, x0=x0, sgn=sgn, k=k):
                    u = x0 + sgn * w * w
                    v = speed(u)
                    if abs((u - x0) - sgn * w * w) > 1e-6 * w * w or v <= 0.0:
                        return 2.0 * weight(x0) / k
                    return 2.0 * w * weight(u) / v

                total += quad(g, 0.0, math.sqrt(L), epsabs=1e-12, epsrel=1e-10, limit=1000)[0]
            else:
                s, e = (x0, x1) if sgn > 0 else (x1, x0)
                total += quad(lambda u: weight(u) / speed(u), s, e, epsabs=1e-13,
                              epsrel=1e-10, limit=1000)[0]
    return total


def prop3_gradient_flow_bound(speed: Callable[[float], float], phi_m: float,
                              critical: Sequence[float] = (), D_window: float | None = None,
                              window_step: float = 0.05) -> FlowBound:
    """Bound ``int_0^phi_m e^{-u} du / |grad phi|`` by its unit-window maximum.

    ``speed(u)`` is ``|grad phi|`` at the point where ``u = phi(m) -
    phi(gamma)``. It may vanish at the ``critical`` values, but only like
    ``sqrt|u - u0|``; anything flatter is not integrable and is rejected.
    ``D`` is ``D_window`` when given, otherwise the largest window integral.
    """
    if phi_m <= 0:
        raise ParameterError("phi(m) must be positive")
    crit = sorted(float(c) for c in critical if 0.0 <= c <= phi_m)
    for c in crit:
        for side in (-1.0, 1.0):
            if (side < 0 and c <= 0.0) or (side > 0 and c >= phi_m):
                continue
            p = _singular_exponent(speed, c, side)
            if p >= 1.0 - 1e-3:
                raise ProfileError(f"|grad phi| vanishes like |u - {c}|^{p:.3f}; not integrable")
    grid = np.linspace(0.0, phi_m, 2001)
    regular = grid[[all(abs(u - c) > 1e-9 for c in crit) for u in grid]]
    if np.any(np.array([speed(u) for u in regular]) <= 0):
        raise ProfileError("|grad phi| vanishes away from the declared critical values")
    total = _integral(lambda u: math.exp(-u), speed, 0.0, phi_m, crit)
    starts = np.arange(0.0, max(phi_m - 1.0, 0.0) + 1e-12, window_step)
    if starts.size == 0:
        starts = np.array([0.0])
    windows = np.array([_integral(lambda u: 1.0, speed, x, min(x + 1.0, phi_m), crit)
                        for x in starts])
    wmax = float(windows.max())
    D = float(D_window) if D_window is not None else wmax
    bound = D / (1.0 - math.exp(-1.0))
    ok = total <= bound * (1 + 1e-12) and wmax <= D * (1 + 1e-12)
    return FlowBound(float(total), wmax, D, bound, bool(ok), windows)


def prop3_flow_profile(j: int, start_distance: float = 1.0, slope: float = 40.0):
    """Speed profile along the downward flow line from ``E1`` of ``Sigma_{2j}``.

    Each saddle ``c_k`` (``k <= j``) sits at the centre of its value window
    and is modelled as a unit-scale quadratic saddle, so ``|grad phi| =
    min(slope, sqrt(2 |phi - c_k|))`` near it. Returns ``(speed, phi_m,
    critical)`` in the ``u = phi(m) - phi`` variable.
    """
    if j < 1:
        raise ParameterError("j must be at least 1")
    phi_m = prop3_potential(2 * j, start_distance, "E1")
    saddles = [80.0 * k * k + 80.0 * k - 40.0 for k in range(1, j + 1)]
    crit = sorted(phi_m - c for c in saddles)

    def speed(u):
        return min(slope, min(math.sqrt(2.0 * abs(u - c)) for c in crit))

    return speed, phi_m, crit


# -- log-space estimates ---------------------------------------------------------

@dataclass(frozen=True)
class Prop3Estimates:
    j: int
    log_vol_Fj: LogQuantity
    log_t_lower: LogQuantity
    log_ratio: float
    quad_log_vol: float
    quad_log_t: float
    predicted_ratio: float

    @property
    def ratio_correction(self) -> float:
        return self.log_ratio - self.predicted_ratio


def _log1mexp(x: float) -> float:
    """``log(1 - e^{-x})`` for ``x > 0``."""
    return math.log(-math.expm1(-x)) if x < 0.693 else math.log1p(-math.exp(-x))


def _log_quad(rate: float, a: float, b: float) -> float:
    """``log int_a^b e^{rate x} dx`` by quadrature of the rescaled integrand."""
    peak = rate * b
    val = quad(lambda x: math.exp(rate * x - peak), a, b, epsabs=0.0, epsrel=1e-13, limit=200)[0]
    return peak + math.log(val)


def prop3_log_estimates(j: int) -> Prop3Estimates:
    """``log vol(F_j)``, the lower bound for ``log t_{j+1}`` and their ratio ``vol/t^3``.

    ``vol(F_j) = int_{j+2}^{2j+2} e^{3(80j^2+80j+40x)} e^{-2(2j+2)} dx`` and
    ``t_{j+1} >= int_{j+2}^{2j+2} e^{80j^2+80j+40x} dx``, both evaluated from
    the antiderivative in log space and re-checked by quadrature.
    """
    if j < 1:
        raise ParameterError("j must be at least 1")
    base = 80.0 * j * j + 80.0 * j
    a, b = j + 2.0, 2.0 * j + 2.0
    width = b - a
    # 3(base + 40 b) = 240 j^2 + 480 j + 240
    log_vol = 3 * (base + 40 * b) - 2 * (2 * j + 2) - math.log(120.0) + _log1mexp(120.0 * width)
    log_t = base + 40 * b - math.log(40.0) + _log1mexp(40.0 * width)
    q_vol = 3 * base - 2 * (2 * j + 2) + _log_quad(120.0, a, b)
    q_t = base + _log_quad(40.0, a, b)
    ratio = log_vol - 3 * log_t
    predicted = -2.0 * (2 * j + 2) + 3 * math.log(40.0) - math.log(120.0)
    return Prop3Estimates(j, LogQuantity.exp(log_vol), LogQuantity.exp(log_t), ratio,
                          q_vol, q_t, predicted)
