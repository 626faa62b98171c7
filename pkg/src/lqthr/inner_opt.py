"""Per-coordinate scalar maximizations.

For a Gaussian coordinate h and dual parameters (nu, gamma) each
coordinate contributes one of

* plus:    max_{t>=0}  |h| t + nu t^q - gamma t^2   (support coordinates)
* minus:   max_{t>=0}  |h| t - nu t^q - gamma t^2   (off-support coordinates)
* shifted: max_w  h w - nu (|x + w|^q - x^q) - gamma w^2   (weak support, |x~_i| = x)

q = 0 uses the indicator convention |w|^0 = 1 for w != 0 and 0^0 = 0.
The array versions used inside the quadrature live in ``_kernels``; the
functions here are the validated scalar entry points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._kernels import minus_kink, minus_values, plus_values, shifted_values
from .errors import DomainError, UnboundedObjectiveError

__all__ = [
    "InnerSolution",
    "coordinate_max_plus",
    "coordinate_max_minus",
    "coordinate_max_shifted",
    "coordinate_max_q0",
    "coordinate_max_q_half",
    "cubic_stationary_q_half",
    "search_bracket",
    "plus_values",
    "minus_values",
    "shifted_values",
    "minus_kink",
]


@dataclass(frozen=True)
class InnerSolution:
    maximizer: float
    value: float


def check_exponent(q: float) -> float:
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"exponent q must lie in [0, 1], got {q}")
    return q


def _check(nu: float, gamma: float, q: float, h_abs: float | None = None) -> None:
    check_exponent(q)
    if not gamma > 0.0:
        raise UnboundedObjectiveError(f"gamma must be positive, got {gamma}")
    if nu < 0.0:
        raise DomainError(f"nu must be nonnegative, got {nu}")
    if h_abs is not None and h_abs < 0.0:
        raise DomainError(f"h_abs must be nonnegative, got {h_abs}")


def search_bracket(h_abs: float, nu: float, gamma: float, q: float) -> float:
    """Upper end of an interval [0, t_max] that contains every maximizer."""
    return h_abs / gamma + (nu / gamma) ** (1.0 / (2.0 - q)) + 1.0


def _one(fn, *args) -> InnerSolution:
    t, v = fn(np.array([args[0]], dtype=float), *args[1:])
    return InnerSolution(float(t[0]), float(v[0]))


def coordinate_max_plus(h_abs: float, nu: float, gamma: float, q: float) -> InnerSolution:
    """Maximize ``h_abs t + nu t^q - gamma t^2`` over ``t >= 0``.

    For 0 < q < 1 and nu > 0 the objective is strictly concave, so the
    maximizer is the unique root of its derivative, which lies in
    ``[max(a, b), a + b]`` with ``a = h/(2 gamma)`` and
    ``b = (q nu / (2 gamma))^(1/(2-q))``.
    """
    _check(nu, gamma, q, h_abs)
    return _one(plus_values, h_abs, nu, gamma, q)


def coordinate_max_minus(h_abs: float, nu: float, gamma: float, q: float) -> InnerSolution:
    """Maximize ``h_abs t - nu t^q - gamma t^2`` over ``t >= 0``.

    Candidates are t = 0 and the larger stationary point.  The larger point
    only beats zero once ``h_abs`` exceeds ``minus_kink(nu, gamma, q)``.
    """
    _check(nu, gamma, q, h_abs)
    return _one(minus_values, h_abs, nu, gamma, q)


def coordinate_max_shifted(h: float, nu: float, gamma: float, q: float, x_mag: float) -> InnerSolution:
    """Maximize ``h w - nu (|x_mag + w|^q - x_mag^q) - gamma w^2`` over signed w.

    Writing u = |x_mag + w| on either side of the kink w = -x_mag turns both
    pieces into the minus problem at |h + 2 gamma x_mag|, offset by
    ``-h x_mag - gamma x_mag^2 + nu x_mag^q``.  With x_mag = 0 this is the
    minus problem at |h|.
    """
    _check(nu, gamma, q)
    if x_mag < 0.0:
        raise DomainError(f"x_mag must be nonnegative, got {x_mag}")
    w, v = shifted_values(np.array([h], dtype=float), nu, gamma, q, x_mag)
    return InnerSolution(float(w[0]), float(v[0]))


def coordinate_max_q0(h_abs: float, nu: float, gamma: float, variant: str) -> InnerSolution:
    """Closed forms for q = 0, where the power term is an indicator of t != 0."""
    _check(nu, gamma, 0.0, h_abs)
    if variant == "plus":
        return InnerSolution(h_abs / (2.0 * gamma), h_abs * h_abs / (4.0 * gamma) + nu)
    if variant == "minus":
        v = h_abs * h_abs / (4.0 * gamma) - nu
        return InnerSolution(h_abs / (2.0 * gamma), v) if v >= 0.0 else InnerSolution(0.0, 0.0)
    raise ValueError(f"variant must be 'plus' or 'minus', got {variant!r}")


def cubic_stationary_q_half(h_abs: float, nu: float, gamma: float, sign: int) -> list[float]:
    """Nonnegative real roots of ``2 gamma s^3 - h_abs s - sign nu / 2 = 0``.

    With s = sqrt(t) this is the stationarity condition of the plus
    (sign=+1) or minus (sign=-1) objective at q = 1/2.  Roots come from the
    trigonometric form when the cubic has three real roots and from
    Cardano's formula otherwise, each followed by one Newton polish.
    """
    if not gamma > 0.0:
        raise UnboundedObjectiveError(f"gamma must be positive, got {gamma}")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    p = -h_abs / (2.0 * gamma)
    r = -sign * nu / (4.0 * gamma)
    disc = r * r / 4.0 + p ** 3 / 27.0
    if p == 0.0:
        roots = [math.copysign(abs(r) ** (1.0 / 3.0), -r)]
    elif disc <= 0.0:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * r / (p * m)
        theta = math.acos(max(-1.0, min(1.0, arg))) / 3.0
        roots = [m * math.cos(theta - 2.0 * math.pi * k / 3.0) for k in range(3)]
    else:
        sq = math.sqrt(disc)
        roots = [np.cbrt(-r / 2.0 + sq) + np.cbrt(-r / 2.0 - sq)]
    out: list[float] = []
    for s in roots:
        f = s ** 3 + p * s + r
        df = 3.0 * s * s + p
        if df != 0.0:
            s -= f / df
        if s >= -1e-12:
            s = max(s, 0.0)
            if not any(abs(s - o) <= 1e-12 * max(1.0, s) for o in out):
                out.append(float(s))
    return sorted(out)


def coordinate_max_q_half(h_abs: float, nu: float, gamma: float, variant: str) -> InnerSolution:
    """q = 1/2 maximizer from the explicit cubic roots plus the endpoint t = 0."""
    _check(nu, gamma, 0.5, h_abs)
    sign = {"plus": 1, "minus": -1}[variant]
    best = InnerSolution(0.0, 0.0)
    for s in cubic_stationary_q_half(h_abs, nu, gamma, sign):
        t = s * s
        v = h_abs * t + sign * nu * s - gamma * t * t
        if v >= best.value:
            best = InnerSolution(t, v)
    return best


def backend() -> str:
    return _kernels.get_backend()
