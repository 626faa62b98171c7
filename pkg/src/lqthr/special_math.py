"""Special functions and panel Gauss-Legendre quadrature for Gaussian expectations.

Every expectation in the threshold computations has the form E f(|h|) or
E f(h) with h standard normal.  The integrands are only piecewise smooth
(the inner maximizer switches regime at known points), so the rule is a
composite Gauss-Legendre rule whose panel edges include those points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import ConfigurationError, DomainError

SQRT_2 = math.sqrt(2.0)
_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _erfinv_initial(y: float) -> float:
    # Giles' single-precision rational approximation (rel. error ~1e-7).
    w = -math.log((1.0 - y) * (1.0 + y))
    if w < 5.0:
        w -= 2.5
        p = 2.81022636e-08
        for c in (3.43273939e-07, -3.5233877e-06, -4.39150654e-06, 0.00021858087,
                  -0.00125372503, -0.00417768164, 0.246640727, 1.50140941):
            p = c + p * w
    else:
        w = math.sqrt(w) - 3.0
        p = -0.000200214257
        for c in (0.000100950558, 0.00134934322, -0.00367342844, 0.00573950773,
                  -0.0076224613, 0.00943887047, 1.00167406, 2.83297682):
            p = c + p * w
    return p * y


def _erfinv_scalar(y: float) -> float:
    if not -1.0 < y < 1.0:
        raise DomainError(f"erfinv requires |y| < 1, got {y!r}")
    if y == 0.0:
        return 0.0
    s = 1.0 if y > 0 else -1.0
    a = abs(y)
    x = _erfinv_initial(a)
    tail = 1.0 - a  # exact for a >= 0.5
    # Halley steps; f'' = -2x f' for both erf and erfc, so the update is
    # x -= f / (f' + x f).  Cubic convergence covers the weak tail guess.
    for _ in range(4):
        d = _TWO_OVER_SQRT_PI * math.exp(-x * x)
        if a > 0.5:
            f, df = math.erfc(x) - tail, -d
        else:
            f, df = math.erf(x) - a, d
        step = f / (df + x * f)
        x -= step
        if abs(step) <= 1e-16 * x:
            break
    return s * x


def erfinv(y):
    """Inverse error function.

    Accepts a scalar or an array; raises :class:`DomainError` when any
    ``|y| >= 1``.  A rational starting guess is polished by Halley steps on
    ``erf`` (on ``erfc`` in the tails, where ``1 - y`` is exact).
    """
    if np.ndim(y) == 0:
        return _erfinv_scalar(float(y))
    arr = np.asarray(y, dtype=float)
    return np.vectorize(_erfinv_scalar, otypes=[float])(arr)


def erf(x):
    """Error function (stdlib ``math.erf`` lifted to arrays)."""
    if np.ndim(x) == 0:
        return math.erf(float(x))
    return np.vectorize(math.erf, otypes=[float])(np.asarray(x, dtype=float))


def normal_pdf(h):
    return _INV_SQRT_2PI * np.exp(-0.5 * np.square(h))


@dataclass(frozen=True)
class QuadratureSpec:
    """Composite Gauss-Legendre rule on ``[0, truncation]``.

    ``node_count`` is the total number of nodes of the uniform part of the
    rule (``node_count // nodes_per_panel`` equal panels).  Every breakpoint
    adds one panel edge, so an integrand with a kink there is still
    integrated at full order.
    """

    node_count: int = 1024
    truncation: float = 8.0
    breakpoints: tuple[float, ...] = field(default=())
    nodes_per_panel: int = 16

    def __post_init__(self):
        if int(self.node_count) != self.node_count or self.node_count < 32:
            raise ConfigurationError(f"node_count must be an integer >= 32, got {self.node_count}")
        if self.nodes_per_panel < 2 or self.node_count % self.nodes_per_panel:
            raise ConfigurationError("node_count must be a multiple of nodes_per_panel (>= 2)")
        if not self.truncation >= 6.0:
            raise ConfigurationError(f"truncation must be >= 6, got {self.truncation}")
        bp = tuple(float(b) for b in self.breakpoints)
        if any(not 0.0 <= b <= self.truncation for b in bp):
            raise ConfigurationError("breakpoints must lie in [0, truncation]")
        if any(b2 <= b1 for b1, b2 in zip(bp, bp[1:])):
            raise ConfigurationError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", bp)

    @property
    def panels(self) -> int:
        return self.node_count // self.nodes_per_panel

    def with_breakpoints(self, *points: float) -> "QuadratureSpec":
        """Return a copy with extra panel edges; points outside (0, truncation) are dropped."""
        pts = [float(p) for p in points if 0.0 < p < self.truncation and math.isfinite(p)]
        merged = tuple(sorted(set(self.breakpoints).union(pts)))
        return QuadratureSpec(self.node_count, self.truncation, merged, self.nodes_per_panel)


@lru_cache(maxsize=16)
def _reference_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(n)
    return x, w


@lru_cache(maxsize=16)
def _uniform_edges(panels: int, truncation: float) -> np.ndarray:
    return np.linspace(0.0, truncation, panels + 1)


def panel_rule(spec: QuadratureSpec, extra_breaks: Sequence[float] = ()) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and plain (Lebesgue) weights on ``[0, truncation]``.

    ``extra_breaks`` are merged into the panel edges without validation,
    which is what the hot paths use to add dual-dependent kinks cheaply.
    """
    edges = _uniform_edges(spec.panels, spec.truncation)
    extra = [b for b in (*spec.breakpoints, *extra_breaks) if 0.0 < b < spec.truncation]
    if extra:
        edges = np.unique(np.concatenate([edges, extra]))
        # merge edges closer than round-off; such panels contribute nothing
        keep = np.concatenate([[True], np.diff(edges) > 1e-13])
        edges = edges[keep]
        edges[-1] = spec.truncation
    x, w = _reference_rule(spec.nodes_per_panel)
    a = edges[:-1, None]
    half = 0.5 * (edges[1:, None] - a)
    nodes = (a + half * (x + 1.0)).ravel()
    weights = (half * w).ravel()
    return nodes, weights


def half_normal_rule(spec: QuadratureSpec, extra_breaks: Sequence[float] = ()) -> tuple[np.ndarray, np.ndarray]:
    """Nodes ``h >= 0`` and weights for ``E f(|h|) = int_0^inf f(h) 2 phi(h) dh``."""
    nodes, weights = panel_rule(spec, extra_breaks)
    return nodes, 2.0 * normal_pdf(nodes) * weights


def half_normal_expectation(f: Callable[[np.ndarray], np.ndarray], spec: QuadratureSpec) -> float:
    """``E f(|h|)`` for standard normal h; ``f`` must accept an array of nodes."""
    nodes, weights = half_normal_rule(spec)
    return float(np.dot(weights, np.asarray(f(nodes), dtype=float)))


def signed_normal_expectation(f: Callable[[np.ndarray], np.ndarray], spec: QuadratureSpec) -> float:
    """``E f(h)`` over ``[-truncation, truncation]``.

    The integral is folded onto the half line, so breakpoints refer to |h|
    and a kink at a negative h is declared through its magnitude.
    """
    nodes, weights = half_normal_rule(spec)
    vals = np.asarray(f(nodes), dtype=float) + np.asarray(f(-nodes), dtype=float)
    return float(0.5 * np.dot(weights, vals))
