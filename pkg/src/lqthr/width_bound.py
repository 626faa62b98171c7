"""Gaussian-width upper bounds and the threshold curves they imply.

For each threshold kind the normalized width of the failure set is bounded
by a convex function of the scaled dual parameters (nu, gamma):

    sectional:  beta I1 + (1 - beta) I2 + gamma
    strong:     I1 + I2 + gamma          (I1 over |h| >= c_nu, I2 below)
    weak:       beta I1 + (1 - beta) I2 + gamma, maximized over x~

Minimizing over the duals and equating the bound with sqrt(alpha) gives
the point (beta, alpha) on the curve.
"""

from __future__ import annotations

import enum
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import brentq, minimize, minimize_scalar

from ._kernels import minus_kink, minus_values, plus_values, shifted_values
from .errors import DomainError, LqthrError, OptimizationFailure, RangeError
from .inner_opt import check_exponent
from .special_math import SQRT_2, QuadratureSpec, erfinv, half_normal_rule

log = logging.getLogger(__name__)

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)


class ThresholdKind(str, enum.Enum):
    SECTIONAL = "sectional"
    STRONG = "strong"
    WEAK = "weak"


@dataclass(frozen=True)
class DualParams:
    nu: float
    gamma: float

    def __post_init__(self):
        if self.nu < 0.0:
            raise DomainError(f"nu must be nonnegative, got {self.nu}")
        if self.gamma < GAMMA_MIN:
            raise DomainError(f"gamma must be >= {GAMMA_MIN}, got {self.gamma}")


@dataclass(frozen=True)
class ExpectationPair:
    i1: float
    i2: float


@dataclass(frozen=True)
class StrongRegionSplit:
    """Magnitude quantile c_nu with P(|h| >= c_nu) = beta."""

    c_nu: float

    @classmethod
    def from_beta(cls, beta: float) -> "StrongRegionSplit":
        if not 0.0 < beta < 1.0:
            raise DomainError(f"beta must lie in (0, 1), got {beta}")
        return cls(SQRT_2 * erfinv(1.0 - beta))


@dataclass(frozen=True)
class WeakSignal:
    x_mag: float

    def __post_init__(self):
        if self.x_mag < 0.0:
            raise DomainError(f"x_mag must be nonnegative, got {self.x_mag}")


@dataclass(frozen=True)
class MeshWidthEstimate:
    normalized_width: float


@dataclass(frozen=True)
class DualBox:
    nu_max: float = 50.0
    gamma_min: float = 1e-6
    gamma_max: float = 5.0


GAMMA_MIN = 1e-6
DEFAULT_BOX = DualBox()


@dataclass
class CurvePoint:
    beta: float
    alpha: float
    duals: DualParams | None
    x_mag: float | None = None
    objective: float = math.nan
    vacuous: bool = False
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _kind(kind) -> ThresholdKind:
    return kind if isinstance(kind, ThresholdKind) else ThresholdKind(str(kind))


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not 0.0 < beta < 1.0:
        raise DomainError(f"beta must lie in (0, 1), got {beta}")
    return beta


# ---------------------------------------------------------------------------
# expectations
# ---------------------------------------------------------------------------


def _sectional_pair(nu, gamma, q, spec):
    h, wts = half_normal_rule(spec, (minus_kink(nu, gamma, q),))
    _, vp = plus_values(h, nu, gamma, q)
    _, vm = minus_values(h, nu, gamma, q)
    return float(wts @ vp), float(wts @ vm)


def _strong_pair(nu, gamma, q, c_nu, spec):
    h, wts = half_normal_rule(spec, (c_nu, minus_kink(nu, gamma, q)))
    upper = h >= c_nu
    _, vp = plus_values(h[upper], nu, gamma, q)
    _, vm = minus_values(h[~upper], nu, gamma, q)
    return float(wts[upper] @ vp), float(wts[~upper] @ vm)


def _weak_pair(nu, gamma, q, x, spec):
    h0 = minus_kink(nu, gamma, q)
    shift = 2.0 * gamma * x
    # the shifted value has kinks where |h + 2 gamma x| = h0; folded to |h|
    h, wts = half_normal_rule(spec, (h0, abs(shift - h0), shift + h0))
    _, vpos = shifted_values(h, nu, gamma, q, x)
    _, vneg = shifted_values(-h, nu, gamma, q, x)
    _, vm = minus_values(h, nu, gamma, q)
    return float(0.5 * (wts @ (vpos + vneg))), float(wts @ vm)


def expectations_sectional(duals: DualParams, q: float, spec: QuadratureSpec = QuadratureSpec()) -> ExpectationPair:
    check_exponent(q)
    return ExpectationPair(*_sectional_pair(duals.nu, duals.gamma, q, spec))


def expectations_strong(duals: DualParams, q: float, split: StrongRegionSplit,
                        spec: QuadratureSpec = QuadratureSpec()) -> ExpectationPair:
    """Region-restricted expectations; densities are not renormalized."""
    check_exponent(q)
    return ExpectationPair(*_strong_pair(duals.nu, duals.gamma, q, split.c_nu, spec))


def expectations_weak(duals: DualParams, q: float, signal: WeakSignal,
                      spec: QuadratureSpec = QuadratureSpec()) -> ExpectationPair:
    """I1 over signed h with the shifted maximizer, I2 over |h| with the minus one."""
    check_exponent(q)
    return ExpectationPair(*_weak_pair(duals.nu, duals.gamma, q, signal.x_mag, spec))


# ---------------------------------------------------------------------------
# objectives
# ---------------------------------------------------------------------------


def make_objective(kind, beta: float, q: float, spec: QuadratureSpec = QuadratureSpec(),
                   x_mag: float | None = None) -> Callable[[float, float], float]:
    """Return ``f(nu, gamma)``, the width bound for fixed kind, beta, q (and x~)."""
    kind = _kind(kind)
    beta = _check_beta(beta)
    q = check_exponent(q)
    if kind is ThresholdKind.SECTIONAL:
        def f(nu, gamma):
            i1, i2 = _sectional_pair(nu, gamma, q, spec)
            return beta * i1 + (1.0 - beta) * i2 + gamma
    elif kind is ThresholdKind.STRONG:
        c_nu = StrongRegionSplit.from_beta(beta).c_nu
        spec = spec.with_breakpoints(c_nu)

        def f(nu, gamma):
            i1, i2 = _strong_pair(nu, gamma, q, c_nu, spec)
            return i1 + i2 + gamma
    else:
        if x_mag is None:
            raise ValueError("weak objective needs x_mag")
        x = WeakSignal(float(x_mag)).x_mag

        def f(nu, gamma):
            i1, i2 = _weak_pair(nu, gamma, q, x, spec)
            return beta * i1 + (1.0 - beta) * i2 + gamma
    return f


def objective_sectional(beta: float, q: float, duals: DualParams, spec: QuadratureSpec = QuadratureSpec()) -> float:
    return make_objective(ThresholdKind.SECTIONAL, beta, q, spec)(duals.nu, duals.gamma)


def objective_strong(beta: float, q: float, duals: DualParams, spec: QuadratureSpec = QuadratureSpec()) -> float:
    return make_objective(ThresholdKind.STRONG, beta, q, spec)(duals.nu, duals.gamma)


def objective_weak(beta: float, q: float, duals: DualParams, signal: WeakSignal,
                   spec: QuadratureSpec = QuadratureSpec()) -> float:
    return make_objective(ThresholdKind.WEAK, beta, q, spec, signal.x_mag)(duals.nu, duals.gamma)


# ---------------------------------------------------------------------------
# dual minimization
# ---------------------------------------------------------------------------

_DIVERGED = 1e6


def dual_pregrid(f: Callable[[float, float], float], box: DualBox = DEFAULT_BOX, size: int = 8) -> tuple[DualParams, float]:
    """Best point of a log-spaced ``size x size`` grid over the dual box."""
    best, best_val = None, math.inf
    for nu in np.geomspace(1e-2, box.nu_max, size):
        for gamma in np.geomspace(2e-2, box.gamma_max, size):
            v = f(float(nu), float(gamma))
            if v < best_val:
                best, best_val = DualParams(float(nu), float(gamma)), v
    return best, best_val


def _simplex(x0: np.ndarray, box: DualBox) -> np.ndarray:
    lo = np.array([0.0, box.gamma_min])
    hi = np.array([box.nu_max, box.gamma_max])
    steps = np.array([max(0.1 * x0[0], 0.05), max(0.1 * x0[1], 0.02)])
    pts = [x0]
    for j in range(2):
        p = x0.copy()
        p[j] = p[j] + steps[j] if p[j] + steps[j] <= hi[j] else p[j] - steps[j]
        pts.append(np.clip(p, lo, hi))
    return np.array(pts)


def minimize_duals(kind, beta: float, q: float, spec: QuadratureSpec = QuadratureSpec(),
                   starts: Sequence[DualParams] = (), signal: WeakSignal | None = None,
                   box: DualBox = DEFAULT_BOX, fixed_nu: float | None = None,
                   restarts: int = 3, objective: Callable[[float, float], float] | None = None,
                   ) -> tuple[DualParams, float]:
    """Minimize the width bound over (nu, gamma) in the box.

    Each start seeds a bounded Nelder-Mead run that is restarted
    ``restarts`` times from its own optimum with a fresh simplex.  The
    objective is convex in the duals, so restarts only guard against
    simplex collapse.  With no starts the best pre-grid point is used.
    ``fixed_nu`` restricts the search to the gamma axis.
    """
    kind = _kind(kind)
    x_mag = signal.x_mag if signal is not None else None
    f = objective or make_objective(kind, beta, q, spec, x_mag)

    if fixed_nu is not None:
        res = minimize_scalar(lambda g: f(fixed_nu, g), bounds=(box.gamma_min, box.gamma_max),
                              method="bounded", options={"xatol": 1e-10})
        if not np.isfinite(res.fun) or res.fun >= _DIVERGED:
            raise OptimizationFailure("gamma search diverged")
        return DualParams(float(fixed_nu), float(res.x)), float(res.fun)

    if not starts:
        grid_best, _ = dual_pregrid(f, box)
        starts = [grid_best]

    bounds = [(0.0, box.nu_max), (box.gamma_min, box.gamma_max)]

    def fun(p):
        return f(float(p[0]), float(p[1]))

    best_x, best_val = None, math.inf
    for s in starts:
        x = np.clip([s.nu, s.gamma], [0.0, box.gamma_min], [box.nu_max, box.gamma_max]).astype(float)
        val = fun(x)
        if val < best_val:
            best_x, best_val = x.copy(), val
        for _ in range(1 + restarts):
            res = minimize(fun, x, method="Nelder-Mead", bounds=bounds,
                           options={"initial_simplex": _simplex(x, box), "xatol": 1e-7,
                                    "fatol": 1e-10, "maxfev": 4000})
            improved = res.fun < val - 1e-12
            if res.fun < val:
                x, val = np.asarray(res.x, dtype=float), float(res.fun)
            if val < best_val:
                best_x, best_val = x.copy(), val
            if not improved:
                break
    if best_x is None or not np.isfinite(best_val) or best_val >= _DIVERGED:
        raise OptimizationFailure(f"dual minimization diverged (best value {best_val})")
    return DualParams(float(best_x[0]), float(best_x[1])), float(best_val)


# ---------------------------------------------------------------------------
# curve points
# ---------------------------------------------------------------------------

X_MAX = 12.0
X_STEP = 0.25


def _point(beta, value, duals, x_mag=None) -> CurvePoint:
    alpha = value * value
    vacuous = value > 1.0
    return CurvePoint(beta=beta, alpha=min(alpha, 1.0), duals=duals, x_mag=x_mag,
                      objective=value, vacuous=vacuous)


def _golden_max(g: Callable[[float], float], a: float, b: float, tol: float) -> tuple[float, float]:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    gc, gd = g(c), g(d)
    while b - a > tol:
        if gc >= gd:
            b, d, gd = d, c, gc
            c = b - invphi * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + invphi * (b - a)
            gd = g(d)
    return (c, gc) if gc >= gd else (d, gd)


def weak_max_over_signal(beta: float, q: float, spec: QuadratureSpec = QuadratureSpec(),
                         x_max: float = X_MAX, x_step: float = X_STEP, x_tol: float = 1e-3,
                         starts: Sequence[DualParams] = (), box: DualBox = DEFAULT_BOX,
                         ) -> tuple[float, DualParams, float]:
    """max over x~ of min over duals; returns (x_mag, duals, value).

    A grid scan over [0, x_max] (walked downward, each dual search
    warm-started from its neighbour) locates the best cell, which is then
    refined by golden-section search.
    """
    cache: dict[float, tuple[DualParams, float]] = {}
    warm = list(starts)

    def inner(x: float) -> float:
        key = round(x, 12)
        if key not in cache:
            seed = warm[-1:] if warm else []
            duals, val = minimize_duals(ThresholdKind.WEAK, beta, q, spec, starts=seed + list(starts),
                                        signal=WeakSignal(x), box=box)
            cache[key] = (duals, val)
            warm.append(duals)
        return cache[key][1]

    grid = np.arange(0.0, x_max + 0.5 * x_step, x_step)[::-1]
    vals = [inner(float(x)) for x in grid]
    i = int(np.argmax(vals))
    xb = float(grid[i])
    lo, hi = max(0.0, xb - x_step), min(x_max, xb + x_step)
    warm.append(cache[round(xb, 12)][0])
    xr, vr = _golden_max(inner, lo, hi, x_tol)
    if vr < vals[i]:
        xr, vr = xb, vals[i]
    return xr, cache[round(xr, 12)][0], vr


def alpha_for_beta(kind, beta: float, q: float, spec: QuadratureSpec = QuadratureSpec(),
                   starts: Sequence[DualParams] = (), box: DualBox = DEFAULT_BOX) -> CurvePoint:
    """Curve point at ``beta``: alpha = (minimized width bound)^2, clamped to 1."""
    kind = _kind(kind)
    beta = _check_beta(beta)
    q = check_exponent(q)
    if kind is ThresholdKind.WEAK:
        x, duals, val = weak_max_over_signal(beta, q, spec, starts=starts, box=box)
        return _point(beta, val, duals, x)
    f = make_objective(kind, beta, q, spec)
    grid_best, _ = dual_pregrid(f, box)
    duals, val = minimize_duals(kind, beta, q, spec, starts=[grid_best, *starts], box=box, objective=f)
    return _point(beta, val, duals)


DEFAULT_BETA_BRACKET = (0.001, 0.05, 0.15, 0.3, 0.6, 0.999)


def beta_for_alpha(kind, alpha: float, q: float, spec: QuadratureSpec = QuadratureSpec(),
                   grid: Sequence[float] = DEFAULT_BETA_BRACKET, tol: float = 1e-4) -> float:
    """Invert the curve: the beta whose curve point has the requested alpha."""
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    cache: dict[float, float] = {}

    def a_of(b: float) -> float:
        if b not in cache:
            cache[b] = alpha_for_beta(kind, b, q, spec).alpha
        return cache[b]

    grid = sorted(grid)
    values = [a_of(b) for b in grid]
    if any(v2 < v1 - 1e-6 for v1, v2 in zip(values, values[1:])):
        raise RangeError(f"curve is not monotone on the bracketing grid: {values}")
    if alpha < values[0] - tol or alpha > values[-1] + tol:
        raise RangeError(f"alpha={alpha} outside achievable range [{values[0]:.4g}, {values[-1]:.4g}]")
    if abs(values[0] - alpha) <= tol:
        return grid[0]
    j = next(i for i, v in enumerate(values) if v >= alpha)
    lo, hi = grid[j - 1], grid[j]
    if abs(values[j] - alpha) <= tol and values[j - 1] < alpha - tol:
        # plateau at alpha = 1: report the left end of the flat stretch
        if alpha < 1.0 - tol:
            return hi
    beta = brentq(lambda b: a_of(b) - alpha, lo, hi, xtol=1e-7, rtol=1e-10)
    if abs(a_of(beta) - alpha) > tol:
        raise RangeError(f"could not reach alpha={alpha} within {tol} (got {a_of(beta)})")
    return float(beta)


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def _q0_domain(beta: float) -> float:
    beta = float(beta)
    if not 0.0 < beta <= 0.5:
        raise DomainError(f"beta must lie in (0, 0.5], got {beta}")
    return beta


def sectional_alpha_q0(beta: float) -> float:
    """Sectional curve at q = 0: top beta/(1-beta) tail of the off-support |h|^2 plus the support mass.

    ``u = erfinv((1 - 2 beta) / (1 - beta))`` and
    ``alpha = 2 beta + (1 - beta) (2/sqrt(pi)) u exp(-u^2)``.
    """
    beta = _q0_domain(beta)
    u = erfinv((1.0 - 2.0 * beta) / (1.0 - beta))
    return 2.0 * beta + (1.0 - beta) * _TWO_OVER_SQRT_PI * u * math.exp(-u * u)


def strong_alpha_q0(beta: float) -> float:
    """Strong curve at q = 0: ``2 beta + (2/sqrt(pi)) u exp(-u^2)`` with ``u = erfinv(1 - 2 beta)``."""
    beta = _q0_domain(beta)
    u = erfinv(1.0 - 2.0 * beta)
    return 2.0 * beta + _TWO_OVER_SQRT_PI * u * math.exp(-u * u)


def gordon_success_probability(m: int, width: float | MeshWidthEstimate) -> float:
    """Escape-through-a-mesh lower bound on P(random (n-m)-subspace misses S).

    ``width`` is the absolute Gaussian width w_D(S).  The raw bound is
    returned, negative values included.
    """
    if isinstance(width, MeshWidthEstimate):
        width = width.normalized_width
    if m < 1:
        raise DomainError("m must be a positive integer")
    edge = math.sqrt(m) - 1.0 / (4.0 * math.sqrt(m))
    if not width < edge:
        raise DomainError(f"width {width} must be below sqrt(m) - 1/(4 sqrt(m)) = {edge}")
    return 1.0 - 3.5 * math.exp(-((edge - width) ** 2) / 18.0)


# ---------------------------------------------------------------------------
# curves
# ---------------------------------------------------------------------------


def _curve_worker(args) -> CurvePoint:
    kind, beta, q, spec = args
    try:
        return alpha_for_beta(kind, beta, q, spec)
    except LqthrError as exc:
        return CurvePoint(beta=beta, alpha=math.nan, duals=None, error=str(exc))


def worker_count() -> int:
    raw = os.environ.get("LQTHR_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 1
    return max(1, n)


def curve(kind, q: float, beta_grid: Iterable[float], spec: QuadratureSpec = QuadratureSpec(),
          workers: int | None = None) -> list[CurvePoint]:
    """One independent curve point per grid value, in grid order.

    Failures are recorded on the point (``error`` set, ``alpha`` NaN) and do
    not stop the sweep.  ``workers`` (default ``LQTHR_THREADS``) > 1 runs
    points in separate processes.
    """
    kind = _kind(kind)
    grid = [float(b) for b in beta_grid]
    if any(not 0.0 < b < 1.0 for b in grid):
        raise DomainError("beta grid values must lie in (0, 1)")
    if any(b2 <= b1 for b1, b2 in zip(grid, grid[1:])):
        raise DomainError("beta grid must be strictly increasing")
    jobs = [(kind, b, q, spec) for b in grid]
    n = workers if workers is not None else worker_count()
    if n > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=n) as pool:
            return list(pool.map(_curve_worker, jobs))
    return [_curve_worker(j) for j in jobs]
