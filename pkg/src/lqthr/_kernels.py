"""Per-node inner maximizers, vectorized over arrays of h.

Two interchangeable backends compute the same quantities:

* ``numba``: scalar safeguarded Newton solves compiled with ``@njit`` and
  looped over the nodes (default when numba imports);
* ``numpy``: the same iterations written as whole-array operations.

Set ``LQTHR_NUMBA=0`` in the environment to force the numpy path, or call
:func:`set_backend` at runtime.  ``benchmarks/bench_kernels.py`` times both.

All three maximizations reduce to a one-dimensional root of a convex
monotone function with an explicit bracket, so Newton started from the
appropriate end of the bracket converges monotonically.
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap(args[0]) if args and callable(args[0]) else wrap


MAXIT = 60
_RTOL = 1e-15


def _initial_backend() -> str:
    flag = os.environ.get("LQTHR_NUMBA", "1").strip().lower()
    if flag in ("0", "false", "no", "off") or not HAVE_NUMBA:
        return "numpy"
    return "numba"


_backend = _initial_backend()


def get_backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise ValueError("numba is not installed")
    _backend = name


# ---------------------------------------------------------------------------
# scalar kernels (compiled)
# ---------------------------------------------------------------------------


@njit(cache=True)
def minus_kink_scalar(nu, gamma, q):
    """Smallest h at which max_t h t - nu t^q - gamma t^2 becomes positive."""
    if nu == 0.0:
        return 0.0
    if q == 1.0:
        return nu
    if q == 0.0:
        return 2.0 * math.sqrt(nu * gamma)
    t0 = ((1.0 - q) * nu / gamma) ** (1.0 / (2.0 - q))
    return nu * t0 ** (q - 1.0) + gamma * t0


@njit(cache=True)
def _plus_core(h, nu, gamma, q, b):
    c = q * nu
    a = h / (2.0 * gamma)
    t = max(a, b)
    hi = a + b
    for _ in range(MAXIT):
        tq1 = t ** (q - 1.0)
        d = h + c * tq1 - 2.0 * gamma * t
        dd = c * (q - 1.0) * tq1 / t - 2.0 * gamma
        tn = t - d / dd
        if tn > hi:
            tn = hi
        if abs(tn - t) <= _RTOL * tn:
            t = tn
            break
        t = tn
    return t, h * t + nu * t ** q - gamma * t * t


@njit(cache=True)
def plus_scalar(h, nu, gamma, q):
    if nu == 0.0 or q == 1.0:
        s = h + nu
        return s / (2.0 * gamma), s * s / (4.0 * gamma)
    if q == 0.0:
        return h / (2.0 * gamma), h * h / (4.0 * gamma) + nu
    b = (q * nu / (2.0 * gamma)) ** (1.0 / (2.0 - q))
    return _plus_core(h, nu, gamma, q, b)


@njit(cache=True)
def _minus_core(h, nu, gamma, q, t0, h0):
    if h < h0:
        return 0.0, 0.0
    if h == h0:
        return t0, 0.0
    c = q * nu
    t = h / (2.0 * gamma)
    for _ in range(MAXIT):
        tq1 = t ** (q - 1.0)
        p = 2.0 * gamma * t + c * tq1 - h
        dp = 2.0 * gamma + c * (q - 1.0) * tq1 / t
        tn = t - p / dp
        if tn < t0:
            tn = t0
        if abs(tn - t) <= _RTOL * tn:
            t = tn
            break
        t = tn
    v = t * (h - nu * t ** (q - 1.0) - gamma * t)
    if v < 0.0:
        return 0.0, 0.0
    return t, v


@njit(cache=True)
def _minus_closed(h, nu, gamma, q):
    # nu == 0, q == 1 and q == 0 have closed forms
    if nu == 0.0:
        return h / (2.0 * gamma), h * h / (4.0 * gamma)
    if q == 1.0:
        if h >= nu:
            s = h - nu
            return s / (2.0 * gamma), s * s / (4.0 * gamma)
        return 0.0, 0.0
    v = h * h / (4.0 * gamma) - nu
    if v >= 0.0:
        return h / (2.0 * gamma), v
    return 0.0, 0.0


@njit(cache=True)
def _minus_consts(nu, gamma, q):
    t0 = ((1.0 - q) * nu / gamma) ** (1.0 / (2.0 - q))
    return t0, nu * t0 ** (q - 1.0) + gamma * t0


@njit(cache=True)
def minus_scalar(h, nu, gamma, q):
    if nu == 0.0 or q == 1.0 or q == 0.0:
        return _minus_closed(h, nu, gamma, q)
    t0, h0 = _minus_consts(nu, gamma, q)
    return _minus_core(h, nu, gamma, q, t0, h0)


@njit(cache=True)
def _shifted_core(h, nu, gamma, q, x, xq, t0, h0):
    # max_w h w - nu (|x + w|^q - x^q) - gamma w^2; with u = |x + w| both
    # sides of the kink w = -x are the minus problem at |h + 2 gamma x|.
    big_h = h + 2.0 * gamma * x
    if q == 1.0 or q == 0.0:
        u, m = _minus_closed(abs(big_h), nu, gamma, q)
    else:
        u, m = _minus_core(abs(big_h), nu, gamma, q, t0, h0)
    v = -h * x - gamma * x * x + nu * xq + m
    if big_h >= 0.0:
        w = u - x
    else:
        w = -x - u
    if v < 0.0:
        return 0.0, 0.0
    return w, v


@njit(cache=True)
def _shifted_consts(nu, gamma, q, x):
    xq = x ** q if x > 0.0 else 0.0
    if q == 1.0 or q == 0.0:
        return xq, 0.0, 0.0
    t0, h0 = _minus_consts(nu, gamma, q)
    return xq, t0, h0


@njit(cache=True)
def shifted_scalar(h, nu, gamma, q, x):
    if nu == 0.0:
        return h / (2.0 * gamma), h * h / (4.0 * gamma)
    xq, t0, h0 = _shifted_consts(nu, gamma, q, x)
    return _shifted_core(h, nu, gamma, q, x, xq, t0, h0)


@njit(cache=True)
def _plus_array(h, nu, gamma, q):
    n = h.shape[0]
    t = np.empty(n)
    v = np.empty(n)
    if nu == 0.0 or q == 1.0 or q == 0.0:
        for i in range(n):
            t[i], v[i] = plus_scalar(h[i], nu, gamma, q)
        return t, v
    b = (q * nu / (2.0 * gamma)) ** (1.0 / (2.0 - q))
    for i in range(n):
        t[i], v[i] = _plus_core(h[i], nu, gamma, q, b)
    return t, v


@njit(cache=True)
def _minus_array(h, nu, gamma, q):
    n = h.shape[0]
    t = np.empty(n)
    v = np.empty(n)
    if nu == 0.0 or q == 1.0 or q == 0.0:
        for i in range(n):
            t[i], v[i] = _minus_closed(h[i], nu, gamma, q)
        return t, v
    t0, h0 = _minus_consts(nu, gamma, q)
    for i in range(n):
        t[i], v[i] = _minus_core(h[i], nu, gamma, q, t0, h0)
    return t, v


@njit(cache=True)
def _shifted_array(h, nu, gamma, q, x):
    n = h.shape[0]
    w = np.empty(n)
    v = np.empty(n)
    if nu == 0.0:
        for i in range(n):
            w[i], v[i] = shifted_scalar(h[i], nu, gamma, q, x)
        return w, v
    xq, t0, h0 = _shifted_consts(nu, gamma, q, x)
    for i in range(n):
        w[i], v[i] = _shifted_core(h[i], nu, gamma, q, x, xq, t0, h0)
    return w, v


# ---------------------------------------------------------------------------
# numpy fallback: identical iterations on whole arrays
# ---------------------------------------------------------------------------


def _plus_numpy(h, nu, gamma, q):
    if nu == 0.0 or q == 1.0:
        s = h + nu
        return s / (2.0 * gamma), s * s / (4.0 * gamma)
    if q == 0.0:
        return h / (2.0 * gamma), h * h / (4.0 * gamma) + nu
    c = q * nu
    a = h / (2.0 * gamma)
    b = (c / (2.0 * gamma)) ** (1.0 / (2.0 - q))
    t = np.maximum(a, b)
    hi = a + b
    for _ in range(MAXIT):
        tq1 = t ** (q - 1.0)
        d = h + c * tq1 - 2.0 * gamma * t
        dd = c * (q - 1.0) * tq1 / t - 2.0 * gamma
        tn = np.minimum(t - d / dd, hi)
        done = np.abs(tn - t) <= _RTOL * tn
        t = tn
        if done.all():
            break
    return t, h * t + nu * t ** q - gamma * t * t


def _minus_numpy(h, nu, gamma, q):
    if nu == 0.0:
        return h / (2.0 * gamma), h * h / (4.0 * gamma)
    zero = np.zeros_like(h)
    if q == 1.0:
        s = np.maximum(h - nu, 0.0)
        return s / (2.0 * gamma), s * s / (4.0 * gamma)
    if q == 0.0:
        v = h * h / (4.0 * gamma) - nu
        on = v >= 0.0
        return np.where(on, h / (2.0 * gamma), zero), np.where(on, v, zero)
    t0 = ((1.0 - q) * nu / gamma) ** (1.0 / (2.0 - q))
    h0 = nu * t0 ** (q - 1.0) + gamma * t0
    active = h > h0
    c = q * nu
    t = np.where(active, h / (2.0 * gamma), t0)
    for _ in range(MAXIT):
        tq1 = t ** (q - 1.0)
        p = 2.0 * gamma * t + c * tq1 - h
        dp = 2.0 * gamma + c * (q - 1.0) * tq1 / t
        with np.errstate(divide="ignore", invalid="ignore"):
            tn = np.where(active, np.maximum(t - p / dp, t0), t0)
        done = np.abs(tn - t) <= _RTOL * tn
        t = tn
        if done.all():
            break
    v = t * (h - nu * t ** (q - 1.0) - gamma * t)
    keep = (active & (v >= 0.0)) | (h == h0)
    return np.where(keep, t, zero), np.where(keep, np.maximum(v, 0.0), zero)


def _shifted_numpy(h, nu, gamma, q, x):
    if nu == 0.0:
        return h / (2.0 * gamma), h * h / (4.0 * gamma)
    xq = x ** q if x > 0.0 else 0.0
    big_h = h + 2.0 * gamma * x
    u, m = _minus_numpy(np.abs(big_h), nu, gamma, q)
    v = -h * x - gamma * x * x + nu * xq + m
    w = np.where(big_h >= 0.0, u - x, -x - u)
    neg = v < 0.0
    return np.where(neg, 0.0, w), np.where(neg, 0.0, v)


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


Q_SNAP = 1e-10


def _q(q) -> float:
    # exponents this small only shift values by O(q log t); use q = 0 forms
    q = float(q)
    return 0.0 if q < Q_SNAP else q


def _nu(nu, gamma, q) -> float:
    # drop a nu so small that the Newton scales (q nu / gamma)^(1/(2-q))
    # would underflow; its contribution is below 1e-260 relative
    nu = float(nu)
    if 0.0 < q < 1.0 and min(q, 1.0 - q) * nu < 1e-280 * float(gamma):
        return 0.0
    return nu


def _as_array(h):
    return np.ascontiguousarray(h, dtype=np.float64).ravel()


def _args(nu, gamma, q):
    q = _q(q)
    return _nu(nu, gamma, q), float(gamma), q


def plus_values(h_abs, nu, gamma, q):
    """(maximizer, value) arrays of max_t h t + nu t^q - gamma t^2 over t >= 0."""
    fn = _plus_array if _backend == "numba" else _plus_numpy
    return fn(_as_array(h_abs), *_args(nu, gamma, q))


def minus_values(h_abs, nu, gamma, q):
    """(maximizer, value) arrays of max_t h t - nu t^q - gamma t^2 over t >= 0."""
    fn = _minus_array if _backend == "numba" else _minus_numpy
    return fn(_as_array(h_abs), *_args(nu, gamma, q))


def shifted_values(h, nu, gamma, q, x):
    """(maximizer, value) arrays of max_w h w - nu(|x+w|^q - x^q) - gamma w^2."""
    fn = _shifted_array if _backend == "numba" else _shifted_numpy
    return fn(_as_array(h), *_args(nu, gamma, q), float(x))


def minus_kink(nu, gamma, q) -> float:
    return float(minus_kink_scalar(*_args(nu, gamma, q)))
