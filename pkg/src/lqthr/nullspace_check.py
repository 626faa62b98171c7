"""Monte Carlo checks of the null-space recovery conditions.

For A with null space N and a direction w in N, the three conditions are

* sectional: sum_{i<=n-k} |w_i|^q  >  sum_{i>n-k} |w_i|^q
* strong:    sum_i b_i |w_i|^q > 0 for every sign pattern b with k entries = -1
* weak:      sum_{i<=n-k} |w_i|^q + sum_{i>n-k} |x_i + w_i|^q > sum_{i>n-k} |x_i|^q

Sampling can only find counterexamples.  A report with no violations is
evidence, not a certificate.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInstanceError, DomainError
from .inner_opt import check_exponent
from .width_bound import ThresholdKind, _kind

NULL_TOL = 1e-10
WEAK_SCALES = np.logspace(-3.0, 3.0, 25)
BLOCK = 1024


def abs_pow(x, q: float) -> np.ndarray:
    """|x|^q with the counting convention 0^0 = 0 at q = 0."""
    a = np.abs(np.asarray(x, dtype=float))
    if q == 0.0:
        return (a > 0.0).astype(float)
    return a ** q


@dataclass(frozen=True)
class ProblemInstance:
    a_matrix: np.ndarray
    x_true: np.ndarray
    k: int
    null_basis: np.ndarray = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a_matrix, dtype=float))
        x = np.asarray(self.x_true, dtype=float).ravel()
        m, n = a.shape
        if not m < n:
            raise DomainError(f"need m < n, got m={m}, n={n}")
        if not 1 <= self.k <= m:
            raise DomainError(f"need 1 <= k <= m, got k={self.k}, m={m}")
        if x.shape != (n,):
            raise DomainError("x_true length must equal the column count of A")
        if np.count_nonzero(x) != self.k or np.any(x[n - self.k:] == 0.0):
            raise DomainError("x_true must have exactly k nonzeros, in the last k coordinates")
        object.__setattr__(self, "a_matrix", a)
        object.__setattr__(self, "x_true", x)
        object.__setattr__(self, "null_basis", null_space_basis(a))

    @property
    def m(self) -> int:
        return self.a_matrix.shape[0]

    @property
    def n(self) -> int:
        return self.a_matrix.shape[1]

    @classmethod
    def gaussian(cls, n: int, m: int, k: int, seed: int) -> "ProblemInstance":
        if not (0 < m < n and 1 <= k <= m):
            raise DomainError(f"invalid dimensions n={n}, m={m}, k={k}")
        rng = np.random.default_rng(seed)
        a = rng.standard_normal((m, n))
        x = np.zeros(n)
        x[n - k:] = rng.standard_normal(k)
        return cls(a, x, k)

    @classmethod
    def from_matrix(cls, a_matrix, k: int, x_true=None) -> "ProblemInstance":
        a = np.atleast_2d(np.asarray(a_matrix, dtype=float))
        if x_true is None:
            x_true = np.zeros(a.shape[1])
            x_true[a.shape[1] - k:] = 1.0
        return cls(a, x_true, k)


@dataclass(frozen=True)
class SignPattern:
    b: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.b, dtype=float)
        if not np.all(np.abs(b) == 1.0):
            raise DomainError("sign pattern entries must be +1 or -1")
        object.__setattr__(self, "b", b)

    @property
    def k(self) -> int:
        return int(np.sum(self.b < 0))

    def apply(self, w, q: float) -> float:
        return float(np.dot(self.b, abs_pow(w, q)))


@dataclass(frozen=True)
class ConditionReport:
    samples: int
    min_margin: float
    violation_fraction: float
    worst_direction: np.ndarray
    kind: str = "sectional"

    def lines(self) -> list[str]:
        w = ",".join(f"{v:.6f}" for v in self.worst_direction)
        return [
            f"kind={self.kind}",
            f"samples={self.samples}",
            f"min_margin={self.min_margin:.6e}",
            f"violation_fraction={self.violation_fraction:.6f}",
            f"worst_direction={w}",
            "evidence=monte-carlo",
        ]


def null_space_basis(a_matrix: np.ndarray) -> np.ndarray:
    """Orthonormal basis (n x (n-m)) of the null space from a full QR of A^T."""
    a = np.atleast_2d(np.asarray(a_matrix, dtype=float))
    m, n = a.shape
    qmat, r = np.linalg.qr(a.T, mode="complete")
    diag = np.abs(np.diag(r))
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if diag.size < m or np.any(diag <= 1e-12 * scale * n):
        raise DegenerateInstanceError("A is rank deficient; null space dimension differs from n - m")
    basis = qmat[:, m:]
    if np.linalg.norm(a @ basis) > NULL_TOL * max(1.0, np.linalg.norm(a)):
        raise DegenerateInstanceError("null-space basis failed the A w = 0 check")
    return basis


def _directions(basis: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    w = coeffs @ basis.T
    return w / np.linalg.norm(w, axis=-1, keepdims=True)


def sample_null_direction(instance: ProblemInstance, seed: int) -> np.ndarray:
    """Uniform unit vector in the null space of A, reproducible from ``seed``."""
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(instance.null_basis.shape[1])
    return _directions(instance.null_basis, c)


def sectional_margin(w, k: int, q: float) -> float:
    p = abs_pow(w, q)
    n = p.shape[-1]
    return p[..., : n - k].sum(axis=-1) - p[..., n - k:].sum(axis=-1)


def strong_margin(w, k: int, q: float) -> float:
    """Minimum of sum b_i |w_i|^q over patterns with exactly k negative signs."""
    p = abs_pow(w, q)
    top = np.partition(p, p.shape[-1] - k, axis=-1)[..., p.shape[-1] - k:]
    return p.sum(axis=-1) - 2.0 * top.sum(axis=-1)


def weak_margin(instance: ProblemInstance, w, q: float) -> float:
    w = np.asarray(w, dtype=float)
    n, k = instance.n, instance.k
    x = instance.x_true[n - k:]
    off = abs_pow(w[..., : n - k], q).sum(axis=-1)
    on = abs_pow(x + w[..., n - k:], q).sum(axis=-1)
    return off + on - abs_pow(x, q).sum()


def _margins(instance: ProblemInstance, kind: ThresholdKind, q: float, w: np.ndarray) -> np.ndarray:
    """Per-direction margin; for weak, the minimum over +-t w on the scale grid."""
    if kind is ThresholdKind.SECTIONAL:
        return sectional_margin(w, instance.k, q)
    if kind is ThresholdKind.STRONG:
        return strong_margin(w, instance.k, q)
    scales = np.concatenate([WEAK_SCALES, -WEAK_SCALES])
    scaled = w[..., None, :] * scales[:, None]
    return weak_margin(instance, scaled, q).min(axis=-1)


def _block(instance, kind, q, seed, index, count):
    rng = np.random.default_rng((seed, index))
    c = rng.standard_normal((count, instance.null_basis.shape[1]))
    w = _directions(instance.null_basis, c)
    marg = np.atleast_1d(_margins(instance, kind, q, w))
    j = int(np.argmin(marg))
    return int(np.sum(marg <= 0.0)), float(marg[j]), c[j]


def _refine(instance, kind, q, c, best, sweeps: int = 40):
    """Coordinate descent on null-space coefficients to push the margin down."""
    step = 0.5
    c = c / np.linalg.norm(c)
    for _ in range(sweeps):
        improved = False
        for i in range(c.size):
            for sgn in (1.0, -1.0):
                trial = c.copy()
                trial[i] += sgn * step
                if not np.any(trial):
                    continue
                val = float(_margins(instance, kind, q, _directions(instance.null_basis, trial)))
                if val < best:
                    c, best, improved = trial / np.linalg.norm(trial), val, True
        if not improved:
            step *= 0.5
            if step < 1e-6:
                break
    return c, best


def verify_condition(instance: ProblemInstance, kind, q: float, samples: int,
                     refine: bool = False, seed: int = 0, workers: int = 1) -> ConditionReport:
    """Sample null directions and report the smallest margin and violation rate.

    Directions are drawn in blocks of ``BLOCK`` with generator seed
    ``(seed, block_index)``, so the result does not depend on ``workers``.
    """
    kind = _kind(kind)
    q = check_exponent(q)
    if samples < 1:
        raise DomainError("samples must be at least 1")
    sizes = [min(BLOCK, samples - s) for s in range(0, samples, BLOCK)]
    jobs = [(instance, kind, q, seed, i, size) for i, size in enumerate(sizes)]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda a: _block(*a), jobs))
    else:
        results = [_block(*a) for a in jobs]
    bad = sum(r[0] for r in results)
    j = int(np.argmin([r[1] for r in results]))
    min_margin, coeff = results[j][1], results[j][2]
    if refine:
        coeff, refined = _refine(instance, kind, q, coeff, min_margin)
        if refined <= 0.0 < min_margin:
            bad += 1
        min_margin = refined
    worst = _directions(instance.null_basis, coeff)
    return ConditionReport(samples, float(min_margin), min(1.0, bad / samples), worst, kind.value)


def sparsity_for_ratio(beta: float, n: int) -> int:
    """k = round(beta n), floored at 1."""
    return max(1, int(round(beta * n)))
