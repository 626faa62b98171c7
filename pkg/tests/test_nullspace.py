import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lqthr.errors import DegenerateInstanceError, DomainError
from lqthr.nullspace_check import (
    ConditionReport,
    ProblemInstance,
    SignPattern,
    sample_null_direction,
    sectional_margin,
    sparsity_for_ratio,
    strong_margin,
    verify_condition,
    weak_margin,
)

from oracles import brute_strong, direct_sum_sectional

vec8 = arrays(np.float64, 8, elements=st.floats(min_value=-10, max_value=10, allow_subnormal=False))


def test_one_dimensional_null_spaces():
    w = sample_null_direction(ProblemInstance.from_matrix([[1.0, 1.0]], 1), seed=0)
    assert np.allclose(np.abs(w), [1 / math.sqrt(2)] * 2) and w[0] == pytest.approx(-w[1])
    w = sample_null_direction(ProblemInstance.from_matrix([[1.0, 2.0]], 1), seed=4)
    assert np.allclose(w * np.sign(w[0]), np.array([2.0, -1.0]) / math.sqrt(5))


def test_seeded_direction_is_in_null_space_and_reproducible():
    inst = ProblemInstance.gaussian(8, 4, 2, seed=11)
    w = sample_null_direction(inst, seed=5)
    assert np.linalg.norm(inst.a_matrix @ w) <= 1e-10
    assert abs(np.linalg.norm(w) - 1.0) <= 1e-12
    again = sample_null_direction(ProblemInstance.gaussian(8, 4, 2, seed=11), seed=5)
    assert np.array_equal(w, again)


def test_rank_deficient_matrix():
    with pytest.raises(DegenerateInstanceError):
        ProblemInstance.from_matrix([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0]], 1)


@pytest.mark.parametrize("n,m,k", [(4, 4, 1), (5, 6, 1), (6, 3, 0), (6, 3, 4)])
def test_invalid_dimensions(n, m, k):
    with pytest.raises(DomainError):
        ProblemInstance.gaussian(n, m, k, seed=0)


def test_instance_layout():
    inst = ProblemInstance.gaussian(10, 7, 3, seed=2)
    assert (inst.m, inst.n, inst.k) == (7, 10, 3)
    assert np.count_nonzero(inst.x_true) == 3 and np.all(inst.x_true[7:] != 0)


# --- margins --------------------------------------------------------------


def test_sectional_margin_examples():
    w = np.array([1.0, -1.0]) / math.sqrt(2)
    assert sectional_margin(w, 1, 0.5) == pytest.approx(0.0, abs=1e-15)
    assert sectional_margin(np.array([2.0, -1.0]) / math.sqrt(5), 1, 0.5) > 0.0


def test_sectional_margin_matches_direct_sum():
    inst = ProblemInstance.gaussian(8, 4, 2, seed=11)
    w = sample_null_direction(inst, seed=5)
    assert sectional_margin(w, 2, 0.3) == pytest.approx(direct_sum_sectional(w, 2, 0.3), abs=1e-12)


def test_strong_margin_examples():
    w = np.full(8, 0.3)
    assert strong_margin(w, 2, 0.5) == pytest.approx(4 * 0.3 ** 0.5, abs=1e-14)
    assert strong_margin(np.array([1.0, -1.0]) / math.sqrt(2), 1, 0.7) == pytest.approx(0.0, abs=1e-15)


def test_strong_margin_matches_enumeration():
    w = np.random.default_rng(1).standard_normal(8)
    assert strong_margin(w, 3, 0.5) == pytest.approx(brute_strong(w, 3, 0.5), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(vec8, st.integers(min_value=1, max_value=4), st.floats(min_value=0.05, max_value=1.0))
def test_strong_margin_enumeration_property(w, k, q):
    assert strong_margin(w, k, q) == pytest.approx(brute_strong(w, k, q), abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(vec8, st.integers(min_value=1, max_value=4), st.floats(min_value=0.0, max_value=1.0))
def test_strong_below_sectional(w, k, q):
    assert strong_margin(w, k, q) <= sectional_margin(w, k, q) + 1e-12


@settings(max_examples=60, deadline=None)
@given(vec8, st.floats(min_value=0.05, max_value=1.0), st.floats(min_value=1e-3, max_value=1e3))
def test_sectional_scale_covariance(w, q, c):
    base = sectional_margin(w, 3, q)
    scaled = sectional_margin(c * w, 3, q)
    assert scaled == pytest.approx(c ** q * base, rel=1e-9, abs=1e-9)
    assert sectional_margin(-c * w, 3, q) == pytest.approx(scaled, rel=1e-12, abs=1e-12)
    if abs(base) > 1e-9:
        assert np.sign(scaled) == np.sign(base)


def test_strong_margin_is_a_sign_pattern_value():
    w = np.random.default_rng(3).standard_normal(7)
    p = np.abs(w) ** 0.4
    b = np.ones(7)
    b[np.argsort(p)[-2:]] = -1.0
    pattern = SignPattern(b)
    assert pattern.k == 2
    assert pattern.apply(w, 0.4) == pytest.approx(strong_margin(w, 2, 0.4), abs=1e-14)
    with pytest.raises(DomainError):
        SignPattern([1.0, 0.5])


def test_weak_margin_examples():
    inst = ProblemInstance.gaussian(8, 4, 2, seed=11)
    assert weak_margin(inst, np.zeros(8), 0.5) == 0.0
    w = np.zeros(8)
    w[:3] = [0.2, -0.1, 0.4]
    assert weak_margin(inst, w, 0.5) > 0.0


def test_weak_margin_matches_direct_sum():
    inst = ProblemInstance.gaussian(8, 4, 2, seed=11)
    w = sample_null_direction(inst, seed=5)
    x, n, k = inst.x_true, 8, 2
    ref = (sum(abs(w[i]) ** 0.5 for i in range(n - k))
           + sum(abs(x[i] + w[i]) ** 0.5 for i in range(n - k, n))
           - sum(abs(x[i]) ** 0.5 for i in range(n - k, n)))
    assert weak_margin(inst, w, 0.5) == pytest.approx(ref, abs=1e-12)


# --- verify_condition -----------------------------------------------------


def test_verify_symmetric_pair_always_fails():
    inst = ProblemInstance.from_matrix([[1.0, 1.0]], 1)
    for q in (0.0, 0.5, 1.0):
        r = verify_condition(inst, "sectional", q, samples=20, seed=1)
        assert r.violation_fraction == 1.0


def test_verify_asymmetric_pair_always_holds():
    inst = ProblemInstance.from_matrix([[1.0, 2.0]], 1)
    r = verify_condition(inst, "sectional", 0.5, samples=20, seed=1)
    assert r.violation_fraction == 0.0 and r.min_margin > 0.0


def test_verify_deterministic():
    inst = ProblemInstance.gaussian(10, 7, 2, seed=7)
    a = verify_condition(inst, "sectional", 0.5, samples=10_000, seed=7)
    b = verify_condition(ProblemInstance.gaussian(10, 7, 2, seed=7), "sectional", 0.5, samples=10_000, seed=7,
                         workers=3)
    assert a.min_margin == b.min_margin and a.violation_fraction == b.violation_fraction
    assert np.array_equal(a.worst_direction, b.worst_direction)


@pytest.mark.parametrize("kind", ["sectional", "strong", "weak"])
def test_report_invariants(kind):
    inst = ProblemInstance.gaussian(10, 6, 2, seed=3)
    r = verify_condition(inst, kind, 0.5, samples=3000, seed=9)
    assert isinstance(r, ConditionReport)
    assert 0.0 <= r.violation_fraction <= 1.0
    w = r.worst_direction
    assert np.linalg.norm(inst.a_matrix @ w) <= 1e-10 and abs(np.linalg.norm(w) - 1) <= 1e-12
    if kind == "sectional":
        assert sectional_margin(w, 2, 0.5) == pytest.approx(r.min_margin, abs=1e-12)
    elif kind == "strong":
        assert strong_margin(w, 2, 0.5) == pytest.approx(r.min_margin, abs=1e-12)


def test_refine_only_lowers_margin():
    inst = ProblemInstance.gaussian(12, 6, 2, seed=5)
    plain = verify_condition(inst, "strong", 0.5, samples=500, seed=2)
    refined = verify_condition(inst, "strong", 0.5, samples=500, seed=2, refine=True)
    assert refined.min_margin <= plain.min_margin
    assert strong_margin(refined.worst_direction, 2, 0.5) == pytest.approx(refined.min_margin, abs=1e-12)


def test_weak_scale_scan_finds_finite_scale_violation():
    # null direction (1, -10)/sqrt(101), x~ = (0, 1): the margin |s|^q + |1 - 10 s|^q - 1
    # is negative for s in about (0.03, 0.13), i.e. only at scales t near 1
    inst = ProblemInstance.from_matrix([[10.0, 1.0]], 1)
    w = sample_null_direction(inst, seed=0)
    assert weak_margin(inst, w, 0.5) > 0.0 or weak_margin(inst, -w, 0.5) > 0.0
    r = verify_condition(inst, "weak", 0.5, samples=10, seed=0)
    assert r.violation_fraction == 1.0 and r.min_margin < 0.0


def test_sample_count_validated():
    with pytest.raises(DomainError):
        verify_condition(ProblemInstance.gaussian(6, 3, 1, seed=0), "strong", 0.5, samples=0)


def test_high_ratio_instances_show_violations():
    # beta far above any curve for alpha = 0.5: k = 10 of n = 24, m = 12
    hits = 0
    for s in range(10):
        inst = ProblemInstance.gaussian(24, 12, 10, seed=s)
        hits += verify_condition(inst, "sectional", 0.5, samples=2000, seed=s).violation_fraction > 0
    assert hits >= 5


def test_sparsity_for_ratio():
    assert sparsity_for_ratio(0.027, 24) == 1
    assert sparsity_for_ratio(0.25, 24) == 6
    assert sparsity_for_ratio(1e-6, 24) == 1
