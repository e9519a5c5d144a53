"""Exact hypothesis gate: counts, k-system, degree sum, ratio test."""

from itertools import product

import numpy as np
import pytest

from crflow.errors import IndexOutOfRange, NonPositiveMin
from crflow.morse import (CriticalPoint, MorseData, counts, degree_sum,
                          degree_sum_from_counts, sbc_check, solve_k,
                          theorem_gate)


def make_data(n, points, f_max=None, f_min=None):
    vals = [p.f_value for p in points]
    return MorseData(n=n, critical_points=tuple(points),
                     f_max=f_max if f_max is not None else max(vals),
                     f_min=f_min if f_min is not None else min(vals))


def cp(index, sign, value):
    return CriticalPoint(index=index, laplacian_sign=sign, f_value=value)


# ---------------------------------------------------------------------------
# counts
# ---------------------------------------------------------------------------

def test_counts_single_maximum():
    n = 1
    data = make_data(n, [cp(2 * n + 1, -1, 2.0)], f_min=1.0)
    assert counts(data) == [1, 0, 0, 0]


def test_counts_two_maxima():
    n = 2
    data = make_data(n, [cp(5, -1, 2.0), cp(5, -1, 1.9)], f_min=1.0)
    assert counts(data) == [2, 0, 0, 0, 0, 0]


def test_counts_excludes_positive_laplacian():
    n = 1
    data = make_data(n, [cp(3, -1, 2.0), cp(2, -1, 1.5), cp(2, 1, 1.4)],
                     f_min=1.0)
    assert counts(data) == [1, 1, 0, 0]


def test_counts_permutation_invariant():
    n = 1
    pts = [cp(3, -1, 2.0), cp(2, -1, 1.5), cp(0, 1, 1.0), cp(1, -1, 1.2)]
    rng = np.random.default_rng(0)
    base = counts(make_data(n, pts))
    for _ in range(5):
        rng.shuffle(pts)
        assert counts(make_data(n, pts)) == base


def test_counts_rejects_out_of_range_index():
    with pytest.raises(IndexOutOfRange):
        make_data(1, [cp(4, -1, 2.0)], f_min=1.0)


# ---------------------------------------------------------------------------
# solve_k
# ---------------------------------------------------------------------------

def test_solve_k_single_maximum_solvable():
    assert solve_k([1, 0, 0, 0], 1) == [0, 0, 0, 0]


def test_solve_k_double_maximum_unsolvable():
    assert solve_k([2, 0, 0, 0], 1) is None


def test_solve_k_documented_example():
    assert solve_k([2, 1, 0, 0], 1) == [1, 0, 0, 0]


def test_solve_k_requires_closing_zero():
    # forward substitution leaves k_{2n+1} = 1 != 0
    assert solve_k([1, 0, 0, 1], 1) is None


def test_solve_k_length_guard():
    with pytest.raises(ValueError):
        solve_k([1, 0, 0], 1)


@pytest.mark.parametrize("n", [1, 2])
def test_exhaustive_solvable_implies_degree_minus_one(n):
    """All m with entries <= 3: a nonnegative solution forces the signed
    count to equal -1 (the converse direction is NOT asserted)."""
    hits = 0
    counterexample_converse = 0
    for m in product(range(4), repeat=2 * n + 2):
        k = solve_k(list(m), n)
        if k is not None:
            hits += 1
            assert degree_sum_from_counts(m, n) == -1
        elif degree_sum_from_counts(m, n) == -1:
            counterexample_converse += 1
    assert hits > 0
    assert counterexample_converse > 0   # the implication does not reverse


# ---------------------------------------------------------------------------
# degree sum
# ---------------------------------------------------------------------------

def test_degree_single_maximum_fails_condition():
    n = 2
    data = make_data(n, [cp(2 * n + 1, -1, 2.0)], f_min=1.0)
    assert degree_sum(data) == -1


def test_degree_two_maxima_holds_condition():
    n = 1
    data = make_data(n, [cp(3, -1, 2.0), cp(3, -1, 1.8)], f_min=1.0)
    assert degree_sum(data) == -2


# ---------------------------------------------------------------------------
# bubble-ratio condition
# ---------------------------------------------------------------------------

def test_sbc_examples():
    assert sbc_check(1.9, 1.0, 1) is True
    assert sbc_check(1.5, 1.0, 2) is False
    assert sbc_check(3.0, 3.0, 5) is True


def test_sbc_threshold_exact_ties_fail():
    for n in (1, 2, 3):
        t = 2.0 ** (1.0 / n)
        assert sbc_check(t, 1.0, n) is False
        assert sbc_check(t * (1 - 1e-12), 1.0, n) is True


def test_sbc_rejects_nonpositive_min():
    with pytest.raises(NonPositiveMin):
        sbc_check(1.0, 0.0, 1)
    with pytest.raises(NonPositiveMin):
        make_data(1, [cp(3, -1, 1.0)], f_min=-1.0)


# ---------------------------------------------------------------------------
# the combined gate
# ---------------------------------------------------------------------------

def test_gate_two_maxima_sbc_ok_satisfied():
    n = 2
    data = make_data(n, [cp(5, -1, 1.3), cp(5, -1, 1.2)], f_min=1.0)
    report = theorem_gate(data)
    assert report.k is None and report.sbc and report.satisfied


def test_gate_single_maximum_not_satisfied():
    n = 2
    data = make_data(n, [cp(5, -1, 1.3)], f_min=1.0)
    report = theorem_gate(data)
    assert report.k is not None
    assert not report.satisfied


def test_gate_sbc_failure_blocks_regardless_of_counts():
    n = 2
    data = make_data(n, [cp(5, -1, 2.0), cp(5, -1, 1.9)], f_min=1.0)
    report = theorem_gate(data)
    assert report.k is None                      # unsolvable direction
    assert not report.sbc
    assert not report.satisfied


def test_gate_warns_for_n1():
    data = make_data(1, [cp(3, -1, 1.2), cp(3, -1, 1.1)], f_min=1.0)
    report = theorem_gate(data)
    assert report.warnings
