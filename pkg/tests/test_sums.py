import math

import numpy as np
import pytest

from rmflab import (
    Model,
    SampledFunction,
    conditional_variance,
    exact_expected_variance,
    grid_statistics,
    increment_decomposition_check,
    interval_sum_pconstraint,
    large_prime_sum,
    large_prime_sum_bruteforce,
    statistics_at,
)
from rmflab.sums import ORACLE_CAP


@pytest.mark.parametrize("model", list(Model))
@pytest.mark.parametrize("x", [2, 3, 4, 10, 31, 100, 101, 997, 1000, 2500])
def test_fast_sum_matches_bruteforce(tables_small, model, x):
    F = SampledFunction(model, 11, tables_small)
    fast = large_prime_sum(F, x)
    brute = large_prime_sum_bruteforce(F, x)
    if model is Model.RADEMACHER:
        assert fast == brute
    else:
        assert fast == pytest.approx(brute, abs=1e-9)


def test_sum_at_tiny_x(tables_small):
    F = SampledFunction(Model.RADEMACHER, 0, tables_small)
    assert large_prime_sum(F, 1) == 0
    # x = 2: only n = 2, P(2) = 2 > sqrt(2)
    assert large_prime_sum(F, 2) == F.prime_value(2)


def test_bruteforce_cap(tables_small):
    F = SampledFunction(Model.RADEMACHER, 0, tables_small)
    with pytest.raises(ValueError):
        large_prime_sum_bruteforce(F, ORACLE_CAP + 1)


def test_conditional_variance_definition(tables_small):
    F = SampledFunction(Model.STEINHAUS, 4, tables_small)
    for x in (10, 100, 1234):
        s = math.isqrt(x)
        direct = 0.0
        for p in tables_small.primes_in(s, x).tolist():
            A = F.prefix_sums(x // p)[x // p]
            direct += abs(A) ** 2
        assert conditional_variance(F, x) == pytest.approx(direct, rel=1e-12)


def test_exact_expected_variance_small_case(tables_small):
    # x = 10: primes 5 and 7 contribute E|A(2)|^2 = 2, prime... floor(10/5)=2,
    # floor(10/7)=1, so the mean is 2 + 1 = 3 for both models.
    assert exact_expected_variance(10, Model.RADEMACHER, tables_small) == 3.0
    assert exact_expected_variance(10, Model.STEINHAUS, tables_small) == 3.0


def test_exact_expected_variance_brute(tables_small):
    from rmflab.sieve import squarefree_count

    for x in (50, 400):
        s = math.isqrt(x)
        ps = tables_small.primes_in(s, x).tolist()
        stein = sum(x // p for p in ps)
        rade = sum(squarefree_count(x // p, tables_small) for p in ps)
        assert exact_expected_variance(x, Model.STEINHAUS, tables_small) == stein
        assert exact_expected_variance(x, Model.RADEMACHER, tables_small) == rade


def test_interval_sum_pconstraint_brute(tables_small):
    F = SampledFunction(Model.RADEMACHER, 21, tables_small)
    lpf = tables_small.largest_factor_table()
    n_lo, n_hi, p_lo, p_hi = 10, 500, 7, 100
    direct = sum(
        F.value_at(n)
        for n in range(n_lo + 1, n_hi + 1)
        if p_lo < lpf[n] <= p_hi
    )
    assert interval_sum_pconstraint(F, n_lo, n_hi, p_lo, p_hi) == direct


@pytest.mark.parametrize("model", list(Model))
def test_increment_decomposition_sums_exactly(tables_small, model):
    F = SampledFunction(model, 2, tables_small)
    for x_prev, x in [(100, 120), (120, 121), (997, 1500), (50, 50)]:
        t1, t2, t3 = increment_decomposition_check(F, x_prev, x)
        total = t1 + t2 + t3
        target = large_prime_sum(F, x)
        if model is Model.RADEMACHER:
            assert total == target
        else:
            assert total == pytest.approx(target, abs=1e-9)


@pytest.mark.parametrize("model", list(Model))
def test_grid_statistics_match_pointwise(tables_small, model):
    F = SampledFunction(model, 6, tables_small)
    xs = np.array([3, 4, 5, 9, 10, 25, 26, 100, 121, 500, 1000, 4999])
    m_vals, v_vals = grid_statistics(F, xs)
    for j, x in enumerate(xs.tolist()):
        assert m_vals[j] == pytest.approx(large_prime_sum(F, x), abs=1e-9)
        assert v_vals[j] == pytest.approx(conditional_variance(F, x), abs=1e-6)


def test_grid_statistics_tolerates_duplicates(tables_small):
    F = SampledFunction(Model.RADEMACHER, 6, tables_small)
    xs = np.array([10, 100, 100, 500])
    m_vals, v_vals = grid_statistics(F, xs)
    assert m_vals[1] == m_vals[2]
    assert v_vals[1] == v_vals[2]


def test_grid_statistics_rejects_descending(tables_small):
    F = SampledFunction(Model.RADEMACHER, 0, tables_small)
    with pytest.raises(ValueError):
        grid_statistics(F, [10, 5])


def test_statistics_at_bundles(tables_small):
    F = SampledFunction(Model.RADEMACHER, 3, tables_small)
    st = statistics_at(F, 200)
    assert st.x == 200
    assert st.m_f == large_prime_sum(F, 200)
    assert st.v == pytest.approx(conditional_variance(F, 200))
    assert st.a_full == F.prefix_sums(200)[200]


def test_out_of_range_rejected(tables_small):
    F = SampledFunction(Model.RADEMACHER, 0, tables_small)
    with pytest.raises(ValueError):
        large_prime_sum(F, tables_small.limit + 1)
    with pytest.raises(ValueError):
        conditional_variance(F, 0)
