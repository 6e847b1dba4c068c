import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import zeta

from pathguess.analysis import (
    DivergentSeriesError,
    LeCamPair,
    PowerTail,
    bayes_error_oracle,
    gibbs_gamma,
    ising_gamma,
    ising_h0,
    kl_chi2,
    lecam_masses,
    lecam_pair,
    testing_report as lecam_testing_report,
)
from pathguess.core import ValidationError


# KL and chi-square

def test_kl_chi2_examples():
    assert kl_chi2([0.3, 0.7], [0.3, 0.7]) == (0.0, 0.0)
    kl, chi2 = kl_chi2([0.5, 0.5], [0.25, 0.75])
    assert kl == pytest.approx(0.5 * math.log(2) + 0.5 * math.log(2 / 3))
    assert kl == pytest.approx(0.14384, abs=1e-5)
    assert chi2 == pytest.approx(1 / 3)
    kl, chi2 = kl_chi2([0.0, 1.0], [0.5, 0.5])
    assert math.isfinite(kl) and math.isfinite(chi2)
    assert kl_chi2({"a": 0.5, "b": 0.5}, {"a": 0.25, "b": 0.75})[1] == pytest.approx(1 / 3)
    with pytest.raises(ValidationError):
        kl_chi2([0.5, 0.5], [1.0, 0.0])


@settings(max_examples=200)
@given(seed=st.integers(0, 2 ** 32 - 1), size=st.integers(2, 20))
def test_kl_below_chi2(seed, size):
    rng = np.random.default_rng(seed)
    P = rng.dirichlet(np.ones(size))
    Q = rng.dirichlet(np.ones(size))
    kl, chi2 = kl_chi2(P, Q)
    assert 0 <= kl < chi2
    assert kl_chi2(P, P)[1] == 0.0 and kl_chi2(P, P)[0] <= 1e-15


# Le Cam construction

def test_lecam_pair_binary_example():
    p = lecam_pair(100, 2)
    assert np.allclose(p.P0, [0.5125, 0.4875])
    assert np.allclose(p.P1, [0.4875, 0.5125])
    assert p.chi2_step == pytest.approx(0.025 ** 2 / 0.5125 + 0.025 ** 2 / 0.4875)
    assert p.chi2_step == pytest.approx(0.0025016, abs=1e-7)
    assert p.chi2_step <= 0.01
    assert lecam_pair(100, 2, K=2).minimax_value == pytest.approx(math.exp(-1) / 10 / 16)


def test_lecam_pair_three_symbols():
    n = 64
    p = lecam_pair(n, 3)
    h = 1 / (8 * math.sqrt(n))
    assert np.allclose(p.P0, [0.25 + h + 0.125, 0.25 - h + 0.125, 0.25])
    assert p.P0.sum() == pytest.approx(1.0, abs=1e-12)


def test_lecam_infinite_alphabet_and_margin():
    p = lecam_pair(100, None)
    assert p.P0.sum() == pytest.approx(1.0, abs=1e-12)
    m = lecam_pair(100, 3, regime="margin", delta_n=0.1)
    assert m.perturbation == pytest.approx(0.0125)
    assert m.chi2_step <= 0.01
    assert m.minimax_value == pytest.approx(0.1 * math.exp(-1.0) / 4)
    with pytest.raises(ValidationError):
        lecam_pair(100, 3, regime="margin")


@pytest.mark.parametrize("n", [4, 16, 100, 10 ** 4])
@pytest.mark.parametrize("A", [2, 3, 5, None])
def test_lecam_grid(n, A):
    p = lecam_pair(n, A)
    assert abs(p.P0.sum() - 1) <= 1e-12 and abs(p.P1.sum() - 1) <= 1e-12
    assert p.chi2_step <= 1 / n
    back = p.swapped().swapped()
    assert np.array_equal(back.P0, p.P0) and np.array_equal(back.P1, p.P1)
    assert np.array_equal(p.P1[[1, 0]], p.P0[[0, 1]])
    assert np.array_equal(p.P1[2:], p.P0[2:])


# optimal-test error

def test_bayes_error_examples():
    same = LeCamPair(np.array([0.3, 0.7]), np.array([0.3, 0.7]))
    assert bayes_error_oracle(same, 5) == 0.5
    p = LeCamPair(np.array([0.6, 0.4]), np.array([0.4, 0.6]))
    assert bayes_error_oracle(p, 1) == pytest.approx(0.4)
    with pytest.raises(ValidationError):
        bayes_error_oracle(p, 10 ** 6 + 1)


def brute_average_error(P0, P1, n):
    """Half the overlap mass min(P0^n, P1^n) summed over every sequence."""
    tot = 0.0
    for x in itertools.product(range(len(P0)), repeat=n):
        tot += min(np.prod(P0[list(x)]), np.prod(P1[list(x)]))
    return 0.5 * tot


@pytest.mark.parametrize("n,A", [(1, 2), (4, 2), (7, 2), (5, 3), (6, 4)])
def test_bayes_error_matches_enumeration(n, A):
    p = lecam_pair(max(n, 2), A)
    assert bayes_error_oracle(p, n) == pytest.approx(brute_average_error(p.P0, p.P1, n), abs=1e-12)


def test_testing_report_n100():
    rep = lecam_testing_report(lecam_pair(100, 2))
    assert rep["bayes_error"] >= math.exp(-1) / 2
    assert rep["kl"] <= rep["kl_bound"] <= 1
    assert rep["classical_holds"]
    assert rep["one_minus_tv"] == pytest.approx(2 * rep["bayes_error"])


# Gibbs calculus

def test_ising_alpha4():
    r = ising_gamma(4.0)
    assert all(math.isfinite(v) for v in r.series_bounds)
    assert 0 <= r.n_star < 100
    assert r.lower_bound > 0
    assert r.h0 == pytest.approx(1 / (1 + math.exp(4 * zeta(4))), rel=1e-12)
    assert r.h0 == pytest.approx(ising_h0(4.0), rel=1e-12)


def test_ising_alpha3_diverges():
    with pytest.raises(DivergentSeriesError, match="not verifiable"):
        ising_gamma(3.0)
    with pytest.raises(DivergentSeriesError):
        gibbs_gamma({1: 1.0}, 2, tail=PowerTail(2.0, 2.5))


def test_ising_gamma_monotone_in_alpha():
    values = [ising_gamma(a).lower_bound for a in (3.5, 4.0, 5.0)]
    assert values[0] < values[1] < values[2]


def test_ising_series_bound_against_direct_sum():
    # Var_1 bound for alpha = 4: sum_{i>=1} S(ceil(i/2)) with S(m) = 2 sum_{l>=m} l^-4.
    # Each m appears twice, and sum_m S(m) = 2 sum_l l * l^-4 = 2 zeta(3).
    r = ising_gamma(4.0, horizon=4096)
    assert r.series_bounds[1] == pytest.approx(4 * zeta(3), rel=1e-6)
    assert r.series_bounds[1] >= 4 * zeta(3)  # majorant, never below the true value


def test_finite_range_potential():
    r_range = 3
    osc = {m: 0.05 for m in range(1, r_range + 1)}
    rep = gibbs_gamma(osc, 2, k_max=10)
    v = rep.series_bounds
    assert all(x == 0 for x in v[2 * r_range + 1:])
    assert v[2 * r_range] > 0  # i = 2r still admits the span-r shape
    assert 0 < rep.lower_bound <= 1 and rep.tail_sum == 0


def test_general_shapes_aggregate_by_span():
    shapes = [((0, 2), 0.1), ((0, 1, 2), 0.05), ((5, 6), 0.02)]
    rep = gibbs_gamma(shapes, 3, k_max=6)
    same = gibbs_gamma({2: 0.15, 1: 0.02}, 3, k_max=6)
    assert rep.series_bounds == pytest.approx(same.series_bounds, abs=1e-14)
    # the three-site shape has three translates covering the origin, pairs have two
    assert rep.h0 == pytest.approx(1 / (1 + 2 * math.exp(2 * 0.1 + 3 * 0.05 + 2 * 0.02)))
    assert same.h0 == pytest.approx(1 / (1 + 2 * math.exp(2 * 0.15 + 2 * 0.02)))


@settings(max_examples=30, deadline=None)
@given(osc=st.dictionaries(st.integers(1, 6), st.floats(0, 0.2), min_size=1, max_size=6))
def test_series_bounds_non_increasing(osc):
    rep = gibbs_gamma(osc, 2, k_max=14)
    v = rep.series_bounds
    assert all(a >= b for a, b in zip(v, v[1:]))
    assert all(x <= 1 - rep.h0 + 1e-15 for x in rep.var_bounds)
