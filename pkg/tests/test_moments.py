import cmath
import math

import numpy as np
import pytest

import zetamoments as zm
from zetamoments.errors import EvaluationRangeError, NumericalInconsistencyError
from zetamoments.moments import (dirichlet_poly_at_zeros, interchange_offdiagonal_pairs,
                                 sigma2_complex_path)
from zetamoments.summation import kahan_sum, pairwise_sum

import oracles


# --- Dirichlet polynomial ---

def test_dirichlet_poly_trivia():
    for s in (complex(0.3, 4.0), complex(1.5, -20.0)):
        assert zm.dirichlet_poly(1.0, s) == 1.0
    assert zm.dirichlet_poly(3.0, complex(0.0, 0.0)) == pytest.approx(3.0, abs=1e-15)
    two_term = 1.0 + 2.0 ** -0.5
    assert zm.dirichlet_poly(2.0, complex(0.5, 0.0)) == pytest.approx(two_term, abs=1e-15)
    assert zm.dirichlet_poly(2.0, complex(0.5, 0.0)) == pytest.approx(1.70711, abs=5e-6)


def test_dirichlet_poly_at_zeros_matches_scalar(zeros_100):
    xi = 7.3
    vec = dirichlet_poly_at_zeros(xi, zeros_100.gammas)
    for i, g in enumerate(zeros_100.gammas[:5]):
        assert abs(vec[i] - zm.dirichlet_poly(xi, complex(0.5, g))) < 1e-13


# --- J_k ---

def test_moment_jk_k0_is_exactly_one(zeros_100, profile_100):
    rep = zm.moment_jk(zeros_100, 0, zeta_prime_abs=np.abs(profile_100))
    assert rep.jk == 1.0
    assert rep.jk_unnormalized == float(len(zeros_100))


def test_moment_jk_homogeneity(zeros_100, profile_100):
    base = zm.moment_jk(zeros_100, 2, zeta_prime_abs=np.abs(profile_100))
    doubled = zm.moment_jk(zeros_100, 2, zeta_prime_abs=2.0 * np.abs(profile_100))
    assert doubled.jk == (2.0 ** 4) * base.jk


def test_moment_j1_against_finite_difference_oracle(zeros_100, profile_100):
    # oracle: |Z'(gamma)|^2 summed outside the package, derivative from an
    # independent evaluator
    oracle_sum = math.fsum(oracles.hardy_z_prime_oracle(g) ** 2
                           for g in zeros_100.gammas)
    rep = zm.moment_jk(zeros_100, 1, zeta_prime_abs=np.abs(profile_100))
    assert rep.jk_unnormalized == pytest.approx(oracle_sum, rel=1e-6)
    assert rep.jk == rep.jk_unnormalized / len(zeros_100)


def test_moment_jk_validation(zeros_100):
    with pytest.raises(EvaluationRangeError):
        zm.moment_jk(zeros_100, -1)


# --- sigma1 / sigma2 ---

def test_sigma1_xi_one_is_sum_of_zeta_prime(zeros_100, profile_100):
    s1 = zm.sigma1_direct(zeros_100, 1, 1.0, zeta_prime=profile_100)
    assert s1 == pairwise_sum(profile_100)


def test_sigma1_against_termwise_oracle(zeros_100, profile_100):
    # independent summation: per-zero zeta' from the oracle, plain sum
    oracle = sum(oracles.zeta_oracle(complex(0.5, g), derivative=1)
                 for g in zeros_100.gammas)
    s1 = zm.sigma1_direct(zeros_100, 1, 1.0, zeta_prime=profile_100)
    assert abs(s1 - oracle) / abs(oracle) < 1e-6


def test_sigma1_conjugation_equals_reflected_polynomial(zeros_100, profile_100):
    # A(1 - rho) computed literally agrees with conj(A(rho)) to rounding
    k, xi = 2, 4.0
    s1 = zm.sigma1_direct(zeros_100, k, xi, zeta_prime=profile_100)
    a = dirichlet_poly_at_zeros(xi, zeros_100.gammas)
    reflected = np.array([zm.dirichlet_poly(xi, complex(0.5, -g))
                          for g in zeros_100.gammas])
    alt = pairwise_sum(profile_100 * a ** (k - 1) * reflected**k)
    assert abs(alt - s1) <= 1e-12 * abs(s1)


def test_sigma2_xi_one_is_zero_count(zeros_100):
    assert zm.sigma2_direct(zeros_100, 1, 1.0) == float(len(zeros_100))
    assert zm.sigma2_direct(zeros_100, 3, 1.0) == float(len(zeros_100))


def test_sigma2_against_brute_force(zeros_100):
    ref = math.fsum(abs(1.0 + 2.0 ** complex(-0.5, -g)) ** 2
                    for g in zeros_100.gammas)
    got = zm.sigma2_direct(zeros_100, 1, 2.0)
    assert got == pytest.approx(ref, abs=1e-8)


def test_sigma2_nonnegative_and_real(zeros_1000):
    for k, xi in ((1, 5.0), (2, 3.0), (3, 2.0)):
        val = zm.sigma2_direct(zeros_1000, k, xi)
        assert val >= 0.0
        cplx = sigma2_complex_path(zeros_1000, k, xi)
        assert abs(cplx.imag) <= 1e-10 * abs(val)
        assert cplx.real == pytest.approx(val, rel=1e-12)


# --- Hoelder bound ---

def test_holder_cauchy_schwarz_instance(zeros_100, profile_100):
    s1 = zm.sigma1_direct(zeros_100, 1, 1.0, zeta_prime=profile_100)
    n = float(len(zeros_100))
    bound = zm.holder_lower_bound(s1, n, 1)
    assert bound == pytest.approx(abs(s1) ** 2 / n, rel=1e-10)
    moment = zm.moment_jk(zeros_100, 1, zeta_prime_abs=np.abs(profile_100))
    assert moment.jk_unnormalized >= bound


def test_holder_zero_sigma1():
    assert zm.holder_lower_bound(0j, 5.0, 2) == 0.0


def test_holder_log_space_matches_direct():
    for s1, s2, k in ((complex(3.0, 4.0), 7.0, 1), (complex(-20.0, 5.0), 123.0, 3)):
        direct = abs(s1) ** (2 * k) / s2 ** (2 * k - 1)
        assert zm.holder_lower_bound(s1, s2, k) == pytest.approx(direct, rel=1e-10)


def test_holder_rejects_nonpositive_sigma2():
    with pytest.raises(EvaluationRangeError):
        zm.holder_lower_bound(1.0 + 0j, 0.0, 1)


# --- divisor-sum side ---

def test_s11_k1_is_harmonic():
    h7 = kahan_sum(1.0 / np.arange(1, 8, dtype=float))
    assert zm.s11_divisor_sum(1, 7.9) == pytest.approx(h7, rel=1e-14)


def test_s11_against_triple_loop():
    k, xi = 2, 4.0
    cap = int(xi)
    # direct enumeration over tuples: m = product of (k-1)-tuple, n free
    total = 0.0
    terms = []
    for a in range(1, cap + 1):          # tau_1(m; xi) support: m = a
        m = a
        if m > cap ** (k - 1):
            continue
        n = 1
        while m * n <= cap**k:
            # tau_2(mn; xi) by pair enumeration
            t2 = sum(1 for u in range(1, cap + 1) for v in range(1, cap + 1)
                     if u * v == m * n)
            terms.append(t2 / (m * n))
            n += 1
    total = math.fsum(terms)
    assert zm.s11_divisor_sum(k, xi) == pytest.approx(total, rel=1e-12)


def test_s11_dominates_truncated_square_sum():
    for k, xi in ((2, 20.0), (2, 10.0), (3, 4.0)):
        assert zm.s11_divisor_sum(k, xi) >= zm.truncated_square_sum(k, xi)


def test_sigma2_diagonal(zeros_100):
    h10 = kahan_sum(1.0 / np.arange(1, 11, dtype=float))
    got = zm.sigma2_diagonal(zeros_100, 1, 10.0)
    assert got == pytest.approx(29.0 * h10, rel=1e-13)
    assert zm.sigma2_diagonal(zeros_100, 2, 1.0) == float(len(zeros_100))


# --- interchange identity ---

def test_interchange_residual_zero_at_xi_one(zeros_100):
    assert zm.sigma2_interchange_check(zeros_100, 1, 1.0) == 0.0


def test_interchange_residual_tiny(zeros_100):
    for k in (1, 2):
        assert zm.sigma2_interchange_check(zeros_100, k, 3.0) < 1e-8


def test_interchange_rejects_large_support(zeros_100):
    with pytest.raises(EvaluationRangeError):
        zm.sigma2_interchange_check(zeros_100, 2, 100.0)


def test_interchange_offdiagonal_mangoldt_terms():
    ms, ns, weights, lams = interchange_offdiagonal_pairs(2, 3.0)
    assert np.all(lams >= 0.0)
    assert np.all(weights > 0.0)
    # nonzero Lambda appears exactly on integer prime-power ratios
    for m, n, lam in zip(ms, ns, lams):
        if n % m == 0:
            ratio = n // m
            is_pp = zm.build_sieve(max(ratio, 2)).von_mangoldt[ratio] > 0
            assert (lam > 0) == bool(is_pp)
        else:
            assert lam == 0.0


# --- fits and scans ---

def test_scaling_fit_exact_power_law():
    pts = [(T, math.log(T) ** 3) for T in (100.0, 1000.0, 5000.0, 20000.0)]
    assert zm.scaling_fit(pts) == pytest.approx(3.0, abs=1e-9)


def test_scaling_fit_flat_data():
    pts = [(T, 2.5) for T in (100.0, 1000.0, 10000.0)]
    assert zm.scaling_fit(pts) == pytest.approx(0.0, abs=1e-12)


def test_scaling_fit_rejects_degenerate_input():
    with pytest.raises(EvaluationRangeError):
        zm.scaling_fit([(100.0, 1.0), (200.0, 2.0)])
    with pytest.raises(EvaluationRangeError):
        zm.scaling_fit([(100.0, 1.0), (100.0, 2.0), (300.0, 3.0)])
    with pytest.raises(EvaluationRangeError):
        zm.scaling_fit([(100.0, 1.0), (200.0, -2.0), (300.0, 3.0)])


def test_large_value_scan_thresholds(zeros_1000, profile_1000):
    mags = np.abs(profile_1000)
    nearly_all = zm.large_value_scan(zeros_1000, 1e-9, zeta_prime_abs=mags)
    assert len(nearly_all) == int(np.count_nonzero(
        mags >= np.log(zeros_1000.gammas) ** 1e-9))
    assert len(nearly_all) > 0
    assert zm.large_value_scan(zeros_1000, 100.0, zeta_prime_abs=mags) == []
    hits = zm.large_value_scan(zeros_1000, 1.0, zeta_prime_abs=mags)
    assert len(hits) > 0
    gs = [g for g, _ in hits]
    assert gs == sorted(gs)
    for g, v in hits[:5]:
        # independent recomputation of the membership criterion
        ref = abs(oracles.zeta_oracle(complex(0.5, g), derivative=1))
        assert v == pytest.approx(ref, rel=1e-8)
        assert ref >= math.log(g) ** 1.0 * (1.0 - 1e-9)


def test_large_value_scan_rejects_negative_exponent(zeros_100):
    with pytest.raises(EvaluationRangeError):
        zm.large_value_scan(zeros_100, -0.5)


# --- orchestration ---

def test_compute_moment_report_fields(zeros_100):
    xi = zm.default_xi(100.0, 1)
    rep = zm.compute_moment_report(zeros_100, 1, xi)
    assert rep.n_zeros == 29
    assert rep.jk == rep.jk_unnormalized / 29
    assert rep.sigma2 > 0.0
    assert rep.jk_unnormalized >= rep.holder_bound
    d = rep.to_dict()
    assert set(d["sigma1"]) == {"re", "im"}
    assert d["n_zeros"] == 29


def test_zeta_prime_profile_thread_invariance(zeros_100, profile_100):
    again = zm.zeta_prime_profile(zeros_100, threads=2)
    assert np.array_equal(again, profile_100)


def test_default_xi():
    assert zm.default_xi(10000.0, 1) == pytest.approx(10.0)
    assert zm.default_xi(256.0, 2) == pytest.approx(2.0)
