"""
Tests for Step 1: special functions, orthonormal polynomials, kernels, hard-edge counts, Tracy-Widom reference.
"""
import math

import mpmath
import numpy as np
import pytest
from numpy.polynomial import legendre
from scipy import integrate as sp_integrate
from scipy import special

from projsum import densities, specfun
from projsum.spectra import Interval
from projsum.specfun import BesselOrder, DomainError, JacobiParams


# ---- gamma ----


def test_gamma_examples():
    """Step 1: Gamma(1) = 1, Gamma(1/2) = sqrt(pi), Gamma(5) = 24."""
    assert specfun.gamma_fn(1) == pytest.approx(1.0, rel=1e-12)
    assert specfun.gamma_fn(0.5) == pytest.approx(1.7724538509055159, rel=1e-12)
    assert specfun.gamma_fn(5) == pytest.approx(24.0, rel=1e-12)


def test_gamma_relative_accuracy_on_grid():
    """Step 1: gamma_fn agrees with an mpmath oracle to 1e-12 relative on [0.5, 50]."""
    for x in np.linspace(0.5, 50, 60):
        assert specfun.gamma_fn(x) == pytest.approx(float(mpmath.gamma(x)), rel=1e-12)


@pytest.mark.parametrize("x", [0, -1, -7])
def test_gamma_poles_raise(x):
    """Step 1: non-positive integers are poles."""
    with pytest.raises(DomainError, match="pole"):
        specfun.gamma_fn(x)


# ---- Bessel ----


def test_bessel_examples():
    """Step 1: J_0(0) = 1, J_{1/2}(pi/2) = 2/pi, first zero of J_0, reflection at -1."""
    assert specfun.bessel_j(0, 0.0) == 1.0
    assert specfun.bessel_j(0.5, math.pi / 2) == pytest.approx(2 / math.pi, abs=1e-12)
    assert abs(specfun.bessel_j(0, 2.4048256)) < 1e-6
    assert specfun.bessel_j(-1, 1.3) == pytest.approx(-specfun.bessel_j(1, 1.3), abs=1e-15)


def test_bessel_limits_at_zero():
    """Step 1: limit values at 0 for nonnegative non-integer orders."""
    assert specfun.bessel_j(0.5, 0.0) == 0.0
    assert specfun.bessel_j(2.5, 0.0) == 0.0


def test_bessel_against_mpmath():
    """Step 1: absolute error <= 1e-10 on x in [0, 50], nu in [-1, 20]."""
    xs = np.linspace(0.0, 50.0, 41)
    for nu in (-1, 0, 0.5, 1, 1.5, 3, 7.25, 20):
        values = specfun.bessel_j(nu, xs)
        for x, v in zip(xs, values):
            assert v == pytest.approx(float(mpmath.besselj(nu, x)), abs=1e-10)


def test_bessel_reflection():
    """Step 1: J_{-m} = (-1)^m J_m for integer m on [0, 10]."""
    xs = np.linspace(0.0, 10.0, 101)
    for m in range(6):
        diff = specfun.bessel_j(-m, xs) - (-1) ** m * specfun.bessel_j(m, xs)
        assert np.max(np.abs(diff)) <= 1e-12


def test_bessel_recurrence():
    """Step 1: J_{nu-1} + J_{nu+1} = (2 nu / x) J_nu on [0.1, 20]."""
    xs = np.linspace(0.1, 20.0, 200)
    for nu in (0.5, 1, 1.5, 2, 5):
        lhs = specfun.bessel_j(nu - 1, xs) + specfun.bessel_j(nu + 1, xs)
        rhs = 2 * nu / xs * specfun.bessel_j(nu, xs)
        assert np.max(np.abs(lhs - rhs)) <= 1e-8


def test_bessel_domain_errors():
    """Step 1: x < 0 and orders below -1 that are not integers are rejected."""
    with pytest.raises(DomainError):
        specfun.bessel_j(0, -0.1)
    with pytest.raises(DomainError):
        BesselOrder(-1.5)
    with pytest.raises(DomainError):
        BesselOrder(float("inf"))
    with pytest.raises(DomainError):
        specfun.bessel_j(-0.5, 0.0)


# ---- recurrence and polynomials ----


def test_jacobi_params_validation():
    """Step 1: weight must be integrable and n positive."""
    with pytest.raises(DomainError):
        JacobiParams(0, 0, 0)
    with pytest.raises(DomainError):
        JacobiParams(3, -1, 0)
    with pytest.raises(DomainError):
        JacobiParams(3, 0, -1.5)


def test_jacobi_recurrence_shifted_legendre():
    """Step 1: n=2, a=b=0 gives diag (1/2, 1/2), offdiag 1/(2 sqrt 3), norm0 1."""
    table = specfun.jacobi_recurrence(JacobiParams(2, 0, 0))
    np.testing.assert_allclose(table.diag, [0.5, 0.5], atol=1e-15)
    np.testing.assert_allclose(table.offdiag, [1 / (2 * math.sqrt(3))], atol=1e-15)
    assert table.norm0 == pytest.approx(1.0, abs=1e-15)


def test_jacobi_recurrence_single_point():
    """Step 1: n=1 with unit weight gives Q_0 = 1."""
    table = specfun.jacobi_recurrence(JacobiParams(1, 0, 0))
    assert table.offdiag.size == 0
    q = specfun.orthonormal_polynomials(table, [0.0, 0.37, 1.0])
    np.testing.assert_allclose(q, [[1.0, 1.0, 1.0]], atol=1e-15)


@pytest.mark.parametrize("n,a,b", [(3, 1, 2), (12, 0.5, 2), (8, 0, 0), (20, 3, 1)])
def test_jacobi_recurrence_matches_moment_cholesky(n, a, b):
    """Step 1: closed-form coefficients match the extended-precision moment path to 1e-10."""
    params = JacobiParams(n, a, b)
    closed = specfun.jacobi_recurrence(params)
    moments = specfun.moment_recurrence(params)
    np.testing.assert_allclose(closed.diag, moments.diag, atol=1e-10)
    np.testing.assert_allclose(closed.offdiag, moments.offdiag, atol=1e-10)
    assert closed.norm0 == pytest.approx(moments.norm0, abs=1e-12)


def test_moment_recurrence_size_limit():
    """Step 1: the moment path is a small-n cross-check only."""
    with pytest.raises(DomainError):
        specfun.moment_recurrence(JacobiParams(31, 0, 0))


@pytest.mark.parametrize("n,a,b", [(10, 2, 3), (25, 0.5, 0), (6, 0, 4)])
def test_gram_matrix_is_identity(n, a, b):
    """Step 1: Gauss-Jacobi quadrature of Q_j Q_k gives the identity to 1e-8."""
    nodes, weights = special.roots_jacobi(2 * n + 4, b, a)
    x = (nodes + 1) / 2
    w = weights / 2 ** (a + b + 1)
    q = specfun.orthonormal_polynomials(specfun.jacobi_recurrence(JacobiParams(n, a, b)), x)
    gram = (q * w) @ q.T
    np.testing.assert_allclose(gram, np.eye(n), atol=1e-8)


def test_recurrence_table_invariants():
    """Step 1: offdiag must be positive and of length n-1."""
    with pytest.raises(ValueError):
        specfun.RecurrenceTable(np.zeros(3), np.ones(3), 1.0)
    with pytest.raises(ValueError):
        specfun.RecurrenceTable(np.zeros(3), np.array([1.0, 0.0]), 1.0)


# ---- Christoffel-Darboux kernel ----


def test_cd_kernel_single_point_unit_weight():
    """Step 1: n=1, a=b=0 gives K = 1 everywhere."""
    assert specfun.cd_kernel(JacobiParams(1, 0, 0), 0.3, 0.8) == pytest.approx(1.0, abs=1e-14)


def test_cd_kernel_diagonal_nonnegative_and_symmetric():
    """Step 1: diagonal >= 0 and K(x, y) = K(y, x)."""
    params = JacobiParams(7, 1.5, 2)
    assert specfun.cd_kernel(params, 0.5, 0.5) >= 0
    assert specfun.cd_kernel(params, 0.2, 0.9) == pytest.approx(specfun.cd_kernel(params, 0.9, 0.2), abs=1e-14)


def test_cd_kernel_matches_shifted_legendre_sum():
    """Step 1: n=3, a=b=0 at x=y=0.2 equals sum (2k+1) P_k(2x-1)^2."""
    y = 2 * 0.2 - 1
    expected = sum((2 * k + 1) * legendre.legval(y, [0] * k + [1]) ** 2 for k in range(3))
    assert specfun.cd_kernel(JacobiParams(3, 0, 0), 0.2, 0.2) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(2.088, abs=1e-12)


def test_cd_kernel_domain():
    """Step 1: arguments outside [0, 1] raise."""
    with pytest.raises(DomainError):
        specfun.cd_kernel(JacobiParams(3, 0, 0), -0.1, 0.5)
    with pytest.raises(DomainError):
        specfun.cd_kernel(JacobiParams(3, 0, 0), 0.5, 1.2)


@pytest.mark.parametrize("n,a,b", [(5, 0, 0), (10, 2, 3), (20, 1, 0)])
def test_cd_kernel_diagonal_integrates_to_n(n, a, b):
    """Step 1: int_0^1 K_n(x, x) dx = n under the densities quadrature."""
    params = JacobiParams(n, a, b)
    mass = densities.integrate(lambda x: specfun.cd_kernel(params, x, x), Interval(0.0, 1.0))
    assert mass == pytest.approx(n, abs=1e-6)


@pytest.mark.parametrize("n,a,b", [(3, 0, 0), (4, 1, 0), (5, 2, 1)])
def test_cd_kernel_reproducing(n, a, b):
    """Step 1: int K(x, z) K(z, y) dz = K(x, y)."""
    params = JacobiParams(n, a, b)
    for x, y in ((0.2, 0.7), (0.5, 0.5), (0.9, 0.1)):
        value = densities.integrate(
            lambda z: specfun.cd_kernel(params, x, z) * specfun.cd_kernel(params, z, y), Interval(0.0, 1.0)
        )
        assert value == pytest.approx(specfun.cd_kernel(params, x, y), abs=1e-6)


@pytest.mark.parametrize("a", [0, 1, 2])
@pytest.mark.parametrize("b", [0, 1])
def test_hard_edge_scaling_limit(a, b):
    """Step 1: (1/(2n^2)) K_n(t^2/(4n^2)) approaches the Bessel diagonal at n=200."""
    n = 200
    params = JacobiParams(n, a, b)
    for t in (0.5, 1.0, 2.0):
        x = specfun.hard_edge_scale(n, t)
        scaled = specfun.cd_kernel(params, x, x) / (2 * n**2)
        assert scaled == pytest.approx(specfun.bessel_kernel_diag_complex(a, t), abs=0.02)


def test_hard_edge_printed_scale_is_sqrt2_argument():
    """Step 1: the t^2/(2n^2) scale lands on the Bessel diagonal at sqrt(2) t."""
    n = 200
    params = JacobiParams(n, 0, 0)
    for t in (0.5, 1.0, 2.0):
        x = specfun.hard_edge_scale(n, t, specfun.SCALE_PRINTED)
        scaled = specfun.cd_kernel(params, x, x) / (2 * n**2)
        assert scaled == pytest.approx(specfun.bessel_kernel_diag_complex(0, math.sqrt(2) * t), abs=0.02)
    with pytest.raises(DomainError):
        specfun.hard_edge_scale(n, 1.0, "other")


# ---- hard-edge kernels and counts ----


def test_bessel_kernel_diag_examples():
    """Step 1: value 1/2 at (0, 0), 0 at (2, 0), oracle at (0, 1)."""
    assert specfun.bessel_kernel_diag_complex(0, 0.0) == pytest.approx(0.5, abs=1e-15)
    assert specfun.bessel_kernel_diag_complex(2, 0.0) == 0.0
    oracle = 0.5 * (mpmath.besselj(0, 1) ** 2 + mpmath.besselj(1, 1) ** 2)
    assert specfun.bessel_kernel_diag_complex(0, 1.0) == pytest.approx(float(oracle), abs=1e-12)


def test_bessel_kernel_diag_nonnegative():
    """Step 1: the complex hard-edge diagonal is nonnegative."""
    ts = np.linspace(0, 30, 301)
    for a in range(4):
        assert np.all(specfun.bessel_kernel_diag_complex(a, ts) >= -1e-15)


def test_complex_count_examples():
    """Step 1: zero at t=0; t^2/2 - t^4/16 + t^6/192 at t=0.2; mpmath oracle at t=1."""
    assert specfun.hard_edge_count_complex(0, 0.0) == 0.0
    t = 0.2
    series = t**2 / 2 - t**4 / 16 + t**6 / 192
    assert specfun.hard_edge_count_complex(0, t) == pytest.approx(series, abs=1e-8)
    assert specfun.hard_edge_count_complex(0, t) == pytest.approx(0.02, abs=2e-4)
    oracle = mpmath.quad(lambda x: x * (mpmath.besselj(0, x) ** 2 + mpmath.besselj(1, x) ** 2), [0, 1])
    assert specfun.hard_edge_count_complex(0, 1.0) == pytest.approx(float(oracle), abs=1e-9)


def test_complex_count_trapezoid_oracle():
    """Step 1: t=1 agrees with a fine-grid trapezoid rule to 1e-8."""
    x = np.linspace(0, 1, 200001)
    f = x * (special.jv(0, x) ** 2 + special.jv(1, x) ** 2)
    assert specfun.hard_edge_count_complex(0, 1.0) == pytest.approx(sp_integrate.trapezoid(f, x), abs=1e-8)


@pytest.mark.parametrize("a", [0, 1, 2])
def test_complex_count_leading_term(a):
    """Step 1: count / t^(2a+2) -> 2 / ((a+1)!^2 2^(2a+2)) at t=0.05 within 5%."""
    coeff, exponent = specfun.complex_count_leading_term(a)
    assert exponent == 2 * a + 2
    assert coeff == pytest.approx(2 / (math.factorial(a + 1) ** 2 * 2 ** (2 * a + 2)))
    t = 0.05
    assert specfun.hard_edge_count_complex(a, t) / t**exponent == pytest.approx(coeff, rel=0.05)


def test_real_count_zero_and_nonnegative():
    """Step 1: real count is 0 at t=0 and nonnegative, for both index choices."""
    for index in (specfun.INDEX_PRINTED, specfun.INDEX_WEIGHT):
        assert specfun.hard_edge_count_real(0, 0.0, index) == 0.0
        for t in (0.1, 1.0, 5.0, 12.0):
            assert specfun.hard_edge_count_real(1, t, index) >= 0


def test_real_count_small_t_printed_index():
    """Step 1: printed index at a=0 grows like C t^(3/2) with C = (2/3) sqrt(2/pi), twice the closed form quoted for it."""
    coeff, exponent = specfun.real_count_leading_term(0, specfun.INDEX_PRINTED)
    assert exponent == pytest.approx(1.5)
    assert coeff == pytest.approx(2 / 3 * math.sqrt(2 / math.pi), rel=1e-12)
    t = 0.01
    assert specfun.hard_edge_count_real(0, t) / t**1.5 == pytest.approx(coeff, rel=0.01)
    quoted = specfun.printed_real_coefficient(0)
    assert quoted == pytest.approx(1 / (3 * math.sqrt(math.pi / 2)), rel=1e-12)
    assert coeff / quoted == pytest.approx(2.0, rel=1e-12)


@pytest.mark.parametrize("a", [0, 1, 2])
def test_real_count_small_t_weight_index(a):
    """Step 1: weight index grows like t^(a+1) / (2^a (a+1)!)."""
    coeff, exponent = specfun.real_count_leading_term(a, specfun.INDEX_WEIGHT)
    assert exponent == a + 1
    assert coeff == pytest.approx(1 / (2**a * math.factorial(a + 1)), rel=1e-12)
    t = 0.01
    assert specfun.hard_edge_count_real(a, t, specfun.INDEX_WEIGHT) / t**exponent == pytest.approx(coeff, rel=0.01)


def test_real_count_nested_trapezoid_oracle():
    """Step 1: (a=1, t=0.5) matches a nested trapezoid evaluation of both integrals to 1e-7."""
    x = np.linspace(0, 0.5, 200001)
    j1 = special.jv(1, x)
    first = sp_integrate.trapezoid(x * (j1**2 - special.jv(2, x) * special.jv(0, x)), x)
    inner = sp_integrate.cumulative_trapezoid(j1, x, initial=0.0)
    second = sp_integrate.trapezoid(j1 * (1 - inner), x)
    assert specfun.hard_edge_count_real(1, 0.5) == pytest.approx(first + second, abs=1e-7)


@pytest.mark.parametrize("t, kept, flipped", [(0.1, 0.016809, -0.016526), (1.0, 0.498147, -0.246945)])
def test_real_count_second_term_sign(t, kept, flipped):
    """Step 1: the (F - 1) variant differs by 2F - F^2 and goes negative; the (1 - F) count is the one kept."""
    one_minus = specfun.hard_edge_count_real(0, t)
    minus_one = specfun.hard_edge_count_real(0, t, specfun.INDEX_PRINTED, specfun.FACTOR_MINUS_ONE)
    assert one_minus == pytest.approx(kept, abs=1e-5)
    assert minus_one == pytest.approx(flipped, abs=1e-5)
    big_f = sp_integrate.quad(lambda x: special.jv(0.5, x), 0, t, epsabs=1e-13)[0]
    assert one_minus - minus_one == pytest.approx(2 * big_f - big_f**2, abs=1e-9)
    assert minus_one < 0
    with pytest.raises(DomainError):
        specfun.hard_edge_count_real(0, t, specfun.INDEX_PRINTED, "other")


def test_counts_monotone_and_continuous():
    """Step 1: the complex count is nondecreasing; both counts are continuous on a grid."""
    ts = np.linspace(0, 6, 61)
    for a in (0, 1):
        values = np.array([specfun.hard_edge_count_complex(a, t) for t in ts])
        assert np.all(np.diff(values) >= -1e-12)
    for count in (
        lambda t: specfun.hard_edge_count_complex(1, t),
        lambda t: specfun.hard_edge_count_real(0, t),
        lambda t: specfun.hard_edge_count_real(2, t, specfun.INDEX_WEIGHT),
    ):
        values = np.array([count(t) for t in ts])
        assert np.max(np.abs(np.diff(values))) < 0.5


def test_interval_count_theory_conventions():
    """Step 1: corrected scale halves the count at sqrt(2) t; printed scale uses t."""
    t = 0.7
    assert specfun.interval_count_theory(0, t, 2) == pytest.approx(
        0.5 * specfun.hard_edge_count_complex(0, math.sqrt(2) * t), abs=1e-14
    )
    assert specfun.interval_count_theory(0, t, 2, specfun.SCALE_PRINTED) == pytest.approx(
        specfun.hard_edge_count_complex(0, t), abs=1e-14
    )
    # leading term t^2/2 is the same under both conventions for a = 0
    small = 0.05
    assert specfun.interval_count_theory(0, small, 2) == pytest.approx(small**2 / 2, rel=1e-3)
    with pytest.raises(DomainError):
        specfun.interval_count_theory(0, t, 4)


def test_count_argument_errors():
    """Step 1: negative t and non-integer a are rejected."""
    with pytest.raises(DomainError):
        specfun.hard_edge_count_complex(0, -1.0)
    with pytest.raises(DomainError):
        specfun.hard_edge_count_real(0.5, 1.0)
    with pytest.raises(DomainError):
        specfun.hard_edge_count_real(0, 1.0, "other")


# ---- Tracy-Widom reference ----


def test_tw_reference_moments():
    """Step 1: literature means and variances."""
    tw2 = specfun.tw_reference(2)
    assert tw2.mean == pytest.approx(-1.7711, abs=1e-4)
    assert tw2.variance == pytest.approx(0.8132, abs=1e-4)
    tw1 = specfun.tw_reference(1)
    assert tw1.mean == pytest.approx(-1.2065, abs=1e-4)
    assert tw1.skewness > 0 and tw2.skewness > 0


@pytest.mark.parametrize("beta", [1, 2])
def test_tw_reference_table(beta):
    """Step 1: at least 15 increasing quantiles consistent with the embedded CDF and moments."""
    tw = specfun.tw_reference(beta)
    assert len(tw.quantiles) >= 15
    qs = [q for _, q in tw.quantiles]
    assert all(a < b for a, b in zip(qs, qs[1:]))
    assert tw.quantile(0.1) < tw.quantile(0.9)
    for p, q in tw.quantiles:
        assert tw.cdf(q) == pytest.approx(p, abs=1e-9)
    dist = tw._dist()
    assert float(dist.mean()) == pytest.approx(tw.mean, abs=1e-3)
    assert float(dist.var()) == pytest.approx(tw.variance, abs=1e-3)


def test_tw_reference_unsupported_beta():
    """Step 1: only beta 1 and 2 are embedded."""
    with pytest.raises(DomainError):
        specfun.tw_reference(4)


def test_tw_reference_tail_close_to_tabulated():
    """Step 1: the gamma-based 0.99 quantile of F_1 is within 0.02 of the tabulated 2.0234."""
    assert specfun.tw_reference(1).quantile(0.99) == pytest.approx(2.0234, abs=0.02)
