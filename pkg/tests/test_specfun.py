import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, special, stats

from secnet.errors import DomainError, NonConvergence
from secnet.specfun import (GammaParams, gamma_cdf, gamma_pdf, gamma_sample, hyp2f1,
                            hyp2f1_euler, hyp2f1_series, ln_gamma, reg_lower_gamma,
                            reg_upper_gamma)


def erf_series(x, terms=60):
    return 2 / math.sqrt(math.pi) * sum(
        (-1) ** n * x ** (2 * n + 1) / (math.factorial(n) * (2 * n + 1)) for n in range(terms))


@pytest.mark.parametrize("x, expect", [
    (1.0, 0.0),
    (0.5, 0.5 * math.log(math.pi)),
    (10.0, math.log(362880.0)),
])
def test_ln_gamma_values(x, expect):
    assert ln_gamma(x) == pytest.approx(expect, rel=1e-12, abs=1e-15)


def test_ln_gamma_reference_values():
    assert ln_gamma(0.5) == pytest.approx(0.5723649, abs=1e-7)
    assert ln_gamma(10) == pytest.approx(12.80183, abs=1e-5)


def test_ln_gamma_recurrence():
    for x in np.linspace(0.1, 50, 500):
        assert ln_gamma(x + 1) == pytest.approx(ln_gamma(x) + math.log(x), abs=1e-12)


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5])
def test_ln_gamma_domain(x):
    with pytest.raises(DomainError):
        ln_gamma(x)


def test_reg_lower_gamma_examples():
    assert reg_lower_gamma(1.0, 1.0) == pytest.approx(1 - math.exp(-1), abs=1e-12)
    assert reg_lower_gamma(3.7, 0.0) == 0.0
    assert reg_lower_gamma(0.5, 1.0) == pytest.approx(erf_series(1.0), abs=1e-12)
    assert erf_series(1.0) == pytest.approx(0.842701, abs=1e-6)


@pytest.mark.parametrize("nu", [0.05, 0.5, 1.0, 2.5, 10.0, 80.0])
@pytest.mark.parametrize("x", [1e-6, 0.3, 1.0, 4.0, 30.0, 150.0])
def test_reg_lower_gamma_against_scipy(nu, x):
    assert reg_lower_gamma(nu, x) == pytest.approx(special.gammainc(nu, x), abs=1e-12)
    assert reg_upper_gamma(nu, x) == pytest.approx(special.gammaincc(nu, x), abs=1e-12)


@given(st.floats(0.01, 100), st.floats(0, 300))
def test_incomplete_gamma_complement(nu, x):
    assert reg_lower_gamma(nu, x) + reg_upper_gamma(nu, x) == pytest.approx(1.0, abs=1e-12)


@given(st.floats(0.01, 50), st.floats(0, 100), st.floats(0, 100))
def test_reg_lower_gamma_monotone(nu, a, b):
    lo, hi = sorted((a, b))
    assert reg_lower_gamma(nu, lo) <= reg_lower_gamma(nu, hi) + 1e-15
    assert 0.0 <= reg_lower_gamma(nu, lo) <= 1.0


def test_reg_lower_gamma_limit():
    assert reg_lower_gamma(3.0, 1e4) == 1.0
    assert reg_lower_gamma(3.0, math.inf) == 1.0


def test_reg_lower_gamma_domain():
    with pytest.raises(DomainError):
        reg_lower_gamma(0.0, 1.0)
    with pytest.raises(DomainError):
        reg_lower_gamma(1.0, -1.0)


def test_hyp2f1_examples():
    assert hyp2f1(1.0, 3.0, 2.0, 0.0) == 1.0
    assert hyp2f1(1.0, 2.5, 2.5, 0.5) == pytest.approx(2.0, rel=1e-12)
    assert hyp2f1(1.0, 1.0, 2.0, 0.5) == pytest.approx(-math.log(0.5) / 0.5, rel=1e-12)
    assert hyp2f1(1.0, 1.0, 2.0, 0.5) == pytest.approx(1.386294, abs=1e-6)


def test_hyp2f1_log_identity_by_truncated_series():
    # 2F1(1, 1; 2; x) = sum x^k / (k + 1)
    x = 0.5
    oracle = math.fsum(x ** k / (k + 1) for k in range(200))
    assert hyp2f1(1.0, 1.0, 2.0, x) == pytest.approx(oracle, rel=1e-12)


@pytest.mark.parametrize("b", [0.5, 5.0, 50.0])
def test_hyp2f1_euler_agrees_with_direct(b):
    c = b / 2 + 1
    for x in np.arange(1, 10) / 10:
        direct = hyp2f1_series(1.0, b, c, x)[0]
        assert hyp2f1_euler(1.0, b, c, x) == pytest.approx(direct, rel=1e-9)


@pytest.mark.parametrize("a, b, c", [
    (1.0, 0.6, 1.1), (1.0, 20.5, 21.0), (1.0, 80.1, 81.0), (1.0, 2.0, 1.5), (0.5, 3.0, 7.0),
])
@pytest.mark.parametrize("x", [0.01, 0.3, 0.5, 0.7, 0.95, 0.999])
def test_hyp2f1_against_mpmath(a, b, c, x):
    ref = float(mpmath.hyp2f1(a, b, c, x))
    assert hyp2f1(a, b, c, x) == pytest.approx(ref, rel=1e-10)


def test_hyp2f1_non_convergence_reports_iterations():
    with pytest.raises(NonConvergence) as info:
        hyp2f1_series(1.0, 5.0, 2.0, 0.99, max_terms=50)
    assert info.value.iterations == 50


@pytest.mark.parametrize("x", [1.0, -0.1, 1.5])
def test_hyp2f1_domain(x):
    with pytest.raises(DomainError):
        hyp2f1(1.0, 2.0, 3.0, x)


def test_gamma_pdf_cdf_exponential_case():
    p = GammaParams(1.0, 1.0)
    for x in (0.0, 0.5, 2.0, 7.0):
        assert gamma_pdf(p, x) == pytest.approx(math.exp(-x), rel=1e-14)
    assert gamma_cdf(p, 1.0) == pytest.approx(0.632121, abs=1e-6)


@pytest.mark.parametrize("nu, theta", [(0.5, 2.0), (1.0, 1.0), (3.0, 2.0), (40.0, 0.1)])
def test_gamma_pdf_normalized(nu, theta):
    p = GammaParams(nu, theta)
    pieces = [(0, theta), (theta, nu * theta + 60 * theta * math.sqrt(nu) + 60 * theta)]
    total = sum(integrate.quad(lambda x: gamma_pdf(p, x), a, b, epsabs=1e-12, epsrel=1e-12,
                               limit=200)[0] for a, b in pieces)
    assert total == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("nu, theta", [(0.5, 2.0), (3.0, 2.0), (12.0, 0.3)])
def test_gamma_cdf_derivative_is_pdf(nu, theta):
    p = GammaParams(nu, theta)
    h = 1e-5
    for x in np.linspace(0.2, 3 * nu * theta, 7):
        deriv = (gamma_cdf(p, x + h) - gamma_cdf(p, x - h)) / (2 * h)
        assert deriv == pytest.approx(gamma_pdf(p, x), abs=1e-6)


def test_gamma_pdf_domain():
    with pytest.raises(DomainError):
        gamma_pdf(GammaParams(1, 1), -1.0)
    with pytest.raises(DomainError):
        GammaParams(0.0, 1.0)
    with pytest.raises(DomainError):
        GammaParams(1.0, math.inf)


def test_gamma_sample_exponential_ks(rng):
    x = gamma_sample(GammaParams(1.0, 2.0), rng, 100_000)
    assert stats.kstest(x, lambda t: 1 - np.exp(-t / 2)).pvalue > 0.01


def test_gamma_sample_moments(rng):
    p = GammaParams(2.0, 3.0)
    n = 1_000_000
    x = gamma_sample(p, rng, n)
    assert abs(x.mean() - 6.0) <= 3 * math.sqrt(p.var / n)
    # var of the sample variance for Gamma: (mu4 - sigma^4) / n, mu4 = 3 nu (nu + 2) theta^4
    mu4 = 3 * p.nu * (p.nu + 2) * p.theta ** 4
    assert abs(x.var(ddof=1) - p.var) <= 3 * math.sqrt((mu4 - p.var ** 2) / n)
