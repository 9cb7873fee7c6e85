"""Special functions and Gamma-distribution helpers.

Everything here works on real scalars. The incomplete gamma and Gauss
hypergeometric routines are plain series / continued-fraction evaluations
tuned for the parameter ranges met by the Gamma-ratio outage formula.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, NonConvergence

MAX_TERMS = 1_000_000
SERIES_TOL = 1e-12
_TINY = 1e-300


def ln_gamma(x):
    """Natural log of the Gamma function for ``x > 0``."""
    if not x > 0:
        raise DomainError(f"ln_gamma needs x > 0, got {x}")
    return math.lgamma(x)


def _lower_series(nu, x):
    # P(nu, x) = x^nu e^-x / Gamma(nu + 1) * sum_k x^k / ((nu+1)...(nu+k))
    term = 1.0
    total = 1.0
    a = nu
    for k in range(1, MAX_TERMS):
        a += 1.0
        term *= x / a
        total += term
        if term < total * SERIES_TOL:
            break
    else:
        raise NonConvergence("lower incomplete gamma series did not converge", MAX_TERMS)
    return math.exp(nu * math.log(x) - x - ln_gamma(nu + 1.0)) * total


def _upper_cf(nu, x):
    # modified Lentz evaluation of the continued fraction for Q(nu, x)
    b = x + 1.0 - nu
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, MAX_TERMS):
        an = -i * (i - nu)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < SERIES_TOL:
            break
    else:
        raise NonConvergence("upper incomplete gamma continued fraction did not converge",
                             MAX_TERMS)
    return math.exp(nu * math.log(x) - x - ln_gamma(nu)) * h


def _check_gamma_args(nu, x):
    if not nu > 0:
        raise DomainError(f"shape must be positive, got {nu}")
    if not x >= 0:
        raise DomainError(f"x must be nonnegative, got {x}")


def reg_lower_gamma(nu, x):
    """Regularized lower incomplete gamma function P(nu, x)."""
    _check_gamma_args(nu, x)
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < nu + 1.0:
        return min(_lower_series(nu, x), 1.0)
    return max(1.0 - _upper_cf(nu, x), 0.0)


def reg_upper_gamma(nu, x):
    """Regularized upper incomplete gamma function Q(nu, x) = 1 - P(nu, x)."""
    _check_gamma_args(nu, x)
    if x == 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < nu + 1.0:
        return max(1.0 - _lower_series(nu, x), 0.0)
    return min(_upper_cf(nu, x), 1.0)


def _terminating_degree(a, b):
    for p in (a, b):
        if p <= 0 and float(p).is_integer():
            return int(-p)
    return None


def _hyp2f1_polynomial(a, b, c, x, degree):
    # exact rational evaluation; the alternating terms cancel badly in floats
    a, b, c, x = (Fraction(v) for v in (a, b, c, x))
    term = Fraction(1)
    total = Fraction(1)
    for k in range(degree):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * x
        total += term
    return float(total)


def hyp2f1_series(a, b, c, x, tol=SERIES_TOL, max_terms=MAX_TERMS):
    """Direct Gauss series for 2F1(a, b; c; x), no transformation.

    Returns ``(value, n_terms)``. A series that terminates (``a`` or ``b`` a
    nonpositive integer) is summed exactly in rational arithmetic.
    """
    degree = _terminating_degree(a, b)
    if degree is not None and degree < max_terms:
        return _hyp2f1_polynomial(a, b, c, x, degree), degree + 1
    term = 1.0
    total = 1.0
    for k in range(max_terms):
        ratio = (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x
        term *= ratio
        total += term
        if term == 0.0:
            return total, k + 1
        # term ratios tend to x, so with r = max(ratio, x) < 1 the remaining
        # tail is bounded by about term * r / (1 - r)
        r = max(ratio, x)
        if 0.0 <= ratio and r < 1.0 and abs(term) * r / (1.0 - r) <= tol * abs(total):
            return total, k + 1
    raise NonConvergence(
        f"2F1({a}, {b}; {c}; {x}) series did not converge in {max_terms} terms", max_terms)


def hyp2f1_euler(a, b, c, x):
    """2F1 through the Euler transformation ``(1 - x)^(c - a - b) 2F1(c - a, c - b; c; x)``."""
    val, _ = hyp2f1_series(c - a, c - b, c, x)
    return math.exp((c - a - b) * math.log1p(-x)) * val


def hyp2f1(a, b, c, x):
    """Gauss hypergeometric function for real parameters and ``0 <= x < 1``.

    For ``x > 0.5`` the Euler-transformed series is summed instead of the
    direct one, unless its parameters ``c - a``, ``c - b`` would make a
    non-terminating series alternate (a parameter below -1), where the
    cancellation costs more accuracy than the slower direct series.
    """
    if not c > 0:
        raise DomainError(f"hyp2f1 needs c > 0, got {c}")
    if not 0.0 <= x < 1.0:
        raise DomainError(f"hyp2f1 needs 0 <= x < 1, got {x}")
    if x == 0.0:
        return 1.0
    if x > 0.5 and (min(c - a, c - b) > -1.0 or _terminating_degree(c - a, c - b) is not None):
        return hyp2f1_euler(a, b, c, x)
    return hyp2f1_series(a, b, c, x)[0]


@dataclass(frozen=True)
class GammaParams:
    """Gamma law with shape ``nu`` and scale ``theta``."""

    nu: float
    theta: float

    def __post_init__(self):
        for name in ("nu", "theta"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"Gamma {name} must be positive and finite, got {v}")

    @property
    def mean(self):
        return self.nu * self.theta

    @property
    def var(self):
        return self.nu * self.theta ** 2


def gamma_logpdf(p, x):
    if x < 0:
        raise DomainError(f"gamma pdf needs x >= 0, got {x}")
    if x == 0.0:
        if p.nu < 1:
            return math.inf
        return -p.nu * math.log(p.theta) - ln_gamma(p.nu) if p.nu == 1 else -math.inf
    return ((p.nu - 1.0) * math.log(x) - x / p.theta
            - p.nu * math.log(p.theta) - ln_gamma(p.nu))


def gamma_pdf(p, x):
    return math.exp(gamma_logpdf(p, x))


def gamma_cdf(p, x):
    if x < 0:
        raise DomainError(f"gamma cdf needs x >= 0, got {x}")
    return reg_lower_gamma(p.nu, x / p.theta)


def gamma_sample(p, rng, size=None):
    """Exact Gamma(nu, theta) draws from a numpy Generator."""
    return rng.gamma(p.nu, p.theta, size)
