"""Gamma moment matching and the closed-form double-Gamma-ratio outage probability.

The eavesdropper's received beamformed power T(z) and aggregate jamming
power I(z) are each replaced by a Gamma law with the same mean and
variance. The outage probability P{T > beta_e I} of two independent Gamma
variables then has a closed form through 2F1.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional

from scipy import integrate

from .config import thinned_densities
from .errors import (DegenerateJamming, DegenerateSignal, DomainError, NumericError,
                     ProbabilityRangeError, StageError, ToleranceNotMet)
from .quadrature import jam_integral, q_z
from .specfun import GammaParams, gamma_logpdf, hyp2f1, ln_gamma, reg_lower_gamma

log = logging.getLogger(__name__)

PROB_SLACK = 1e-9
# largest 2F1 argument 1/(q_e + 1) accepted before the series is declared unusable
MAX_HYP_ARG = 1.0 - 1e-6


def moments_signal(lam_r, ps, q1, q2):
    """Mean and variance of T(z).

    Given the relay pattern, T(z) is exponential with mean ``ps * sum d^-alpha``.
    Campbell's theorem gives the mean and variance of that sum, and the law of
    total variance adds the exponential spread:
    ``var T = 2 var(m) + E[m]^2``.
    """
    if lam_r <= 0:
        raise DegenerateSignal("relay density is zero; T(z) has no Gamma fit")
    if q1 <= 0 or q2 < 0 or ps < 0:
        raise DomainError("moments_signal needs q1 > 0, q2 >= 0, ps >= 0")
    mean = ps * lam_r * q1
    var = ps * ps * (lam_r * lam_r * q1 * q1 + 2.0 * lam_r * q2)
    return mean, var


def moments_jamming(lam_j, pj, j1, j2):
    """Mean and variance of I(z) from the first two cumulants of the shot noise."""
    if lam_j <= 0:
        raise DegenerateJamming("jammer density is zero; I(z) has no Gamma fit")
    if j1 <= 0 or j2 < 0 or pj < 0:
        raise DomainError("moments_jamming needs j1 > 0, j2 >= 0, pj >= 0")
    return lam_j * pj * j1, 2.0 * lam_j * pj * pj * j2


def moment_match(mean, var):
    """Gamma parameters with the given mean and variance."""
    if not (mean > 0 and var > 0):
        raise DomainError(f"moment matching needs mean > 0 and var > 0, got {mean}, {var}")
    return GammaParams(mean * mean / var, var / mean)


def printed_signal_params(lam_r, ps, q1, q2):
    """Signal Gamma parameters with the shape numerator ``lam_r * q1`` (not squared).

    Kept only so the validation report can show that this form does not
    reproduce the simulated moments of T(z).
    """
    denom = lam_r * q1 * q1 + 2.0 * q2
    return GammaParams(lam_r * q1 / denom, ps * denom / q1)


@dataclass(frozen=True)
class DgrInputs:
    params_t: GammaParams
    params_i: GammaParams
    beta_e: float

    def __post_init__(self):
        if not (self.beta_e > 0 and math.isfinite(self.beta_e)):
            raise DomainError(f"beta_e must be positive and finite, got {self.beta_e}")

    @property
    def q_e(self):
        return self.beta_e * self.params_i.theta / self.params_t.theta


def _closed_form_terms(nt, ni, q):
    x = 1.0 / (q + 1.0)
    if x > MAX_HYP_ARG:
        raise DomainError(f"2F1 argument {x} too close to 1 (q_e = {q:g})")
    f = hyp2f1(1.0, nt + ni, ni + 1.0, x)
    log_pref = (nt * math.log(q) + ln_gamma(nt + ni) - math.log(ni)
                - (nt + ni) * math.log1p(q) - ln_gamma(nt) - ln_gamma(ni))
    return log_pref, f


def _dgr_terms(inp):
    return _closed_form_terms(inp.params_t.nu, inp.params_i.nu, inp.q_e)


def dgr_sop(inp):
    """P{T > beta_e I} for independent Gamma T and I, in closed form.

    Evaluated as ``exp(log prefactor) * 2F1(1, nu_T + nu_I; nu_I + 1; 1/(q_e + 1))``
    with ``q_e = beta_e theta_I / theta_T``. When that argument is within 1e-6
    of 1 the complementary event P{I > T / beta_e} is used instead; it has the
    same form with the roles swapped and argument ``q_e / (q_e + 1)``.
    """
    nt, ni, q = inp.params_t.nu, inp.params_i.nu, inp.q_e
    if 1.0 / (q + 1.0) > MAX_HYP_ARG:
        log_pref, f = _closed_form_terms(ni, nt, 1.0 / q)
        p = 1.0 - math.exp(log_pref + math.log(f))
    else:
        log_pref, f = _closed_form_terms(nt, ni, q)
        p = math.exp(log_pref + math.log(f))
    if not -PROB_SLACK <= p <= 1.0 + PROB_SLACK:
        raise ProbabilityRangeError(f"closed-form SOP {p} outside [0, 1]")
    return min(max(p, 0.0), 1.0)


def sop_oracle_numeric(inp, abs_tol=1e-10):
    """Same probability by direct quadrature over the Gamma law of I.

    ``1 - integral_0^inf f_I(x) P(nu_T, beta_e x / theta_T) dx``, truncated at
    ``theta_I (nu_I + 40 sqrt(nu_I))`` or ``40 theta_I``, whichever is larger
    (the second keeps the dropped tail far below 1e-12 for small ``nu_I``).
    """
    pt, pi_ = inp.params_t, inp.params_i
    upper = pi_.theta * max(pi_.nu + 40.0 * math.sqrt(pi_.nu), 40.0)
    k = inp.beta_e / pt.theta

    def cdf_t(x):
        return reg_lower_gamma(pt.nu, k * x)

    if pi_.nu < 1.0:
        # u = x^nu_I removes the pdf singularity at the origin
        nu = pi_.nu
        log_c = -nu * math.log(pi_.theta) - ln_gamma(nu) - math.log(nu)

        def g(u):
            x = u ** (1.0 / nu)
            return math.exp(log_c - x / pi_.theta) * cdf_t(x)

        pieces = [(0.0, min(pi_.theta, upper) ** nu), (min(pi_.theta, upper) ** nu, upper ** nu)]
    else:
        def g(x):
            return math.exp(gamma_logpdf(pi_, x)) * cdf_t(x)

        mode = (pi_.nu - 1.0) * pi_.theta
        pieces = [(0.0, mode), (mode, upper)] if 0 < mode < upper else [(0.0, upper)]
    total = 0.0
    err = 0.0
    for a, b in pieces:
        if b <= a:
            continue
        val, e = integrate.quad(g, a, b, epsabs=abs_tol / 10, epsrel=1e-13, limit=400)
        total += val
        err += e
    if err > abs_tol:
        raise ToleranceNotMet(f"oracle quadrature error {err:.3g} above {abs_tol:g}")
    return min(max(1.0 - total, 0.0), 1.0)


@dataclass
class SopReport:
    sop_analytic: Optional[float] = None
    q_e: Optional[float] = None
    hypergeom_value: Optional[float] = None
    params_t: Optional[GammaParams] = None
    params_i: Optional[GammaParams] = None
    q_z_values: Optional[tuple] = None
    jam_integrals: Optional[tuple] = None
    mc_estimate: Optional[float] = None
    mc_stderr: Optional[float] = None
    trials: Optional[int] = None
    seed: Optional[int] = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def abs_diff(self):
        if self.sop_analytic is None or self.mc_estimate is None:
            return None
        return abs(self.sop_analytic - self.mc_estimate)


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except NumericError as exc:
        raise StageError(name, exc) from exc


def analytic_sop(cfg):
    """Run the closed-form pipeline for one configuration."""
    if not cfg.eve.r > cfg.l1 + cfg.epsilon_z:
        raise StageError("geometry", DomainError(
            f"eavesdropper distance {cfg.eve.r} m must exceed l1 + epsilon_z = "
            f"{cfg.l1 + cfg.epsilon_z} m"))
    lam_r, lam_j = thinned_densities(cfg)
    q1 = _stage("q_z(1)", q_z, 1, cfg)
    q2 = _stage("q_z(2)", q_z, 2, cfg)
    j1 = _stage("jam_integral(1)", jam_integral, 1, cfg)
    j2 = _stage("jam_integral(2)", jam_integral, 2, cfg)
    mt, vt = _stage("moments_signal", moments_signal, lam_r, cfg.ps_mw, q1, q2)
    mi, vi = _stage("moments_jamming", moments_jamming, lam_j, cfg.pj_mw, j1, j2)
    pt = _stage("moment_match(T)", moment_match, mt, vt)
    pi_ = _stage("moment_match(I)", moment_match, mi, vi)
    inp = DgrInputs(pt, pi_, cfg.beta_e)
    f = None
    if 1.0 / (inp.q_e + 1.0) <= MAX_HYP_ARG:
        _, f = _stage("hyp2f1", _dgr_terms, inp)
    sop = _stage("dgr_sop", dgr_sop, inp)
    log.debug("analytic sop %.6g (nu_T=%.4g nu_I=%.4g q_e=%.4g)", sop, pt.nu, pi_.nu, inp.q_e)
    return SopReport(sop_analytic=sop, q_e=inp.q_e, hypergeom_value=f, params_t=pt,
                     params_i=pi_, q_z_values=(q1, q2), jam_integrals=(j1, j2),
                     seed=cfg.seed)
