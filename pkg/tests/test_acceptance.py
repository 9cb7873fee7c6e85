"""Acceptance criteria, one test each, run at their stated tolerances.

Every test records a PASS/FAIL line (printed immediately and again in the
"acceptance criteria" section of the terminal summary) before asserting.
"""
import math
import time

import numpy as np
import pytest
from scipy import stats

from conftest import ACCEPTANCE_LINES
from secnet.analytic import (DgrInputs, analytic_sop, dgr_sop, moments_jamming,
                             moments_signal)
from secnet.cli import dgr_grid_error, main
from secnet.config import NetworkConfig, thinned_densities
from secnet.geometry import Disk, ORIGIN, sample_ppp
from secnet.montecarlo import beamformed_eve, complex_normal, simulate, sop_from_batch
from secnet.quadrature import jam_integral, q_z
from secnet.specfun import GammaParams

SIG = 0.01
D_E = (40.0, 50.0, 60.0, 70.0, 80.0, 90.0)
BETAS_DB = (-5.0, 0.0, 5.0, 10.0)


def record(number, title, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  criterion {number}: {title}  [{detail}]"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def nonincreasing(v):
    return all(a >= b for a, b in zip(v, v[1:]))


@pytest.fixture(scope="module")
def distance_sweep():
    """Analytic and MC SOP at each d_E with 1e5 trials, shared seed (common random numbers)."""
    cfg = NetworkConfig()
    start = time.perf_counter()
    out = []
    for d in D_E:
        c = cfg.with_(eve_r=d)
        est = sop_from_batch(simulate(c, 100_000), c.beta_e)
        out.append((d, analytic_sop(c).sop_analytic, est.sop, est.stderr))
    return out, time.perf_counter() - start


def test_criterion_1_dgr_grid():
    start = time.perf_counter()
    err = dgr_grid_error()
    elapsed = time.perf_counter() - start
    ok = err <= 1e-8 and elapsed < 10.0
    record(1, "closed form vs numeric oracle on 80-point grid", ok,
           f"max abs err {err:.2e} <= 1e-8, {elapsed:.2f} s < 10 s")
    assert ok


def test_criterion_2_exponential_case():
    errs = []
    for q in (0.1, 1.0, 3.0, 10.0):
        inp = DgrInputs(GammaParams(1.0, 1.0), GammaParams(1.0, 1.0), q)
        errs.append(abs(dgr_sop(inp) - 1.0 / (1.0 + q)))
    ok = max(errs) <= 1e-9
    record(2, "nu_T = nu_I = 1 gives 1/(1 + q_e)", ok, f"max abs err {max(errs):.2e} <= 1e-9")
    assert ok


def test_criterion_3_moment_matching(fig2_batch_1e6):
    cfg = NetworkConfig(seed=11)
    assert cfg.eve_point == pytest.approx((0.0, 60.0), abs=1e-12)
    lam_r, lam_j = thinned_densities(cfg)
    mt, vt = moments_signal(lam_r, cfg.ps_mw, q_z(1, cfg), q_z(2, cfg))
    mi, vi = moments_jamming(lam_j, cfg.pj_mw, jam_integral(1, cfg), jam_integral(2, cfg))
    b = fig2_batch_1e6
    rel = {
        "T mean": b.t_z.mean() / mt - 1, "T var": b.t_z.var(ddof=1) / vt - 1,
        "I mean": b.i_z.mean() / mi - 1, "I var": b.i_z.var(ddof=1) / vi - 1,
    }
    ok = (abs(rel["T mean"]) <= 0.02 and abs(rel["I mean"]) <= 0.02
          and abs(rel["T var"]) <= 0.05 and abs(rel["I var"]) <= 0.05 and b.elapsed < 300)
    detail = ", ".join(f"{k} {v:+.2%}" for k, v in rel.items())
    record(3, "MC moments of T(z), I(z) at 1e6 trials (2% means, 5% variances)", ok,
           f"{detail}; {b.elapsed:.0f} s < 300 s")
    assert ok


def test_criterion_4_end_to_end(distance_sweep):
    rows, elapsed = distance_sweep
    diffs = [abs(a - m) for _, a, m, _ in rows]
    ok = max(diffs) <= 0.05 and elapsed < 600
    detail = "; ".join(f"d_E={d:g}: analytic {a:.4f} mc {m:.4f}" for d, a, m, _ in rows)
    record(4, "|analytic - MC| <= 0.05 at d_E 40..90 m, 1e5 trials", ok,
           f"max diff {max(diffs):.3f}; {detail}; {elapsed:.0f} s < 600 s")
    assert ok


def test_criterion_5_trends(distance_sweep):
    rows, _ = distance_sweep
    results = {}
    results["analytic d_E"] = nonincreasing([a for _, a, _, _ in rows])
    results["mc d_E"] = nonincreasing([m for _, _, m, _ in rows])

    base = NetworkConfig()
    betas = [10 ** (b / 10) for b in BETAS_DB]
    for d in (40.0, 60.0):
        lo = [analytic_sop(base.with_(eve_r=d, beta_e_db=b)).sop_analytic for b in BETAS_DB]
        hi = [analytic_sop(base.with_(eve_r=d, c1=0.9, c2=0.89, beta_e_db=b)).sop_analytic
              for b in BETAS_DB]
        results[f"analytic C1 at {d:g} m"] = all(h < l for h, l in zip(hi, lo))
        cq = [[analytic_sop(base.with_(eve_r=d, c_q=q, beta_e_db=b)).sop_analytic
               for q in (0.005, 0.01, 0.02)] for b in BETAS_DB]
        results[f"analytic C_q at {d:g} m"] = all(nonincreasing(v) for v in cq)

    # MC with common random numbers: one trust window covering every compared setting
    c40 = base.with_(eve_r=40.0)
    lo_b = simulate(c40, 100_000, trust_window=(0.79, 0.9))
    hi_b = simulate(c40.with_(c1=0.9, c2=0.89), 100_000, trust_window=(0.79, 0.9))
    results["mc C1 at 40 m"] = all(sop_from_batch(hi_b, b).sop < sop_from_batch(lo_b, b).sop
                                   for b in betas)
    cq_b = [simulate(c40.with_(c_q=q), 100_000, trust_window=(0.78, 0.8))
            for q in (0.005, 0.01, 0.02)]
    results["mc C_q at 40 m"] = all(nonincreasing([sop_from_batch(x, b).sop for x in cq_b])
                                    for b in betas)
    ok = all(results.values())
    mc = ", ".join(f"{m:.5f}" for _, _, m, _ in rows)
    record(5, "SOP trends in d_E, C1, C_q (analytic and MC)", ok,
           "; ".join(f"{k}: {'ok' if v else 'violated'}" for k, v in results.items())
           + f"; mc SOP over d_E: {mc}")
    assert ok


def test_criterion_6_quadrature_oracle():
    cfg = NetworkConfig()
    errs = []
    for d in (40.0, 80.0):
        exact = math.pi * cfg.l1 ** 2 / (d * d - cfg.l1 ** 2) ** 2
        errs.append(abs(q_z(1, cfg, (d, 0.0)) / exact - 1.0))
    ok = max(errs) <= 1e-6
    record(6, "q_z(1) vs closed-form disk integral", ok, f"max rel err {max(errs):.2e} <= 1e-6")
    assert ok


def _poisson_gof(counts, mean):
    """Chi-square goodness of fit of integer counts to Poisson(mean), tail cells pooled."""
    n = len(counts)
    k_max = int(stats.poisson.ppf(1 - 1e-4, mean))
    k_min = int(stats.poisson.ppf(1e-4, mean))
    edges = np.arange(k_min, k_max + 1)
    obs = np.array([np.sum(counts <= k_min)] + [np.sum(counts == k) for k in edges[1:-1]]
                   + [np.sum(counts >= k_max)])
    probs = np.concatenate(([stats.poisson.cdf(k_min, mean)],
                            stats.poisson.pmf(edges[1:-1], mean),
                            [stats.poisson.sf(k_max - 1, mean)]))
    keep = probs * n >= 5
    obs = np.append(obs[keep], obs[~keep].sum())
    exp = np.append(probs[keep], probs[~keep].sum()) * n
    if exp[-1] == 0:
        obs, exp = obs[:-1], exp[:-1]
    return stats.chisquare(obs, exp).pvalue


def test_criterion_7_statistical_invariants(fig2_batch_1e6):
    pvals = {}
    # thinning: all nodes drawn and classified; role counts must be Poisson with thinned means
    small = NetworkConfig(l2=10.0, lg=0.0, seed=31)
    wide = simulate(small, 100_000, trust_window=(0.0, 1.0))
    lam_r, lam_j = thinned_densities(small)
    pvals["thinning relays"] = _poisson_gof(wide.n_relays, lam_r * math.pi * small.l1 ** 2)
    pvals["thinning jammers"] = _poisson_gof(
        wide.n_active_jammers, lam_j * math.pi * (small.l2 ** 2 - small.l1 ** 2))

    # void probability of the relay process
    cfg = NetworkConfig()
    lam_r, _ = thinned_densities(cfg)
    void = math.exp(-lam_r * math.pi * cfg.l1 ** 2)
    n_void = int(np.sum(fig2_batch_1e6.n_relays == 0))
    pvals["void probability"] = stats.binomtest(n_void, len(fig2_batch_1e6), void).pvalue

    # conditional exponential law of T(z) for one fixed relay pattern
    rng = np.random.default_rng(2718)
    pts = sample_ppp(Disk(ORIGIN, cfg.l1), lam_r, rng)
    d = np.hypot(pts[:, 0] - cfg.eve_point[0], pts[:, 1] - cfg.eve_point[1])
    n, k = 100_000, len(pts)
    groups = np.repeat(np.arange(n), k)
    t = beamformed_eve(complex_normal(rng, n * k), complex_normal(rng, n * k), np.tile(d, n),
                       cfg.ps_mw, cfg.alpha, groups, n)
    scale = cfg.ps_mw * np.sum(d ** -cfg.alpha)
    pvals["T(z) | relays ~ exponential"] = stats.kstest(t, stats.expon(scale=scale).cdf).pvalue

    # channel marginals
    h = complex_normal(rng, 1_000_000)
    pvals["Rayleigh envelope"] = stats.kstest(np.abs(h),
                                              stats.rayleigh(scale=math.sqrt(0.5)).cdf).pvalue
    fades = rng.exponential(1.0, 1_000_000)
    pvals["exp(1) power fade"] = stats.kstest(fades, "expon").pvalue

    ok = all(p > SIG for p in pvals.values()) and abs(void - 0.0108) < 1e-4
    record(7, "statistical invariants at the 1% level", ok,
           "; ".join(f"{k} p={v:.3f}" for k, v in pvals.items())
           + f"; void {n_void / len(fig2_batch_1e6):.5f} vs {void:.5f}")
    assert ok


def test_criterion_8_worker_determinism(tmp_path, monkeypatch):
    monkeypatch.delenv("SECNET_SEED", raising=False)
    outs = []
    for workers in (1, 4):
        path = tmp_path / f"w{workers}.csv"
        code = main(["sweep", "--mode", "both", "--sweep", "eve_r=40,60,90", "--trials", "10000",
                     "--seed", "2024", "--workers", str(workers), "--out", str(path)])
        assert code == 0
        outs.append(path.read_bytes())
    ok = outs[0] == outs[1]
    record(8, "sweep CSV identical for 1 and 4 workers", ok,
           f"{len(outs[0])} bytes, identical={ok}")
    assert ok
