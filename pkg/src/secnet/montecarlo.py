"""Monte Carlo simulation of relay beamforming with friendly jamming.

Each trial draws trust-marked node positions, classifies them into relays
and jammers, draws the small-scale fading and records the beamformed power
and the aggregate jamming power at the destination and at the
eavesdropper.

Trials are grouped into fixed-size blocks. Block ``k`` draws from a
Philox stream keyed by ``(seed, k)``, so results depend only on the seed
and the trial count, never on how blocks are spread over workers.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import JAMMER, RELAY, node_roles

log = logging.getLogger(__name__)

BLOCK_TRIALS = 1000


@dataclass
class Channels:
    """Fading for one realization: complex gains for relays, power fades for jammers."""

    relay_dest: np.ndarray
    relay_eve: np.ndarray
    jam_dest: np.ndarray
    jam_eve: np.ndarray


def complex_normal(rng, n):
    """CN(0, 1) draws: independent real and imaginary parts with variance 1/2."""
    z = rng.standard_normal((n, 2)) * math.sqrt(0.5)
    return z[:, 0] + 1j * z[:, 1]


def sample_channels(realization, rng):
    n_r = realization.n_relays
    n_j = realization.n_active_jammers
    return Channels(complex_normal(rng, n_r), complex_normal(rng, n_r),
                    rng.exponential(1.0, n_j), rng.exponential(1.0, n_j))


def _dist(points, target):
    return np.hypot(points[:, 0] - target[0], points[:, 1] - target[1])


def _group_sum(values, groups, n_groups):
    if groups is None:
        return np.array([values.sum()])
    return np.bincount(groups, weights=values, minlength=n_groups)


def beamformed_dest(h_dest, dist, ps, alpha, groups=None, n_groups=1):
    """Coherent relay sum at the destination: ``(sum sqrt(ps) |H| d^(-alpha/2))^2``."""
    amp = math.sqrt(ps) * np.abs(h_dest) * dist ** (-alpha / 2)
    return _group_sum(amp, groups, n_groups) ** 2


def beamformed_eve(h_dest, h_eve, dist, ps, alpha, groups=None, n_groups=1):
    """Power of the phase-rotated relay sum seen by the eavesdropper."""
    mag = np.abs(h_dest)
    rot = np.divide(np.conj(h_dest), mag, out=np.zeros_like(h_dest), where=mag > 0)
    s = math.sqrt(ps) * h_eve * rot * dist ** (-alpha / 2)
    re = _group_sum(s.real, groups, n_groups)
    im = _group_sum(s.imag, groups, n_groups)
    return re * re + im * im


def aggregate_jamming(fade, dist, pj, alpha, groups=None, n_groups=1):
    return _group_sum(pj * fade * dist ** (-alpha), groups, n_groups)


def signal_power_dest(realization, channels, cfg):
    return float(beamformed_dest(channels.relay_dest, _dist(realization.relays, cfg.dest_point),
                                 cfg.ps_mw, cfg.alpha)[0])


def signal_power_eve(realization, channels, cfg):
    return float(beamformed_eve(channels.relay_dest, channels.relay_eve,
                                _dist(realization.relays, cfg.eve_point),
                                cfg.ps_mw, cfg.alpha)[0])


def jamming_power(realization, channels, target, cfg):
    """Aggregate jamming power at ``"dest"`` or ``"eve"``."""
    if target == "dest":
        fade, where = channels.jam_dest, cfg.dest_point
    elif target == "eve":
        fade, where = channels.jam_eve, cfg.eve_point
    else:
        raise ValueError(f"target must be 'dest' or 'eve', got {target!r}")
    return float(aggregate_jamming(fade, _dist(realization.active_jammers, where),
                                   cfg.pj_mw, cfg.alpha)[0])


def sir_at(t, i):
    """Signal-to-interference ratio; ``inf`` when only interference is absent, 0 for 0/0."""
    t = np.asarray(t, dtype=float)
    i = np.asarray(i, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(t > 0, t / i, 0.0)
    return out[()] if out.ndim == 0 else out


@dataclass
class TrialBatch:
    """Per-trial outcomes, in trial order."""

    t_z: np.ndarray
    i_z: np.ndarray
    t_d: np.ndarray
    i_d: np.ndarray
    n_relays: np.ndarray
    n_active_jammers: np.ndarray

    def __len__(self):
        return len(self.t_z)

    @property
    def sir_z(self):
        return sir_at(self.t_z, self.i_z)

    @property
    def sir_d(self):
        return sir_at(self.t_d, self.i_d)

    @classmethod
    def concat(cls, batches):
        return cls(*(np.concatenate([getattr(b, f) for b in batches])
                     for f in ("t_z", "i_z", "t_d", "i_d", "n_relays", "n_active_jammers")))


def block_rng(seed, block):
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(block,))
    return np.random.Generator(np.random.Philox(ss))


def _marked_ring(rng, counts, lo, hi):
    # columns: radial uniform, angular uniform, trust
    u = rng.random((int(counts.sum()), 3))
    u[:, 2] = lo + (hi - lo) * u[:, 2]
    return u


def _ring_points(u, r_in, r_out):
    r = np.sqrt(r_in * r_in + u[:, 0] * (r_out * r_out - r_in * r_in))
    phi = u[:, 1] * (2.0 * math.pi)
    return np.column_stack((r * np.cos(phi), r * np.sin(phi)))


def default_window(cfg):
    return cfg.c2, cfg.c1


def simulate_block(cfg, block, n_trials, trust_window=None, exclude_eve=True):
    """Simulate ``n_trials`` trials from stream ``block``.

    Only nodes that can matter are drawn: in the relay disk those with trust
    at least ``lo``, in the annulus those with trust in ``[lo, hi)``, where
    ``trust_window = (lo, hi)`` must satisfy ``lo <= c2`` and ``hi >= c1``
    (default ``(c2, c1)``). All other nodes are dummies. Restricting a PPP to
    a band of its uniform marks leaves a PPP with proportionally lower
    density, so this is exact. Runs sharing seed and window share node
    positions, trust values and fading, so sweeps over c1, c2 or beta_e use
    common random numbers.
    """
    lo, hi = default_window(cfg) if trust_window is None else trust_window
    if not (0.0 <= lo <= cfg.c2 and cfg.c1 <= hi <= 1.0):
        raise ValueError(f"trust window {(lo, hi)} must contain [c2, c1] = {(cfg.c2, cfg.c1)}")
    rng = block_rng(cfg.seed, block)
    n_in = rng.poisson(cfg.lam * (1.0 - lo) * math.pi * cfg.l1 ** 2, n_trials)
    n_out = rng.poisson(cfg.lam * (hi - lo) * math.pi * (cfg.l2 ** 2 - cfg.l1 ** 2), n_trials)
    u_in = _marked_ring(rng, n_in, lo, 1.0)
    u_out = _marked_ring(rng, n_out, lo, hi)
    idx_in = np.repeat(np.arange(n_trials), n_in)
    idx_out = np.repeat(np.arange(n_trials), n_out)
    # fading is drawn per node before classification so it survives changes of c1, c2
    h_d_all = complex_normal(rng, len(u_in))
    h_z_all = complex_normal(rng, len(u_in))
    g_d_all = rng.exponential(1.0, len(u_out))
    g_z_all = rng.exponential(1.0, len(u_out))

    p_in = _ring_points(u_in, 0.0, cfg.l1)
    p_out = _ring_points(u_out, cfg.l1, cfg.l2)
    is_relay = node_roles(p_in, u_in[:, 2], cfg, exclude_eve) == RELAY
    is_jam = node_roles(p_out, u_out[:, 2], cfg, exclude_eve) == JAMMER

    relays, r_idx = p_in[is_relay], idx_in[is_relay]
    h_d, h_z = h_d_all[is_relay], h_z_all[is_relay]
    jammers, j_idx = p_out[is_jam], idx_out[is_jam]
    g_d, g_z = g_d_all[is_jam], g_z_all[is_jam]

    dest, eve = cfg.dest_point, cfg.eve_point
    a = cfg.alpha
    return TrialBatch(
        t_z=beamformed_eve(h_d, h_z, _dist(relays, eve), cfg.ps_mw, a, r_idx, n_trials),
        i_z=aggregate_jamming(g_z, _dist(jammers, eve), cfg.pj_mw, a, j_idx, n_trials),
        t_d=beamformed_dest(h_d, _dist(relays, dest), cfg.ps_mw, a, r_idx, n_trials),
        i_d=aggregate_jamming(g_d, _dist(jammers, dest), cfg.pj_mw, a, j_idx, n_trials),
        n_relays=np.bincount(r_idx, minlength=n_trials),
        n_active_jammers=np.bincount(j_idx, minlength=n_trials),
    )


def simulate(cfg, trials=None, workers=1, trust_window=None, exclude_eve=True):
    """Simulate ``trials`` independent network realizations (default ``cfg.trials``)."""
    trials = cfg.trials if trials is None else int(trials)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    sizes = [BLOCK_TRIALS] * (trials // BLOCK_TRIALS)
    if trials % BLOCK_TRIALS:
        sizes.append(trials % BLOCK_TRIALS)

    def run(k):
        return simulate_block(cfg, k, sizes[k], trust_window, exclude_eve)

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(run, range(len(sizes))))
    else:
        batches = [run(k) for k in range(len(sizes))]
    return TrialBatch.concat(batches)


@dataclass
class SopEstimate:
    sop: float
    stderr: float
    trials: int
    diagnostics: dict = field(default_factory=dict)


def sop_from_batch(batch, beta_e):
    """Fraction of trials with SIR at the eavesdropper strictly above ``beta_e``."""
    n = len(batch)
    zero_zero = int(np.count_nonzero((batch.t_z == 0) & (batch.i_z == 0)))
    if zero_zero:
        log.info("%d of %d trials had neither relays nor jammers reaching the eavesdropper "
                 "(SIR taken as 0)", zero_zero, n)
    p = float(np.count_nonzero(batch.sir_z > beta_e)) / n
    diag = {
        "mean_relays": float(batch.n_relays.mean()),
        "mean_active_jammers": float(batch.n_active_jammers.mean()),
        "frac_no_relay": float(np.mean(batch.n_relays == 0)),
        "frac_no_jammer": float(np.mean(batch.n_active_jammers == 0)),
        "frac_zero_over_zero": zero_zero / n,
    }
    return SopEstimate(p, math.sqrt(p * (1.0 - p) / n), n, diag)


def estimate_sop(cfg, trials=None, workers=1, trust_window=None, exclude_eve=True):
    batch = simulate(cfg, trials, workers, trust_window, exclude_eve)
    return sop_from_batch(batch, cfg.beta_e)


def jackknife_var_se(x):
    """Delete-one jackknife standard error of the unbiased sample variance."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n < 3:
        return math.nan
    c = x - x.mean()
    s1 = c.sum()
    s2 = (c * c).sum()
    loo = (s2 - c * c - (s1 - c) ** 2 / (n - 1)) / (n - 2)
    return math.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2))


@dataclass
class MomentEstimate:
    mean: float
    var: float
    mean_se: float
    var_se: float
    trials: int


def estimate_moments(cfg, quantity, trials=None, workers=1, exclude_eve=True):
    """Sample mean and variance of ``"T"`` (= T(z)) or ``"I"`` (= I(z)) with jackknife errors."""
    batch = simulate(cfg, trials, workers, exclude_eve=exclude_eve)
    if quantity == "T":
        x = batch.t_z
    elif quantity == "I":
        x = batch.i_z
    else:
        raise ValueError(f"quantity must be 'T' or 'I', got {quantity!r}")
    return moments_of(x)


def moments_of(x):
    x = np.asarray(x, dtype=float)
    n = len(x)
    var = float(x.var(ddof=1))
    return MomentEstimate(float(x.mean()), var, math.sqrt(var / n), jackknife_var_se(x), n)
