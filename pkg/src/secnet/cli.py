"""Command-line front end: single points, parameter sweeps to CSV, and validation."""
from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import analytic, montecarlo, specfun
from .analytic import SopReport
from .config import NetworkConfig, config_from_dict, load_config, thinned_densities
from .errors import ConfigError, NumericError, SecnetError
from .quadrature import jam_integral, q_z

log = logging.getLogger("secnet")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VALIDATION = 0, 2, 3, 4
MODES = ("analytic", "mc", "both")
SWEEP_VARIABLES = ("beta_e_db", "eve_r", "c1", "c_q")
CSV_COLUMNS = ("variable", "value", "sop_analytic", "sop_mc", "mc_stderr", "nu_t", "theta_t",
               "nu_i", "theta_i", "q_e", "n_trials", "seed")


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple
    mode: str = "analytic"

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError(f"sweep variable must be one of {SWEEP_VARIABLES}, "
                              f"got {self.variable!r}")
        if not self.values:
            raise ConfigError("sweep needs at least one value")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")

    @classmethod
    def parse(cls, text, mode="analytic"):
        """Parse ``var=v1,v2,...``."""
        var, sep, vals = text.partition("=")
        if not sep:
            raise ConfigError(f"--sweep expects var=v1,v2,..., got {text!r}")
        try:
            values = tuple(float(v) for v in vals.split(",") if v.strip())
        except ValueError:
            raise ConfigError(f"non-numeric sweep value in {vals!r}") from None
        return cls(var.strip(), values, mode)

    def config_at(self, cfg, value):
        if self.variable == "c1":
            # the jammer band width C1 - C2 is held fixed, only the relay density moves
            return cfg.with_(c1=value, c2=value - cfg.c_q)
        return cfg.with_(**{self.variable: value})


def run_point(cfg, mode="both", trials=None, workers=1, trust_window=None, exclude_eve=True):
    """Analytic and/or Monte Carlo SOP for one configuration."""
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}")
    report = analytic.analytic_sop(cfg) if mode in ("analytic", "both") else SopReport()
    report.seed = cfg.seed
    if mode in ("mc", "both"):
        est = montecarlo.estimate_sop(cfg, trials, workers, trust_window, exclude_eve)
        report.mc_estimate = est.sop
        report.mc_stderr = est.stderr
        report.trials = est.trials
        report.diagnostics.update(est.diagnostics)
    return report


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    return repr(x) if math.isfinite(x) else ""


def _row(variable, value, report):
    pt, pi_ = report.params_t, report.params_i
    return [variable, _fmt(value), _fmt(report.sop_analytic), _fmt(report.mc_estimate),
            _fmt(report.mc_stderr), _fmt(pt and pt.nu), _fmt(pt and pt.theta),
            _fmt(pi_ and pi_.nu), _fmt(pi_ and pi_.theta), _fmt(report.q_e),
            _fmt(report.trials), _fmt(report.seed)]


def run_sweep(cfg, sweep, out_path=None, trials=None, workers=1, exclude_eve=True):
    """Evaluate every sweep value and write one CSV row per value, in input order.

    Failing points are written with empty result cells and logged; the sweep
    continues. Returns the CSV text.
    """
    points = [sweep.config_at(cfg, v) for v in sweep.values]
    window = (min(p.c2 for p in points), max(p.c1 for p in points))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(CSV_COLUMNS)
    for value, pcfg in zip(sweep.values, points):
        report = SopReport(seed=cfg.seed)
        if sweep.mode in ("analytic", "both"):
            try:
                report = analytic.analytic_sop(pcfg)
            except NumericError as exc:
                log.error("sweep %s=%g: analytic failed: %s", sweep.variable, value, exc)
                report = SopReport(seed=cfg.seed)
        if sweep.mode in ("mc", "both"):
            est = montecarlo.estimate_sop(pcfg, trials, workers, window, exclude_eve)
            report.mc_estimate, report.mc_stderr, report.trials = est.sop, est.stderr, est.trials
        report.seed = cfg.seed
        writer.writerow(_row(sweep.variable, value, report))
    text = buf.getvalue()
    if out_path is not None:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


# --- validation ---------------------------------------------------------------

@dataclass
class Check:
    name: str
    error: float
    threshold: float
    detail: str = ""

    @property
    def passed(self):
        return bool(self.error <= self.threshold)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        extra = f"  ({self.detail})" if self.detail else ""
        return f"{status}  {self.name:<42s} error={self.error:.3e}  threshold={self.threshold:.1e}{extra}"


NU_T_GRID = (0.1, 0.5, 1.0, 2.0)
NU_I_GRID = (1.0, 5.0, 20.0, 80.0)
Q_E_GRID = (0.01, 0.1, 1.0, 10.0, 100.0)


def dgr_grid_error():
    """Largest |closed form - numeric oracle| over the (nu_T, nu_I, q_e) grid."""
    worst = 0.0
    for nt in NU_T_GRID:
        for ni in NU_I_GRID:
            for q in Q_E_GRID:
                inp = analytic.DgrInputs(specfun.GammaParams(nt, 1.0),
                                         specfun.GammaParams(ni, 1.0), q)
                worst = max(worst, abs(analytic.dgr_sop(inp) - analytic.sop_oracle_numeric(inp)))
    return worst


def _z(est, target, se):
    return abs(est - target) / se if se > 0 else math.inf


def run_validate(cfg, trials=None, inject_printed_nu_t=False, out=sys.stdout):
    """Run the oracle and invariant checks; returns the list of Check results."""
    checks = []

    checks.append(Check("dgr vs numeric oracle (80 pts)", dgr_grid_error(), 1e-8))
    exp_err = max(abs(analytic.dgr_sop(analytic.DgrInputs(
        specfun.GammaParams(1.0, 1.0), specfun.GammaParams(1.0, 1.0), q)) - 1.0 / (1.0 + q))
        for q in (0.1, 1.0, 3.0, 10.0))
    checks.append(Check("dgr exponential case", exp_err, 1e-9))

    xs = np.linspace(0.1, 50.0, 200)
    rec = max(abs(specfun.ln_gamma(x + 1) - specfun.ln_gamma(x) - math.log(x)) for x in xs)
    checks.append(Check("ln_gamma recurrence", rec, 1e-12))
    pq = max(abs(specfun.reg_lower_gamma(a, x) + specfun.reg_upper_gamma(a, x) - 1.0)
             for a in (0.1, 0.5, 1.0, 3.0, 20.0) for x in (0.01, 0.5, 2.0, 10.0, 40.0))
    checks.append(Check("incomplete gamma P + Q = 1", pq, 1e-12))
    euler = 0.0
    for b in (0.5, 5.0, 50.0):
        c = b / 2 + 1
        for x in np.arange(1, 10) / 10:
            direct = specfun.hyp2f1_series(1.0, b, c, x)[0]
            euler = max(euler, abs(specfun.hyp2f1_euler(1.0, b, c, x) / direct - 1.0))
    checks.append(Check("2F1 Euler vs direct series", euler, 1e-9))

    quad = 0.0
    for d in (40.0, 80.0):
        exact = math.pi * cfg.l1 ** 2 / (d * d - cfg.l1 ** 2) ** 2
        quad = max(quad, abs(q_z(1, cfg.with_(alpha=4.0), (d, 0.0)) / exact - 1.0))
    checks.append(Check("q_z(1) vs closed-form disk", quad, 1e-6))

    # Monte Carlo checks: z-scores against the analytic moments
    lam_r, lam_j = thinned_densities(cfg)
    batch = montecarlo.simulate(cfg, trials)
    report = analytic.analytic_sop(cfg)
    q1, q2 = report.q_z_values
    j1, j2 = report.jam_integrals
    if inject_printed_nu_t:
        pt = analytic.printed_signal_params(lam_r, cfg.ps_mw, q1, q2)
        mt, vt = pt.mean, pt.var
        label = "T(z) moments [printed nu_T]"
    else:
        mt, vt = analytic.moments_signal(lam_r, cfg.ps_mw, q1, q2)
        label = "T(z) moments"
    mi, vi = analytic.moments_jamming(lam_j, cfg.pj_mw, j1, j2)
    for name, x, mean, var in ((label, batch.t_z, mt, vt), ("I(z) moments", batch.i_z, mi, vi)):
        m = montecarlo.moments_of(x)
        z = max(_z(m.mean, mean, m.mean_se), _z(m.var, var, m.var_se))
        checks.append(Check(name + " (z-score)", z, 4.0,
                            f"mean rel err {m.mean / mean - 1:+.3%}, var rel err {m.var / var - 1:+.3%}"))

    n = len(batch)
    area = math.pi * cfg.l1 ** 2
    counts = batch.n_relays
    mu = lam_r * area
    # a Poisson count has equal mean and variance; var(s^2) ~ (mu + 2 mu^2) / n
    z_cnt = max(_z(counts.mean(), mu, math.sqrt(mu / n)),
                _z(counts.var(ddof=1), mu, math.sqrt((mu + 2 * mu * mu) / n)))
    checks.append(Check("relay thinning (count z-score)", z_cnt, 4.0))
    void = math.exp(-lam_r * area)
    checks.append(Check("relay void probability (z-score)",
                        _z(float(np.mean(counts == 0)), void, math.sqrt(void * (1 - void) / n)),
                        4.0, f"expected {void:.4g}"))

    sens = []
    for eps in (cfg.epsilon_z, cfg.epsilon_z / 2):
        c = cfg.with_(epsilon_z=eps)
        sens.append((eps, jam_integral(1, c), jam_integral(2, c)))
    grew = sens[1][2] > sens[0][2]
    checks.append(Check("jam_integral(2) grows as epsilon_z halves", 0.0 if grew else 1.0, 0.0))

    for chk in checks:
        print(chk.line(), file=out)
    print("\nepsilon_z sensitivity:", file=out)
    print(f"  {'epsilon_z':>10s} {'J1':>14s} {'J2':>14s}", file=out)
    for eps, a, b in sens:
        print(f"  {eps:10.4g} {a:14.6g} {b:14.6g}", file=out)
    return checks


# --- argument handling --------------------------------------------------------

def _parse_set(items):
    out = {}
    for item in items or ():
        key, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        try:
            out[key.strip()] = float(val)
        except ValueError:
            raise ConfigError(f"--set {key}: value {val!r} is not a number") from None
    return out


def _build_config(args):
    data = load_config(args.config).to_dict() if args.config else NetworkConfig().to_dict()
    overrides = _parse_set(args.set)
    for key in ("eve_r", "dest_r"):
        if key in overrides:
            which = key[:-2]
            data[which] = dict(data[which], r=overrides.pop(key))
    data.update(overrides)
    env_seed = os.environ.get("SECNET_SEED")
    if env_seed is not None:
        try:
            data["seed"] = int(env_seed)
        except ValueError:
            raise ConfigError(f"SECNET_SEED must be an integer, got {env_seed!r}") from None
    if args.seed is not None:
        data["seed"] = args.seed
    if getattr(args, "trials", None) is not None:
        data["trials"] = args.trials
    return config_from_dict(data)


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with NetworkConfig keys")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a numeric config key (eve_r / dest_r set polar radii)")
    common.add_argument("--trials", type=int, help="Monte Carlo trials (default: config)")
    common.add_argument("--seed", type=int, help="seed (overrides SECNET_SEED and config)")
    common.add_argument("--workers", type=int, default=1, help="threads for Monte Carlo blocks")
    common.add_argument("--no-eve-exclusion", action="store_true",
                        help="let jammers inside the eavesdropper exclusion disk transmit")
    common.add_argument("--out", help="output CSV path (default: stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="secnet", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    pt = sub.add_parser("point", parents=[common], help="SOP at a single configuration")
    pt.add_argument("--mode", choices=MODES, default="both")
    sw = sub.add_parser("sweep", parents=[common], help="SOP over a parameter sweep")
    sw.add_argument("--mode", choices=MODES, default="analytic")
    sw.add_argument("--sweep", required=True, metavar="VAR=V1,V2,...",
                    help=f"variable in {SWEEP_VARIABLES} and its values")
    va = sub.add_parser("validate", parents=[common], help="run oracle cross-checks")
    va.add_argument("--inject-printed-nu-t", action="store_true",
                    help="use the unsquared signal shape numerator in the T(z) moment check")
    return p


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = _build_config(args)
        if args.command == "point":
            report = run_point(cfg, args.mode, cfg.trials, args.workers,
                               exclude_eve=not args.no_eve_exclusion)
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\r\n")
            writer.writerow(CSV_COLUMNS)
            writer.writerow(_row("point", None, report))
            _emit(buf.getvalue(), args.out)
            if report.abs_diff is not None:
                print(f"|sop_analytic - sop_mc| = {report.abs_diff:.4g}", file=sys.stderr)
        elif args.command == "sweep":
            spec = SweepSpec.parse(args.sweep, args.mode)
            text = run_sweep(cfg, spec, None, cfg.trials, args.workers,
                             exclude_eve=not args.no_eve_exclusion)
            _emit(text, args.out)
        else:
            checks = run_validate(cfg, cfg.trials, args.inject_printed_nu_t)
            if not all(c.passed for c in checks):
                return EXIT_VALIDATION
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SecnetError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    sys.exit(main())
