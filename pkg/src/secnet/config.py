"""Scenario configuration, unit conversion and trust-based node classification."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .geometry import ORIGIN, Annulus, Difference, Disk, Point2D


def dbm_to_mw(p_dbm):
    return 10.0 ** (p_dbm / 10.0)


def db_to_linear(x_db):
    return 10.0 ** (x_db / 10.0)


@dataclass(frozen=True)
class Polar:
    r: float
    phi: float = 0.0

    def to_point(self):
        return Point2D.polar(self.r, self.phi)


@dataclass(frozen=True)
class NetworkConfig:
    """All parameters of one scenario.

    Defaults are the reference scenario (relay disk 6 m,
    network radius 100 m, protected zone 5 m, lambda 0.2 /m^2, C1 0.8,
    C2 0.79, Ps 10 dBm, Pj 1 dBm, beta_e 0 dB, alpha 4). Linear-scale powers
    ``ps_mw``, ``pj_mw`` and threshold ``beta_e`` are derived once here.
    """

    lam: float = 0.2
    c1: float = 0.8
    c2: float = 0.79
    l1: float = 6.0
    l2: float = 100.0
    lg: float = 5.0
    alpha: float = 4.0
    ps_dbm: float = 10.0
    pj_dbm: float = 1.0
    beta_e_db: float = 0.0
    dest: Polar = Polar(50.0, 0.0)
    eve: Polar = Polar(60.0, math.pi / 2)
    epsilon_z: float = 1.0
    quad_tol: float = 1e-8
    trials: int = 100_000
    seed: int = 1

    ps_mw: float = field(init=False, repr=False, compare=False)
    pj_mw: float = field(init=False, repr=False, compare=False)
    beta_e: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("dest", "eve"):
            v = getattr(self, name)
            if not isinstance(v, Polar):
                object.__setattr__(self, name, _polar(v, name))
        self.validate()
        object.__setattr__(self, "ps_mw", dbm_to_mw(self.ps_dbm))
        object.__setattr__(self, "pj_mw", dbm_to_mw(self.pj_dbm))
        object.__setattr__(self, "beta_e", db_to_linear(self.beta_e_db))

    def validate(self):
        checks = [
            (self.lam > 0, "lambda > 0"),
            (0 < self.c1 <= 1, "0 < c1 <= 1"),
            (0 <= self.c2 <= self.c1, "0 <= c2 <= c1"),
            (0 < self.l1 < self.l2, "0 < l1 < l2"),
            (self.lg >= 0, "lg >= 0"),
            (self.alpha > 2, "alpha > 2"),
            (self.epsilon_z > 0, "epsilon_z > 0"),
            (0 < self.quad_tol <= 1e-3, "0 < quad_tol <= 1e-3"),
            (self.trials >= 1, "trials >= 1"),
            (self.dest.r >= 0 and self.eve.r >= 0, "polar radii >= 0"),
        ]
        for name in ("lam", "c1", "c2", "l1", "l2", "lg", "alpha", "ps_dbm", "pj_dbm",
                     "beta_e_db", "epsilon_z", "quad_tol"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{_key(name)} must be finite")
        for ok, what in checks:
            if not ok:
                raise ConfigError(f"invalid configuration: requires {what}")

    @property
    def dest_point(self):
        return self.dest.to_point()

    @property
    def eve_point(self):
        return self.eve.to_point()

    @property
    def c_q(self):
        return self.c1 - self.c2

    def with_(self, **changes):
        """Copy with some fields replaced (``eve_r`` and ``c_q`` are accepted as shorthands)."""
        if "eve_r" in changes:
            changes["eve"] = Polar(changes.pop("eve_r"), self.eve.phi)
        if "c_q" in changes:
            c1 = changes.get("c1", self.c1)
            changes["c2"] = c1 - changes.pop("c_q")
        return replace(self, **changes)

    def relay_region(self):
        return Disk(ORIGIN, self.l1)

    def jammer_region(self, exclude_eve=True):
        """Region where a jammer is active: annulus minus protected zone (minus eve disk)."""
        holes = []
        if self.lg > 0:
            holes.append(Disk(self.dest_point, self.lg))
        if exclude_eve:
            holes.append(Disk(self.eve_point, self.epsilon_z))
        return Difference(Annulus(ORIGIN, self.l1, self.l2), tuple(holes))

    def to_dict(self):
        out = {}
        for f in fields(self):
            if not f.init:
                continue
            v = getattr(self, f.name)
            out[_key(f.name)] = {"r": v.r, "phi": v.phi} if isinstance(v, Polar) else v
        return out


_KEYS = {"lambda": "lam"}


def _key(name):
    return "lambda" if name == "lam" else name


def _polar(v, name):
    if isinstance(v, dict):
        if set(v) != {"r", "phi"}:
            raise ConfigError(f"{name} must have exactly the keys 'r' and 'phi'")
        return Polar(float(v["r"]), float(v["phi"]))
    try:
        r, phi = v
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a polar pair (r, phi)") from None
    return Polar(float(r), float(phi))


def config_from_dict(data):
    allowed = {_key(f.name) for f in fields(NetworkConfig) if f.init}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    kwargs = {_KEYS.get(k, k): v for k, v in data.items()}
    for k in ("trials", "seed"):
        if k in kwargs:
            if isinstance(kwargs[k], float) and not kwargs[k].is_integer():
                raise ConfigError(f"{k} must be an integer")
            kwargs[k] = int(kwargs[k])
    try:
        return NetworkConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path):
    """Read a JSON config file whose keys are the NetworkConfig field names."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return config_from_dict(data)


def thinned_densities(cfg):
    """Densities of the relay and jammer point processes, ``(lambda_R, lambda_J)``."""
    return (1.0 - cfg.c1) * cfg.lam, (cfg.c1 - cfg.c2) * cfg.lam


# role codes returned by node_roles
DUMMY, RELAY, JAMMER, SILENT_JAMMER = 0, 1, 2, 3


def node_roles(points, trust, cfg, exclude_eve=True):
    """Vectorized classification of marked points into role codes.

    Relays have trust in [c1, 1] and sit in the relay disk. Jammers have trust
    in [c2, c1) and sit in the annulus; those inside the protected zone (or the
    eavesdropper exclusion disk) are silent. Everything else is a dummy.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    trust = np.asarray(trust, dtype=float)
    if len(pts) != len(trust):
        raise ValueError("points and trust must have the same length")
    r2 = pts[:, 0] ** 2 + pts[:, 1] ** 2
    roles = np.full(len(pts), DUMMY, dtype=np.int8)
    roles[(trust >= cfg.c1) & (r2 <= cfg.l1 ** 2)] = RELAY
    jam = np.flatnonzero((trust >= cfg.c2) & (trust < cfg.c1)
                         & (r2 >= cfg.l1 ** 2) & (r2 <= cfg.l2 ** 2))
    roles[jam] = JAMMER
    cand = pts[jam]
    silent = np.zeros(len(jam), dtype=bool)
    if cfg.lg > 0:
        silent |= Disk(cfg.dest_point, cfg.lg).contains(cand)
    if exclude_eve:
        silent |= Disk(cfg.eve_point, cfg.epsilon_z).contains(cand)
    roles[jam[silent]] = SILENT_JAMMER
    return roles


@dataclass
class NodeRealization:
    relays: np.ndarray
    active_jammers: np.ndarray

    @property
    def n_relays(self):
        return len(self.relays)

    @property
    def n_active_jammers(self):
        return len(self.active_jammers)


def classify_nodes(points, trust, cfg, exclude_eve=True):
    """Split marked points into a NodeRealization plus the dummy nodes.

    Silent jammers (inside the protected zone) are returned with the dummies
    since they take no part in the transmission.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    roles = node_roles(pts, trust, cfg, exclude_eve)
    realization = NodeRealization(pts[roles == RELAY], pts[roles == JAMMER])
    return realization, pts[(roles == DUMMY) | (roles == SILENT_JAMMER)]
