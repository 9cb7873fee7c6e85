"""Planar integrals of ``|x - pole|^-p`` over disks, annuli and carved regions.

The integral is taken in polar coordinates centred at the pole. The angular
part is exact: for every radius the covered angle follows from the law of
cosines (see :func:`secnet.geometry.angular_extent`). The remaining radial
integral is split at the radii where the angle has a kink, and each piece
is mapped through ``r = a + (b - a)(1 - cos t)/2``, which cancels the
square-root behaviour of the angle at the piece ends, before adaptive
Gauss-Kronrod integration.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy import integrate

from .errors import DivergentIntegral, ToleranceNotMet
from .geometry import Disk, Point2D, angular_extent, radial_breakpoints


@dataclass(frozen=True)
class IntegralSpec:
    region: object
    pole: Point2D
    exponent: float
    rel_tol: float = 1e-8

    def __post_init__(self):
        object.__setattr__(self, "pole", Point2D(*self.pole))
        if not 0 < self.rel_tol <= 1e-3:
            raise ValueError(f"rel_tol must lie in (0, 1e-3], got {self.rel_tol}")


def integrate_power_law(spec):
    """Integral of ``|x - pole|^-exponent`` over ``spec.region``.

    Raises DivergentIntegral when the pole lies in the (closed) region and
    the exponent is at least 2.
    """
    region, pole, p = spec.region, spec.pole, spec.exponent
    if p >= 2 and region.contains(pole):
        raise DivergentIntegral(
            f"pole {tuple(pole)} lies in the integration region and exponent {p} >= 2")
    knots = radial_breakpoints(region, pole)
    total = 0.0
    err = 0.0
    for a, b in zip(knots[:-1], knots[1:]):
        if b - a <= 1e-14 * b:
            continue
        mid = 0.5 * (a + b)
        if angular_extent(region, pole, mid) == 0.0:
            continue
        half = 0.5 * (b - a)

        def f(t):
            r = a + half * (1.0 - math.cos(t))
            if r <= 0.0:
                return 0.0
            return r ** (1.0 - p) * angular_extent(region, pole, r) * half * math.sin(t)

        # quad's own warnings are superseded by the ToleranceNotMet check below
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, e = integrate.quad(f, 0.0, math.pi, epsabs=0.0, epsrel=spec.rel_tol / 10,
                                    limit=500)
        total += val
        err += e
    if err > spec.rel_tol * abs(total) and err > 1e-300:
        raise ToleranceNotMet(
            f"estimated error {err:.3g} exceeds {spec.rel_tol:g} relative of {total:.6g}")
    return total


def q_z(n, cfg, z=None):
    """Relay-disk integral of ``d(x, z)^(-n alpha)``; ``z`` defaults to the eavesdropper."""
    z = cfg.eve_point if z is None else Point2D(*z)
    if math.hypot(*z) <= cfg.l1:
        raise DivergentIntegral(
            f"eavesdropper at distance {math.hypot(*z):g} m lies inside the relay disk")
    return integrate_power_law(IntegralSpec(Disk((0.0, 0.0), cfg.l1), z, n * cfg.alpha,
                                            cfg.quad_tol))


def jam_integral(n, cfg, exclude_eve=True):
    """Integral of ``d(x, eve)^(-n alpha)`` over the active-jammer region."""
    region = cfg.jammer_region(exclude_eve)
    return integrate_power_law(IntegralSpec(region, cfg.eve_point, n * cfg.alpha,
                                            cfg.quad_tol))
