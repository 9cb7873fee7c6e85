"""Planar geometry: points, disks, annuli and disk-carved regions.

Regions are closed sets. Every region can report its area, test membership,
draw uniform samples and describe how much of a circle around an arbitrary
pole it covers (the angular extent used by the power-law quadrature).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np
from scipy import integrate

TWO_PI = 2.0 * math.pi


class Point2D(NamedTuple):
    x: float
    y: float

    @classmethod
    def polar(cls, r, phi):
        return cls(r * math.cos(phi), r * math.sin(phi))

    def dist(self, other):
        return math.hypot(self.x - other[0], self.y - other[1])

    @property
    def norm(self):
        return math.hypot(self.x, self.y)


ORIGIN = Point2D(0.0, 0.0)


def _as_points(p):
    arr = np.asarray(p, dtype=float)
    return arr.reshape(-1, 2) if arr.ndim == 1 else arr


def _lens_area(d, r1, r2):
    """Area of the intersection of two disks with radii r1, r2 at center distance d."""
    if d >= r1 + r2:
        return 0.0
    if d <= abs(r1 - r2):
        return math.pi * min(r1, r2) ** 2
    a1 = r1 * r1 * math.acos((d * d + r1 * r1 - r2 * r2) / (2 * d * r1))
    a2 = r2 * r2 * math.acos((d * d + r2 * r2 - r1 * r1) / (2 * d * r2))
    k = 0.5 * math.sqrt((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2))
    return a1 + a2 - k


# --- arc sets on a circle, as sorted disjoint intervals inside [0, 2pi] ---

def _arc_of_disk(center, radius, pole, r):
    """Angular intervals of the circle |x - pole| = r lying inside the disk."""
    dx = center[0] - pole[0]
    dy = center[1] - pole[1]
    d = math.hypot(dx, dy)
    if d == 0.0:
        return [(0.0, TWO_PI)] if r <= radius else []
    c = (r * r + d * d - radius * radius) / (2.0 * r * d)
    if c <= -1.0:
        return [(0.0, TWO_PI)]
    if c >= 1.0:
        return []
    if c > 0.0:
        # 1 - c in factored form avoids cancellation for tiny arcs
        one_minus_c = (radius - r + d) * (radius + r - d) / (2.0 * r * d)
        half = 2.0 * math.asin(math.sqrt(max(one_minus_c, 0.0) / 2.0))
    else:
        half = math.acos(c)
    mid = math.atan2(dy, dx) % TWO_PI
    lo, hi = mid - half, mid + half
    if lo < 0.0:
        return [(0.0, hi), (lo + TWO_PI, TWO_PI)]
    if hi > TWO_PI:
        return [(0.0, hi - TWO_PI), (lo, TWO_PI)]
    return [(lo, hi)]


def _subtract(arcs, cut):
    out = []
    for a, b in arcs:
        pieces = [(a, b)]
        for c, d in cut:
            nxt = []
            for p, q in pieces:
                if d <= p or c >= q:
                    nxt.append((p, q))
                    continue
                if c > p:
                    nxt.append((p, c))
                if d < q:
                    nxt.append((d, q))
            pieces = nxt
        out.extend(pieces)
    return out


def _measure(arcs):
    return sum(b - a for a, b in arcs)


@dataclass(frozen=True)
class Disk:
    center: Point2D
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", Point2D(*self.center))
        if not self.radius > 0:
            raise ValueError(f"disk radius must be positive, got {self.radius}")

    @property
    def area(self):
        return math.pi * self.radius ** 2

    def contains(self, p):
        pts = _as_points(p)
        d2 = (pts[:, 0] - self.center.x) ** 2 + (pts[:, 1] - self.center.y) ** 2
        inside = d2 <= self.radius ** 2
        return bool(inside[0]) if np.ndim(p) == 1 else inside

    def _interior(self, pts):
        d2 = (pts[:, 0] - self.center.x) ** 2 + (pts[:, 1] - self.center.y) ** 2
        return d2 < self.radius ** 2

    def arcs(self, pole, r):
        return _arc_of_disk(self.center, self.radius, pole, r)

    def circles(self):
        return [(self.center, self.radius)]

    def sample(self, n, rng):
        return _sample_ring(self.center, 0.0, self.radius, n, rng)

    def overlap_area(self, disk):
        return _lens_area(self.center.dist(disk.center), self.radius, disk.radius)


@dataclass(frozen=True)
class Annulus:
    center: Point2D
    r_inner: float
    r_outer: float

    def __post_init__(self):
        object.__setattr__(self, "center", Point2D(*self.center))
        if not 0 <= self.r_inner < self.r_outer:
            raise ValueError(
                f"annulus needs 0 <= r_inner < r_outer, got {self.r_inner}, {self.r_outer}")

    @property
    def area(self):
        return math.pi * (self.r_outer ** 2 - self.r_inner ** 2)

    def contains(self, p):
        pts = _as_points(p)
        d2 = (pts[:, 0] - self.center.x) ** 2 + (pts[:, 1] - self.center.y) ** 2
        inside = (d2 >= self.r_inner ** 2) & (d2 <= self.r_outer ** 2)
        return bool(inside[0]) if np.ndim(p) == 1 else inside

    def arcs(self, pole, r):
        outer = _arc_of_disk(self.center, self.r_outer, pole, r)
        if self.r_inner == 0.0:
            return outer
        return _subtract(outer, _arc_of_disk(self.center, self.r_inner, pole, r))

    def circles(self):
        return [(self.center, self.r_outer), (self.center, self.r_inner)]

    def sample(self, n, rng):
        return _sample_ring(self.center, self.r_inner, self.r_outer, n, rng)

    def overlap_area(self, disk):
        d = self.center.dist(disk.center)
        out = _lens_area(d, self.r_outer, disk.radius)
        if self.r_inner > 0.0:
            out -= _lens_area(d, self.r_inner, disk.radius)
        return out


@dataclass(frozen=True)
class Difference:
    """A disk or annulus with disk-shaped holes removed (hole boundaries stay in)."""

    base: Union[Disk, Annulus]
    holes: tuple = ()

    def __post_init__(self):
        if isinstance(self.base, Difference):
            object.__setattr__(self, "holes", tuple(self.base.holes) + tuple(self.holes))
            object.__setattr__(self, "base", self.base.base)
        object.__setattr__(self, "holes", tuple(self.holes))
        for h in self.holes:
            if not isinstance(h, Disk):
                raise TypeError("holes must be Disk instances")

    def hole_overlaps(self):
        """Area each hole removes from the base, in hole order."""
        return [self.base.overlap_area(h) for h in self.holes]

    @property
    def area(self):
        holes = [h for h, a in zip(self.holes, self.hole_overlaps()) if a > 0.0]
        disjoint = all(
            a.center.dist(b.center) >= a.radius + b.radius
            for i, a in enumerate(holes) for b in holes[i + 1:])
        if disjoint:
            return max(self.base.area - sum(self.base.overlap_area(h) for h in holes), 0.0)
        return _area_by_arcs(self)

    def contains(self, p):
        pts = _as_points(p)
        inside = np.asarray(self.base.contains(pts))
        for h in self.holes:
            inside &= ~h._interior(pts)
        return bool(inside[0]) if np.ndim(p) == 1 else inside

    def arcs(self, pole, r):
        arcs = self.base.arcs(pole, r)
        for h in self.holes:
            if not arcs:
                break
            arcs = _subtract(arcs, h.arcs(pole, r))
        return arcs

    def circles(self):
        out = list(self.base.circles())
        for h in self.holes:
            out.extend(h.circles())
        return out

    def sample(self, n, rng):
        if n == 0:
            return np.empty((0, 2))
        if self.area <= 0.0:
            raise ValueError("cannot sample an empty region")
        chunks = []
        need = n
        while need > 0:
            draw = self.base.sample(max(2 * need, 16), rng)
            keep = draw[self.contains(draw)]
            chunks.append(keep[:need])
            need -= len(chunks[-1])
        return np.concatenate(chunks)


Region = Union[Disk, Annulus, Difference]


def angular_extent(region, pole, r):
    """Angle (radians) of the circle of radius ``r`` around ``pole`` that lies in ``region``."""
    if r <= 0.0:
        return TWO_PI if region.contains(pole) else 0.0
    return _measure(region.arcs(pole, r))


def radial_breakpoints(region, pole):
    """Radii around ``pole`` where the angular extent of ``region`` has a kink."""
    pts = {0.0}
    for c, rad in region.circles():
        if rad <= 0.0:
            continue
        d = math.hypot(c[0] - pole[0], c[1] - pole[1])
        pts.add(abs(d - rad))
        pts.add(d + rad)
    return sorted(pts)


def _area_by_arcs(region):
    center = region.base.center
    knots = radial_breakpoints(region, center)
    total = 0.0
    for a, b in zip(knots[:-1], knots[1:]):
        val, _ = integrate.quad(lambda r: r * angular_extent(region, center, r), a, b,
                                epsabs=0.0, epsrel=1e-12, limit=200)
        total += val
    return total


def _sample_ring(center, r_in, r_out, n, rng):
    # inverse CDF of the radius: F(r) = (r^2 - r_in^2) / (r_out^2 - r_in^2)
    u = rng.random(n)
    r = np.sqrt(r_in * r_in + u * (r_out * r_out - r_in * r_in))
    phi = rng.random(n) * TWO_PI
    return np.column_stack((center[0] + r * np.cos(phi), center[1] + r * np.sin(phi)))


def region_area(region):
    return region.area


def contains(region, p):
    return region.contains(p)


def sample_ppp(region, density, rng):
    """Draw one realization of a homogeneous Poisson point process on ``region``.

    Returns an ``(N, 2)`` array with ``N ~ Poisson(density * area)``.
    """
    if density < 0:
        raise ValueError("density must be nonnegative")
    if density == 0:
        return np.empty((0, 2))
    n = rng.poisson(density * region.area)
    return region.sample(n, rng)
