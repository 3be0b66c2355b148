"""Planar convex cores with closed-form boundary geometry.

A core is a circle or an axis-aligned ellipse centred at the origin, with
boundary parametrized counterclockwise by ``p(theta) = (a cos theta, b sin theta)``.
Every query accepts a scalar angle or a numpy array of angles; vector-valued
queries return arrays whose last axis has length 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoIntersection

TAU = 2.0 * math.pi

# discriminants in [-GRAZE_TOL, 0) are clamped to tangency
GRAZE_TOL = 1e-12


def reduce_angle(theta: float) -> float:
    """Map an angle to its representative in [0, 2*pi)."""
    r = math.fmod(theta, TAU)
    if r < 0.0:
        r += TAU
    if r >= TAU:
        r = 0.0
    return r


def angular_distance(a, b):
    """Unsigned shortest distance between angles, in [0, pi]."""
    diff = np.mod(np.asarray(a) - np.asarray(b) + math.pi, TAU) - math.pi
    out = np.abs(diff)
    return float(out) if out.ndim == 0 else out


def signed_angle_difference(a: float, b: float) -> float:
    """``a - b`` wrapped to [-pi, pi)."""
    return (a - b + math.pi) % TAU - math.pi


@dataclass(frozen=True)
class ConvexCore:
    """A circle or ellipse with semi-axes ``a >= b > 0``.

    Use the constructors :meth:`unit_circle`, :meth:`circle` and
    :meth:`ellipse` rather than instantiating directly.
    """

    kind: str
    a: float
    b: float

    def __post_init__(self):
        if self.kind not in ("unit_circle", "circle", "ellipse"):
            raise ValueError(f"unknown core kind {self.kind!r}")
        if not (self.a > 0 and self.b > 0 and math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError("core semi-axes must be positive and finite")
        if self.kind != "ellipse" and self.a != self.b:
            raise ValueError("circles need equal semi-axes")
        if self.kind == "ellipse" and self.a < self.b:
            raise ValueError("ellipse requires a >= b")

    @classmethod
    def unit_circle(cls) -> "ConvexCore":
        return cls("unit_circle", 1.0, 1.0)

    @classmethod
    def circle(cls, radius: float) -> "ConvexCore":
        return cls("circle", float(radius), float(radius))

    @classmethod
    def ellipse(cls, a: float, b: float) -> "ConvexCore":
        return cls("ellipse", float(a), float(b))

    @property
    def is_circle(self) -> bool:
        return self.a == self.b

    def point(self, theta):
        """Boundary point ``p(theta)``."""
        theta = np.asarray(theta, dtype=float)
        return np.stack([self.a * np.cos(theta), self.b * np.sin(theta)], axis=-1)

    def derivative(self, theta):
        """Velocity ``p'(theta)`` (not normalized)."""
        theta = np.asarray(theta, dtype=float)
        return np.stack([-self.a * np.sin(theta), self.b * np.cos(theta)], axis=-1)

    def arc_length_derivative(self, theta):
        """Speed ``|p'(theta)|``, i.e. ds/dtheta."""
        theta = np.asarray(theta, dtype=float)
        s, c = np.sin(theta), np.cos(theta)
        return np.sqrt((self.a * s) ** 2 + (self.b * c) ** 2)[()]

    def unit_tangent(self, theta):
        return self.derivative(theta) / np.expand_dims(self.arc_length_derivative(theta), -1)

    def outward_normal(self, theta):
        """Outward unit normal: the unit tangent rotated clockwise."""
        tangent = self.unit_tangent(theta)
        return np.stack([tangent[..., 1], -tangent[..., 0]], axis=-1)

    def curvature(self, theta):
        """Signed curvature, nonnegative for these convex cores."""
        speed = self.arc_length_derivative(theta)
        return self.a * self.b / speed**3

    def speed_derivative(self, theta):
        """d/dtheta of ``|p'(theta)|``; needed for arc-length Hessians."""
        theta = np.asarray(theta, dtype=float)
        s, c = np.sin(theta), np.cos(theta)
        return ((self.a**2 - self.b**2) * s * c / self.arc_length_derivative(theta))[()]

    @property
    def area(self) -> float:
        return math.pi * self.a * self.b

    @property
    def perimeter(self) -> float:
        if self.is_circle:
            return TAU * self.a
        # Ramanujan is not accurate enough for 1e-8 checks; use the complete
        # elliptic integral of the second kind.
        from scipy.special import ellipe

        e2 = 1.0 - (self.b / self.a) ** 2
        return 4.0 * self.a * float(ellipe(e2))

    def angle_of(self, point) -> float:
        """Parameter of a point lying on (or radially near) the boundary."""
        return reduce_angle(math.atan2(point[1] / self.b, point[0] / self.a))

    def contains(self, point) -> bool:
        return (point[0] / self.a) ** 2 + (point[1] / self.b) ** 2 <= 1.0

    def describe(self) -> dict:
        if self.kind == "ellipse":
            return {"kind": "ellipse", "a": self.a, "b": self.b}
        if self.kind == "circle":
            return {"kind": "circle", "radius": self.a}
        return {"kind": "unit_circle"}

    @classmethod
    def from_description(cls, desc: dict) -> "ConvexCore":
        kind = desc["kind"]
        if kind == "unit_circle":
            return cls.unit_circle()
        if kind == "circle":
            return cls.circle(desc["radius"])
        if kind == "ellipse":
            return cls.ellipse(desc["a"], desc["b"])
        raise ValueError(f"unknown core kind {kind!r}")


def ray_exit_intersection(core: ConvexCore, origin, direction) -> tuple[float, float]:
    """First point where the ray ``origin + t*direction`` (t >= 0) meets the core.

    Returns ``(t, theta_hit)``. Raises :class:`NoIntersection` when the ray
    misses, which for the return map means the inward normal at that outer
    boundary point does not reach the core. ``direction`` is normalized
    first, so ``t`` is a Euclidean distance.
    """
    dx, dy = float(direction[0]), float(direction[1])
    norm = math.hypot(dx, dy)
    if norm == 0.0:
        raise ValueError("direction must be non-zero")
    t, theta, _ = _intersect(core, float(origin[0]), float(origin[1]), dx / norm, dy / norm)
    return t, theta


def _intersect(core, ox, oy, dx, dy):
    if core.is_circle:
        r = core.a
        half_b = ox * dx + oy * dy
        c = ox * ox + oy * oy - r * r
        # direction is a unit vector, so the leading coefficient is 1
        disc = half_b * half_b - c
        qa = 1.0
    else:
        X, Y = ox / core.a, oy / core.b
        DX, DY = dx / core.a, dy / core.b
        qa = DX * DX + DY * DY
        half_b = X * DX + Y * DY
        c = X * X + Y * Y - 1.0
        disc = half_b * half_b - qa * c
    grazing = False
    scaled = disc / qa
    if scaled < 0.0:
        if scaled < -GRAZE_TOL:
            raise NoIntersection(
                f"ray from ({ox:.6g}, {oy:.6g}) along ({dx:.6g}, {dy:.6g}) misses the core")
        disc = 0.0
        grazing = True
    t = (-half_b - math.sqrt(disc)) / qa
    if t < 0.0:
        raise NoIntersection("ray points away from the core")
    hx, hy = ox + t * dx, oy + t * dy
    theta = reduce_angle(math.atan2(hy / core.b, hx / core.a))
    return t, theta, grazing
