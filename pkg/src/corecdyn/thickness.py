"""Thickness profiles on the core boundary and the domains they generate."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np

from ._kernels import backend
from .errors import DegenerateTangent, NonPositiveThickness, ReturnMapError
from .geometry import TAU, ConvexCore

POSITIVITY_GRID = 4096
ADMISSIBILITY_GRID = 2048
INJECTIVITY_GRID = 4096
DEGENERATE_TANGENT = 1e-12


class Harmonic(NamedTuple):
    """One term ``amplitude * cos(frequency * theta + phase)``."""

    amplitude: float
    frequency: int
    phase: float = 0.0


@dataclass(frozen=True)
class ThicknessProfile:
    """Trigonometric thickness ``d0 + sum_j eps_j cos(m_j theta + phi_j)``.

    A profile without harmonics is the constant profile. Positivity is
    verified at construction: the bound ``d0 - sum |eps_j|`` is tried first
    and, if inconclusive, ``d`` is sampled on a 4096-point grid.
    """

    d0: float
    terms: tuple[Harmonic, ...] = ()

    def __post_init__(self):
        terms = tuple(Harmonic(float(a), int(m), float(p)) for a, m, p in self.terms)
        object.__setattr__(self, "terms", terms)
        if not math.isfinite(self.d0):
            raise NonPositiveThickness("d0 must be finite")
        for h in terms:
            if h.frequency <= 0:
                raise ValueError("harmonic frequencies must be positive integers")
        if self.d0 - sum(abs(h.amplitude) for h in terms) > 0:
            return
        theta = np.arange(POSITIVITY_GRID) * (TAU / POSITIVITY_GRID)
        low = float(np.min(self._values(theta)[0]))
        if low <= 0:
            raise NonPositiveThickness(f"thickness reaches {low:.6g} <= 0")

    @classmethod
    def constant(cls, d0: float) -> "ThicknessProfile":
        return cls(float(d0))

    @classmethod
    def trig(cls, d0: float, eps: float, m: int, phase: float = 0.0) -> "ThicknessProfile":
        if eps == 0:
            return cls(float(d0))
        return cls(float(d0), (Harmonic(eps, m, phase),))

    @property
    def is_constant(self) -> bool:
        return all(h.amplitude == 0 for h in self.terms)

    def scaled(self, s: float) -> "ThicknessProfile":
        """The profile ``s * d``."""
        return ThicknessProfile(s * self.d0, tuple(Harmonic(s * a, m, p) for a, m, p in self.terms))

    def _values(self, theta):
        theta = np.asarray(theta, dtype=float)
        d = np.full(theta.shape, self.d0)
        d1 = np.zeros(theta.shape)
        d2 = np.zeros(theta.shape)
        for amp, m, phase in self.terms:
            arg = m * theta + phase
            c, s = np.cos(arg), np.sin(arg)
            d = d + amp * c
            d1 = d1 - amp * m * s
            d2 = d2 - amp * m * m * c
        return d[()], d1[()], d2[()]

    def eval(self, theta):
        """Return ``(d, d', d'')`` with derivatives taken in theta."""
        d, d1, d2 = self._values(theta)
        if np.any(d <= 0):
            raise NonPositiveThickness(f"thickness is not positive at theta={theta!r}")
        return d, d1, d2

    def __call__(self, theta):
        return self.eval(theta)[0]

    def kernel_args(self):
        amps = np.array([h.amplitude for h in self.terms], dtype=float)
        freqs = np.array([h.frequency for h in self.terms], dtype=float)
        phases = np.array([h.phase for h in self.terms], dtype=float)
        return self.d0, amps, freqs, phases

    def describe(self) -> dict:
        return {"d0": self.d0, "harmonics": [list(h) for h in self.terms]}

    @classmethod
    def from_description(cls, desc: dict) -> "ThicknessProfile":
        return cls(desc["d0"], tuple(Harmonic(a, int(m), p) for a, m, p in desc["harmonics"]))


@dataclass(frozen=True)
class AdmissibilityReport:
    min_thickness: float
    min_metric_factor: float
    parallel_metric_ok: bool
    gnp_ok: bool
    gnp_failures: int
    grid: int

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class DomainShape:
    """A domain in the class generated by ``core`` and ``thickness``.

    Admissibility is computed on first access and never blocks simulation.
    """

    core: ConvexCore
    thickness: ThicknessProfile
    _kernel: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_kernel", backend.pack(*self.kernel_params()))

    def kernel_params(self) -> tuple:
        """Unpacked ``(a, b, d0, amps, freqs, phases)`` for any kernel backend."""
        return (self.core.a, self.core.b, *self.thickness.kernel_args())

    @cached_property
    def admissibility(self) -> AdmissibilityReport:
        return check_admissibility(self)

    def scaled(self, s: float) -> "DomainShape":
        return DomainShape(self.core, self.thickness.scaled(s))

    def describe(self) -> dict:
        return {"core": self.core.describe(), "thickness": self.thickness.describe()}

    @classmethod
    def from_description(cls, desc: dict) -> "DomainShape":
        return cls(ConvexCore.from_description(desc["core"]),
                   ThicknessProfile.from_description(desc["thickness"]))

    def __getstate__(self):
        return {"core": self.core, "thickness": self.thickness}

    def __setstate__(self, state):
        object.__setattr__(self, "core", state["core"])
        object.__setattr__(self, "thickness", state["thickness"])
        self.__post_init__()


def arc_gradient(shape: DomainShape, theta):
    """Tangential gradient of d with respect to arc length, ``d'/|p'|``."""
    _, d1, _ = shape.thickness.eval(theta)
    return d1 / shape.core.arc_length_derivative(theta)


def arc_hessian(shape: DomainShape, theta):
    """Second arc-length derivative of d."""
    _, d1, d2 = shape.thickness.eval(theta)
    speed = shape.core.arc_length_derivative(theta)
    dspeed = shape.core.speed_derivative(theta)
    return d2 / speed**2 - d1 * dspeed / speed**3


def radial_map(shape: DomainShape, theta):
    """Outer boundary point ``p(theta) + d(theta) nu(theta)``."""
    d = shape.thickness(theta)
    return shape.core.point(theta) + np.expand_dims(d, -1) * shape.core.outward_normal(theta)


def outer_boundary_tangent(shape: DomainShape, theta):
    """dPhi/dtheta = |p'|(1 + d kappa) T + d' nu (not normalized)."""
    core = shape.core
    d, d1, _ = shape.thickness.eval(theta)
    speed = core.arc_length_derivative(theta)
    stretch = speed * (1.0 + d * core.curvature(theta))
    tangent = (np.expand_dims(stretch, -1) * core.unit_tangent(theta)
               + np.expand_dims(d1, -1) * core.outward_normal(theta))
    if np.any(np.linalg.norm(tangent, axis=-1) < DEGENERATE_TANGENT):
        raise DegenerateTangent("radial parametrization has a vanishing tangent")
    return tangent


def inward_normal_exact(shape: DomainShape, theta):
    """Unit normal of the outer boundary, oriented so that <n, nu> < 0."""
    tangent = outer_boundary_tangent(shape, theta)
    n = np.stack([-tangent[..., 1], tangent[..., 0]], axis=-1)
    n = n / np.linalg.norm(n, axis=-1, keepdims=True)
    nu = shape.core.outward_normal(theta)
    flip = np.sum(n * nu, axis=-1) > 0
    return np.where(np.expand_dims(flip, -1), -n, n)


def inward_normal_first_order(shape: DomainShape, theta):
    """Direction ``-(nu - g T)/sqrt(1 + g^2)`` with g the arc-length gradient.

    The curvature factor that would multiply this vector is deliberately
    omitted; only the unit direction is meaningful.
    """
    g = arc_gradient(shape, theta)
    nu = shape.core.outward_normal(theta)
    tangent = shape.core.unit_tangent(theta)
    g_ = np.expand_dims(g, -1)
    return -(nu - g_ * tangent) / np.sqrt(1.0 + g_**2)


def check_admissibility(shape: DomainShape, grid: int = ADMISSIBILITY_GRID) -> AdmissibilityReport:
    """Grid diagnostics for positivity, the metric factor 1 - d kappa, and normal rays."""
    from .returnmap import return_map_exact

    theta = np.arange(grid) * (TAU / grid)
    d = shape.thickness(theta)
    factor = 1.0 - d * shape.core.curvature(theta)
    failures = 0
    for th in theta:
        try:
            return_map_exact(shape, float(th))
        except ReturnMapError:
            failures += 1
    min_factor = float(np.min(factor))
    return AdmissibilityReport(
        min_thickness=float(np.min(d)),
        min_metric_factor=min_factor,
        parallel_metric_ok=bool(min_factor > 0),
        gnp_ok=failures == 0,
        gnp_failures=failures,
        grid=grid,
    )


def outer_boundary_is_simple(shape: DomainShape, n: int = INJECTIVITY_GRID) -> bool:
    """Check the closed polygon through ``Phi(theta_i)`` for self-intersections.

    Sweep-and-prune on x-extents, then an exact orientation test on the
    surviving segment pairs. Adjacent segments share an endpoint and are skipped.
    """
    theta = np.arange(n) * (TAU / n)
    pts = radial_map(shape, theta)
    p = pts
    q = np.roll(pts, -1, axis=0)
    xmin = np.minimum(p[:, 0], q[:, 0])
    xmax = np.maximum(p[:, 0], q[:, 0])
    order = np.argsort(xmin, kind="stable")
    sorted_xmin = xmin[order]
    for rank, i in enumerate(order):
        stop = np.searchsorted(sorted_xmin, xmax[i], side="right")
        cand = order[rank + 1:stop]
        cand = cand[(cand != (i + 1) % n) & (cand != (i - 1) % n)]
        if cand.size and np.any(_segments_cross(p[i], q[i], p[cand], q[cand])):
            return False
    return True


def _orient(a, b, c):
    return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])


def _segments_cross(p1, q1, p2, q2):
    o1 = _orient(p1, q1, p2)
    o2 = _orient(p1, q1, q2)
    o3 = _orient(p2, q2, p1)
    o4 = _orient(p2, q2, q1)
    return (o1 * o2 <= 0) & (o3 * o4 <= 0)
