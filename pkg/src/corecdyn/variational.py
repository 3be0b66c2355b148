"""Area, perimeter and Cheeger ratio of a domain, exactly and via thickness expansions."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConstraintInfeasible
from .geometry import TAU, ConvexCore
from .thickness import DomainShape, Harmonic, ThicknessProfile, outer_boundary_tangent, radial_map

QUADRATURE_POINTS = 4096
MAX_QUADRATURE_POINTS = 1 << 20
QUADRATURE_RTOL = 1e-12


def periodic_integral(f, n: int = QUADRATURE_POINTS) -> float:
    """Integral of a 2*pi-periodic integrand over one period.

    Composite midpoint rule, doubled until the estimate agrees with the one
    at half the resolution (spectral convergence for smooth integrands).
    """
    def rule(k):
        theta = (np.arange(k) + 0.5) * (TAU / k)
        return float(np.sum(f(theta)) * (TAU / k))

    coarse = rule(n // 2)
    fine = rule(n)
    while abs(fine - coarse) > QUADRATURE_RTOL * max(1.0, abs(fine)) and n < MAX_QUADRATURE_POINTS:
        n *= 2
        coarse, fine = fine, rule(n)
    return fine


def area(shape: DomainShape) -> tuple[float, float]:
    """``(exact, expansion)`` where expansion is ``|C| + int d ds + 1/2 int d^2 kappa ds``."""
    core, d = shape.core, shape.thickness

    def shoelace(theta):
        pts = radial_map(shape, theta)
        vel = outer_boundary_tangent(shape, theta)
        return 0.5 * (pts[..., 0] * vel[..., 1] - pts[..., 1] * vel[..., 0])

    def steiner(theta):
        dd = d(theta)
        return (dd + 0.5 * dd**2 * core.curvature(theta)) * core.arc_length_derivative(theta)

    return periodic_integral(shoelace), core.area + periodic_integral(steiner)


def perimeter(shape: DomainShape) -> tuple[float, float]:
    """``(exact, expansion)`` with expansion ``|dC| + int d kappa ds + 1/2 int |grad d|^2 ds``."""
    core, d = shape.core, shape.thickness

    def length(theta):
        return np.linalg.norm(outer_boundary_tangent(shape, theta), axis=-1)

    def expansion(theta):
        dd, d1, _ = d.eval(theta)
        speed = core.arc_length_derivative(theta)
        g = d1 / speed
        return (dd * core.curvature(theta) + 0.5 * g * g) * speed

    return periodic_integral(length), core.perimeter + periodic_integral(expansion)


def cheeger_ratio(shape: DomainShape) -> float:
    return perimeter(shape)[0] / area(shape)[0]


@dataclass(frozen=True)
class FunctionalReport:
    area_exact: float
    area_expansion: float
    area_residual: float
    perimeter_exact: float
    perimeter_expansion: float
    perimeter_residual: float
    cheeger_ratio: float

    def as_dict(self) -> dict:
        return asdict(self)


def functional_report(shape: DomainShape) -> FunctionalReport:
    a_exact, a_exp = area(shape)
    p_exact, p_exp = perimeter(shape)
    return FunctionalReport(a_exact, a_exp, a_exact - a_exp, p_exact, p_exp, p_exact - p_exp,
                            p_exact / a_exact)


# ------------------------------------------------------------ constrained descent


def _solve_mean_thickness(core: ConvexCore, m: int, eps: float, target: float) -> float:
    """Positive d0 with ``area(d0 + eps cos(m theta)) == target``.

    In the plane the area of a normal graph over a convex core is exactly
    ``|C| + int d ds + 1/2 int d^2 kappa ds``, a quadratic in d0.
    """
    h = lambda th: np.cos(m * th)
    speed = core.arc_length_derivative
    kappa = core.curvature
    qa = 0.5 * periodic_integral(lambda th: kappa(th) * speed(th))
    qb = core.perimeter + eps * periodic_integral(lambda th: h(th) * kappa(th) * speed(th))
    qc = (core.area + eps * periodic_integral(lambda th: h(th) * speed(th))
          + 0.5 * eps**2 * periodic_integral(lambda th: h(th) ** 2 * kappa(th) * speed(th))
          - target)
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0:
        raise ConstraintInfeasible(f"no real mean thickness reaches area {target}")
    d0 = (-qb + math.sqrt(disc)) / (2.0 * qa)
    if d0 <= abs(eps):
        raise ConstraintInfeasible(f"area {target} needs d0={d0:.6g} which does not keep d positive")
    return d0


@dataclass(frozen=True)
class DescentTrajectory:
    d0: tuple[float, ...]
    eps: tuple[float, ...]
    cheeger: tuple[float, ...]
    m: int

    def profile(self, k: int = -1) -> ThicknessProfile:
        return ThicknessProfile.trig(self.d0[k], self.eps[k], self.m)


def coefficient_descent(core: ConvexCore, m: int, volume_target: float, init: ThicknessProfile,
                        steps: int = 500, rate: float = 0.1, tol: float = 1e-12,
                        fd_step: float = 1e-6) -> DescentTrajectory:
    """Projected gradient descent of the Cheeger ratio over ``(d0, eps)`` at fixed area.

    The gradient is taken by central differences. Projecting a step onto the
    area constraint resets d0 to the unique positive root of the area
    quadratic, so only the eps component of the gradient survives.
    """
    if volume_target <= core.area:
        raise ConstraintInfeasible("target area must exceed the core area")
    if init.is_constant:
        eps = 0.0
    else:
        harmonics = [h for h in init.terms if h.frequency == m]
        if len(init.terms) != 1 or not harmonics or harmonics[0].phase != 0.0:
            raise ValueError("descent runs over a single in-phase harmonic of frequency m")
        eps = harmonics[0].amplitude
    d0 = _solve_mean_thickness(core, m, eps, volume_target)

    def ratio(d0_, eps_):
        terms = (Harmonic(eps_, m),) if eps_ != 0 else ()
        return cheeger_ratio(DomainShape(core, ThicknessProfile(d0_, terms)))

    d0s, epss, values = [d0], [eps], [ratio(d0, eps)]
    for _ in range(steps):
        g_eps = (ratio(d0, eps + fd_step) - ratio(d0, eps - fd_step)) / (2 * fd_step)
        eps = eps - rate * g_eps
        d0 = _solve_mean_thickness(core, m, eps, volume_target)
        d0s.append(d0)
        epss.append(eps)
        values.append(ratio(d0, eps))
        if abs(epss[-1] - epss[-2]) < tol:
            break
    return DescentTrajectory(tuple(d0s), tuple(epss), tuple(values), m)
