"""The exact round-trip map, its first-order expansion, and the identities between them.

One exact step goes out along the core normal to the outer boundary
(``x = Phi(theta)``), then back along the outer boundary's inward normal until
the ray first hits the core.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ._kernels import backend
from .errors import DegenerateCosine
from .geometry import reduce_angle
from .thickness import DomainShape, arc_gradient, inward_normal_exact, inward_normal_first_order, radial_map

DEGENERATE_COSINE = 1e-9


@dataclass(frozen=True)
class StepRecord:
    """One application of the return map.

    ``t`` is the distance travelled back along ``n`` and ``cosine`` is
    ``<n, nu(theta_in)>``. ``grazing`` marks steps whose ray was clamped to
    tangency.
    """

    theta_in: float
    theta_out: float
    d: float
    t: float
    x: tuple[float, float]
    n: tuple[float, float]
    cosine: float
    grazing: bool = False

    def to_dict(self) -> dict:
        out = asdict(self)
        out["x"] = list(self.x)
        out["n"] = list(self.n)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "StepRecord":
        data = dict(data)
        data["x"] = tuple(data["x"])
        data["n"] = tuple(data["n"])
        return cls(**data)


def return_map_exact(shape: DomainShape, theta: float) -> StepRecord:
    """``F = pi o Phi`` evaluated at one boundary parameter.

    Raises :class:`~corecdyn.errors.NoIntersection` when the inward normal at
    ``Phi(theta)`` misses the core and
    :class:`~corecdyn.errors.DegenerateTangent` when Phi is not an immersion.
    """
    th = reduce_angle(theta)
    out, t, d, x, y, nx, ny, cosine, grazing = backend.exact_step(shape._kernel, th)
    return StepRecord(th, out, d, t, (x, y), (nx, ny), cosine, grazing)


def return_map_first_order(shape: DomainShape, theta: float) -> float:
    """Gradient-descent update ``theta - 2 d d' / |p'|^2``."""
    return backend.first_order_step(shape._kernel, theta)


def first_order_record(shape: DomainShape, theta: float) -> StepRecord:
    """A :class:`StepRecord` for the first-order map.

    The normal is the first-order direction and ``t`` follows from the
    return-distance relation applied to that normal.
    """
    th = reduce_angle(theta)
    out = return_map_first_order(shape, th)
    d = float(shape.thickness(th))
    n = inward_normal_first_order(shape, th)
    cosine = float(np.dot(n, shape.core.outward_normal(th)))
    x = radial_map(shape, th)
    return StepRecord(th, out, d, d / abs(cosine), (float(x[0]), float(x[1])),
                      (float(n[0]), float(n[1])), cosine)


def return_distance_formula(shape: DomainShape, theta: float) -> float:
    """``d / |<n, nu>|`` using the exact inward normal."""
    n = inward_normal_exact(shape, theta)
    cosine = float(np.dot(n, shape.core.outward_normal(theta)))
    if abs(cosine) < DEGENERATE_COSINE:
        raise DegenerateCosine(f"|<n, nu>| = {abs(cosine):.3g} at theta={theta!r}")
    return float(shape.thickness(theta)) / abs(cosine)


def scalar_product_first_order(shape: DomainShape, theta: float) -> float:
    """Expansion ``-1 + g^2/2 + d kappa`` of ``<n, nu>``, taken verbatim.

    For concentric circles the true value is exactly -1, so the ``d kappa``
    term makes this formula disagree with the geometry at order d.
    """
    g = float(arc_gradient(shape, theta))
    d = float(shape.thickness(theta))
    return -1.0 + 0.5 * g * g + d * float(shape.core.curvature(theta))


def displacement_residual(shape: DomainShape, record: StepRecord) -> float:
    """``|c_out - c_in - (d nu + t n)|`` for an exact step."""
    core = shape.core
    lhs = core.point(record.theta_out) - core.point(record.theta_in)
    rhs = record.d * core.outward_normal(record.theta_in) + record.t * np.asarray(record.n)
    return float(np.linalg.norm(lhs - rhs))
