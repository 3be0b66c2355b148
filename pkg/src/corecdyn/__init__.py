"""Return-map dynamics and boundary functionals for thin layers around planar convex cores."""

from ._kernels import BACKEND
from .dynamics import (AllPointsFixed, Classification, FixedPointReport, OrbitRecord, apply_map,
                       classify_orbit, find_fixed_points, gradient_flow_compare, iterate,
                       lyapunov_exponent, lyapunov_monitor, parameter_scan)
from .errors import (ConfigError, ConstraintInfeasible, CoreDynError, DegenerateCosine,
                     DegenerateTangent, NoIntersection, NonPositiveThickness, OrbitInterrupted,
                     ReturnMapError)
from .geometry import ConvexCore
from .returnmap import StepRecord, return_map_exact, return_map_first_order
from .thickness import DomainShape, Harmonic, ThicknessProfile, check_admissibility
from .variational import area, cheeger_ratio, coefficient_descent, functional_report, perimeter

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "AllPointsFixed", "Classification", "ConfigError", "ConstraintInfeasible",
    "ConvexCore", "CoreDynError", "DegenerateCosine", "DegenerateTangent", "DomainShape",
    "FixedPointReport", "Harmonic", "NoIntersection", "NonPositiveThickness", "OrbitInterrupted",
    "OrbitRecord", "ReturnMapError", "StepRecord", "ThicknessProfile", "apply_map", "area",
    "check_admissibility", "cheeger_ratio", "classify_orbit", "coefficient_descent",
    "find_fixed_points", "functional_report", "gradient_flow_compare", "iterate",
    "lyapunov_exponent", "lyapunov_monitor", "parameter_scan", "perimeter", "return_map_exact",
    "return_map_first_order",
]
