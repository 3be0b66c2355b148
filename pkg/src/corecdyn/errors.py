"""Exception hierarchy shared by the geometry, return-map and CLI layers."""


class CoreDynError(Exception):
    """Base class for all errors raised by corecdyn."""


class NonPositiveThickness(CoreDynError, ValueError):
    """The thickness profile is not strictly positive somewhere on the core."""


class ReturnMapError(CoreDynError, ArithmeticError):
    """A single step of the return map is undefined."""


class NoIntersection(ReturnMapError):
    """The inward normal ray from the outer boundary misses the core."""


class DegenerateTangent(ReturnMapError):
    """The radial parametrization of the outer boundary is not an immersion."""


class DegenerateCosine(ReturnMapError):
    """The inward normal is (numerically) tangent to the core's normal ray."""


class ConstraintInfeasible(CoreDynError, ValueError):
    """No positive mean thickness attains the requested area."""


class ConfigError(CoreDynError, ValueError):
    """Malformed or inconsistent experiment configuration."""


class OrbitInterrupted(CoreDynError):
    """Raised by bulk kernels when a step fails part-way through an orbit.

    ``index`` is the step that failed, ``thetas`` the iterates computed so
    far and ``__cause__`` the underlying :class:`ReturnMapError`.
    """

    def __init__(self, index, thetas, cause):
        super().__init__(f"step {index} failed: {cause}")
        self.index = index
        self.thetas = thetas
        self.cause = cause
