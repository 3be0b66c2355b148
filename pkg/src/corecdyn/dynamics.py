"""Discrete dynamics of the return map on the core boundary.

Orbits, fixed points and their multipliers, the Lyapunov function
``V = d^2 / 2``, Lyapunov exponents, cycle/chaos classification, parameter
scans and the comparison with the continuous gradient flow.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import bisect

from ._kernels import backend
from .errors import NonPositiveThickness, OrbitInterrupted, ReturnMapError
from .geometry import TAU, ConvexCore, angular_distance, reduce_angle, signed_angle_difference
from .returnmap import StepRecord, first_order_record, return_map_exact
from .thickness import DomainShape, ThicknessProfile, arc_gradient, arc_hessian

EXACT = "exact"
FIRST_ORDER = "first-order"
VARIANTS = (EXACT, FIRST_ORDER)

CHAOS_THRESHOLD = 0.05
MARGINAL_TOL = 1e-9


def _check_variant(variant: str) -> bool:
    if variant not in VARIANTS:
        raise ValueError(f"unknown map variant {variant!r}; expected one of {VARIANTS}")
    return variant == EXACT


def apply_map(shape: DomainShape, theta: float, variant: str = EXACT) -> float:
    return backend.step(shape._kernel, theta, _check_variant(variant))


# --------------------------------------------------------------------- orbits


@dataclass(frozen=True)
class Termination:
    """Why an orbit stopped.

    ``kind`` is one of ``Converged``, ``PeriodicCycle``, ``MaxIterations`` or
    ``StepFailed``; the remaining fields are filled as relevant.
    """

    kind: str
    iterations: int
    theta: float | None = None
    period: int | None = None
    cycle: tuple[float, ...] = ()
    error: str | None = None

    def to_dict(self) -> dict:
        out = asdict(self)
        out["cycle"] = list(self.cycle)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Termination":
        data = dict(data)
        data["cycle"] = tuple(data["cycle"])
        return cls(**data)


@dataclass(frozen=True)
class OrbitRecord:
    shape: DomainShape
    variant: str
    thetas: tuple[float, ...]
    steps: tuple[StepRecord, ...]
    V: tuple[float, ...]
    termination: Termination
    tol: float

    @property
    def final_theta(self) -> float:
        return self.thetas[-1]

    def to_dict(self) -> dict:
        return {
            "shape": self.shape.describe(),
            "variant": self.variant,
            "tol": self.tol,
            "thetas": list(self.thetas),
            "V": list(self.V),
            "steps": [s.to_dict() for s in self.steps],
            "termination": self.termination.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "OrbitRecord":
        return cls(
            shape=DomainShape.from_description(data["shape"]),
            variant=data["variant"],
            thetas=tuple(data["thetas"]),
            steps=tuple(StepRecord.from_dict(s) for s in data["steps"]),
            V=tuple(data["V"]),
            termination=Termination.from_dict(data["termination"]),
            tol=data["tol"],
        )


def _cycle_period(thetas, period_max: int, cycle_tol: float) -> int | None:
    """Smallest p >= 1 whose recurrence holds over the last 4p samples."""
    arr = np.asarray(thetas)
    for p in range(1, period_max + 1):
        if arr.size < 5 * p:
            break
        window = arr[-5 * p:]
        if np.all(angular_distance(window[p:], window[:-p]) < cycle_tol):
            return p
    return None


def _angdist(a: float, b: float) -> float:
    return abs((a - b + math.pi) % TAU - math.pi)


def _sustained(thetas, p: int, cycle_tol: float) -> bool:
    n = len(thetas)
    return all(_angdist(thetas[j], thetas[j - p]) < cycle_tol for j in range(n - 4 * p, n))


def _new_cycle(thetas, period_max: int, cycle_tol: float) -> int | None:
    """Period p >= 2 of a sustained, genuinely non-stationary recurrence, if any."""
    last = thetas[-1]
    for p in range(2, min(period_max, (len(thetas) - 1) // 5) + 1):
        if _angdist(last, thetas[-1 - p]) < cycle_tol and _sustained(thetas, p, cycle_tol):
            if _sustained(thetas, 1, cycle_tol):
                return None
            return p
    return None


def iterate(shape: DomainShape, theta0: float, variant: str = EXACT, max_iters: int = 1000,
            tol: float = 1e-10, period_max: int = 16, cycle_tol: float = 1e-9) -> OrbitRecord:
    """Iterate the map until convergence, a sustained cycle, failure or ``max_iters``."""
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    exact = _check_variant(variant)
    theta = reduce_angle(theta0)
    thetas = [theta]
    steps = []
    termination = None
    for k in range(max_iters):
        try:
            rec = return_map_exact(shape, theta) if exact else first_order_record(shape, theta)
        except (ReturnMapError, NonPositiveThickness) as exc:
            termination = Termination("StepFailed", k, theta=theta,
                                      error=f"{type(exc).__name__}: {exc}")
            break
        steps.append(rec)
        thetas.append(rec.theta_out)
        if _angdist(rec.theta_out, theta) < tol:
            termination = Termination("Converged", k + 1, theta=rec.theta_out)
            break
        theta = rec.theta_out
        p = _new_cycle(thetas, period_max, cycle_tol)
        if p is not None:
            termination = Termination("PeriodicCycle", k + 1, period=p, cycle=tuple(thetas[-p:]))
            break
    if termination is None:
        termination = Termination("MaxIterations", max_iters, theta=thetas[-1])
    V = tuple(0.5 * float(shape.thickness(th)) ** 2 for th in thetas)
    return OrbitRecord(shape, variant, tuple(thetas), tuple(steps), V, termination, tol)


# ---------------------------------------------------------------- fixed points


@dataclass(frozen=True)
class FixedPointReport:
    """A critical point of d with its linear stability.

    ``mu = 1 - 2 d lambda`` is the multiplier predicted by the gradient
    descent expansion. ``exact_multiplier`` is the measured derivative of the
    exact map at the same point.
    """

    theta: float
    d: float
    hessian: float
    mu: float
    stability: str
    exact_multiplier: float | None = None


@dataclass(frozen=True)
class AllPointsFixed:
    """Marker returned for constant profiles: every boundary point is fixed."""

    d: float
    mu: float = 1.0
    stability: str = "Marginal"


def classify_multiplier(mu: float) -> str:
    if abs(abs(mu) - 1.0) <= MARGINAL_TOL:
        return "Marginal"
    return "Attracting" if abs(mu) < 1.0 else "Repelling"


def find_fixed_points(shape: DomainShape, grid: int = 4096, xtol: float = 1e-12):
    """All zeros of d' on [0, 2*pi), bracketed on a grid and refined by bisection."""
    if shape.thickness.is_constant:
        return AllPointsFixed(shape.thickness.d0)
    theta = np.arange(grid + 1) * (TAU / grid)
    slope = shape.thickness.eval(theta)[1]
    dprime = lambda th: float(shape.thickness.eval(th)[1])
    roots = []
    for i in range(grid):
        if slope[i] == 0.0:
            roots.append(float(theta[i]))
        elif slope[i] * slope[i + 1] < 0.0:
            roots.append(bisect(dprime, theta[i], theta[i + 1], xtol=xtol))
    unique = []
    for r in sorted(reduce_angle(r) for r in roots):
        if not unique or angular_distance(r, unique[-1]) > 1e-9:
            unique.append(r)
    if len(unique) > 1 and angular_distance(unique[0], unique[-1]) <= 1e-9:
        unique.pop()
    reports = []
    for th in unique:
        d = float(shape.thickness(th))
        lam = float(arc_hessian(shape, th))
        mu = 1.0 - 2.0 * d * lam
        try:
            exact_mu = numeric_multiplier(shape, th, EXACT)
        except (ReturnMapError, ValueError):
            exact_mu = None
        reports.append(FixedPointReport(th, d, lam, mu, classify_multiplier(mu), exact_mu))
    return reports


def numeric_multiplier(shape: DomainShape, theta_star: float, variant: str = EXACT,
                       h: float = 1e-5) -> float:
    """Central-difference derivative of the map at a fixed point."""
    exact = _check_variant(variant)
    image = backend.step(shape._kernel, theta_star, exact)
    if angular_distance(image, theta_star) > 1e-8:
        raise ValueError(f"theta={theta_star!r} is not a fixed point of the {variant} map")
    return backend.derivative(shape._kernel, theta_star, h, exact)


# ---------------------------------------------------------------- Lyapunov


@dataclass(frozen=True)
class LyapunovMonitor:
    """Per-step change of ``V = d^2/2`` against the leading term ``-2 d^2 g^2``."""

    dV: np.ndarray
    predicted: np.ndarray
    residual: np.ndarray
    gradient: np.ndarray
    strictly_decreasing: bool
    residual_ratio: float


def lyapunov_monitor(orbit: OrbitRecord, gradient_floor: float = 1e-6) -> LyapunovMonitor:
    """Compare the observed decrease of V with its predicted leading term.

    ``strictly_decreasing`` considers only steps with ``|d'| > gradient_floor``.
    ``residual_ratio`` is ``max|residual| / max|predicted|``.
    """
    if len(orbit.thetas) < 1:
        raise ValueError("empty orbit")
    V = np.asarray(orbit.V)
    n = len(orbit.steps)
    theta = np.asarray(orbit.thetas[:n])
    dV = V[1:n + 1] - V[:n]
    if n:
        d, d1, _ = orbit.shape.thickness.eval(theta)
        g = arc_gradient(orbit.shape, theta)
    else:
        d = d1 = g = np.zeros(0)
    predicted = -2.0 * d**2 * g**2
    residual = dV - predicted
    moving = np.abs(d1) > gradient_floor
    strictly = bool(np.all(dV[moving] < 0))
    peak = float(np.max(np.abs(predicted))) if n else 0.0
    ratio = float(np.max(np.abs(residual))) / peak if peak > 0 else 0.0
    return LyapunovMonitor(dV, predicted, residual, np.atleast_1d(g), strictly, ratio)


def lyapunov_exponent(shape: DomainShape, theta0: float, n_transient: int = 1000,
                      n_sample: int = 10000, variant: str = EXACT, h: float = 1e-6) -> float:
    """Orbit average of ``log|F'(theta_k)|`` after a transient.

    Raises :class:`~corecdyn.errors.OrbitInterrupted` (with the failing step
    index) when the map is undefined along the orbit.
    """
    if n_sample < 1000:
        raise ValueError("n_sample must be at least 1000")
    return backend.lyapunov_mean(shape._kernel, theta0, n_transient, n_sample, h,
                                 _check_variant(variant))


# ---------------------------------------------------------------- classification


@dataclass(frozen=True)
class Classification:
    kind: str  # FixedPoint, Periodic, Chaotic, Undetermined or Undefined
    period: int | None = None
    points: tuple[float, ...] = ()
    lyapunov: float | None = None

    @property
    def label(self) -> str:
        return f"Periodic({self.period})" if self.kind == "Periodic" else self.kind

    def to_dict(self) -> dict:
        out = asdict(self)
        out["points"] = list(self.points)
        return out


def classify_orbit(orbit: OrbitRecord, period_max: int = 16, cycle_tol: float = 1e-6,
                   tail: int = 1000) -> Classification:
    """Fixed point, smallest sustained period, chaos (tail exponent > 0.05) or undetermined."""
    if orbit.termination.kind == "StepFailed":
        raise ValueError("cannot classify an orbit that stopped on a failed step")
    if orbit.termination.kind == "Converged":
        return Classification("FixedPoint", points=(orbit.final_theta,))
    p = _cycle_period(orbit.thetas, period_max, cycle_tol)
    if p == 1:
        return Classification("FixedPoint", points=(orbit.final_theta,))
    if p is not None:
        return Classification("Periodic", period=p, points=tuple(sorted(orbit.thetas[-p:])))
    exact = orbit.variant == EXACT
    logs = []
    for th in orbit.thetas[-tail:]:
        try:
            slope = abs(backend.derivative(orbit.shape._kernel, th, 1e-6, exact))
        except (ReturnMapError, NonPositiveThickness):
            continue
        logs.append(math.log(slope) if slope > 0 else -math.inf)
    estimate = float(np.mean(logs)) if logs else float("nan")
    if estimate > CHAOS_THRESHOLD:
        return Classification("Chaotic", lyapunov=estimate)
    return Classification("Undetermined", lyapunov=estimate)


# ---------------------------------------------------------------- scans


@dataclass(frozen=True)
class ScanCell:
    d0: float
    eps: float
    classification: Classification
    lyapunov: float

    @property
    def label(self) -> str:
        return self.classification.label


@dataclass(frozen=True)
class ScanResult:
    m: int
    d0_values: tuple[float, ...]
    eps_values: tuple[float, ...]
    cells: tuple[ScanCell, ...]  # row-major: d0 outer, eps inner

    def cell(self, i: int, j: int) -> ScanCell:
        return self.cells[i * len(self.eps_values) + j]

    def labels(self) -> list[list[str]]:
        n = len(self.eps_values)
        return [[c.label for c in self.cells[i * n:(i + 1) * n]] for i in range(len(self.d0_values))]


@dataclass(frozen=True)
class ScanSettings:
    theta0: float = 1.0
    variant: str = EXACT
    max_iters: int = 2000
    tol: float = 1e-10
    period_max: int = 16
    cycle_tol: float = 1e-6
    n_transient: int = 500
    n_sample: int = 1000


def _grid(bounds, n: int) -> tuple[float, ...]:
    lo, hi = float(bounds[0]), float(bounds[1])
    if n < 1:
        raise ValueError("resolution must be positive")
    if hi < lo:
        raise ValueError(f"empty range [{lo}, {hi}]")
    if n == 1:
        if hi != lo:
            raise ValueError("a single-sample axis needs a degenerate range")
        return (lo,)
    return tuple(float(v) for v in np.linspace(lo, hi, n))


def scan_cell(core: ConvexCore, m: int, d0: float, eps: float, settings: ScanSettings,
              theta0: float | None = None) -> ScanCell:
    """Classify one (d0, eps) cell; cells where the map is undefined are ``Undefined``."""
    theta0 = settings.theta0 if theta0 is None else theta0
    try:
        shape = DomainShape(core, ThicknessProfile.trig(d0, eps, m))
        orbit = iterate(shape, theta0, settings.variant, settings.max_iters, settings.tol,
                        settings.period_max, min(settings.cycle_tol, 1e-9))
        if orbit.termination.kind == "StepFailed":
            return ScanCell(d0, eps, Classification("Undefined"), float("nan"))
        cls = classify_orbit(orbit, settings.period_max, settings.cycle_tol)
        lyap = lyapunov_exponent(shape, orbit.final_theta, settings.n_transient,
                                 settings.n_sample, settings.variant)
    except (NonPositiveThickness, ReturnMapError, OrbitInterrupted):
        return ScanCell(d0, eps, Classification("Undefined"), float("nan"))
    return ScanCell(d0, eps, cls, lyap)


def _scan_job(args):
    return scan_cell(*args)


def default_workers() -> int:
    env = os.environ.get("CORECDYN_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def parameter_scan(core: ConvexCore, m: int, d0_range, eps_range, resolution,
                   theta0: float = 1.0, settings: ScanSettings | None = None,
                   workers: int | None = None, jitter: float = 0.0, seed: int = 42) -> ScanResult:
    """Classify the dynamics on a (d0, eps) grid at fixed frequency ``m``.

    ``resolution`` is an int or a ``(n_d0, n_eps)`` pair; a one-sample axis
    requires a degenerate range. ``jitter`` perturbs each cell's initial angle
    uniformly in ``[-jitter, jitter]`` using ``seed``. Cells are returned in
    row-major order regardless of worker count.
    """
    if isinstance(resolution, int):
        resolution = (resolution, resolution)
    d0_values = _grid(d0_range, resolution[0])
    eps_values = _grid(eps_range, resolution[1])
    settings = settings or ScanSettings()
    settings = ScanSettings(**{**asdict(settings), "theta0": theta0})
    rng = np.random.default_rng(seed)
    jobs = []
    for d0 in d0_values:
        for eps in eps_values:
            start = theta0 + (rng.uniform(-jitter, jitter) if jitter else 0.0)
            jobs.append((core, m, d0, eps, settings, start))
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(jobs) < 2:
        cells = [_scan_job(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(_scan_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return ScanResult(m, d0_values, eps_values, tuple(cells))


# ---------------------------------------------------------------- flow limit


@dataclass(frozen=True)
class FlowComparison:
    """Discrete orbit sampled at cumulative times ``tau_k = sum 2 d(theta_j)``
    next to the gradient flow ``dtheta/dtau = -d'/|p'|^2``. Angles are unwrapped.
    """

    tau: np.ndarray
    theta_discrete: np.ndarray
    theta_flow: np.ndarray
    deviation: np.ndarray
    max_deviation: float
    diverged: bool
    error: str | None = None


def gradient_flow_compare(shape: DomainShape, theta0: float, horizon: float,
                          variant: str = EXACT, rtol: float = 1e-10,
                          max_steps: int = 100000) -> FlowComparison:
    """Run the discrete map and the continuous flow side by side up to ``horizon``.

    ``diverged`` is set when a step fails or when a single discrete step
    exceeds half a radian, i.e. the map is far from the small-step regime.
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    exact = _check_variant(variant)
    theta = reduce_angle(theta0)
    taus, thetas = [0.0], [theta]
    unwrapped = theta
    diverged = False
    error = None
    while len(taus) <= max_steps:
        d = float(shape.thickness(theta))
        tau_next = taus[-1] + 2.0 * d
        if tau_next > horizon:
            break
        try:
            nxt = backend.step(shape._kernel, theta, exact)
        except (ReturnMapError, NonPositiveThickness) as exc:
            diverged, error = True, f"{type(exc).__name__}: {exc}"
            break
        delta = signed_angle_difference(nxt, theta)
        if abs(delta) > 0.5:
            diverged = True
        unwrapped += delta
        theta = nxt
        taus.append(tau_next)
        thetas.append(unwrapped)
    tau = np.asarray(taus)
    core = shape.core

    def rhs(_, y):
        return [-float(shape.thickness.eval(y[0])[1]) / float(core.arc_length_derivative(y[0])) ** 2]

    sol = solve_ivp(rhs, (0.0, max(tau[-1], 1e-300)), [thetas[0]], method="DOP853",
                    t_eval=tau, rtol=rtol, atol=rtol * 1e-2)
    flow = sol.y[0] if sol.success else np.full_like(tau, np.nan)
    discrete = np.asarray(thetas)
    deviation = np.abs(discrete - flow)
    return FlowComparison(tau, discrete, flow, deviation, float(np.max(deviation)),
                          diverged, error)


# ---------------------------------------------------------------- measure


def empirical_measure(orbit: OrbitRecord, bins: int = 64):
    """Normalized histogram of the orbit's angles over [0, 2*pi).

    Returns ``(edges, mass)``.
    """
    thetas = np.asarray(orbit.thetas)
    if thetas.size < bins:
        raise ValueError("orbit shorter than the number of bins")
    counts, edges = np.histogram(np.mod(thetas, TAU), bins=bins, range=(0.0, TAU))
    return edges, counts / counts.sum()
