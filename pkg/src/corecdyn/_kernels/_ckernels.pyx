# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled return-map kernels.

Same contract as ``_pykernels``; the step functions run without the GIL
and report failures through integer status codes that the Python-facing
wrappers translate into exceptions.
"""

from libc.math cimport atan2, cos, fabs, floor, fmod, log, sin, sqrt, INFINITY

import numpy as np

from ..errors import DegenerateTangent, NoIntersection, NonPositiveThickness, OrbitInterrupted

BACKEND = "cython"

cdef double TAU = 6.283185307179586
cdef double PI = 3.141592653589793
cdef double GRAZE_TOL = 1e-12
cdef double DEGENERATE_TANGENT = 1e-12

cdef enum Status:
    OK = 0
    NONPOSITIVE = 1
    DEGENERATE = 2
    MISS = 3
    AWAY = 4


cdef struct Shape:
    double a
    double b
    double d0
    int nterms
    const double* amps
    const double* freqs
    const double* phases


cdef struct Step:
    double theta_out
    double t
    double d
    double x
    double y
    double nx
    double ny
    double cosine
    int grazing


def pack(a, b, d0, amps, freqs, phases):
    """Bundle shape parameters as contiguous float64 arrays."""
    return (float(a), float(b), float(d0),
            np.ascontiguousarray(amps, dtype=np.float64),
            np.ascontiguousarray(freqs, dtype=np.float64),
            np.ascontiguousarray(phases, dtype=np.float64))


cdef inline double _reduce(double theta) noexcept nogil:
    cdef double r = fmod(theta, TAU)
    if r < 0.0:
        r += TAU
    if r >= TAU:
        r = 0.0
    return r


cdef inline double _wrap(double delta) noexcept nogil:
    return delta - TAU * floor((delta + PI) / TAU)


cdef inline void _thickness(const Shape* sh, double theta, double* d, double* d1) noexcept nogil:
    cdef int j
    cdef double arg
    d[0] = sh.d0
    d1[0] = 0.0
    for j in range(sh.nterms):
        arg = sh.freqs[j] * theta + sh.phases[j]
        d[0] += sh.amps[j] * cos(arg)
        d1[0] -= sh.amps[j] * sh.freqs[j] * sin(arg)


cdef int _exact(const Shape* sh, double theta, Step* out) noexcept nogil:
    cdef double a = sh.a, b = sh.b
    cdef double th = _reduce(theta)
    cdef double c = cos(th), s = sin(th)
    cdef double d, d1
    _thickness(sh, th, &d, &d1)
    if d <= 0.0:
        out.theta_out = th
        return NONPOSITIVE
    cdef double vx = -a * s, vy = b * c
    cdef double speed = sqrt(vx * vx + vy * vy)
    cdef double tx = vx / speed, ty = vy / speed
    cdef double nux = ty, nuy = -tx
    cdef double x = a * c + d * nux, y = b * s + d * nuy
    out.d = d
    out.x = x
    out.y = y
    out.grazing = 0
    if d1 == 0.0:
        out.theta_out = th
        out.t = d
        out.nx = -nux
        out.ny = -nuy
        out.cosine = -1.0
        return OK
    cdef double kappa = a * b / (speed * speed * speed)
    cdef double stretch = speed * (1.0 + d * kappa)
    cdef double fx = stretch * tx + d1 * nux, fy = stretch * ty + d1 * nuy
    cdef double flen = sqrt(fx * fx + fy * fy)
    if flen < DEGENERATE_TANGENT:
        out.theta_out = th
        return DEGENERATE
    cdef double nx = -fy / flen, ny = fx / flen
    cdef double cosine = nx * nux + ny * nuy
    if cosine > 0.0:
        nx = -nx
        ny = -ny
        cosine = -cosine
    cdef double half_b, cq, qa, disc, X, Y, DX, DY
    if a == b:
        half_b = x * nx + y * ny
        cq = x * x + y * y - a * a
        qa = 1.0
        disc = half_b * half_b - cq
    else:
        X = x / a
        Y = y / b
        DX = nx / a
        DY = ny / b
        qa = DX * DX + DY * DY
        half_b = X * DX + Y * DY
        cq = X * X + Y * Y - 1.0
        disc = half_b * half_b - qa * cq
    if disc / qa < 0.0:
        if disc / qa < -GRAZE_TOL:
            out.theta_out = th
            return MISS
        disc = 0.0
        out.grazing = 1
    cdef double t = (-half_b - sqrt(disc)) / qa
    if t < 0.0:
        out.theta_out = th
        return AWAY
    out.t = t
    out.nx = nx
    out.ny = ny
    out.cosine = cosine
    out.theta_out = _reduce(atan2((y + t * ny) / b, (x + t * nx) / a))
    return OK


cdef int _first_order(const Shape* sh, double theta, double* out) noexcept nogil:
    cdef double th = _reduce(theta)
    cdef double d, d1
    _thickness(sh, th, &d, &d1)
    if d <= 0.0:
        out[0] = th
        return NONPOSITIVE
    cdef double s = sin(th), c = cos(th)
    cdef double speed2 = sh.a * sh.a * s * s + sh.b * sh.b * c * c
    out[0] = _reduce(th - 2.0 * d * d1 / speed2)
    return OK


cdef inline int _step(const Shape* sh, double theta, bint exact, double* out) noexcept nogil:
    cdef Step rec
    cdef int status
    if exact:
        status = _exact(sh, theta, &rec)
        out[0] = rec.theta_out
        return status
    return _first_order(sh, theta, out)


cdef object _error(int status, double theta):
    if status == NONPOSITIVE:
        return NonPositiveThickness(f"thickness <= 0 at theta={theta!r}")
    if status == DEGENERATE:
        return DegenerateTangent(f"vanishing outer tangent at theta={theta!r}")
    if status == MISS:
        return NoIntersection(f"inward normal ray misses the core at theta={theta!r}")
    return NoIntersection(f"inward normal ray points away from the core at theta={theta!r}")


cdef class _Bound:
    """Holds the packed arrays alive while a Shape struct points into them."""

    cdef Shape sh
    cdef const double[::1] amps
    cdef const double[::1] freqs
    cdef const double[::1] phases

    def __init__(self, shape):
        a, b, d0, amps, freqs, phases = shape
        self.amps = amps
        self.freqs = freqs
        self.phases = phases
        self.sh.a = a
        self.sh.b = b
        self.sh.d0 = d0
        self.sh.nterms = <int>amps.shape[0]
        if self.sh.nterms > 0:
            self.sh.amps = &self.amps[0]
            self.sh.freqs = &self.freqs[0]
            self.sh.phases = &self.phases[0]
        else:
            self.sh.amps = NULL
            self.sh.freqs = NULL
            self.sh.phases = NULL


def exact_step(shape, double theta):
    """One step of the exact return map.

    Returns ``(theta_out, t, d, x, y, nx, ny, cosine, grazing)``.
    """
    cdef _Bound bound = _Bound(shape)
    cdef Step rec
    cdef int status = _exact(&bound.sh, theta, &rec)
    if status != OK:
        raise _error(status, rec.theta_out)
    return (rec.theta_out, rec.t, rec.d, rec.x, rec.y, rec.nx, rec.ny, rec.cosine,
            bool(rec.grazing))


def first_order_step(shape, double theta):
    """``theta - 2 d d' / |p'|^2``, reduced to [0, 2*pi)."""
    cdef _Bound bound = _Bound(shape)
    cdef double out
    cdef int status = _first_order(&bound.sh, theta, &out)
    if status != OK:
        raise _error(status, out)
    return out


def step(shape, double theta, bint exact):
    cdef _Bound bound = _Bound(shape)
    cdef double out
    cdef int status = _step(&bound.sh, theta, exact, &out)
    if status != OK:
        raise _error(status, out)
    return out


def orbit(shape, double theta0, Py_ssize_t n, bint exact):
    """List of ``n + 1`` iterates starting at ``theta0``."""
    cdef _Bound bound = _Bound(shape)
    cdef double[::1] buf = np.empty(n + 1, dtype=np.float64)
    cdef Py_ssize_t k
    cdef int status = OK
    cdef double th = _reduce(theta0)
    buf[0] = th
    with nogil:
        for k in range(n):
            status = _step(&bound.sh, th, exact, &th)
            if status != OK:
                break
            buf[k + 1] = th
    if status != OK:
        done = list(np.asarray(buf[:k + 1]))
        exc = _error(status, th)
        raise OrbitInterrupted(k, done, exc) from exc
    return list(np.asarray(buf))


cdef int _derivative(const Shape* sh, double theta, double h, bint exact, double* out) noexcept nogil:
    cdef double lo = theta - h, hi = theta + h
    cdef double f_hi, f_lo
    cdef int status = _step(sh, hi, exact, &f_hi)
    if status != OK:
        return status
    status = _step(sh, lo, exact, &f_lo)
    if status != OK:
        return status
    out[0] = _wrap(f_hi - f_lo) / (hi - lo)
    return OK


def derivative(shape, double theta, double h, bint exact):
    """Central difference of the map, using the representable step width."""
    cdef _Bound bound = _Bound(shape)
    cdef double out
    cdef int status = _derivative(&bound.sh, theta, h, exact, &out)
    if status != OK:
        raise _error(status, theta)
    return out


def lyapunov_mean(shape, double theta0, Py_ssize_t n_transient, Py_ssize_t n_sample,
                  double h, bint exact):
    """Mean of ``log|F'(theta_k)|`` over ``n_sample`` post-transient iterates."""
    cdef _Bound bound = _Bound(shape)
    cdef double th = _reduce(theta0)
    cdef double total = 0.0, slope
    cdef Py_ssize_t k = 0, j
    cdef int status = OK
    cdef bint degenerate = False
    with nogil:
        for k in range(n_transient):
            status = _step(&bound.sh, th, exact, &th)
            if status != OK:
                break
        if status == OK:
            for j in range(n_sample):
                k = n_transient + j
                status = _derivative(&bound.sh, th, h, exact, &slope)
                if status != OK:
                    break
                slope = fabs(slope)
                if slope == 0.0:
                    degenerate = True
                    break
                total += log(slope)
                status = _step(&bound.sh, th, exact, &th)
                if status != OK:
                    break
    if status != OK:
        exc = _error(status, th)
        raise OrbitInterrupted(k, [th], exc) from exc
    if degenerate:
        return -INFINITY
    return total / n_sample
