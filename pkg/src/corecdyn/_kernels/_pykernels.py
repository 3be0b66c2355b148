"""Pure-Python reference kernels.

Mirrors ``_ckernels.pyx`` operation for operation so that both backends
produce the same floating-point results up to libm rounding.

Every kernel takes the packed shape tuple ``(a, b, d0, amps, freqs, phases)``
as its first argument.
"""

import math

from ..errors import DegenerateTangent, NoIntersection, NonPositiveThickness, OrbitInterrupted

TAU = 2.0 * math.pi
GRAZE_TOL = 1e-12
DEGENERATE_TANGENT = 1e-12

BACKEND = "python"


def pack(a, b, d0, amps, freqs, phases):
    """Bundle shape parameters in the layout this backend iterates fastest."""
    return (float(a), float(b), float(d0),
            tuple(map(float, amps)), tuple(map(float, freqs)), tuple(map(float, phases)))


def _reduce(theta):
    r = math.fmod(theta, TAU)
    if r < 0.0:
        r += TAU
    if r >= TAU:
        r = 0.0
    return r


def _wrap(delta):
    return delta - TAU * math.floor((delta + math.pi) / TAU)


def _thickness(d0, amps, freqs, phases, theta):
    d = d0
    d1 = 0.0
    for j in range(len(amps)):
        arg = freqs[j] * theta + phases[j]
        d += amps[j] * math.cos(arg)
        d1 -= amps[j] * freqs[j] * math.sin(arg)
    return d, d1


def exact_step(shape, theta):
    """One step of the exact return map.

    Returns ``(theta_out, t, d, x, y, nx, ny, cosine, grazing)``.
    """
    a, b, d0, amps, freqs, phases = shape
    th = _reduce(theta)
    c = math.cos(th)
    s = math.sin(th)
    d, d1 = _thickness(d0, amps, freqs, phases, th)
    if d <= 0.0:
        raise NonPositiveThickness(f"thickness {d!r} <= 0 at theta={th!r}")
    px = a * c
    py = b * s
    vx = -a * s
    vy = b * c
    speed = math.sqrt(vx * vx + vy * vy)
    tx = vx / speed
    ty = vy / speed
    nux = ty
    nuy = -tx
    x = px + d * nux
    y = py + d * nuy
    if d1 == 0.0:
        # critical point: the normal is exactly radial and the ray returns home
        return th, d, d, x, y, -nux, -nuy, -1.0, False
    kappa = a * b / (speed * speed * speed)
    stretch = speed * (1.0 + d * kappa)
    fx = stretch * tx + d1 * nux
    fy = stretch * ty + d1 * nuy
    flen = math.sqrt(fx * fx + fy * fy)
    if flen < DEGENERATE_TANGENT:
        raise DegenerateTangent(f"vanishing outer tangent at theta={th!r}")
    nx = -fy / flen
    ny = fx / flen
    cosine = nx * nux + ny * nuy
    if cosine > 0.0:
        nx = -nx
        ny = -ny
        cosine = -cosine
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
    grazing = False
    if disc / qa < 0.0:
        if disc / qa < -GRAZE_TOL:
            raise NoIntersection(f"inward normal ray misses the core at theta={th!r}")
        disc = 0.0
        grazing = True
    t = (-half_b - math.sqrt(disc)) / qa
    if t < 0.0:
        raise NoIntersection(f"inward normal ray points away from the core at theta={th!r}")
    hx = x + t * nx
    hy = y + t * ny
    return _reduce(math.atan2(hy / b, hx / a)), t, d, x, y, nx, ny, cosine, grazing


def first_order_step(shape, theta):
    """``theta - 2 d d' / |p'|^2``, reduced to [0, 2*pi)."""
    a, b, d0, amps, freqs, phases = shape
    th = _reduce(theta)
    d, d1 = _thickness(d0, amps, freqs, phases, th)
    if d <= 0.0:
        raise NonPositiveThickness(f"thickness {d!r} <= 0 at theta={th!r}")
    s = math.sin(th)
    c = math.cos(th)
    speed2 = a * a * s * s + b * b * c * c
    return _reduce(th - 2.0 * d * d1 / speed2)


def step(shape, theta, exact):
    if exact:
        return exact_step(shape, theta)[0]
    return first_order_step(shape, theta)


def orbit(shape, theta0, n, exact):
    """List of ``n + 1`` iterates starting at ``theta0``."""
    thetas = [_reduce(theta0)]
    th = thetas[0]
    for k in range(n):
        try:
            th = step(shape, th, exact)
        except (NoIntersection, DegenerateTangent, NonPositiveThickness) as exc:
            raise OrbitInterrupted(k, thetas, exc) from exc
        thetas.append(th)
    return thetas


def derivative(shape, theta, h, exact):
    """Central difference of the map, using the representable step width."""
    lo = theta - h
    hi = theta + h
    return _wrap(step(shape, hi, exact) - step(shape, lo, exact)) / (hi - lo)


def lyapunov_mean(shape, theta0, n_transient, n_sample, h, exact):
    """Mean of ``log|F'(theta_k)|`` over ``n_sample`` post-transient iterates."""
    th = _reduce(theta0)
    k = 0
    try:
        for k in range(n_transient):
            th = step(shape, th, exact)
        total = 0.0
        for j in range(n_sample):
            k = n_transient + j
            slope = abs(derivative(shape, th, h, exact))
            if slope == 0.0:
                return -math.inf
            total += math.log(slope)
            th = step(shape, th, exact)
    except (NoIntersection, DegenerateTangent, NonPositiveThickness) as exc:
        raise OrbitInterrupted(k, [th], exc) from exc
    return total / n_sample
