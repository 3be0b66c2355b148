import math
import os
import subprocess
import sys

import numpy as np
import pytest

from corecdyn._kernels import compiled_backend, python_backend
from corecdyn.errors import NoIntersection, OrbitInterrupted
from corecdyn.geometry import ConvexCore
from corecdyn.thickness import DomainShape, Harmonic, ThicknessProfile

needs_compiled = pytest.mark.skipif(compiled_backend is None, reason="extension not built")

SHAPES = [
    (1.0, 1.0, 0.5, [0.2], [2], [0.0]),
    (2.0, 1.0, 0.3, [0.1, 0.05], [2, 5], [0.3, -1.0]),
    (1.5, 1.5, 1.0, [0.9], [1], [0.0]),
    (1.0, 1.0, 0.4, [], [], []),
]


def _packs(params):
    return python_backend.pack(*params), compiled_backend.pack(*params)


@needs_compiled
@pytest.mark.parametrize("params", SHAPES)
def test_backends_agree_stepwise(params, rng):
    py, c = _packs(params)
    for theta in rng.uniform(-10, 10, 300):
        for exact in (True, False):
            assert python_backend.step(py, theta, exact) == compiled_backend.step(c, theta, exact)
        ref = python_backend.exact_step(py, theta)
        got = compiled_backend.exact_step(c, theta)
        assert np.allclose(ref, got, rtol=0, atol=1e-15)


@needs_compiled
@pytest.mark.parametrize("exact", [True, False])
def test_backends_agree_on_orbits_and_exponents(exact):
    py, c = _packs(SHAPES[2])
    assert python_backend.orbit(py, 0.3, 500, exact) == compiled_backend.orbit(c, 0.3, 500, exact)
    a = python_backend.lyapunov_mean(py, 0.3, 200, 2000, 1e-6, exact)
    b = compiled_backend.lyapunov_mean(c, 0.3, 200, 2000, 1e-6, exact)
    assert a == b


@needs_compiled
def test_backends_raise_the_same_errors():
    params = (1.0, 1.0, 1.0, [0.9], [6], [0.0])
    py, c = _packs(params)
    for theta in np.linspace(0, 2 * math.pi, 200):
        outcomes = []
        for mod, shape in ((python_backend, py), (compiled_backend, c)):
            try:
                outcomes.append(mod.step(shape, theta, True))
            except NoIntersection:
                outcomes.append("miss")
        assert outcomes[0] == outcomes[1]


@pytest.mark.parametrize("mod", [python_backend, compiled_backend], ids=["python", "compiled"])
def test_orbit_interruption_reports_index(mod):
    if mod is None:
        pytest.skip("extension not built")
    shape = mod.pack(1.0, 1.0, 1.0, [0.9], [6], [0.0])
    start = next(t for t in np.linspace(0, 6, 600) if _misses(shape, mod, t))
    with pytest.raises(OrbitInterrupted) as info:
        mod.orbit(shape, start, 10, True)
    assert info.value.index == 0
    assert len(info.value.thetas) == 1


def _misses(shape, mod, theta):
    try:
        mod.step(shape, theta, True)
    except NoIntersection:
        return True
    return False


def test_shape_uses_selected_backend():
    shape = DomainShape(ConvexCore.unit_circle(), ThicknessProfile(0.5, (Harmonic(0.2, 2),)))
    from corecdyn._kernels import backend
    assert backend.step(shape._kernel, 1.0, True) == python_backend.step(
        python_backend.pack(*shape.kernel_params()), 1.0, True)


def test_environment_forces_pure_python():
    code = "import corecdyn; print(corecdyn.BACKEND)"
    env = dict(os.environ, CORECDYN_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True)
    assert out.stdout.strip() == "python"
