import math
import pickle

import numpy as np
import pytest
from hypothesis import given, strategies as st

from corecdyn.errors import NonPositiveThickness
from corecdyn.geometry import TAU, ConvexCore
from corecdyn.thickness import (DomainShape, Harmonic, ThicknessProfile, arc_gradient,
                                arc_hessian, check_admissibility, inward_normal_exact,
                                inward_normal_first_order, outer_boundary_is_simple,
                                outer_boundary_tangent, radial_map)

from conftest import trig_shape


def test_profile_derivatives_match_finite_differences():
    prof = ThicknessProfile(0.7, (Harmonic(0.2, 3, 0.4), Harmonic(0.1, 1, -1.0)))
    theta = np.linspace(0, TAU, 50)
    h = 1e-5
    d, d1, d2 = prof.eval(theta)
    np.testing.assert_allclose(d1, (prof(theta + h) - prof(theta - h)) / (2 * h), atol=1e-8)
    d1p, d1m = prof.eval(theta + h)[1], prof.eval(theta - h)[1]
    np.testing.assert_allclose(d2, (d1p - d1m) / (2 * h), atol=1e-7)


def test_positivity_enforced():
    with pytest.raises(NonPositiveThickness):
        ThicknessProfile.trig(0.2, 0.3, 2)
    with pytest.raises(NonPositiveThickness):
        ThicknessProfile.constant(0.0)
    with pytest.raises(NonPositiveThickness):
        ThicknessProfile.constant(float("nan"))
    # bound is inconclusive but the grid is positive
    ThicknessProfile(0.25, (Harmonic(0.2, 1), Harmonic(0.2, 1, math.pi)))


def test_trig_with_zero_amplitude_is_constant():
    prof = ThicknessProfile.trig(0.5, 0.0, 3)
    assert prof.is_constant and prof.terms == ()


@given(st.floats(0.05, 2.0), st.floats(0.0, 0.95), st.integers(1, 5), st.floats(0.1, 4.0))
def test_scaling_is_linear(d0, frac, m, s):
    prof = ThicknessProfile.trig(d0, frac * d0, m)
    theta = np.linspace(0, TAU, 17)
    np.testing.assert_allclose(prof.scaled(s)(theta), s * prof(theta), rtol=1e-13)


def test_description_round_trip():
    prof = ThicknessProfile(0.7, (Harmonic(0.2, 3, 0.4),))
    assert ThicknessProfile.from_description(prof.describe()) == prof
    shape = DomainShape(ConvexCore.ellipse(2, 1), prof)
    assert DomainShape.from_description(shape.describe()) == shape


def test_shape_pickles(fig1):
    clone = pickle.loads(pickle.dumps(fig1))
    assert clone == fig1
    assert clone.admissibility == fig1.admissibility


@pytest.mark.parametrize("core", [ConvexCore.unit_circle(), ConvexCore.ellipse(2.0, 1.2)])
def test_radial_map_and_tangent(core):
    shape = DomainShape(core, ThicknessProfile(0.3, (Harmonic(0.1, 2, 0.3),)))
    theta = np.linspace(0, TAU, 41)
    x = radial_map(shape, theta)
    # distance along the core normal equals the thickness
    np.testing.assert_allclose(np.linalg.norm(x - core.point(theta), axis=-1), shape.thickness(theta))
    h = 1e-6
    fd = (radial_map(shape, theta + h) - radial_map(shape, theta - h)) / (2 * h)
    np.testing.assert_allclose(outer_boundary_tangent(shape, theta), fd, atol=1e-7)


def test_arc_gradient_and_hessian_are_arclength_derivatives():
    core = ConvexCore.ellipse(1.5, 1.0)
    shape = DomainShape(core, ThicknessProfile.trig(0.4, 0.1, 3))
    theta = np.linspace(0.2, 6.0, 13)
    h = 1e-5
    speed = core.arc_length_derivative(theta)
    d1 = shape.thickness.eval(theta)[1]
    np.testing.assert_allclose(arc_gradient(shape, theta), d1 / speed)
    gp, gm = arc_gradient(shape, theta + h), arc_gradient(shape, theta - h)
    np.testing.assert_allclose(arc_hessian(shape, theta), (gp - gm) / (2 * h) / speed, atol=1e-7)


def test_exact_normal_points_inward(fig1):
    theta = np.linspace(0, TAU, 64, endpoint=False)
    n = inward_normal_exact(fig1, theta)
    tangent = outer_boundary_tangent(fig1, theta)
    np.testing.assert_allclose(np.linalg.norm(n, axis=-1), 1.0, atol=1e-14)
    np.testing.assert_allclose(np.sum(n * tangent, axis=-1), 0.0, atol=1e-12)
    assert np.all(np.sum(n * fig1.core.outward_normal(theta), axis=-1) < 0)


def test_exact_cosine_against_polar_formula(fig1):
    # on the unit circle the outer curve is the polar graph rho = 1 + d
    rho = 1.0 + 0.5 + 0.2 * math.cos(2.0)
    drho = -0.4 * math.sin(2.0)
    expected = -rho / math.hypot(rho, drho)
    n = inward_normal_exact(fig1, 1.0)
    assert float(np.dot(n, fig1.core.outward_normal(1.0))) == pytest.approx(expected, abs=1e-14)
    assert expected == pytest.approx(-0.9685907, abs=1e-7)


def test_first_order_normal_is_close_for_thin_layers(unit):
    base = DomainShape(unit, ThicknessProfile.trig(0.2, 0.08, 2))
    errs = []
    for s in (1.0, 0.5, 0.25):
        shape = base.scaled(s)
        theta = np.linspace(0, TAU, 64, endpoint=False)
        diff = inward_normal_exact(shape, theta) - inward_normal_first_order(shape, theta)
        errs.append(np.max(np.linalg.norm(diff, axis=-1)))
    assert errs[0] > errs[1] > errs[2]


def test_admissibility_reports(fig1):
    rep = fig1.admissibility
    assert rep.gnp_ok and rep.parallel_metric_ok
    assert rep.min_thickness == pytest.approx(0.3)
    assert rep == check_admissibility(fig1)
    wild = trig_shape(0.8, 0.6, 2)
    assert not wild.admissibility.gnp_ok
    assert wild.admissibility.gnp_failures > 0


def test_outer_boundary_simple(fig1):
    assert outer_boundary_is_simple(fig1)
    assert outer_boundary_is_simple(DomainShape(ConvexCore.ellipse(2, 1), ThicknessProfile.constant(0.3)))


def test_first_order_normal_small_layer(unit):
    shape = DomainShape(unit, ThicknessProfile.trig(0.05, 0.02, 2))
    theta = np.arange(1024) * (TAU / 1024)
    exact, approx = inward_normal_exact(shape, theta), inward_normal_first_order(shape, theta)
    angle = np.arccos(np.clip(np.sum(exact * approx, axis=-1), -1, 1))
    assert angle.max() <= 0.01
    const = DomainShape(unit, ThicknessProfile.constant(0.3))
    np.testing.assert_allclose(inward_normal_first_order(const, theta), -unit.outward_normal(theta))
