import math

import numpy as np
import pytest

from corecdyn.errors import ConstraintInfeasible
from corecdyn.geometry import TAU, ConvexCore
from corecdyn.thickness import DomainShape, Harmonic, ThicknessProfile
from corecdyn.variational import (area, cheeger_ratio, coefficient_descent, functional_report,
                                  periodic_integral, perimeter)

from oracles import outer_point


def _polygon(shape, n=400_000):
    a, b = shape.core.a, shape.core.b
    harmonics = [tuple(h) for h in shape.thickness.terms]
    pts = outer_point(a, b, shape.thickness.d0, harmonics, np.arange(n) * (TAU / n))[0]
    closed = np.vstack([pts, pts[:1]])
    length = np.sum(np.linalg.norm(np.diff(closed, axis=0), axis=1))
    shoelace = 0.5 * np.sum(closed[:-1, 0] * closed[1:, 1] - closed[1:, 0] * closed[:-1, 1])
    return shoelace, length


def test_periodic_integral():
    assert periodic_integral(lambda t: np.cos(t) ** 2) == pytest.approx(math.pi, rel=1e-14)
    assert periodic_integral(lambda t: np.exp(np.sin(3 * t))) == pytest.approx(
        TAU * 1.2660658777520082, rel=1e-12)


def test_constant_profile_on_circle(unit):
    shape = DomainShape(unit, ThicknessProfile.constant(0.5))
    a_exact, a_exp = area(shape)
    p_exact, p_exp = perimeter(shape)
    assert a_exact == pytest.approx(math.pi * 1.5**2, rel=1e-13)
    assert a_exp == pytest.approx(a_exact, rel=1e-13)
    assert p_exact == pytest.approx(3 * math.pi, rel=1e-13)
    assert p_exp == pytest.approx(p_exact, rel=1e-13)
    assert cheeger_ratio(shape) == pytest.approx(4 / 3)


def test_fig1_area_closed_form(fig1):
    # polar graph rho = 1.5 + 0.2 cos 2theta: area = pi(1.5^2 + 0.2^2 / 2)
    a_exact, a_exp = area(fig1)
    assert a_exact == pytest.approx(2.27 * math.pi, rel=1e-13)
    assert a_exp == pytest.approx(a_exact, rel=1e-13)


@pytest.mark.parametrize("shape", [
    DomainShape(ConvexCore.unit_circle(), ThicknessProfile.trig(0.5, 0.2, 2)),
    DomainShape(ConvexCore.ellipse(2.0, 1.0), ThicknessProfile(0.3, (Harmonic(0.1, 3, 0.5),))),
], ids=["fig1", "ellipse"])
def test_exact_functionals_match_polygon(shape):
    shoelace, length = _polygon(shape)
    a_exact, a_exp = area(shape)
    p_exact, _ = perimeter(shape)
    assert a_exact == pytest.approx(shoelace, rel=1e-9)
    assert a_exp == pytest.approx(a_exact, rel=1e-11)
    assert p_exact == pytest.approx(length, rel=1e-9)


def test_perimeter_residual_is_quadratic_in_amplitude(unit):
    res = [functional_report(DomainShape(unit, ThicknessProfile.trig(0.5, e, 2))).perimeter_residual
           for e in (0.2, 0.1, 0.05)]
    assert res[0] / res[1] == pytest.approx(4.0, rel=0.05)
    assert res[1] / res[2] == pytest.approx(4.0, rel=0.05)


def test_report_fields(fig1):
    rep = functional_report(fig1)
    assert rep.perimeter_exact == pytest.approx(9.590872392728482, rel=1e-12)
    assert rep.perimeter_expansion == pytest.approx(9.676105373056563, rel=1e-12)
    assert rep.cheeger_ratio == pytest.approx(rep.perimeter_exact / rep.area_exact)
    assert set(rep.as_dict()) >= {"area_residual", "perimeter_residual"}


def test_descent_keeps_area_and_lowers_ratio(unit):
    target = 2.27 * math.pi
    traj = coefficient_descent(unit, 2, target, ThicknessProfile.trig(0.5, 0.2, 2), steps=25)
    for d0, eps in zip(traj.d0, traj.eps):
        shape = DomainShape(unit, ThicknessProfile.trig(d0, eps, 2))
        assert area(shape)[0] == pytest.approx(target, rel=1e-12)
    assert all(b <= a + 1e-15 for a, b in zip(traj.cheeger, traj.cheeger[1:]))
    assert abs(traj.eps[-1]) < abs(traj.eps[0])
    assert traj.profile().d0 == traj.d0[-1]


def test_descent_rejects_infeasible_targets(unit):
    with pytest.raises(ConstraintInfeasible):
        coefficient_descent(unit, 2, 3.0, ThicknessProfile.trig(0.5, 0.2, 2))
    with pytest.raises(ValueError):
        coefficient_descent(unit, 3, 8.0, ThicknessProfile.trig(0.5, 0.2, 2))


def test_cheeger_ratio_of_discs_and_perturbations(unit, fig1):
    for d0 in (0.2, 0.5, 1.0):
        shape = DomainShape(unit, ThicknessProfile.constant(d0))
        assert cheeger_ratio(shape) == pytest.approx(2 / (1 + d0))
    assert cheeger_ratio(fig1) > 4 / 3


def test_descent_fixed_cases(unit):
    traj = coefficient_descent(unit, 2, 2.25 * math.pi, ThicknessProfile.constant(0.5), steps=5)
    assert set(traj.eps) == {0.0}
    assert traj.d0[-1] == pytest.approx(0.5, rel=1e-12)
    frozen = coefficient_descent(unit, 2, 2.27 * math.pi, ThicknessProfile.trig(0.5, 0.2, 2),
                                 steps=5, rate=0.0)
    assert set(frozen.eps) == {0.2}


@pytest.mark.slow
def test_descent_reaches_constant_profile(unit):
    traj = coefficient_descent(unit, 2, 2.27 * math.pi, ThicknessProfile.trig(0.5, 0.2, 2),
                               steps=500, rate=0.1)
    assert abs(traj.eps[-1]) < 1e-3
    assert all(abs(b) <= abs(a) for a, b in zip(traj.eps, traj.eps[1:]))
    # the limit is critical everywhere: the gradient of d vanishes on the boundary
    d1 = traj.profile().eval(np.linspace(0, TAU, 512))[1]
    assert np.max(np.abs(d1)) < 1e-8
