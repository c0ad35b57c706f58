import cmath
from fractions import Fraction

import pytest
from hypothesis import given, settings

from epc.coeff import Chart, CoeffFn, GaussianRational, ModelError, Torus, integrate_torus, wirtinger

from strategies import coeffs, gaussians, model_and_coeffs, nonzero_gaussians

GQ = GaussianRational
I = GQ(0, 1)
C1, T1 = Chart(1), Torus(1)


def test_gaussian_rational_normal_form():
    x = GQ(Fraction(2, 4), Fraction(-6, 8))
    assert (x.re, x.im) == (Fraction(1, 2), Fraction(-3, 4))
    assert GQ(1, 1) * GQ(1, -1) == 2
    assert GQ(3, 4).norm2() == 25
    assert str(GQ(Fraction(1, 2), -3)) == "1/2-3i"


@given(gaussians, gaussians, gaussians)
def test_gaussian_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert (a * b).conjugate() == a.conjugate() * b.conjugate()
    if b:
        assert (a / b) * b == a


@given(nonzero_gaussians)
def test_inverse(a):
    assert a * a.inverse() == 1


def test_wirtinger_chart_examples():
    z, zb = CoeffFn.var(C1, 0), CoeffFn.var(C1, 0, bar=True)
    assert wirtinger(z * z * zb, 0) == (z * zb).scale(2)
    assert wirtinger(z, 0, bar=True).is_zero()


def test_wirtinger_torus_examples():
    e = CoeffFn.character(T1, [1], [0])
    assert wirtinger(e, 0, bar=True) == e.scale(I)
    assert wirtinger(e, 0) == e.scale(I)
    f = CoeffFn.character(T1, [0], [1])
    assert wirtinger(f, 0) == f
    assert wirtinger(f, 0, bar=True) == -f


def test_torus_derivative_matches_finite_difference():
    # d/dzb = (d/dx + i d/dy) / 2 applied to the true character, divided by pi
    f = CoeffFn.character(T1, [2], [-1]).scale(GQ(1, 3))
    p, h = complex(0.3, 0.2), 1e-6
    dx = (f.evaluate([p + h]) - f.evaluate([p - h])) / (2 * h)
    dy = (f.evaluate([p + 1j * h]) - f.evaluate([p - 1j * h])) / (2 * h)
    num_bar = (dx + 1j * dy) / 2 / cmath.pi
    num = (dx - 1j * dy) / 2 / cmath.pi
    assert abs(num_bar - f.wirtinger(0, bar=True).evaluate([p])) < 1e-6
    assert abs(num - f.wirtinger(0).evaluate([p])) < 1e-6


def test_conjugate_examples():
    assert (CoeffFn.var(C1, 0).scale(I)).conjugate() == CoeffFn.var(C1, 0, bar=True).scale(-I)
    assert CoeffFn.character(Torus(1), [1], [2]).conjugate() == CoeffFn.character(Torus(1), [-1], [-2])


def test_evaluate_examples():
    z, zb = CoeffFn.var(C1, 0), CoeffFn.var(C1, 0, bar=True)
    assert (z * zb).evaluate([2]) == pytest.approx(4.0)
    e = CoeffFn.character(T1, [1], [0])
    assert e.evaluate([complex(0, 0.37)]) == pytest.approx(1.0)
    assert e.evaluate([0.5]) == pytest.approx(-1.0)


def test_integrate_torus_examples():
    assert integrate_torus(CoeffFn.constant(T1, GQ(3, 1))) == GQ(3, 1)
    assert integrate_torus(CoeffFn.character(T1, [2], [1])) == 0
    with pytest.raises(ModelError):
        integrate_torus(CoeffFn.constant(C1, 1))


def test_model_errors():
    with pytest.raises(ModelError):
        CoeffFn.var(T1, 0)
    with pytest.raises(ModelError):
        CoeffFn.character(C1, [0], [0])
    with pytest.raises(IndexError):
        CoeffFn.var(C1, 0).wirtinger(1)
    with pytest.raises(ModelError):
        CoeffFn.var(C1, 0) + CoeffFn.var(Chart(2), 0)
    with pytest.raises(ModelError):
        CoeffFn.var(C1, 0).evaluate([1, 2])


@given(model_and_coeffs(2))
def test_leibniz_all_axes(data):
    model, f, g = data
    for j in range(model.n):
        for bar in (False, True):
            assert (f * g).wirtinger(j, bar) == f.wirtinger(j, bar) * g + f * g.wirtinger(j, bar)


@given(model_and_coeffs(1))
def test_derivations_commute(data):
    model, f = data
    ops = [(j, b) for j in range(model.n) for b in (False, True)]
    for j1, b1 in ops:
        for j2, b2 in ops:
            assert f.wirtinger(j1, b1).wirtinger(j2, b2) == f.wirtinger(j2, b2).wirtinger(j1, b1)


@given(model_and_coeffs(1))
def test_conjugation_intertwines(data):
    model, f = data
    assert f.conjugate().conjugate() == f
    for j in range(model.n):
        assert f.wirtinger(j).conjugate() == f.conjugate().wirtinger(j, bar=True)


@settings(max_examples=50)
@given(coeffs(Torus(2)))
def test_integral_of_norm_is_nonnegative(f):
    v = (f * f.conjugate()).integrate_torus()
    assert v.im == 0 and v.re >= 0
    assert (v.re == 0) == f.is_zero()


@given(coeffs(Torus(2)))
def test_integral_of_derivative_vanishes(f):
    for j in range(2):
        assert f.wirtinger(j).integrate_torus() == 0
        assert f.wirtinger(j, bar=True).integrate_torus() == 0


@given(model_and_coeffs(2))
def test_ring_axioms(data):
    model, f, g = data
    assert f * g == g * f
    assert (f + g) - g == f
    assert f * CoeffFn.constant(model, 1) == f
    assert (f * CoeffFn.zero(model)).is_zero()


@settings(max_examples=30)
@given(model_and_coeffs(2))
def test_evaluation_is_a_ring_map(data):
    model, f, g = data
    p = [complex(0.3, -0.7), complex(0.9, 0.1)][: model.n]
    assert (f * g).evaluate(p) == pytest.approx(f.evaluate(p) * g.evaluate(p), abs=1e-7)
    assert (f + g).evaluate(p) == pytest.approx(f.evaluate(p) + g.evaluate(p), abs=1e-7)
    assert f.conjugate().evaluate(p) == pytest.approx(f.evaluate(p).conjugate(), abs=1e-7)


def test_substitute_linear_chart():
    C2 = Chart(2)
    z1, z2 = CoeffFn.var(C2, 0), CoeffFn.var(C2, 1)
    f = z1 * CoeffFn.var(C2, 1, bar=True)
    # (z1, z2) = (t, i t + 1)
    g = f.substitute_linear(C1, [[1], [I]], offset=[0, 1])
    t, tb = CoeffFn.var(C1, 0), CoeffFn.var(C1, 0, bar=True)
    assert g == t * (tb.scale(-I) + CoeffFn.constant(C1, 1))
    assert (z1 + z2).substitute_linear(C2, [[1, 0], [0, 1]]) == z1 + z2


def test_substitute_linear_torus_restricts_characters():
    T2 = Torus(2)
    e = CoeffFn.character(T2, [1, 2], [0, 1])
    g = e.substitute_linear(T1, [[1], [1]])
    assert g == CoeffFn.character(T1, [3], [1])
    p = complex(0.21, 0.47)
    assert g.evaluate([p]) == pytest.approx(e.evaluate([p, p]))
    with pytest.raises(ModelError):
        e.substitute_linear(T1, [[GQ(Fraction(1, 2))], [1]])
