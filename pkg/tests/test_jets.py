import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hexnet.numerics import Jet, Quadrature, integrate, jet_eval
from hexnet.numerics.jets import affine_power


def test_exponential_derivatives():
    j = jet_eval(lambda s: (-s).exp(), 0.0, 2)
    assert [j.derivative(u) for u in range(3)] == pytest.approx([1.0, -1.0, 1.0])


def test_power_derivative():
    j = jet_eval(lambda s: (1.0 + s) ** -3.0, 1.0, 1)
    assert j.derivative(1) == pytest.approx(-3.0 * 2.0**-4, rel=1e-13)


def test_rational_function_against_hand_derivatives():
    # f(s) = s / (1 + s^2) at s0 = 0.5
    s0 = 0.5
    j = jet_eval(lambda s: s / (1.0 + s * s), s0, 3)
    d = 1.0 + s0 * s0
    assert j.value == pytest.approx(s0 / d)
    assert j.derivative(1) == pytest.approx((1 - s0 * s0) / d**2, rel=1e-13)


def test_log_exp_inverse():
    j = Jet.variable(1.7, 4)
    back = j.log().exp()
    assert back.coeffs == pytest.approx(j.coeffs, rel=1e-13)


@given(st.lists(st.floats(-2.0, 2.0), min_size=4, max_size=4),
       st.lists(st.floats(-2.0, 2.0), min_size=4, max_size=4))
def test_product_rule_is_leibniz(a, b):
    u, v = Jet(np.array(a)), Jet(np.array(b))
    prod = u * v
    for q in range(4):
        leibniz = sum(math.comb(q, k) * u.derivative(k) * v.derivative(q - k)
                      for k in range(q + 1))
        assert prod.derivative(q) == pytest.approx(leibniz, rel=1e-10, abs=1e-10)


def test_reciprocal_and_division():
    j = Jet.variable(2.0, 3)
    one = j * j.reciprocal()
    assert one.coeffs == pytest.approx([1.0, 0.0, 0.0, 0.0], abs=1e-14)
    j = Jet.variable(0.5, 3)
    ratio = (1.0 + j) / (2.0 - j)
    f = lambda s: (1 + s) / (2 - s)
    h = 1e-5
    fd = (f(0.5 + h) - f(0.5 - h)) / (2 * h)
    assert ratio.derivative(1) == pytest.approx(fd, rel=1e-8)


def test_affine_power_matches_generic():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a0 = rng.uniform(0.5, 5.0)
        a1 = rng.uniform(-2.0, 2.0)
        p = rng.uniform(-4.0, 3.0)
        fast = affine_power(a0, a1, p, 5)
        generic = (Jet.variable(0.0, 5) * a1 + a0) ** p
        assert fast.coeffs == pytest.approx(generic.coeffs, rel=1e-11)


def test_array_valued_jets():
    s0 = np.array([0.5, 1.0, 2.0])
    j = jet_eval(lambda s: (1.0 + s * np.array([1.0, 2.0, 3.0])) ** -2.0, s0, 2)
    c = np.array([1.0, 2.0, 3.0])
    expected_d1 = -2 * c * (1 + s0 * c) ** -3
    assert j.derivative(1) == pytest.approx(expected_d1, rel=1e-12)


def test_composition_chain_rule():
    # g(s) = exp(-2s) expanded at s0, composed with inner jet s(x) = x^2 at x=1.3
    inner = jet_eval(lambda x: x * x, 1.3, 3)
    outer = jet_eval(lambda s: (s * -2.0).exp(), float(inner.value), 3)
    composed = outer.compose_into(inner)
    f = lambda x: math.exp(-2.0 * x * x)
    x0, h = 1.3, 1e-4
    fd1 = (f(x0 + h) - f(x0 - h)) / (2 * h)
    assert composed.value == pytest.approx(f(x0), rel=1e-13)
    assert composed.derivative(1) == pytest.approx(fd1, rel=1e-6)


def test_jets_commute_with_integration():
    # d/ds of int_0^2 exp(-s y)/(1+y) dy, via jets inside the quadrature
    # versus quadrature of the analytically differentiated integrand
    s0, order = 0.8, 2
    q = Quadrature(rel_tol=1e-11, abs_tol=1e-14)
    nu = Jet.variable(s0, order)

    def jet_integrand(y):
        ker = (nu * -y).exp() * (1.0 / (1.0 + y))
        return np.moveaxis(ker.coeffs, 0, -1)

    coeffs = integrate(jet_integrand, 0.0, 2.0, q).value
    jet_of_integral = Jet(np.moveaxis(coeffs, -1, 0))
    for u in range(order + 1):
        direct = integrate(
            lambda y: (-y) ** u * np.exp(-s0 * y) / (1.0 + y), 0.0, 2.0, q).value
        assert jet_of_integral.derivative(u) == pytest.approx(direct, rel=1e-9)
