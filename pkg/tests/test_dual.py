import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fcontact.dual import DualScalar, Jet
from fcontact.exceptions import DomainError

finite = st.floats(min_value=-3, max_value=3, allow_nan=False, allow_infinity=False)


def _variables(x, y):
    return DualScalar.variable(x, 0, 2), DualScalar.variable(y, 1, 2)


@given(finite, finite)
@settings(max_examples=200)
def test_product_rule(x, y):
    u, v = _variables(x, y)
    w = (u * u + v) * (v - u)
    # w = (x^2 + y)(y - x)
    expected = np.array([2 * x * (y - x) - (x * x + y), (y - x) + (x * x + y)])
    assert w.value == pytest.approx((x * x + y) * (y - x), abs=1e-12)
    assert np.allclose(w.partials, expected, rtol=1e-12, atol=1e-12)


@given(finite)
@settings(max_examples=200)
def test_chain_rule_on_generators(x):
    u = DualScalar.variable(x, 0, 1)
    assert u.sin().partials[0] == pytest.approx(math.cos(x), abs=1e-12)
    assert u.cos().partials[0] == pytest.approx(-math.sin(x), abs=1e-12)
    assert u.exp().partials[0] == pytest.approx(math.exp(x), rel=1e-12)
    assert (u * u).sin().partials[0] == pytest.approx(math.cos(x * x) * 2 * x, abs=1e-12)


@given(st.floats(min_value=0.1, max_value=5), st.integers(min_value=-4, max_value=4))
def test_integer_powers(x, k):
    u = DualScalar.variable(x, 0, 1)
    power = u ** k
    assert power.value == pytest.approx(x ** k, rel=1e-12)
    assert power.partials[0] == pytest.approx(k * x ** (k - 1), rel=1e-12, abs=1e-12)


def test_quotient():
    u, v = _variables(3.0, 2.0)
    q = u / v
    assert q.value == 1.5
    assert np.allclose(q.partials, [0.5, -0.75])
    assert np.allclose((1 / v).partials, [0.0, -0.25])


def test_singular_arithmetic():
    u, v = _variables(1.0, 0.0)
    with pytest.raises(DomainError):
        u / v
    with pytest.raises(DomainError):
        v ** -2
    with pytest.raises(DomainError):
        (-u).log()


def test_non_integer_power_rejected():
    u = DualScalar.variable(2.0, 0, 1)
    with pytest.raises(TypeError):
        u ** 0.5


def test_partials_are_read_only():
    u = DualScalar.variable(1.0, 0, 2)
    with pytest.raises(ValueError):
        u.partials[0] = 2.0


def test_jet_einsum_product_rule():
    # A(x) = [[x, 1], [0, x^2]], v(x) = [x, 2] on a one-dimensional chart at x = 3
    x = 3.0
    A = Jet([[x, 1.0], [0.0, x * x]], [[[1.0], [0.0]], [[0.0], [2 * x]]])
    v = Jet([x, 2.0], [[1.0], [0.0]])
    Av = Jet.einsum('ab,b->a', A, v)
    assert np.allclose(Av.value, [x * x + 2.0, 2 * x * x])
    assert np.allclose(Av.partials[:, 0], [2 * x, 4 * x])


def test_jet_scalar_operand():
    h = Jet(2.0, [1.0, 0.0])
    w = Jet([1.0, 3.0], [[0.0, 0.0], [0.0, 1.0]])
    product = Jet.einsum(',a->a', h, w)
    assert np.allclose(product.value, [2.0, 6.0])
    assert np.allclose(product.partials, [[1.0, 0.0], [3.0, 2.0]])


def test_jet_shape_mismatch():
    with pytest.raises(ValueError):
        Jet([1.0, 2.0], [[1.0, 0.0]])


def test_jet_directional_and_dual():
    jet = Jet(5.0, [1.0, -2.0])
    assert jet.directional([2.0, 1.0]) == pytest.approx(0.0)
    assert jet.dual().value == 5.0
    with pytest.raises(ValueError):
        Jet.constant([1.0, 2.0], 2).dual()
