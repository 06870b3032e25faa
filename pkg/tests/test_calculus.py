import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gvlab.calculus import (ChartGrid, GridError, KForm, MetricField, SingularMetricError, VectorField,
                            evaluate, exterior_d, hodge_star, integrate, integrate_3form,
                            interior_product, lie_derivative, observed_orders, partial, wedge)
from gvlab.geometry import seed_metric


@pytest.fixture(scope="module")
def torus():
    return ChartGrid.torus(32)


def test_grid_rejects_short_axes():
    with pytest.raises(GridError):
        ChartGrid((8, 8, 7))
    with pytest.raises(GridError):
        ChartGrid((8, 8, 8), (1.0, 0.0, 1.0))


def test_periodic_derivative_converges_at_fourth_order():
    errs = []
    for n in (16, 32, 64):
        g = ChartGrid.torus(n)
        x = g.coords()[0]
        errs.append(np.max(np.abs(partial(g, np.sin(2 * x), 0) - 2 * np.cos(2 * x))))
    assert min(observed_orders((16, 32, 64), errs)) > 3.8


def test_bounded_derivative_is_exact_on_quartics():
    g = ChartGrid.chart(12, 1.0)
    x, y, z = g.coords()
    f = 3 * z ** 4 - z ** 3 + 2 * x * z
    assert np.allclose(partial(g, f, 2), 12 * z ** 3 - 3 * z ** 2 + 2 * x, atol=1e-11)


def test_exterior_d_of_function_and_one_form(torus):
    x, y, z = torus.coords()
    f = KForm(torus, 0, np.sin(x) * np.cos(y))
    df = exterior_d(f).comps
    assert np.max(np.abs(df[0] - np.cos(x) * np.cos(y))) < 1e-4
    # d(sin y dz) = cos y dy ^ dz, the first 2-form component
    a = KForm(torus, 1, np.stack([0 * x, 0 * x, np.sin(y)]))
    da = exterior_d(a).comps
    assert np.max(np.abs(da[0] - np.cos(y))) < 1e-4
    assert np.max(np.abs(da[1:])) < 1e-14


def test_wedge_conventions(torus):
    e = np.eye(3)
    ones = np.ones(torus.sizes)
    dx, dy, dz = (KForm(torus, 1, e[i][:, None, None, None] * ones) for i in range(3))
    # dx ^ dy is the third basis 2-form, dy ^ dz the first
    assert np.all(wedge(dx, dy).comps[2] == 1) and np.all(wedge(dx, dy).comps[:2] == 0)
    assert np.all(wedge(dy, dz).comps[0] == 1)
    assert np.all(wedge(dz, dx).comps[1] == 1)
    assert np.all(wedge(wedge(dx, dy), dz).scalar == 1)
    with pytest.raises(GridError):
        wedge(wedge(dx, dy), wedge(dy, dz))


def test_interior_product_and_evaluate_agree(torus):
    rng = np.random.default_rng(0)
    b = KForm(torus, 2, rng.normal(size=(3,) + torus.sizes))
    X = rng.normal(size=(3,) + torus.sizes)
    Y = rng.normal(size=(3,) + torus.sizes)
    lhs = evaluate(interior_product(VectorField(torus, X), b), Y)
    assert np.allclose(lhs, evaluate(b, X, Y))


def test_integrals_of_known_densities(torus):
    x, y, z = torus.coords()
    assert integrate(torus, 1 + np.sin(x) ** 2) == pytest.approx(12 * math.pi ** 3, rel=1e-14)
    g = ChartGrid.chart(33, 1.0)
    x, y, z = g.coords()
    # trapezoid rule is exact on bilinear data
    assert integrate(g, 1 + x * y) == pytest.approx(8.0, rel=1e-14)


def test_integral_of_exact_form_vanishes(torus):
    x, y, z = torus.coords()
    b = KForm(torus, 2, np.stack([np.exp(np.sin(y + z)), np.cos(x) ** 3, np.sin(x * 0 + z)]))
    assert abs(integrate_3form(exterior_d(b))) < 1e-12


def test_lie_derivative_commutes_with_d(torus):
    x, y, z = torus.coords()
    Z = VectorField(torus, np.stack([np.cos(z), np.sin(x), 1 + 0 * x]))
    a = KForm(torus, 1, np.stack([np.sin(y), np.cos(z + x), np.sin(x - y)]))
    diff = lie_derivative(Z, exterior_d(a)) - exterior_d(lie_derivative(Z, a))
    assert diff.max_norm() < 5e-3


def test_star_star_is_identity_on_curved_metric(torus):
    g = seed_metric(torus, 0.2)
    rng = np.random.default_rng(1)
    for k, nc in ((0, 1), (1, 3), (2, 3), (3, 1)):
        a = KForm(torus, k, rng.normal(size=(nc,) + torus.sizes))
        assert np.max(np.abs(hodge_star(g, hodge_star(g, a)).comps - a.comps)) < 1e-13


def test_metric_must_be_positive_definite(torus):
    g = np.zeros((3, 3) + torus.sizes)
    g[0, 0] = g[1, 1] = 1.0
    g[2, 2] = -1.0
    with pytest.raises(SingularMetricError):
        MetricField(torus, g)


def test_observed_orders():
    assert observed_orders([1, 2, 4], [1.0, 1 / 16, 1 / 256]) == pytest.approx([4.0, 4.0])
    assert math.isnan(observed_orders([1, 2], [0.0, 1.0])[0])


_small = ChartGrid.torus(8)
_forms = st.integers(0, 2**32 - 1).map(lambda s: np.random.default_rng(s).normal(size=(3,) + _small.sizes))


@settings(max_examples=25, deadline=None)
@given(_forms, _forms)
def test_one_form_wedge_is_antisymmetric(a, b):
    A, B = KForm(_small, 1, a), KForm(_small, 1, b)
    assert np.allclose(wedge(A, B).comps, -wedge(B, A).comps)


@settings(max_examples=25, deadline=None)
@given(_forms, st.floats(-3, 3))
def test_d_squared_vanishes_for_any_one_form(a, s):
    A = KForm(_small, 1, a) * s
    assert exterior_d(exterior_d(A)).max_norm() < 1e-10 * max(1.0, np.max(np.abs(a)))


@settings(max_examples=25, deadline=None)
@given(_forms, _forms)
def test_leibniz_rule_for_functions_and_one_forms(a, b):
    # d is linear, so d(f alpha) - df ^ alpha - f d alpha is pure truncation; on
    # constant f it must vanish exactly
    f = KForm(_small, 0, np.full(_small.sizes, float(a[0, 0, 0, 0])))
    A = KForm(_small, 1, b)
    lhs = exterior_d(wedge(f, A))
    rhs = wedge(f, exterior_d(A))
    assert np.allclose(lhs.comps, rhs.comps, atol=1e-10)
