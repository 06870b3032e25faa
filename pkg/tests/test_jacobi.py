import numpy as np
import numpy.polynomial.polynomial as npoly
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from gvlab import scenarios as S
from gvlab.calculus import ChartGrid, GridError, KForm
from gvlab.checks import random_jacobi_spec
from gvlab.geometry import PairError
from gvlab.jacobi import (JacobiFieldSpec, ZPoly, build_jacobi_field, chart_pair, coefficient_equations,
                          compatibility_residual, eigen_family, eigen_residual, jacobi_operator,
                          self_adjointness_gap)

_coefs = st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=6)


@settings(max_examples=50, deadline=None)
@given(_coefs, _coefs, st.floats(-2, 2))
def test_zpoly_matches_numpy_polynomials(a, b, z):
    A, B = ZPoly(a), ZPoly(b)
    assert np.isclose((A * B)(z), npoly.polyval(z, npoly.polymul(a, b)))
    assert np.isclose((A - B)(z), npoly.polyval(z, npoly.polysub(a, b)))
    assert np.allclose(A.dz(2)(z), npoly.polyval(z, npoly.polyder(a, 2)) if len(a) > 2 else 0.0)


@pytest.fixture(scope="module")
def chart():
    return ChartGrid.chart(24, 1.0)


def test_free_data_satisfies_coefficient_equations(chart):
    spec = random_jacobi_spec(chart, np.random.default_rng(0))
    for eq in coefficient_equations(spec):
        assert np.max(np.abs(eq)) < 1e-13


def test_spec_relations_are_enforced(chart):
    spec = random_jacobi_spec(chart, np.random.default_rng(1))
    c = spec.c.copy()
    c[0, 3] += 0.1
    with pytest.raises(PairError, match="c13"):
        JacobiFieldSpec(chart, spec.C, c)
    with pytest.raises(PairError, match="C12"):
        JacobiFieldSpec.from_free(chart, 0.3, -0.2, 0.0, 0.4, [[0, 0, 0], [0, 0, 0]], 0.0)


def test_jacobi_operator_against_derivative_formula():
    # T = d/dz, mu = p1 dx1 + p2 dx2: (L_T)^2 d mu = (-p2_zzz, p1_zzz, (p2_x - p1_y)_zz)
    x, y, z = sp.symbols("x y z")
    # degree <= 4 in each variable, so nested fourth-order stencils are exact
    p1 = (x ** 2 * y + x) * z ** 4 + y ** 3 * z ** 3
    p2 = x * y ** 3 * z ** 3 - x ** 4 * z ** 4
    comps = [-sp.diff(p2, z, 3), sp.diff(p1, z, 3), sp.diff(sp.diff(p2, x) - sp.diff(p1, y), z, 2)]
    grid = ChartGrid.chart(32, 1.0)
    X, Y, Z = grid.coords()
    a = np.stack([sp.lambdify((x, y, z), c, "numpy")(X, Y, Z) * np.ones(grid.sizes) for c in comps])
    cp = chart_pair(grid, ZPoly([0.3, -0.2, 0.5]), ZPoly([0.24, -0.16, 0.4]))
    want = np.einsum("ij...,j...->i...", cp.g.g, a) / cp.g.sqrt_det
    f = lambda e: sp.lambdify((x, y, z), e, "numpy")(X, Y, Z) * np.ones(grid.sizes)
    mu = KForm(grid, 1, np.stack([f(p1), f(p2), 0 * X]))
    got = jacobi_operator(cp, mu).comps
    region = (slice(None),) + grid.interior(4)
    assert np.max(np.abs(got - want)[region]) < 1e-9


def test_built_fields_report_both_routes(chart):
    rep = build_jacobi_field(random_jacobi_spec(chart, np.random.default_rng(2)))
    assert rep.constraints_max < 1e-12
    # grid operator and exact z-algebra measure the same D mu
    assert rep.D_max == pytest.approx(rep.D_exact_max, rel=1e-2)


def test_compatibility_residual_on_x_independent_data():
    # constant coefficients: the x-derivative terms drop and the rest is z-algebra
    grid = ChartGrid.chart(24, 1.0)
    spec = JacobiFieldSpec.from_free(grid, 0.3, -0.2, 0.5, 0.4, [[0.1, 0.2, -0.3], [0.0, 0.5, 0.2]], 0.7)
    rep = build_jacobi_field(spec)
    assert rep.constraints_max < 1e-12
    assert rep.D_max == pytest.approx(rep.D_exact_max, rel=1e-2)
    (P1, P2), (p1, p2) = spec.P, spec.p
    z = grid.coords()[2]
    one = np.ones(grid.sizes)
    got = compatibility_residual(grid, p1(z) * one, p2(z) * one, P1(z) * one, P2(z) * one)
    want = -(P1 * p2.dz(3) + P2 * p1.dz(3))(z) * one
    assert np.max(np.abs(got - want)) < 1e-8 * max(1.0, np.max(np.abs(want)))


def test_eigen_family_solves_sixth_order_equation_symbolically():
    z, lam = sp.symbols("z lam", positive=True)
    r = lam ** sp.Rational(1, 3)
    s = sp.sqrt(3) / 2 * r
    for f in (sp.exp(r * z), sp.exp(-r * z / 2) * sp.cos(s * z), sp.exp(r * z / 2) * sp.sin(s * z)):
        assert sp.simplify(sp.diff(f, z, 6) - lam ** 2 * f) == 0


def test_eigen_residual_extended_precision():
    nz = 61
    grid = ChartGrid((8, 8, nz), (1.0, 1.0, 1.0), (False, False, False), (-0.5, -0.5, -0.5))
    ld = np.longdouble
    z = np.broadcast_to(ld(-0.5) + np.arange(nz).astype(ld) * (ld(1) / ld(nz - 1)), grid.sizes)
    for lam in (1.0, 8.0):
        p = eigen_family(z, lam, (1, 1, 0, 1, 0, 1))
        r1, r2 = eigen_residual(grid, p, 2 * p, lam)
        assert r1.shape[-1] == nz - 12
        assert np.max(np.abs(r1)) < 2e-5 and np.max(np.abs(r2)) < 4e-5


def test_eigen_residual_argument_checks():
    with pytest.raises(GridError):
        eigen_residual(ChartGrid.torus(16), np.zeros((16,) * 3), np.zeros((16,) * 3), 1.0)
    short = ChartGrid((8, 8, 12), (1.0,) * 3, (False,) * 3)
    with pytest.raises(GridError):
        eigen_residual(short, np.zeros(short.sizes), np.zeros(short.sizes), 1.0)
    ok = ChartGrid((8, 8, 16), (1.0,) * 3, (False,) * 3)
    with pytest.raises(ValueError):
        eigen_residual(ok, np.zeros(ok.sizes), np.zeros(ok.sizes), 1.0, d=-1.0)


def test_jacobi_operator_is_self_adjoint_on_straight_T():
    sc = S.build("integrable", 24)
    grid = sc.grid
    x, y, z = grid.coords()
    b1 = S.bump3d(grid, (3.0, 3.0, 3.0), 0.6)
    b2 = S.bump3d(grid, (3.3, 2.8, 3.1), 0.6)
    mu = KForm(grid, 1, np.stack([b1 * np.sin(z), b1 * np.cos(x), 0 * b1]))
    nu = KForm(grid, 1, np.stack([b2 * np.cos(y + z), b2, 0 * b2]))
    a, c = self_adjointness_gap(sc.cp, mu, nu)
    assert abs(a) > 1e-6
    assert a == pytest.approx(c, abs=1e-12)
