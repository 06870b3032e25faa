import math

import numpy as np
import pytest
from scipy.special import j0

from gvlab import scenarios as S
from gvlab.calculus import KForm, MetricField, VectorField, exterior_d, observed_orders, partial, wedge
from gvlab.checks import coframe_pair, probe, saddle_pair
from gvlab.geometry import PairError
from gvlab.gv import (Scale, Shift, Tilt, chart_condition, confoliation_check, eta, eta_lie,
                      gv_direct, gv_reinhart_wood, transform_pair, verify_transformation_law)


def test_reeb_field_has_vanishing_eta_and_gv():
    dp = S.build("contact", 32).pair
    assert eta(dp).max_norm() < 1e-12
    assert abs(gv_direct(dp)) < 1e-12


def test_eta_lie_route_agrees():
    dp = S.build("tilted", 32).pair
    assert (eta(dp) - eta_lie(dp)).max_norm() < 1e-12


def test_gv_of_coframe_pair_against_bessel_closed_form():
    # density reduces to (1 + 0.3 cos x) cos(0.5 sin y); the y-integral is 2 pi J0(1/2)
    exact = 8 * math.pi ** 3 * j0(0.5)
    errs = [abs(gv_direct(coframe_pair(n)) - exact) for n in (32, 64)]
    assert errs[1] < 1e-5 * exact
    assert observed_orders((32, 64), errs)[0] > 3.5


def test_reinhart_wood_route_on_tilted_field():
    sc = S.build("tilted", 48)
    rep = gv_reinhart_wood(sc.cp, sc.k_min)
    assert rep.mask_fraction == 1.0
    assert abs(rep.gv_direct - rep.gv_rw) < 1e-5 * abs(rep.gv_direct)
    assert rep.gv_direct == pytest.approx(-40.6209, abs=2e-3)


@pytest.mark.parametrize("kind", ["scale", "shift", "tilt"])
def test_transformation_laws_hold_pointwise_and_integrated(kind):
    # the law is an identity of smooth forms, so the discrete mismatch is truncation
    pointwise, gaps = [], []
    for n in (32, 64):
        dp = S.build("tilted", n).pair
        gen = probe(dp, kind, np.random.default_rng(4)).generator
        case = {"scale": Scale, "shift": Shift, "tilt": Tilt}[kind](gen)
        chk = verify_transformation_law(dp, case)
        assert abs(chk.exact_terms_integral) < 1e-12
        pointwise.append(chk.pointwise_max)
        gaps.append(abs(chk.lhs_integral - chk.rhs_integral) / abs(chk.lhs_integral))
    assert observed_orders((32, 64), pointwise)[0] > 3.5
    assert gaps[1] < 2e-5


def test_changes_must_respect_their_constraints():
    dp = S.build("contact", 16).pair
    with pytest.raises(PairError):
        transform_pair(dp, Shift(VectorField(dp.grid, dp.T.comps.copy())))
    with pytest.raises(PairError):
        transform_pair(dp, Tilt(KForm(dp.grid, 1, dp.omega.comps.copy())))


def test_rescaling_constant_along_T_leaves_gv_unchanged():
    dp = coframe_pair(32)
    x, y, _ = dp.grid.coords()
    f = 0.3 * np.sin(x) * np.cos(2 * y)
    assert abs(gv_direct(transform_pair(dp, Scale(f))) - gv_direct(dp)) < 1e-9


def test_confoliation_on_contact_torus():
    sc = S.build("contact", 48)
    w = sc.pair.omega
    # omega ^ d omega = vol for the Reeb pair of cos z dx - sin z dy
    assert np.allclose(wedge(w, exterior_d(w)).scalar, 1.0, atol=2e-5)
    zero = VectorField(sc.grid, np.zeros((3,) + sc.grid.sizes))
    chk = confoliation_check(sc.pair, sc.cp.g, zero)
    assert chk.verdict and np.allclose(chk.contact, 1.0, atol=2e-5)


def test_chart_condition_twist_term():
    # p1 = b, p2 = -x3 b: p2 d3 p1 - p1 d3 p2 = b^2 exactly
    errs = []
    for n in (32, 64):
        _, grid = saddle_pair(n)
        x, y, z = grid.coords()
        b = S.bump3d(grid, support=0.5)
        slack = chart_condition(grid, b, -z * b, y)
        mixed = partial(grid, b, 0) - z * partial(grid, b, 1) + y * partial(grid, b, 2)
        errs.append(float(np.max(np.abs(slack - (b * b - mixed ** 2)))))
    assert errs[1] < 1e-3
    assert observed_orders((32, 64), errs)[0] > 3.5


@pytest.mark.parametrize("s, verdict", [(-1.0, True), (1.0, False)])
def test_chart_generators_and_local_minimum_conditions(s, verdict):
    # p1 = 1, p2 = s x3 on the bounded contact chart; the twist term is -s everywhere
    sc = S.build("contact_chart", 24)
    x, y, z = sc.grid.coords()
    one = np.ones_like(x)
    X = VectorField(sc.grid, np.stack([one, s * z, y]))
    chk = confoliation_check(sc.pair, MetricField.euclidean(sc.grid), X)
    assert chk.verdict is verdict
    assert np.allclose(chk.twist, -s, atol=1e-9)
