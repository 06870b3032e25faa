import numpy as np
import pytest

from gvlab import scenarios as S
from gvlab.checks import _bump, _smooth
from gvlab.critical import (MetricVariation, el_report, geometric_el_residuals, is_integrable,
                            lt3_frame_components, lt3_residual, metric_el_residuals,
                            metric_fd_variation, metric_gradient_integral, periodic_umbilic_sweep,
                            rectifying_plane_check, umbilic_system_residuals)
from gvlab.geometry import PairError, frenet, second_fundamental


def test_lt3_vanishes_on_quadratic_chart():
    assert lt3_residual(S.build("quadratic_chart", 24).pair).max_norm() < 1e-9


@pytest.mark.parametrize("c3", [0.5, -1.25])
def test_lt3_of_cubic_chart_is_six_c3(c3):
    r = lt3_residual(S.build("cubic_chart", 24, cubic=c3).pair).comps
    assert np.max(np.abs(r[0] - 6 * c3)) < 1e-9
    assert np.max(np.abs(r[1:])) < 1e-9


def test_lt3_of_planar_foliation_is_zero():
    assert lt3_residual(S.build("foliation", 16).pair).max_norm() == 0.0


def test_geometric_form_matches_frame_components():
    sc = S.build("integrable", 64, b=0.05)
    cp = sc.cp
    assert is_integrable(cp.pair, tol=1e-6)
    fd = frenet(cp, 0.5 * float(frenet(cp).k.max()))
    sfd = second_fundamental(cp, fd)
    a, b = lt3_frame_components(cp.pair, fd)
    gn, gb = geometric_el_residuals(cp, fd, sfd)
    region = S.erode(fd.valid, 4)
    assert region.any()
    # truncation; the acceptance check repeats this at 96^3 against 1e-5
    assert np.max(np.abs(a - gn)[region]) < 3e-4
    assert np.max(np.abs(b - gb)[region]) < 3e-4


def test_warped_product_solves_umbilic_system():
    sc = S.build("warped", 32)
    fd = frenet(sc.cp, sc.k_min)
    r1, r2 = umbilic_system_residuals(sc.cp, fd, 0.0)
    assert max(np.max(np.abs(r1)), np.max(np.abs(r2))) < 1e-10


def test_umbilic_system_rejects_non_umbilic_plane_field():
    sc = S.build("tilted", 24)
    with pytest.raises(PairError):
        umbilic_system_residuals(sc.cp, frenet(sc.cp, sc.k_min), 0.0)


def test_periodic_trial_solutions_fail_except_constants():
    rows = periodic_umbilic_sweep([0.0, 0.2, 0.5], [0.0, 0.3, 1.0])
    for r in rows:
        assert r["max_r2"] < 1e-3  # zero up to truncation
        if r["a"] == 0 and r["c"] == 0:
            assert r["max_r1"] == 0.0
        else:
            assert r["max_r1"] > 1e-2
    with pytest.raises(ValueError):
        periodic_umbilic_sweep([1.0], [0.0])


@pytest.mark.parametrize("name", ["contact", "foliation"])
def test_metric_residuals_vanish_for_geodesic_or_integrable(name):
    sc = S.build(name, 24)
    fd = frenet(sc.cp, sc.k_min)
    el = metric_el_residuals(sc.cp, fd, second_fundamental(sc.cp, fd))
    for q in (el.q1, el.kq2, el.kq3):
        assert np.max(np.abs(q)) < 1e-12


def test_metric_gradient_matches_finite_difference():
    sc = S.build("tilted", 32)
    cp = sc.cp
    fd = frenet(cp, sc.k_min)
    el = metric_el_residuals(cp, fd, second_fundamental(cp, fd))
    rng = np.random.default_rng(5)
    b = _bump(cp.grid, rng, 0.6)
    mv = MetricVariation(*(0.1 * b * _smooth(cp.grid, rng) for _ in range(6)))
    fdv = metric_fd_variation(cp, mv.coordinates(cp, fd.N, fd.B))
    assert metric_gradient_integral(cp, el, mv) == pytest.approx(fdv.richardson, rel=2e-3)


def test_plane_field_block_of_metric_does_not_move_J():
    sc = S.build("tilted", 24)
    cp = sc.cp
    fd = frenet(cp, sc.k_min)
    rng = np.random.default_rng(6)
    b = _bump(cp.grid, rng, 0.6)
    z = 0 * b
    mv = MetricVariation(z, z, z, 0.1 * b, 0.05 * b, -0.1 * b)
    # zero up to the truncation error of the discrete Frenet frame
    assert abs(metric_fd_variation(cp, mv.coordinates(cp, fd.N, fd.B)).richardson) < 1e-6


def test_rectifying_planes_of_planar_curves():
    sc = S.build("rectifying", 32)
    fd = frenet(sc.cp, sc.k_min)
    rc = rectifying_plane_check(sc.cp, fd, second_fundamental(sc.cp, fd))
    assert rc.verdict and abs(rc.gv) < 1e-10
    # the scenario's plane field is integrable, so the non-integrability hypothesis is reported as failing
    assert rc.tcal_min < 1e-10


def test_rectifying_check_locates_violation():
    sc = S.build("tilted", 24)
    fd = frenet(sc.cp, sc.k_min)
    rc = rectifying_plane_check(sc.cp, fd, second_fundamental(sc.cp, fd))
    assert not rc.verdict
    assert abs(rc.field[rc.worst_index]) == pytest.approx(rc.max_violation)


def test_el_report_norms():
    sc = S.build("tilted", 24)
    rep = el_report(sc.cp, sc.k_min)
    assert set(rep.norms) == {"lt3", "geo_N", "geo_B", "q1", "q2", "q3", "kq2", "kq3"}
    assert not rep.integrable
    assert rep.norms["lt3"]["max"] > 0
