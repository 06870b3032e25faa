import math
import warnings

import numpy as np
import pytest

from gvlab import scenarios as S
from gvlab.calculus import KForm, VectorField
from gvlab.checks import probe, saddle_pair
from gvlab.geometry import PairError, frenet
from gvlab.variations import (VariationSpec, central_differences, eta_dot, finite_difference_variation,
                              first_variation, frenet_variation_formulas, index_form, index_form_T,
                              second_variation, thread_count)


def test_shift_rate_on_contact_chart():
    # omega = dx3 - x2 dx1, X = p1 (d1 + x2 d3) + p2 d2  =>  eta_dot = p1 dx2 - p2 dx1
    dp, grid = saddle_pair(32)
    x, y, z = grid.coords()
    b = S.bump3d(grid, support=0.5)
    p1, p2 = b * np.cos(x), b * z
    ed = eta_dot(dp, VariationSpec("shift", VectorField(grid, np.stack([p1, p2, p1 * y]))))
    assert np.max(np.abs(ed.comps - np.stack([-p2, p1, 0 * p1]))) < 1e-12


def test_scale_rate_is_T_of_f_omega_minus_df():
    sc = S.build("contact", 48)
    dp, grid = sc.pair, sc.grid
    x, y, z = grid.coords()
    f = np.sin(x) * np.cos(z)
    df = np.stack([np.cos(x) * np.cos(z), 0 * x, -np.sin(x) * np.sin(z)])
    Tf = np.einsum("i...,i...->...", dp.T.comps, df)
    ed = eta_dot(dp, VariationSpec("scale", f))
    assert np.max(np.abs(ed.comps - (Tf * dp.omega.comps - df))) < 3e-4


@pytest.mark.parametrize("name", ["tilted", "contact"])
@pytest.mark.parametrize("kind", ["scale", "shift", "tilt"])
def test_analytic_variations_match_finite_differences(name, kind):
    dp = S.build(name, 24).pair
    vs = probe(dp, kind, np.random.default_rng(9), second=True)
    vs1 = VariationSpec(kind, vs.generator)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        fd1 = finite_difference_variation(dp, vs1, 1e-3, 1)
        fd2 = finite_difference_variation(dp, vs, 1e-2, 2)
    a1, a2 = first_variation(dp, vs1), second_variation(dp, vs)
    assert abs(fd1.richardson - a1) < 1e-8 * max(1, abs(a1))
    assert abs(fd2.richardson - a2) < 1e-6 * max(1, abs(a2))


def test_contact_second_variation_is_the_index_form():
    dp = S.build("contact", 24).pair
    vs = probe(dp, "tilt", np.random.default_rng(2))
    ed = eta_dot(dp, vs)
    assert second_variation(dp, vs) == pytest.approx(2 * index_form(ed, ed), rel=1e-12)


def test_central_differences_on_exponential():
    r1 = central_differences(math.exp, 1e-2, 1)
    r2 = central_differences(math.exp, 1e-2, 2)
    assert abs(r1.raw - 1) == pytest.approx(1e-4 / 6, rel=1e-2)
    # Richardson leaves dt^4 / 30
    assert abs(r1.richardson - 1) == pytest.approx(1e-8 / 30, rel=1e-2)
    assert abs(r2.richardson - 1) < 1e-8
    with pytest.raises(ValueError):
        central_differences(math.exp, 0.0)
    with pytest.raises(ValueError):
        central_differences(math.exp, 1e-2, 3)


def test_rounding_floor_warning():
    with pytest.warns(RuntimeWarning):
        central_differences(lambda t: 1.0 + 1e-20 * t, 1e-8, 1)


def test_spec_validation():
    dp = S.build("contact", 16).pair
    with pytest.raises(ValueError):
        VariationSpec("twist", None)
    with pytest.raises(ValueError):
        first_variation(dp, VariationSpec("metric", None))
    with pytest.raises(PairError):
        eta_dot(dp, VariationSpec("shift", VectorField(dp.grid, dp.T.comps.copy())))


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("GVLAB_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("GVLAB_THREADS", "0")
    assert thread_count() >= 1


@pytest.mark.parametrize("kind", ["scale", "shift", "tilt"])
def test_frenet_frame_first_variation(kind):
    sc = S.build("tilted", 48)
    cp = sc.cp
    vs = probe(cp.pair, kind, np.random.default_rng(1))
    got = frenet_variation_formulas(cp, vs, frenet(cp, sc.k_min))
    want = first_variation(cp.pair, vs)
    assert got == pytest.approx(want, rel=1e-3, abs=1e-4)


def test_index_form_T_needs_forms_annihilating_T():
    sc = S.build("integrable", 16)
    w = sc.pair.omega
    with pytest.raises(PairError):
        index_form_T(sc.pair, w, w)


def test_index_form_T_is_symmetric_on_straight_T():
    sc = S.build("integrable", 24)
    grid = sc.grid
    rng = np.random.default_rng(3)
    forms = []
    for _ in range(2):
        b = S.bump3d(grid, rng.uniform(2, 4, 3), 0.6)
        forms.append(KForm(grid, 1, np.stack([b * rng.normal(), b * np.sin(grid.coords()[2]), 0 * b])))
    a, c = forms
    assert index_form_T(sc.pair, a, c) == pytest.approx(index_form_T(sc.pair, c, a), abs=1e-12)
