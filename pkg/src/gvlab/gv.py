"""The Godbillon-Vey type invariant of a (plane field, transverse field) pair."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .calculus import (GridError, KForm, MetricField, VectorField, evaluate, exterior_d,
                       hodge_star, integrate, integrate_3form, interior_product,
                       lie_derivative, wedge, _dot)
from .geometry import (CompatiblePair, DistributionPair, FrenetData, PairError,
                       SecondFundamentalData, derivative_along, divergence, frenet,
                       orientation, second_fundamental)


def eta(dp: DistributionPair) -> KForm:
    """eta = i_T d(omega); needs no metric."""
    return interior_product(dp.T, exterior_d(dp.omega))


def eta_lie(dp: DistributionPair) -> KForm:
    """Second route to eta: the Lie derivative L_T omega."""
    return lie_derivative(dp.T, dp.omega)


def gv_form(dp: DistributionPair) -> KForm:
    e = eta(dp)
    return wedge(e, exterior_d(e))


def gv_direct(dp: DistributionPair) -> float:
    if not dp.grid.fully_periodic:
        raise GridError("gv is only defined on a closed (fully periodic) grid")
    return integrate_3form(gv_form(dp))


@dataclass
class GvReport:
    gv_direct: float
    gv_rw: float
    pointwise_residual: np.ndarray = field(repr=False)
    mask_fraction: float
    residual_max: float


def rw_density(fd: FrenetData, sfd: SecondFundamentalData) -> np.ndarray:
    """Coefficient of dV_g in -k^2 (tau - h_BN); zero off the Frenet mask."""
    return np.where(fd.valid, -fd.k ** 2 * (fd.tau - sfd.hBN), 0.0)


def gv_reinhart_wood(cp: CompatiblePair, k_min: float = 1e-8, fd: FrenetData | None = None,
                     sfd: SecondFundamentalData | None = None) -> GvReport:
    if fd is None:
        fd = frenet(cp, k_min)
    if sfd is None:
        sfd = second_fundamental(cp, fd)
    dens = rw_density(fd, sfd) * cp.g.sqrt_det
    direct = gv_form(cp.pair).scalar
    resid = np.where(fd.valid, np.abs(direct - dens), 0.0)
    periodic = cp.grid.fully_periodic
    return GvReport(
        gv_direct=integrate(cp.grid, direct) if periodic else float("nan"),
        gv_rw=integrate(cp.grid, dens) if periodic else float("nan"),
        pointwise_residual=resid,
        mask_fraction=fd.mask_fraction,
        residual_max=float(resid.max()),
    )


def deta_frenet_check(cp: CompatiblePair, fd: FrenetData,
                      sfd: SecondFundamentalData) -> dict[str, np.ndarray]:
    """Residuals of the frame values of d(eta), plus eta - k N_flat; zero off the mask."""
    grid, T = cp.grid, cp.T
    N, B, k, tau = fd.N, fd.B, fd.k, fd.tau
    e = eta(cp.pair)
    de = exterior_d(e)
    Tc = sfd.Tcal
    div_TT = divergence(cp.g, Tc * T)
    Tk = derivative_along(grid, T, k)
    m = fd.valid
    r = {
        "NB": evaluate(de, N, B) + 2.0 * div_TT,
        "TB": evaluate(de, T, B) - k * (tau - sfd.hBN),
        "TN": evaluate(de, T, N) - Tk + k * sfd.hNN,
        "eta0": np.max(np.abs(e.comps - k * cp.g.lower(N)), axis=0),
    }
    return {name: np.where(m, np.abs(v), 0.0) for name, v in r.items()}


# --- changes of the pair ------------------------------------------------------

@dataclass(frozen=True)
class Scale:
    """T -> exp(-f) T, omega -> exp(f) omega."""
    f: np.ndarray


@dataclass(frozen=True)
class Shift:
    """T -> T + X with omega(X) = 0."""
    X: VectorField


@dataclass(frozen=True)
class Tilt:
    """omega -> omega + mu with mu(T) = 0."""
    mu: KForm


Change = Union[Scale, Shift, Tilt]
CONSTRAINT_TOL = 1e-12


def check_change(dp: DistributionPair, case: Change, tol: float = CONSTRAINT_TOL):
    if isinstance(case, Shift):
        err = float(np.max(np.abs(_dot(dp.omega.comps, case.X.comps))))
        if err > tol:
            raise PairError(f"shift field is not tangent to the plane field: |omega(X)| = {err:.3e}")
    elif isinstance(case, Tilt):
        err = float(np.max(np.abs(_dot(case.mu.comps, dp.T.comps))))
        if err > tol:
            raise PairError(f"tilt form does not annihilate T: |mu(T)| = {err:.3e}")
    elif not isinstance(case, Scale):
        raise TypeError(f"unknown change {case!r}")


def transform_pair(dp: DistributionPair, case: Change) -> DistributionPair:
    check_change(dp, case)
    grid = dp.grid
    if isinstance(case, Scale):
        ef = np.exp(case.f)
        return DistributionPair(KForm(grid, 1, dp.omega.comps * ef),
                                VectorField(grid, dp.T.comps / ef))
    if isinstance(case, Shift):
        return DistributionPair(dp.omega, dp.T + case.X)
    return DistributionPair(dp.omega + case.mu, dp.T)


@dataclass
class TransformationCheck:
    pointwise_max: float
    lhs_integral: float
    rhs_integral: float
    exact_terms_integral: float


def transformation_rhs(dp: DistributionPair, case: Change) -> tuple[KForm, KForm]:
    """Right side of the eta^d(eta) transformation law, split as (closed part, exact part).

    The exact part is d(alpha) for the case-specific 2-form alpha.
    """
    check_change(dp, case)
    grid = dp.grid
    w = dp.omega
    e = eta(dp)
    de = exterior_d(e)
    base = wedge(e, de)
    if isinstance(case, Scale):
        f = KForm(grid, 0, case.f)
        Tf = KForm(grid, 0, dp.T(case.f))
        # alpha = -f d(eta) - f d(T(f) omega) + T(f) omega ^ eta
        alpha = (-1.0 * wedge(f, de) - wedge(f, exterior_d(wedge(Tf, w)))
                 + wedge(Tf, wedge(w, e)))
        closed = (base + 2.0 * wedge(Tf, wedge(w, de))
                  + wedge(wedge(Tf, Tf), wedge(w, exterior_d(w))))
        return closed, exterior_d(alpha)
    if isinstance(case, Shift):
        xi = interior_product(case.X, exterior_d(w))
    else:
        xi = interior_product(dp.T, exterior_d(case.mu))
    closed = base + 2.0 * wedge(de, xi) + wedge(xi, exterior_d(xi))
    return closed, -1.0 * exterior_d(wedge(e, xi))


def verify_transformation_law(dp: DistributionPair, case: Change) -> TransformationCheck:
    new = transform_pair(dp, case)
    lhs = gv_form(new)
    closed, exact = transformation_rhs(dp, case)
    grid = dp.grid
    region = grid.interior(4)
    diff = lhs - (closed + exact)
    if grid.fully_periodic:
        li, ri, ei = integrate_3form(lhs), integrate_3form(closed), integrate_3form(exact)
    else:
        li = ri = ei = float("nan")
    return TransformationCheck(diff.max_norm(region), li, ri, ei)


# --- confoliation conditions ----------------------------------------------------

@dataclass
class ConfoliationCheck:
    contact: np.ndarray = field(repr=False)      # *(omega ^ d omega)
    twist: np.ndarray = field(repr=False)        # *(tau ^ d tau)
    determinant: np.ndarray = field(repr=False)  # product minus the squared mixed term
    mixed: np.ndarray = field(repr=False)        # *(omega ^ d tau)
    verdict: bool


def confoliation_check(dp: DistributionPair, g: MetricField, Xdot: VectorField,
                       tol: float = 1e-9, margin: int = 4) -> ConfoliationCheck:
    """Pointwise local-minimum conditions for shift/scale second variations."""
    check_change(dp, Shift(Xdot))
    w = dp.omega
    dw = exterior_d(w)
    tb = interior_product(Xdot, dw)
    dtb = exterior_d(tb)
    star = lambda a: hodge_star(g, a).scalar
    c1 = star(wedge(w, dw))
    c2 = star(wedge(tb, dtb))
    mixed = star(wedge(w, dtb))
    c3 = c1 * c2 - mixed ** 2
    region = dp.grid.interior(margin)
    ok = all(float(np.min(c[region])) >= -tol for c in (c1, c2, c3))
    return ConfoliationCheck(c1, c2, c3, mixed, ok)


def chart_condition(grid, p1: np.ndarray, p2: np.ndarray, x2: np.ndarray) -> np.ndarray:
    """Slack of the chart inequality for omega = dx3 - x2 dx1, T = d3, X = p1 X1 + p2 X2.

    With X1 = d1 + x2 d3 and X2 = d2 one has i_X d(omega) = p1 dx2 - p2 dx1,
    so tau^d(tau) = (p2 p1_3 - p1 p2_3) vol and omega^d(tau) = (p1_1 + p2_2 + x2 p1_3) vol.
    Positive slack means the determinant condition holds strictly.
    """
    from .calculus import partial
    d = lambda f, a: partial(grid, f, a)
    twist = p2 * d(p1, 2) - p1 * d(p2, 2)
    mixed = d(p1, 0) + d(p2, 1) + x2 * d(p1, 2)
    return twist - mixed ** 2
