"""First and second variations of gv along one-parameter families of pairs.

Families are exact curves in pair space:

    scale  (exp(f_t) omega, exp(-f_t) T)      f_t  = t f + t^2/2 f2
    shift  (omega, T + X_t)                   X_t  = t X + t^2/2 X2
    tilt   (omega + mu_t, T)                  mu_t = t mu + t^2/2 mu2

so analytic derivatives and finite differences are taken along the same curve.
"""
from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .calculus import KForm, VectorField, exterior_d, integrate_3form, interior_product, wedge, _dot
from .geometry import CompatiblePair, DistributionPair, PairError
from .gv import Scale, Shift, Tilt, eta, gv_direct, transform_pair


@dataclass(frozen=True)
class VariationSpec:
    kind: str  # scale | shift | tilt | metric
    generator: object = field(repr=False)
    second_generator: object = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in ("scale", "shift", "tilt", "metric"):
            raise ValueError(f"variation kind must be scale, shift, tilt or metric, got {self.kind!r}")


def _validate(dp: DistributionPair, vs: VariationSpec, tol=1e-12):
    if vs.kind == "metric":
        raise ValueError("metric variations keep the pair's plane field; use critical.metric_fd_variation")
    for gen in (vs.generator, vs.second_generator):
        if gen is None:
            continue
        if vs.kind == "shift":
            err = float(np.max(np.abs(_dot(dp.omega.comps, gen.comps))))
            if err > tol:
                raise PairError(f"shift generator leaves the plane field: |omega(X)| = {err:.3e}")
        elif vs.kind == "tilt":
            err = float(np.max(np.abs(_dot(gen.comps, dp.T.comps))))
            if err > tol:
                raise PairError(f"tilt generator does not annihilate T: |mu(T)| = {err:.3e}")


def pair_at(dp: DistributionPair, vs: VariationSpec, t: float) -> DistributionPair:
    if vs.kind == "metric":
        raise ValueError("metric variations do not move the pair")
    g1, g2 = vs.generator, vs.second_generator
    if vs.kind == "scale":
        f = t * g1 + (0.0 if g2 is None else 0.5 * t * t * g2)
        return transform_pair(dp, Scale(f))
    if vs.kind == "shift":
        X = t * g1 if g2 is None else t * g1 + (0.5 * t * t) * g2
        return transform_pair(dp, Shift(X))
    mu = t * g1 if g2 is None else t * g1 + (0.5 * t * t) * g2
    return transform_pair(dp, Tilt(mu))


def _derivatives(dp: DistributionPair, vs: VariationSpec):
    """(omega', T', omega'', T'') at t = 0 along the family."""
    grid, w, T = dp.grid, dp.omega, dp.T
    zero_w = KForm(grid, 1, np.zeros_like(w.comps))
    zero_T = VectorField(grid, np.zeros_like(T.comps))
    g1, g2 = vs.generator, vs.second_generator
    if vs.kind == "scale":
        f2 = 0.0 if g2 is None else g2
        return (w * g1, T * (-g1), w * (g1 * g1 + f2), T * (g1 * g1 - f2))
    if vs.kind == "shift":
        return zero_w, g1, zero_w, (zero_T if g2 is None else g2)
    return g1, zero_T, (zero_w if g2 is None else g2), zero_T


def eta_dot(dp: DistributionPair, vs: VariationSpec) -> KForm:
    """i_T d(omega') + i_{T'} d(omega)."""
    _validate(dp, vs)
    wd, Td, _, _ = _derivatives(dp, vs)
    return interior_product(dp.T, exterior_d(wd)) + interior_product(Td, exterior_d(dp.omega))


def eta_ddot(dp: DistributionPair, vs: VariationSpec) -> KForm:
    """i_T d(omega'') + 2 i_{T'} d(omega') + i_{T''} d(omega)."""
    wd, Td, wdd, Tdd = _derivatives(dp, vs)
    return (interior_product(dp.T, exterior_d(wdd))
            + 2.0 * interior_product(Td, exterior_d(wd))
            + interior_product(Tdd, exterior_d(dp.omega)))


def first_variation(dp: DistributionPair, vs: VariationSpec) -> float:
    ed = eta_dot(dp, vs)
    return 2.0 * integrate_3form(wedge(ed, exterior_d(eta(dp))))


def second_variation(dp: DistributionPair, vs: VariationSpec) -> float:
    ed = eta_dot(dp, vs)
    edd = eta_ddot(dp, vs)
    return 2.0 * (integrate_3form(wedge(edd, exterior_d(eta(dp))))
                  + integrate_3form(wedge(ed, exterior_d(ed))))


def thread_count() -> int:
    n = int(os.environ.get("GVLAB_THREADS", "0") or 0)
    return n if n > 0 else (os.cpu_count() or 1)


@dataclass
class FDResult:
    raw: float
    richardson: float
    dt: float
    order: int
    samples: dict = field(repr=False)
    cancellation_warning: bool = False


def central_differences(fn, dt: float, order: int = 1) -> FDResult:
    """Central differences of a scalar function of t at 0, from samples at +-dt, +-2dt.

    The Richardson value combines the dt and 2dt stencils to cancel the dt^2 term.
    Samples are taken concurrently; the combination order is fixed.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    ts = (-2 * dt, -dt, 0.0, dt, 2 * dt) if order == 2 else (-2 * dt, -dt, dt, 2 * dt)
    with ThreadPoolExecutor(max_workers=min(thread_count(), len(ts))) as pool:
        vals = list(pool.map(fn, ts))
    s = dict(zip(ts, vals))
    if order == 1:
        d1 = (s[dt] - s[-dt]) / (2 * dt)
        d2 = (s[2 * dt] - s[-2 * dt]) / (4 * dt)
    else:
        d1 = (s[dt] - 2 * s[0.0] + s[-dt]) / dt ** 2
        d2 = (s[2 * dt] - 2 * s[0.0] + s[-2 * dt]) / (4 * dt ** 2)
    rich = (4 * d1 - d2) / 3
    scale = max(abs(v) for v in vals) or 1.0
    # rounding in the samples amplified by the stencil
    floor = 64 * np.finfo(float).eps * scale / (dt if order == 1 else dt * dt)
    warn = abs(d1 - d2) < floor and abs(d1) < floor
    if warn and scale > 1e-12:
        warnings.warn(f"finite-difference step {dt} is at the rounding floor", RuntimeWarning)
    return FDResult(d1, rich, dt, order, s, warn)


def finite_difference_variation(dp: DistributionPair, vs: VariationSpec, dt: float = 1e-3,
                                order: int = 1, functional=gv_direct) -> FDResult:
    """Differences of gv along the exact family through dp."""
    _validate(dp, vs)
    return central_differences(lambda t: functional(pair_at(dp, vs, t)), dt, order)


def index_form(phi: KForm, psi: KForm) -> float:
    """I(phi, psi) = integral of phi ^ d psi."""
    return integrate_3form(wedge(phi, exterior_d(psi)))


def lie_T_squared_d(cp_or_dp, alpha: KForm) -> KForm:
    from .calculus import lie_derivative
    T = cp_or_dp.pair.T if isinstance(cp_or_dp, CompatiblePair) else cp_or_dp.T
    return lie_derivative(T, lie_derivative(T, exterior_d(alpha)))


def index_form_T(cp_or_dp, alpha: KForm, beta: KForm, tol: float = 1e-10) -> float:
    """I_T(alpha, beta) = integral of (L_T^2 d alpha) ^ beta, for alpha(T) = beta(T) = 0."""
    T = cp_or_dp.pair.T if isinstance(cp_or_dp, CompatiblePair) else cp_or_dp.T
    for name, a in (("alpha", alpha), ("beta", beta)):
        err = float(np.max(np.abs(_dot(a.comps, T.comps))))
        if err > tol:
            raise PairError(f"{name}(T) must vanish, got {err:.3e}")
    return integrate_3form(wedge(lie_T_squared_d(cp_or_dp, alpha), beta))


def observed_dt_order(dp: DistributionPair, vs: VariationSpec, analytic: float, dt: float,
                      order: int = 1, floor: float = 0.0) -> tuple[float, float, float]:
    """Raw FD errors at dt and dt/2 and the implied convergence order.

    Returns nan for the order when both errors sit below ``floor``.
    """
    e1 = abs(finite_difference_variation(dp, vs, dt, order).raw - analytic)
    e2 = abs(finite_difference_variation(dp, vs, dt / 2, order).raw - analytic)
    if max(e1, e2) <= floor or e2 == 0:
        return e1, e2, float("nan")
    return e1, e2, math.log2(e1 / e2)


def frenet_variation_formulas(cp: CompatiblePair, vs: VariationSpec, fd=None, sfd=None) -> float:
    """First variation of gv written in the Frenet frame (T, N, B).

    scale: -4 int T(f) Div(Tcal T) dV  (the family T_t = T + phi_t T with phi' = -f)
    shift: 4 int <k Div(Tcal T) N - (T(k) - k h_NN) Tcal(., B) + k (tau - h_BN) Tcal(., N), X> dV
    tilt:  2 int [m2 (s psi2 - T(psi2) + tau psi1) + m1 (tau psi2 - s psi1 + T(psi1))
                  - psi2 h(B, mu#) + psi1 h(N, mu#)] dV
    with s = sigma_1, psi1 = k (tau - h_BN), psi2 = T(k) - k h_NN, m1 = mu(N), m2 = mu(B).
    The shift and tilt forms need the Frenet frame on the whole support of the generator.
    """
    from .calculus import integrate
    from .geometry import derivative_along, divergence, frenet, second_fundamental

    _validate(cp.pair, vs)
    grid, g, T = cp.grid, cp.g, cp.T
    if vs.second_generator is not None:
        raise ValueError("Frenet first-variation formulas take a first-order generator only")
    if fd is None:
        fd = frenet(cp)
    if sfd is None:
        sfd = second_fundamental(cp, fd)
    dV = g.sqrt_det
    Tc = sfd.Tcal
    divTT = divergence(g, Tc * T)
    Tder = lambda f: derivative_along(grid, T, f)
    if vs.kind == "scale":
        return -4.0 * integrate(grid, Tder(vs.generator) * divTT * dV)

    gen = vs.generator.comps
    support = np.any(gen != 0, axis=0)
    if not np.all(fd.valid[support]):
        raise PairError("generator support leaves the Frenet mask")
    k, tau = fd.k, fd.tau
    psi1 = k * (tau - sfd.hBN)
    psi2 = Tder(k) - k * sfd.hNN
    if vs.kind == "shift":
        x1 = g.inner(gen, fd.N)
        x2 = g.inner(gen, fd.B)
        dens = k * divTT * x1 - psi2 * x1 * Tc - psi1 * x2 * Tc
        return 4.0 * integrate(grid, np.where(fd.valid, dens, 0.0) * dV)
    m1 = np.einsum("i...,i...->...", gen, fd.N)
    m2 = np.einsum("i...,i...->...", gen, fd.B)
    s = sfd.sigma1
    h_mB = m1 * sfd.hBN + m2 * sfd.hBB  # h(B, mu#)
    h_mN = m1 * sfd.hNN + m2 * sfd.hNB  # h(N, mu#)
    dens = (m2 * (s * psi2 - Tder(psi2) + tau * psi1)
            + m1 * (tau * psi2 - s * psi1 + Tder(psi1))
            - psi2 * h_mB + psi1 * h_mN)
    return 2.0 * integrate(grid, np.where(fd.valid, dens, 0.0) * dV)
