"""Euler-Lagrange residuals of gv.

Three families of critical-point equations are covered: the (L_T)^3 omega
criterion for variations of the pair, its Frenet-frame form, and the
three equations obtained by varying the metric with the plane field held
fixed (Q1, Q2, Q3).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .calculus import KForm, MetricField, VectorField, integrate, lie_derivative
from .geometry import (CompatiblePair, DistributionPair, FrenetData, PairError,
                       SecondFundamentalData, derivative_along, divergence, frenet,
                       second_fundamental)
from .gv import gv_direct
from .scenarios import erode
from .variations import FDResult, central_differences


def lt3_residual(dp: DistributionPair) -> KForm:
    """(L_T)^3 omega."""
    a = dp.omega
    for _ in range(3):
        a = lie_derivative(dp.T, a)
    return a


def lt3_frame_components(dp: DistributionPair, fd: FrenetData) -> tuple[np.ndarray, np.ndarray]:
    """(L_T)^3 omega evaluated on N and on B (zero off the Frenet mask)."""
    r = lt3_residual(dp).comps
    on = lambda V: np.where(fd.valid, np.einsum("i...,i...->...", r, V), 0.0)
    return on(fd.N), on(fd.B)


def geometric_el_residuals(cp: CompatiblePair, fd: FrenetData,
                           sfd: SecondFundamentalData) -> tuple[np.ndarray, np.ndarray]:
    """The N and B lines of (L_T)^3 omega in Frenet-frame quantities.

    For an integrable plane field

        N: T(T(k)) - 2 T(k) h_NN - k T(h_NN) + k h(AN, N) - k tau^2
        B: -2 T(k (h_BN - tau)) + k (T(h_BN) - T(tau) + h_BN h_NN + h_BB h_NB + tau (h_BB - h_NN))

    with h(AN, N) = h_NN^2 + h_NB h_BN.  Values off the mask are zero; values
    within a stencil width of the mask edge read zeros and should be discarded.
    """
    T, grid = cp.T, cp.grid
    Td = lambda f: derivative_along(grid, T, f)
    k, tau = fd.k, fd.tau
    m = fd.valid
    hNN, hNB, hBN, hBB = (np.where(m, h, 0.0) for h in (sfd.hNN, sfd.hNB, sfd.hBN, sfd.hBB))
    Tk = Td(k)
    hANN = hNN * hNN + hNB * hBN
    line_n = Td(Tk) - 2 * Tk * hNN - k * Td(hNN) + k * hANN - k * tau ** 2
    line_b = (-2 * Td(k * (hBN - tau))
              + k * (Td(hBN) - Td(tau) + hBN * hNN + hBB * hNB + tau * (hBB - hNN)))
    return np.where(m, line_n, 0.0), np.where(m, line_b, 0.0)


def is_integrable(dp: DistributionPair, tol: float = 1e-8) -> bool:
    from .calculus import exterior_d, wedge
    w = dp.omega
    return wedge(w, exterior_d(w)).max_norm() <= tol


def umbilic_system_residuals(cp: CompatiblePair, fd: FrenetData, lam: np.ndarray | float,
                             sfd: SecondFundamentalData | None = None,
                             tol: float = 1e-2) -> tuple[np.ndarray, np.ndarray]:
    """Residuals of the critical-point system when h = lam Id on the plane field.

        T(T(k)) - (tau^2 - lam^2) k - T(lam k) - lam T(k)
        T(k tau) + tau T(k) - 2 k lam tau

    lam = 0 gives T(T(k)) = tau^2 k and T(k tau) + tau T(k) = 0.
    ``tol`` bounds |h - lam Id| on the mask; it has to absorb the truncation
    error of h itself, which is far larger than that of k.
    """
    if sfd is None:
        sfd = second_fundamental(cp, fd)
    lam = np.broadcast_to(np.asarray(lam, dtype=float), cp.grid.sizes)
    m = fd.valid
    dev = max(float(np.max(np.abs(np.where(m, h - l, 0.0))))
              for h, l in ((sfd.hNN, lam), (sfd.hBB, lam), (sfd.hNB, 0.0), (sfd.hBN, 0.0)))
    if dev > tol:
        raise PairError(f"plane field is not totally umbilical: |h - lam Id| = {dev:.3e}")
    Td = lambda f: derivative_along(cp.grid, cp.T, f)
    k, tau = fd.k, fd.tau
    Tk = Td(k)
    r1 = Td(Tk) - (tau ** 2 - lam ** 2) * k - Td(lam * k) - lam * Tk
    r2 = Td(k * tau) + tau * Tk - 2 * k * lam * tau
    return np.where(m, r1, 0.0), np.where(m, r2, 0.0)


# --- metric variations ----------------------------------------------------------

@dataclass
class MetricEL:
    """Q1 everywhere; Q2, Q3 on the Frenet mask; k Q2 and k Q3 everywhere."""

    q1: np.ndarray = field(repr=False)
    q2: np.ndarray = field(repr=False)
    q3: np.ndarray = field(repr=False)
    kq2: np.ndarray = field(repr=False)
    kq3: np.ndarray = field(repr=False)


def metric_el_residuals(cp: CompatiblePair, fd: FrenetData, sfd: SecondFundamentalData) -> MetricEL:
    g, T, grid = cp.g, cp.T, cp.grid
    Tc = sfd.Tcal
    div_TT = divergence(g, Tc * T)
    q1 = divergence(g, div_TT * T)
    k = fd.k
    Tk = derivative_along(grid, T, k)
    m = fd.valid
    hNN = np.where(m, sfd.hNN, 0.0)
    hBN = np.where(m, sfd.hBN, 0.0)
    kq2 = k * div_TT - (Tk - k * hNN) * Tc
    kq3 = k * (fd.tau - hBN) * Tc
    safe = np.where(m, k, 1.0)
    return MetricEL(q1, np.where(m, kq2 / safe, 0.0), np.where(m, kq3 / safe, 0.0),
                    kq2, kq3)


@dataclass(frozen=True)
class MetricVariation:
    """Symmetric S given by its components in the frame (T, N, B)."""

    TT: np.ndarray
    TN: np.ndarray
    TB: np.ndarray
    NN: np.ndarray
    NB: np.ndarray
    BB: np.ndarray

    def coordinates(self, cp: CompatiblePair, N: np.ndarray, B: np.ndarray) -> np.ndarray:
        """S_ij on the coordinate basis, using the coframe (omega, N_flat, B_flat)."""
        th = (cp.omega.comps, cp.g.lower(N), cp.g.lower(B))
        c = ((self.TT, self.TN, self.TB), (self.TN, self.NN, self.NB), (self.TB, self.NB, self.BB))
        out = np.zeros((3, 3) + cp.grid.sizes)
        for a in range(3):
            for b in range(3):
                out += c[a][b] * th[a][:, None] * th[b][None, :]
        return out


def unit_normal_pair(dp: DistributionPair, g: MetricField) -> DistributionPair:
    """Rescale omega to g-unit length and take T as its g-dual, keeping ker omega."""
    w = dp.omega.comps
    wn = w / np.sqrt(g.inner(g.raise_(w), g.raise_(w)))
    return DistributionPair(KForm(dp.grid, 1, wn), VectorField(dp.grid, g.raise_(wn)))


def metric_functional(dp: DistributionPair, g: MetricField) -> float:
    """J(g): gv of ker omega with its g-unit normal."""
    return gv_direct(unit_normal_pair(dp, g))


def metric_fd_variation(cp: CompatiblePair, S: np.ndarray, dt: float = 1e-3,
                        order: int = 1) -> FDResult:
    """Central differences of J along g + t S."""
    g0, grid = cp.g.g, cp.grid
    return central_differences(
        lambda t: metric_functional(cp.pair, MetricField(grid, g0 + t * S)), dt, order)


def metric_gradient_integral(cp: CompatiblePair, el: MetricEL, mv: MetricVariation) -> float:
    """First variation of J predicted by the residuals:

        int (2 Q1 S_TT - 4 k Q2 S_TN + 4 k Q3 S_TB) dV_g

    The plane-field block S_NN, S_NB, S_BB does not enter.
    """
    dens = 2 * el.q1 * mv.TT - 4 * el.kq2 * mv.TN + 4 * el.kq3 * mv.TB
    return integrate(cp.grid, dens * cp.g.sqrt_det)


@dataclass
class RectifyingCheck:
    verdict: bool
    field: np.ndarray = field(repr=False)
    max_violation: float
    worst_index: tuple
    gv: float
    tcal_min: float  # min |Tcal| on the mask; zero means the non-integrable hypothesis fails


def rectifying_plane_check(cp: CompatiblePair, fd: FrenetData, sfd: SecondFundamentalData,
                           tol: float = 1e-6) -> RectifyingCheck:
    """tau - h_BN on the mask; zero everywhere means span(T, B) is integrable there."""
    if not fd.valid.any():
        return RectifyingCheck(True, np.zeros(cp.grid.sizes), 0.0, (), float("nan"), float("nan"))
    f = np.where(fd.valid, fd.tau - sfd.hBN, 0.0)
    idx = np.unravel_index(int(np.argmax(np.abs(f))), f.shape)
    worst = float(abs(f[idx]))
    gv = gv_direct(cp.pair) if cp.grid.fully_periodic else float("nan")
    tmin = float(np.min(np.abs(sfd.Tcal[fd.valid])))
    return RectifyingCheck(worst <= tol, f, worst, tuple(int(i) for i in idx), gv, tmin)


@dataclass
class ELReport:
    lt3_residual: KForm = field(repr=False)
    geo_residual_N: np.ndarray = field(repr=False)
    geo_residual_B: np.ndarray = field(repr=False)
    q1: np.ndarray = field(repr=False)
    q2: np.ndarray = field(repr=False)
    q3: np.ndarray = field(repr=False)
    norms: dict = field(default_factory=dict)
    integrable: bool = True


def _norms(grid, f) -> dict:
    return {"max": float(np.max(np.abs(f))),
            "l2": float(np.sqrt(max(integrate(grid, f * f), 0.0)))}


def el_report(cp: CompatiblePair, k_min: float = 1e-8, margin: int = 0) -> ELReport:
    """All residual fields, with norms taken over the mask eroded by ``margin``."""
    fd = frenet(cp, k_min)
    sfd = second_fundamental(cp, fd)
    lt3 = lt3_residual(cp.pair)
    gn, gb = geometric_el_residuals(cp, fd, sfd)
    el = metric_el_residuals(cp, fd, sfd)
    grid = cp.grid
    region = erode(fd.valid, margin, grid.periodic) if margin else fd.valid
    cut = lambda f: np.where(region, f, 0.0)
    norms = {
        "lt3": _norms(grid, np.sqrt(np.sum(lt3.comps ** 2, axis=0))),
        "geo_N": _norms(grid, cut(gn)),
        "geo_B": _norms(grid, cut(gb)),
        "q1": _norms(grid, el.q1),
        "q2": _norms(grid, cut(el.q2)),
        "q3": _norms(grid, cut(el.q3)),
        "kq2": _norms(grid, el.kq2),
        "kq3": _norms(grid, el.kq3),
    }
    return ELReport(lt3, gn, gb, el.q1, el.q2, el.q3, norms, is_integrable(cp.pair))


def periodic_umbilic_sweep(amplitudes, cs, n: int = 64) -> list[dict]:
    """Periodic trial solutions k(z) = 1 + a sin z, tau = c / k^2 of the lam = 0 system.

    The substitution solves the second equation identically, so only
    T(T(k)) - tau^2 k is reported.  Integrating it over a period gives
    -c^2 int k^-3 < 0, so only a = c = 0 can vanish.
    """
    from .calculus import ChartGrid, partial
    grid = ChartGrid((8, 8, n))
    z = grid.coords()[2]
    rows = []
    for a in amplitudes:
        if abs(a) >= 1:
            raise ValueError("amplitude must keep k positive (|a| < 1)")
        k = 1 + a * np.sin(z)
        kz = partial(grid, k, 2)
        for c in cs:
            tau = c / k ** 2
            r1 = partial(grid, kz, 2) - tau ** 2 * k
            r2 = partial(grid, k * tau, 2) + tau * kz
            rows.append({"a": float(a), "c": float(c),
                         "max_r1": float(np.max(np.abs(r1))), "max_r2": float(np.max(np.abs(r2)))})
    return rows
