"""Named numerical checks.

Each check builds its own scenarios, runs the computation and returns a list
of CheckResult rows.  The CLI runs them by name and the acceptance tests
call the same functions, so there is one definition of every threshold.
``tol_scale`` multiplies every tolerance.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import scenarios as S
from .calculus import (ChartGrid, KForm, MetricField, VectorField, exterior_d, hodge_star,
                       integrate_3form, observed_orders, partial)
from .geometry import CompatiblePair, DistributionPair, build_compatible_metric, frenet, \
    second_fundamental, seed_metric
from .gv import Scale, eta, gv_direct, gv_reinhart_wood, transform_pair


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""

    def as_dict(self) -> dict:
        return asdict(self)


def _le(name, value, tol, detail="") -> CheckResult:
    value = float(value)
    return CheckResult(name, bool(value <= tol), value, float(tol), detail)


def _ge(name, value, tol, detail="") -> CheckResult:
    value = float(value)
    return CheckResult(name, bool(value >= tol), value, float(tol), detail)


# --- probe generators ---------------------------------------------------------------

def _bump(grid, rng, support=0.5):
    lo = np.array(grid.origin) + 0.3 * np.array(grid.extents)
    hi = np.array(grid.origin) + 0.7 * np.array(grid.extents)
    return S.bump3d(grid, center=rng.uniform(lo, hi), support=support)


def _smooth(grid, rng):
    x, y, z = grid.coords()
    a = rng.normal(size=4)
    ph = rng.uniform(0, 2 * np.pi, 3)
    return a[0] + a[1] * np.sin(x + ph[0]) + a[2] * np.cos(y + ph[1]) + a[3] * np.sin(z + ph[2])


def probe(dp: DistributionPair, kind: str, rng: np.random.Generator, amplitude: float = 0.5,
          second: bool = False):
    """Random bump-localized generator of the given kind, satisfying its constraint."""
    from .variations import VariationSpec
    grid = dp.grid
    w, T = dp.omega.comps, dp.T.comps

    def one():
        b = _bump(grid, rng)
        if kind == "scale":
            return amplitude * b * _smooth(grid, rng)
        V = amplitude * b * np.stack([_smooth(grid, rng) for _ in range(3)])
        if kind == "shift":
            return VectorField(grid, V - np.einsum("i...,i...->...", w, V) * T)
        return KForm(grid, 1, V - np.einsum("i...,i...->...", V, T) * w)

    return VariationSpec(kind, one(), one() if second else None)


# --- 1: calculus identities -----------------------------------------------------------

def calculus(tol_scale=1.0, sizes=(32, 64, 128)) -> list[CheckResult]:
    """d(d alpha) and int d(beta) over a refinement sweep, plus ** = Id."""
    dd, stokes, deriv = [], [], []
    for n in sizes:
        grid = ChartGrid.torus(n)
        x, y, z = grid.coords()
        a = KForm(grid, 1, np.stack([np.sin(x + 2 * y) * np.cos(z), np.exp(np.sin(y - z)),
                                     np.cos(3 * x) * np.sin(y)]))
        dd.append(exterior_d(exterior_d(a)).max_norm())
        b = KForm(grid, 2, np.stack([np.exp(np.cos(x + z)), np.sin(2 * y) * np.cos(x),
                                     np.cos(y + z) ** 2]))
        stokes.append(abs(integrate_3form(exterior_d(b))))
        f = np.exp(np.sin(x)) * np.cos(y + z)
        exact = np.exp(np.sin(x)) * np.cos(x) * np.cos(y + z)
        deriv.append(float(np.max(np.abs(partial(grid, f, 0) - exact))))
        del a, b, f, exact, x, y, z
    floor = 1e-11
    out = []
    for name, errs in (("calculus.dd", dd), ("calculus.stokes", stokes)):
        orders = observed_orders(sizes, errs)
        at_floor = max(errs) <= floor
        worst = min(orders) if orders and all(math.isfinite(o) for o in orders) else float("nan")
        out.append(CheckResult(
            name, bool(at_floor or (math.isfinite(worst) and worst >= 3.5)),
            max(errs), floor * tol_scale,
            f"errors {', '.join(f'{e:.2e}' for e in errs)}; both identities are exact for "
            "commuting difference operators, so the sweep sits at the rounding floor"))
    orders = observed_orders(sizes, deriv)
    out.append(_ge("calculus.derivative_order", min(orders), 3.5,
                   f"first-derivative errors {', '.join(f'{e:.2e}' for e in deriv)}"))
    grid = ChartGrid.torus(32)
    g = seed_metric(grid, 0.2)
    rng = np.random.default_rng(7)
    worst = 0.0
    for k, nc in ((0, 1), (1, 3), (2, 3), (3, 1)):
        a = KForm(grid, k, rng.normal(size=(nc,) + grid.sizes))
        back = hodge_star(g, hodge_star(g, a))
        worst = max(worst, float(np.max(np.abs(back.comps - a.comps))))
    out.append(_le("calculus.star_star", worst, 1e-13 * tol_scale, "perturbed metric, degrees 0..3"))
    return out


# --- 2: contact criticality -----------------------------------------------------------

def contact_critical(tol_scale=1.0, n=64, probes=10, seed=11) -> list[CheckResult]:
    from .variations import first_variation
    sc = S.build("contact", n)
    dp = sc.pair
    out = [_le("contact.eta", eta(dp).max_norm(), 1e-12 * tol_scale),
           _le("contact.gv", abs(gv_direct(dp)), 1e-8 * tol_scale)]
    rng = np.random.default_rng(seed)
    worst = 0.0
    kinds = ("scale", "shift", "tilt")
    for i in range(probes):
        for kind in kinds:
            worst = max(worst, abs(first_variation(dp, probe(dp, kind, rng))))
    out.append(_le("contact.first_variation", worst, 1e-8 * tol_scale,
                   f"{probes} random probes of each kind"))
    return out


# --- 3: eta needs no metric -----------------------------------------------------------

def eta_metric_free(tol_scale=1.0, n=64) -> list[CheckResult]:
    sc = S.build("tilted", n)
    dp = sc.pair
    cps = [build_compatible_metric(dp, "euclidean"), build_compatible_metric(dp, "perturbed", 0.2)]
    out = []
    for label, cp in zip(("euclidean", "perturbed"), cps):
        T = cp.T
        flat_err = float(np.max(np.abs(cp.g.lower(T) - dp.omega.comps)))
        unit_err = float(np.max(np.abs(cp.g.inner(T, T) - 1.0)))
        out.append(_le(f"eta.compatible_{label}", max(flat_err, unit_err), 1e-12 * tol_scale))
    e = [eta(cp.pair).comps for cp in cps]
    out.append(_le("eta.agreement", float(np.max(np.abs(e[0] - e[1]))), 1e-12 * tol_scale))
    # the metric route: eta is the flat of the acceleration in any compatible metric;
    # it agrees up to truncation, so its convergence order is what is checked
    errs = []
    for m in (n // 2, n):
        dpm = S.build("tilted", m).pair
        em = eta(dpm).comps
        worst = 0.0
        for cp in (build_compatible_metric(dpm, "euclidean"),
                   build_compatible_metric(dpm, "perturbed", 0.2)):
            acc = cp.connection.nabla(cp.T, cp.T)
            worst = max(worst, float(np.max(np.abs(cp.g.lower(acc) - em))))
        errs.append(worst)
    out.append(_ge("eta.acceleration_route_order", observed_orders((n // 2, n), errs)[0], 3.5,
                   f"|g(nabla_T T, .) - eta| = {errs[0]:.2e}, {errs[1]:.2e}"))
    return out


# --- 4: Reinhart-Wood cross-check -----------------------------------------------------

def reinhart_wood(tol_scale=1.0, sizes=(32, 64), fine=96) -> list[CheckResult]:
    res = []
    mask = 1.0
    for n in sizes:
        sc = S.build("tilted", n)
        rep = gv_reinhart_wood(sc.cp, sc.k_min)
        res.append(rep.residual_max)
        mask = min(mask, rep.mask_fraction)
    sc = S.build("tilted", fine)
    rep = gv_reinhart_wood(sc.cp, sc.k_min)
    mask = min(mask, rep.mask_fraction)
    gap = abs(rep.gv_direct - rep.gv_rw)
    order = observed_orders(sizes, res)[-1]
    return [
        _ge("rw.mask_fraction", mask, 0.99),
        _le("rw.pointwise", res[-1], 5e-4 * tol_scale,
            f"max residual at {', '.join(f'{n}^3: {r:.2e}' for n, r in zip(sizes, res))}"),
        _ge("rw.pointwise_order", order, 3.0),
        _le("rw.integral_gap", gap, 1e-6 * max(1.0, abs(rep.gv_direct)) * tol_scale,
            f"gv_direct {rep.gv_direct:.10g}, gv_rw {rep.gv_rw:.10g} at {fine}^3"),
    ]


# --- 5: variation formulas ------------------------------------------------------------

def variation_formulas(tol_scale=1.0, n=48, dt=1e-3, order_dt=2e-2, seed=5,
                       scenario_names=("contact", "foliation", "tilted")) -> list[CheckResult]:
    from .variations import (finite_difference_variation, first_variation, observed_dt_order,
                             second_variation)
    import warnings
    rng = np.random.default_rng(seed)
    out = []
    for name in scenario_names:
        dp = S.build(name, n).pair
        for kind in ("scale", "shift", "tilt"):
            vs = probe(dp, kind, rng, second=True)
            vs1 = type(vs)(kind, vs.generator)
            a1 = first_variation(dp, vs1)
            a2 = second_variation(dp, vs)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                f1 = finite_difference_variation(dp, vs1, dt, 1)
                f2 = finite_difference_variation(dp, vs, 10 * dt, 2)
                sc1 = max(1.0, abs(a1))
                sc2 = max(1.0, abs(a2))
                floor1 = 1e-9 * sc1
                floor2 = 1e-7 * sc2
                _, _, o1 = observed_dt_order(dp, vs1, a1, order_dt, 1, floor1)
                _, _, o2 = observed_dt_order(dp, vs, a2, 5 * order_dt, 2, floor2)
            tag = f"variation.{name}.{kind}"
            out.append(_le(tag + ".first", abs(f1.richardson - a1), 1e-7 * sc1 * tol_scale,
                           f"analytic {a1:.12g}, FD {f1.richardson:.12g}"))
            out.append(_le(tag + ".second", abs(f2.richardson - a2), 1e-5 * sc2 * tol_scale,
                           f"analytic {a2:.12g}, FD {f2.richardson:.12g}"))
            for lab, o in (("first_order", o1), ("second_order", o2)):
                note = "FD error below the rounding floor at both steps" if math.isnan(o) else ""
                out.append(CheckResult(tag + "." + lab, bool(math.isnan(o) or o >= 1.9),
                                       o, 1.9, note))
    return out


# --- 6: rescaling with T(f) = 0 -------------------------------------------------------

def coframe_pair(n: int) -> DistributionPair:
    """omega = dz + (1 + 0.3 cos x) sin z dx + cos(z + 0.5 sin y) dy, T = d/dz; gv != 0."""
    grid = ChartGrid.torus(n)
    x, y, z = grid.coords()
    w = np.stack([(1 + 0.3 * np.cos(x)) * np.sin(z), np.cos(z + 0.5 * np.sin(y)), np.ones_like(z)])
    T = np.stack([0 * z, 0 * z, np.ones_like(z)])
    return DistributionPair(KForm(grid, 1, w), VectorField(grid, T))


def rescale_invariance(tol_scale=1.0, n=48) -> list[CheckResult]:
    pairs = {"foliation": S.build("foliation", n).pair,
             "integrable": S.build("integrable", n).pair,
             "coframe": coframe_pair(n)}
    out = []
    for name, dp in pairs.items():
        grid = dp.grid
        x, y, _ = grid.coords()
        f = S.bump1d(x, np.pi, 1.5) * S.bump1d(y, np.pi, 1.5) * (1 + 0.5 * np.sin(x - y))
        g0 = gv_direct(dp)
        g1 = gv_direct(transform_pair(dp, Scale(f)))
        out.append(_le(f"rescale.{name}", abs(g1 - g0), 1e-8 * tol_scale,
                       f"gv before {g0:.6g}, after {g1:.6g}"))
    return out


# --- 7: criticality equivalences ------------------------------------------------------

def criticality(tol_scale=1.0, n=48, fine=96) -> list[CheckResult]:
    from .critical import geometric_el_residuals, lt3_frame_components, lt3_residual
    quad = S.build("quadratic_chart", n)
    cubic = S.build("cubic_chart", n, cubic=0.5)
    r_quad = lt3_residual(quad.pair).max_norm()
    r_cub = lt3_residual(cubic.pair).comps[0]
    rel = float(np.max(np.abs(r_cub - 6 * 0.5))) / 3.0
    out = [_le("critical.quadratic_lt3", r_quad, 1e-6 * tol_scale),
           _le("critical.cubic_control", rel, 0.05, "relative distance to 6 c3 = 3")]
    sc = S.build("integrable", fine, b=0.05)
    cp = sc.cp
    kmax = float(frenet(cp).k.max())
    fd = frenet(cp, 0.5 * kmax)
    sfd = second_fundamental(cp, fd)
    a, b = lt3_frame_components(cp.pair, fd)
    gn, gb = geometric_el_residuals(cp, fd, sfd)
    region = S.erode(fd.valid, 4)
    err = max(float(np.max(np.abs((a - gn)[region]))), float(np.max(np.abs((b - gb)[region]))))
    out.append(_le("critical.geometric_form", err, 1e-5 * tol_scale,
                   f"{fine}^3, k >= {0.5 * kmax:.3g}, mask eroded by 4: {region.mean():.3f} of the grid"))
    return out


# --- 8: metric Euler-Lagrange equations -----------------------------------------------

def metric_gradient(tol_scale=1.0, n=64, trials=10, seed=3) -> list[CheckResult]:
    from .critical import (MetricVariation, metric_el_residuals, metric_fd_variation,
                           metric_gradient_integral)
    sc = S.build("tilted", n)
    cp = sc.cp
    fd = frenet(cp, sc.k_min)
    sfd = second_fundamental(cp, fd)
    el = metric_el_residuals(cp, fd, sfd)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        b = _bump(cp.grid, rng, 0.6)
        comps = [0.1 * b * _smooth(cp.grid, rng) for _ in range(6)]
        mv = MetricVariation(*comps)
        fdv = metric_fd_variation(cp, mv.coordinates(cp, fd.N, fd.B))
        an = metric_gradient_integral(cp, el, mv)
        worst = max(worst, abs(an - fdv.richardson) / max(abs(fdv.richardson), 1e-300))
    out = [_le("metric.gradient", worst, 1e-4 * tol_scale, f"{trials} random variations, {n}^3")]

    geo = S.build("contact", n)
    cpg = geo.cp
    fdg = frenet(cpg, geo.k_min)
    elg = metric_el_residuals(cpg, fdg, second_fundamental(cpg, fdg))
    qmax = max(float(np.max(np.abs(q))) for q in (elg.q1, elg.kq2, elg.kq3))
    out.append(_le("metric.geodesic_residuals", qmax, 1e-8 * tol_scale,
                   "Q1, k Q2, k Q3 on the contact torus (k = 0)"))
    plus, minus = non_extremum_probes(cpg)
    out.append(CheckResult("metric.non_extremum", bool(plus > 0 > minus), min(plus, -minus), 0.0,
                           f"second variations {plus:.6g} and {minus:.6g}"))
    return out


def non_extremum_probes(cp: CompatiblePair, strength: float = 3.0, dt: float = 1e-2):
    """Second variation of J along g + tS for two shift-type metric probes on the contact torus.

    S = -(omega (x) X_flat + X_flat (x) omega) moves T to T + tX to first order.  With
    E1 = d/dz and E2 = (sin z, cos z, 0) spanning ker omega, X = b E1 + p b E2 where p
    grows by +-strength along T through the bump centre.
    """
    from .critical import metric_fd_variation
    grid = cp.grid
    x, y, z = grid.coords()
    b = S.bump3d(grid, support=0.5)
    zero = 0 * z
    E1 = np.stack([zero, zero, zero + 1])
    E2 = np.stack([np.sin(z), np.cos(z), zero])
    # at z = pi the field T = (cos z, -sin z, 0) points along -x
    u = np.pi - x
    vals = []
    for s in (1.0, -1.0):
        X = b * E1 + s * strength * u * b * E2
        Xf = cp.g.lower(X)
        w = cp.omega.comps
        Sm = -(w[:, None] * Xf[None, :] + Xf[:, None] * w[None, :])
        vals.append(metric_fd_variation(cp, Sm, dt, 2).richardson)
    return vals[0], vals[1]


# --- 9: saddle ------------------------------------------------------------------------

def saddle_pair(n: int) -> tuple[DistributionPair, ChartGrid]:
    """omega = dx3 - x2 dx1, T = d3, on a periodic box [-pi, pi)^3.

    omega jumps across x2 = +-pi; every probe vanishes near that seam.
    """
    grid = ChartGrid((n, n, n), (2 * np.pi,) * 3, (True, True, True), (-np.pi,) * 3)
    x, y, z = grid.coords()
    w = np.stack([-y, 0 * y, 0 * y + 1])
    T = np.stack([0 * y, 0 * y, 0 * y + 1])
    return DistributionPair(KForm(grid, 1, w), VectorField(grid, T)), grid


def saddle_values(n: int) -> dict[str, float]:
    from .variations import VariationSpec, eta_dot, index_form
    dp, grid = saddle_pair(n)
    x, y, z = grid.coords()
    b = S.bump3d(grid, support=0.5)
    out = {}
    for label, s in (("minus", -1.0), ("plus", 1.0)):
        p1, p2 = b, s * z * b
        X = VectorField(grid, np.stack([p1, p2, p1 * y]))  # p1 X1 + p2 X2
        ed = eta_dot(dp, VariationSpec("shift", X))
        out[label] = index_form(ed, ed)
    return out


def saddle(tol_scale=1.0, n=64) -> list[CheckResult]:
    fine, coarse = saddle_values(n), saddle_values(n // 2)
    out = []
    for label in ("minus", "plus"):
        err = abs(fine[label] - coarse[label])
        out.append(_ge(f"saddle.{label}_margin", abs(fine[label]) / max(err, 1e-300), 10.0,
                       f"I = {fine[label]:.10g}, grid-halving change {err:.2e}"))
    out.append(CheckResult("saddle.opposite_signs", bool(fine["minus"] * fine["plus"] < 0),
                           fine["minus"] * fine["plus"], 0.0,
                           f"p2 = -x3: {fine['minus']:.6g}; p2 = +x3: {fine['plus']:.6g}"))
    return out


# --- 10: Jacobi fields ---------------------------------------------------------------

def random_jacobi_spec(grid: ChartGrid, rng: np.random.Generator):
    from .jacobi import JacobiFieldSpec
    x, y, _ = grid.coords()
    xx, yy = x[:, :, :1], y[:, :, :1]
    bump2 = lambda: (S.bump1d(xx, rng.uniform(-0.3, 0.3), 0.6)
                     * S.bump1d(yy, rng.uniform(-0.3, 0.3), 0.6))
    ph = rng.uniform(0, 2 * np.pi, 4)
    C10 = 0.3 + 0.1 * np.sin(xx + ph[0])
    C11 = -0.2 + 0.1 * np.cos(yy + ph[1])
    C12 = 0.5 + 0.1 * np.sin(xx * yy + ph[2])
    C22 = 0.4 + 0.05 * np.cos(xx + ph[3])
    low = [[rng.normal() * bump2() for _ in range(3)] for _ in range(2)]
    return JacobiFieldSpec.from_free(grid, C10, C11, C12, C22, low, rng.normal() * bump2())


def jacobi_kernel(tol_scale=1.0, n=40, specs=5, seed=2) -> list[CheckResult]:
    from .jacobi import (build_jacobi_field, chart_pair, eigen_family, eigen_residual,
                         self_adjointness_gap, jacobi_operator, ZPoly)
    grid = ChartGrid.chart(n, 1.0)
    rng = np.random.default_rng(seed)
    worst = worst_exact = 0.0
    for _ in range(specs):
        rep = build_jacobi_field(random_jacobi_spec(grid, rng), 1e-6 * tol_scale)
        worst = max(worst, rep.D_max)
        worst_exact = max(worst_exact, rep.D_exact_max)
    out = [_le("jacobi.kernel", worst, 1e-6 * tol_scale,
               f"{specs} random specs; exact z-algebra gives {worst_exact:.3e}")]

    # degree-6 monomial negative control on the quadratic background
    spec = random_jacobi_spec(grid, rng)
    P1, P2 = spec.P
    cp = chart_pair(grid, P1, P2)
    x, y, z = grid.coords()
    b = S.bump1d(x, 0.0, 0.6) * S.bump1d(y, 0.0, 0.6)
    mu = KForm(grid, 1, np.stack([b * z ** 6, 0 * z, 0 * z]))
    out.append(_ge("jacobi.degree6_control", jacobi_operator(cp, mu).max_norm(grid.interior(4)), 1e-2))

    sc = S.build("integrable", 32)
    cpt = sc.cp
    g = cpt.grid
    worst = 0.0
    for _ in range(3):
        forms = []
        for _ in range(2):
            bb = _bump(g, rng, 0.6)
            forms.append(KForm(g, 1, np.stack([bb * _smooth(g, rng), bb * _smooth(g, rng), 0 * bb])))
        a, c = self_adjointness_gap(cpt, *forms)
        worst = max(worst, abs(a - c))
    out.append(_le("jacobi.self_adjoint", worst, 1e-8 * tol_scale, "T = d/dz torus, random bump 1-forms"))

    nz = 61
    zg = ChartGrid((8, 8, nz), (1.0, 1.0, 1.0), (False, False, False), (-0.5, -0.5, -0.5))
    ld = np.longdouble
    h = ld(1) / ld(nz - 1)
    zl = np.broadcast_to(ld(-0.5) + np.arange(nz).astype(ld) * h, zg.sizes)
    worst = 0.0
    for lam in (1.0, 8.0):
        for coeffs in ((1, 0, 0, 0, 0, 0), (0, 1, 0, 0, 0, 0), (0, 0, 1, 1, 0, 0), (0, 0, 0, 0, 1, 1)):
            p = eigen_family(zl, lam, coeffs)
            r1, r2 = eigen_residual(zg, p, 0.5 * p, lam)
            worst = max(worst, float(np.max(np.abs(r1))), float(np.max(np.abs(r2))))
    out.append(_le("jacobi.eigen_family", worst, 1e-5 * tol_scale,
                   f"lambda in (1, 8), {nz} z-points on [-0.5, 0.5], extended-precision samples"))
    return out


# --- 11: twisted and warped products --------------------------------------------------

def twisted_products(tol_scale=1.0, n=64) -> list[CheckResult]:
    from .critical import umbilic_system_residuals
    out = []
    for name in ("warped", "twisted_product", "twisted"):
        sc = S.build(name, n)
        cp = sc.cp
        fd = frenet(cp, sc.k_min)
        sfd = second_fundamental(cp, fd)
        region = S.erode(fd.valid, sc.mask_margin)
        r1, r2 = umbilic_system_residuals(cp, fd, 0.0, sfd)
        rmax = max(float(np.max(np.abs(r1[region]))), float(np.max(np.abs(r2[region]))))
        tau = float(np.max(np.abs(fd.tau[region])))
        if name == "twisted":
            out.append(_ge(f"products.{name}.tau", tau, 10 * 1e-6 * tol_scale,
                           "non-factorizable warp: torsion stays away from zero"))
            continue
        out.append(_le(f"products.{name}.umbilic", rmax, 1e-6 * tol_scale))
        out.append(_le(f"products.{name}.tau", tau, 1e-6 * tol_scale))
        if name == "warped":
            out.append(_le("products.warped.gv", abs(gv_direct(cp.pair)), 1e-8 * tol_scale))
    return out


# --- 12: determinism -----------------------------------------------------------------

def determinism(tol_scale=1.0) -> list[CheckResult]:
    import os
    from .report import RunConfig, render_json, run
    cfg = RunConfig(verb="variation", scenario="tilted", grid=(32, 32, 32), timestamp=False)
    blobs = []
    old = os.environ.get("GVLAB_THREADS")
    try:
        for threads in ("1", "4", "1", "4"):
            os.environ["GVLAB_THREADS"] = threads
            blobs.append(render_json(run(cfg)))
    finally:
        if old is None:
            os.environ.pop("GVLAB_THREADS", None)
        else:
            os.environ["GVLAB_THREADS"] = old
    same = all(b == blobs[0] for b in blobs)
    return [CheckResult("determinism.bytes", same, float(len(set(blobs))), 1.0,
                        "variation report on tilted 32^3 with GVLAB_THREADS in (1, 4), twice each")]


REGISTRY: dict[str, Callable[..., list[CheckResult]]] = {
    "calculus": calculus,
    "contact_critical": contact_critical,
    "eta_metric_free": eta_metric_free,
    "reinhart_wood": reinhart_wood,
    "variation_formulas": variation_formulas,
    "rescale_invariance": rescale_invariance,
    "criticality": criticality,
    "metric_gradient": metric_gradient,
    "saddle": saddle,
    "jacobi_kernel": jacobi_kernel,
    "twisted_products": twisted_products,
    "determinism": determinism,
}

# acceptance criterion number -> check name
ACCEPTANCE = {i + 1: name for i, name in enumerate(REGISTRY)}
