"""The Jacobi operator D = *(L_T)^2 d on 1-forms and its polynomial kernel candidates.

Coordinates (x1, x2, z) with T = d/dz and omega = P1 dx1 + P2 dx2 + dz.  A
variation mu = p1 dx1 + p2 dx2 has

    (L_T)^2 d mu = -p2_333 dx2^dz + p1_333 dz^dx1 + (p2_1 - p1_2)_33 dx1^dx2

so on a chart the kernel of D is spelled out in z-polynomials.  Coefficients
are handled exactly as polynomials in z whose coefficients are fields on
(x1, x2), stored with shape (n1, n2, 1) so they broadcast against the grid.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .calculus import (ChartGrid, GridError, KForm, MetricField, VectorField, exterior_d,
                       hodge_star, integrate_3form, lie_derivative, partial, wedge)
from .geometry import CompatiblePair, DistributionPair, PairError


class ZPoly:
    """Polynomial in z with field-valued coefficients: sum_j coef[j] z^j."""

    __slots__ = ("coef",)

    def __init__(self, coef):
        self.coef = np.asarray(coef, dtype=float)

    @property
    def degree(self) -> int:
        return self.coef.shape[0] - 1

    def _pad(self, other: "ZPoly"):
        n = max(self.coef.shape[0], other.coef.shape[0])
        pad = lambda c: np.concatenate([c, np.zeros((n - c.shape[0],) + c.shape[1:])]) if c.shape[0] < n else c
        a, b = np.broadcast_arrays(pad(self.coef), pad(other.coef))
        return a, b

    def __add__(self, other: "ZPoly") -> "ZPoly":
        a, b = self._pad(other)
        return ZPoly(a + b)

    def __sub__(self, other: "ZPoly") -> "ZPoly":
        a, b = self._pad(other)
        return ZPoly(a - b)

    def __mul__(self, other) -> "ZPoly":
        if not isinstance(other, ZPoly):
            return ZPoly(self.coef * other)
        n, m = self.coef.shape[0], other.coef.shape[0]
        shape = np.broadcast_shapes(self.coef.shape[1:], other.coef.shape[1:])
        out = np.zeros((n + m - 1,) + shape)
        for i in range(n):
            for j in range(m):
                out[i + j] += self.coef[i] * other.coef[j]
        return ZPoly(out)

    __rmul__ = __mul__

    def dz(self, times: int = 1) -> "ZPoly":
        c = self.coef
        for _ in range(times):
            if c.shape[0] == 1:
                c = np.zeros_like(c)
            else:
                c = c[1:] * np.arange(1, c.shape[0]).reshape((-1,) + (1,) * (c.ndim - 1))
        return ZPoly(c)

    def dx(self, grid: ChartGrid, axis: int) -> "ZPoly":
        """Numerical derivative of every coefficient along x1 (axis 0) or x2 (axis 1)."""
        return ZPoly(partial(grid, self.coef, axis))

    def __call__(self, z) -> np.ndarray:
        """Horner evaluation; z broadcasts against the coefficient fields."""
        out = np.zeros(np.broadcast_shapes(self.coef.shape[1:], np.shape(z)))
        for c in self.coef[::-1]:
            out = out * z + c
        return out

    def max_abs_coef(self) -> float:
        return float(np.max(np.abs(self.coef))) if self.coef.size else 0.0


def _field(grid: ChartGrid, v) -> np.ndarray:
    """A field on (x1, x2), shaped (n1, n2, 1); accepts scalars, (n1, n2) and (n1, n2, 1)."""
    v = np.asarray(v, dtype=float)
    if v.ndim == 3:
        v = v[..., 0]
    return np.array(np.broadcast_to(v, grid.sizes[:2])).reshape(grid.sizes[:2] + (1,))


@dataclass(frozen=True)
class JacobiFieldSpec:
    """Background P_i = sum_j C[i, j] z^j (j <= 2) and variation p_i = sum_j c[i, j] z^j (j <= 5).

    Indices are zero-based: C[0] belongs to P1 and c[1, 5] is the coefficient
    written c25 in the usual numbering.
    """

    grid: ChartGrid
    C: np.ndarray = field(repr=False)  # (2, 3, n1, n2, 1)
    c: np.ndarray = field(repr=False)  # (2, 6, n1, n2, 1)
    tol: float = 1e-12

    @classmethod
    def from_free(cls, grid: ChartGrid, C10, C11, C12, C22, low, c25) -> "JacobiFieldSpec":
        """Complete the background and the derived coefficients from the free data.

        ``low`` is a (2, 3) nested sequence of fields c_{i,0..2}.
        """
        f = lambda v: _field(grid, v)
        C10, C11, C12, C22, c25 = map(f, (C10, C11, C12, C22, c25))
        _check_nonzero(C12, "C12")
        _check_nonzero(C22, "C22")
        C20 = C10 * C22 / C12
        C21 = C22 * C11 / C12
        C = np.stack([np.stack([C10, C11, C12]), np.stack([C20, C21, C22])])
        c = np.zeros((2, 6) + C10.shape)
        for i in range(2):
            for j in range(3):
                c[i, j] = f(low[i][j])
        c[0, 3] = -10 * c25 * C10 / C22
        c[0, 4] = -2.5 * c25 * C11 / C22
        c[1, 3] = 10 * c25 * C20 / C22
        c[1, 4] = 2.5 * c25 * C21 / C22
        c[0, 5] = -c25 * C12 / C22
        c[1, 5] = c25
        return cls(grid, C, c)

    def __post_init__(self):
        C, c, tol = self.C, self.c, self.tol
        _check_nonzero(C[0, 2], "C12")
        _check_nonzero(C[1, 2], "C22")
        checks = {
            "C20 = C10 C22/C12": C[1, 0] - C[0, 0] * C[1, 2] / C[0, 2],
            "C21 = C22 C11/C12": C[1, 1] - C[1, 2] * C[0, 1] / C[0, 2],
            "c13 = -10 c25 C10/C22": c[0, 3] + 10 * c[1, 5] * C[0, 0] / C[1, 2],
            "c14 = -(5/2) c25 C11/C22": c[0, 4] + 2.5 * c[1, 5] * C[0, 1] / C[1, 2],
            "c23 = 10 c25 C20/C22": c[1, 3] - 10 * c[1, 5] * C[1, 0] / C[1, 2],
            "c24 = (5/2) c25 C21/C22": c[1, 4] - 2.5 * c[1, 5] * C[1, 1] / C[1, 2],
            "c15 = -c25 C12/C22": c[0, 5] + c[1, 5] * C[0, 2] / C[1, 2],
        }
        for name, r in checks.items():
            err = float(np.max(np.abs(r)))
            if err > tol * max(1.0, float(np.max(np.abs(c))), float(np.max(np.abs(C)))):
                raise PairError(f"Jacobi field spec violates {name} (error {err:.3e})")

    @property
    def P(self) -> tuple[ZPoly, ZPoly]:
        return ZPoly(self.C[0]), ZPoly(self.C[1])

    @property
    def p(self) -> tuple[ZPoly, ZPoly]:
        return ZPoly(self.c[0]), ZPoly(self.c[1])


def _check_nonzero(v: np.ndarray, name: str, floor: float = 1e-3):
    m = float(np.min(np.abs(v)))
    if m < floor:
        raise PairError(f"{name} must stay away from zero on the chart (min |{name}| = {m:.3e})")


def coefficient_equations(spec: JacobiFieldSpec) -> list[np.ndarray]:
    """The five z^i coefficients of P1 q2_3 + P2 q1_3 (q_i = p_i_33), each divided by
    its common integer factor.  They read, for i = 0..4,

        C10 c23 + C20 c13
        4 C10 c24 + C11 c23 + 4 C20 c14 + C21 c13
        10 C10 c25 + 4 C11 c24 + C12 c23 + 10 C20 c15 + 4 C21 c14 + C22 c13
        5 C11 c25 + 2 C12 c24 + 5 C21 c15 + 2 C22 c14
        C12 c25 + C22 c15
    """
    P1, P2 = spec.P
    p1, p2 = spec.p
    poly = P1 * p2.dz(3) + P2 * p1.dz(3)
    factors = (6, 6, 6, 12, 60)
    coef = poly.coef
    out = []
    for i, k in enumerate(factors):
        out.append(coef[i] / k if i < coef.shape[0] else np.zeros(coef.shape[1:]))
    if coef.shape[0] > len(factors) and np.any(coef[len(factors):] != 0):
        out.append(coef[len(factors):])
    return out


def chart_pair(grid: ChartGrid, P1: ZPoly, P2: ZPoly) -> CompatiblePair:
    """omega = P1 dx1 + P2 dx2 + dz, T = d/dz, g = omega (x) omega + dx1^2 + dx2^2."""
    z = grid.coords()[2]
    one = np.ones(grid.sizes)
    w = np.stack([P1(z) * one, P2(z) * one, one])
    T = np.stack([0 * one, 0 * one, one])
    dp = DistributionPair(KForm(grid, 1, w), VectorField(grid, T))
    g = w[:, None] * w[None, :]
    g[0, 0] += 1.0
    g[1, 1] += 1.0
    return CompatiblePair(dp, MetricField(grid, g))


def jacobi_operator(cp: CompatiblePair, mu: KForm) -> KForm:
    """D mu = *(L_T L_T d mu)."""
    T = cp.pair.T
    a = lie_derivative(T, lie_derivative(T, exterior_d(mu)))
    return hodge_star(cp.g, a)


def exact_lt2_dmu(spec: JacobiFieldSpec) -> tuple[ZPoly, ZPoly, ZPoly]:
    """(L_T)^2 d mu as three z-polynomials (x-derivatives numerical, z exact)."""
    p1, p2 = spec.p
    g = spec.grid
    return p2.dz(3) * -1.0, p1.dz(3), (p2.dx(g, 0) - p1.dx(g, 1)).dz(2)


@dataclass
class JacobiFieldReport:
    mu: KForm = field(repr=False)
    coefficient_residuals: list = field(repr=False)
    constraints_max: float
    D_max: float            # max |D mu| on the interior, stencils in all directions
    D_exact_max: float      # same with exact z-algebra
    tolerance: float
    passed: bool


def build_jacobi_field(spec: JacobiFieldSpec, tol: float = 1e-6, margin: int = 4) -> JacobiFieldReport:
    """Assemble mu = p1 dx1 + p2 dx2, verify the five coefficient equations, and measure D mu.

    The verdict is |D mu| <= tol on the interior.  D mu is reported twice: from the
    grid operator, and from the exact z-algebra contracted with the chart metric.
    """
    grid = spec.grid
    z = grid.coords()[2]
    P1, P2 = spec.P
    p1, p2 = spec.p
    eqs = coefficient_equations(spec)
    scale = max(1.0, float(np.max(np.abs(spec.c))), float(np.max(np.abs(spec.C))))
    cmax = max(float(np.max(np.abs(e))) for e in eqs)
    if cmax > 1e-10 * scale ** 2:
        raise PairError(f"z-coefficient equations fail: max residual {cmax:.3e}")
    cp = chart_pair(grid, P1, P2)
    one = np.ones(grid.sizes)
    mu = KForm(grid, 1, np.stack([p1(z) * one, p2(z) * one, 0 * one]))
    region = grid.interior(margin)
    Dmu = jacobi_operator(cp, mu)
    a = np.stack([q(z) * one for q in exact_lt2_dmu(spec)])
    D_exact = np.einsum("ij...,j...->i...", cp.g.g, a) / cp.g.sqrt_det
    dmax = Dmu.max_norm(region)
    emax = float(np.max(np.abs(D_exact[(slice(None),) + region])))
    return JacobiFieldReport(mu, eqs, cmax, dmax, emax, tol, dmax <= tol)


def eigen_residual(grid: ChartGrid, p1: np.ndarray, p2: np.ndarray, lam: float,
                   d: np.ndarray | float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """p_(6) - (lam^2/d) p for both components, along z, at interior z-points.

    The sixth derivative is the fourth-order second-difference stencil applied
    three times, so the result drops six points at each z end.  The arithmetic
    follows the dtype of p: a sixth difference amplifies input rounding by
    roughly 30/h^6, and extended-precision input pushes that floor down.
    """
    if grid.periodic[2]:
        raise GridError("eigen_residual needs a bounded z-axis")
    nz = grid.sizes[2]
    if nz < 13:
        raise GridError(f"sixth z-difference needs at least 13 z-points, got {nz}")
    if np.any(np.asarray(d) <= 0):
        raise ValueError("d must be positive")
    dt = np.result_type(p1, p2)
    h = dt.type(grid.extents[2]) / dt.type(nz - 1)
    c = dt.type(12) * h * h

    def d2(f):
        return (-f[..., :-4] + 16 * f[..., 1:-3] - 30 * f[..., 2:-2] + 16 * f[..., 3:-1] - f[..., 4:]) / c

    dd = np.asarray(d)
    if dd.ndim == 3:
        dd = dd[..., 6:-6]
    out = []
    for p in (np.asarray(p1, dtype=dt), np.asarray(p2, dtype=dt)):
        out.append(d2(d2(d2(p))) - (dt.type(lam) ** 2 / dd) * p[..., 6:-6])
    return out[0], out[1]


def eigen_family(z, lam: float, coeffs=(1, 0, 0, 0, 0, 0)):
    """The six-term exponential / trigonometric solution of p_(6) = lam^2 p (d = 1).

    coeffs weight e^{rz}, e^{-rz}, e^{rz/2} cos(sz), e^{-rz/2} cos(sz),
    e^{rz/2} sin(sz), e^{-rz/2} sin(sz) with r = |lam|^(1/3), s = (sqrt 3/2) r.
    Works in the dtype of z.
    """
    z = np.asarray(z)
    t = z.dtype.type
    r = t(abs(lam)) ** (t(1) / t(3))
    s = np.sqrt(t(3)) / t(2) * r
    terms = (np.exp(r * z), np.exp(-r * z),
             np.exp(r * z / 2) * np.cos(s * z), np.exp(-r * z / 2) * np.cos(s * z),
             np.exp(r * z / 2) * np.sin(s * z), np.exp(-r * z / 2) * np.sin(s * z))
    return sum(t(a) * f for a, f in zip(coeffs, terms) if a)


def compatibility_residual(grid: ChartGrid, p1, p2, P1, P2) -> np.ndarray:
    """q2_1 - q1_2 - P1 q2_3 - P2 q1_3 with q_i = p_i_33 (all derivatives numerical)."""
    d = lambda f, a: partial(grid, f, a)
    q1 = d(d(p1, 2), 2)
    q2 = d(d(p2, 2), 2)
    return d(q2, 0) - d(q1, 1) - P1 * d(q2, 2) - P2 * d(q1, 2)


def pairing(cp: CompatiblePair, a: KForm, b: KForm) -> float:
    """int a ^ *b = int g(a, b) dV_g for 1-forms."""
    return integrate_3form(wedge(a, hodge_star(cp.g, b)))


def self_adjointness_gap(cp: CompatiblePair, mu: KForm, nu: KForm) -> tuple[float, float]:
    """(<D mu, nu>, <D nu, mu>)."""
    return pairing(cp, jacobi_operator(cp, mu), nu), pairing(cp, jacobi_operator(cp, nu), mu)
