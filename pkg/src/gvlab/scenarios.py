"""Catalog of analytic test pairs.

Every scenario builds a DistributionPair on its grid and, where it has one,
a compatible metric.  ``truth`` records what the checks compare against.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import ndimage

from .calculus import ChartGrid, KForm, MetricField, VectorField
from .geometry import CompatiblePair, DistributionPair, build_compatible_metric


@dataclass
class Scenario:
    name: str
    grid: ChartGrid
    pair: DistributionPair
    metric: CompatiblePair | None
    truth: str
    k_min: float = 1e-8
    mask_margin: int = 0
    params: dict = field(default_factory=dict)
    integrable: bool = False
    geodesic: bool = False

    @property
    def cp(self) -> CompatiblePair:
        if self.metric is None:
            self.metric = build_compatible_metric(self.pair)
        return self.metric


def erode(mask: np.ndarray, margin: int, periodic=(True, True, True)) -> np.ndarray:
    """Points whose whole (2*margin+1)^3 neighbourhood lies in the mask."""
    if margin <= 0:
        return mask
    m = mask.astype(np.uint8)
    for ax in range(3):
        m = ndimage.minimum_filter1d(m, 2 * margin + 1, axis=ax,
                                     mode="wrap" if periodic[ax] else "constant", cval=0)
    return m.astype(bool)


def bump1d(x: np.ndarray, center: float, half_width: float) -> np.ndarray:
    """Raised cosine, C^1, supported on |x - center| < half_width."""
    s = (x - center) / half_width
    return np.where(np.abs(s) < 1, 0.5 * (1 + np.cos(np.pi * s)), 0.0) ** 2


def bump3d(grid: ChartGrid, center=None, support: float = 0.5) -> np.ndarray:
    """Tensor-product bump covering the central `support` fraction of each axis."""
    coords = grid.coords()
    out = np.ones(grid.sizes)
    for a in range(3):
        lo, ext = grid.origin[a], grid.extents[a]
        c = lo + ext / 2 if center is None else center[a]
        out = out * bump1d(coords[a], c, support * ext / 2)
    return out


def _unit_pair(grid: ChartGrid, v: np.ndarray) -> DistributionPair:
    """T = v/|v| with omega its Euclidean dual; the flat metric is compatible."""
    T = v / np.sqrt(np.sum(v * v, axis=0))
    return DistributionPair(KForm(grid, 1, T), VectorField(grid, T))


def contact(n=64, **_) -> Scenario:
    grid = ChartGrid.torus(n)
    x, y, z = grid.coords()
    v = np.stack([np.cos(z), -np.sin(z), 0 * z])
    dp = DistributionPair(KForm(grid, 1, v), VectorField(grid, v))
    cp = CompatiblePair(dp, MetricField.euclidean(grid))
    return Scenario("contact", grid, dp, cp,
                    "Reeb field of cos z dx - sin z dy: eta = 0, gv = 0, geodesic T",
                    geodesic=True)


def foliation(n=64, **_) -> Scenario:
    grid = ChartGrid.torus(n)
    z = grid.coords()[2]
    one = np.ones_like(z)
    w = np.stack([0 * z, 0 * z, one])
    dp = DistributionPair(KForm(grid, 1, w), VectorField(grid, w.copy()))
    cp = CompatiblePair(dp, MetricField.euclidean(grid))
    return Scenario("foliation", grid, dp, cp, "planar foliation dz: everything vanishes",
                    integrable=True, geodesic=True)


def tilted(n=64, a=0.5, delta=0.3, eps=0.2, **_) -> Scenario:
    """Helical unit field with transverse modulation; non-integrable, k > 0 everywhere."""
    grid = ChartGrid.torus(n)
    x, y, z = grid.coords()
    ph = z + delta * np.sin(x)
    v = np.stack([a * np.cos(ph), a * np.sin(ph), 1 + eps * np.cos(y)])
    dp = _unit_pair(grid, v)
    cp = CompatiblePair(dp, MetricField.euclidean(grid))
    return Scenario("tilted", grid, dp, cp, "Reinhart-Wood oracle for gv",
                    k_min=0.05 * a / (1 + a * a), params=dict(a=a, delta=delta, eps=eps))


def tilted_flat(n=64, eps=0.3, **_) -> Scenario:
    """T = (d3 + eps cos(x1) d2)/|.| in the flat metric."""
    grid = ChartGrid.torus(n)
    x, y, z = grid.coords()
    v = np.stack([0 * x, eps * np.cos(x), 1 + 0 * x])
    dp = _unit_pair(grid, v)
    return Scenario("tilted_flat", grid, dp, CompatiblePair(dp, MetricField.euclidean(grid)),
                    "closed-form curvature and torsion", params=dict(eps=eps))


def integrable(n=64, b=0.15, c=0.4, **_) -> Scenario:
    """Foliation dF/F_z with F = z + c x1 + b G(x), G periodic; T = d3."""
    grid = ChartGrid.torus(n)
    x, y, z = grid.coords()
    G = np.sin(x) * np.cos(y + z) + 0.5 * np.sin(z - y)
    Gx = np.cos(x) * np.cos(y + z)
    Gy = -np.sin(x) * np.sin(y + z) - 0.5 * np.cos(z - y)
    Gz = -np.sin(x) * np.sin(y + z) + 0.5 * np.cos(z - y)
    Fz = 1 + b * Gz
    w = np.stack([(c + b * Gx) / Fz, b * Gy / Fz, np.ones_like(z)])
    T = np.stack([0 * z, 0 * z, np.ones_like(z)])
    dp = DistributionPair(KForm(grid, 1, w), VectorField(grid, T))
    return Scenario("integrable", grid, dp, None, "integrable: omega ^ d omega = 0",
                    k_min=0.02 * b, mask_margin=4, params=dict(b=b, c=c), integrable=True)


def quadratic_chart(n=64, cubic=0.0, **_) -> Scenario:
    """Bounded chart, omega = dz + P1 dx1 + P2 dx2 with P_i quadratic in z.

    The coefficients obey the two integrability relations; ``cubic`` adds
    cubic * z^3 to P1 (and the matching integrable completion is dropped,
    this is the negative control for the (L_T)^3 omega criterion).
    """
    grid = ChartGrid.chart(n, 1.0)
    x, y, z = grid.coords()
    C = quadratic_background(x, y)
    P1 = C["10"] + C["11"] * z + C["12"] * z ** 2 + cubic * z ** 3
    P2 = C["20"] + C["21"] * z + C["22"] * z ** 2
    w = np.stack([P1, P2, np.ones_like(z)])
    T = np.stack([0 * z, 0 * z, np.ones_like(z)])
    dp = DistributionPair(KForm(grid, 1, w), VectorField(grid, T))
    return Scenario("quadratic_chart" if cubic == 0 else "cubic_chart", grid, dp, None,
                    "(L_T)^3 omega = P1_333 dx1 + P2_333 dx2", params=dict(cubic=cubic))


def quadratic_background(x, y) -> dict[str, np.ndarray]:
    """Constant coefficient background obeying C20 = C10 C22/C12, C21 = C22 C11/C12."""
    C10, C11, C12, C22 = 0.3, -0.2, 0.5, 0.4
    one = np.ones_like(x)
    return {"10": C10 * one, "11": C11 * one, "12": C12 * one, "22": C22 * one,
            "20": C10 * C22 / C12 * one, "21": C22 * C11 / C12 * one}


def twisted(n=64, factorizable=False, warped=False, amp=0.3, **_) -> Scenario:
    """Twisted product T^2 x_phi S^1: g = dx1^2 + dx2^2 + phi^2 dz^2, T = d3/phi."""
    grid = ChartGrid.torus(n)
    x, y, z = grid.coords()
    if warped:
        phi = 1 + amp * np.sin(x) * np.cos(y)
        name = "warped"
    elif factorizable:
        phi = (1 + amp * np.sin(x) * np.cos(y)) * (1 + 0.5 * amp * np.cos(z))
        name = "twisted_product"
    else:
        phi = 1 + amp * np.sin(x) * np.cos(y) * (1 + np.sin(z)) + 0.5 * amp * np.sin(y + z)
        name = "twisted"
    zero = 0 * z
    w = np.stack([zero, zero, phi])
    T = np.stack([zero, zero, 1 / phi])
    dp = DistributionPair(KForm(grid, 1, w), VectorField(grid, T))
    one = np.ones_like(z)
    g = MetricField.from_components(grid, one, zero, zero, one, zero, phi ** 2)
    return Scenario(name, grid, dp, CompatiblePair(dp, g),
                    "totally geodesic leaves; critical iff phi factorizes",
                    k_min=0.25 * amp, mask_margin=4,
                    params=dict(amp=amp, factorizable=factorizable or warped), integrable=True)


def contact_chart(n=64, **_) -> Scenario:
    """omega = dx3 - x2 dx1, T = d3 on the bounded chart [-1, 1]^3."""
    grid = ChartGrid.chart(n, 1.0)
    x, y, z = grid.coords()
    w = np.stack([-y, 0 * y, np.ones_like(y)])
    T = np.stack([0 * y, 0 * y, np.ones_like(y)])
    dp = DistributionPair(KForm(grid, 1, w), VectorField(grid, T))
    return Scenario("contact_chart", grid, dp, None, "Darboux chart of a contact form")


def rectifying(n=64, delta=0.5, **_) -> Scenario:
    """T = (cos th, 0, sin th), th = z + delta sin x: planar T-curves, so tau = h_BN = 0.

    The plane field is integrable here (nothing depends on y).
    """
    grid = ChartGrid.torus(n)
    x, y, z = grid.coords()
    th = z + delta * np.sin(x)
    v = np.stack([np.cos(th), 0 * th, np.sin(th)])
    dp = _unit_pair(grid, v)
    return Scenario("rectifying", grid, dp, CompatiblePair(dp, MetricField.euclidean(grid)),
                    "planar T-curves: span(T, B) integrable, gv = 0", k_min=0.05,
                    params=dict(delta=delta), integrable=True)


CATALOG: dict[str, Callable[..., Scenario]] = {
    "contact": contact,
    "foliation": foliation,
    "tilted": tilted,
    "tilted_flat": tilted_flat,
    "integrable": integrable,
    "quadratic_chart": quadratic_chart,
    "cubic_chart": lambda n=64, **kw: quadratic_chart(n, cubic=kw.pop("cubic", 0.5), **kw),
    "warped": lambda n=64, **kw: twisted(n, warped=True, **kw),
    "twisted": twisted,
    "twisted_product": lambda n=64, **kw: twisted(n, factorizable=True, **kw),
    "contact_chart": contact_chart,
    "rectifying": rectifying,
}


def build(name: str, n=64, **params) -> Scenario:
    try:
        factory = CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown scenario {name!r}; known: {', '.join(sorted(CATALOG))}") from None
    return factory(n, **params)
