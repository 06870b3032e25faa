"""Riemannian apparatus for a plane field with a transverse unit normal.

Frenet data of the T-curves, the non-symmetric second fundamental form of
ker(omega), the integrability tensor and the divergence, all evaluated
pointwise on a grid with fourth-order differences.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .calculus import (ChartGrid, GridError, KForm, MetricField, VectorField,
                       SingularMetricError, _cross, _dot, gradient, partial)

PAIR_TOL = 1e-12


class PairError(ValueError):
    pass


@dataclass(frozen=True)
class DistributionPair:
    """A 1-form omega and a vector field T with omega(T) = 1."""

    omega: KForm
    T: VectorField
    tol: float = PAIR_TOL

    def __post_init__(self):
        if self.omega.degree != 1:
            raise PairError("omega must be a 1-form")
        if self.omega.grid != self.T.grid:
            raise PairError("omega and T live on different grids")
        err = float(np.max(np.abs(_dot(self.omega.comps, self.T.comps) - 1.0)))
        if err > self.tol:
            raise PairError(f"omega(T) deviates from 1 by {err:.3e}")

    @property
    def grid(self) -> ChartGrid:
        return self.omega.grid


class Connection:
    """Levi-Civita connection of a metric field; Christoffel symbols are cached."""

    def __init__(self, g: MetricField):
        self.metric = g
        self.grid = g.grid

    @cached_property
    def gamma(self) -> np.ndarray:
        return christoffel(self.metric)

    def nabla(self, Z: np.ndarray, W: np.ndarray) -> np.ndarray:
        """Components of nabla_Z W."""
        grid = self.grid
        out = np.einsum("i...,ki...->k...", Z, np.stack([gradient(grid, W[k]) for k in range(3)]))
        return out + np.einsum("kij...,i...,j...->k...", self.gamma, Z, W)


def christoffel(g: MetricField) -> np.ndarray:
    """Gamma[k, i, j] = Gamma^k_{ij}."""
    grid = g.grid
    # dg[l, i, j] = d_l g_ij
    dg = np.stack([partial(grid, g.g, l) for l in range(3)])
    # lowered symbols Gamma_{l,ij} = (d_i g_lj + d_j g_li - d_l g_ij)/2
    low = 0.5 * (np.einsum("ilj...->lij...", dg) + np.einsum("jli...->lij...", dg) - dg)
    del dg
    return np.einsum("kl...,lij...->kij...", g.inv, low)


def covariant_derivative(g: MetricField | Connection, Z: VectorField, W: VectorField) -> VectorField:
    conn = g if isinstance(g, Connection) else Connection(g)
    return VectorField(Z.grid, conn.nabla(Z.comps, W.comps))


def bracket(grid: ChartGrid, Z: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Lie bracket [Z, W] of component arrays."""
    dW = np.stack([gradient(grid, W[k]) for k in range(3)])
    dZ = np.stack([gradient(grid, Z[k]) for k in range(3)])
    return np.einsum("i...,ki...->k...", Z, dW) - np.einsum("i...,ki...->k...", W, dZ)


def derivative_along(grid: ChartGrid, Z: np.ndarray, f: np.ndarray) -> np.ndarray:
    return sum(Z[i] * partial(grid, f, i) for i in range(3))


def divergence(g: MetricField, Z: np.ndarray) -> np.ndarray:
    grid = g.grid
    s = g.sqrt_det
    return sum(partial(grid, s * Z[i], i) for i in range(3)) / s


@dataclass
class CompatiblePair:
    pair: DistributionPair
    g: MetricField
    tol: float = PAIR_TOL

    def __post_init__(self):
        T = self.pair.T.comps
        err_flat = float(np.max(np.abs(self.g.lower(T) - self.pair.omega.comps)))
        err_unit = float(np.max(np.abs(self.g.inner(T, T) - 1.0)))
        if err_flat > self.tol or err_unit > self.tol:
            raise PairError(f"metric not compatible: |T_flat - omega| = {err_flat:.3e}, "
                            f"|g(T,T) - 1| = {err_unit:.3e}")

    @property
    def grid(self) -> ChartGrid:
        return self.g.grid

    @property
    def T(self) -> np.ndarray:
        return self.pair.T.comps

    @property
    def omega(self) -> KForm:
        return self.pair.omega

    @cached_property
    def connection(self) -> Connection:
        return Connection(self.g)


def seed_metric(grid: ChartGrid, amplitude: float = 0.0) -> MetricField:
    """Euclidean metric plus a fixed smooth symmetric perturbation."""
    x, y, z = grid.coords()
    p = np.array([
        [np.sin(x + z), np.cos(y) * np.sin(x), 0.5 * np.sin(y - z)],
        [np.cos(y) * np.sin(x), np.cos(z + y), np.sin(x) * np.cos(z)],
        [0.5 * np.sin(y - z), np.sin(x) * np.cos(z), np.cos(x - y)],
    ])
    s = np.eye(3)[:, :, None, None, None] + amplitude * p
    return MetricField(grid, s)


def build_compatible_metric(dp: DistributionPair, seed: str = "euclidean",
                            amplitude: float = 0.2) -> CompatiblePair:
    """g = omega (x) omega + s(P., P.) with P the projection onto ker omega along T."""
    grid = dp.grid
    if seed == "euclidean":
        amplitude = 0.0
    elif seed != "perturbed":
        raise ValueError(f"unknown seed {seed!r}")
    try:
        s = seed_metric(grid, amplitude)
    except SingularMetricError as exc:
        raise PairError(f"seed perturbation amplitude {amplitude} breaks positivity: {exc}") from exc
    w, T = dp.omega.comps, dp.T.comps
    # P[a, i] = delta_ai - T^a w_i
    P = np.eye(3)[:, :, None, None, None] - T[:, None] * w[None, :]
    gd = np.einsum("ai...,ab...,bj...->ij...", P, s.g, P)
    g = gd + w[:, None] * w[None, :]
    return CompatiblePair(dp, MetricField(grid, g))


@dataclass
class FrenetData:
    k: np.ndarray
    N: np.ndarray = field(repr=False)
    B: np.ndarray = field(repr=False)
    tau: np.ndarray = field(repr=False)
    valid: np.ndarray = field(repr=False)
    accel: np.ndarray = field(repr=False)

    @property
    def mask_fraction(self) -> float:
        return float(self.valid.mean())


def complete_frame(g: MetricField, T: np.ndarray, E1: np.ndarray) -> np.ndarray:
    """Unit field B with (T, E1, B) a positively oriented g-orthonormal triple."""
    low = g.sqrt_det * _cross(T, E1)
    return g.raise_(low)


def frenet(cp: CompatiblePair, k_min: float = 1e-8) -> FrenetData:
    """Curvature, normal, binormal and torsion of the T-curves.

    N, B and tau are set to zero where k < k_min and must not be read there.
    """
    g, T = cp.g, cp.T
    conn = cp.connection
    acc = conn.nabla(T, T)
    k = np.sqrt(np.maximum(g.inner(acc, acc), 0.0))
    valid = k >= k_min
    safe = np.where(valid, k, 1.0)
    N = np.where(valid, acc / safe, 0.0)
    B = np.where(valid, complete_frame(g, T, N), 0.0)
    tau = np.where(valid, g.inner(conn.nabla(T, N), B), 0.0)
    return FrenetData(k=k, N=N, B=B, tau=tau, valid=valid, accel=acc)


def auxiliary_frame(cp: CompatiblePair) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic oriented orthonormal frame of ker omega.

    Gram-Schmidt on the projections of the two coordinate directions with the
    smallest |omega| component (ties to the lower axis index), then completed
    so that (T, E1, E2) is positively oriented.
    """
    g, T = cp.g, cp.T
    w = cp.omega.comps
    grid = cp.grid
    order = np.argsort(np.abs(w), axis=0, kind="stable")
    first = order[0]
    e = np.zeros((3,) + grid.sizes)
    np.put_along_axis(e, first[None], 1.0, axis=0)
    # project along T onto ker omega
    v = e - T * np.take_along_axis(w, first[None], axis=0)
    v = v / np.sqrt(g.inner(v, v))
    return v, complete_frame(g, T, v)


@dataclass
class SecondFundamentalData:
    hNN: np.ndarray = field(repr=False)
    hNB: np.ndarray = field(repr=False)
    hBN: np.ndarray = field(repr=False)
    hBB: np.ndarray = field(repr=False)
    E1: np.ndarray = field(repr=False)
    E2: np.ndarray = field(repr=False)

    @property
    def Tcal(self) -> np.ndarray:
        return 0.5 * (self.hNB - self.hBN)

    @property
    def sigma1(self) -> np.ndarray:
        return self.hNN + self.hBB

    def h(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        """h on D-vectors given by their (E1, E2) coordinates, shape (2, ...)."""
        return (X[0] * (self.hNN * Y[0] + self.hNB * Y[1])
                + X[1] * (self.hBN * Y[0] + self.hBB * Y[1]))


def second_fundamental(cp: CompatiblePair, fd: FrenetData | None = None) -> SecondFundamentalData:
    """h_{X,Y} = g(nabla_X Y, T) = -g(nabla_X T, Y) in the frame (N, B).

    Off the Frenet mask (or with no Frenet data) the auxiliary frame replaces
    (N, B).  Both frames are positively oriented, so the integrability tensor
    and the mean curvature agree between them.
    """
    g, T = cp.g, cp.T
    A1, A2 = auxiliary_frame(cp)
    if fd is None:
        E1, E2 = A1, A2
    else:
        E1 = np.where(fd.valid, fd.N, A1)
        E2 = np.where(fd.valid, fd.B, A2)
    conn = cp.connection
    dT1 = conn.nabla(E1, T)
    dT2 = conn.nabla(E2, T)
    return SecondFundamentalData(
        hNN=-g.inner(dT1, E1), hNB=-g.inner(dT1, E2),
        hBN=-g.inner(dT2, E1), hBB=-g.inner(dT2, E2),
        E1=E1, E2=E2,
    )


def integrability_from_bracket(cp: CompatiblePair, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """g([X, Y], T) / 2, the bracket route to the integrability tensor."""
    return 0.5 * cp.g.inner(bracket(cp.grid, X, Y), cp.T)


def frenet_residuals(cp: CompatiblePair, fd: FrenetData) -> dict[str, np.ndarray]:
    """Pointwise g-norms of the three Frenet equations (zero off the mask)."""
    g, T, conn = cp.g, cp.T, cp.connection
    N, B, k, tau = fd.N, fd.B, fd.k, fd.tau
    r1 = fd.accel - k * N
    r2 = conn.nabla(T, N) + k * T - tau * B
    r3 = conn.nabla(T, B) + tau * N
    norm = lambda v: np.where(fd.valid, np.sqrt(np.maximum(g.inner(v, v), 0)), 0.0)
    return {"TT": norm(r1), "TN": norm(r2), "TB": norm(r3)}


def orientation(cp: CompatiblePair, X, Y, Z) -> np.ndarray:
    """dV_g(X, Y, Z)."""
    return cp.g.sqrt_det * _dot(X, _cross(Y, Z))
