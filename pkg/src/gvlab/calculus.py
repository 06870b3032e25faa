"""Differential forms on structured 3D grids.

Fields live on a tensor-product grid with per-axis periodic or bounded
topology.  Forms are stored by components in the coordinate bases

    degree 1: (dx1, dx2, dx3)
    degree 2: (dx2^dx3, dx3^dx1, dx1^dx2)
    degree 3: dx1^dx2^dx3   (positive orientation)

so that 1-forms and 2-forms both behave like 3-vectors and wedge/interior
products reduce to cross and dot products.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

MIN_POINTS = 8
NCOMP = {0: 1, 1: 3, 2: 3, 3: 1}


class GridError(ValueError):
    pass


class SingularMetricError(ValueError):
    """Raised when a metric fails to be positive definite somewhere."""

    def __init__(self, message: str, location: tuple[int, ...] | None = None):
        super().__init__(message)
        self.location = location


@dataclass(frozen=True)
class ChartGrid:
    sizes: tuple[int, int, int]
    extents: tuple[float, float, float] = (2 * math.pi,) * 3
    periodic: tuple[bool, bool, bool] = (True, True, True)
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.sizes)
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "extents", tuple(float(e) for e in self.extents))
        object.__setattr__(self, "periodic", tuple(bool(p) for p in self.periodic))
        object.__setattr__(self, "origin", tuple(float(o) for o in self.origin))
        if len(sizes) != 3 or len(self.extents) != 3 or len(self.periodic) != 3:
            raise GridError("grids are three-dimensional")
        if min(sizes) < MIN_POINTS:
            raise GridError(f"every axis needs at least {MIN_POINTS} points, got {sizes}")
        if min(self.extents) <= 0:
            raise GridError("extents must be positive")

    @classmethod
    def torus(cls, n, extent: float = 2 * math.pi) -> "ChartGrid":
        sizes = (n, n, n) if np.isscalar(n) else tuple(n)
        return cls(sizes, (extent,) * 3, (True, True, True))

    @classmethod
    def chart(cls, n, half_width: float = 1.0) -> "ChartGrid":
        """Bounded cube [-half_width, half_width]^3."""
        sizes = (n, n, n) if np.isscalar(n) else tuple(n)
        hw = (half_width,) * 3 if np.isscalar(half_width) else tuple(half_width)
        return cls(sizes, tuple(2 * w for w in hw), (False,) * 3, tuple(-w for w in hw))

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.sizes

    @property
    def fully_periodic(self) -> bool:
        return all(self.periodic)

    @property
    def spacing(self) -> tuple[float, float, float]:
        return tuple(
            e / n if p else e / (n - 1)
            for e, n, p in zip(self.extents, self.sizes, self.periodic)
        )

    def axis_coords(self, axis: int) -> np.ndarray:
        n, h, o = self.sizes[axis], self.spacing[axis], self.origin[axis]
        return o + h * np.arange(n)

    def coords(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(np.meshgrid(*(self.axis_coords(a) for a in range(3)), indexing="ij"))

    def weights(self) -> np.ndarray:
        """Quadrature weights: rectangle rule on periodic axes, trapezoid on bounded ones."""
        w1 = []
        for a in range(3):
            w = np.full(self.sizes[a], self.spacing[a])
            if not self.periodic[a]:
                w[0] *= 0.5
                w[-1] *= 0.5
            w1.append(w)
        return w1[0][:, None, None] * w1[1][None, :, None] * w1[2][None, None, :]

    def interior(self, margin: int = 2) -> tuple[slice, slice, slice]:
        """Index slices staying `margin` cells away from bounded edges."""
        return tuple(
            slice(None) if p else slice(margin, n - margin)
            for n, p in zip(self.sizes, self.periodic)
        )

    def zeros(self, *lead: int) -> np.ndarray:
        return np.zeros(tuple(lead) + self.sizes)


@dataclass(frozen=True)
class KForm:
    grid: ChartGrid
    degree: int
    comps: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.degree not in NCOMP:
            raise GridError(f"degree must be 0..3, got {self.degree}")
        c = np.asarray(self.comps, dtype=float)
        if c.shape == self.grid.sizes:
            c = c[None]
        if c.shape != (NCOMP[self.degree],) + self.grid.sizes:
            raise GridError(f"degree-{self.degree} form needs shape "
                            f"{(NCOMP[self.degree],) + self.grid.sizes}, got {c.shape}")
        object.__setattr__(self, "comps", c)

    @property
    def scalar(self) -> np.ndarray:
        """Coefficient array for degree 0 and degree 3 forms."""
        return self.comps[0]

    def __add__(self, other: "KForm") -> "KForm":
        _same(self, other)
        return KForm(self.grid, self.degree, self.comps + other.comps)

    def __sub__(self, other: "KForm") -> "KForm":
        _same(self, other)
        return KForm(self.grid, self.degree, self.comps - other.comps)

    def __neg__(self) -> "KForm":
        return KForm(self.grid, self.degree, -self.comps)

    def __mul__(self, s) -> "KForm":
        return KForm(self.grid, self.degree, self.comps * np.asarray(s))

    __rmul__ = __mul__

    def max_norm(self, region=None) -> float:
        c = self.comps if region is None else self.comps[(slice(None),) + tuple(region)]
        return float(np.max(np.abs(c))) if c.size else 0.0


def _same(a: KForm, b: KForm):
    if a.degree != b.degree or a.grid != b.grid:
        raise GridError("forms must share degree and grid")


@dataclass(frozen=True)
class VectorField:
    grid: ChartGrid
    comps: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.comps, dtype=float)
        if c.shape != (3,) + self.grid.sizes:
            raise GridError(f"vector field needs shape {(3,) + self.grid.sizes}, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise GridError("vector field has non-finite values")
        object.__setattr__(self, "comps", c)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.grid, self.comps + other.comps)

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.grid, self.comps - other.comps)

    def __mul__(self, s) -> "VectorField":
        return VectorField(self.grid, self.comps * np.asarray(s))

    __rmul__ = __mul__

    def __call__(self, f: np.ndarray) -> np.ndarray:
        """Directional derivative Z(f) of a scalar array."""
        return sum(self.comps[i] * partial(self.grid, f, i) for i in range(3))


class MetricField:
    """Symmetric metric tensor per grid point, stored as a full (3, 3, ...) array.

    Construct from the six independent components with :meth:`from_components`
    or from a full symmetric array.  Positive definiteness is checked at
    construction through the leading principal minors.
    """

    def __init__(self, grid: ChartGrid, g: np.ndarray):
        g = np.asarray(g, dtype=float)
        if g.shape != (3, 3) + grid.sizes:
            raise GridError(f"metric needs shape {(3, 3) + grid.sizes}, got {g.shape}")
        g = 0.5 * (g + g.swapaxes(0, 1))
        m1 = g[0, 0]
        m2 = g[0, 0] * g[1, 1] - g[0, 1] ** 2
        det = _det3(g)
        for m in (m1, m2, det):
            bad = ~(m > 0)
            if bad.any():
                loc = tuple(int(i) for i in np.argwhere(bad)[0])
                raise SingularMetricError(f"metric not positive definite at grid index {loc}", loc)
        self.grid = grid
        self.g = g
        self.det = det
        self.sqrt_det = np.sqrt(det)
        self.inv = _inv3(g, det)

    @classmethod
    def from_components(cls, grid, g11, g12, g13, g22, g23, g33) -> "MetricField":
        b = np.broadcast_arrays(*(np.asarray(c, float) + np.zeros(grid.sizes)
                                  for c in (g11, g12, g13, g22, g23, g33)))
        g11, g12, g13, g22, g23, g33 = b
        g = np.array([[g11, g12, g13], [g12, g22, g23], [g13, g23, g33]])
        return cls(grid, g)

    @classmethod
    def euclidean(cls, grid: ChartGrid) -> "MetricField":
        return cls(grid, np.broadcast_to(np.eye(3)[:, :, None, None, None],
                                         (3, 3) + grid.sizes).copy())

    @property
    def components(self) -> tuple[np.ndarray, ...]:
        g = self.g
        return g[0, 0], g[0, 1], g[0, 2], g[1, 1], g[1, 2], g[2, 2]

    def inner(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """g(a, b) for contravariant component arrays of shape (3, ...)."""
        return np.einsum("i...,ij...,j...->...", a, self.g, b)

    def lower(self, v: np.ndarray) -> np.ndarray:
        return np.einsum("ij...,j...->i...", self.g, v)

    def raise_(self, a: np.ndarray) -> np.ndarray:
        return np.einsum("ij...,j...->i...", self.inv, a)


def _det3(m: np.ndarray) -> np.ndarray:
    return (m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
            - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
            + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0]))


def _inv3(m: np.ndarray, det: np.ndarray) -> np.ndarray:
    inv = np.empty_like(m)
    for i in range(3):
        for j in range(3):
            # cofactor of (j, i)
            r = [k for k in range(3) if k != j]
            c = [k for k in range(3) if k != i]
            minor = m[r[0], c[0]] * m[r[1], c[1]] - m[r[0], c[1]] * m[r[1], c[0]]
            inv[i, j] = (-1) ** (i + j) * minor / det
    return inv


# --- differencing -----------------------------------------------------------

_C1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_LEFT0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
_LEFT1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0


def partial(grid: ChartGrid, f: np.ndarray, axis: int) -> np.ndarray:
    """Fourth-order first derivative of ``f`` along ``axis`` (0, 1 or 2).

    Works on arrays whose trailing three axes are the grid; leading axes
    (components) are carried along.
    """
    if axis not in (0, 1, 2):
        raise GridError(f"axis must be 0, 1 or 2, got {axis}")
    f = np.asarray(f, dtype=float)
    ax = f.ndim - 3 + axis
    h = grid.spacing[axis]
    if grid.periodic[axis]:
        out = (np.roll(f, 2, ax) - 8.0 * np.roll(f, 1, ax)
               + 8.0 * np.roll(f, -1, ax) - np.roll(f, -2, ax))
        return out / (12.0 * h)
    f = np.moveaxis(f, ax, -1)
    out = np.empty_like(f)
    out[..., 2:-2] = (f[..., :-4] - 8.0 * f[..., 1:-3] + 8.0 * f[..., 3:-1] - f[..., 4:]) / 12.0
    out[..., 0] = f[..., :5] @ _LEFT0
    out[..., 1] = f[..., :5] @ _LEFT1
    out[..., -1] = -(f[..., -1:-6:-1] @ _LEFT0)
    out[..., -2] = -(f[..., -1:-6:-1] @ _LEFT1)
    return np.moveaxis(out / h, -1, ax)


def gradient(grid: ChartGrid, f: np.ndarray) -> np.ndarray:
    return np.stack([partial(grid, f, a) for a in range(3)])


def _curl(grid, a):
    d = lambda c, ax: partial(grid, a[c], ax)
    return np.stack([d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1)])


def _div(grid, b):
    return partial(grid, b[0], 0) + partial(grid, b[1], 1) + partial(grid, b[2], 2)


# --- exterior algebra -------------------------------------------------------

def exterior_d(alpha: KForm) -> KForm:
    g, k = alpha.grid, alpha.degree
    if k == 0:
        return KForm(g, 1, gradient(g, alpha.scalar))
    if k == 1:
        return KForm(g, 2, _curl(g, alpha.comps))
    if k == 2:
        return KForm(g, 3, _div(g, alpha.comps))
    raise GridError("exterior derivative of a 3-form vanishes identically on a 3-manifold")


def _cross(a, b):
    return np.stack([a[1] * b[2] - a[2] * b[1],
                     a[2] * b[0] - a[0] * b[2],
                     a[0] * b[1] - a[1] * b[0]])


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def wedge(alpha: KForm, beta: KForm) -> KForm:
    p, q = alpha.degree, beta.degree
    if p + q > 3:
        raise GridError(f"wedge of degrees {p} and {q} exceeds 3")
    if alpha.grid != beta.grid:
        raise GridError("forms live on different grids")
    grid = alpha.grid
    if p == 0:
        return KForm(grid, q, alpha.scalar * beta.comps)
    if q == 0:
        return KForm(grid, p, beta.scalar * alpha.comps)
    if p == 1 and q == 1:
        return KForm(grid, 2, _cross(alpha.comps, beta.comps))
    return KForm(grid, 3, _dot(alpha.comps, beta.comps))


def interior_product(Z: VectorField, alpha: KForm) -> KForm:
    grid, k, z = alpha.grid, alpha.degree, Z.comps
    if k == 0:
        raise GridError("interior product of a 0-form is undefined")
    if k == 1:
        return KForm(grid, 0, _dot(z, alpha.comps))
    if k == 2:
        return KForm(grid, 1, _cross(alpha.comps, z))
    return KForm(grid, 2, alpha.scalar * z)


def lie_derivative(Z: VectorField, alpha: KForm) -> KForm:
    """Cartan's formula d(i_Z a) + i_Z(d a)."""
    k = alpha.degree
    if k == 0:
        return KForm(alpha.grid, 0, Z(alpha.scalar))
    out = exterior_d(interior_product(Z, alpha))
    if k < 3:
        out = out + interior_product(Z, exterior_d(alpha))
    return out


def evaluate(alpha: KForm, *vectors: np.ndarray) -> np.ndarray:
    """alpha(X, Y, ...) for contravariant component arrays."""
    k = alpha.degree
    if len(vectors) != k:
        raise GridError(f"degree-{k} form takes {k} vectors")
    if k == 0:
        return alpha.scalar
    if k == 1:
        return _dot(alpha.comps, vectors[0])
    if k == 2:
        return _dot(alpha.comps, _cross(vectors[0], vectors[1]))
    x, y, z = vectors
    return alpha.scalar * _dot(x, _cross(y, z))


def hodge_star(g: MetricField, alpha: KForm) -> KForm:
    """Hodge star with dV_g = sqrt(det g) dx1^dx2^dx3; an involution in dimension 3."""
    grid, k, s = alpha.grid, alpha.degree, g.sqrt_det
    if k == 0:
        return KForm(grid, 3, alpha.scalar * s)
    if k == 1:
        return KForm(grid, 2, s * g.raise_(alpha.comps))
    if k == 2:
        return KForm(grid, 1, g.lower(alpha.comps) / s)
    return KForm(grid, 0, alpha.scalar / s)


def volume_form(g: MetricField) -> KForm:
    return KForm(g.grid, 3, g.sqrt_det)


def sharp(g: MetricField, alpha: KForm) -> VectorField:
    if alpha.degree != 1:
        raise GridError("sharp acts on 1-forms")
    return VectorField(alpha.grid, g.raise_(alpha.comps))


def flat(g: MetricField, Z: VectorField) -> KForm:
    return KForm(Z.grid, 1, g.lower(Z.comps))


def fsum_field(values: np.ndarray) -> float:
    """Correctly rounded sum; independent of traversal order and thread count."""
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())


def integrate(grid: ChartGrid, f: np.ndarray) -> float:
    return fsum_field(grid.weights() * f)


def integrate_3form(alpha: KForm) -> float:
    if alpha.degree != 3:
        raise GridError("only 3-forms integrate over the grid")
    return integrate(alpha.grid, alpha.scalar)


def observed_orders(sizes: Sequence[float], errors: Sequence[float]) -> list[float]:
    """log(e_i/e_{i+1}) / log(n_{i+1}/n_i) for successive refinements."""
    out = []
    for (n0, e0), (n1, e1) in zip(zip(sizes, errors), zip(sizes[1:], errors[1:])):
        if e0 > 0 and e1 > 0:
            out.append(math.log(e0 / e1) / math.log(n1 / n0))
        else:
            out.append(float("nan"))
    return out
