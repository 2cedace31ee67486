"""Meshes, fields, source data and quadrature shared by the rest of the package.

Two geometries are supported:

* :class:`RadialMesh` -- a graded 1D mesh of the radius of a ball ``B_R(0)`` in
  ``R^N``.  Nodes are ``r_i = R (i/n)**g``.  Node ``i`` owns the dual cell
  ``[m_{i-1}, m_i]`` (``m`` the edge midpoints, ``m_{-1} = 0``) and the
  quadrature weight of a node is the exact measure of that spherical shell.
* :class:`CartesianGrid` -- a uniform 2D grid of cells of side ``h`` with a
  boolean mask of interior cells.  Values outside the mask are the homogeneous
  Dirichlet data 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from scipy import ndimage
from scipy.special import gamma


class ConfigurationError(ValueError):
    """Invalid mesh, solver or experiment parameters."""


class DataError(ValueError):
    """Invalid source data (negative values, non-finite entries)."""


class DomainError(ValueError):
    """Argument outside the domain where a formula is defined."""


class PreconditionError(ValueError):
    """A documented precondition of a check does not hold."""


def sphere_area(N: int) -> float:
    """Area of the unit sphere ``S^{N-1}`` in ``R^N``."""
    return 2.0 * math.pi ** (N / 2) / gamma(N / 2)


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class RadialMesh:
    N: int
    R: float
    nodes: np.ndarray
    grading: float = 1.0

    @property
    def n(self) -> int:
        """Number of cells (``len(nodes) - 1``)."""
        return len(self.nodes) - 1

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.nodes[:-1] + self.nodes[1:])

    @property
    def h(self) -> float:
        """Largest cell width."""
        return float(self.widths.max())

    @property
    def shell_volumes(self) -> np.ndarray:
        """Measure of the dual shell of every node (length ``n + 1``)."""
        m = np.concatenate([[0.0], self.midpoints, [self.R]])
        return sphere_area(self.N) * (m[1:] ** self.N - m[:-1] ** self.N) / self.N

    @property
    def size(self) -> int:
        return len(self.nodes)

    def local_width(self, r: float) -> float:
        """Width of the cell containing radius ``r``."""
        i = int(np.clip(np.searchsorted(self.nodes, r) - 1, 0, self.n - 1))
        return float(self.widths[i])


@dataclass(frozen=True, eq=False)
class CartesianGrid:
    """Uniform 2D grid; ``mask[j, i]`` marks interior cells (row ``j`` = y)."""

    nx: int
    ny: int
    h: float
    mask: np.ndarray
    origin: tuple[float, float] = (0.0, 0.0)

    @property
    def centers(self) -> tuple[np.ndarray, np.ndarray]:
        x = self.origin[0] + (np.arange(self.nx) + 0.5) * self.h
        y = self.origin[1] + (np.arange(self.ny) + 0.5) * self.h
        return np.meshgrid(x, y)

    @property
    def size(self) -> int:
        return int(self.mask.sum())

    @property
    def area(self) -> float:
        return self.size * self.h**2

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)


Mesh = Union[RadialMesh, CartesianGrid]


def build_radial_mesh(N: int, R: float, n: int, g: float = 1.0) -> RadialMesh:
    """Graded radial mesh ``r_i = R (i/n)**g`` of the ball ``B_R(0)`` in ``R^N``."""
    if int(N) != N or N < 2:
        raise ConfigurationError(f"dimension N must be an integer >= 2, got {N}")
    if not R > 0:
        raise ConfigurationError(f"radius must be positive, got {R}")
    if int(n) != n or n < 8:
        raise ConfigurationError(f"need at least 8 cells, got {n}")
    if not g >= 1:
        raise ConfigurationError(f"grading exponent must be >= 1, got {g}")
    n = int(n)
    nodes = R * (np.arange(n + 1) / n) ** g
    nodes[-1] = R
    return RadialMesh(N=int(N), R=float(R), nodes=_frozen(nodes), grading=float(g))


def build_grid(mask: np.ndarray, h: float, origin=(0.0, 0.0)) -> CartesianGrid:
    """Grid from an explicit interior mask.

    The mask must be connected and must not touch the frame of the array, so
    that every interior cell has four neighbours (exterior ones carry 0).
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2 or not mask.any():
        raise ConfigurationError("mask must be a non-empty 2D boolean array")
    if not h > 0:
        raise ConfigurationError(f"grid spacing must be positive, got {h}")
    if mask[0].any() or mask[-1].any() or mask[:, 0].any() or mask[:, -1].any():
        raise ConfigurationError("mask touches the array frame; pad it with exterior cells")
    _, ncomp = ndimage.label(mask)
    if ncomp != 1:
        raise ConfigurationError(f"mask must be connected, found {ncomp} components")
    m = mask.copy()
    m.flags.writeable = False
    return CartesianGrid(nx=mask.shape[1], ny=mask.shape[0], h=float(h), mask=m,
                         origin=(float(origin[0]), float(origin[1])))


def build_disk_grid(R: float, n: int) -> CartesianGrid:
    """Disk of radius ``R`` centred at 0, ``n`` cells across its diameter.

    One ring of exterior cells pads the disk.  With ``n`` even no cell centre
    sits at the origin.
    """
    if not R > 0 or n < 4:
        raise ConfigurationError("need R > 0 and n >= 4")
    h = 2.0 * R / n
    cells = n + 2
    origin = (-R - h, -R - h)
    c = origin[0] + (np.arange(cells) + 0.5) * h
    X, Y = np.meshgrid(c, c)
    return build_grid(X**2 + Y**2 < R**2, h, origin)


def mesh_length_scale(mesh: Mesh) -> float:
    if isinstance(mesh, RadialMesh):
        return mesh.R
    X, Y = mesh.centers
    return float(np.sqrt(X[mesh.mask] ** 2 + Y[mesh.mask] ** 2).max() + mesh.h)


def mesh_spacing(mesh: Mesh) -> float:
    return mesh.h


def cell_measures(mesh: Mesh) -> np.ndarray:
    """Quadrature weight of every node (radial) or interior cell (grid, flattened)."""
    if isinstance(mesh, RadialMesh):
        return mesh.shell_volumes
    return np.full(mesh.size, mesh.h**2)


# --------------------------------------------------------------------- fields


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Node values on a mesh.

    On a :class:`CartesianGrid` the values form a ``(ny, nx)`` array whose
    exterior entries are 0.
    """

    mesh: Mesh
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        expected = (self.mesh.size,) if isinstance(self.mesh, RadialMesh) else self.mesh.shape
        if v.shape != expected:
            raise DataError(f"field shape {v.shape} does not match mesh {expected}")
        if not np.all(np.isfinite(v)):
            raise DataError("field values must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def interior(self) -> np.ndarray:
        """Flat array of the values carrying quadrature weight."""
        if isinstance(self.mesh, RadialMesh):
            return self.values
        return self.values[self.mesh.mask]

    def map(self, fn: Callable[[np.ndarray], np.ndarray]) -> "ScalarField":
        return ScalarField(self.mesh, fn(self.values))


@dataclass(frozen=True, eq=False)
class VectorField:
    """Calibration field ``z``.

    Radial mesh: signed radial component, one value per cell midpoint
    (``location="midpoint"``) or per node (``location="node"``).
    Grid: ``values = (zx, zy)`` with ``zx`` of shape ``(ny, nx - 1)`` on the
    vertical faces and ``zy`` of shape ``(ny - 1, nx)`` on horizontal faces.
    """

    mesh: Mesh
    values: object
    location: str = "midpoint"

    @property
    def sup_norm(self) -> float:
        if isinstance(self.mesh, RadialMesh):
            return float(np.max(np.abs(self.values), initial=0.0))
        zx, zy = self.values
        return float(max(np.max(np.abs(zx), initial=0.0), np.max(np.abs(zy), initial=0.0)))


# ---------------------------------------------------------------------- data


@dataclass(frozen=True)
class PowerLaw:
    """``f(x) = lam * |x|**(-q)``."""

    lam: float
    q: float


@dataclass(frozen=True)
class Constant:
    c: float


@dataclass(frozen=True, eq=False)
class Tabulated:
    """Explicit node values (same layout as :attr:`ScalarField.values`)."""

    values: np.ndarray = field(repr=False)


DatumSpec = Union[PowerLaw, Constant, Tabulated]


def validate_datum(spec: DatumSpec, mesh: Mesh | None = None) -> None:
    if isinstance(spec, PowerLaw):
        if not spec.lam > 0:
            raise DataError(f"power-law amplitude must be positive, got {spec.lam}")
        N = mesh.N if isinstance(mesh, RadialMesh) else 2
        if not 0 < spec.q < N:
            raise DataError(f"power-law exponent must lie in (0, N={N}) for f in L^1, got {spec.q}")
    elif isinstance(spec, Constant):
        if not spec.c >= 0:
            raise DataError(f"constant datum must be nonnegative, got {spec.c}")
    elif isinstance(spec, Tabulated):
        v = np.asarray(spec.values, dtype=float)
        if not np.all(np.isfinite(v)):
            raise DataError("tabulated datum has non-finite entries")
        if np.any(v < 0):
            raise DataError("tabulated datum has negative entries")
    else:
        raise DataError(f"unknown datum specification {spec!r}")


def evaluate_datum(spec: DatumSpec, mesh: Mesh) -> ScalarField:
    """Sample the datum at the nodes.

    A power law is clamped at the origin to its value at the first nonzero
    radius (``r_1`` on a radial mesh, ``h`` on a grid).
    """
    validate_datum(spec, mesh)
    if isinstance(spec, Tabulated):
        return ScalarField(mesh, np.asarray(spec.values, dtype=float))
    if isinstance(mesh, RadialMesh):
        r = np.asarray(mesh.nodes)
        if isinstance(spec, Constant):
            return ScalarField(mesh, np.full(r.shape, float(spec.c)))
        f = np.empty_like(r)
        f[1:] = spec.lam * r[1:] ** (-spec.q)
        f[0] = f[1]
        return ScalarField(mesh, f)
    if isinstance(spec, Constant):
        return ScalarField(mesh, np.where(mesh.mask, float(spec.c), 0.0))
    X, Y = mesh.centers
    r = np.maximum(np.hypot(X, Y), mesh.h)
    return ScalarField(mesh, np.where(mesh.mask, spec.lam * r ** (-spec.q), 0.0))


# ----------------------------------------------------------------- utilities


def truncate(s, k: float):
    """``T_k(s) = min(|s|, k) sign(s)``."""
    if not k > 0:
        raise DomainError(f"truncation level must be positive, got {k}")
    return np.clip(s, -k, k) if isinstance(s, np.ndarray) else max(-k, min(k, s))


def tail(s, k: float):
    """``G_k(s) = s - T_k(s)``."""
    return s - truncate(s, k)


def lp_norm(u: ScalarField, s: float) -> float:
    """``L^s(Omega)`` norm of a node field by dual-cell quadrature.

    Radial meshes weight node ``i`` by the exact measure of its shell
    ``[m_{i-1}, m_i]``, so the origin node never carries more than ``O(r_1^N)``.
    """
    if not s >= 1:
        raise DomainError(f"exponent must be >= 1, got {s}")
    w = cell_measures(u.mesh)
    a = np.abs(u.interior())
    if not a.any():
        return 0.0
    # scale to avoid overflow at large s
    top = a.max()
    return float(top * np.sum(w * (a / top) ** s) ** (1.0 / s))
