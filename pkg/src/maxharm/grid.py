"""Uniform grids, domains and cell-valued fields.

Everything here is immutable: arrays handed to a constructor are copied and
marked read-only, so fields can be shared freely between threads.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import DomainError, ParameterError


class Topology(enum.Enum):
    TORUS = "torus"
    BOX = "box"


@dataclass(frozen=True)
class Grid:
    """Rectangular lattice with uniform spacing ``h`` on every axis."""

    shape: tuple[int, ...]
    h: float
    topology: Topology = Topology.TORUS

    def __post_init__(self):
        shape = tuple(int(s) for s in self.shape)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "h", float(self.h))
        object.__setattr__(self, "topology", Topology(self.topology))
        if len(shape) not in (1, 2, 3):
            raise ParameterError(f"grid dimension must be 1, 2 or 3, got {len(shape)}")
        if min(shape) < 4:
            raise ParameterError(f"every axis needs at least 4 cells, got {shape}")
        if not (math.isfinite(self.h) and self.h > 0):
            raise ParameterError(f"spacing must be positive and finite, got {self.h}")

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def cell_volume(self) -> float:
        return self.h**self.dim

    @property
    def lengths(self) -> tuple[float, ...]:
        return tuple(n * self.h for n in self.shape)

    @property
    def is_torus(self) -> bool:
        return self.topology is Topology.TORUS

    def axes(self) -> list[np.ndarray]:
        """Per-axis cell coordinates.

        Torus cells sit at ``i*h`` (so index 0 is the origin of the periodic
        cell); box cells sit at their centres ``(i + 1/2)*h``.
        """
        shift = 0.0 if self.is_torus else 0.5
        return [(np.arange(n) + shift) * self.h for n in self.shape]

    def mesh(self) -> list[np.ndarray]:
        return np.meshgrid(*self.axes(), indexing="ij")

    @classmethod
    def unit_box(cls, n: int, dim: int = 2) -> "Grid":
        return cls((n,) * dim, 1.0 / n, Topology.BOX)

    @classmethod
    def unit_torus(cls, n: int, dim: int = 2, length: float = 1.0) -> "Grid":
        return cls((n,) * dim, length / n, Topology.TORUS)


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Domain:
    """A grid together with the open set Omega, given as a cell mask.

    ``boundary_distance`` is the Euclidean distance (physical units) from each
    cell centre to the nearest cell outside Omega; cells beyond the edge of a
    box grid count as outside.  On a full torus it is ``inf`` everywhere.
    """

    grid: Grid
    mask: np.ndarray = None
    boundary_cells: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        g = self.grid
        mask = np.ones(g.shape, bool) if self.mask is None else np.asarray(self.mask, bool)
        if mask.shape != g.shape:
            raise ParameterError(f"mask shape {mask.shape} does not match grid {g.shape}")
        if g.is_torus:
            if not mask.all():
                raise DomainError("torus domains must cover the whole grid")
            dist = np.full(g.shape, np.inf)
        else:
            padded = np.pad(mask, 1, constant_values=False)
            dist = ndimage.distance_transform_edt(padded)[(slice(1, -1),) * g.dim]
            dist = np.where(mask, dist, 0.0)
            if dist.max() < 2.0:
                raise DomainError("domain needs a cell at distance >= 2h from its boundary")
        object.__setattr__(self, "mask", _readonly(mask))
        object.__setattr__(self, "boundary_cells", _readonly(dist))

    @property
    def boundary_distance(self) -> np.ndarray:
        return self.boundary_cells * self.grid.h

    @property
    def dim(self) -> int:
        return self.grid.dim

    @property
    def measure(self) -> float:
        return float(self.mask.sum()) * self.grid.cell_volume

    def max_radius_cells(self) -> int:
        """Largest integer radius (in cells) whose balls fit somewhere in the domain.

        On a torus a ball may not wrap onto itself, so the cap is
        ``floor((min(shape) - 1) / 2)``.
        """
        if self.grid.is_torus:
            return (min(self.grid.shape) - 1) // 2
        return int(math.ceil(self.boundary_cells.max())) - 1

    def admissible(self, radius_cells: float) -> np.ndarray:
        """Cells whose closed ball of the given radius lies inside Omega."""
        if self.grid.is_torus:
            ok = radius_cells <= self.max_radius_cells()
            return np.full(self.grid.shape, ok)
        return self.mask & (self.boundary_cells > radius_cells)

    def ball_mask(self, center, radius_cells: float) -> np.ndarray:
        """Cells with |x - center| <= radius (distance measured on the torus if periodic)."""
        g = self.grid
        sq = np.zeros(g.shape)
        for ax, (c, n) in enumerate(zip(center, g.shape)):
            d = np.arange(n) - c
            if g.is_torus:
                d = (d + n // 2) % n - n // 2
            shape = [1] * g.dim
            shape[ax] = n
            sq = sq + (d.astype(float) ** 2).reshape(shape)
        return sq <= radius_cells**2 + 1e-9

    @classmethod
    def full(cls, grid: Grid) -> "Domain":
        return cls(grid)


class Field:
    """Cell-valued real data over a domain; subclasses fix the value rank."""

    rank = 0
    kind = "scalar"

    def __init__(self, domain: Domain | Grid, values):
        if isinstance(domain, Grid):
            domain = Domain(domain)
        values = np.asarray(values, dtype=float)
        n = domain.dim
        expected = domain.grid.shape + (n,) * self.rank
        if values.shape != expected:
            raise ParameterError(
                f"{type(self).__name__} values must have shape {expected}, got {values.shape}"
            )
        if not np.isfinite(values[domain.mask]).all():
            raise ParameterError("field values must be finite")
        self.domain = domain
        self.values = _readonly(values)

    @property
    def grid(self) -> Grid:
        return self.domain.grid

    def pointwise_norm(self) -> np.ndarray:
        """|f| per cell: absolute value, Euclidean norm, or spectral norm."""
        if self.rank == 0:
            return np.abs(self.values)
        if self.rank == 1:
            return np.sqrt(np.sum(self.values**2, axis=-1))
        return spectral_norm(self.values)

    def with_values(self, values):
        return type(self)(self.domain, values)

    def __repr__(self):
        return f"{type(self).__name__}(shape={self.grid.shape}, h={self.grid.h})"


class ScalarField(Field):
    rank = 0
    kind = "scalar"


class VectorField(Field):
    rank = 1
    kind = "vector"


class MatrixField(Field):
    rank = 2
    kind = "matrix"


FIELD_KINDS = {"scalar": ScalarField, "vector": VectorField, "matrix": MatrixField}


def spectral_norm(mats: np.ndarray) -> np.ndarray:
    """Largest singular value of each trailing n x n block."""
    n = mats.shape[-1]
    if n == 1:
        return np.abs(mats[..., 0, 0])
    if n == 2:
        a, b = mats[..., 0, 0], mats[..., 0, 1]
        c, d = mats[..., 1, 0], mats[..., 1, 1]
        # sigma_max = (sqrt((a+d)^2+(c-b)^2) + sqrt((a-d)^2+(b+c)^2)) / 2
        return 0.5 * (np.hypot(a + d, c - b) + np.hypot(a - d, b + c))
    return np.linalg.norm(mats, ord=2, axis=(-2, -1))
