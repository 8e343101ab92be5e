"""Averaging stencils over balls and spherical shells, and the radial mollifier.

Offsets are integer cell vectors kept in one canonical order, sorted by
squared length and then lexicographically.  A ball of integer radius ``r``
is a prefix of that order and the shell ``r - 1/2 <= |o| < r + 1/2`` is a
contiguous slice of it, which is what lets the fast maximal kernels and the
brute-force oracle add the same numbers in the same order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import DomainError, ParameterError
from .grid import Domain, Field, ScalarField

_EPS = 1e-9


@lru_cache(maxsize=32)
def canonical_offsets(dim: int, max_norm2: int) -> tuple[np.ndarray, np.ndarray]:
    """All integer offsets with ``|o|^2 <= max_norm2`` in canonical order."""
    rad = math.isqrt(max_norm2)
    axes = [np.arange(-rad, rad + 1)] * dim
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
    norm2 = np.sum(grid**2, axis=1)
    keep = norm2 <= max_norm2
    grid, norm2 = grid[keep], norm2[keep]
    keys = [grid[:, j] for j in reversed(range(dim))] + [norm2]
    order = np.lexsort(keys)
    offs, n2 = grid[order], norm2[order]
    offs.setflags(write=False)
    n2.setflags(write=False)
    return offs, n2


def radius_ladder(max_cells: int, growth: float | None = 1.25) -> list[int]:
    """Integer radii ``0, ceil(g^k) ...`` up to and including ``max_cells``.

    ``growth`` of ``None`` or ``1`` gives every integer radius.
    """
    if max_cells < 0:
        return [0]
    if growth is None or growth <= 1.0:
        return list(range(max_cells + 1))
    radii = {0, max_cells}
    k = 0
    while True:
        r = math.ceil(growth**k - 1e-12)
        if r > max_cells:
            break
        radii.add(r)
        k += 1
    return sorted(radii)


def shell_norm2_range(r: int) -> tuple[int, int]:
    """Inclusive ``|o|^2`` bounds of the shell ``r - 1/2 <= |o| < r + 1/2``."""
    if r == 0:
        return 0, 0
    return r * r - r + 1, r * r + r


class StencilSet:
    """Ball and shell stencils for a ladder of integer radii.

    Parameters
    ----------
    dim : int
        Spatial dimension.
    radii_cells : sequence of int
        Increasing radii in cells; the first entry must be 0.
    h : float
        Grid spacing, used only to report physical radii.
    """

    def __init__(self, dim: int, radii_cells, h: float = 1.0):
        radii_cells = [int(r) for r in radii_cells]
        if not radii_cells or radii_cells[0] != 0:
            raise ParameterError("radius ladder must start at 0")
        if any(b <= a for a, b in zip(radii_cells, radii_cells[1:])):
            raise ParameterError("radius ladder must be strictly increasing")
        self.dim = dim
        self.h = float(h)
        self.radii_cells = tuple(radii_cells)
        rmax = radii_cells[-1]
        self.offsets, self.norm2 = canonical_offsets(dim, rmax * rmax + rmax)
        self.ball_count = tuple(
            int(np.searchsorted(self.norm2, r * r, side="right")) for r in radii_cells
        )
        slices = []
        for r in radii_cells:
            lo, hi = shell_norm2_range(r)
            slices.append(
                (
                    int(np.searchsorted(self.norm2, lo, side="left")),
                    int(np.searchsorted(self.norm2, hi, side="right")),
                )
            )
        self.shell_slices = tuple(slices)

    @classmethod
    def for_domain(cls, domain: Domain, growth: float | None = 1.25) -> "StencilSet":
        return cls(domain.dim, radius_ladder(domain.max_radius_cells(), growth), domain.grid.h)

    @property
    def radii(self) -> tuple[float, ...]:
        return tuple(r * self.h for r in self.radii_cells)

    @property
    def max_cells(self) -> int:
        return self.radii_cells[-1]

    def __len__(self):
        return len(self.radii_cells)

    def ball(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        """Offsets and (uniform) weights of the k-th ball."""
        offs = self.offsets[: self.ball_count[k]]
        return offs, np.full(len(offs), 1.0 / len(offs))

    def shell(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.shell_slices[k]
        offs = self.offsets[lo:hi]
        return offs, np.full(len(offs), 1.0 / len(offs))

    def shell_reach(self, k: int) -> float:
        """Largest offset length in the k-th shell (in cells)."""
        r = self.radii_cells[k]
        return math.sqrt(r * r + r) if r else 0.0

    def ball_weights(self, k: int) -> dict[tuple, float]:
        offs, w = self.ball(k)
        return {tuple(int(v) for v in o): float(x) for o, x in zip(offs, w)}

    def shell_weights(self, k: int) -> dict[tuple, float]:
        offs, w = self.shell(k)
        return {tuple(int(v) for v in o): float(x) for o, x in zip(offs, w)}


def ball_offsets(dim: int, radius_cells: float) -> np.ndarray:
    bound = int(math.floor(radius_cells**2 + _EPS))
    offs, _ = canonical_offsets(dim, bound)
    return offs


def shell_offsets(dim: int, radius_cells: float) -> np.ndarray:
    lo, hi = radius_cells - 0.5, radius_cells + 0.5
    bound = int(math.floor(hi * hi))
    offs, n2 = canonical_offsets(dim, bound)
    norms = np.sqrt(n2)
    keep = (norms >= lo - _EPS) & (norms < hi - _EPS)
    return offs[keep]


def _gather(f: Field, center, offs: np.ndarray) -> np.ndarray:
    g = f.grid
    idx = np.asarray(center)[None, :] + offs
    if g.is_torus:
        idx = idx % np.asarray(g.shape)
    return f.values[tuple(idx.T)]


def _check_center(domain: Domain, center) -> tuple[int, ...]:
    center = tuple(int(c) for c in center)
    if len(center) != domain.dim:
        raise ParameterError(f"center must have {domain.dim} coordinates")
    if any(c < 0 or c >= n for c, n in zip(center, domain.grid.shape)):
        raise ParameterError(f"center {center} lies outside the grid")
    if not domain.mask[center]:
        raise DomainError(f"center {center} lies outside the domain")
    return center


def _check_fits(domain: Domain, center, reach_cells: float, what: str):
    if domain.grid.is_torus:
        if reach_cells > (min(domain.grid.shape) - 1) / 2 + _EPS:
            raise DomainError(f"{what} of radius {reach_cells} cells wraps around the torus")
    elif not domain.boundary_cells[center] > reach_cells:
        raise DomainError(f"{what} at {center} with radius {reach_cells} cells leaves the domain")


def ball_average(f: ScalarField, center, r: float) -> float:
    """Mean of ``f`` over the closed ball ``B(center, r)``; ``r`` in physical units."""
    if r < 0:
        raise ParameterError("radius must be nonnegative")
    center = _check_center(f.domain, center)
    rc = r / f.grid.h
    _check_fits(f.domain, center, rc, "ball")
    vals = _gather(f, center, ball_offsets(f.domain.dim, rc))
    return float(vals.mean(axis=0)) if vals.ndim == 1 else vals.mean(axis=0)


def sphere_average(f: ScalarField, center, r: float) -> float:
    """Mean of ``f`` over the discrete sphere ``r - h/2 <= |y - center| < r + h/2``."""
    if not r > 0:
        raise ParameterError("sphere radius must be positive")
    center = _check_center(f.domain, center)
    rc = r / f.grid.h
    offs = shell_offsets(f.domain.dim, rc)
    if len(offs) == 0:
        raise ParameterError(f"no cells on the sphere of radius {r}")
    reach = float(np.sqrt((offs**2).sum(axis=1)).max())
    _check_fits(f.domain, center, reach, "sphere")
    vals = _gather(f, center, offs)
    return float(vals.mean(axis=0)) if vals.ndim == 1 else vals.mean(axis=0)


def bump_profile(t):
    """(1 - t^2)^4 on [0, 1), zero beyond."""
    t = np.asarray(t, dtype=float)
    return np.where(t < 1.0, (1.0 - t * t) ** 4, 0.0)


@dataclass(frozen=True)
class Mollifier:
    """Rotationally invariant approximation of the identity.

    ``normalization`` is the continuum constant making ``c*Phi(|x|)``
    integrate to one in ``dim`` dimensions and ``c_phi`` is ``sup|Phi'|`` on
    [0, 1).  The discrete stencils returned by :meth:`weights` are
    renormalised to sum to exactly one.
    """

    dim: int
    samples: int = 4097

    @property
    def profile(self) -> np.ndarray:
        return bump_profile(np.linspace(0.0, 1.0, self.samples, endpoint=False))

    @property
    def normalization(self) -> float:
        # int_{R^n} (1-|x|^2)^4 dx = pi^{n/2} Gamma(5) / Gamma(n/2 + 5)
        n = self.dim
        integral = math.pi ** (n / 2) * math.gamma(5) / math.gamma(n / 2 + 5)
        return 1.0 / integral

    @property
    def c_phi(self) -> float:
        # |Phi'(t)| = 8 t (1-t^2)^3 peaks at t = 1/sqrt(7)
        t = 1.0 / math.sqrt(7.0)
        return 8.0 * t * (1.0 - t * t) ** 3

    def weights(self, t_cells: float) -> tuple[np.ndarray, np.ndarray]:
        """Offsets ``|o| < t`` and normalised weights of ``Phi_t`` (t in cells)."""
        if not t_cells > 0:
            raise ParameterError("mollifier scale must be positive")
        bound = math.ceil(t_cells * t_cells) - 1
        offs, n2 = canonical_offsets(self.dim, max(bound, 0))
        w = bump_profile(np.sqrt(n2) / t_cells)
        return offs, w / w.sum()

    def radial_integral_constant(self) -> float:
        """Beta-function form of the unnormalised mass, used as a cross-check."""
        n = self.dim
        sphere = 2 * math.pi ** (n / 2) / math.gamma(n / 2)
        return sphere * 0.5 * special.beta(n / 2, 5)
