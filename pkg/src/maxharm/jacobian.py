"""Differentials, cofactors, Jacobians and the inequalities that control them.

All matrix norms are spectral norms.  With that convention the pointwise
bound ``|det A| <= |cof A|^(n/(n-1))`` holds with constant 1 in dimensions
2 and 3 (see :func:`hadamard_gap`).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, ParameterError, PreconditionError
from .grid import Domain, Grid, MatrixField, ScalarField, Topology, spectral_norm
from .maximal import MaximalConfig, h1_norm
from .norms import llogl_norm, lq_norm, bmo_seminorm
from .reports import InequalityReport, chain
from .stencils import ball_average, canonical_offsets, sphere_average


class MappingField:
    """A discrete map ``f(x) = A x + g(x)`` on a domain.

    ``values`` holds ``g`` with shape ``grid.shape + (n,)``.  On a torus
    ``g`` is periodic and the optional linear part ``A`` carries the
    non-periodic behaviour (``A = I`` is the identity map); on a box ``A`` is
    usually omitted and ``values`` is the whole map.
    """

    def __init__(self, domain, values, linear=None):
        if isinstance(domain, Grid):
            domain = Domain(domain)
        n = domain.dim
        values = np.array(values, dtype=float)
        if values.shape != domain.grid.shape + (n,):
            raise ParameterError(f"map values must have shape {domain.grid.shape + (n,)}")
        if not np.isfinite(values[domain.mask]).all():
            raise ParameterError("map components must be finite")
        values.setflags(write=False)
        self.domain = domain
        self.values = values
        self.linear = None if linear is None else np.array(linear, dtype=float).reshape(n, n)

    @property
    def grid(self) -> Grid:
        return self.domain.grid

    @property
    def dim(self) -> int:
        return self.domain.dim

    @classmethod
    def from_function(cls, domain, func, linear=None) -> "MappingField":
        """Sample ``func(*coords) -> sequence of n arrays`` at the cell coordinates."""
        if isinstance(domain, Grid):
            domain = Domain(domain)
        comps = func(*domain.grid.mesh())
        return cls(domain, np.stack([np.broadcast_to(c, domain.grid.shape) for c in comps], -1), linear)

    @classmethod
    def linear_map(cls, domain, A) -> "MappingField":
        """``x -> A x``; stored as a linear part on a torus, sampled on a box."""
        if isinstance(domain, Grid):
            domain = Domain(domain)
        A = np.asarray(A, dtype=float)
        if domain.grid.is_torus:
            return cls(domain, np.zeros(domain.grid.shape + (domain.dim,)), A)
        X = np.stack(domain.grid.mesh(), -1)
        return cls(domain, X @ A.T)

    def scaled(self, c: float) -> "MappingField":
        lin = None if self.linear is None else c * self.linear
        return MappingField(self.domain, c * self.values, lin)

    def rolled(self, shift) -> "MappingField":
        axes = tuple(range(self.dim))
        return MappingField(self.domain, np.roll(self.values, shift, axis=axes), self.linear)


def differential(f: MappingField) -> MatrixField:
    """``Df[..., i, j] = d f_i / d x_j`` by centered differences.

    Box edges use second-order one-sided differences; torus differences wrap.
    Both are exact on affine maps.
    """
    g = f.grid
    n = g.dim
    D = np.empty(g.shape + (n, n))
    for i in range(n):
        comp = f.values[..., i]
        for j in range(n):
            if g.is_torus:
                D[..., i, j] = (np.roll(comp, -1, axis=j) - np.roll(comp, 1, axis=j)) / (2 * g.h)
            else:
                D[..., i, j] = np.gradient(comp, g.h, axis=j, edge_order=2)
    if f.linear is not None:
        D += f.linear
    return MatrixField(f.domain, D)


def cofactor_matrices(D: np.ndarray) -> np.ndarray:
    """Cofactor matrix of every trailing n x n block, so ``D^T cof(D) = det(D) I``."""
    n = D.shape[-1]
    if n == 1:
        return np.ones_like(D)
    if n == 2:
        C = np.empty_like(D)
        C[..., 0, 0] = D[..., 1, 1]
        C[..., 0, 1] = -D[..., 1, 0]
        C[..., 1, 0] = -D[..., 0, 1]
        C[..., 1, 1] = D[..., 0, 0]
        return C
    if n == 3:
        r0, r1, r2 = D[..., 0, :], D[..., 1, :], D[..., 2, :]
        return np.stack([np.cross(r1, r2), np.cross(r2, r0), np.cross(r0, r1)], axis=-2)
    raise ParameterError(f"cofactors implemented for n <= 3, got {n}")


def determinants(D: np.ndarray) -> np.ndarray:
    n = D.shape[-1]
    if n == 1:
        return D[..., 0, 0].copy()
    if n == 2:
        return D[..., 0, 0] * D[..., 1, 1] - D[..., 0, 1] * D[..., 1, 0]
    # expansion along the first row against the cofactor rows
    return np.sum(D[..., 0, :] * cofactor_matrices(D)[..., 0, :], axis=-1)


def cofactor(Df: MatrixField) -> MatrixField:
    return MatrixField(Df.domain, cofactor_matrices(Df.values))


def jacobian_det(f: MappingField) -> ScalarField:
    Df = differential(f)
    return ScalarField(f.domain, determinants(Df.values))


def hadamard_gap(D: np.ndarray) -> np.ndarray:
    """``|cof D|^(n/(n-1)) - |det D|`` per block; nonnegative for spectral norms."""
    n = D.shape[-1]
    return spectral_norm(cofactor_matrices(D)) ** (n / (n - 1)) - np.abs(determinants(D))


def _require_dim(f: MappingField):
    if f.dim < 2:
        raise ParameterError("Jacobian inequalities need dimension n >= 2")
    return f.dim, f.dim / (f.dim - 1)


def _cofactor_norm(f: MappingField) -> ScalarField:
    return ScalarField(f.domain, spectral_norm(cofactor_matrices(differential(f).values)))


def _base_params(f: MappingField, **kw) -> dict:
    p = {"n": f.dim, "grid": "x".join(map(str, f.grid.shape)), "norm": "spectral"}
    p.update(kw)
    return p


def check_isoperimetric(f: MappingField, center, r: float) -> InequalityReport:
    """``|avg_B J| <~ (avg_{dB} |D#f|)^(n/(n-1))`` on ``B = B(center, r)``."""
    n, m = _require_dim(f)
    J = jacobian_det(f)
    lhs = abs(ball_average(J, center, r))
    rhs = sphere_average(_cofactor_norm(f), center, r) ** m
    return InequalityReport("isoperimetric", lhs, rhs, _base_params(f, r=r, center=tuple(center)))


def check_hardy_bound(f: MappingField, cfg: MaximalConfig | None = None) -> InequalityReport:
    """``||det Df||_{H^1} <~ int |D#f|^(n/(n-1))`` on the whole domain."""
    n, m = _require_dim(f)
    J = jacobian_det(f)
    lhs = h1_norm(J, cfg)
    rhs = lq_norm(_cofactor_norm(f), m) ** m
    return InequalityReport("hardy_bound", lhs, rhs, _base_params(f))


def orientation_tolerance(J: ScalarField) -> float:
    vals = np.abs(J.values[J.domain.mask])
    return 1e-10 * float(vals.max()) if vals.size else 0.0


def _ball_ok(domain: Domain, center, radius_cells: float):
    if domain.grid.is_torus:
        if radius_cells > domain.max_radius_cells():
            raise DomainError("ball 2B wraps around the torus")
    elif not domain.boundary_cells[tuple(center)] > radius_cells:
        raise DomainError("ball 2B is not contained in the domain")


def _require_orientation(J: ScalarField, center, radius_cells: float):
    tol = orientation_tolerance(J)
    ball = J.domain.ball_mask(center, radius_cells)
    if np.any(J.values[ball] < -tol):
        raise PreconditionError("Jacobian is negative on B; the inequality needs J >= 0")
    return tol


def restrict_to_ball(F: ScalarField, center, radius_cells: float) -> ScalarField:
    """``F`` on the box domain ``B(center, radius)``.

    Torus fields are first rolled so the ball sits in the middle of the grid.
    """
    g = F.grid
    vals = F.values
    center = tuple(int(c) for c in center)
    if g.is_torus:
        shift = tuple(n // 2 - c for n, c in zip(g.shape, center))
        vals = np.roll(vals, shift, axis=tuple(range(g.dim)))
        center = tuple(n // 2 for n in g.shape)
    ball = F.domain.ball_mask(center, radius_cells)
    if not g.is_torus:
        ball &= F.domain.mask
    box = Grid(g.shape, g.h, Topology.BOX)
    return ScalarField(Domain(box, ball), np.where(ball, vals, 0.0))


def check_llogl(f: MappingField, center, r: float, cfg_growth: float | None = 1.25):
    """Chain ``int_B F log(e + F/F_B) <~ ||F||_{H^1(2B)} <~ int_{2B} |Df|^n`` for ``F = J >= 0``."""
    n, _ = _require_dim(f)
    rc = r / f.grid.h
    _ball_ok(f.domain, center, 2 * rc)
    J = jacobian_det(f)
    _require_orientation(J, center, rc)
    Jpos = J.with_values(np.maximum(J.values, 0.0))
    a = llogl_norm(Jpos, center, r)
    J2B = restrict_to_ball(J, center, 2 * rc)
    b = h1_norm(J2B, MaximalConfig.for_domain(J2B.domain, cfg_growth))
    ball2 = f.domain.ball_mask(center, 2 * rc)
    Dn = spectral_norm(differential(f).values)[ball2]
    c = float(np.sum(Dn**n) * f.grid.cell_volume)
    return chain("llogl", (a, b, c), _base_params(f, r=r, center=tuple(center)))


def _log_weighted(norms: np.ndarray, power: float, vol: float) -> tuple[float, bool]:
    mean = norms.mean()
    if mean == 0.0:
        return 0.0, True
    return float(np.sum(norms**power / np.log(math.e + norms / mean)) * vol), False


def check_dual_log(f: MappingField, center, r: float):
    """Chain ``int_B J <~ int_{2B} |D#f|^(n/(n-1)) / log(...) <~ int_{2B} |Df|^n / log(...)``.

    The logarithms are normalised by the mean of the matrix norm over 2B, so
    all three terms scale like ``c^n`` under ``f -> c f``.
    """
    n, m = _require_dim(f)
    rc = r / f.grid.h
    _ball_ok(f.domain, center, 2 * rc)
    J = jacobian_det(f)
    _require_orientation(J, center, rc)
    vol = f.grid.cell_volume
    ball = f.domain.ball_mask(center, rc)
    ball2 = f.domain.ball_mask(center, 2 * rc)
    D = differential(f).values[ball2]
    a = abs(float(np.sum(J.values[ball]) * vol))
    b, deg_b = _log_weighted(spectral_norm(cofactor_matrices(D)), m, vol)
    c, deg_c = _log_weighted(spectral_norm(D), n, vol)
    flags = ("degenerate-mean",) if (deg_b or deg_c) else ()
    return chain("dual_log", (a, b, c), _base_params(f, r=r, center=tuple(center)), flags)


def check_bmo_pairing(f: MappingField, phi: ScalarField, cfg: MaximalConfig | None = None) -> InequalityReport:
    """``|int phi J| <~ ||phi||_BMO int |D#f|^(n/(n-1))`` on a torus."""
    n, m = _require_dim(f)
    if not f.grid.is_torus:
        raise DomainError("the BMO pairing is a global statement; use a torus")
    J = jacobian_det(f)
    lhs = abs(float(np.sum(phi.values * J.values) * f.grid.cell_volume))
    rhs = bmo_seminorm(phi, cfg) * lq_norm(_cofactor_norm(f), m) ** m
    return InequalityReport("bmo_pairing", lhs, rhs, _base_params(f))


def check_convolution_bound(F: ScalarField, center, t: float, mollifier=None) -> InequalityReport:
    """``|F * Phi_t|(x) <= C'/t^(n+1) sum_rho |int_{B(x,rho)} F| d rho``.

    The radial sum runs over the distinct offset lengths below ``t`` with
    the gap to the next length as ``d rho``; ``C' = c * sup|Phi'|`` uses the
    continuum normalisation of the profile.
    """
    from .stencils import Mollifier, _check_center, _check_fits, _gather

    dom = F.domain
    n = dom.dim
    moll = mollifier or Mollifier(n)
    center = _check_center(dom, center)
    h = F.grid.h
    tc = t / h
    _check_fits(dom, center, tc, "mollifier support")
    offs, w = moll.weights(tc)
    vals = _gather(F, center, offs)
    lhs = abs(float(np.dot(w, vals)))
    _, n2 = canonical_offsets(n, max(math.ceil(tc * tc) - 1, 0))
    cums = np.cumsum(vals) * h**n
    levels = np.unique(n2)
    # ball integral at each distinct radius: cumulative sum up to the last offset of that length
    ends = np.searchsorted(n2, levels, side="right") - 1
    rho = np.sqrt(levels) * h
    gaps = np.diff(np.append(rho, t))
    radial = float(np.sum(np.abs(cums[ends]) * gaps))
    const = moll.normalization * moll.c_phi
    rhs = const / t ** (n + 1) * radial
    return InequalityReport("convolution_bound", lhs, rhs, {"n": n, "t": t, "center": center, "C": const})
