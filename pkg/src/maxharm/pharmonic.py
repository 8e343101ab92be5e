"""The p-harmonic transform on the torus and its local comparison estimates.

``rp_transform`` minimises the convex energy

    E[u] = sum ( (1/p) (|grad u|^2 + delta^2)^(p/2) - <g, grad u> ) h^n,
    g = |f|^(p-2) f,

with spectral derivatives (Nyquist components dropped, so ``p = 2``
reproduces the gradient projection exactly).  Each outer step freezes the
weight ``w = (|grad u|^2 + delta^2)^((p-2)/2)``, solves the weighted
Laplacian by PCG and then moves along the resulting direction with an exact
line search, which keeps the energy monotone for every ``p``.

``p_dirichlet_ball`` is a separate finite-difference solver (forward
differences) for the ball comparison map ``v``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import brentq
from scipy.sparse.linalg import spsolve

from .errors import ConvergenceError, DomainError, ParameterError
from .grid import Domain, Grid, ScalarField, VectorField
from .norms import lq_norm
from .reports import InequalityReport
from .spectral import t_apply

TAU_LADDER = (1.0, 0.5, 0.25, 0.125)


@dataclass(frozen=True)
class PHarmonicProblem:
    p: float
    load: VectorField
    delta: float | None = None
    tol: float = 1e-9
    max_iter: int = 200
    init: str = "linear"

    def __post_init__(self):
        if not (self.p > 1 and math.isfinite(self.p)):
            raise ParameterError(f"p must be a finite number > 1, got {self.p}")
        if not self.tol > 0:
            raise ParameterError("tol must be positive")
        if self.delta is not None and not self.delta >= 0:
            raise ParameterError("delta must be nonnegative")
        if self.max_iter < 1:
            raise ParameterError("max_iter must be at least 1")
        if self.init not in ("linear", "zero"):
            raise ParameterError(f"unknown init {self.init!r}")
        if not isinstance(self.load, VectorField):
            raise ParameterError("the load must be a VectorField")
        if not self.load.grid.is_torus:
            raise DomainError("the p-harmonic transform is solved on a torus")

    @property
    def grid(self) -> Grid:
        return self.load.grid

    @property
    def reg(self) -> float:
        """The regularisation actually used (default ``1e-8 * mean|f|``)."""
        if self.delta is not None:
            return float(self.delta)
        return 1e-8 * float(self.load.pointwise_norm().mean())

    def rhs_field(self) -> np.ndarray:
        return _power_field(self.load.values, self.p)


@dataclass
class SolveReport:
    iterations: int = 0
    residual: float = math.nan
    energy_trace: list = field(default_factory=list)
    alpha_estimate: float = math.nan
    delta: float = 0.0
    linear_iterations: int = 0
    converged: bool = False

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "residual": self.residual,
            "energy_trace": list(self.energy_trace),
            "alpha_estimate": None if math.isnan(self.alpha_estimate) else self.alpha_estimate,
            "delta": self.delta,
            "linear_iterations": self.linear_iterations,
            "converged": self.converged,
        }


def _power_field(V: np.ndarray, p: float) -> np.ndarray:
    """``|V|^(p-2) V`` with the value 0 where ``V = 0``."""
    mag = np.sqrt(np.sum(V * V, axis=-1, keepdims=True))
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(mag > 0, mag ** (p - 2), 0.0)
    return scale * V


class _Spectral:
    """Real-FFT gradient, its adjoint and the constant-coefficient inverse."""

    def __init__(self, grid: Grid):
        self.grid = grid
        n = grid.dim
        self.axes = tuple(range(n))
        ks = []
        for ax, m in enumerate(grid.shape):
            if ax == n - 1:
                k = 2 * np.pi * np.fft.rfftfreq(m, d=grid.h)
            else:
                k = 2 * np.pi * np.fft.fftfreq(m, d=grid.h)
            if m % 2 == 0:
                k[-1 if ax == n - 1 else m // 2] = 0.0
            shape = [1] * n
            shape[ax] = k.size
            ks.append(k.reshape(shape))
        self.ks = ks
        k2 = sum(k**2 for k in ks)
        self.inv_k2 = np.where(k2 > 0, 1.0 / np.where(k2 > 0, k2, 1.0), 0.0)

    def fft(self, u):
        return np.fft.rfftn(u, axes=self.axes)

    def ifft(self, uh):
        return np.fft.irfftn(uh, s=self.grid.shape, axes=self.axes)

    def grad(self, u: np.ndarray) -> np.ndarray:
        uh = self.fft(u)
        return np.stack([self.ifft(1j * k * uh) for k in self.ks], axis=-1)

    def grad_adj(self, V: np.ndarray) -> np.ndarray:
        """``G^T V = -div V``."""
        acc = sum(-1j * k * self.fft(V[..., j]) for j, k in enumerate(self.ks))
        return self.ifft(acc)

    def project(self, V: np.ndarray) -> np.ndarray:
        kv = sum(k * self.fft(V[..., j]) for j, k in enumerate(self.ks)) * self.inv_k2
        return np.stack([self.ifft(k * kv) for k in self.ks], axis=-1)

    def inv_laplace(self, r: np.ndarray, scale: float) -> np.ndarray:
        """Solve ``scale * G^T G z = r`` on the range of ``G^T``."""
        return self.ifft(self.fft(r) * self.inv_k2 / scale)


def _pcg(apply_a, b, precond, x0, rtol, maxiter):
    x = x0.copy()
    r = b - apply_a(x)
    bnorm = np.linalg.norm(b)
    if bnorm == 0:
        return np.zeros_like(b), 0
    z = precond(r)
    d = z.copy()
    rz = np.vdot(r, z)
    for it in range(1, maxiter + 1):
        if np.linalg.norm(r) <= rtol * bnorm:
            return x, it - 1
        Ad = apply_a(d)
        step = rz / np.vdot(d, Ad)
        x += step * d
        r -= step * Ad
        z = precond(r)
        rz_new = np.vdot(r, z)
        d = z + (rz_new / rz) * d
        rz = rz_new
    return x, maxiter


def _flux(V, p, delta):
    return (np.sum(V * V, axis=-1, keepdims=True) + delta * delta) ** ((p - 2) / 2) * V


def _energy(V, g, p, delta, vol):
    m2 = np.sum(V * V, axis=-1)
    return float(np.sum((m2 + delta * delta) ** (p / 2) / p - np.sum(g * V, axis=-1)) * vol)


def _line_search(V, D, g, p, delta):
    """Minimiser of the convex map ``theta -> E[u + theta d]`` (``theta >= 0``)."""

    def slope(t):
        return float(np.sum((_flux(V + t * D, p, delta) - g) * D))

    if not slope(0.0) < 0:
        return 0.0
    lo, hi = 0.0, 1.0
    if slope(hi) < 0:
        while slope(hi) < 0:
            lo, hi = hi, 2.0 * hi
            if hi > 1e8:
                return hi
    else:
        # the direction may be badly scaled (e.g. from a near-zero weight)
        while hi > 1e-300 and slope(0.5 * hi) > 0:
            hi *= 0.5
        lo = 0.5 * hi
    if slope(lo) >= 0:
        return lo
    return brentq(slope, lo, hi, xtol=1e-14 * hi, rtol=1e-12)


def _residual(sp_ops, V, g, p, delta, gnorm):
    return float(np.linalg.norm(sp_ops.project(_flux(V, p, delta) - g)) / gnorm)


def rp_transform(prob: PHarmonicProblem, u0: np.ndarray | None = None):
    """``R_p f = grad u`` for the mean-zero minimiser ``u``.

    Returns ``(grad_u, report)``.  The residual is the relative L^2 norm of
    the gradient-part projection of ``|grad u|^(p-2) grad u - g``, which is
    the dual norm of the weak-form defect.  Raises :class:`ConvergenceError`
    (with ``.report``) when ``max_iter`` outer steps do not reach ``tol``.
    """
    grid = prob.grid
    p = prob.p
    delta = prob.reg
    vol = grid.cell_volume
    ops = _Spectral(grid)
    g = prob.rhs_field()
    gnorm = float(np.linalg.norm(g))
    rep = SolveReport(delta=delta)
    if gnorm == 0:
        rep.residual = 0.0
        rep.converged = True
        rep.energy_trace.append(0.0)
        return VectorField(prob.load.domain, np.zeros_like(g)), rep

    b = ops.grad_adj(g)
    u2 = ops.inv_laplace(b, 1.0)
    if u0 is not None:
        u = np.array(u0, dtype=float)
        u = u - u.mean()
    elif prob.init == "zero":
        u = np.zeros(grid.shape)
    else:
        # p = 2 solution rescaled to minimise the energy along its ray
        V2 = ops.grad(u2)
        num = float(np.sum(g * V2))
        den = float(np.sum(np.sum(V2 * V2, axis=-1) ** (p / 2)))
        u = u2 * (num / den) ** (1.0 / (p - 1)) if num > 0 and den > 0 else np.zeros(grid.shape)

    V = ops.grad(u)
    rep.energy_trace.append(_energy(V, g, p, delta, vol))
    inner_tol = 1e-2
    for it in range(1, prob.max_iter + 1):
        res = _residual(ops, V, g, p, delta, gnorm)
        rep.residual = res
        if res <= prob.tol:
            rep.converged = True
            break
        w = (np.sum(V * V, axis=-1) + delta * delta) ** ((p - 2) / 2)
        wbar = float(w.mean())

        def apply_a(x, w=w):
            return ops.grad_adj(w[..., None] * ops.grad(x))

        target, k = _pcg(apply_a, b, lambda r: ops.inv_laplace(r, wbar), u,
                         max(min(inner_tol, 0.1 * res), 1e-14), 20 * max(grid.shape) + 200)
        rep.linear_iterations += k
        D = ops.grad(target - u)
        theta = _line_search(V, D, g, p, delta)
        if theta == 0.0:
            if inner_tol <= 1e-14:
                break
            inner_tol *= 1e-3
            continue
        u = u + theta * (target - u)
        u -= u.mean()
        V = ops.grad(u)
        rep.energy_trace.append(_energy(V, g, p, delta, vol))
        rep.iterations = it
    else:
        rep.residual = _residual(ops, V, g, p, delta, gnorm)
        rep.converged = rep.residual <= prob.tol
    if not rep.converged:
        raise ConvergenceError(
            f"p-harmonic solve stalled at residual {rep.residual:.3e} (tol {prob.tol:.1e})", report=rep
        )
    return VectorField(prob.load.domain, V), rep


def potential(grad_u: VectorField) -> ScalarField:
    """Mean-zero ``u`` with spectral gradient ``grad_u`` (for gradient fields)."""
    ops = _Spectral(grad_u.grid)
    return ScalarField(grad_u.domain, ops.inv_laplace(ops.grad_adj(grad_u.values), 1.0))


def solve_potential(prob: PHarmonicProblem, **kw):
    """``(u, grad_u, report)``."""
    grad_u, rep = rp_transform(prob, **kw)
    return potential(grad_u), grad_u, rep


def weak_residual(prob: PHarmonicProblem, grad_u: VectorField, kmax: int = 4) -> float:
    """Largest normalised weak-form defect over Fourier test modes ``|m|_inf <= kmax``.

    Each term is ``|sum <a(grad u) - g, grad phi> h^n| / ||grad phi||_2``
    for ``phi = exp(i k.x)``, divided by ``||g||_2``.
    """
    grid = prob.grid
    g = prob.rhs_field()
    R = _flux(grad_u.values, prob.p, prob.reg) - g
    axes = tuple(range(grid.dim))
    Rh = np.fft.fftn(R, axes=axes)
    ks = []
    for ax, m in enumerate(grid.shape):
        k = 2 * np.pi * np.fft.fftfreq(m, d=grid.h)
        if m % 2 == 0:
            k[m // 2] = 0.0
        shape = [1] * grid.dim
        shape[ax] = m
        ks.append(k.reshape(shape))
    ints = np.meshgrid(*[np.fft.fftfreq(m, 1.0 / m) for m in grid.shape], indexing="ij")
    sel = np.max(np.abs(np.stack(ints)), axis=0) <= kmax
    kdot = np.abs(sum(k * Rh[..., j] for j, k in enumerate(ks)))
    kn = np.sqrt(sum(k**2 for k in ks))
    good = sel & (kn > 0)
    vol = grid.cell_volume
    # ||grad phi||_2 = |k| sqrt(N h^n);   ||g||_2 in the same Riemann-sum norm
    vals = kdot[good] * vol / (kn[good] * math.sqrt(grid.size * vol))
    gnorm = math.sqrt(float(np.sum(g * g)) * vol)
    return float(vals.max() / gnorm) if vals.size and gnorm > 0 else 0.0


# -- ball comparison problems ----------------------------------------------------


@dataclass(frozen=True)
class BallStencil:
    """Index bookkeeping for the forward-difference problem on a ball.

    ``interior`` are the unknowns (ball cells whose axis neighbours all lie
    in the ball); the rest of the ball is the Dirichlet ring.  ``terms`` are
    the cells whose forward-difference stencil touches an unknown, so the
    discrete energy restricted to them has the full Euler-Lagrange equation
    at every unknown.
    """

    grid: Grid
    center: tuple
    radius_cells: float
    ball: np.ndarray
    interior: np.ndarray
    terms: np.ndarray

    def sub_ball(self, tau: float) -> np.ndarray:
        """Cells of ``tau B`` whose forward stencil stays inside ``B``."""
        sub = _ball_mask(self.grid, self.center, tau * self.radius_cells)
        inside = self.ball.copy()
        for j in range(self.grid.dim):
            inside &= np.roll(self.ball, -1, axis=j)
        return sub & inside


def _ball_mask(grid: Grid, center, rc: float) -> np.ndarray:
    return Domain(grid).ball_mask(center, rc) if grid.is_torus else _box_ball(grid, center, rc)


def _box_ball(grid: Grid, center, rc):
    idx = np.indices(grid.shape)
    d2 = sum((idx[j] - center[j]) ** 2 for j in range(grid.dim))
    return d2 <= rc * rc


def ball_stencil(domain: Domain, center, radius_cells: float) -> BallStencil:
    grid = domain.grid
    center = tuple(int(c) for c in center)
    if len(center) != grid.dim:
        raise ParameterError("center has the wrong dimension")
    if grid.is_torus:
        if radius_cells + 1 > domain.max_radius_cells():
            raise DomainError("ball does not fit on the torus")
    elif not domain.boundary_cells[center] > radius_cells + 1:
        raise DomainError("ball (plus one cell of margin) is not inside the domain")
    ball = _ball_mask(grid, center, radius_cells)
    interior = ball.copy()
    for j in range(grid.dim):
        interior &= np.roll(ball, 1, axis=j) & np.roll(ball, -1, axis=j)
    if not interior.any():
        raise DomainError("ball has no interior cells")
    touch = interior.copy()
    for j in range(grid.dim):
        touch |= np.roll(interior, -1, axis=j)
    return BallStencil(grid, center, radius_cells, ball, interior, touch)


def _forward_ops(grid: Grid) -> list[sp.csr_matrix]:
    N = grid.size
    idx = np.arange(N).reshape(grid.shape)
    ops = []
    for j in range(grid.dim):
        nxt = np.roll(idx, -1, axis=j).ravel()
        rows = np.concatenate([np.arange(N), np.arange(N)])
        cols = np.concatenate([np.arange(N), nxt])
        data = np.concatenate([-np.ones(N), np.ones(N)]) / grid.h
        ops.append(sp.csr_matrix((data, (rows, cols)), shape=(N, N)))
    return ops


def fd_gradient(u: np.ndarray, grid: Grid) -> np.ndarray:
    """Forward differences (periodic index wrap)."""
    return np.stack([(np.roll(u, -1, axis=j) - u) / grid.h for j in range(grid.dim)], axis=-1)


def ball_energy(u: np.ndarray, st: BallStencil, p: float, delta: float = 0.0) -> float:
    """``sum_terms (1/p)(|D u|^2 + delta^2)^(p/2) h^n``."""
    G = fd_gradient(u, st.grid)[st.terms]
    return float(np.sum((np.sum(G * G, axis=-1) + delta * delta) ** (p / 2)) / p * st.grid.cell_volume)


def p_dirichlet_ball(u: ScalarField, center, radius_cells: float, p: float, delta: float | None = None,
                     tol: float = 1e-10, max_iter: int = 200):
    """The p-energy minimiser ``v`` on ``B`` with ``v = u`` off the interior of ``B``.

    Returns ``(v, report)``.  Frozen-weight steps are solved directly
    (sparse LU) and followed by an exact line search.
    """
    if not p > 1:
        raise ParameterError("p must exceed 1")
    st = ball_stencil(u.domain, center, radius_cells)
    grid = u.grid
    vals = np.array(u.values, dtype=float)
    if delta is None:
        delta = 1e-8 * float(np.sqrt(np.sum(fd_gradient(vals, grid)[st.ball] ** 2, axis=-1)).mean())
    rows = np.flatnonzero(st.terms.ravel())
    qcols = np.flatnonzero(st.interior.ravel())
    Ds = [D[rows] for D in _forward_ops(grid)]
    DQ = [D[:, qcols] for D in Ds]
    rep = SolveReport(delta=delta)
    flat = vals.ravel().copy()
    vol = grid.cell_volume

    def grads(x):
        return np.stack([D @ x for D in Ds], axis=-1)

    def residual(Gm):
        fl = _flux(Gm, p, delta)
        num = sum(DQ[j].T @ fl[:, j] for j in range(grid.dim))
        den = sum(abs(DQ[j]).T @ np.abs(fl[:, j]) for j in range(grid.dim))
        scale = float(np.linalg.norm(den))
        return float(np.linalg.norm(num)) / scale if scale > 0 else 0.0

    zero = np.zeros((len(rows), grid.dim))
    Gm = grads(flat)
    rep.energy_trace.append(_energy(Gm, zero, p, delta, vol))
    for it in range(1, max_iter + 1):
        rep.residual = residual(Gm)
        if rep.residual <= tol:
            rep.converged = True
            break
        w = (np.sum(Gm * Gm, axis=-1) + delta * delta) ** ((p - 2) / 2)
        W = sp.diags(w)
        L = sum(DQ[j].T @ W @ DQ[j] for j in range(grid.dim))
        fixed = flat.copy()
        fixed[qcols] = 0.0
        rhs = -sum(DQ[j].T @ (w * (Ds[j] @ fixed)) for j in range(grid.dim))
        target = flat.copy()
        target[qcols] = spsolve(L.tocsc(), rhs)
        Dd = grads(target - flat)
        theta = 1.0 if p == 2 else _line_search(Gm, Dd, zero, p, delta)
        if theta == 0.0:
            break
        flat = flat + theta * (target - flat)
        Gm = grads(flat)
        rep.energy_trace.append(_energy(Gm, zero, p, delta, vol))
        rep.iterations = it
    else:
        rep.residual = residual(Gm)
        rep.converged = rep.residual <= tol
    if not rep.converged:
        raise ConvergenceError(f"ball p-harmonic solve stalled at residual {rep.residual:.3e}", report=rep)
    return u.with_values(flat.reshape(grid.shape)), rep


# -- estimates -------------------------------------------------------------------


def _mean_pow(G: np.ndarray, p: float) -> float:
    return float(np.mean(np.sum(G * G, axis=-1) ** (p / 2))) if G.size else 0.0


def _osc(G: np.ndarray, p: float) -> float:
    return _mean_pow(G - G.mean(axis=0), p)


def fit_alpha(taus, oscs, p: float) -> float:
    """Least-squares slope of ``log osc`` against ``p log tau``."""
    taus = np.asarray(taus, dtype=float)
    oscs = np.asarray(oscs, dtype=float)
    ok = oscs > 0
    if ok.sum() < 2:
        return math.nan
    slope = np.polyfit(np.log(taus[ok]), np.log(oscs[ok]), 1)[0]
    return float(slope / p)


def check_local_estimates(prob: PHarmonicProblem, u: ScalarField, center, radius_cells: float, tau: float,
                          taus=TAU_LADDER, v: ScalarField | None = None, report: SolveReport | None = None):
    """Comparison-map estimates on ``B`` and ``tau B``.

    Returns four reports: ``locest`` (energy of ``u - v`` against the load),
    ``locest1`` (oscillation decay of ``grad v``, with ``alpha`` fitted over
    ``taus``), ``locest2`` (``u - v`` on ``tau B``) and ``locest3`` (the
    oscillation of ``grad u`` on ``tau B`` against the two-term bound).
    """
    if not 0 < tau <= 1:
        raise ParameterError("tau must lie in (0, 1]")
    p = prob.p
    n = u.grid.dim
    if v is None:
        v, _ = p_dirichlet_ball(u, center, radius_cells, p, delta=prob.reg or None)
    st = ball_stencil(u.domain, center, radius_cells)
    Gu = fd_gradient(u.values, u.grid)
    Gv = fd_gradient(v.values, u.grid)
    full = st.sub_ball(1.0)
    sub = st.sub_ball(tau)
    if not sub.any():
        raise DomainError("tau B contains no cells")
    load_p = _mean_pow(prob.load.values[st.ball], p)
    energy_u = _mean_pow(Gu[full], p)

    usable = [t for t in taus if t * radius_cells >= 2 and st.sub_ball(t).any()]
    oscs = [_osc(Gv[st.sub_ball(t)], p) for t in usable]
    alpha = fit_alpha(usable, oscs, p)
    if report is not None:
        report.alpha_estimate = alpha
    params = {"p": p, "tau": tau, "radius_cells": radius_cells, "center": tuple(center), "alpha": alpha}
    decay = tau ** (alpha * p) if math.isfinite(alpha) else math.nan

    r0 = InequalityReport("locest", _mean_pow(Gu[full] - Gv[full], p), load_p, params)
    osc_v = _osc(Gv[sub], p)
    r1 = InequalityReport("locest1", osc_v, decay * energy_u if math.isfinite(decay) else 0.0, params,
                          () if math.isfinite(decay) else ("no-alpha",))
    r2 = InequalityReport("locest2", _mean_pow(Gu[sub] - Gv[sub], p), tau ** (-n) * load_p, params)
    two_term = (decay * energy_u if math.isfinite(decay) else 0.0) + tau ** (-n) * load_p
    r3 = InequalityReport("locest3", _osc(Gu[sub], p), two_term, params)
    return [r0, r1, r2, r3]


def s_ladder(p: float) -> tuple[float, ...]:
    return (p, p + 0.5, p + 1.0, 2.0 * p)


def check_rp_bound(prob: PHarmonicProblem, grad_u: VectorField, s_values=None) -> list[InequalityReport]:
    """``||R_p f||_s`` against ``||f||_s`` for ``s >= p``."""
    out = []
    for s in s_values or s_ladder(prob.p):
        if s < prob.p:
            raise ParameterError("the uniform bound is stated for s >= p")
        out.append(InequalityReport("rp_bound", lq_norm(grad_u, s), lq_norm(prob.load, s), {"p": prob.p, "s": s}))
    return out


def check_very_weak(prob: PHarmonicProblem, grad_u: VectorField, eps_values=(0.05, 0.1, 0.2)):
    """Estimates slightly below the natural exponent.

    Per ``eps`` three reports: ``very_weak`` (``||grad u||_{p-eps}`` against
    ``||f||_{p-eps}``), ``very_weak_hodge`` (``sum |h|^s`` against
    ``eps sum |grad u|^(p-eps)``, ``s = (p-eps)/(1-eps)``) and
    ``very_weak_hodge_norm`` (``||h||_s`` against ``eps || |grad u|^(1-eps) ||_s``).
    Here ``h = T(|grad u|^(-eps) grad u - grad u)``; the subtracted gradient
    is annihilated by ``T`` so this is the divergence-free part of the
    test field, computed without the round-off of ``T grad u``.
    """
    p = prob.p
    delta = prob.reg
    vol = grad_u.grid.cell_volume
    mag2 = np.sum(grad_u.values**2, axis=-1)
    mag = np.sqrt(mag2)
    clamped = float(np.mean(mag < delta)) if delta > 0 else 0.0
    flags = ("clamped",) if clamped > 0.01 else ()
    out = []
    for eps in eps_values:
        if not 0 <= eps < min(1.0, p - 1.0):
            raise ParameterError(f"eps must lie in [0, min(1, p-1)), got {eps}")
        q = p - eps
        s = q / (1 - eps)
        params = {"p": p, "eps": eps, "s": s, "clamped_fraction": clamped}
        out.append(InequalityReport("very_weak", lq_norm(grad_u, q), lq_norm(prob.load, q), params, flags))
        weight = (mag2 + delta * delta) ** (-eps / 2) if eps > 0 else np.ones_like(mag2)
        test = grad_u.with_values((weight[..., None] - 1.0) * grad_u.values)
        h = t_apply(test)
        hn = h.pointwise_norm()
        base = np.sum(mag**q) * vol
        out.append(InequalityReport("very_weak_hodge", float(np.sum(hn**s) * vol), eps * float(base), params, flags))
        out.append(InequalityReport("very_weak_hodge_norm", float((np.sum(hn**s) * vol) ** (1 / s)),
                                    eps * float(base ** (1 / s)), params, flags))
    return out
