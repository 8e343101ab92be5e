"""Fourier multipliers on the torus: Riesz transforms, the Hodge split and commutators.

Wavevectors are physical (``2 pi m / L`` per axis).  On even-sized axes the
Nyquist component of every wavevector is set to zero, which makes the
spectral derivative real, keeps the gradient projection an exact orthogonal
projection onto the range of that derivative, and sends odd scalar symbols
(``k1 k2 / |k|^2``, ``-i sign k``) to zero on Nyquist lines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, ParameterError
from .grid import Grid, ScalarField, VectorField
from .norms import bmo_seminorm, lq_norm

LOG_FLOOR = 1e-300


def _require_torus(grid: Grid):
    if not grid.is_torus:
        raise DomainError("Fourier multipliers need a periodic (torus) domain")


def wavevectors(grid: Grid) -> list[np.ndarray]:
    """Broadcastable per-axis wavenumbers with Nyquist entries zeroed."""
    ks = []
    for ax, n in enumerate(grid.shape):
        k = 2 * np.pi * np.fft.fftfreq(n, d=grid.h)
        if n % 2 == 0:
            k[n // 2] = 0.0
        shape = [1] * grid.dim
        shape[ax] = n
        ks.append(k.reshape(shape))
    return ks


def _k2(ks) -> np.ndarray:
    k2 = sum(k**2 for k in ks)
    return k2


def _inv_k2(ks) -> np.ndarray:
    k2 = _k2(ks)
    with np.errstate(divide="ignore"):
        return np.where(k2 > 0, 1.0 / np.where(k2 > 0, k2, 1.0), 0.0)


def _fft(vals, dim):
    return np.fft.fftn(vals, axes=tuple(range(dim)))


def _ifft_real(vals_hat, dim, scale: float) -> np.ndarray:
    out = np.fft.ifftn(vals_hat, axes=tuple(range(dim)))
    resid = np.abs(out.imag).max() if out.size else 0.0
    if resid > 1e-10 * max(scale, 1e-300):
        raise RuntimeError(f"spectral operator produced an imaginary residue {resid:.3e}")
    return out.real


def _hermitian_part(sym: np.ndarray) -> np.ndarray:
    """``(m(k) + conj(m(-k))) / 2`` so that real input gives real output."""
    axes = tuple(range(sym.ndim))
    mirrored = np.roll(np.flip(sym, axis=axes), 1, axis=axes)
    return 0.5 * (sym + np.conj(mirrored))


@dataclass(frozen=True)
class MultiplierOp:
    """A translation-invariant operator given by its Fourier symbol.

    ``symbol`` maps the list of wavevector arrays to an array (scalar
    symbol) or an array with two trailing ``n x n`` axes (``matrix=True``).
    """

    name: str
    symbol: Callable[[list[np.ndarray]], np.ndarray]
    matrix: bool = False
    identity: bool = False

    def evaluate(self, grid: Grid) -> np.ndarray:
        ks = wavevectors(grid)
        sym = np.asarray(self.symbol(ks))
        if self.matrix:
            return sym
        sym = np.broadcast_to(sym, grid.shape).astype(complex)
        return _hermitian_part(sym)

    def bound(self, grid: Grid) -> float:
        sym = self.evaluate(grid)
        if self.matrix:
            return float(np.linalg.norm(sym, ord=2, axis=(-2, -1)).max())
        return float(np.abs(sym).max())


def _riesz_pair(i: int, j: int):
    def sym(ks):
        return ks[i] * ks[j] * _inv_k2(ks)

    return sym


def riesz12() -> MultiplierOp:
    """Second-order Riesz transform ``R1 R2`` up to sign: symbol ``k1 k2 / |k|^2``."""
    return MultiplierOp("riesz12", _riesz_pair(0, 1))


def hilbert() -> MultiplierOp:
    """Periodic Hilbert transform, symbol ``-i sign(k)``."""
    return MultiplierOp("hilbert", lambda ks: -1j * np.sign(ks[0]))


def identity_op() -> MultiplierOp:
    return MultiplierOp("identity", lambda ks: np.ones(np.broadcast_shapes(*[k.shape for k in ks])), identity=True)


def gradient_projection() -> MultiplierOp:
    """``k k^T / |k|^2``: the L^2 projection onto (spectral) gradient fields."""

    def sym(ks):
        n = len(ks)
        inv = _inv_k2(ks)
        shape = np.broadcast_shapes(*[k.shape for k in ks])
        out = np.empty(shape + (n, n))
        for i in range(n):
            for j in range(n):
                out[..., i, j] = ks[i] * ks[j] * inv
        return out

    return MultiplierOp("riesz2", sym, matrix=True)


def get_operator(name: str, dim: int) -> MultiplierOp:
    """Scalar operator by config name: ``riesz12``, ``hilbert`` or ``identity``."""
    if name == "riesz12":
        if dim < 2:
            raise ParameterError("riesz12 needs dimension >= 2")
        return riesz12()
    if name == "hilbert":
        if dim != 1:
            raise ParameterError("hilbert is the 1D operator")
        return hilbert()
    if name == "identity":
        return identity_op()
    raise ParameterError(f"unknown operator {name!r}")


def default_operator(dim: int) -> MultiplierOp:
    return hilbert() if dim == 1 else riesz12()


# -- vector operators ----------------------------------------------------------


def _project_gradient(vals: np.ndarray, grid: Grid) -> np.ndarray:
    ks = wavevectors(grid)
    n = grid.dim
    fh = _fft(vals, n)
    kdotf = sum(ks[j] * fh[..., j] for j in range(n)) * _inv_k2(ks)
    out = np.stack([ks[i] * kdotf for i in range(n)], axis=-1)
    return _ifft_real(out, n, float(np.abs(vals).max(initial=0.0)))


def riesz2_apply(F: VectorField) -> VectorField:
    """Gradient part of the Hodge split: symbol ``k k^T / |k|^2`` componentwise."""
    _require_torus(F.grid)
    return F.with_values(_project_gradient(F.values, F.grid))


def t_apply(F: VectorField) -> VectorField:
    """``T = I - R_2``: the divergence-free part; vanishes on gradient fields."""
    _require_torus(F.grid)
    return F.with_values(F.values - _project_gradient(F.values, F.grid))


def hodge_decompose(F: VectorField):
    """``F = grad(phi) + h`` with ``div h = 0`` and mean-zero ``phi``.

    Returns ``(grad_phi, h, phi)``.
    """
    _require_torus(F.grid)
    g = F.grid
    n = g.dim
    ks = wavevectors(g)
    fh = _fft(F.values, n)
    kdotf = sum(ks[j] * fh[..., j] for j in range(n)) * _inv_k2(ks)
    scale = float(np.abs(F.values).max(initial=0.0))
    phi = _ifft_real(-1j * kdotf, n, scale * max(g.lengths))
    grad = _ifft_real(np.stack([ks[i] * kdotf for i in range(n)], axis=-1), n, scale)
    return F.with_values(grad), F.with_values(F.values - grad), ScalarField(F.domain, phi)


def spectral_gradient(u: ScalarField) -> VectorField:
    _require_torus(u.grid)
    n = u.grid.dim
    ks = wavevectors(u.grid)
    uh = _fft(u.values, n)
    scale = float(np.abs(u.values).max(initial=0.0)) * max(float(np.abs(k).max()) for k in ks)
    vals = _ifft_real(np.stack([1j * k * uh for k in ks], axis=-1), n, scale)
    return VectorField(u.domain, vals)


def spectral_divergence(F: VectorField) -> ScalarField:
    _require_torus(F.grid)
    n = F.grid.dim
    ks = wavevectors(F.grid)
    fh = _fft(F.values, n)
    scale = float(np.abs(F.values).max(initial=0.0)) * max(float(np.abs(k).max()) for k in ks)
    return ScalarField(F.domain, _ifft_real(sum(1j * ks[j] * fh[..., j] for j in range(n)), n, scale))


# -- scalar singular integrals and commutators ---------------------------------


def _czo(vals: np.ndarray, grid: Grid, op: MultiplierOp) -> np.ndarray:
    if op.identity:
        return np.array(vals, dtype=float, copy=True)
    sym = op.evaluate(grid)
    scale = float(np.abs(vals).max(initial=0.0))
    return _ifft_real(sym * np.fft.fftn(vals), grid.dim, scale)


def czo_apply(f: ScalarField, op: MultiplierOp | None = None) -> ScalarField:
    """Apply a scalar multiplier (default: ``R1 R2`` in 2D/3D, Hilbert in 1D)."""
    _require_torus(f.grid)
    op = op or default_operator(f.grid.dim)
    if op.matrix:
        raise ParameterError(f"{op.name} has a matrix symbol; a scalar operator is needed")
    return f.with_values(_czo(f.values, f.grid, op))


@dataclass(frozen=True)
class CommutatorReport:
    kind: str
    s: float
    lhs_norm: float
    rhs_norm: float
    eps: float = 0.0
    sign: int = 1
    op: str = ""

    def __post_init__(self):
        if self.lhs_norm < 0 or self.rhs_norm < 0:
            raise ValueError("commutator norms must be nonnegative")

    @property
    def ratio(self) -> float:
        return self.lhs_norm / self.rhs_norm if self.rhs_norm > 0 else math.nan

    @property
    def degenerate(self) -> bool:
        return self.rhs_norm == 0

    def to_dict(self) -> dict:
        r = self.ratio
        return {
            "kind": self.kind,
            "s": self.s,
            "eps": self.eps,
            "sign": self.sign,
            "op": self.op,
            "lhs_norm": self.lhs_norm,
            "rhs_norm": self.rhs_norm,
            "ratio": None if math.isnan(r) else r,
        }


def _check_s(s: float):
    if not s > 1.0:
        raise ParameterError(f"commutator exponent must exceed 1, got {s}")


def xlogabsx(x: np.ndarray) -> np.ndarray:
    """``x log|x|`` with ``|x|`` clamped at 1e-300 (so 0 maps to 0)."""
    return x * np.log(np.maximum(np.abs(x), LOG_FLOOR))


def signed_power(x: np.ndarray, a: float) -> np.ndarray:
    """``|x|^(a-1) x``, written as ``sign(x) |x|^a`` so zeros stay finite."""
    return np.sign(x) * np.abs(x) ** a


def crw_field(lam: ScalarField, f: ScalarField, op: MultiplierOp | None = None) -> np.ndarray:
    op = op or default_operator(f.grid.dim)
    return _czo(lam.values * f.values, f.grid, op) - lam.values * _czo(f.values, f.grid, op)


def rw_field(f: ScalarField, op: MultiplierOp | None = None) -> np.ndarray:
    op = op or default_operator(f.grid.dim)
    Tf = _czo(f.values, f.grid, op)
    return _czo(xlogabsx(f.values), f.grid, op) - xlogabsx(Tf)


def power_field(f: ScalarField, eps: float, sign: int = 1, op: MultiplierOp | None = None) -> np.ndarray:
    op = op or default_operator(f.grid.dim)
    a = 1.0 + sign * eps
    Tf = _czo(f.values, f.grid, op)
    return _czo(signed_power(f.values, a), f.grid, op) - signed_power(Tf, a)


def commutator_crw(lam: ScalarField, f: ScalarField, op: MultiplierOp | None = None, s: float = 2.0,
                   cfg=None) -> CommutatorReport:
    """``||T(lam f) - lam T f||_s`` against ``||lam||_BMO ||f||_s``."""
    _require_torus(f.grid)
    _check_s(s)
    op = op or default_operator(f.grid.dim)
    lhs = lq_norm(f.with_values(crw_field(lam, f, op)), s)
    rhs = bmo_seminorm(lam, cfg) * lq_norm(f, s)
    return CommutatorReport("CRW", s, lhs, rhs, op=op.name)


def commutator_rw(f: ScalarField, op: MultiplierOp | None = None, s: float = 2.0) -> CommutatorReport:
    """``||T(f log|f|) - Tf log|Tf|||_s`` against ``||f||_s``."""
    _require_torus(f.grid)
    _check_s(s)
    op = op or default_operator(f.grid.dim)
    lhs = lq_norm(f.with_values(rw_field(f, op)), s)
    return CommutatorReport("RW", s, lhs, lq_norm(f, s), op=op.name)


def commutator_power(f: ScalarField, op: MultiplierOp | None = None, s: float = 2.0, eps: float = 0.1,
                     sign: int = 1) -> CommutatorReport:
    """``||T(|f|^{+-eps} f) - |Tf|^{+-eps} Tf||_s`` against ``eps ||  |f|^{1 +- eps} ||_s``.

    Requires ``0 <= eps < 1 - 1/s``.  At ``eps = 0`` both sides vanish and the
    report is degenerate.
    """
    _require_torus(f.grid)
    _check_s(s)
    if sign not in (1, -1):
        raise ParameterError("sign must be +1 or -1")
    if not 0.0 <= eps < 1.0 - 1.0 / s:
        raise ParameterError(f"eps must lie in [0, 1 - 1/s) = [0, {1 - 1 / s:.4g}), got {eps}")
    op = op or default_operator(f.grid.dim)
    lhs = lq_norm(f.with_values(power_field(f, eps, sign, op)), s)
    base = lq_norm(f.with_values(np.abs(f.values) ** (1.0 + sign * eps)), s)
    return CommutatorReport("Power", s, lhs, abs(eps) * base, eps=eps, sign=sign, op=op.name)
