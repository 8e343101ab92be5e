"""Centered maximal operators on a radius ladder, and the discrete H^1 norm.

Every operator takes a maximum over the same finite set of radii, so the
vectorised ``FAST`` kernels and the per-cell ``BRUTE`` loops agree bit for
bit: both add stencil values in the canonical offset order of
:mod:`maxharm.stencils` and apply identical floating point operations
afterwards.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import signal

from .errors import ParameterError
from .grid import Domain, ScalarField
from .stencils import Mollifier, StencilSet


class Mode(enum.Enum):
    FAST = "fast"
    BRUTE = "brute"


@dataclass(frozen=True)
class MaximalConfig:
    """Radius ladder, evaluation mode and operator parameters.

    ``s_exponent`` may be ``math.inf``.
    """

    stencils: StencilSet
    mode: Mode = Mode.FAST
    s_exponent: float = 2.0
    mollifier: Mollifier | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        s = float(self.s_exponent)
        if not s >= 1.0:
            raise ParameterError(f"s exponent must lie in [1, inf], got {s}")
        object.__setattr__(self, "s_exponent", s)
        if self.mollifier is None:
            object.__setattr__(self, "mollifier", Mollifier(self.stencils.dim))

    @classmethod
    def for_domain(cls, domain: Domain, growth: float | None = 1.25, **kw) -> "MaximalConfig":
        return cls(StencilSet.for_domain(domain, growth), **kw)

    def with_s(self, s: float) -> "MaximalConfig":
        return replace(self, s_exponent=s)

    def with_mode(self, mode) -> "MaximalConfig":
        return replace(self, mode=Mode(mode))


def _config(f: ScalarField, cfg: MaximalConfig | None) -> MaximalConfig:
    if cfg is None:
        return MaximalConfig.for_domain(f.domain)
    if cfg.stencils.dim != f.domain.dim:
        raise ParameterError("stencil dimension does not match the field")
    return cfg


class _Shifter:
    """Strided views of an array shifted by integer offsets.

    Torus arrays are wrap-padded; box arrays are zero-padded (only reached by
    stencils that are discarded as inadmissible).
    """

    def __init__(self, arr: np.ndarray, domain: Domain, reach: int):
        self.shape = arr.shape
        self.reach = reach
        mode = "wrap" if domain.grid.is_torus else "constant"
        self.padded = np.pad(arr, reach, mode=mode)

    def view(self, o) -> np.ndarray:
        R = self.reach
        return self.padded[tuple(slice(R + int(d), R + int(d) + n) for d, n in zip(o, self.shape))]


def _masked_abs(f: ScalarField) -> np.ndarray:
    return np.where(f.domain.mask, np.abs(f.values), 0.0)


def _ball_admissible(domain: Domain, r: int) -> np.ndarray:
    return domain.admissible(r)


def _shell_admissible(domain: Domain, st: StencilSet, k: int) -> np.ndarray:
    if domain.grid.is_torus:
        return np.full(domain.grid.shape, st.radii_cells[k] <= domain.max_radius_cells())
    return domain.mask & (domain.boundary_cells > st.shell_reach(k))


def _cells(domain: Domain):
    return [tuple(int(i) for i in idx) for idx in np.argwhere(domain.mask)]


def _gather_cell(vals: np.ndarray, domain: Domain, x, offs) -> list[float]:
    shape = vals.shape
    out = []
    torus = domain.grid.is_torus
    for o in offs:
        idx = tuple(xi + int(oi) for xi, oi in zip(x, o))
        if torus:
            idx = tuple(i % n for i, n in zip(idx, shape))
        elif any(i < 0 or i >= n for i, n in zip(idx, shape)):
            raise AssertionError("brute force touched a cell outside the grid")
        out.append(vals[idx])
    return out


# -- Hardy-Littlewood ---------------------------------------------------------


def max_hl(f: ScalarField, cfg: MaximalConfig | None = None) -> ScalarField:
    """Centered Hardy-Littlewood maximal function ``sup_r avg_{B(x,r)} |f|``.

    The ladder contains ``r = 0`` so the result dominates ``|f|`` exactly.
    """
    cfg = _config(f, cfg)
    absf = _masked_abs(f)
    if cfg.mode is Mode.BRUTE:
        return f.with_values(_brute_hl(absf, f.domain, cfg.stencils))
    st, dom = cfg.stencils, f.domain
    sh = _Shifter(absf, dom, st.max_cells)
    acc = np.zeros(absf.shape)
    out = np.zeros(absf.shape)
    start = 0
    for k, r in enumerate(st.radii_cells):
        adm = _ball_admissible(dom, r)
        if not adm.any():
            break
        stop = st.ball_count[k]
        for o in st.offsets[start:stop]:
            acc += sh.view(o)
        start = stop
        avg = acc / float(stop)
        out = np.where(adm, np.maximum(out, avg), out)
    return f.with_values(out)


def _brute_hl(absf, dom, st):
    out = np.zeros(absf.shape)
    for x in _cells(dom):
        best = 0.0
        for k, r in enumerate(st.radii_cells):
            if not _ball_admissible(dom, r)[x]:
                continue
            count = st.ball_count[k]
            s = 0.0
            for v in _gather_cell(absf, dom, x, st.offsets[:count]):
                s += v
            best = max(best, s / float(count))
        out[x] = best
    return out


# -- Fefferman sharp ----------------------------------------------------------


def max_sharp(f: ScalarField, cfg: MaximalConfig | None = None) -> ScalarField:
    """Sharp maximal function ``sup_{r>0} avg_B |f - f_B|`` over centered balls."""
    cfg = _config(f, cfg)
    vals = np.where(f.domain.mask, f.values, 0.0)
    if cfg.mode is Mode.BRUTE:
        return f.with_values(_brute_sharp(vals, f.domain, cfg.stencils))
    st, dom = cfg.stencils, f.domain
    sh = _Shifter(vals, dom, st.max_cells)
    out = np.zeros(vals.shape)
    for k, r in enumerate(st.radii_cells):
        if r == 0:
            continue
        adm = _ball_admissible(dom, r)
        if not adm.any():
            break
        count = st.ball_count[k]
        offs = st.offsets[:count]
        acc = np.zeros(vals.shape)
        for o in offs:
            acc += sh.view(o)
        mean = acc / float(count)
        dev = np.zeros(vals.shape)
        for o in offs:
            dev += np.abs(sh.view(o) - mean)
        osc = dev / float(count)
        out = np.where(adm, np.maximum(out, osc), out)
    return f.with_values(out)


def _brute_sharp(vals, dom, st):
    out = np.zeros(vals.shape)
    for x in _cells(dom):
        best = 0.0
        for k, r in enumerate(st.radii_cells):
            if r == 0 or not _ball_admissible(dom, r)[x]:
                continue
            count = st.ball_count[k]
            ys = _gather_cell(vals, dom, x, st.offsets[:count])
            s = 0.0
            for v in ys:
                s += v
            mean = s / float(count)
            d = 0.0
            for v in ys:
                d += abs(v - mean)
            best = max(best, d / float(count))
        out[x] = best
    return out


# -- spherical and the interpolating family -----------------------------------


def _shell_means_fast(absf, dom, st):
    """Yield ``(k, admissible, shell mean)`` for every positive ladder radius."""
    sh = _Shifter(absf, dom, st.max_cells)
    for k, r in enumerate(st.radii_cells):
        if r == 0:
            continue
        adm = _shell_admissible(dom, st, k)
        if not adm.any():
            break
        lo, hi = st.shell_slices[k]
        acc = np.zeros(absf.shape)
        for o in st.offsets[lo:hi]:
            acc += sh.view(o)
        yield k, adm, acc / float(hi - lo)


def _shell_mean_cell(absf, dom, st, x, k):
    lo, hi = st.shell_slices[k]
    s = 0.0
    for v in _gather_cell(absf, dom, x, st.offsets[lo:hi]):
        s += v
    return s / float(hi - lo)


def max_spherical(f: ScalarField, cfg: MaximalConfig | None = None) -> ScalarField:
    """Spherical maximal function ``sup_{r>0} avg_{dB(x,r)} |f|``.

    In 1D the sphere is the pair of points ``x +- r``.  Cells where no
    positive radius is admissible get 0.
    """
    cfg = _config(f, cfg)
    absf = _masked_abs(f)
    st, dom = cfg.stencils, f.domain
    out = np.zeros(absf.shape)
    if cfg.mode is Mode.BRUTE:
        for x in _cells(dom):
            best = 0.0
            for k, r in enumerate(st.radii_cells):
                if r == 0 or not _shell_admissible(dom, st, k)[x]:
                    continue
                best = max(best, _shell_mean_cell(absf, dom, st, x, k))
            out[x] = best
        return f.with_values(out)
    for _, adm, mean in _shell_means_fast(absf, dom, st):
        out = np.where(adm, np.maximum(out, mean), out)
    return f.with_values(out)


def _radial_weights(st: StencilSet) -> list[float]:
    """Radial measure of each ladder interval: ``r_k^n - r_{k-1}^n`` in cell units."""
    n = st.dim
    w = [0.0]
    for a, b in zip(st.radii_cells, st.radii_cells[1:]):
        w.append(float(b**n - a**n))
    return w


def _spow(x: np.ndarray, s: float) -> np.ndarray:
    return x if s == 1.0 else np.power(x, s)


def max_interp(f: ScalarField, cfg: MaximalConfig | None = None) -> ScalarField:
    """The one-parameter family between the ball (s=1) and spherical (s=inf) operators.

    At radius ``t`` the value is ``[t^-n sum_{r<=t} (r^n - r_prev^n) S_r^s]^(1/s)``
    where ``S_r`` is the shell mean of ``|f|``; the maximum is taken over
    admissible ``t`` in the ladder.  The radial weights are the exact measure
    of each ladder interval, so constants are reproduced exactly.
    """
    cfg = _config(f, cfg)
    s = cfg.s_exponent
    if math.isinf(s):
        return max_spherical(f, cfg)
    absf = _masked_abs(f)
    st, dom = cfg.stencils, f.domain
    weights = _radial_weights(st)
    n = st.dim
    out = np.zeros(absf.shape)
    if cfg.mode is Mode.BRUTE:
        for x in _cells(dom):
            best = 0.0
            for kt, t in enumerate(st.radii_cells):
                if t == 0 or not _shell_admissible(dom, st, kt)[x]:
                    continue
                acc = 0.0
                for k in range(1, kt + 1):
                    mean = _shell_mean_cell(absf, dom, st, x, k)
                    acc += weights[k] * _spow(np.array([mean]), s)[0]
                val = _spow(np.array([acc / float(t**n)]), 1.0 / s)[0]
                best = max(best, val)
            out[x] = best
        return f.with_values(out)
    acc = np.zeros(absf.shape)
    for k, adm, mean in _shell_means_fast(absf, dom, st):
        acc = acc + weights[k] * _spow(mean, s)
        val = _spow(acc / float(st.radii_cells[k] ** n), 1.0 / s)
        out = np.where(adm, np.maximum(out, val), out)
    return f.with_values(out)


# -- mollified maximal function and H^1 ---------------------------------------


def _mollify_fast(vals, dom: Domain, offs, w) -> np.ndarray:
    shape = vals.shape
    if dom.grid.is_torus:
        ker = np.zeros(shape)
        idx = tuple((offs % np.asarray(shape)).T)
        np.add.at(ker, idx, w)
        # kernel is even, so correlation and convolution coincide
        return np.real(np.fft.ifftn(np.fft.fftn(vals) * np.fft.fftn(ker)))
    R = int(np.abs(offs).max()) if len(offs) else 0
    ker = np.zeros((2 * R + 1,) * dom.dim)
    np.add.at(ker, tuple((offs + R).T), w)
    if R == 0:
        return vals * ker.flat[0]
    return signal.fftconvolve(vals, ker, mode="same")


def _mollify_brute(vals, dom: Domain, offs, w, cells) -> np.ndarray:
    out = np.zeros(vals.shape)
    for x in cells:
        ys = _gather_cell(vals, dom, x, offs)
        out[x] = float(np.dot(ys, w))
    return out


def mollified_scales(f: ScalarField, cfg: MaximalConfig | None = None):
    """Yield ``(t_cells, admissible, F * Phi_t)`` over the positive ladder radii."""
    cfg = _config(f, cfg)
    st, dom = cfg.stencils, f.domain
    vals = np.where(dom.mask, f.values, 0.0)
    for r in st.radii_cells:
        if r == 0 or r > dom.max_radius_cells():
            continue
        adm = dom.admissible(r)
        if not adm.any():
            break
        offs, w = cfg.mollifier.weights(r)
        if cfg.mode is Mode.BRUTE:
            conv = _mollify_brute(vals, dom, offs, w, [tuple(i) for i in np.argwhere(adm)])
        else:
            conv = _mollify_fast(vals, dom, offs, w)
        yield r, adm, conv


def max_mollified(F: ScalarField, cfg: MaximalConfig | None = None) -> ScalarField:
    """``sup_t |F * Phi_t|`` over admissible scales ``0 < t < dist(x, dOmega)``.

    The absolute value is taken after convolving, so cancellation survives.
    Cells with no admissible scale (box cells touching the boundary) get 0;
    :func:`starved_cells` reports them.
    """
    out = np.zeros(F.grid.shape)
    for _, adm, conv in mollified_scales(F, cfg):
        out = np.where(adm, np.maximum(out, np.abs(conv)), out)
    return F.with_values(out)


def starved_cells(domain: Domain, cfg: MaximalConfig | None = None) -> np.ndarray:
    """Domain cells with no admissible mollifier scale."""
    st = cfg.stencils if cfg is not None else StencilSet.for_domain(domain)
    positive = [r for r in st.radii_cells if r > 0]
    if not positive:
        return domain.mask.copy()
    return domain.mask & ~domain.admissible(positive[0])


def h1_norm(F: ScalarField, cfg: MaximalConfig | None = None) -> float:
    """Discrete Hardy-space norm: the L^1 norm of the mollified maximal function."""
    from .norms import lq_norm

    return lq_norm(max_mollified(F, cfg), 1.0)
