"""Seeded test-field generators.

Instance ``i`` of a corpus draws from ``CounterRNG(seed, stream=i)``, so it
does not depend on how many instances are requested.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ConfigError, ParameterError
from ..grid import Domain, Grid, ScalarField, VectorField
from ..jacobian import MappingField
from .rng import CounterRNG


def _domain(where) -> Domain:
    return where if isinstance(where, Domain) else Domain(where)


def _unit_coords(grid: Grid) -> list[np.ndarray]:
    """Cell coordinates scaled to [0, 1) per axis."""
    return [c / L for c, L in zip(grid.mesh(), grid.lengths)]


def _offsets(grid: Grid, center) -> list[np.ndarray]:
    """Signed per-axis distance (unit coordinates) to ``center``; periodic on a torus."""
    out = []
    for c, x0 in zip(_unit_coords(grid), center):
        d = c - x0
        if grid.is_torus:
            d = d - np.round(d)
        out.append(d)
    return out


def _modes(dim: int, degree: int) -> list[tuple[int, ...]]:
    modes = [m for m in np.ndindex(*(2 * degree + 1,) * dim)]
    return [tuple(k - degree for k in m) for m in modes if any(k != degree for k in m)]


def _trig_values(grid: Grid, rng: CounterRNG, degree: int) -> np.ndarray:
    X = _unit_coords(grid)
    out = np.zeros(grid.shape)
    for m in _modes(grid.dim, degree):
        a, ph = rng.normal(1)[0], rng.uniform(1, 0.0, 2 * np.pi)[0]
        k2 = sum(k * k for k in m)
        arg = 2 * np.pi * sum(k * x for k, x in zip(m, X)) + ph
        out += a * np.cos(arg) / (1.0 + k2)
    return out


def window(grid: Grid, center, support: float) -> np.ndarray:
    """Product of ``cos^2(pi d / (2 support))`` over axes, zero for ``|d| >= support``."""
    w = np.ones(grid.shape)
    for d in _offsets(grid, center):
        w = w * np.where(np.abs(d) < support, np.cos(np.pi * d / (2 * support)) ** 2, 0.0)
    return w


def trig(where, rng: CounterRNG, degree: int = 4, support: float | None = None, vector: bool = False):
    """Random trigonometric polynomial, coefficients ``N(0,1)/(1+|m|^2)``.

    With ``support`` the polynomial is multiplied by a smooth window of
    that half-width (unit coordinates) around a random centre.
    """
    dom = _domain(where)
    g = dom.grid
    comps = [_trig_values(g, rng, degree) for _ in range(g.dim if vector else 1)]
    if support is not None:
        c = rng.uniform(g.dim, 0.25, 0.75) if not g.is_torus else rng.uniform(g.dim)
        w = window(g, c, support)
        comps = [v * w for v in comps]
    comps = [np.where(dom.mask, v, 0.0) for v in comps]
    return VectorField(dom, np.stack(comps, -1)) if vector else ScalarField(dom, comps[0])


def bump(where, rng: CounterRNG, count: int = 3):
    """Sum of truncated Gaussians ``(exp(-d^2/2s^2) - exp(-9/2))_+``, ``s`` in [0.03, 0.1]."""
    dom = _domain(where)
    g = dom.grid
    out = np.zeros(g.shape)
    for _ in range(count):
        c = rng.uniform(g.dim, 0.2, 0.8)
        s = rng.uniform(1, 0.03, 0.1)[0]
        a = rng.normal(1)[0]
        d2 = sum(d * d for d in _offsets(g, c))
        out += a * np.maximum(np.exp(-d2 / (2 * s * s)) - math.exp(-4.5), 0.0)
    return ScalarField(dom, np.where(dom.mask, out, 0.0))


def rectangle(grid: Grid, rng: CounterRNG, max_side: float):
    lo = rng.uniform(grid.dim, 0.1, 0.9 - max_side)
    side = rng.uniform(grid.dim, 0.25 * max_side, max_side)
    return lo, lo + side


def indicator(where, rng: CounterRNG, max_side: float = 0.25):
    """Indicator of one random axis-parallel rectangle (unit coordinates).

    The exact rectangle is stored in ``field.rect = (lo, hi)``.
    """
    dom = _domain(where)
    g = dom.grid
    lo, hi = rectangle(g, rng, max_side)
    inside = np.ones(g.shape, bool)
    for x, a, b in zip(_unit_coords(g), lo, hi):
        inside &= (x >= a) & (x < b)
    f = ScalarField(dom, np.where(dom.mask & inside, 1.0, 0.0))
    f.rect = (lo * np.array(g.lengths), hi * np.array(g.lengths))
    return f


def logbmo(where, rng: CounterRNG):
    """``log max(|x - x0|, h)`` with a random ``x0`` (periodic distance on a torus)."""
    dom = _domain(where)
    g = dom.grid
    c = rng.uniform(g.dim, 0.25, 0.75)
    d = np.sqrt(sum((o * L) ** 2 for o, L in zip(_offsets(g, c), g.lengths)))
    return ScalarField(dom, np.where(dom.mask, np.log(np.maximum(d, g.h)), 0.0))


def linmap(where, rng: CounterRNG):
    """``x -> A x`` with Gaussian ``A``, column 0 flipped if needed so ``det A > 0``."""
    dom = _domain(where)
    n = dom.dim
    A = rng.normal(n * n).reshape(n, n)
    if np.linalg.det(A) < 0:
        A[:, 0] *= -1
    return MappingField.linear_map(dom, A)


def diffeo(where, rng: CounterRNG, degree: int = 2, strength: float = 0.45):
    """``x -> x + g(x)`` with a periodic trigonometric displacement.

    Each mode contributes ``a (2 pi |m| / L) |e|`` to a bound on the
    Frobenius norm of ``Dg``; coefficients are rescaled so the bound is
    ``strength < 1/2``.  Then ``|Dg| < 1/2`` everywhere and ``J > 0``.
    """
    if not 0 < strength < 0.5:
        raise ParameterError("strength must lie in (0, 1/2)")
    dom = _domain(where)
    g = dom.grid
    n = g.dim
    L = min(g.lengths)
    X = _unit_coords(g)
    terms = []
    bound = 0.0
    for m in _modes(n, degree):
        if sum(k * k for k in m) == 0:
            continue
        a = rng.normal(1)[0]
        e = rng.normal(n)
        e /= np.linalg.norm(e)
        ph = rng.uniform(1, 0.0, 2 * np.pi)[0]
        terms.append((a, m, e, ph))
        bound += abs(a) * 2 * np.pi * math.sqrt(sum(k * k for k in m)) / L
    scale = strength / bound
    disp = np.zeros(g.shape + (n,))
    for a, m, e, ph in terms:
        arg = 2 * np.pi * sum(k * x for k, x in zip(m, X)) + ph
        disp += (scale * a * np.sin(arg))[..., None] * e
    if g.is_torus:
        return MappingField(dom, disp, np.eye(n))
    return MappingField(dom, np.stack(g.mesh(), -1) + disp)


GENERATORS = {
    "trig": trig,
    "bump": bump,
    "indicator": indicator,
    "logbmo": logbmo,
    "linmap": linmap,
    "diffeo": diffeo,
}


def gen_corpus(name: str, where, seed: int, count: int, **params) -> list:
    """``count`` instances of generator ``name`` on a grid or domain."""
    if name not in GENERATORS:
        raise ConfigError(f"unknown generator {name!r}; choose from {sorted(GENERATORS)}")
    if count < 0:
        raise ConfigError("count must be nonnegative")
    gen = GENERATORS[name]
    return [gen(where, CounterRNG(seed, i), **params) for i in range(count)]
