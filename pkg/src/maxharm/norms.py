"""Riemann-sum norms: L^q, the BMO seminorm and the Zygmund L log L functional."""

from __future__ import annotations

import math

import numpy as np

from .errors import ParameterError
from .grid import Field, ScalarField
from .stencils import _check_center, _check_fits, _gather, ball_offsets


def lq_norm(f: Field, q: float) -> float:
    """``(sum_cells |f|^q h^n)^(1/q)`` over the domain cells.

    ``|f|`` is the absolute value, the Euclidean norm of a vector, or the
    spectral norm of a matrix.
    """
    q = float(q)
    if not q >= 1.0:
        raise ParameterError(f"q must be >= 1, got {q}")
    if not math.isfinite(q):
        raise ParameterError("q must be finite")
    a = f.pointwise_norm()[f.domain.mask]
    total = np.sum(a if q == 1.0 else a**q) * f.grid.cell_volume
    return float(total ** (1.0 / q))


def integral(f: ScalarField) -> float:
    """``sum_cells f h^n`` over the domain."""
    return float(np.sum(f.values[f.domain.mask]) * f.grid.cell_volume)


def bmo_seminorm(f: ScalarField, cfg=None) -> float:
    """Largest mean oscillation over every admissible centered ball of the ladder."""
    from .maximal import max_sharp

    osc = max_sharp(f, cfg).values[f.domain.mask]
    return float(osc.max()) if osc.size else 0.0


def llogl_norm(F: ScalarField, center, r: float) -> float:
    """``int_B F log(e + F/F_B)`` on the ball ``B(center, r)``.

    Returns 0 when ``F`` vanishes identically on the ball.
    """
    center = _check_center(F.domain, center)
    rc = r / F.grid.h
    _check_fits(F.domain, center, rc, "ball")
    vals = _gather(F, center, ball_offsets(F.domain.dim, rc))
    if np.any(vals < 0):
        raise ParameterError("L log L functional needs a nonnegative density")
    mean = vals.mean()
    if mean == 0.0:
        return 0.0
    return float(np.sum(vals * np.log(math.e + vals / mean)) * F.grid.cell_volume)
