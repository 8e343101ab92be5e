"""Inequality sweeps over seeded corpora.

An experiment draws a corpus, evaluates one inequality on every instance at
every ladder point, and summarises the ratios (max and median per ladder
point).  With ``refine_shape`` the whole sweep is repeated on a finer grid of
the same physical size so the two maxima can be compared.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, MaxHarmError, ParameterError
from ..grid import Grid, ScalarField, Topology, VectorField
from ..jacobian import (
    MappingField,
    check_bmo_pairing,
    check_dual_log,
    check_hardy_bound,
    check_isoperimetric,
    check_llogl,
)
from ..maximal import max_hl, max_sharp, max_spherical
from ..norms import lq_norm
from ..pharmonic import PHarmonicProblem, check_local_estimates, check_rp_bound, check_very_weak, solve_potential
from ..reports import InequalityReport
from ..spectral import commutator_crw, commutator_power, commutator_rw
from .corpus import gen_corpus


def threads() -> int:
    """Worker count from ``MAXHARM_THREADS`` (default 1)."""
    raw = os.environ.get("MAXHARM_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"MAXHARM_THREADS={raw!r} is not an integer") from exc
    return max(n, 1)


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    inequality: str
    generator: str
    seed: int
    count: int
    shape: tuple
    topology: str = "torus"
    ladder: tuple = ()
    params: dict = field(default_factory=dict)
    gen_params: dict = field(default_factory=dict)
    refine_shape: tuple | None = None
    output: str | None = None

    def __post_init__(self):
        if self.inequality not in INEQUALITIES:
            raise ConfigError(f"unknown inequality {self.inequality!r}; choose from {sorted(INEQUALITIES)}")
        if self.topology not in ("torus", "box"):
            raise ConfigError(f"topology must be torus or box, got {self.topology!r}")

    def grid(self, shape=None) -> Grid:
        shape = tuple(shape or self.shape)
        return Grid(shape, 1.0 / shape[0], Topology(self.topology))

    @classmethod
    def from_config(cls, cfg, section: str = "experiment") -> "ExperimentSpec":
        refine = cfg.get(section, "refine_shape", "")
        gen_params = {}
        if cfg.has("generator"):
            gen_params = {k: _literal(v) for k, v in cfg.section("generator").items()}
        params = {}
        if cfg.has("params"):
            params = {k: _literal(v) for k, v in cfg.section("params").items()}
        ladder = cfg.get(section, "ladder", "")
        return cls(
            name=cfg.raw(section, "name"),
            inequality=cfg.raw(section, "inequality"),
            generator=cfg.raw(section, "generator"),
            seed=cfg.int(section, "seed"),
            count=cfg.int(section, "count"),
            shape=tuple(cfg.ints(section, "shape")),
            topology=cfg.get(section, "topology", "torus"),
            ladder=tuple(float(x) for x in ladder.split(",") if x.strip()),
            params=params,
            gen_params=gen_params,
            refine_shape=tuple(int(x) for x in refine.split(",")) if refine else None,
            output=cfg.get(section, "output", "") or None,
        )


def _literal(text: str):
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    if text.lower() in ("none", ""):
        return None
    return text


# -- inequality drivers: (instance, ladder, params) -> [(label, report)] ------------


def _need(obj, cls, what):
    if not isinstance(obj, cls):
        raise ParameterError(f"{what} needs a {cls.__name__} corpus, got {type(obj).__name__}")
    return obj


def _maximal1(f, ladder, prm):
    _need(f, ScalarField, "maximal1")
    M = max_hl(f)
    out = []
    for q in ladder:
        if not q > 1:
            raise ParameterError("maximal1 needs q > 1")
        out.append((f"q={q!r}", InequalityReport("maximal1", lq_norm(M, q), lq_norm(f, q) / (q - 1), {"q": q})))
    return out


def _maximal2(f, ladder, prm):
    _need(f, ScalarField, "maximal2")
    f = f.with_values(f.values - f.values[f.domain.mask].mean() * f.domain.mask)
    M, S = max_hl(f), max_sharp(f)
    return [(f"q={q!r}", InequalityReport("maximal2", lq_norm(M, q), lq_norm(S, q), {"q": q})) for q in ladder]


def _maximal3(f, ladder, prm):
    _need(f, ScalarField, "maximal3")
    S = max_spherical(f)
    return [(f"s={s!r}", InequalityReport("maximal3", lq_norm(S, s), lq_norm(f, s), {"s": s})) for s in ladder]


def _as_map(f):
    return _need(f, MappingField, "Jacobian inequalities")


def _center(grid):
    return tuple(n // 2 for n in grid.shape)


def _isoperimetric(f, ladder, prm):
    _as_map(f)
    return [(f"r={r!r}", check_isoperimetric(f, _center(f.grid), r)) for r in ladder]


def _hardy(f, ladder, prm):
    return [("-", check_hardy_bound(_as_map(f)))]


def _chain_rows(ch, label):
    return [(f"{label}:link{i}", rep) for i, rep in enumerate(ch.links)]


def _llogl(f, ladder, prm):
    _as_map(f)
    return [row for r in ladder for row in _chain_rows(check_llogl(f, _center(f.grid), r), f"r={r!r}")]


def _dual_log(f, ladder, prm):
    _as_map(f)
    return [row for r in ladder for row in _chain_rows(check_dual_log(f, _center(f.grid), r), f"r={r!r}")]


def _log_field(grid, center):
    d = np.sqrt(sum((c - x) ** 2 for c, x in zip(grid.mesh(), center)))
    return ScalarField(grid, np.log(np.maximum(d, grid.h)))


def _bmo_pairing(f, ladder, prm):
    _as_map(f)
    phi = _log_field(f.grid, [0.5 * L for L in f.grid.lengths])
    return [("-", check_bmo_pairing(f, phi))]


def _as_report(rep, name):
    return InequalityReport(name, rep.lhs_norm, rep.rhs_norm, {k: v for k, v in rep.to_dict().items()
                                                                if k in ("s", "eps", "sign", "op")})


def _crw(f, ladder, prm):
    _need(f, ScalarField, "crw")
    lam = _log_field(f.grid, [0.5 * L for L in f.grid.lengths])
    return [(f"s={s!r}", _as_report(commutator_crw(lam, f, s=s), "crw")) for s in ladder]


def _rw(f, ladder, prm):
    _need(f, ScalarField, "rw")
    return [(f"s={s!r}", _as_report(commutator_rw(f, s=s), "rw")) for s in ladder]


def _power(f, ladder, prm):
    _need(f, ScalarField, "power")
    s = float(prm.get("s", 2.0))
    sign = int(prm.get("sign", 1))
    return [(f"eps={e!r}", _as_report(commutator_power(f, s=s, eps=e, sign=sign), "power")) for e in ladder]


def _problem(f, prm):
    _need(f, VectorField, "p-harmonic inequalities")
    return PHarmonicProblem(float(prm.get("p", 3.0)), f, tol=float(prm.get("tol", 1e-9)),
                            max_iter=int(prm.get("max_iter", 200)))


def _rp_bound(f, ladder, prm):
    prob = _problem(f, prm)
    _, G, _ = solve_potential(prob)
    return [(f"s={r.params['s']!r}", r) for r in check_rp_bound(prob, G, tuple(ladder) or None)]


def _very_weak(f, ladder, prm):
    prob = _problem(f, prm)
    _, G, _ = solve_potential(prob)
    return [(f"eps={r.params['eps']!r}:{r.name}", r) for r in check_very_weak(prob, G, tuple(ladder))]


def _locest(f, ladder, prm):
    prob = _problem(f, prm)
    u, _, rep = solve_potential(prob)
    rc = float(prm.get("radius", 0.25)) / f.grid.h
    out = []
    for tau in ladder:
        for r in check_local_estimates(prob, u, _center(f.grid), rc, tau, report=rep):
            out.append((f"tau={tau!r}:{r.name}", r))
    return out


INEQUALITIES = {
    "maximal1": _maximal1,
    "maximal2": _maximal2,
    "maximal3": _maximal3,
    "isoperimetric": _isoperimetric,
    "hardy_bound": _hardy,
    "llogl": _llogl,
    "dual_log": _dual_log,
    "bmo_pairing": _bmo_pairing,
    "crw": _crw,
    "rw": _rw,
    "power": _power,
    "rp_bound": _rp_bound,
    "very_weak": _very_weak,
    "locest": _locest,
}


# -- reports -------------------------------------------------------------------------


@dataclass
class ConstantReport:
    experiment: str
    rows: list = field(default_factory=list)  # (instance, label, InequalityReport)
    errors: list = field(default_factory=list)  # {"instance", "error", "message"}
    refinement_pair: dict | None = None  # label -> (max at shape, max at refine_shape)
    warnings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def summary(self) -> dict:
        """``label -> {"max", "median", "count"}`` over finite ratios."""
        groups: dict = {}
        for _, label, rep in self.rows:
            groups.setdefault(label, []).append(rep.ratio)
        out = {}
        for label, rs in groups.items():
            finite = [r for r in rs if math.isfinite(r)]
            out[label] = {
                "max": max(finite) if finite else None,
                "median": float(np.median(finite)) if finite else None,
                "count": len(rs),
            }
        return out

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "instances": [{"instance": i, "ladder_point": lab, **rep.to_dict()} for i, lab, rep in self.rows],
            "summary": self.summary(),
            "refinement_pair": self.refinement_pair,
            "errors": list(self.errors),
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, default=_jsonable)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["instance", "ladder-point", "lhs", "rhs", "ratio"])
        for i, lab, rep in self.rows:
            ratio = rep.ratio
            w.writerow([i, lab, repr(rep.lhs), repr(rep.rhs), repr(ratio) if math.isfinite(ratio) else "nan"])
        return buf.getvalue()

    def write(self, directory) -> tuple[str, str]:
        os.makedirs(directory, exist_ok=True)
        jpath = os.path.join(directory, f"{self.experiment}.json")
        cpath = os.path.join(directory, f"{self.experiment}.csv")
        with open(jpath, "w") as fh:
            fh.write(self.to_json())
        with open(cpath, "w") as fh:
            fh.write(self.to_csv())
        return jpath, cpath


def _jsonable(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.ndarray, tuple)):
        return list(obj)
    return str(obj)


def _sweep(spec: ExperimentSpec, shape) -> tuple[list, list]:
    grid = spec.grid(shape)
    corpus = gen_corpus(spec.generator, grid, spec.seed, spec.count, **spec.gen_params)
    fn = INEQUALITIES[spec.inequality]

    def one(item):
        i, inst = item
        try:
            return i, fn(inst, list(spec.ladder), spec.params), None
        except (MaxHarmError, ValueError, ArithmeticError) as exc:
            return i, [], {"instance": i, "error": type(exc).__name__, "message": str(exc)}

    with ThreadPoolExecutor(max_workers=threads()) as pool:
        results = list(pool.map(one, enumerate(corpus)))
    rows, errors = [], []
    for i, reps, err in results:  # merge in instance order
        rows.extend((i, lab, rep) for lab, rep in reps)
        if err:
            errors.append(err)
    return rows, errors


def run_experiment(spec: ExperimentSpec) -> ConstantReport:
    """Run the sweep; write ``<output>/<name>.json`` and ``.csv`` when ``output`` is set."""
    report = ConstantReport(spec.name)
    if spec.count == 0:
        msg = f"experiment {spec.name}: empty corpus"
        warnings.warn(msg)
        report.warnings.append(msg)
    else:
        report.rows, report.errors = _sweep(spec, spec.shape)
        if spec.refine_shape:
            rows2, errors2 = _sweep(spec, spec.refine_shape)
            report.errors.extend({**e, "refined": True} for e in errors2)
            fine = ConstantReport(spec.name, rows2).summary()
            coarse = report.summary()
            report.refinement_pair = {
                lab: (coarse[lab]["max"], fine.get(lab, {}).get("max")) for lab in coarse
            }
    if spec.output:
        report.write(spec.output)
    return report
