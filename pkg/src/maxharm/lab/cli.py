"""``maxharm`` command line: gen, run, verify, op.

Exit codes: 0 success, 1 criterion or operation failure, 2 usage/config error.
``MAXHARM_THREADS`` caps the number of corpus instances evaluated at once.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from ..errors import ConfigError, FieldFormatError, MaxHarmError
from ..fieldio import load_field, save_field
from ..grid import Domain, Grid, ScalarField, Topology, VectorField
from ..jacobian import MappingField
from .config import Config, default_config_path
from .corpus import GENERATORS, gen_corpus
from .experiments import ExperimentSpec, _literal, run_experiment, threads


def _scalar(f):
    if not isinstance(f, ScalarField):
        raise FieldFormatError(f"this operator needs a scalar field, got {f.kind}")
    return f


def _vector(f):
    if not isinstance(f, VectorField):
        raise FieldFormatError(f"this operator needs a vector field, got {f.kind}")
    return f


def _apply_op(name: str, f, args):
    from .. import maximal, spectral
    from ..jacobian import jacobian_det
    from ..pharmonic import PHarmonicProblem, rp_transform

    if name in ("max_hl", "max_sharp", "max_spherical", "max_mollified"):
        return getattr(maximal, name)(_scalar(f))
    if name == "max_interp":
        cfg = maximal.MaximalConfig.for_domain(f.domain, s_exponent=args.s)
        return maximal.max_interp(_scalar(f), cfg)
    if name == "riesz2":
        return spectral.riesz2_apply(_vector(f))
    if name == "t":
        return spectral.t_apply(_vector(f))
    if name == "czo":
        return spectral.czo_apply(_scalar(f), spectral.get_operator(args.op, f.grid.dim))
    if name == "jacobian":
        # map files hold full samples (linear part included), so never wrap
        box = Grid(f.grid.shape, f.grid.h, Topology.BOX)
        J = jacobian_det(MappingField(Domain(box), _vector(f).values))
        return ScalarField(f.domain, J.values)
    if name == "rp":
        grad_u, rep = rp_transform(PHarmonicProblem(args.p, _vector(f), tol=args.tol, max_iter=args.max_iter))
        print(json.dumps(rep.to_dict()), file=sys.stderr)
        return grad_u
    raise ConfigError(f"unknown operator {name!r}")


OPS = ("max_hl", "max_sharp", "max_spherical", "max_interp", "max_mollified", "riesz2", "t", "czo", "jacobian", "rp")


def _as_field(obj):
    if isinstance(obj, MappingField):
        vals = obj.values
        if obj.linear is not None:
            vals = vals + np.stack(obj.grid.mesh(), -1) @ obj.linear.T
        return VectorField(obj.domain, vals)
    return obj


def cmd_gen(args) -> int:
    shape = tuple(int(s) for s in args.shape.split(","))
    grid = Grid(shape, 1.0 / shape[0], Topology(args.topology))
    params = dict(kv.split("=", 1) for kv in args.param)
    params = {k: _literal(v) for k, v in params.items()}
    corpus = gen_corpus(args.generator, grid, args.seed, args.count, **params)
    os.makedirs(args.out, exist_ok=True)
    for i, obj in enumerate(corpus):
        path = os.path.join(args.out, f"{args.generator}_{i:04d}.mhf")
        save_field(_as_field(obj), path)
        print(path)
    return 0


def cmd_run(args) -> int:
    spec = ExperimentSpec.from_config(Config.read(args.spec))
    if args.out:
        spec = ExperimentSpec(**{**spec.__dict__, "output": args.out})
    report = run_experiment(spec)
    for label, row in report.summary().items():
        print(f"{label:>24s}  max {row['max']!r:>24s}  median {row['median']!r}")
    if report.refinement_pair:
        for label, (a, b) in report.refinement_pair.items():
            print(f"{label:>24s}  refinement {a!r} -> {b!r}")
    for err in report.errors:
        print(f"instance {err['instance']}: {err['error']}: {err['message']}", file=sys.stderr)
    return 0 if report.ok else 1


def cmd_verify(args) -> int:
    from .verify import run_all

    cfg = Config.read(args.config or default_config_path())
    if args.only:
        text = _override_modules(cfg, args.only)
        cfg = Config.from_string(text)
    results = run_all(cfg, verbose=args.verbose)
    if args.print_values:
        print(json.dumps({r.number: r.values for r in results}, indent=1, default=float))
    return 0 if all(r.passed for r in results) else 1


def _override_modules(cfg: Config, only: str) -> str:
    import configparser
    import io

    p = configparser.ConfigParser()
    p.read_dict({s: cfg.section(s) for s in cfg._p.sections()})
    p.set("suite", "modules", only)
    buf = io.StringIO()
    p.write(buf)
    return buf.getvalue()


def cmd_op(args) -> int:
    f = load_field(args.inp)
    out = _apply_op(args.name, f, args)
    save_field(out, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="maxharm", description="maximal operators, Jacobians and p-harmonic transforms")
    sub = ap.add_subparsers(dest="verb", required=True)

    g = sub.add_parser("gen", help="write a seeded corpus as field files")
    g.add_argument("generator", choices=sorted(GENERATORS))
    g.add_argument("--seed", type=int, default=1)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--shape", default="64,64")
    g.add_argument("--topology", choices=("torus", "box"), default="torus")
    g.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="run one experiment spec (INI)")
    r.add_argument("spec")
    r.add_argument("--out", help="override the output directory")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="run the acceptance criteria")
    v.add_argument("config", nargs="?", help="config file (default: the shipped one)")
    v.add_argument("--only", help="comma list of modules, overriding suite.modules")
    v.add_argument("--verbose", action="store_true")
    v.add_argument("--print-values", action="store_true")
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("op", help="apply one operator to a field file")
    o.add_argument("name", choices=OPS)
    o.add_argument("--in", dest="inp", required=True)
    o.add_argument("--out", required=True)
    o.add_argument("--s", type=float, default=2.0, help="exponent for max_interp")
    o.add_argument("--op", default="riesz12", help="scalar multiplier for czo")
    o.add_argument("--p", type=float, default=3.0)
    o.add_argument("--tol", type=float, default=1e-9)
    o.add_argument("--max-iter", type=int, default=200)
    o.set_defaults(func=cmd_op)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        threads()
        return args.func(args)
    except (ConfigError, FieldFormatError, FileNotFoundError) as exc:
        print(f"maxharm: {exc}", file=sys.stderr)
        return 2
    except MaxHarmError as exc:
        print(f"maxharm: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
