"""Run the acceptance criteria selected by a config and report one line each."""

from __future__ import annotations

import sys
import time

from ..errors import ConfigError
from .acceptance import MODULES, CriterionResult, run_criterion
from .config import Config


def selected_criteria(cfg: Config) -> list[int]:
    mods = cfg.words("suite", "modules")
    if mods == ["all"]:
        return sorted(i for nums in MODULES.values() for i in nums)
    unknown = [m for m in mods if m not in MODULES]
    if unknown:
        raise ConfigError(f"suite.modules: unknown module(s) {unknown}; choose from {sorted(MODULES)}")
    return sorted(i for m in mods for i in MODULES[m])


def run_all(cfg: Config, out=None, verbose: bool = False) -> list[CriterionResult]:
    out = out or sys.stdout
    results = []
    for num in selected_criteria(cfg):
        t0 = time.perf_counter()
        res = run_criterion(num, cfg)
        if num == 10:
            others = [r for r in results if r.number != 10]
            res.check(all(r.passed for r in others), f"all {len(others)} other selected criteria pass")
        results.append(res)
        print(f"{res.line()}  ({time.perf_counter() - t0:.1f}s)", file=out, flush=True)
        if verbose or not res.passed:
            for d in res.details:
                print(f"      {d}", file=out)
    return results


def verify_all(config_path, out=None, verbose: bool = False) -> int:
    """Exit code: 0 if every selected criterion passes, 1 otherwise.

    Config problems raise :class:`ConfigError` (the CLI maps them to 2).
    """
    cfg = Config.read(config_path)
    results = run_all(cfg, out, verbose)
    return 0 if all(r.passed for r in results) else 1
