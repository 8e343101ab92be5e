"""Records of one tested inequality instance."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class InequalityReport:
    """Both sides of ``lhs <~ rhs`` for one instance, plus the parameters used.

    ``ratio`` is ``lhs / rhs``; when ``rhs`` is zero it is NaN and the report
    carries the ``degenerate`` flag.
    """

    name: str
    lhs: float
    rhs: float
    params: dict = field(default_factory=dict)
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "lhs", float(self.lhs))
        object.__setattr__(self, "rhs", float(self.rhs))
        if self.lhs < 0 or self.rhs < 0:
            raise ValueError(f"{self.name}: both sides must be nonnegative")
        flags = tuple(self.flags)
        if self.rhs == 0 and "degenerate" not in flags:
            flags += ("degenerate",)
        object.__setattr__(self, "flags", flags)

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs > 0 else math.nan

    @property
    def degenerate(self) -> bool:
        return "degenerate" in self.flags

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": None if math.isnan(self.ratio) else self.ratio,
            "params": dict(self.params),
            "flags": list(self.flags),
        }


@dataclass(frozen=True)
class ChainReport:
    """A chain ``a <~ b <~ c``: the three terms and one report per link."""

    name: str
    terms: tuple[float, ...]
    links: tuple[InequalityReport, ...]
    params: dict = field(default_factory=dict)

    @property
    def ratios(self) -> tuple[float, ...]:
        return tuple(r.ratio for r in self.links)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "terms": list(self.terms),
            "links": [r.to_dict() for r in self.links],
            "params": dict(self.params),
        }


def chain(name: str, terms, params: dict, flags=()) -> ChainReport:
    links = tuple(
        InequalityReport(f"{name}[{i}]", a, b, params, flags)
        for i, (a, b) in enumerate(zip(terms, terms[1:]))
    )
    return ChainReport(name, tuple(float(t) for t in terms), links, params)
