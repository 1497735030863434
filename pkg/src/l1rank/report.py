"""Solver reports and stage budgets."""

from __future__ import annotations

import json
from collections.abc import Callable
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any

from .model import CenterTuple, KCenterInstance

DEFAULT_ORACLE_BUDGET = 1 << 24


@dataclass(frozen=True)
class Budgets:
    """Independent caps for each stage of the pipeline.

    ``lp_repeats=None`` selects the default repeat count derived from the
    rounding parameters, clipped to ``max_lp_repeats``.
    """

    family: int = 4096
    guess: int = 256
    exhaustive: int = 1 << 16
    lp_repeats: int | None = None
    max_lp_repeats: int = 2000
    mode: str = "sampled"
    lambda_const: float = 2.0
    gamma: float = 2.0
    max_sketch_dim: int | None = 64
    threads: int = 1

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass
class SolveReport:
    """Outcome of one solver call together with its certificate.

    ``cost`` is always recomputed from ``centers`` against ``instance``
    before a report is emitted; ``lower_bound`` is a proven lower bound on
    the optimum of the instance that was actually solved.
    """

    problem: str
    cost: int
    centers: CenterTuple
    instance: KCenterInstance = field(repr=False)
    lower_bound: Fraction | None = None
    lower_bound_kind: str = "none"
    path: str = ""
    seed: int | None = None
    budgets: dict[str, Any] = field(default_factory=dict)
    provenance: dict[str, Any] = field(default_factory=dict)
    caveats: list[str] = field(default_factory=list)
    timing_ms: float | None = None

    def to_dict(self, include_timing: bool = False) -> dict[str, Any]:
        out: dict[str, Any] = {
            "problem": self.problem,
            "cost": self.cost,
            "centers": self.centers.to_strings(),
            "lower_bound": _fraction_json(self.lower_bound),
            "lower_bound_kind": self.lower_bound_kind,
            "path": self.path,
            "seed": self.seed,
            "budgets": self.budgets,
            "provenance": self.provenance,
            "caveats": list(self.caveats),
        }
        if include_timing:
            out["timing_ms"] = self.timing_ms
        return out

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), indent=1, sort_keys=False)


def _fraction_json(value: Fraction | None) -> Any:
    if value is None:
        return None
    return {"num": value.numerator, "den": value.denominator, "float": float(value)}


_hooks: list[Callable[[SolveReport], None]] = []


def add_report_hook(hook: Callable[[SolveReport], None]) -> None:
    """Register ``hook`` to observe every emitted report (used by audits)."""
    _hooks.append(hook)


def remove_report_hook(hook: Callable[[SolveReport], None]) -> None:
    _hooks.remove(hook)


def emit(report: SolveReport) -> SolveReport:
    for hook in list(_hooks):
        hook(report)
    return report
