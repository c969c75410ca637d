"""Account survivability and per-outcome significance against a baseline group."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import chi2

from ..corpus import Account, AccountState, LabeledDataset

logger = logging.getLogger(__name__)

OUTCOMES = ("alive", "deleted", "suspended")
STAR_LEVELS = ((0.01, "***"), (0.05, "**"), (0.1, "*"))


@dataclass(frozen=True)
class SurvivalCounts:
    name: str
    alive: int
    deleted: int
    suspended: int

    @property
    def total(self) -> int:
        return self.alive + self.deleted + self.suspended

    def count(self, outcome: str) -> int:
        if outcome not in OUTCOMES:
            raise ValueError(f"unknown outcome {outcome!r}")
        return getattr(self, outcome)

    def ratio(self, outcome: str) -> float:
        return self.count(outcome) / self.total if self.total else 0.0

    def cell(self, outcome: str) -> str:
        """Count with its one-decimal percentage, e.g. ``3,353 (96.5%)``."""
        return f"{self.count(outcome):,} ({format_pct(self.ratio(outcome))})"


def format_pct(ratio: float, digits: int = 1) -> str:
    q = Decimal(1).scaleb(-digits)
    return f"{Decimal(repr(100 * ratio)).quantize(q, rounding=ROUND_HALF_UP)}%"


def count_states(name: str, accounts: Iterable[Account]) -> SurvivalCounts:
    tally = {s: 0 for s in OUTCOMES}
    for a in accounts:
        state = a.status.state
        if state == AccountState.PROTECTED:
            # protected profiles still answer lookups
            state = AccountState.ALIVE
        tally[state.value] += 1
    return SurvivalCounts(name, tally["alive"], tally["deleted"], tally["suspended"])


@dataclass(frozen=True)
class SurvivabilityReport:
    rows: tuple[SurvivalCounts, ...]

    def __post_init__(self):
        for r in self.rows:
            if r.total and abs(sum(r.ratio(o) for o in OUTCOMES) - 1.0) > 1e-9:
                raise AssertionError(f"{r.name}: ratios do not sum to 1")

    def __getitem__(self, name: str) -> SurvivalCounts:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def records(self) -> list[dict]:
        out = []
        for r in self.rows:
            rec = {"dataset": r.name, "total": r.total}
            for o in OUTCOMES:
                rec[o] = r.count(o)
                rec[f"{o}_pct"] = round(100 * r.ratio(o), 4)
            out.append(rec)
        return out

    def to_text(self) -> str:
        lines = ["dataset\ttotal\talive\tdeleted\tsuspended"]
        for r in self.rows:
            lines.append("\t".join([r.name, f"{r.total:,}"] + [r.cell(o) for o in OUTCOMES]))
        return "\n".join(lines) + "\n"


def survivability(datasets: Sequence[LabeledDataset]) -> SurvivabilityReport:
    return SurvivabilityReport(tuple(count_states(ds.name, ds.accounts) for ds in datasets))


@dataclass(frozen=True)
class SignificanceResult:
    outcome: str
    effect: float  # percentage points, target minus baseline
    statistic: float
    p_value: float

    @property
    def stars(self) -> str:
        return stars_for(self.p_value)

    def cell(self) -> str:
        sign = "+" if self.effect >= 0 else "-"
        return f"{sign}{abs(self.effect):.1f}%{self.stars}"


def stars_for(p: float) -> str:
    for level, mark in STAR_LEVELS:
        if p < level:
            return mark
    return ""


def chi_square_2x2(table, correction: bool = True) -> tuple[float, float]:
    """Pearson chi-square on a 2x2 table, 1 degree of freedom.

    ``correction`` applies Yates' continuity correction. A table with an empty
    row or column has no defined statistic; it is reported as (0, 1) with a
    warning.
    """
    obs = np.asarray(table, dtype=float)
    if obs.shape != (2, 2):
        raise ValueError("expected a 2x2 table")
    expected = np.outer(obs.sum(axis=1), obs.sum(axis=0)) / obs.sum()
    if np.any(expected == 0):
        warnings.warn("zero expected count in contingency table; p set to 1", RuntimeWarning,
                      stacklevel=2)
        return 0.0, 1.0
    diff = np.abs(obs - expected)
    if correction:
        diff = np.maximum(diff - 0.5, 0.0)
    stat = float(np.sum(diff * diff / expected))
    return stat, float(chi2.sf(stat, 1))


def chi_square_effect(target: SurvivalCounts, baseline: SurvivalCounts, outcome: str,
                      correction: bool = True) -> SignificanceResult:
    """Effect size and chi-square significance of one outcome against the baseline group."""
    if target.total == 0 or baseline.total == 0:
        raise ValueError("both groups must be non-empty")
    t, b = target.count(outcome), baseline.count(outcome)
    table = [[t, target.total - t], [b, baseline.total - b]]
    stat, p = chi_square_2x2(table, correction=correction)
    effect = 100.0 * (target.ratio(outcome) - baseline.ratio(outcome))
    return SignificanceResult(outcome, effect, stat, p)


def significance_table(report: SurvivabilityReport, baseline: str,
                       correction: bool = True) -> dict[str, dict[str, SignificanceResult]]:
    base = report[baseline]
    return {
        r.name: {o: chi_square_effect(r, base, o, correction) for o in OUTCOMES}
        for r in report.rows
        if r.name != baseline
    }
