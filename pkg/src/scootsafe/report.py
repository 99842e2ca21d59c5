"""Corpus-level aggregation of per-case scenario variables.

Aggregates keep sums and counts instead of means so that partial reports over
disjoint case sets merge exactly (``merge(summarize(A), summarize(B))`` equals
``summarize(A + B)`` up to float rounding).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .conflict import RiskLevel
from .errors import EmptyInputError
from .geometry import GeometryClass
from .kinematics import mps_to_mph
from .trajectory import Dataset

VARIABLES = (
    "min_distance_m",
    "vehicle_median_speed_mps",
    "vehicle_median_speed_mph",
    "escooter_median_speed_mps",
    "escooter_median_speed_mph",
    "mttc_s",
    "min_gap_time_s",
)

COMPARISON_VARIABLES = (
    "min_distance_m",
    "vehicle_median_speed_mph",
    "escooter_median_speed_mph",
    "min_gap_time_s",
)


@dataclass(frozen=True)
class CaseMetrics:
    id: str
    dataset: Dataset
    min_distance: float
    vehicle_median_speed: float
    escooter_median_speed: float
    min_gap_time: float | None
    mttc: float | None
    is_potential_conflict: bool
    risk: RiskLevel | None
    geometry: GeometryClass | None
    contact: bool = False

    def __post_init__(self):
        if not self.min_distance >= 0:
            raise ValueError("min_distance must be non-negative")
        if self.risk is not None and not self.is_potential_conflict:
            raise ValueError(f"case {self.id!r}: risk level on a baseline case")
        if self.mttc is not None and not self.mttc > 0:
            raise ValueError(f"case {self.id!r}: mTTC must be positive")

    @property
    def vehicle_median_speed_mph(self) -> float:
        return mps_to_mph(self.vehicle_median_speed)

    @property
    def escooter_median_speed_mph(self) -> float:
        return mps_to_mph(self.escooter_median_speed)

    def variable(self, name: str) -> float | None:
        return {
            "min_distance_m": self.min_distance,
            "vehicle_median_speed_mps": self.vehicle_median_speed,
            "vehicle_median_speed_mph": self.vehicle_median_speed_mph,
            "escooter_median_speed_mps": self.escooter_median_speed,
            "escooter_median_speed_mph": self.escooter_median_speed_mph,
            "mttc_s": self.mttc,
            "min_gap_time_s": self.min_gap_time,
        }[name]

    def to_dict(self) -> dict:
        return {
            "case_id": self.id,
            "dataset": self.dataset.value,
            "min_distance_m": self.min_distance,
            "vehicle_median_speed_mps": self.vehicle_median_speed,
            "vehicle_median_speed_mph": self.vehicle_median_speed_mph,
            "escooter_median_speed_mps": self.escooter_median_speed,
            "escooter_median_speed_mph": self.escooter_median_speed_mph,
            "min_gap_time_s": self.min_gap_time,
            "mttc_s": self.mttc,
            "potential_conflict": self.is_potential_conflict,
            "risk": None if self.risk is None else self.risk.value,
            "geometry": None if self.geometry is None else self.geometry.value,
            "contact": self.contact,
        }


@dataclass(frozen=True)
class VariableStats:
    """Running count / sum / extrema of one variable; ``skipped`` counts undefined values."""

    count: int = 0
    skipped: int = 0
    total: float = 0.0
    minimum: float | None = None
    maximum: float | None = None

    @classmethod
    def of(cls, values: Iterable[float | None]) -> VariableStats:
        values = list(values)
        defined = [v for v in values if v is not None]
        skipped = len(values) - len(defined)
        if not defined:
            return cls(count=0, skipped=skipped)
        return cls(
            count=len(defined),
            skipped=skipped,
            total=math.fsum(defined),
            minimum=min(defined),
            maximum=max(defined),
        )

    @property
    def mean(self) -> float | None:
        return self.total / self.count if self.count else None

    def merge(self, other: VariableStats) -> VariableStats:
        def pick(f, a, b):
            if a is None:
                return b
            if b is None:
                return a
            return f(a, b)

        return VariableStats(
            count=self.count + other.count,
            skipped=self.skipped + other.skipped,
            total=self.total + other.total,
            minimum=pick(min, self.minimum, other.minimum),
            maximum=pick(max, self.maximum, other.maximum),
        )

    def to_dict(self) -> dict:
        return {
            "average": self.mean,
            "minimum": self.minimum,
            "maximum": self.maximum,
            "count": self.count,
            "skipped": self.skipped,
        }


@dataclass(frozen=True)
class GeometryCounts:
    counts: dict[GeometryClass, int] = field(default_factory=lambda: {g: 0 for g in GeometryClass})
    unclassified: int = 0

    @classmethod
    def of(cls, cases: Iterable[CaseMetrics]) -> GeometryCounts:
        counts = {g: 0 for g in GeometryClass}
        unclassified = 0
        for c in cases:
            if c.geometry is None:
                unclassified += 1
            else:
                counts[c.geometry] += 1
        return cls(counts, unclassified)

    @property
    def classified(self) -> int:
        return sum(self.counts.values())

    @property
    def total(self) -> int:
        return self.classified + self.unclassified

    def percentages(self) -> dict[str, float]:
        """Share of *all* cases per class, with unclassifiable cases as their own bucket."""
        if not self.total:
            return {g.value: 0.0 for g in GeometryClass} | {"unclassified": 0.0}
        out = {g.value: 100.0 * n / self.total for g, n in self.counts.items()}
        out["unclassified"] = 100.0 * self.unclassified / self.total
        return out

    def classified_percentages(self) -> dict[str, float]:
        n = self.classified
        return {g.value: (100.0 * k / n if n else 0.0) for g, k in self.counts.items()}

    def merge(self, other: GeometryCounts) -> GeometryCounts:
        return GeometryCounts(
            {g: self.counts[g] + other.counts[g] for g in GeometryClass},
            self.unclassified + other.unclassified,
        )

    def to_dict(self) -> dict:
        return {
            "counts": {g.value: n for g, n in self.counts.items()},
            "unclassified": self.unclassified,
            "percent_of_all": self.percentages(),
            "percent_of_classified": self.classified_percentages(),
        }


@dataclass(frozen=True)
class GeometryDistribution:
    all: GeometryCounts
    conflict: GeometryCounts

    def merge(self, other: GeometryDistribution) -> GeometryDistribution:
        return GeometryDistribution(self.all.merge(other.all), self.conflict.merge(other.conflict))

    def to_dict(self) -> dict:
        return {"all": self.all.to_dict(), "conflict": self.conflict.to_dict()}


@dataclass(frozen=True)
class Histogram:
    """Counts over ``[0, w), [w, 2w), ..., [(n-1)w, inf)``."""

    bin_width: float
    counts: tuple[int, ...]

    @classmethod
    def of(cls, values: Iterable[float], bin_width: float = 2.0, n_bins: int = 3) -> Histogram:
        if not bin_width > 0 or n_bins < 1:
            raise ValueError("need bin_width > 0 and n_bins >= 1")
        counts = [0] * n_bins
        for v in values:
            counts[min(int(v // bin_width), n_bins - 1)] += 1
        return cls(bin_width, tuple(counts))

    @property
    def edges(self) -> list[tuple[float, float]]:
        n = len(self.counts)
        return [(k * self.bin_width, (k + 1) * self.bin_width if k < n - 1 else math.inf) for k in range(n)]

    def merge(self, other: Histogram) -> Histogram:
        if self.bin_width != other.bin_width or len(self.counts) != len(other.counts):
            raise ValueError("cannot merge histograms with different bins")
        return Histogram(self.bin_width, tuple(a + b for a, b in zip(self.counts, other.counts)))

    def to_dict(self) -> dict:
        return {
            "bins": [[lo, None if math.isinf(hi) else hi] for lo, hi in self.edges],
            "counts": list(self.counts),
        }


@dataclass(frozen=True)
class ComparisonTable:
    """Group averages for potential-conflict vs baseline cases; ``None`` marks an empty group."""

    conflict: dict[str, float | None]
    baseline: dict[str, float | None]
    n_conflict: int
    n_baseline: int

    @property
    def missing_groups(self) -> list[str]:
        return [name for name, n in (("conflict", self.n_conflict), ("baseline", self.n_baseline)) if n == 0]

    def to_dict(self) -> dict:
        return {
            "conflict": self.conflict,
            "baseline": self.baseline,
            "n_conflict": self.n_conflict,
            "n_baseline": self.n_baseline,
            "missing_groups": self.missing_groups,
        }


@dataclass(frozen=True)
class AggregateReport:
    n_cases: int
    n_conflict: int
    variables: dict[str, VariableStats]
    groups: dict[str, dict[str, VariableStats]]
    mttc_histogram: Histogram
    risk_distribution: dict[RiskLevel, int]
    geometry_distribution: GeometryDistribution

    @property
    def conflict_share(self) -> float:
        return self.n_conflict / self.n_cases

    @property
    def baseline_share(self) -> float:
        return (self.n_cases - self.n_conflict) / self.n_cases

    @property
    def comparison(self) -> ComparisonTable:
        def means(group):
            return {v: self.groups[group][v].mean for v in COMPARISON_VARIABLES}

        return ComparisonTable(
            means("conflict"), means("baseline"), self.n_conflict, self.n_cases - self.n_conflict
        )

    def merge(self, other: AggregateReport) -> AggregateReport:
        return AggregateReport(
            n_cases=self.n_cases + other.n_cases,
            n_conflict=self.n_conflict + other.n_conflict,
            variables={k: self.variables[k].merge(other.variables[k]) for k in VARIABLES},
            groups={
                g: {k: self.groups[g][k].merge(other.groups[g][k]) for k in COMPARISON_VARIABLES}
                for g in ("conflict", "baseline")
            },
            mttc_histogram=self.mttc_histogram.merge(other.mttc_histogram),
            risk_distribution={r: self.risk_distribution[r] + other.risk_distribution[r] for r in RiskLevel},
            geometry_distribution=self.geometry_distribution.merge(other.geometry_distribution),
        )

    def to_dict(self) -> dict:
        return {
            "n_cases": self.n_cases,
            "n_potential_conflict": self.n_conflict,
            "n_baseline": self.n_cases - self.n_conflict,
            "conflict_share": self.conflict_share,
            "baseline_share": self.baseline_share,
            "variables": {k: v.to_dict() for k, v in self.variables.items()},
            "comparison": self.comparison.to_dict(),
            "mttc_histogram": self.mttc_histogram.to_dict(),
            "risk_distribution": {r.value: n for r, n in self.risk_distribution.items()},
            "geometry_distribution": self.geometry_distribution.to_dict(),
        }


def summarize(cases: Sequence[CaseMetrics], bin_width: float = 2.0, n_bins: int = 3) -> AggregateReport:
    """Average / minimum / maximum of every scenario variable plus the corpus distributions.

    Undefined values (no crossing, no TTC) are skipped and counted, never
    imputed.  mTTC statistics cover potential-conflict cases only.
    """
    cases = list(cases)
    if not cases:
        raise EmptyInputError("empty corpus")
    conflict = [c for c in cases if c.is_potential_conflict]
    baseline = [c for c in cases if not c.is_potential_conflict]

    variables = {
        k: VariableStats.of([c.variable(k) for c in (conflict if k == "mttc_s" else cases)]) for k in VARIABLES
    }
    groups = {
        name: {k: VariableStats.of([c.variable(k) for c in members]) for k in COMPARISON_VARIABLES}
        for name, members in (("conflict", conflict), ("baseline", baseline))
    }
    risk = {r: 0 for r in RiskLevel}
    for c in conflict:
        if c.risk is not None:
            risk[c.risk] += 1
    return AggregateReport(
        n_cases=len(cases),
        n_conflict=len(conflict),
        variables=variables,
        groups=groups,
        mttc_histogram=Histogram.of((c.mttc for c in conflict if c.mttc is not None), bin_width, n_bins),
        risk_distribution=risk,
        geometry_distribution=geometry_histogram(cases),
    )


def merge_reports(reports: Iterable[AggregateReport]) -> AggregateReport:
    reports = list(reports)
    if not reports:
        raise EmptyInputError("no partial reports to merge")
    out = reports[0]
    for r in reports[1:]:
        out = out.merge(r)
    return out


def compare_conflict_baseline(cases: Sequence[CaseMetrics]) -> ComparisonTable:
    return summarize(cases).comparison


def geometry_histogram(cases: Sequence[CaseMetrics]) -> GeometryDistribution:
    cases = list(cases)
    return GeometryDistribution(
        all=GeometryCounts.of(cases),
        conflict=GeometryCounts.of(c for c in cases if c.is_potential_conflict),
    )

