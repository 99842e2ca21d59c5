"""Run configuration with provenance for every threshold."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Mapping

from .conflict import ConflictConfig

# Where each default comes from.  "published_study" values are thresholds from
# published e-scooter field work; the rest are engineering defaults.  A value
# changed from its default is reported as "user".
PUBLISHED = "published_study"
ENGINEERING = "engineering_default"
USER = "user"

PROVENANCE = {
    "conflict_gap_threshold": PUBLISHED,
    "gap_cap": PUBLISHED,
    "risk_high": PUBLISHED,
    "risk_medium": PUBLISHED,
    "mttc_bin_width": PUBLISHED,
    "collision_radius": ENGINEERING,
    "resample_hz": ENGINEERING,
    "max_plausible_speed_mps": ENGINEERING,
    "smooth_window": ENGINEERING,
    "max_gap_s": ENGINEERING,
    "parallel_angle_deg": ENGINEERING,
    "phase_half_window_s": ENGINEERING,
    "stationary_eps_mps": ENGINEERING,
    "mttc_bins": ENGINEERING,
    "min_overlap_s": ENGINEERING,
}


@dataclass(frozen=True)
class RunConfig:
    conflict_gap_threshold: float = 3.0
    gap_cap: float = 20.0
    risk_high: float = 1.0
    risk_medium: float = 2.5
    collision_radius: float = 2.0
    resample_hz: float = 10.0
    max_plausible_speed_mps: float = 30.0
    smooth_window: int = 5
    max_gap_s: float = 1.0
    parallel_angle_deg: float = 45.0
    phase_half_window_s: float = 2.0
    stationary_eps_mps: float = 0.1
    mttc_bin_width: float = 2.0
    mttc_bins: int = 3
    min_overlap_s: float = 1.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise TypeError(f"{f.name} must be a number, got {value!r}")
            if not value > 0:
                raise ValueError(f"{f.name} must be positive, got {value}")
        for name in ("smooth_window", "mttc_bins"):
            if int(getattr(self, name)) != getattr(self, name):
                raise ValueError(f"{name} must be an integer")
            object.__setattr__(self, name, int(getattr(self, name)))
        if self.smooth_window % 2 == 0:
            raise ValueError("smooth_window must be odd")
        if self.parallel_angle_deg >= 90:
            raise ValueError("parallel_angle_deg must be below 90")
        self.conflict  # validates the conflict thresholds

    @property
    def conflict(self) -> ConflictConfig:
        return ConflictConfig(
            conflict_gap_threshold=self.conflict_gap_threshold,
            gap_cap=self.gap_cap,
            risk_high=self.risk_high,
            risk_medium=self.risk_medium,
            collision_radius=self.collision_radius,
        )

    @property
    def target_dt(self) -> float:
        return 1.0 / self.resample_hz

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> RunConfig:
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"unknown configuration key(s): {', '.join(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path: str | Path) -> RunConfig:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError("configuration file must hold a JSON object")
        return cls.from_mapping(data)

    def with_overrides(self, overrides: Mapping[str, str]) -> RunConfig:
        """Apply ``key=value`` string overrides (from the command line)."""
        types = {f.name: f.type for f in fields(self)}
        parsed = {}
        for key, raw in overrides.items():
            if key not in types:
                raise ValueError(f"unknown configuration key: {key}")
            parsed[key] = int(raw) if types[key] in (int, "int") else float(raw)
        return replace(self, **parsed)

    def provenance(self) -> dict[str, dict[str, Any]]:
        default = asdict(type(self)())
        return {
            k: {"value": v, "source": PROVENANCE[k] if v == default[k] else USER}
            for k, v in asdict(self).items()
        }
