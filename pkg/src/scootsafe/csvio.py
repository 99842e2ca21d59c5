"""Trajectory CSV ingestion and report / table writers.

Input is one flat UTF-8 CSV with a header row::

    case_id,dataset,agent,t,lat,lon,alt

``agent`` is ``vehicle`` or ``escooter``, ``dataset`` is ``vehicle_centered``
or ``escooter_centered``, ``t`` is seconds and ``lat``/``lon`` are decimal
degrees.  ``alt`` is optional and may be left empty.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import pandas as pd

from .config import RunConfig
from .errors import (
    EmptyInputError,
    IngestError,
    MissingAgentError,
    MissingColumnsError,
    NonMonotoneTimeError,
    ScootsafeError,
)
from .pipeline import REJECTED, CaseResult, build_case
from .report import AggregateReport
from .trajectory import AgentKind, Dataset, EncounterCase, RawTrajectory

REQUIRED_COLUMNS = ("case_id", "dataset", "agent", "t", "lat", "lon")
INPUT_COLUMNS = REQUIRED_COLUMNS + ("alt",)
REPORT_SCHEMA = "scootsafe.report/1"

_AGENTS = {a.value for a in AgentKind}
_DATASETS = {d.value for d in Dataset}


@dataclass(frozen=True)
class RowReject:
    line: int
    case_id: str
    reason: str


@dataclass(frozen=True)
class CaseReject:
    case_id: str
    dataset: str | None
    reason: str
    error: str


@dataclass
class Corpus:
    cases: list[EncounterCase] = field(default_factory=list)
    rejected: list[CaseReject] = field(default_factory=list)
    bad_rows: list[RowReject] = field(default_factory=list)

    @property
    def n_input_cases(self) -> int:
        return len(self.cases) + len(self.rejected)


def _numeric(col: pd.Series) -> pd.Series:
    if col.dtype.kind in "fi":
        return col.astype(float)
    text = col.astype(str).str.strip()
    return pd.to_numeric(text.mask(text == ""), errors="coerce")


def _row_problems(df: pd.DataFrame) -> pd.Series:
    """One reason string per row; empty string for valid rows."""
    reasons = np.full(len(df), "", dtype=object)
    flagged = np.zeros(len(df), dtype=bool)

    def flag(mask, text):
        mask = np.asarray(mask, dtype=bool) & ~flagged
        reasons[mask] = text
        flagged[mask] = True

    flag(df["case_id"] == "", "empty case_id")
    flag(~df["agent"].isin(_AGENTS), "agent must be one of vehicle, escooter")
    flag(~df["dataset"].isin(_DATASETS), "dataset must be one of vehicle_centered, escooter_centered")
    for name in ("t", "lat", "lon"):
        flag(~np.isfinite(df[name].to_numpy(dtype=float, na_value=np.nan)), f"{name} is missing or not a finite number")
    flag(df["lat"].abs() > 90, "lat out of [-90, 90]")
    flag(df["lon"].abs() > 180, "lon out of [-180, 180]")
    if "alt" in df:
        flag(df["_alt_bad"], "alt is not a number")
    return pd.Series(reasons, index=df.index)


def read_table(path: str | Path) -> pd.DataFrame:
    try:
        df = pd.read_csv(
            path,
            dtype={"case_id": str, "dataset": str, "agent": str, "alt": str},
            keep_default_na=False,
            float_precision="round_trip",
            encoding="utf-8",
        )
    except pd.errors.EmptyDataError:
        raise EmptyInputError("empty corpus: input file has no header or rows") from None
    df.columns = [str(c).strip() for c in df.columns]
    missing = [c for c in REQUIRED_COLUMNS if c not in df.columns]
    if missing:
        raise MissingColumnsError(f"input is missing required column(s): {', '.join(missing)}")
    if df.empty:
        raise EmptyInputError("empty corpus: input file has a header but no rows")
    for name in ("case_id", "dataset", "agent"):
        # strip each distinct label once rather than every row
        codes, uniques = pd.factorize(df[name].astype(str))
        df[name] = np.array([u.strip() for u in uniques], dtype=object)[codes]
    for name in ("t", "lat", "lon"):
        df[name] = _numeric(df[name])
    if "alt" in df:
        text = df["alt"].astype(str).str.strip()
        df["alt"] = pd.to_numeric(text.mask(text == ""), errors="coerce")
        df["_alt_bad"] = (text != "") & df["alt"].isna()
    return df


def _trajectory(cols: dict[str, np.ndarray], agent: AgentKind, case_id: str) -> RawTrajectory:
    t = cols["t"]
    if not np.all(np.diff(t) > 0):
        k = int(np.argmax(np.diff(t) <= 0))
        raise NonMonotoneTimeError(
            f"{agent.value} timestamps not strictly increasing at t={t[k + 1]:g} (after t={t[k]:g})",
            case_id,
        )
    alt = cols.get("alt")
    if alt is not None and np.isnan(alt).any():
        alt = None
    return RawTrajectory(agent, t, cols["lat"], cols["lon"], alt)


def load_corpus(path: str | Path, config: RunConfig | None = None) -> Corpus:
    """Read, validate, condition and synchronise every case in ``path``.

    Malformed rows are dropped into ``bad_rows``; cases that cannot be built
    are listed in ``rejected`` with the reason.  Nothing is dropped silently.
    File-level problems (unreadable, missing columns, empty) raise.
    """
    cfg = config or RunConfig()
    df = read_table(path)
    reasons = _row_problems(df)
    bad = reasons != ""
    corpus = Corpus()
    for idx in np.flatnonzero(bad.to_numpy()):
        corpus.bad_rows.append(RowReject(int(idx) + 2, df["case_id"].iat[idx], reasons.iat[idx]))

    good = df[~bad]
    seen = sorted(set(df["case_id"]) - {""})
    index = good.groupby(["case_id", "agent"], sort=False).indices if not good.empty else {}
    labels = good["dataset"].to_numpy()
    cols = {name: good[name].to_numpy(dtype=float) for name in ("t", "lat", "lon")}
    if "alt" in good:
        cols["alt"] = good["alt"].to_numpy(dtype=float)
    for case_id in seen:
        rows = {a: index[(case_id, a.value)] for a in AgentKind if (case_id, a.value) in index}
        if not rows:
            corpus.rejected.append(CaseReject(case_id, None, "no valid rows", "IngestError"))
            continue
        datasets = sorted(set(np.concatenate([labels[ix] for ix in rows.values()])))
        dataset = datasets[0] if len(datasets) == 1 else None
        try:
            if dataset is None:
                raise IngestError(f"mixed dataset labels {datasets}", case_id)
            tracks = {}
            for agent in AgentKind:
                if agent not in rows:
                    raise MissingAgentError(f"no {agent.value} track", case_id)
                tracks[agent] = _trajectory({k: v[rows[agent]] for k, v in cols.items()}, agent, case_id)
            corpus.cases.append(
                build_case(case_id, dataset, tracks[AgentKind.VEHICLE], tracks[AgentKind.ESCOOTER], cfg)
            )
        except (ScootsafeError, ValueError) as exc:
            msg = str(exc)
            if not isinstance(exc, IngestError) and case_id not in msg:
                msg = f"case {case_id!r}: {msg}"
            corpus.rejected.append(CaseReject(case_id, dataset, msg, type(exc).__name__))
    return corpus


def ingest(path: str | Path, config: RunConfig | None = None) -> list[EncounterCase]:
    """Strict variant of :func:`load_corpus`: the first rejected case raises."""
    corpus = load_corpus(path, config)
    if corpus.rejected:
        r = corpus.rejected[0]
        raise IngestError(r.reason if r.case_id in r.reason else f"case {r.case_id!r}: {r.reason}")
    return corpus.cases


def write_trajectories_csv(path: str | Path, cases: Iterable[tuple[str, Dataset | str, RawTrajectory, RawTrajectory]]) -> int:
    """Write raw track pairs in the input CSV format; floats use ``repr`` so they round-trip exactly."""
    n = 0
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(INPUT_COLUMNS)
        for case_id, dataset, *tracks in cases:
            ds = Dataset(dataset).value
            for raw in tracks:
                alts = raw.alt if raw.alt is not None else [None] * len(raw)
                for t, lat, lon, alt in zip(raw.t.tolist(), raw.lat.tolist(), raw.lon.tolist(), alts):
                    w.writerow((case_id, ds, raw.agent.value, repr(t), repr(lat), repr(lon), "" if alt is None else repr(float(alt))))
            n += 1
    return n


# ---------------------------------------------------------------------------
# outputs


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


CASE_COLUMNS = (
    "case_id",
    "dataset",
    "status",
    "min_distance_m",
    "vehicle_median_speed_mps",
    "vehicle_median_speed_mph",
    "escooter_median_speed_mps",
    "escooter_median_speed_mph",
    "min_gap_time_s",
    "mttc_s",
    "potential_conflict",
    "risk",
    "geometry",
    "contact",
    "note",
)


def case_rows(results: Sequence[CaseResult], rejected: Sequence[CaseReject]) -> list[dict]:
    rows = []
    for r in results:
        d = r.metrics.to_dict()
        d.update(status=r.status, note=r.note)
        rows.append(d)
    for rej in rejected:
        rows.append({"case_id": rej.case_id, "dataset": rej.dataset, "status": REJECTED, "note": rej.reason})
    rows.sort(key=lambda d: d["case_id"])
    return rows


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_outputs(
    out_dir: str | Path,
    config: RunConfig,
    results: Sequence[CaseResult],
    corpus: Corpus,
    summaries: dict[str, AggregateReport | None],
) -> dict[str, Path]:
    """Write report.json, cases.csv and the three plot-data tables; returns their paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = case_rows(results, corpus.rejected)
    statuses = [r["status"] for r in rows]
    report = {
        "schema": REPORT_SCHEMA,
        "config": config.provenance(),
        "counts": {
            "input_cases": len(rows),
            "analyzed": statuses.count("analyzed"),
            "unclassifiable": statuses.count("unclassifiable"),
            "rejected": statuses.count(REJECTED),
            "malformed_rows": len(corpus.bad_rows),
        },
        "summary": {k: (None if v is None else v.to_dict()) for k, v in summaries.items()},
        "cases": rows,
        "rejects": {
            "cases": [vars(r) for r in corpus.rejected],
            "rows": [vars(r) for r in corpus.bad_rows],
        },
    }
    paths = {name: out / name for name in ("report.json", "cases.csv", "mttc_hist.csv", "risk_dist.csv", "geometry_dist.csv")}
    text = json.dumps(report, indent=2, allow_nan=False)
    paths["report.json"].write_text(text + "\n", encoding="utf-8")

    write_csv(paths["cases.csv"], CASE_COLUMNS, ([row.get(c) for c in CASE_COLUMNS] for row in rows))

    hist, risk, geom = [], [], []
    for name, rep in summaries.items():
        if rep is None:
            continue
        for (lo, hi), n in zip(rep.mttc_histogram.edges, rep.mttc_histogram.counts):
            hist.append((name, lo, None if math.isinf(hi) else hi, n))
        for level, n in rep.risk_distribution.items():
            risk.append((name, level.value, n))
        for subset, counts in (("all", rep.geometry_distribution.all), ("conflict", rep.geometry_distribution.conflict)):
            pct_all = counts.percentages()
            pct_cls = counts.classified_percentages()
            for g, n in counts.counts.items():
                geom.append((name, subset, g.value, n, f"{pct_all[g.value]:.1f}", f"{pct_cls[g.value]:.1f}"))
            geom.append((name, subset, "unclassified", counts.unclassified, f"{pct_all['unclassified']:.1f}", ""))
    write_csv(paths["mttc_hist.csv"], ("dataset", "bin_start_s", "bin_end_s", "count"), hist)
    write_csv(paths["risk_dist.csv"], ("dataset", "risk", "count"), risk)
    write_csv(
        paths["geometry_dist.csv"],
        ("dataset", "subset", "geometry", "count", "percent_of_all", "percent_of_classified"),
        geom,
    )
    return paths
