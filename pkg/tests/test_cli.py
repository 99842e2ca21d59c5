import csv
import json

import numpy as np
import pytest

from scootsafe.cli import main
from scootsafe.csvio import ingest, load_corpus, write_trajectories_csv
from scootsafe.errors import IngestError, MissingColumnsError
from scootsafe.geometry import GeometryClass
from scootsafe.pipeline import evaluate_case
from scootsafe.scenario import ScenarioSpec, generate_case, generate_raw, specs_from_document

G = GeometryClass

CORPUS = {
    "seed": 5,
    "groups": [
        {"count": 4, "geometry": "crossing_from_left", "vehicle_speed": [6, 12], "escooter_speed": [3, 6],
         "designed_gap": [-2, 2], "id_prefix": "cl"},
        {"count": 4, "geometry": "crossing_from_right", "vehicle_speed": [6, 12], "escooter_speed": [3, 6],
         "designed_gap": [4, 8], "id_prefix": "cr"},
        {"count": 3, "geometry": "parallel_same_direction", "vehicle_speed": 9, "escooter_speed": 4, "id_prefix": "ps"},
        {"count": 3, "geometry": "parallel_opposite_direction", "vehicle_speed": 9, "escooter_speed": 4,
         "dataset": "escooter_centered", "id_prefix": "po"},
    ],
}


@pytest.fixture
def corpus_csv(tmp_path):
    spec = tmp_path / "corpus.json"
    spec.write_text(json.dumps(CORPUS))
    out = tmp_path / "tracks.csv"
    assert main(["generate", "--spec", str(spec), "--out", str(out)]) == 0
    return out


def _write(path, rows, header="case_id,dataset,agent,t,lat,lon,alt"):
    path.write_text(header + "\n" + "".join(r + "\n" for r in rows))
    return path


def _pair(case_id, n=20, dt=0.5, dataset="vehicle_centered", skip=()):
    rows = []
    for agent, dlat, dlon in (("vehicle", 1e-5, 0.0), ("escooter", 0.0, 1e-5)):
        if agent in skip:
            continue
        for k in range(n):
            rows.append(f"{case_id},{dataset},{agent},{k * dt},{39.77 + k * dlat},{-86.16 + k * dlon},")
    return rows


def test_ingest_two_cases(tmp_path):
    path = _write(tmp_path / "in.csv", _pair("a") + _pair("b"))
    cases = ingest(path)
    assert [c.id for c in cases] == ["a", "b"]


def test_missing_agent_names_the_case(tmp_path):
    path = _write(tmp_path / "in.csv", _pair("good") + _pair("lonely", skip=("escooter",)))
    with pytest.raises(IngestError, match="lonely"):
        ingest(path)
    corpus = load_corpus(path)
    assert [c.id for c in corpus.cases] == ["good"]
    assert corpus.rejected[0].case_id == "lonely"
    assert corpus.rejected[0].error == "MissingAgentError"


def test_non_monotone_time_names_the_case(tmp_path):
    rows = _pair("zig")
    rows[3], rows[4] = rows[4], rows[3]
    corpus = load_corpus(_write(tmp_path / "in.csv", rows))
    assert corpus.rejected[0].error == "NonMonotoneTimeError"
    assert "zig" in corpus.rejected[0].reason


def test_no_overlap_names_the_case(tmp_path):
    rows = [r for r in _pair("late") if ",vehicle," in r]
    rows += [r.replace(",escooter,", ",escooter,") for r in _pair("late") if ",escooter," in r]
    rows = rows[:20] + [
        f"late,vehicle_centered,escooter,{100 + k * 0.5},{39.77},{-86.16 + k * 1e-5}," for k in range(20)
    ]
    corpus = load_corpus(_write(tmp_path / "in.csv", rows))
    assert corpus.rejected[0].error == "NoOverlapError"
    assert "late" in corpus.rejected[0].reason


def test_missing_columns(tmp_path):
    path = tmp_path / "in.csv"
    path.write_text("case_id,agent,t,lat\nx,vehicle,0,39\n")
    with pytest.raises(MissingColumnsError, match="dataset"):
        load_corpus(path)
    assert main(["analyze", "--input", str(path), "--out", str(tmp_path / "o")]) == 3


def test_malformed_rows_are_reported(tmp_path):
    rows = _pair("a") + ["a,vehicle_centered,bicycle,3,39.77,-86.16,", "a,vehicle_centered,vehicle,oops,39.77,-86.16,"]
    out = tmp_path / "o"
    assert main(["analyze", "--input", str(_write(tmp_path / "in.csv", rows)), "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["counts"]["malformed_rows"] == 2
    reasons = {r["line"]: r["reason"] for r in report["rejects"]["rows"]}
    assert "agent" in reasons[42] and "t is missing" in reasons[43]


@pytest.mark.parametrize("content", ["", "case_id,dataset,agent,t,lat,lon,alt\n"])
def test_empty_corpus_exit(tmp_path, content, caplog):
    path = tmp_path / "in.csv"
    path.write_text(content)
    assert main(["analyze", "--input", str(path), "--out", str(tmp_path / "o")]) == 4
    assert "empty corpus" in caplog.text


def test_all_cases_rejected_is_empty_corpus(tmp_path):
    path = _write(tmp_path / "in.csv", _pair("solo", skip=("vehicle",)))
    out = tmp_path / "o"
    assert main(["analyze", "--input", str(path), "--out", str(out)]) == 4
    rows = list(csv.DictReader((out / "cases.csv").open()))
    assert [(r["case_id"], r["status"]) for r in rows] == [("solo", "rejected")]


def test_unreadable_input_and_bad_config(tmp_path):
    assert main(["analyze", "--input", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "o")]) == 3
    path = _write(tmp_path / "in.csv", _pair("a"))
    assert main(["analyze", "--input", str(path), "--set", "no_such_key=1", "--out", str(tmp_path / "o")]) == 3
    assert main(["analyze", "--input", str(path), "--set", "risk_high=9", "--out", str(tmp_path / "o")]) == 3


def test_unwritable_output(tmp_path):
    path = _write(tmp_path / "in.csv", _pair("a"))
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["analyze", "--input", str(path), "--out", str(blocker / "sub")]) == 5


def test_usage_errors():
    with pytest.raises(SystemExit) as exc:
        main(["analyze"])
    assert exc.value.code == 2


def test_bad_generation_spec(tmp_path):
    spec = tmp_path / "s.json"
    spec.write_text(json.dumps({"groups": [{"geometry": "crossing_from_left", "vehicle_speed": 0, "escooter_speed": 2}]}))
    assert main(["generate", "--spec", str(spec), "--out", str(tmp_path / "x.csv")]) == 6
    spec.write_text("{not json")
    assert main(["generate", "--spec", str(spec), "--out", str(tmp_path / "x.csv")]) == 3


def test_generated_file_round_trips_exactly(tmp_path):
    doc = dict(CORPUS, groups=CORPUS["groups"] + [
        {"count": 3, "geometry": "crossing_from_left", "vehicle_speed": 8, "escooter_speed": 4, "noise_sigma": 0.5,
         "id_prefix": "nz"}])
    spec = tmp_path / "corpus.json"
    spec.write_text(json.dumps(doc))
    corpus_csv = tmp_path / "tracks.csv"
    assert main(["generate", "--spec", str(spec), "--out", str(corpus_csv)]) == 0
    triples = specs_from_document(doc)
    from_file = {c.id: evaluate_case(c).metrics for c in ingest(corpus_csv)}
    assert len(from_file) == len(triples)
    for cid, dataset, spec in triples:
        in_memory = evaluate_case(generate_case(spec, cid, dataset)).metrics
        assert from_file[cid] == in_memory


def test_run_writes_outputs_deterministically(tmp_path, corpus_csv):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["analyze", "--input", str(corpus_csv), "--out", str(a)]) == 0
    assert main(["analyze", "--input", str(corpus_csv), "--out", str(b)]) == 0
    names = ["report.json", "cases.csv", "mttc_hist.csv", "risk_dist.csv", "geometry_dist.csv"]
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes()

    report = json.loads((a / "report.json").read_text())
    assert report["schema"] == "scootsafe.report/1"
    assert report["counts"]["input_cases"] == 14
    summary = report["summary"]["all"]
    assert summary["n_potential_conflict"] == 4  # only the small-gap crossings
    assert summary["conflict_share"] == pytest.approx(4 / 14)
    assert report["summary"]["escooter_centered"]["n_cases"] == 3
    cfg = report["config"]
    assert cfg["conflict_gap_threshold"] == {"value": 3.0, "source": "published_study"}
    assert cfg["collision_radius"]["source"] == "engineering_default"

    rows = list(csv.DictReader((a / "cases.csv").open()))
    assert sorted(r["case_id"] for r in rows) == [r["case_id"] for r in rows]
    assert len({r["case_id"] for r in rows}) == 14
    assert {r["status"] for r in rows} == {"analyzed"}
    geom = {(r["geometry"]) for r in rows}
    assert geom == {g.value for g in G}


def test_completeness_with_rejects(tmp_path):
    rows = _pair("a") + _pair("b", skip=("vehicle",)) + _pair("c")
    rows += ["d,vehicle_centered,vehicle,0,39.77,-86.16,"]  # too short to condition
    rows += ["d,vehicle_centered,escooter,0,39.77,-86.16,", "d,vehicle_centered,escooter,1,39.7701,-86.16,"]
    out = tmp_path / "o"
    assert main(["analyze", "--input", str(_write(tmp_path / "in.csv", rows)), "--out", str(out)]) == 0
    got = [(r["case_id"], r["status"]) for r in csv.DictReader((out / "cases.csv").open())]
    assert got == [("a", "analyzed"), ("b", "rejected"), ("c", "analyzed"), ("d", "rejected")]


def test_config_file_and_overrides(tmp_path, corpus_csv):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"conflict_gap_threshold": 10.0}))
    out = tmp_path / "o"
    assert main(["analyze", "--input", str(corpus_csv), "--config", str(cfg), "--set", "risk_medium=3", "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["config"]["conflict_gap_threshold"]["value"] == 10.0
    assert report["config"]["risk_medium"] == {"value": 3.0, "source": "user"}
    assert report["config"]["risk_high"]["source"] == "published_study"
    assert report["summary"]["all"]["n_potential_conflict"] == 8


def test_write_trajectories_preserves_floats(tmp_path):
    import pandas as pd

    veh, esc = generate_raw(ScenarioSpec(G.CROSSING_FROM_LEFT, 10.0, 5.0, noise_sigma=0.4, seed=3))
    path = tmp_path / "t.csv"
    write_trajectories_csv(path, [("k", "vehicle_centered", veh, esc)])
    df = pd.read_csv(path, float_precision="round_trip")
    v = df[df.agent == "vehicle"]
    np.testing.assert_array_equal(v["lat"].to_numpy(), veh.lat)
    np.testing.assert_array_equal(v["t"].to_numpy(), veh.t)
