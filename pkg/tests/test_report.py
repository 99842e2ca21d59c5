import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scootsafe.conflict import RiskLevel
from scootsafe.errors import EmptyInputError
from scootsafe.geometry import GeometryClass
from scootsafe.kinematics import mps_to_mph
from scootsafe.report import (
    VARIABLES,
    CaseMetrics,
    Histogram,
    VariableStats,
    compare_conflict_baseline,
    geometry_histogram,
    merge_reports,
    summarize,
)
from scootsafe.trajectory import Dataset

G = GeometryClass


def metrics(i, conflict=False, mttc=None, gap=None, dist=10.0, vs=8.0, es=5.0, geometry=G.PARALLEL_SAME_DIRECTION,
            dataset=Dataset.VEHICLE_CENTERED):
    risk = None
    if conflict and mttc is not None:
        risk = RiskLevel.HIGH if mttc < 1 else RiskLevel.MEDIUM if mttc < 2.5 else RiskLevel.LOW
    return CaseMetrics(f"c{i:04d}", dataset, dist, vs, es, gap, mttc, conflict, risk, geometry)


def test_case_metrics_invariants():
    with pytest.raises(ValueError):
        metrics(0, dist=-1.0)
    with pytest.raises(ValueError):
        CaseMetrics("x", Dataset.VEHICLE_CENTERED, 1.0, 1.0, 1.0, None, None, False, RiskLevel.LOW, None)
    with pytest.raises(ValueError):
        metrics(0, conflict=True, mttc=0.0)


def test_conflict_share_of_203_case_corpus():
    cases = [metrics(i, conflict=i < 53, gap=1.0 if i < 53 else 8.0) for i in range(203)]
    rep = summarize(cases)
    assert rep.n_cases == 203 and rep.n_conflict == 53
    assert 100 * rep.conflict_share == pytest.approx(26.1, abs=0.05)
    assert rep.conflict_share == pytest.approx(1 - rep.baseline_share, abs=1e-15)


def test_mttc_histogram_bins():
    values = [1.5] * 10 + [3.0] * 28 + [5.0] * 15
    cases = [metrics(i, conflict=True, mttc=v, gap=1.0) for i, v in enumerate(values)]
    cases += [metrics(100 + i, gap=9.0) for i in range(150)]
    rep = summarize(cases)
    assert rep.mttc_histogram.counts == (10, 28, 15)
    assert rep.mttc_histogram.edges == [(0.0, 2.0), (2.0, 4.0), (4.0, math.inf)]
    assert rep.risk_distribution == {RiskLevel.HIGH: 0, RiskLevel.MEDIUM: 10, RiskLevel.LOW: 43}


def test_histogram_edges_and_validation():
    assert Histogram.of([0.0, 1.999, 2.0, 3.99, 4.0, 100.0]).counts == (2, 2, 2)
    assert Histogram.of([0.5, 1.5, 2.5], bin_width=1.0, n_bins=2).counts == (1, 2)
    with pytest.raises(ValueError):
        Histogram.of([], bin_width=0.0)
    with pytest.raises(ValueError):
        Histogram.of([1.0]).merge(Histogram.of([1.0], bin_width=1.0))


def test_histogram_counts_cover_conflict_cases_with_mttc():
    cases = [metrics(0, conflict=True, mttc=0.5, gap=0.2), metrics(1, conflict=True, gap=2.0), metrics(2, gap=7.0)]
    rep = summarize(cases)
    assert sum(rep.mttc_histogram.counts) == 1
    assert rep.variables["mttc_s"].count == 1
    assert rep.variables["mttc_s"].skipped == 1


def test_single_case_average_equals_extrema():
    rep = summarize([metrics(0, conflict=True, mttc=1.2, gap=0.7, dist=3.3, vs=6.0, es=4.0)])
    for name in VARIABLES:
        s = rep.variables[name]
        assert s.mean == s.minimum == s.maximum


def test_undefined_values_are_skipped_not_zeroed():
    cases = [metrics(0, gap=4.0), metrics(1), metrics(2, gap=6.0)]
    s = summarize(cases).variables["min_gap_time_s"]
    assert (s.count, s.skipped, s.mean, s.minimum, s.maximum) == (2, 1, 5.0, 4.0, 6.0)


def test_empty_corpus_raises():
    with pytest.raises(EmptyInputError):
        summarize([])
    with pytest.raises(EmptyInputError):
        merge_reports([])


def test_mph_rows_match_mps_rows():
    rep = summarize([metrics(i, vs=3.0 + i, es=2.0 + 0.5 * i) for i in range(7)])
    for agent in ("vehicle", "escooter"):
        mps = rep.variables[f"{agent}_median_speed_mps"]
        mph = rep.variables[f"{agent}_median_speed_mph"]
        assert mph.mean == pytest.approx(mps_to_mph(mps.mean), abs=0.01)
        assert mph.minimum == pytest.approx(mps_to_mph(mps.minimum), abs=0.01)
        assert mph.maximum == pytest.approx(mps_to_mph(mps.maximum), abs=0.01)


def test_comparison_reproduces_group_targets():
    # conflict vehicles average 18.25 mph, baseline 9.51 mph; gap times 0.77 s vs 5.54 s
    c_speed, b_speed = 18.25 / 2.2369362921, 9.51 / 2.2369362921
    conflict = [metrics(i, conflict=True, gap=0.77 + d, vs=c_speed + 2 * d) for i, d in enumerate((-0.3, 0.0, 0.3))]
    baseline = [metrics(10 + i, gap=5.54 + d, vs=b_speed + d) for i, d in enumerate((-1.0, -0.5, 0.5, 1.0))]
    table = compare_conflict_baseline(conflict + baseline)
    assert table.conflict["vehicle_median_speed_mph"] == pytest.approx(18.25, abs=0.01)
    assert table.baseline["vehicle_median_speed_mph"] == pytest.approx(9.51, abs=0.01)
    assert table.conflict["min_gap_time_s"] == pytest.approx(0.77, abs=0.01)
    assert table.baseline["min_gap_time_s"] == pytest.approx(5.54, abs=0.01)
    assert table.missing_groups == []


def test_comparison_two_cases_and_identical_groups():
    a = metrics(0, conflict=True, gap=1.0, dist=2.5, vs=7.0, es=3.0)
    b = metrics(1, gap=6.0, dist=12.0, vs=4.0, es=2.0)
    t = compare_conflict_baseline([a, b])
    assert t.conflict == {
        "min_distance_m": 2.5,
        "vehicle_median_speed_mph": a.vehicle_median_speed_mph,
        "escooter_median_speed_mph": a.escooter_median_speed_mph,
        "min_gap_time_s": 1.0,
    }
    assert t.baseline["min_distance_m"] == 12.0
    same = compare_conflict_baseline([metrics(0, conflict=True, gap=2.0), metrics(1, gap=2.0)])
    assert same.conflict == same.baseline


def test_comparison_marks_missing_group():
    t = compare_conflict_baseline([metrics(0, gap=5.0)])
    assert t.missing_groups == ["conflict"]
    assert all(v is None for v in t.conflict.values())


def _geometry_corpus(shares, unclassified, dataset=Dataset.VEHICLE_CENTERED):
    cases, i = [], 0
    for g, n in zip(G, shares):
        for _ in range(n):
            cases.append(metrics(i, geometry=g, dataset=dataset))
            i += 1
    for _ in range(unclassified):
        cases.append(metrics(i, geometry=None, dataset=dataset))
        i += 1
    return cases


def test_geometry_shares_vehicle_centred():
    dist = geometry_histogram(_geometry_corpus((51, 22, 17, 9), 1)).all
    assert dist.percentages() == {
        "parallel_same_direction": 51.0,
        "parallel_opposite_direction": 22.0,
        "crossing_from_left": 17.0,
        "crossing_from_right": 9.0,
        "unclassified": 1.0,
    }
    assert dist.classified == 99


def test_geometry_shares_escooter_centred():
    dist = geometry_histogram(_geometry_corpus((52, 23, 9, 16), 0, Dataset.ESCOOTER_CENTERED)).all
    assert list(dist.classified_percentages().values()) == [52.0, 23.0, 9.0, 16.0]


def test_geometry_all_parallel_same():
    dist = geometry_histogram(_geometry_corpus((12, 0, 0, 0), 0)).all
    assert list(dist.classified_percentages().values()) == [100.0, 0.0, 0.0, 0.0]


def test_geometry_conflict_subset():
    cases = [metrics(0, conflict=True, gap=1.0, geometry=G.CROSSING_FROM_LEFT), metrics(1, geometry=G.CROSSING_FROM_RIGHT)]
    d = geometry_histogram(cases)
    assert d.conflict.counts[G.CROSSING_FROM_LEFT] == 1 and d.conflict.total == 1
    assert d.all.total == 2


case_strategy = st.builds(
    lambda i, conflict, mttc, gap, dist, vs, es, g: metrics(
        i, conflict=conflict, mttc=mttc if conflict else None, gap=gap, dist=dist, vs=vs, es=es, geometry=g
    ),
    st.integers(0, 9999),
    st.booleans(),
    st.one_of(st.none(), st.floats(0.01, 30)),
    st.one_of(st.none(), st.floats(0, 20)),
    st.floats(0, 200),
    st.floats(0, 30),
    st.floats(0, 15),
    st.one_of(st.none(), st.sampled_from(list(G))),
)


def _assert_reports_equal(a, b):
    assert (a.n_cases, a.n_conflict) == (b.n_cases, b.n_conflict)
    for k in VARIABLES:
        x, y = a.variables[k], b.variables[k]
        assert (x.count, x.skipped, x.minimum, x.maximum) == (y.count, y.skipped, y.minimum, y.maximum)
        if x.count:
            assert x.mean == pytest.approx(y.mean, rel=1e-9, abs=1e-9)
    assert a.mttc_histogram == b.mttc_histogram
    assert a.risk_distribution == b.risk_distribution
    assert a.geometry_distribution == b.geometry_distribution
    for g in ("conflict", "baseline"):
        for k, v in a.comparison.to_dict()[g].items():
            w = b.comparison.to_dict()[g][k]
            assert (v is None and w is None) or v == pytest.approx(w, rel=1e-9, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.lists(case_strategy, min_size=1, max_size=30), st.lists(case_strategy, min_size=1, max_size=30),
       st.lists(case_strategy, min_size=1, max_size=30))
def test_merge_associativity(a, b, c):
    whole = summarize(a + b + c)
    _assert_reports_equal(whole, summarize(a).merge(summarize(b)).merge(summarize(c)))
    _assert_reports_equal(whole, summarize(a).merge(summarize(b).merge(summarize(c))))
    _assert_reports_equal(whole, merge_reports([summarize(a), summarize(b), summarize(c)]))


@settings(max_examples=40, deadline=None)
@given(st.lists(case_strategy, min_size=1, max_size=40), st.randoms())
def test_permutation_invariance(cases, rnd):
    shuffled = list(cases)
    rnd.shuffle(shuffled)
    _assert_reports_equal(summarize(cases), summarize(shuffled))


def test_variable_stats_merge_with_empty():
    s = VariableStats.of([1.0, None, 3.0])
    assert s.merge(VariableStats()) == s
    assert VariableStats().merge(s) == s
    assert VariableStats.of([None, None]).mean is None


def test_report_dict_is_json_ready():
    import json

    rep = summarize([metrics(0, conflict=True, mttc=0.9, gap=0.5), metrics(1, gap=None, geometry=None)])
    doc = json.loads(json.dumps(rep.to_dict(), allow_nan=False))
    assert doc["mttc_histogram"]["bins"][-1] == [4.0, None]
    assert doc["risk_distribution"]["high"] == 1
    assert doc["geometry_distribution"]["all"]["unclassified"] == 1
