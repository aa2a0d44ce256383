import json
from fractions import Fraction

import pytest

from oee.epistemics import agent_state
from oee.harness import (
    LengthMismatch,
    SchemaError,
    Trace,
    TraceEvent,
    bin_timeline,
    compare_strategies,
    coverage_fraction,
    coverage_series,
    coverage_slow,
    ergodicity_report,
    export,
    ingest_trace,
    load_scenario,
    run,
    run_full,
    scenario_from_dict,
)
from oee.universe import State, Theory, clause, unit


def minimal(**overrides):
    data = {"seed": 7, "agents": [{"id": 1, "niche": [0]}]}
    data.update(overrides)
    return data


# --- scenario loading --------------------------------------------------------

def test_defaults_applied():
    s = scenario_from_dict(minimal())
    assert s.weights == (Fraction(1, 2), Fraction(3, 10), Fraction(1, 5))
    assert s.agents[0].visibility == Fraction(3, 5)
    assert s.run.depth == 1


def test_duplicate_agent_ids():
    data = minimal(agents=[{"id": 1}, {"id": 1}])
    with pytest.raises(SchemaError) as exc:
        scenario_from_dict(data)
    assert exc.value.path == "agents[1].id"


def test_bad_weights():
    with pytest.raises(SchemaError):
        scenario_from_dict(minimal(weights=[0.5, 0.3, 0.1]))


def test_bad_strategy():
    with pytest.raises(SchemaError):
        scenario_from_dict(minimal(agents=[{"id": 1, "strategy": "psychic"}]))


def test_load_scenario_file(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps(minimal()))
    assert load_scenario(path).seed == 7
    path.write_text("not json")
    with pytest.raises(SchemaError):
        load_scenario(path)


# --- run engine --------------------------------------------------------------

def emergence_scenario(ticks=1):
    return scenario_from_dict({
        "seed": 3,
        "weights": [0, 0, 1],
        "initial_predicates": 2,
        "agents": [{"id": 1, "niche": [0, 1], "visibility": 1}],
        "run": {"ticks": ticks, "depth": 1},
    })


def test_single_emergence_tick():
    trace = run(emergence_scenario(), 0)
    kinds = [e.kind for e in trace.events]
    assert kinds.count("reveal") == 1
    assert kinds.count("observation") == 1
    revisions = [e for e in trace.events if e.kind == "revision"]
    assert len(revisions) == 1
    assert revisions[0].payload["extension"] == "essential"
    assert revisions[0].payload["adjacent"] >= 1


def test_run_deterministic_bytes(tmp_path):
    s = scenario_from_dict(minimal(run={"ticks": 8}))
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    export(run(s, 0), "jsonl", a)
    export(run(s, 0), "jsonl", b)
    assert a.read_bytes() == b.read_bytes()


def test_replicates_differ():
    s = scenario_from_dict(minimal(run={"ticks": 8}))
    assert run(s, 0).events != run(s, 1).events


# --- coverage ----------------------------------------------------------------

def test_coverage_fast_matches_slow():
    from oee.rng import SplitMix64

    rng = SplitMix64(31)
    revealed = frozenset({0, 1, 2, 3})
    for trial in range(60):
        actual = State(revealed, frozenset(p for p in revealed if rng.next_u64() & 1))
        preds = frozenset(p for p in revealed if rng.next_u64() % 3) or frozenset({0})
        clauses = []
        for p in sorted(preds):
            roll = rng.next_u64() % 3
            if roll == 0:
                clauses.append(unit(p, bool(rng.next_u64() & 1)))
            elif roll == 1 and len(preds) > 1:
                q = rng.choice(sorted(preds - {p}))
                clauses.append(clause((p, True), (q, bool(rng.next_u64() & 1))))
        t = Theory(preds, tuple(dict.fromkeys(clauses)))
        if not t.models():
            continue
        a = agent_state(1, t)
        for depth in (0, 1):
            assert coverage_fraction(a, revealed, actual, depth) == \
                coverage_slow(a, revealed, actual, depth), (trial, depth)


def test_coverage_perfect_agent():
    revealed = frozenset({0, 1})
    actual = State(revealed, frozenset({0}))
    a = agent_state(1, Theory(revealed, (unit(0, True), unit(1, False))))
    assert coverage_fraction(a, revealed, actual, 1) == 1


def test_coverage_empty_agent():
    revealed = frozenset({0, 1})
    actual = State(revealed, frozenset())
    a = agent_state(1, Theory(frozenset(), ()))
    assert coverage_fraction(a, revealed, actual, 1) == 0


# --- analysis ----------------------------------------------------------------

def fake_trace(revision_ticks, ticks):
    events = []
    seq = 0
    for t in revision_ticks:
        events.append(TraceEvent(t, seq, "revision", 1, {"old": "a", "new": "b"}))
        seq += 1
    return Trace(ticks=ticks, depth=1, agents=(1,), events=events)


def test_bin_timeline_examples():
    assert bin_timeline(fake_trace([3, 5, 9], 10)) == [(1, 3), (4, 5), (6, 9), (10, 10)]
    assert bin_timeline(fake_trace([], 10)) == [(1, 10)]
    assert bin_timeline(fake_trace(range(1, 6), 5)) == [(i, i) for i in range(1, 6)]
    assert bin_timeline(fake_trace([10], 10)) == [(1, 10)]


def test_bins_cover_exactly():
    s = scenario_from_dict(minimal(run={"ticks": 20}))
    bins = bin_timeline(run(s, 0))
    flat = [t for start, end in bins for t in range(start, end + 1)]
    assert flat == list(range(1, 21))


def test_ergodicity_report_shape():
    s = scenario_from_dict(minimal(run={"ticks": 10}))
    traces = [run(s, r) for r in range(3)]
    report = ergodicity_report(traces, 1)
    assert set(report.ensemble_final) == {1}
    assert len(report.time_averages[1]) == 3
    assert 0 <= report.gap <= 1
    assert report.max_coverage[1] <= 1


def test_ergodicity_needs_replicates():
    s = scenario_from_dict(minimal(run={"ticks": 5}))
    with pytest.raises(LengthMismatch):
        ergodicity_report([run(s, 0)], 1)


def test_coverage_series_lengths():
    s = scenario_from_dict(minimal(run={"ticks": 7}))
    series = coverage_series(run(s, 0))
    assert len(series[1]) == 7


# --- persistence -------------------------------------------------------------

def test_jsonl_roundtrip(tmp_path):
    s = scenario_from_dict(minimal(run={"ticks": 5}))
    trace = run(s, 0)
    path = tmp_path / "t.jsonl"
    export(trace, "jsonl", path)
    back = ingest_trace(path)
    assert back.events == trace.events
    assert (back.ticks, back.depth, back.agents) == (trace.ticks, trace.depth, trace.agents)


def test_csv_export(tmp_path):
    s = scenario_from_dict(minimal(run={"ticks": 1}))
    path = tmp_path / "m.csv"
    export(run(s, 0), "csv", path)
    lines = path.read_text().strip().splitlines()
    assert lines[0].startswith("tick,agent,coverage")
    assert len(lines) == 2


def test_export_unwritable():
    s = scenario_from_dict(minimal(run={"ticks": 1}))
    with pytest.raises(OSError):
        export(run(s, 0), "jsonl", "/nonexistent-dir/x.jsonl")


# --- strategy comparison -----------------------------------------------------

def test_compare_strategies_deterministic():
    s = scenario_from_dict({
        "seed": 11,
        "initial_predicates": 4,
        "agents": [{"id": 1, "niche": [0], "visibility": "1/4", "strategy": "random"}],
        "run": {"ticks": 12, "depth": 1},
    })
    assert compare_strategies(s, 0) == compare_strategies(s, 0)
