"""Scenario configuration, the deterministic run engine, trace persistence,
and the ergodicity / time-binning experiments.

A run is fully determined by (scenario, replicate index): the universe stream
is seeded from hash(seed, replicate) and every agent observation from
hash(seed, replicate, agent, tick, predicate), so traces are byte-identical
across reruns and platforms.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .epistemics import AgentState, Truth3, adjacent_possible, agent_state, decide
from .formula import enumerate_sentences, evaluate
from .multiagent import _jaccard
from .revision import RevisionStrategy, StrategyKind, classify_extension, revise
from .rng import mix
from .universe import NoveltyKind, State, UniverseGenerator, empty_theory


class SchemaError(ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class LengthMismatch(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class AgentSpec:
    id: int
    niche: frozenset[int]
    visibility: Fraction
    strategy: RevisionStrategy


@dataclass(frozen=True, slots=True)
class RunConfig:
    ticks: int
    depth: int
    replicates: int


@dataclass(frozen=True, slots=True)
class Scenario:
    seed: int
    weights: tuple[Fraction, Fraction, Fraction]
    initial_predicates: int
    clause_arity: int
    agents: tuple[AgentSpec, ...]
    run: RunConfig


_DEFAULT_WEIGHTS = (Fraction(1, 2), Fraction(3, 10), Fraction(1, 5))
_DEFAULT_VISIBILITY = Fraction(3, 5)


def _fraction(value, path: str) -> Fraction:
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        raise SchemaError(path, f"not a rational: {value!r}")


def scenario_from_dict(data: dict) -> Scenario:
    if not isinstance(data, dict):
        raise SchemaError("$", "scenario must be an object")
    if "seed" not in data or not isinstance(data["seed"], int):
        raise SchemaError("seed", "required integer")
    raw_weights = data.get("weights")
    if raw_weights is None:
        weights = _DEFAULT_WEIGHTS
    else:
        if not isinstance(raw_weights, list) or len(raw_weights) != 3:
            raise SchemaError("weights", "must be a list of three rationals")
        weights = tuple(_fraction(w, f"weights[{i}]") for i, w in enumerate(raw_weights))
        if any(w < 0 for w in weights) or sum(weights) != 1:
            raise SchemaError("weights", "must be nonnegative and sum to 1")
    initial = data.get("initial_predicates", 3)
    if not isinstance(initial, int) or initial < 1:
        raise SchemaError("initial_predicates", "must be an integer >= 1")
    arity = data.get("clause_arity", 2)
    if not isinstance(arity, int) or arity < 2:
        raise SchemaError("clause_arity", "must be an integer >= 2")
    raw_agents = data.get("agents")
    if not isinstance(raw_agents, list) or not raw_agents:
        raise SchemaError("agents", "must be a nonempty list")
    agents = []
    seen_ids = set()
    for i, raw in enumerate(raw_agents):
        path = f"agents[{i}]"
        if not isinstance(raw, dict):
            raise SchemaError(path, "must be an object")
        aid = raw.get("id")
        if not isinstance(aid, int):
            raise SchemaError(f"{path}.id", "required integer")
        if aid in seen_ids:
            raise SchemaError(f"{path}.id", f"duplicate agent id {aid}")
        seen_ids.add(aid)
        niche = raw.get("niche", [])
        if not isinstance(niche, list) or not all(isinstance(p, int) for p in niche):
            raise SchemaError(f"{path}.niche", "must be a list of predicate indices")
        visibility = (
            _fraction(raw["visibility"], f"{path}.visibility")
            if "visibility" in raw
            else _DEFAULT_VISIBILITY
        )
        if not 0 <= visibility <= 1:
            raise SchemaError(f"{path}.visibility", "must lie in [0, 1]")
        kind_name = raw.get("strategy", "deductive")
        try:
            kind = StrategyKind(kind_name)
        except ValueError:
            raise SchemaError(f"{path}.strategy", f"unknown strategy {kind_name!r}")
        strategy_seed = raw.get("strategy_seed", 0)
        if not isinstance(strategy_seed, int):
            raise SchemaError(f"{path}.strategy_seed", "must be an integer")
        agents.append(
            AgentSpec(aid, frozenset(niche), visibility, RevisionStrategy(kind, strategy_seed))
        )
    raw_run = data.get("run", {})
    if not isinstance(raw_run, dict):
        raise SchemaError("run", "must be an object")
    ticks = raw_run.get("ticks", 10)
    depth = raw_run.get("depth", 1)
    replicates = raw_run.get("replicates", 1)
    if not isinstance(ticks, int) or ticks < 1:
        raise SchemaError("run.ticks", "must be an integer >= 1")
    if not isinstance(depth, int) or depth < 0:
        raise SchemaError("run.depth", "must be an integer >= 0")
    if not isinstance(replicates, int) or replicates < 1:
        raise SchemaError("run.replicates", "must be an integer >= 1")
    return Scenario(
        seed=data["seed"],
        weights=weights,
        initial_predicates=initial,
        clause_arity=arity,
        agents=tuple(agents),
        run=RunConfig(ticks, depth, replicates),
    )


def load_scenario(path) -> Scenario:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError("$", f"invalid JSON: {exc}")
    return scenario_from_dict(data)


# --- traces ------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class TraceEvent:
    tick: int
    seq: int
    kind: str
    agent: int | None
    payload: dict

    def to_json(self) -> str:
        record = {
            "tick": self.tick,
            "seq": self.seq,
            "kind": self.kind,
            "agent": self.agent,
            "payload": self.payload,
        }
        return json.dumps(record, sort_keys=True, separators=(",", ":"))


@dataclass(slots=True)
class Trace:
    ticks: int
    depth: int
    agents: tuple[int, ...]
    events: list[TraceEvent] = field(default_factory=list)


@dataclass(slots=True)
class RunResult:
    trace: Trace
    agents: dict[int, AgentState]
    universe: UniverseGenerator


# --- coverage ----------------------------------------------------------------


def coverage_slow(agent: AgentState, revealed: frozenset[int], actual: State, depth: int) -> Fraction:
    """Decided-correct fraction by direct enumeration (reference path)."""
    sentences = enumerate_sentences(revealed, depth)
    correct = 0
    for f in sentences:
        verdict = decide(agent, f)
        if verdict is Truth3.TRUE and evaluate(f, actual.value):
            correct += 1
        elif verdict is Truth3.FALSE and not evaluate(f, actual.value):
            correct += 1
    return Fraction(correct, len(sentences))


def _op_and(a, b):
    return a and b


def _op_or(a, b):
    return a or b


def _op_implies(a, b):
    return (not a) or b


_OPS = (_op_and, _op_or, _op_implies)


def coverage_fraction(agent: AgentState, revealed: frozenset[int], actual: State, depth: int) -> Fraction:
    """Decided-correct fraction of the depth-bounded sentence space over the
    revealed predicates, against the actual state.  Combinatorial fast path
    for depth <= 1; falls back to enumeration beyond that."""
    if depth > 1:
        return coverage_slow(agent, revealed, actual, depth)
    preds = sorted(revealed)
    m = len(preds)
    models = agent.theory.models()
    n_models = len(models)
    if n_models == 0:
        return coverage_slow(agent, revealed, actual, depth)
    full = (1 << n_models) - 1
    masks = {}
    for p in preds:
        if p in agent.predicates:
            mask = 0
            for i, s in enumerate(models):
                if s.value(p):
                    mask |= 1 << i
            masks[p] = mask
    # per predicate: decided value (via its model mask) and actual value
    decided = {}  # pred -> bool decided value
    open_preds = []  # in language but model-dependent
    for p in preds:
        mask = masks.get(p)
        if mask is None:
            continue
        if mask == full and n_models:
            decided[p] = True
        elif mask == 0 and n_models:
            decided[p] = False
        else:
            open_preds.append(p)
    correct_atoms = sum(
        1 for p, v in decided.items() if v == actual.value(p)
    )
    if depth == 0:
        return Fraction(correct_atoms, m)
    # negation of an atom is decided-correct exactly when the atom is
    correct = 2 * correct_atoms
    # decided x decided pairs by category counting
    cats = {(dv, av): 0 for dv in (False, True) for av in (False, True)}
    for p, dv in decided.items():
        cats[(dv, actual.value(p))] += 1
    for op in _OPS:
        for (dv1, av1), n1 in cats.items():
            if not n1:
                continue
            for (dv2, av2), n2 in cats.items():
                if n2 and op(dv1, dv2) == op(av1, av2):
                    correct += n1 * n2
    # pairs involving an open predicate: resolve against the model masks
    in_lang = [p for p in preds if p in masks]
    ops_masks = (
        lambda a, b: a & b,
        lambda a, b: a | b,
        lambda a, b: (a ^ full) | b,
    )
    mixed_pairs = [(a, b) for a in open_preds for b in in_lang]
    mixed_pairs += [(a, b) for a in decided for b in open_preds]
    for a, b in mixed_pairs:
        for op, opm in zip(_OPS, ops_masks):
            ext = opm(masks[a], masks[b])
            if ext == full:
                value = True
            elif ext == 0:
                value = False
            else:
                continue
            if value == op(actual.value(a), actual.value(b)):
                correct += 1
    total = 2 * m + 3 * m * m
    return Fraction(correct, total)


# --- run engine --------------------------------------------------------------


def _fraction_str(x: Fraction) -> str:
    return str(x)


def run_full(scenario: Scenario, replicate: int) -> RunResult:
    run_seed = mix(scenario.seed, replicate)
    g = UniverseGenerator(
        run_seed, scenario.weights, scenario.initial_predicates, scenario.clause_arity
    )
    trace = Trace(
        ticks=scenario.run.ticks,
        depth=scenario.run.depth,
        agents=tuple(spec.id for spec in scenario.agents),
    )
    agents: dict[int, AgentState] = {
        spec.id: agent_state(spec.id, empty_theory()) for spec in scenario.agents
    }
    seq = 0

    def emit(tick, kind, agent, payload):
        nonlocal seq
        trace.events.append(TraceEvent(tick, seq, kind, agent, payload))
        seq += 1

    for tick in range(1, scenario.run.ticks + 1):
        event = g.tick()
        if event.kind is NoveltyKind.EMERGENCE:
            emit(tick, "reveal", None, {
                "predicate": event.predicate,
                "value": event.value,
                "clause": event.clause.render(),
            })
        elif event.kind is NoveltyKind.INNOVATION:
            emit(tick, "clause-added", None, {"clause": event.clause.render()})
        else:
            emit(tick, "variation", None, {
                "predicate": event.predicate,
                "value": event.value,
                "retracted": [c.render() for c in event.retracted],
            })
        per_agent_revision: dict[int, tuple] = {}
        for spec in scenario.agents:
            aseed = mix(scenario.seed, replicate, spec.id)
            niche = spec.niche & g.revealed_predicates
            obs = g.observe(niche, spec.visibility, aseed, salt=0)
            if spec.strategy.kind is not StrategyKind.DEDUCTIVE:
                # nonlogical search spends extra effort exploring: a second
                # independent observation draw per tick
                obs = obs | g.observe(niche, spec.visibility, aseed, salt=1)
            emit(tick, "observation", spec.id, {
                "literals": [[p, v] for p, v in sorted(obs)],
            })
            before = agents[spec.id]
            after = revise(before, obs, spec.strategy)
            if after.theory != before.theory:
                adjacent = adjacent_possible(before, after)
                extension = classify_extension(before.theory, after.theory)
                per_agent_revision[spec.id] = (extension, len(adjacent))
                emit(tick, "revision", spec.id, {
                    "old": before.theory.digest(),
                    "new": after.theory.digest(),
                    "extension": extension.value,
                    "adjacent": len(adjacent),
                })
            agents[spec.id] = after
        for spec in scenario.agents:
            state = agents[spec.id]
            coverage = coverage_fraction(
                state, g.revealed_predicates, g.actual, scenario.run.depth
            )
            others = [agents[s.id] for s in scenario.agents if s.id != spec.id]
            if others:
                disjointness = sum(
                    (_jaccard(state.predicates, o.predicates) for o in others),
                    Fraction(0),
                ) / len(others)
                disjointness_str = _fraction_str(disjointness)
            else:
                disjointness_str = None
            extension, adjacent = per_agent_revision.get(spec.id, (None, 0))
            emit(tick, "metrics", spec.id, {
                "coverage": _fraction_str(coverage),
                "disjointness": disjointness_str,
                "adjacent": adjacent,
                "extension": extension.value if extension else None,
            })
    return RunResult(trace, agents, g)


def run(scenario: Scenario, replicate: int) -> Trace:
    return run_full(scenario, replicate).trace


# --- analysis ----------------------------------------------------------------


def coverage_series(trace: Trace) -> dict[int, list[Fraction]]:
    """Per-agent coverage indexed by tick (tick t at position t-1)."""
    series: dict[int, list[Fraction]] = {a: [] for a in trace.agents}
    for event in trace.events:
        if event.kind == "metrics":
            series[event.agent].append(Fraction(event.payload["coverage"]))
    return series


@dataclass(frozen=True, slots=True)
class ErgodicityReport:
    time_averages: dict[int, list[Fraction]]  # agent -> per-replicate averages
    ensemble_final: dict[int, Fraction]  # agent -> mean final-tick coverage
    max_coverage: dict[int, Fraction]  # agent -> max c_i(t) over all runs
    gap: Fraction


def ergodicity_report(traces: list[Trace], depth: int) -> ErgodicityReport:
    if len(traces) < 2:
        raise LengthMismatch("ensemble statistics need at least 2 replicates")
    ticks = traces[0].ticks
    agents = traces[0].agents
    if any(t.ticks != ticks or t.agents != agents for t in traces):
        raise LengthMismatch("replicates must share tick counts and agents")
    time_averages: dict[int, list[Fraction]] = {a: [] for a in agents}
    finals: dict[int, list[Fraction]] = {a: [] for a in agents}
    max_coverage: dict[int, Fraction] = {a: Fraction(0) for a in agents}
    for trace in traces:
        series = coverage_series(trace)
        for a in agents:
            values = series[a]
            time_averages[a].append(sum(values, Fraction(0)) / len(values))
            finals[a].append(values[-1])
            max_coverage[a] = max(max_coverage[a], max(values))
    ensemble_final = {
        a: sum(finals[a], Fraction(0)) / len(finals[a]) for a in agents
    }
    gap = max(
        abs(sum(time_averages[a], Fraction(0)) / len(time_averages[a]) - ensemble_final[a])
        for a in agents
    )
    return ErgodicityReport(time_averages, ensemble_final, max_coverage, gap)


def bin_timeline(trace: Trace) -> list[tuple[int, int]]:
    """Ragged after-the-fact bins: one boundary at every tick carrying a
    theory-changing revision, covering 1..T exactly."""
    revision_ticks = sorted(
        {e.tick for e in trace.events if e.kind == "revision"}
    )
    bins = []
    start = 1
    for t in revision_ticks:
        bins.append((start, t))
        start = t + 1
    if start <= trace.ticks:
        bins.append((start, trace.ticks))
    return bins


def compare_strategies(scenario: Scenario, replicate: int = 0, depth: int | None = None):
    """Run the scenario as configured and again with every agent deductive;
    report revealed-true sentences each configured agent decides True that the
    deductive twin leaves Undecidable or NotInLanguage."""
    if depth is None:
        depth = scenario.run.depth
    deductive = Scenario(
        seed=scenario.seed,
        weights=scenario.weights,
        initial_predicates=scenario.initial_predicates,
        clause_arity=scenario.clause_arity,
        agents=tuple(
            AgentSpec(s.id, s.niche, s.visibility, RevisionStrategy(StrategyKind.DEDUCTIVE, s.strategy.seed))
            for s in scenario.agents
        ),
        run=scenario.run,
    )
    configured = run_full(scenario, replicate)
    baseline = run_full(deductive, replicate)
    actual = configured.universe.actual
    revealed = configured.universe.revealed_predicates
    gained: dict[int, list[str]] = {}
    from .formula import render

    for spec in scenario.agents:
        a = configured.agents[spec.id]
        b = baseline.agents[spec.id]
        found = []
        for f in enumerate_sentences(revealed, depth):
            if not evaluate(f, actual.value):
                continue
            if decide(a, f) is Truth3.TRUE and decide(b, f) in (
                Truth3.UNDECIDABLE,
                Truth3.NOT_IN_LANGUAGE,
            ):
                found.append(render(f))
        gained[spec.id] = found
    return gained


# --- persistence -------------------------------------------------------------


def export(obj, fmt: str, path) -> None:
    path = Path(path)
    if isinstance(obj, Trace):
        if fmt == "jsonl":
            with open(path, "w") as fh:
                header = {
                    "agents": list(obj.agents),
                    "depth": obj.depth,
                    "kind": "header",
                    "ticks": obj.ticks,
                }
                fh.write(json.dumps(header, sort_keys=True, separators=(",", ":")) + "\n")
                for event in obj.events:
                    fh.write(event.to_json() + "\n")
            return
        if fmt == "csv":
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(
                    ["tick", "agent", "coverage", "disjointness", "adjacent", "extension"]
                )
                for e in obj.events:
                    if e.kind != "metrics":
                        continue
                    writer.writerow([
                        e.tick,
                        e.agent,
                        e.payload["coverage"],
                        e.payload["disjointness"] or "",
                        e.payload["adjacent"],
                        e.payload["extension"] or "",
                    ])
            return
        raise ValueError(f"unknown trace format {fmt!r}")
    if isinstance(obj, ErgodicityReport):
        if fmt != "csv":
            raise ValueError("ergodicity reports export as csv")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["agent", "mean_time_average", "ensemble_final", "max_coverage", "gap"])
            for a in sorted(obj.ensemble_final):
                mean_ta = sum(obj.time_averages[a], Fraction(0)) / len(obj.time_averages[a])
                writer.writerow([
                    a,
                    str(mean_ta),
                    str(obj.ensemble_final[a]),
                    str(obj.max_coverage[a]),
                    str(obj.gap),
                ])
        return
    raise TypeError(f"cannot export {type(obj).__name__}")


def ingest_trace(path) -> Trace:
    events = []
    header = None
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            if record.get("kind") == "header":
                header = record
                continue
            events.append(
                TraceEvent(
                    record["tick"],
                    record["seq"],
                    record["kind"],
                    record["agent"],
                    record["payload"],
                )
            )
    if header is None:
        raise ValueError("trace file has no header line")
    return Trace(
        ticks=header["ticks"],
        depth=header["depth"],
        agents=tuple(header["agents"]),
        events=events,
    )
