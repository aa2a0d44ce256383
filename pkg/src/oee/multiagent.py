"""Interactive epistemology over a shared frame.

Agents with different languages meet on the intersection of their predicate
sets: each agent's information partition is projected onto the shared
predicates and coarsened back into a partition of the full shared state cube.
Common knowledge, hierarchies, posteriors, and the agreement experiment all
run over that frame; `validate_s5` checks the modal axioms under partition
semantics, with a relation-based debug evaluator as the negative control.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .epistemics import AgentState, Partition, information_partition, \
    knowledge_list, partition_from_classes
from .formula import And, Atom, Formula, Implies, Know, Not, Or, atoms, render
from .universe import State


class GroundMismatch(ValueError):
    pass


class DepthMismatch(ValueError):
    pass


class NotClosedMode(ValueError):
    pass


def knowledge_event(p: Partition, event) -> frozenset:
    """K(E): states whose whole information class lies inside the event."""
    event = frozenset(event)
    if not event <= p.ground:
        raise GroundMismatch("event must be a subset of the partition ground")
    return frozenset(w for cls in p.classes if cls <= event for w in cls)


def meet(partitions) -> Partition:
    """Finest common coarsening: connected components of the class-overlap
    graph across all partitions."""
    partitions = list(partitions)
    if not partitions:
        raise ValueError("meet of zero partitions")
    ground = partitions[0].ground
    if any(p.ground != ground for p in partitions):
        raise GroundMismatch("all partitions must share one ground set")
    all_classes = [cls for p in partitions for cls in p.classes]
    merged = []
    remaining = set(ground)
    while remaining:
        seed = next(iter(remaining))
        component = {seed}
        frontier = {seed}
        while frontier:
            grown = set()
            for cls in all_classes:
                if cls & frontier and not cls <= component:
                    grown |= cls - component
            component |= grown
            frontier = grown
        merged.append(frozenset(component))
        remaining -= component
    return partition_from_classes(ground, merged)


@dataclass(frozen=True, slots=True)
class SharedFrame:
    agents: tuple[int, ...]
    shared_predicates: frozenset[int]
    ground: frozenset[State]
    projected_partitions: dict[int, Partition]
    agent_predicates: dict[int, frozenset[int]]

    def partition_of(self, agent_id: int) -> Partition:
        return self.projected_partitions[agent_id]

    @property
    def closed(self) -> bool:
        return all(p == self.shared_predicates for p in self.agent_predicates.values())


def _full_cube(predicates: frozenset[int]) -> frozenset[State]:
    preds = sorted(predicates)
    states = set()
    for values in product((False, True), repeat=len(preds)):
        states.add(State(predicates, frozenset(p for p, v in zip(preds, values) if v)))
    return frozenset(states)


def _coarsen_onto(ground: frozenset[State], projected_classes) -> Partition:
    """Merge overlapping projected classes into a partition of the ground;
    states hit by no class form one residual class."""
    classes = [frozenset(c) & ground for c in projected_classes]
    classes = [c for c in classes if c]
    merged: list[set] = []
    for cls in classes:
        touching = [m for m in merged if m & cls]
        fused = set(cls)
        for m in touching:
            fused |= m
            merged.remove(m)
        merged.append(fused)
    covered = set().union(*merged) if merged else set()
    residual = set(ground) - covered
    if residual:
        merged.append(residual)
    return partition_from_classes(ground, merged)


def build_shared_frame(agents: list[AgentState], depth: int) -> SharedFrame:
    if not agents:
        raise ValueError("need at least one agent")
    shared = frozenset.intersection(*(a.predicates for a in agents))
    ground = _full_cube(shared)
    projected = {}
    for a in agents:
        partition = information_partition(a, depth)
        projected_classes = [
            frozenset(s.restrict(shared) for s in cls) for cls in partition.classes
        ]
        projected[a.id] = _coarsen_onto(ground, projected_classes)
    return SharedFrame(
        agents=tuple(a.id for a in agents),
        shared_predicates=shared,
        ground=ground,
        projected_partitions=projected,
        agent_predicates={a.id: a.predicates for a in agents},
    )


def frame_from_partitions(predicates, ground, partitions: dict[int, Partition]) -> SharedFrame:
    """A closed-mode frame given explicit partitions (e.g. loaded from file)."""
    preds = frozenset(predicates)
    ground = frozenset(ground)
    for p in partitions.values():
        if p.ground != ground:
            raise GroundMismatch("partition ground differs from the frame ground")
    return SharedFrame(
        agents=tuple(sorted(partitions)),
        shared_predicates=preds,
        ground=ground,
        projected_partitions=dict(partitions),
        agent_predicates={i: preds for i in partitions},
    )


@dataclass(frozen=True, slots=True)
class Holds:
    pass


@dataclass(frozen=True, slots=True)
class FailsAt:
    states: frozenset[State]


@dataclass(frozen=True, slots=True)
class Infeasible:
    missing: frozenset[int]


def _event_of_formula(frame: SharedFrame, f: Formula) -> frozenset[State]:
    from .formula import evaluate, is_propositional

    if not is_propositional(f):
        raise ValueError("event formulas must be propositional")
    return frozenset(s for s in frame.ground if evaluate(f, s.value))


def common_knowledge(frame: SharedFrame, event_formula: Formula, at: State):
    """Holds, FailsAt(states), or Infeasible(missing atoms) when the event is
    not even expressible in the shared language."""
    if at not in frame.ground:
        raise GroundMismatch("evaluation state must lie in the frame ground")
    missing = atoms(event_formula) - frame.shared_predicates
    if missing:
        return Infeasible(frozenset(missing))
    event = _event_of_formula(frame, event_formula)
    the_meet = meet(frame.projected_partitions.values())
    cls = the_meet.class_of(at)
    if cls <= event:
        return Holds()
    return FailsAt(cls - event)


@dataclass(frozen=True, slots=True)
class Hierarchy:
    agent: int
    predicates: frozenset[int]
    levels: tuple[frozenset[State], ...]
    depth: int


def build_hierarchy(frame: SharedFrame, agent: int, at: State, depth: int) -> Hierarchy:
    """Level 0 is the agent's information set at `at`; each next level adds
    every information set (any agent's) meeting the current one."""
    if at not in frame.ground:
        raise GroundMismatch("state must lie in the frame ground")
    if depth < 0:
        raise ValueError("depth must be >= 0")
    level = frame.partition_of(agent).class_of(at)
    levels = [level]
    for _ in range(depth):
        grown = set(level)
        for other in frame.agents:
            for cls in frame.partition_of(other).classes:
                if cls & level:
                    grown |= cls
        level = frozenset(grown)
        levels.append(level)
    return Hierarchy(agent, frame.shared_predicates, tuple(levels), depth)


def hierarchies_consistent(h_i: Hierarchy, h_j: Hierarchy) -> bool:
    """Levelwise equality of the two hierarchies' projections onto the shared
    predicate set."""
    if h_i.depth != h_j.depth:
        raise DepthMismatch("hierarchies must share a depth")
    shared = h_i.predicates & h_j.predicates
    for a, b in zip(h_i.levels, h_j.levels):
        proj_a = frozenset(s.restrict(shared) for s in a)
        proj_b = frozenset(s.restrict(shared) for s in b)
        if proj_a != proj_b:
            return False
    return True


def posterior(p: Partition, event, at) -> Fraction:
    """Uniform-prior posterior of the event given the information class of
    `at` — exact rational."""
    event = frozenset(event)
    if not event <= p.ground:
        raise GroundMismatch("event must be a subset of the partition ground")
    cls = p.class_of(at)
    return Fraction(len(event & cls), len(cls))


@dataclass(frozen=True, slots=True)
class AgreementReport:
    posteriors: dict[int, Fraction]
    common_knowledge_of_posteriors: bool
    agree: bool


def agreement_check(frame: SharedFrame, event, at: State) -> AgreementReport:
    event = frozenset(event)
    if at not in frame.ground or not event <= frame.ground:
        raise GroundMismatch("event and state must lie in the frame ground")
    posteriors = {
        i: posterior(frame.partition_of(i), event, at) for i in frame.agents
    }
    # the event "every agent's posterior equals the realized profile"
    profile_event = frozenset(
        w
        for w in frame.ground
        if all(
            posterior(frame.partition_of(i), event, w) == posteriors[i]
            for i in frame.agents
        )
    )
    the_meet = meet(frame.projected_partitions.values())
    ck = the_meet.class_of(at) <= profile_event
    agree = len(set(posteriors.values())) == 1
    return AgreementReport(posteriors, ck, agree)


@dataclass(frozen=True, slots=True)
class DisjointnessMetrics:
    predicate_jaccard: Fraction
    decided_sentence_jaccard: Fraction


def _jaccard(a: frozenset, b: frozenset) -> Fraction:
    if not a and not b:
        return Fraction(1)
    return Fraction(len(a & b), len(a | b))


def disjointness(a: AgentState, b: AgentState, depth: int) -> DisjointnessMetrics:
    pred_j = _jaccard(a.predicates, b.predicates)
    decided_a = frozenset((render(f), v) for f, v in knowledge_list(a, depth))
    decided_b = frozenset((render(f), v) for f, v in knowledge_list(b, depth))
    return DisjointnessMetrics(pred_j, _jaccard(decided_a, decided_b))


# --- S5 validation -----------------------------------------------------------


@dataclass(frozen=True, slots=True)
class SchemeReport:
    name: str
    ok: bool
    counterexample: tuple[str, State] | None = None


def _accessible_from_partition(p: Partition):
    return {w: cls for cls in p.classes for w in cls}


def _epistemic_extension(f: Formula, ground, access, cache) -> frozenset:
    """States where f holds, under accessibility maps agent -> state -> set."""
    if f in cache:
        return cache[f]
    if isinstance(f, Atom):
        out = frozenset(w for w in ground if w.value(f.index))
    elif isinstance(f, Not):
        out = ground - _epistemic_extension(f.operand, ground, access, cache)
    elif isinstance(f, And):
        out = _epistemic_extension(f.left, ground, access, cache) & \
            _epistemic_extension(f.right, ground, access, cache)
    elif isinstance(f, Or):
        out = _epistemic_extension(f.left, ground, access, cache) | \
            _epistemic_extension(f.right, ground, access, cache)
    elif isinstance(f, Implies):
        out = (ground - _epistemic_extension(f.left, ground, access, cache)) | \
            _epistemic_extension(f.right, ground, access, cache)
    elif isinstance(f, Know):
        ext = _epistemic_extension(f.operand, ground, access, cache)
        out = frozenset(w for w in ground if access[f.agent][w] <= ext)
    else:
        raise TypeError(f"unsupported in extension semantics: {f!r}")
    cache[f] = out
    return out


def _validate_schemes(ground, access, agents, base_formulas) -> list[SchemeReport]:
    cache: dict = {}

    def ext(f):
        return _epistemic_extension(f, ground, access, cache)

    # distinct extensions suffice: every scheme is extensional, so keep one
    # witness formula per event (at most 2^|ground| of them)
    witnesses = {}
    for f in base_formulas:
        witnesses.setdefault(ext(f), f)
    base_formulas = list(witnesses.values())

    reports = []

    def check(name, pairs):
        for f, bad_states in pairs:
            if bad_states:
                state = min(bad_states, key=State.sort_key)
                reports.append(SchemeReport(name, False, (render(f), state)))
                return
        reports.append(SchemeReport(name, True))

    check(
        "reflection",
        ((Know(i, f), ext(Know(i, f)) - ext(f)) for i in agents for f in base_formulas),
    )
    check(
        "positive-introspection",
        (
            (Know(i, f), ext(Know(i, f)) - ext(Know(i, Know(i, f))))
            for i in agents
            for f in base_formulas
        ),
    )
    check(
        "negative-introspection",
        (
            (Know(i, f), (ground - ext(Know(i, f))) - ext(Know(i, Not(Know(i, f)))))
            for i in agents
            for f in base_formulas
        ),
    )
    check(
        "distributivity",
        (
            (
                Implies(f, g),
                (ext(Know(i, Implies(f, g))) & ext(Know(i, f))) - ext(Know(i, g)),
            )
            for i in agents
            for f in base_formulas
            for g in base_formulas
        ),
    )
    necessitation_fail = []
    for i in agents:
        for f in base_formulas:
            if ext(f) == ground and ext(Know(i, f)) != ground:
                necessitation_fail.append((Know(i, f), ground - ext(Know(i, f))))
    check("necessitation", necessitation_fail)
    return reports


def _s5_base_formulas(predicates: frozenset[int], depth: int):
    from .formula import enumerate_sentences

    preds = sorted(predicates)[:2]
    return enumerate_sentences(frozenset(preds), depth)


def validate_s5(frame: SharedFrame, depth: int) -> list[SchemeReport]:
    """Check reflection, both introspection schemes, distributivity, and
    necessitation over the frame's partitions.  Closed mode only."""
    if not frame.closed:
        raise NotClosedMode("agents must share one predicate set")
    access = {
        i: _accessible_from_partition(frame.partition_of(i)) for i in frame.agents
    }
    base = _s5_base_formulas(frame.shared_predicates, depth)
    return _validate_schemes(frame.ground, access, frame.agents, base)


def validate_relation(ground, relation: dict, agents, predicates, depth: int):
    """Debug entry point: run the same scheme checks over an arbitrary
    accessibility relation (state -> state set) shared by the given agents.
    Non-partition relations are expected to fail introspection."""
    ground = frozenset(ground)
    access = {i: {w: frozenset(relation[w]) for w in ground} for i in agents}
    base = _s5_base_formulas(frozenset(predicates), depth)
    return _validate_schemes(ground, access, tuple(agents), base)
