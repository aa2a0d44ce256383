"""Theory revision under novelty.

Two duties: repair a theory contradicted by observation (retract clauses until
the observed literals fit, then record them as units), and extend the language
when observations mention unknown predicates.  Strategies differ in how they
rank repair candidates and in which unforced bridging clauses they adopt when
the language grows; the deductive strategy adopts none.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from itertools import combinations

from .epistemics import AgentState, Possible
from .rng import mix
from .universe import Clause, Theory, clause, unit


class StrategyKind(Enum):
    DEDUCTIVE = "deductive"
    RANDOM = "random"
    HEURISTIC = "heuristic"
    AESTHETIC = "aesthetic"


@dataclass(frozen=True, slots=True)
class RevisionStrategy:
    kind: StrategyKind
    seed: int = 0


class ExtensionClass(Enum):
    ESSENTIAL = "essential"
    INESSENTIAL = "inessential"
    NOT_AN_EXTENSION = "not-an-extension"


def symmetry_score(theory: Theory) -> int:
    """Number of predicate transpositions leaving the clause set fixed."""
    preds = sorted(theory.predicates)
    clause_set = frozenset(theory.clauses)
    count = 0
    for a, b in combinations(preds, 2):
        swap = {a: b, b: a}
        swapped = frozenset(
            Clause(frozenset((swap.get(p, p), pol) for p, pol in c.literals))
            for c in clause_set
        )
        if swapped == clause_set:
            count += 1
    return count


def _retraction_age_key(retracted_indices, n_clauses: int):
    # smaller = retracting newer clauses first
    return tuple(sorted(n_clauses - 1 - i for i in retracted_indices))


def _strategy_key(strategy: RevisionStrategy, theory: Theory, retracted, n_clauses: int):
    age = _retraction_age_key(retracted, n_clauses)
    text = theory.canonical_text()
    if strategy.kind is StrategyKind.DEDUCTIVE:
        primary = (len(retracted), age)
    elif strategy.kind is StrategyKind.RANDOM:
        primary = mix(strategy.seed, int(theory.digest(), 16))
    elif strategy.kind is StrategyKind.HEURISTIC:
        primary = sum(len(c.literals) for c in theory.clauses)
    else:
        primary = -symmetry_score(theory)
    return (primary, age, text)


def propose_revisions(agent: AgentState, conflict, strategy: RevisionStrategy, budget: int):
    """Ranked consistent repairs of the agent's theory against the observed
    literals: retract some clauses, keep the rest, record the observations as
    unit clauses.  Ranking is strategy-scored, deterministic given seeds."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    conflict = sorted(frozenset(conflict))
    theory = agent.theory
    preds = theory.predicates | {p for p, _ in conflict}
    obs_units = [unit(p, v) for p, v in conflict]
    n = len(theory.clauses)
    candidates = []
    pool_cap = max(budget * 8, 64)
    # Any unsatisfiable core of theory + observation units is connected (via
    # shared predicates) to an observed predicate, because the theory alone is
    # consistent.  Minimal repairs therefore retract only conflict-connected
    # clauses; the full clause set is the fallback.
    reach = {p for p, _ in conflict}
    suspects: set[int] = set()
    grown = True
    while grown:
        grown = False
        for i, c in enumerate(theory.clauses):
            if i not in suspects and c.predicates() & reach:
                suspects.add(i)
                reach |= c.predicates()
                grown = True
    pools = [sorted(suspects)]
    if len(suspects) < n:
        pools.append(list(range(n)))
    for pool in pools:
        for size in range(len(pool) + 1):
            for retracted in combinations(pool, size):
                kept = tuple(c for i, c in enumerate(theory.clauses) if i not in retracted)
                clauses = kept + tuple(u for u in obs_units if u not in kept)
                candidate = Theory(preds, clauses)
                if candidate.models():
                    candidates.append((retracted, candidate))
            if len(candidates) >= pool_cap:
                break
        if candidates:
            break
    candidates.sort(key=lambda rc: _strategy_key(strategy, rc[1], rc[0], n))
    ranked = []
    seen = set()
    for _, candidate in candidates:
        if candidate not in seen:
            seen.add(candidate)
            ranked.append(candidate)
        if len(ranked) == budget:
            break
    return ranked


def _bridging_candidates(theory: Theory, new_pred: int, old_preds):
    """Consistent two-literal implications linking a new predicate to an old
    one, given the theory already contains the observed units."""
    out = []
    for r in sorted(old_preds):
        if r == new_pred:
            continue
        for new_pol in (True, False):
            for old_pol in (True, False):
                c = clause((new_pred, new_pol), (r, old_pol))
                if c in theory.clauses:
                    continue
                candidate = theory.with_clause(c)
                if candidate.models():
                    out.append(candidate)
    return out


def _bridge_key(strategy: RevisionStrategy, theory: Theory):
    text = theory.canonical_text()
    if strategy.kind is StrategyKind.RANDOM:
        primary = mix(strategy.seed, int(theory.digest(), 16))
    elif strategy.kind is StrategyKind.HEURISTIC:
        primary = sum(len(c.literals) for c in theory.clauses)
    else:
        primary = -symmetry_score(theory)
    return (primary, text)


def revise(agent: AgentState, observations, strategy: RevisionStrategy) -> AgentState:
    """One revision step.  Language extension for unknown predicates (with one
    strategy-chosen bridging clause per new predicate for the nonlogical
    strategies), retraction-based repair for contradictions, observed literals
    recorded as unit clauses.  The result is always consistent."""
    obs = frozenset(observations)
    old_theory = agent.theory
    old_preds = agent.predicates
    new_preds = sorted({p for p, _ in obs} - old_preds)

    with_units = Theory(
        old_theory.predicates | {p for p, _ in obs},
        old_theory.clauses
        + tuple(
            u
            for p, v in sorted(obs)
            for u in (unit(p, v),)
            if u not in old_theory.clauses
        ),
    )
    if with_units.models():
        theory = with_units
    else:
        theory = propose_revisions(agent, obs, strategy, budget=16)[0]

    if strategy.kind is not StrategyKind.DEDUCTIVE:
        anchors = old_preds if old_preds else set()
        for q in new_preds:
            if not anchors:
                anchors = {p for p in theory.predicates if p != q}
                continue
            options = _bridging_candidates(theory, q, anchors)
            if options:
                theory = min(options, key=lambda t: _bridge_key(strategy, t))
            anchors = anchors | {q}

    history = agent.history
    if theory != old_theory:
        history = history + ((theory.digest(), len(theory.predicates)),)
    return replace(agent, possible=Possible(theory), observations=obs, history=history)


@lru_cache(maxsize=1 << 16)
def _project(theory: Theory, shared: frozenset[int]):
    return frozenset(s.restrict(shared) for s in theory.models())


@lru_cache(maxsize=1 << 16)
def _entailed_by(c: Clause, theory: Theory) -> bool:
    if not c.predicates() <= theory.predicates:
        return False
    return all(c.satisfied_by(s) for s in theory.models())


def classify_extension(old: Theory, new: Theory) -> ExtensionClass:
    shared = old.predicates & new.predicates
    if not _project(new, shared) <= _project(old, shared):
        return ExtensionClass.NOT_AN_EXTENSION
    if new.predicates != old.predicates:
        return ExtensionClass.ESSENTIAL
    if all(_entailed_by(c, old) for c in new.clauses):
        return ExtensionClass.INESSENTIAL
    return ExtensionClass.ESSENTIAL
