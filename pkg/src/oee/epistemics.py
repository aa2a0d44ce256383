"""Agent-local calculus: the three-valued-plus decision procedure, knowledge
lists, contextual and adjacent possibles, local knowledge, information
partitions, and theory property checks.

Entailment is semantic: a sentence is decided True when it holds in every
model of the agent's theory, False when it holds in none.  This is exact at
desk scale (model sets are enumerated); nothing here relies on proof search.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from .formula import Formula, Know, atoms, enumerate_sentences, evaluate, is_propositional
from .universe import State, Theory


class DomainError(ValueError):
    pass


class EmptyModel(ValueError):
    pass


class Truth3(Enum):
    TRUE = "true"
    FALSE = "false"
    UNDECIDABLE = "undecidable"
    NOT_IN_LANGUAGE = "not-in-language"


@dataclass(frozen=True, slots=True)
class Possible:
    """The agent's possible: (model, theory, predicates), componentwise."""

    theory: Theory

    @property
    def predicates(self) -> frozenset[int]:
        return self.theory.predicates

    @property
    def model(self) -> tuple[State, ...]:
        return self.theory.models()


@dataclass(frozen=True, slots=True)
class AgentState:
    id: int
    possible: Possible
    observations: frozenset[tuple[int, bool]] = frozenset()
    # (theory digest, predicate count) per revision epoch, oldest first
    history: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        obs_preds = {p for p, _ in self.observations}
        if not obs_preds <= self.possible.predicates:
            raise ValueError("observation predicates must lie inside the agent language")

    @property
    def theory(self) -> Theory:
        return self.possible.theory

    @property
    def predicates(self) -> frozenset[int]:
        return self.possible.predicates


def agent_state(agent_id: int, theory: Theory, observations=frozenset(), history=()) -> AgentState:
    return AgentState(agent_id, Possible(theory), frozenset(observations), tuple(history))


@dataclass(frozen=True, slots=True)
class Partition:
    """Disjoint covering family of classes over a finite ground set.  Generic
    over hashable elements (concrete States here, bare ints in tests)."""

    ground: frozenset
    classes: tuple[frozenset, ...]

    def __post_init__(self):
        total = 0
        union = set()
        for cls in self.classes:
            if not cls:
                raise ValueError("empty partition class")
            total += len(cls)
            union |= cls
        if union != set(self.ground) or total != len(self.ground):
            raise ValueError("classes must partition the ground set exactly")

    def class_of(self, element) -> frozenset:
        for cls in self.classes:
            if element in cls:
                return cls
        raise KeyError(element)

    def refines(self, other: "Partition") -> bool:
        return all(any(cls <= o for o in other.classes) for cls in self.classes)


def partition_from_classes(ground, classes) -> Partition:
    canonical = tuple(sorted((frozenset(c) for c in classes), key=_class_key))
    return Partition(frozenset(ground), canonical)


def _class_key(cls: frozenset):
    return sorted(e.sort_key() if isinstance(e, State) else (e,) for e in cls)


@lru_cache(maxsize=1 << 18)
def _truth_mask(f: Formula, theory: Theory) -> int:
    """Bitmask of models of `theory` satisfying `f` (bit i = model i)."""
    mask = 0
    for i, state in enumerate(theory.models()):
        if evaluate(f, state.value):
            mask |= 1 << i
    return mask


def decide(agent: AgentState, f: Formula) -> Truth3:
    """δ: truth value of a propositional sentence under the agent's theory."""
    if not is_propositional(f):
        raise ValueError("decide is defined for propositional sentences only")
    if not atoms(f) <= agent.predicates:
        return Truth3.NOT_IN_LANGUAGE
    theory = agent.theory
    mask = _truth_mask(f, theory)
    full = (1 << len(theory.models())) - 1
    if mask == full:
        return Truth3.TRUE
    if mask == 0:
        return Truth3.FALSE
    return Truth3.UNDECIDABLE


def knowledge_list(agent: AgentState, depth: int) -> list[tuple[Formula, bool]]:
    """Every enumerated sentence the agent decides, paired with its value."""
    if not agent.predicates:
        return []
    out = []
    for f in enumerate_sentences(agent.predicates, depth):
        verdict = decide(agent, f)
        if verdict is Truth3.TRUE:
            out.append((f, True))
        elif verdict is Truth3.FALSE:
            out.append((f, False))
    return out


def contextual_possible(agent: AgentState) -> frozenset[State]:
    """𝒦: the states fully evaluable and admissible under the agent's theory."""
    return frozenset(agent.theory.models())


def local_knowledge(agent: AgentState, omega: State, depth: int) -> frozenset[Formula]:
    """κ(ω): decided-true sentences that hold at ω, wrapped as Know(agent, ·)."""
    if omega.domain != agent.predicates:
        raise DomainError("state domain must equal the agent's predicate set")
    out = set()
    for f in enumerate_sentences(agent.predicates, depth):
        if decide(agent, f) is Truth3.TRUE and evaluate(f, omega.value):
            out.add(Know(agent.id, f))
    return frozenset(out)


def information_partition(agent: AgentState, depth: int) -> Partition:
    """States of the contextual possible, merged when indistinguishable: equal
    κ and agreement on every currently observed literal."""
    model = contextual_possible(agent)
    if not model:
        raise EmptyModel("inconsistent theory: no states to partition")
    obs = sorted(agent.observations)
    groups: dict[tuple, set[State]] = {}
    for omega in model:
        obs_sig = tuple(omega.value(p) == v for p, v in obs)
        kappa_sig = frozenset(local_knowledge(agent, omega, depth))
        groups.setdefault((obs_sig, kappa_sig), set()).add(omega)
    return partition_from_classes(model, groups.values())


def adjacent_possible(before: AgentState, after: AgentState) -> frozenset[State]:
    """𝒜: states admissible now that were not admissible before.  States over
    different predicate domains are never identified."""
    if before.id != after.id:
        raise ValueError("adjacent_possible compares one agent across epochs")
    return contextual_possible(after) - contextual_possible(before)


@dataclass(frozen=True, slots=True)
class TheoryReport:
    consistent: bool
    coherent: bool
    complete: bool


def check_theory(t: Theory) -> TheoryReport:
    models = t.models()
    consistent = bool(models)
    if not consistent:
        # vacuous entailment decides everything both ways
        return TheoryReport(consistent=False, coherent=False, complete=True)
    complete = True
    for p in sorted(t.predicates):
        values = {s.value(p) for s in models}
        if len(values) != 1:
            complete = False
            break
    return TheoryReport(consistent=True, coherent=True, complete=complete)


def closure_check(sentences, agent_id: int) -> bool:
    """True iff every non-Know member also appears Know-wrapped for the agent."""
    members = set(sentences)
    return all(
        Know(agent_id, f) in members for f in members if not isinstance(f, Know)
    )
