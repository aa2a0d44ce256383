"""Formula language: terms, parsing, printing, canonical enumeration.

Grammar (EBNF), whitespace insignificant:

    formula := implies
    implies := or ("->" implies)?
    or      := and ("|" and)*
    and     := unary ("&" unary)*
    unary   := "~" unary
             | "K" INT unary
             | "C" "{" INT ("," INT)* "}" unary
             | "(" formula ")"
             | ATOM
    ATOM    := "p" INT

Precedence: ~ binds tightest, then &, then |, then -> (right-associative).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache


class Formula:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    index: int


@dataclass(frozen=True, slots=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Know(Formula):
    agent: int
    operand: Formula


@dataclass(frozen=True, slots=True)
class Common(Formula):
    agents: frozenset[int]
    operand: Formula

    def __post_init__(self):
        if not self.agents:
            raise ValueError("Common requires a nonempty agent set")
        object.__setattr__(self, "agents", frozenset(self.agents))


def render(f: Formula) -> str:
    """Canonical text; parse(render(f)) == f."""
    if isinstance(f, Atom):
        return f"p{f.index}"
    if isinstance(f, Not):
        return "~" + render(f.operand)
    if isinstance(f, And):
        return f"({render(f.left)} & {render(f.right)})"
    if isinstance(f, Or):
        return f"({render(f.left)} | {render(f.right)})"
    if isinstance(f, Implies):
        return f"({render(f.left)} -> {render(f.right)})"
    if isinstance(f, Know):
        return f"K{f.agent} {render(f.operand)}"
    if isinstance(f, Common):
        ids = ",".join(str(a) for a in sorted(f.agents))
        return f"C{{{ids}}} {render(f.operand)}"
    raise TypeError(f"not a formula: {f!r}")


def atoms(f: Formula) -> frozenset[int]:
    """Exact set of predicate indices occurring in f."""
    if isinstance(f, Atom):
        return frozenset((f.index,))
    if isinstance(f, (Not, Know, Common)):
        return atoms(f.operand)
    if isinstance(f, (And, Or, Implies)):
        return atoms(f.left) | atoms(f.right)
    raise TypeError(f"not a formula: {f!r}")


def depth(f: Formula) -> int:
    """Nesting depth; atoms have depth 0."""
    if isinstance(f, Atom):
        return 0
    if isinstance(f, (Not, Know, Common)):
        return 1 + depth(f.operand)
    if isinstance(f, (And, Or, Implies)):
        return 1 + max(depth(f.left), depth(f.right))
    raise TypeError(f"not a formula: {f!r}")


def is_propositional(f: Formula) -> bool:
    if isinstance(f, Atom):
        return True
    if isinstance(f, (Know, Common)):
        return False
    if isinstance(f, Not):
        return is_propositional(f.operand)
    return is_propositional(f.left) and is_propositional(f.right)


def evaluate(f: Formula, lookup) -> bool:
    """Truth of a propositional formula under `lookup: index -> bool`."""
    if isinstance(f, Atom):
        return lookup(f.index)
    if isinstance(f, Not):
        return not evaluate(f.operand, lookup)
    if isinstance(f, And):
        return evaluate(f.left, lookup) and evaluate(f.right, lookup)
    if isinstance(f, Or):
        return evaluate(f.left, lookup) or evaluate(f.right, lookup)
    if isinstance(f, Implies):
        return (not evaluate(f.left, lookup)) or evaluate(f.right, lookup)
    raise ValueError(f"cannot evaluate epistemic operator without a frame: {render(f)}")


class ParseError(ValueError):
    """Malformed formula text."""

    def __init__(self, offset: int, expected: list[str], found: str):
        self.offset = offset
        self.expected = expected
        self.found = found
        super().__init__(
            f"parse error at offset {offset}: expected {' or '.join(expected)}, found {found}"
        )


_SIMPLE_TOKENS = ("->", "~", "&", "|", "(", ")", "{", "}", ",")


def _tokenize(text: str):
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if text.startswith("->", i):
            tokens.append(("->", None, i))
            i += 2
            continue
        if ch in "~&|(){},":
            tokens.append((ch, None, i))
            i += 1
            continue
        if ch in "pK":
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            if j == i + 1:
                raise ParseError(i + 1, ["digit"], repr(text[i + 1 : i + 2] or "end of input"))
            kind = "atom" if ch == "p" else "know"
            tokens.append((kind, int(text[i + 1 : j]), i))
            i = j
            continue
        if ch == "C":
            tokens.append(("common", None, i))
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("int", int(text[i:j]), i))
            i = j
            continue
        raise ParseError(i, ["formula token"], repr(ch))
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind: str):
        tok = self.tokens[self.pos]
        if tok[0] != kind:
            raise ParseError(tok[2], [kind], self._describe(tok))
        self.pos += 1
        return tok

    @staticmethod
    def _describe(tok) -> str:
        return "end of input" if tok[0] == "end" else repr(tok[0])

    def formula(self) -> Formula:
        return self.implies()

    def implies(self) -> Formula:
        left = self.disjunction()
        if self.peek()[0] == "->":
            self.take("->")
            return Implies(left, self.implies())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek()[0] == "|":
            self.take("|")
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.peek()[0] == "&":
            self.take("&")
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind, value, offset = self.peek()
        if kind == "~":
            self.take("~")
            return Not(self.unary())
        if kind == "know":
            self.take("know")
            return Know(value, self.unary())
        if kind == "common":
            self.take("common")
            self.take("{")
            ids = [self.take("int")[1]]
            while self.peek()[0] == ",":
                self.take(",")
                ids.append(self.take("int")[1])
            self.take("}")
            return Common(frozenset(ids), self.unary())
        if kind == "(":
            self.take("(")
            f = self.formula()
            self.take(")")
            return f
        if kind == "atom":
            self.take("atom")
            return Atom(value)
        raise ParseError(offset, ["~", "K<id>", "C{..}", "(", "atom"], self._describe(self.peek()))


def parse(text: str) -> Formula:
    """Parse canonical or free-form formula text."""
    parser = _Parser(_tokenize(text))
    f = parser.formula()
    parser.take("end")
    return f


@lru_cache(maxsize=256)
def _enumerate_cached(predicates: frozenset[int], max_depth: int) -> tuple[Formula, ...]:
    current: list[Formula] = [Atom(p) for p in sorted(predicates)]
    seen: set[Formula] = set(current)
    for _ in range(max_depth):
        fresh = []
        for f in current:
            g = Not(f)
            if g not in seen:
                seen.add(g)
                fresh.append(g)
        for f in current:
            for g in current:
                for combo in (And(f, g), Or(f, g), Implies(f, g)):
                    if combo not in seen:
                        seen.add(combo)
                        fresh.append(combo)
        current = current + fresh
    decorated = sorted((depth(f), len(r), r, f) for f in seen for r in (render(f),))
    return tuple(item[3] for item in decorated)


def enumerate_sentences(predicates, max_depth: int) -> list[Formula]:
    """All propositional formulas over `predicates` with nesting depth <= max_depth.

    Deterministic order: (depth, rendered length, rendered text).  The list for
    depth d is a prefix of the list for depth d+1.
    """
    preds = frozenset(predicates)
    if not preds:
        raise ValueError("predicate set must be nonempty")
    if max_depth < 0:
        raise ValueError("depth must be >= 0")
    return list(_enumerate_cached(preds, max_depth))
