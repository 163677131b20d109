"""
Stack machines over the stack monad.

An element of the stack monad is a pair (r, t) of a successor state and a
stack rewrite that only looks at the topmost k cells: r(wu) = r(w) and
t(wu) = t(w)u whenever |w| = k. Stacks are tuples with the top on the left.
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, List, Mapping, Sequence, Tuple, Union

from src.kernel import (
    BehaviourQuery,
    DeterminizedSystem,
    EffectInterface,
    MonadicMooreSystem,
    behaviour_at,
    generalized_powerset,
)

logger = logging.getLogger(__name__)

DEFAULT_PROBE_LENGTH = 16

State = Hashable
Stack = Tuple[str, ...]


class StackTableError(ValueError):
    """Raised for incomplete or inconsistent stack tables."""


def stack_words(alphabet: Sequence[str], length: int) -> Iterable[Stack]:
    return product(sorted(alphabet), repeat=length)


def stacks_up_to(alphabet: Sequence[str], max_len: int) -> List[Stack]:
    return [s for n in range(max_len + 1) for s in stack_words(alphabet, n)]


@dataclass(frozen=True, order=True)
class Configuration:
    state: State
    stack: Stack = ()

    def __str__(self):
        return f"({self.state}, {''.join(self.stack) or 'ε'})"


# ============================================================
# STACK ACTIONS
# ============================================================

@dataclass(frozen=True)
class StackAction:
    """
    A bounded-lookahead stack transformer.

    ``at_short`` covers the stacks shorter than ``lookahead``; ``at_k`` maps
    each stack word of length exactly ``lookahead`` to the successor state
    and the word replacing it. Build with ``StackAction.build`` or
    ``from_function`` to get the normalized (least lookahead) table.
    """
    stack_alphabet: Tuple[str, ...]
    lookahead: int
    at_short: Tuple[Tuple[Stack, Tuple[State, Stack]], ...]
    at_k: Tuple[Tuple[Stack, Tuple[State, Stack]], ...]
    _table: Dict[Stack, Tuple[State, Stack]] = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "at_short", tuple(sorted(self.at_short)))
        object.__setattr__(self, "at_k", tuple(sorted(self.at_k)))
        table = dict(self.at_short)
        table.update(self.at_k)
        gamma = self.stack_alphabet
        expected = set(stacks_up_to(gamma, self.lookahead))
        if set(table) != expected:
            missing = sorted(expected - set(table))
            extra = sorted(set(table) - expected)
            raise StackTableError(f"Action table incomplete: missing {missing[:5]}, unexpected {extra[:5]}")
        for _, (_, replacement) in table.items():
            stray = set(replacement) - set(gamma)
            if stray:
                raise StackTableError(f"Replacement uses unknown stack symbols {sorted(stray)}")
        object.__setattr__(self, "_table", table)

    @classmethod
    def build(cls, stack_alphabet: Iterable[str], lookahead: int,
              table: Mapping[Stack, Tuple[State, Stack]]) -> "StackAction":
        gamma = tuple(sorted(set(stack_alphabet)))
        entries = {tuple(w): (q, tuple(r)) for w, (q, r) in table.items()}
        short = tuple(sorted((w, v) for w, v in entries.items() if len(w) < lookahead))
        full = tuple(sorted((w, v) for w, v in entries.items() if len(w) == lookahead))
        return cls(gamma, lookahead, short, full).normalize()

    @classmethod
    def from_function(cls, stack_alphabet: Iterable[str], lookahead: int,
                      f: Callable[[Stack], Configuration]) -> "StackAction":
        """Tabulate f on all stacks of length <= lookahead (f must be uniform beyond)."""
        gamma = tuple(sorted(set(stack_alphabet)))
        table = {}
        for s in stacks_up_to(gamma, lookahead):
            c = f(s)
            table[s] = (c.state, tuple(c.stack))
        return cls.build(gamma, lookahead, table)

    @classmethod
    def unit(cls, stack_alphabet: Iterable[str], state: State) -> "StackAction":
        """The identity on stacks, moving to ``state``."""
        return cls.build(stack_alphabet, 0, {(): (state, ())})

    @classmethod
    def constant(cls, stack_alphabet: Iterable[str], state: State, push: Sequence[str] = ()) -> "StackAction":
        """Lookahead 0: go to ``state`` and push ``push`` on any stack."""
        return cls.build(stack_alphabet, 0, {(): (state, tuple(push))})

    @property
    def targets(self) -> FrozenSet[State]:
        return frozenset(q for q, _ in self._table.values())

    def apply(self, stack: Sequence[str]) -> Configuration:
        return action_apply(self, stack)

    def normalize(self) -> "StackAction":
        """The same transformer with the least consistent lookahead."""
        k = self.lookahead
        for candidate in range(k):
            if self._uniform_from(candidate):
                short = tuple((w, self._evaluate(w)) for w in stacks_up_to(self.stack_alphabet, candidate - 1)) \
                    if candidate > 0 else ()
                full = tuple((w, self._evaluate(w)) for w in stack_words(self.stack_alphabet, candidate))
                return StackAction(self.stack_alphabet, candidate, short, full)
        return self

    def _evaluate(self, s: Stack) -> Tuple[State, Stack]:
        c = action_apply(self, s)
        return (c.state, c.stack)

    def _uniform_from(self, candidate: int) -> bool:
        for n in range(candidate, self.lookahead + 1):
            for s in stack_words(self.stack_alphabet, n):
                q, top = self._evaluate(s[:candidate])
                if self._evaluate(s) != (q, top + s[candidate:]):
                    return False
        return True


def action_apply(act: StackAction, stack: Sequence[str]) -> Configuration:
    stack = tuple(stack)
    k = act.lookahead
    if len(stack) < k:
        state, replacement = act._table[stack]
        return Configuration(state, replacement)
    state, replacement = act._table[stack[:k]]
    return Configuration(state, replacement + stack[k:])


def stack_compose(f: StackAction, g: Union[Mapping[State, StackAction], Callable[[State], StackAction]]) -> StackAction:
    """Kleisli composition: run f, then the action g picks for f's successor."""
    pick = g if callable(g) else g.__getitem__
    followers = {q: pick(q) for q in sorted(f.targets, key=str)}
    for q, h in followers.items():
        if h.stack_alphabet != f.stack_alphabet:
            raise StackTableError(f"Action for {q!r} uses a different stack alphabet")
    k = f.lookahead + max((h.lookahead for h in followers.values()), default=0)

    def composite(s: Stack) -> Configuration:
        c = action_apply(f, s)
        return action_apply(followers[c.state], c.stack)

    return StackAction.from_function(f.stack_alphabet, k, composite)


# ============================================================
# STACK PREDICATES
# ============================================================

@dataclass(frozen=True)
class StackPredicate:
    """A predicate on stacks that only looks at the topmost ``lookahead`` cells."""
    stack_alphabet: Tuple[str, ...]
    lookahead: int
    accept_short: FrozenSet[Stack] = frozenset()
    accept_k: FrozenSet[Stack] = frozenset()

    def __post_init__(self):
        for w in self.accept_short:
            if len(w) >= self.lookahead:
                raise StackTableError(f"Short entry {w} is not shorter than the lookahead {self.lookahead}")
        for w in self.accept_k:
            if len(w) != self.lookahead:
                raise StackTableError(f"Entry {w} does not have length {self.lookahead}")
        stray = {g for w in self.accept_short | self.accept_k for g in w} - set(self.stack_alphabet)
        if stray:
            raise StackTableError(f"Predicate uses unknown stack symbols {sorted(stray)}")

    def evaluate(self, stack: Sequence[str]) -> bool:
        stack = tuple(stack)
        if len(stack) < self.lookahead:
            return stack in self.accept_short
        return stack[:self.lookahead] in self.accept_k

    def __call__(self, stack: Sequence[str]) -> bool:
        return self.evaluate(stack)

    @classmethod
    def from_function(cls, stack_alphabet: Iterable[str], lookahead: int,
                      f: Callable[[Stack], bool]) -> "StackPredicate":
        gamma = tuple(sorted(set(stack_alphabet)))
        short = frozenset(s for n in range(lookahead) for s in stack_words(gamma, n) if f(s))
        full = frozenset(s for s in stack_words(gamma, lookahead) if f(s))
        return cls(gamma, lookahead, short, full).normalize()

    @classmethod
    def top_is(cls, stack_alphabet: Iterable[str], symbol: str) -> "StackPredicate":
        return cls.from_function(stack_alphabet, 1, lambda s: s[:1] == (symbol,))

    @classmethod
    def empty(cls, stack_alphabet: Iterable[str]) -> "StackPredicate":
        return cls.from_function(stack_alphabet, 1, lambda s: not s)

    @classmethod
    def always(cls, stack_alphabet: Iterable[str]) -> "StackPredicate":
        return cls.from_function(stack_alphabet, 0, lambda s: True)

    @classmethod
    def never(cls, stack_alphabet: Iterable[str]) -> "StackPredicate":
        return cls.from_function(stack_alphabet, 0, lambda s: False)

    def normalize(self) -> "StackPredicate":
        gamma = self.stack_alphabet
        for candidate in range(self.lookahead):
            if all(self.evaluate(s) == self.evaluate(s[:candidate])
                   for n in range(candidate, self.lookahead + 1) for s in stack_words(gamma, n)):
                short = frozenset(s for n in range(candidate) for s in stack_words(gamma, n) if self.evaluate(s))
                full = frozenset(s for s in stack_words(gamma, candidate) if self.evaluate(s))
                return StackPredicate(gamma, candidate, short, full)
        return self


def predicate_after(act: StackAction, outputs: Callable[[State], StackPredicate]) -> StackPredicate:
    """The predicate s -> outputs(r(s))(t(s)): the output algebra of the stack monad."""
    preds = {q: outputs(q) for q in act.targets}
    k = act.lookahead + max((p.lookahead for p in preds.values()), default=0)

    def holds(s: Stack) -> bool:
        c = action_apply(act, s)
        return preds[c.state].evaluate(c.stack)

    return StackPredicate.from_function(act.stack_alphabet, k, holds)


# ============================================================
# MACHINES
# ============================================================

@dataclass(frozen=True)
class Clause:
    """If the stack starts with ``pattern``, go to ``target`` and replace the pattern."""
    pattern: Stack
    target: State
    replacement: Stack = ()

    def applies(self, stack: Stack) -> bool:
        return stack[:len(self.pattern)] == self.pattern

    def fire(self, stack: Stack) -> Configuration:
        return Configuration(self.target, self.replacement + stack[len(self.pattern):])


@dataclass(frozen=True)
class StackMachine:
    """A deterministic, real-time stack machine: one action per state and letter."""
    states: Tuple[State, ...]
    alphabet: Tuple[str, ...]
    stack_alphabet: Tuple[str, ...]
    output: Mapping[State, StackPredicate]
    transition: Mapping[Tuple[State, str], StackAction]

    deterministic = True

    def __post_init__(self):
        _check_common(self)
        table = {}
        for q in self.states:
            for a in self.alphabet:
                if (q, a) not in self.transition:
                    raise StackTableError(f"No action for state {q!r} on '{a}'")
                act = self.transition[(q, a)]
                if act.stack_alphabet != self.stack_alphabet:
                    raise StackTableError(f"Action ({q!r}, '{a}') uses a different stack alphabet")
                stray = act.targets - set(self.states)
                if stray:
                    raise StackTableError(f"Action ({q!r}, '{a}') leads to unknown states {sorted(map(str, stray))}")
                table[(q, a)] = act.normalize()
        object.__setattr__(self, "transition", table)


@dataclass(frozen=True)
class NondeterministicStackMachine:
    """A real-time stack machine whose steps are lists of clauses."""
    states: Tuple[State, ...]
    alphabet: Tuple[str, ...]
    stack_alphabet: Tuple[str, ...]
    output: Mapping[State, StackPredicate]
    clauses: Mapping[Tuple[State, str], Tuple[Clause, ...]] = field(default_factory=dict)

    deterministic = False

    def __post_init__(self):
        _check_common(self)
        table = {}
        for (q, a), cs in self.clauses.items():
            if q not in self.states or a not in self.alphabet:
                raise StackTableError(f"Clauses for undeclared pair ({q!r}, '{a}')")
            for c in cs:
                if c.target not in self.states:
                    raise StackTableError(f"Clause leads to unknown state {c.target!r}")
                stray = (set(c.pattern) | set(c.replacement)) - set(self.stack_alphabet)
                if stray:
                    raise StackTableError(f"Clause uses unknown stack symbols {sorted(stray)}")
        for q in self.states:
            for a in self.alphabet:
                table[(q, a)] = tuple(self.clauses.get((q, a), ()))
        object.__setattr__(self, "clauses", table)


def _check_common(m):
    object.__setattr__(m, "stack_alphabet", tuple(sorted(set(m.stack_alphabet))))
    object.__setattr__(m, "alphabet", tuple(sorted(set(m.alphabet))))
    missing = [q for q in m.states if q not in m.output]
    if missing:
        raise StackTableError(f"No output predicate for states {missing}")
    for q, p in m.output.items():
        if p.stack_alphabet != m.stack_alphabet:
            raise StackTableError(f"Output predicate of {q!r} uses a different stack alphabet")
    object.__setattr__(m, "output", {q: m.output[q].normalize() for q in m.states})


Machine = Union[StackMachine, NondeterministicStackMachine]


@dataclass(frozen=True)
class RunResult:
    accepted: bool
    configurations: FrozenSet[Configuration]


def _check_word(m: Machine, word: Sequence[str]) -> Tuple[str, ...]:
    word = tuple(word)
    unknown = set(word) - set(m.alphabet)
    if unknown:
        raise ValueError(f"Letters {sorted(unknown)} are not in the alphabet {list(m.alphabet)}")
    return word


def _step(m: Machine, configs: FrozenSet[Configuration], letter: str) -> FrozenSet[Configuration]:
    if m.deterministic:
        return frozenset(action_apply(m.transition[(c.state, letter)], c.stack) for c in configs)
    return frozenset(
        clause.fire(c.stack)
        for c in configs
        for clause in m.clauses[(c.state, letter)]
        if clause.applies(c.stack)
    )


def _accepts(m: Machine, configs: Iterable[Configuration]) -> bool:
    return any(m.output[c.state].evaluate(c.stack) for c in configs)


def run(m: Machine, start: Configuration, word: Sequence[str]) -> RunResult:
    """
    Consume one letter per step. A nondeterministic branch with no
    applicable clause is dropped.
    """
    configs = frozenset([start])
    for a in _check_word(m, word):
        configs = _step(m, configs, a)
    return RunResult(accepted=_accepts(m, configs), configurations=configs)


def language_probe(m: Machine, start: Configuration, max_len: int = DEFAULT_PROBE_LENGTH) -> List[Tuple[str, ...]]:
    """Accepted words of length <= max_len, length-lex ordered."""
    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    letters = sorted(m.alphabet)
    accepted = []
    level = deque([((), frozenset([start]))])
    for n in range(max_len + 1):
        nxt = deque()
        for w, configs in level:
            if _accepts(m, configs):
                accepted.append(w)
            if n < max_len:
                for a in letters:
                    follow = _step(m, configs, a)
                    if follow:
                        nxt.append((w + (a,), follow))
        level = nxt
    logger.info(f"Language probe to length {max_len}: {len(accepted)} accepted words")
    return accepted


# ============================================================
# KERNEL VIEW
# ============================================================

def _stack_effect(gamma: Tuple[str, ...]) -> EffectInterface:
    return EffectInterface(
        name="stack",
        unit=lambda q: StackAction.unit(gamma, q),
        canonical=lambda act: act.normalize(),
        bind=stack_compose,
        evaluate=predicate_after,
    )


def as_system(m: StackMachine) -> MonadicMooreSystem:
    if not m.deterministic:
        raise ValueError("Only deterministic stack machines are determinized over the stack monad")
    return MonadicMooreSystem(
        states=tuple(m.states),
        alphabet=m.alphabet,
        output=dict(m.output),
        transition=dict(m.transition),
        effect=_stack_effect(m.stack_alphabet),
    )


def stack_determinize(m: StackMachine) -> DeterminizedSystem:
    """Effect values are StackActions over the machine's states."""
    return generalized_powerset(as_system(m))


def stack_behaviour(m: StackMachine, state: State, word: Sequence[str]) -> StackPredicate:
    """The predicate f(w) of the behaviour of ``state``."""
    system = stack_determinize(m)
    return behaviour_at(BehaviourQuery(system, StackAction.unit(m.stack_alphabet, state), tuple(word)))
