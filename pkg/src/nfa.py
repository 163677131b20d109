"""
Non-deterministic finite automata as HT-coalgebras with H = 2 x (-)^Σ and
T the finite powerset monad. The generalized powerset construction is the
classical subset construction; outputs are joined in the two-element
semilattice.
"""
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Hashable, Iterable, List, Mapping, Sequence, Tuple

from src.kernel import (
    AlphabetMismatchError,
    BehaviourQuery,
    DeterminizedSystem,
    EffectInterface,
    MonadicMooreSystem,
    behaviour_at,
    behaviours_up_to,
    bisim_decide,
    disjoint_union,
    generalized_powerset,
    left,
    right,
)

logger = logging.getLogger(__name__)

State = Hashable
StateSet = Tuple[State, ...]


def state_set(states: Iterable[State]) -> StateSet:
    """Canonical form of a set of states: sorted and duplicate-free."""
    return tuple(sorted(set(states), key=lambda s: (type(s).__name__, s)))


@dataclass(frozen=True)
class Nfa:
    states: Tuple[State, ...]
    alphabet: Tuple[str, ...]
    accepting: FrozenSet[State]
    transition: Mapping[Tuple[State, str], StateSet]

    def __post_init__(self):
        object.__setattr__(self, "states", state_set(self.states))
        object.__setattr__(self, "alphabet", tuple(sorted(set(self.alphabet))))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        if not self.accepting <= set(self.states):
            raise ValueError(f"Accepting states {sorted(map(str, self.accepting - set(self.states)))} are not states")
        table = {}
        for s in self.states:
            for a in self.alphabet:
                if (s, a) not in self.transition:
                    raise ValueError(f"Transition undefined for state {s!r} on '{a}'")
                targets = state_set(self.transition[(s, a)])
                stray = set(targets) - set(self.states)
                if stray:
                    raise ValueError(f"Transition {s!r} -{a}-> leads to unknown states {sorted(map(str, stray))}")
                table[(s, a)] = targets
        extra = set(self.transition) - set(table)
        if extra:
            raise ValueError(f"Transitions on undeclared states or letters: {sorted(map(str, extra))[:5]}")
        object.__setattr__(self, "transition", table)

    @classmethod
    def from_edges(cls, states, alphabet, accepting, edges: Mapping[Tuple[State, str], Iterable[State]]):
        """Build an automaton, leaving unlisted transitions empty."""
        table = {(s, a): state_set(edges.get((s, a), ())) for s in states for a in alphabet}
        return cls(states=tuple(states), alphabet=tuple(alphabet), accepting=frozenset(accepting), transition=table)

    def step(self, current: StateSet, letter: str) -> StateSet:
        return state_set(t for s in current for t in self.transition[(s, letter)])

    def reachable(self, start: Iterable[State]) -> StateSet:
        seen = set(start)
        frontier = list(seen)
        while frontier:
            s = frontier.pop()
            for a in self.alphabet:
                for t in self.transition[(s, a)]:
                    if t not in seen:
                        seen.add(t)
                        frontier.append(t)
        return state_set(seen)


def _powerset_effect() -> EffectInterface:
    def bind(value: StateSet, k):
        return state_set(t for s in value for t in k(s))

    def evaluate(value: StateSet, out):
        return int(any(out(s) for s in value))

    return EffectInterface(name="powerset", unit=lambda s: (s,), canonical=state_set,
                           bind=bind, evaluate=evaluate)


def as_system(n: Nfa) -> MonadicMooreSystem:
    return MonadicMooreSystem(
        states=n.states,
        alphabet=n.alphabet,
        output={s: int(s in n.accepting) for s in n.states},
        transition=dict(n.transition),
        effect=_powerset_effect(),
    )


def nfa_determinize(n: Nfa) -> DeterminizedSystem:
    """Subset construction: effect values are StateSets."""
    return generalized_powerset(as_system(n))


def nfa_member(n: Nfa, start: Iterable[State], word: Sequence[str]) -> bool:
    system = nfa_determinize(n)
    return bool(behaviour_at(BehaviourQuery(system, state_set(start), tuple(word))))


def nfa_accepts(n: Nfa, start: Iterable[State], word: Sequence[str]) -> bool:
    """Plain forward simulation, kept independent of the kernel."""
    current = set(start)
    for a in word:
        if a not in n.alphabet:
            raise ValueError(f"Letter '{a}' is not in the alphabet")
        current = {t for s in current for t in n.transition[(s, a)]}
    return bool(current & n.accepting)


def nfa_language(n: Nfa, start: Iterable[State], max_len: int) -> List[Tuple[str, ...]]:
    """Accepted words of length <= max_len in length-lex order."""
    table = behaviours_up_to(nfa_determinize(n), state_set(start), max_len)
    return [w for w, accepted in table.items() if accepted]


def nfa_equiv(n1: Nfa, s1: Iterable[State], n2: Nfa, s2: Iterable[State]):
    """
    Exact language equivalence of two start sets.

    The reachable subset pairs are bounded by 2^|X1| * 2^|X2|, which is used
    as the exploration budget, so the answer is never BudgetExceeded.
    """
    if n1.alphabet != n2.alphabet:
        raise AlphabetMismatchError(f"Alphabets differ: {list(n1.alphabet)} vs {list(n2.alphabet)}")
    system = disjoint_union(nfa_determinize(n1), nfa_determinize(n2))
    budget = 2 ** len(n1.states) * 2 ** len(n2.states)
    verdict = bisim_decide(system, left(state_set(s1)), right(state_set(s2)), state_budget=budget)
    logger.info(f"NFA equivalence ({len(n1.states)} vs {len(n2.states)} states): {type(verdict).__name__}")
    return verdict


def ends_with(letter: str, alphabet: Sequence[str] = ("a", "b")) -> Nfa:
    """The two-state automaton for Σ*letter (states 0, 1; start {0})."""
    edges: Dict[Tuple[int, str], Tuple[int, ...]] = {(0, a): (0,) for a in alphabet}
    edges[(0, letter)] = (0, 1)
    return Nfa.from_edges(states=(0, 1), alphabet=alphabet, accepting={1}, edges=edges)
