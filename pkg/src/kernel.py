"""
Coalgebra / determinization kernel.

A finite system with side effects x: X -> B x (TX)^Σ is determinized by the
generalized powerset construction into x#: TX -> B x (TX)^Σ. Behaviours are
evaluated lazily (output after iterated derivatives); equivalence is checked
breadth-first on pairs of effect values, either to a depth bound or until
the reachable pairs close up into a bisimulation.
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Callable, Dict, FrozenSet, Hashable, Iterator, List, Mapping, Optional, Sequence, Tuple

logger = logging.getLogger(__name__)

DEFAULT_DEPTH = 8
DEFAULT_BUDGET = 10000

Letter = Hashable
InputWord = Tuple[Letter, ...]


class UnknownLetterError(ValueError):
    """Raised when a word uses a letter outside the system's alphabet."""


class AlphabetMismatchError(ValueError):
    """Raised when systems over different alphabets are compared."""


# ============================================================
# EFFECTS AND SYSTEMS
# ============================================================

@dataclass(frozen=True)
class EffectInterface:
    """
    The side-effect monad T as far as the kernel needs it.

    Effect values must be hashable canonical forms; ``canonical`` maps a
    value to its canonical representative (identity when values are built
    canonical). ``bind`` is the Kleisli extension and ``evaluate`` the
    T-algebra structure on outputs; both are optional for effects whose
    determinization is supplied directly.
    """
    name: str
    unit: Callable[[Hashable], Hashable]
    canonical: Callable[[Any], Hashable] = field(default=lambda v: v)
    bind: Optional[Callable[[Any, Callable[[Hashable], Any]], Any]] = None
    evaluate: Optional[Callable[[Any, Callable[[Hashable], Any]], Any]] = None

    def is_equal(self, a, b) -> bool:
        return self.canonical(a) == self.canonical(b)


@dataclass(frozen=True)
class MonadicMooreSystem:
    """A finite HT-coalgebra with H = B x (-)^Σ."""
    states: Tuple[Hashable, ...]
    alphabet: Tuple[Letter, ...]
    output: Mapping[Hashable, Any]
    transition: Mapping[Tuple[Hashable, Letter], Any]
    effect: EffectInterface

    def __post_init__(self):
        missing_out = [s for s in self.states if s not in self.output]
        if missing_out:
            raise ValueError(f"Output undefined on states {missing_out}")
        missing = [(s, a) for s in self.states for a in self.alphabet
                   if (s, a) not in self.transition]
        if missing:
            raise ValueError(f"Transition undefined on {missing[:5]}")


@dataclass(frozen=True)
class DeterminizedSystem:
    """
    The determinized H^T-coalgebra on effect values.

    ``lifted_output`` and ``lifted_transition`` act on canonical effect
    values; values that are ``is_equal`` have equal behaviour.
    """
    base: MonadicMooreSystem
    lifted_output: Callable[[Any], Any]
    lifted_transition: Callable[[Any, Letter], Any]

    @property
    def alphabet(self) -> Tuple[Letter, ...]:
        return self.base.alphabet

    @property
    def effect(self) -> EffectInterface:
        return self.base.effect

    def check_word(self, word: Sequence[Letter]) -> InputWord:
        word = tuple(word)
        unknown = [a for a in word if a not in self.alphabet]
        if unknown:
            raise UnknownLetterError(
                f"Letters {sorted(set(map(str, unknown)))} are not in the alphabet {list(self.alphabet)}"
            )
        return word

    def derive(self, value, word: Sequence[Letter]):
        for a in self.check_word(word):
            value = self.lifted_transition(value, a)
        return value

    def unit_violations(self) -> List[Tuple[Hashable, Letter]]:
        """States and letters where x#(unit(s)) disagrees with x(s)."""
        effect = self.effect
        bad = []
        for s in self.base.states:
            start = effect.unit(s)
            if self.lifted_output(start) != self.base.output[s]:
                bad.append((s, None))
            for a in self.alphabet:
                if not effect.is_equal(self.lifted_transition(start, a), self.base.transition[(s, a)]):
                    bad.append((s, a))
        return bad


def generalized_powerset(base: MonadicMooreSystem) -> DeterminizedSystem:
    """
    x#(v) = (evaluate(v, o), a -> bind(v, s -> x(s)(a))).

    Requires an effect with ``bind`` and ``evaluate``.
    """
    effect = base.effect
    if effect.bind is None or effect.evaluate is None:
        raise ValueError(f"Effect '{effect.name}' does not provide bind/evaluate")

    def lifted_output(value):
        return effect.evaluate(value, lambda s: base.output[s])

    def lifted_transition(value, letter):
        return effect.canonical(effect.bind(value, lambda s: base.transition[(s, letter)]))

    logger.debug(f"Determinized {len(base.states)}-state system with effect '{effect.name}'")
    return DeterminizedSystem(base=base, lifted_output=lifted_output,
                              lifted_transition=lifted_transition)


# ============================================================
# QUERIES
# ============================================================

@dataclass(frozen=True)
class BehaviourQuery:
    system: DeterminizedSystem
    start: Any
    word: InputWord

    def __post_init__(self):
        object.__setattr__(self, "word", self.system.check_word(self.word))


@dataclass(frozen=True)
class Equal:
    """Verdict: no distinguishing word; ``relation`` is the explored relation."""
    relation: FrozenSet[Tuple[Any, Any]] = frozenset()
    depth: Optional[int] = None

    @property
    def size(self) -> int:
        return len(self.relation)


@dataclass(frozen=True)
class CounterexampleWord:
    """Verdict: the length-lex least word on which the behaviours differ."""
    word: InputWord
    left: Any = None
    right: Any = None


@dataclass(frozen=True)
class BudgetExceeded:
    explored: int


def behaviour_at(q: BehaviourQuery):
    """The output after taking the derivatives along the query word."""
    return q.system.lifted_output(q.system.derive(q.start, q.word))


def words_up_to(alphabet: Sequence[Letter], max_len: int) -> Iterator[InputWord]:
    """All words of length <= max_len in length-lex order."""
    letters = sorted(alphabet, key=str)
    for n in range(max_len + 1):
        yield from product(letters, repeat=n)


def behaviours_up_to(sys: DeterminizedSystem, start, max_len: int) -> Dict[InputWord, Any]:
    """Outputs on every word of length <= max_len, sharing prefixes."""
    letters = sorted(sys.alphabet, key=str)
    result: Dict[InputWord, Any] = {}
    level = [((), start)]
    for n in range(max_len + 1):
        nxt = []
        for w, value in level:
            result[w] = sys.lifted_output(value)
            if n < max_len:
                nxt.extend((w + (a,), sys.lifted_transition(value, a)) for a in letters)
        level = nxt
    return result


def _explore(sys: DeterminizedSystem, s1, s2, depth: Optional[int], budget: Optional[int]):
    """
    Breadth-first search over pairs of derivatives in length-lex order.

    Pairs already seen (and pairs of equal values, which the diagonal
    relates) are not expanded again; this keeps the first mismatch the
    length-lex least one.
    """
    effect = sys.effect
    canon = effect.canonical
    letters = sorted(sys.alphabet, key=str)
    start = (canon(s1), canon(s2))
    seen = {start}
    queue = deque([(start, ())])
    while queue:
        (v1, v2), w = queue.popleft()
        o1, o2 = sys.lifted_output(v1), sys.lifted_output(v2)
        if o1 != o2:
            return CounterexampleWord(word=w, left=o1, right=o2)
        if v1 == v2:
            continue
        if depth is not None and len(w) >= depth:
            continue
        for a in letters:
            pair = (canon(sys.lifted_transition(v1, a)), canon(sys.lifted_transition(v2, a)))
            if pair in seen:
                continue
            seen.add(pair)
            if budget is not None and len(seen) > budget:
                logger.warning(f"Budget of {budget} pairs exhausted")
                return BudgetExceeded(explored=len(seen) - 1)
            queue.append((pair, w + (a,)))
    return Equal(relation=frozenset(seen), depth=depth)


def equiv_bounded(sys: DeterminizedSystem, s1, s2, depth: int = DEFAULT_DEPTH):
    """Equal if no word of length <= depth distinguishes s1 and s2."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    verdict = _explore(sys, s1, s2, depth=depth, budget=None)
    logger.info(f"Bounded equivalence to depth {depth}: {type(verdict).__name__}")
    return verdict


def bisim_decide(sys: DeterminizedSystem, s1, s2, state_budget: int = DEFAULT_BUDGET):
    """
    Exact check by closing the reachable pairs.

    Returns Equal with the bisimulation (up to equality) when the closure
    completes within ``state_budget`` pairs, the least distinguishing word on
    an output mismatch, and BudgetExceeded otherwise.
    """
    if state_budget < 1:
        raise ValueError("state_budget must be >= 1")
    verdict = _explore(sys, s1, s2, depth=None, budget=state_budget)
    if isinstance(verdict, Equal):
        logger.info(f"Bisimulation closed with {verdict.size} pairs")
    return verdict


def is_bisimulation(sys: DeterminizedSystem, relation) -> bool:
    """
    Every related pair has equal outputs and its derivatives are related
    again or equal (a bisimulation up to equality).
    """
    canon = sys.effect.canonical
    pairs = {(canon(v1), canon(v2)) for v1, v2 in relation}
    for v1, v2 in pairs:
        if sys.lifted_output(v1) != sys.lifted_output(v2):
            return False
        if v1 == v2:
            continue
        for a in sys.alphabet:
            d1, d2 = canon(sys.lifted_transition(v1, a)), canon(sys.lifted_transition(v2, a))
            if d1 != d2 and (d1, d2) not in pairs:
                return False
    return True


# ============================================================
# DISJOINT UNION
# ============================================================

def _tagged_effect(left: EffectInterface, right: EffectInterface) -> EffectInterface:
    def canonical(value):
        tag, inner = value
        return (tag, (left if tag == 0 else right).canonical(inner))

    return EffectInterface(
        name=f"{left.name}+{right.name}",
        unit=lambda s: (s[0], (left if s[0] == 0 else right).unit(s[1])),
        canonical=canonical,
    )


def disjoint_union(sys1: DeterminizedSystem, sys2: DeterminizedSystem) -> DeterminizedSystem:
    """Run two systems side by side; values are tagged (0, v) or (1, v)."""
    if set(sys1.alphabet) != set(sys2.alphabet):
        raise AlphabetMismatchError(
            f"Alphabets differ: {sorted(map(str, sys1.alphabet))} vs {sorted(map(str, sys2.alphabet))}"
        )
    parts = (sys1, sys2)
    states = tuple((0, s) for s in sys1.base.states) + tuple((1, s) for s in sys2.base.states)
    base = MonadicMooreSystem(
        states=states,
        alphabet=sys1.alphabet,
        output={(i, s): parts[i].base.output[s] for i, s in states},
        transition={((i, s), a): (i, parts[i].base.transition[(s, a)])
                    for i, s in states for a in sys1.alphabet},
        effect=_tagged_effect(sys1.effect, sys2.effect),
    )
    return DeterminizedSystem(
        base=base,
        lifted_output=lambda v: parts[v[0]].lifted_output(v[1]),
        lifted_transition=lambda v, a: (v[0], parts[v[0]].lifted_transition(v[1], a)),
    )


def left(value) -> Tuple[int, Any]:
    return (0, value)


def right(value) -> Tuple[int, Any]:
    return (1, value)
