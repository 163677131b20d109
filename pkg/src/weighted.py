"""
Weighted automata over a commutative semiring.

Transitions are S-linear combinations of states, so the effect is the free
S-semimodule; determinizing gives the usual linear (matrix) semantics and
weight(w) = output of the w-derivative.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Mapping, Sequence, Tuple, Union

from src.algebra import (
    Polynomial,
    PolynomialMonad,
    Semiring,
    UnboundGeneratorError,
    poly_subst,
    poly_unit,
    var,
)
from src.cfg import WeightedGrammar
from src.kernel import (
    BehaviourQuery,
    DeterminizedSystem,
    EffectInterface,
    MonadicMooreSystem,
    behaviour_at,
    behaviours_up_to,
    generalized_powerset,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WeightedAutomaton:
    semiring: Semiring
    states: Tuple[str, ...]
    alphabet: Tuple[str, ...]
    output: Mapping[str, Any] = field(default_factory=dict)
    transition: Mapping[Tuple[str, str], Polynomial] = field(default_factory=dict)

    def __post_init__(self):
        S = self.semiring
        PolynomialMonad(S)
        object.__setattr__(self, "states", tuple(sorted(set(self.states))))
        object.__setattr__(self, "alphabet", tuple(sorted(set(self.alphabet))))
        unknown = set(self.output) - set(self.states)
        if unknown:
            raise ValueError(f"Output given for undeclared states {sorted(unknown)}")
        outputs = {}
        for s in self.states:
            value = self.output.get(s, S.zero)
            if not S.contains(value):
                raise ValueError(f"Output of {s} is not an element of {S.name}")
            outputs[s] = value
        for (s, a), p in self.transition.items():
            if s not in self.states or a not in self.alphabet:
                raise ValueError(f"Transition for undeclared pair ({s}, '{a}')")
            if p.semiring.name != S.name:
                raise ValueError(f"Transition ({s}, '{a}') is over {p.semiring.name}, expected {S.name}")
            for w, _ in p.items():
                if len(w) != 1 or not w[0].is_variable:
                    raise ValueError(f"Transition ({s}, '{a}') must be a linear combination of states")
                if w[0].id not in self.states:
                    raise UnboundGeneratorError(f"Transition ({s}, '{a}') leads to unknown state {w[0].id}")
        table = {(s, a): self.transition.get((s, a), Polynomial.zero(S))
                 for s in self.states for a in self.alphabet}
        object.__setattr__(self, "output", outputs)
        object.__setattr__(self, "transition", table)

    def start(self, name: str) -> Polynomial:
        if name not in self.states:
            raise UnboundGeneratorError(f"Unknown state {name}")
        return poly_unit(var(name), self.semiring)


def _semimodule_effect(S: Semiring) -> EffectInterface:
    def bind(v: Polynomial, k) -> Polynomial:
        return poly_subst(v, {g: k(g.id) for g in v.variables()})

    def evaluate(v: Polynomial, out):
        return S.sum(S.mul(c, out(w[0].id)) for w, c in v.items())

    return EffectInterface(name=f"free {S.name}-semimodule", unit=lambda s: poly_unit(var(s), S),
                           bind=bind, evaluate=evaluate)


def as_system(A: WeightedAutomaton) -> MonadicMooreSystem:
    return MonadicMooreSystem(
        states=A.states,
        alphabet=A.alphabet,
        output=dict(A.output),
        transition=dict(A.transition),
        effect=_semimodule_effect(A.semiring),
    )


def wfa_determinize(A: WeightedAutomaton) -> DeterminizedSystem:
    return generalized_powerset(as_system(A))


def _start_vector(A: WeightedAutomaton, start: Union[str, Polynomial]) -> Polynomial:
    if isinstance(start, str):
        return A.start(start)
    for w, _ in start.items():
        if len(w) != 1 or w[0].id not in A.states:
            raise ValueError(f"Start vector must be a combination of states, got {start}")
    return start


def wfa_weight(A: WeightedAutomaton, start: Union[str, Polynomial], w: Sequence[str]):
    system = wfa_determinize(A)
    return behaviour_at(BehaviourQuery(system, _start_vector(A, start), tuple(w)))


def wfa_series_up_to(A: WeightedAutomaton, start: Union[str, Polynomial], max_len: int) -> Dict[tuple, Any]:
    table = behaviours_up_to(wfa_determinize(A), _start_vector(A, start), max_len)
    return {w: c for w, c in table.items() if not A.semiring.is_zero(c)}


def wfa_to_grammar(A: WeightedAutomaton) -> WeightedGrammar:
    """Right-linear grammar x -> output(x) + sum_a a.transition(x, a)."""
    logger.debug(f"Encoding {len(A.states)}-state automaton as a right-linear grammar")
    return WeightedGrammar(
        semiring=A.semiring,
        nonterminals=A.states,
        terminals=A.alphabet,
        output=dict(A.output),
        rule=dict(A.transition),
    )
