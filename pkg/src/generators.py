"""
Seeded random instances for property tests and the acceptance runner.

Every generator takes ``random_state`` (an int seed or a numpy Generator)
and draws from ``numpy.random.default_rng``.
"""
import logging
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from src.algebra import Polynomial, Semiring, term, var
from src.cfg import LiftedPair, WeightedGrammar
from src.nfa import Nfa
from src.rps import App, Scheme, Signature, Tree, Var
from src.stack import Configuration, StackAction, StackMachine, StackPredicate, stacks_up_to
from src.weighted import WeightedAutomaton

logger = logging.getLogger(__name__)

RandomState = Union[int, np.random.Generator, None]

RANDOM_STATE = 42


def make_rng(random_state: RandomState = RANDOM_STATE) -> np.random.Generator:
    if isinstance(random_state, np.random.Generator):
        return random_state
    return np.random.default_rng(random_state)


def random_word(alphabet: Sequence[str], max_len: int, random_state: RandomState = RANDOM_STATE) -> Tuple[str, ...]:
    rng = make_rng(random_state)
    n = int(rng.integers(0, max_len + 1))
    return tuple(str(a) for a in rng.choice(list(alphabet), size=n))


def random_nfa(max_states: int = 5, alphabet: Sequence[str] = ("a", "b"), edge_prob: float = 0.3,
               accept_prob: float = 0.4, random_state: RandomState = RANDOM_STATE) -> Nfa:
    """States 0..n-1 with 1 <= n <= max_states; start from {0} by convention."""
    rng = make_rng(random_state)
    n = int(rng.integers(1, max_states + 1))
    states = tuple(range(n))
    accepting = {s for s in states if rng.random() < accept_prob}
    edges = {(s, a): [t for t in states if rng.random() < edge_prob] for s in states for a in alphabet}
    return Nfa.from_edges(states=states, alphabet=tuple(alphabet), accepting=accepting, edges=edges)


def random_element(S: Semiring, max_coeff: int = 2, random_state: RandomState = RANDOM_STATE):
    rng = make_rng(random_state)
    upper = 1 if S.name == "B" else max_coeff
    lower = -max_coeff if S.name == "Z" else 0
    return int(rng.integers(lower, upper + 1))


def random_polynomial(S: Semiring, variables: Sequence[str], terminals: Sequence[str] = (),
                      max_terms: int = 3, max_len: int = 3, max_coeff: int = 2,
                      random_state: RandomState = RANDOM_STATE) -> Polynomial:
    rng = make_rng(random_state)
    generators = [var(x) for x in variables] + [term(a) for a in terminals]
    terms = []
    for _ in range(int(rng.integers(0, max_terms + 1))):
        length = int(rng.integers(0, max_len + 1)) if generators else 0
        w = tuple(generators[i] for i in rng.integers(0, len(generators), size=length)) if length else ()
        terms.append((w, random_element(S, max_coeff, rng)))
    return Polynomial(S, terms)


def random_lifted_pair(S: Semiring, alphabet: Sequence[str], variables: Sequence[str],
                       random_state: RandomState = RANDOM_STATE, **poly_kwargs) -> LiftedPair:
    rng = make_rng(random_state)
    deriv = {a: random_polynomial(S, variables, alphabet, random_state=rng, **poly_kwargs) for a in alphabet}
    return LiftedPair.of(S, random_element(S, random_state=rng), deriv, alphabet)


def random_grammar(S: Semiring, max_nonterminals: int = 3, terminals: Sequence[str] = ("a", "b"),
                   max_terms: int = 3, max_len: int = 3, max_coeff: int = 2,
                   random_state: RandomState = RANDOM_STATE) -> WeightedGrammar:
    """Nonterminals X0..Xn-1; rule polynomials mix nonterminals and terminals."""
    rng = make_rng(random_state)
    n = int(rng.integers(1, max_nonterminals + 1))
    nonterminals = tuple(f"X{i}" for i in range(n))
    output = {x: random_element(S, max_coeff, rng) for x in nonterminals}
    rule = {
        (x, a): random_polynomial(S, nonterminals, terminals, max_terms, max_len, max_coeff, rng)
        for x in nonterminals for a in terminals
    }
    return WeightedGrammar(semiring=S, nonterminals=nonterminals, terminals=tuple(terminals),
                           output=output, rule=rule)



def random_rules_only_grammar(S: Semiring, max_nonterminals: int = 3, terminals: Sequence[str] = ("a", "b"),
                              max_terms: int = 2, max_len: int = 2, max_coeff: int = 2,
                              random_state: RandomState = RANDOM_STATE) -> WeightedGrammar:
    """Like random_grammar, but rule bodies are polynomials over the nonterminals only."""
    rng = make_rng(random_state)
    n = int(rng.integers(1, max_nonterminals + 1))
    nonterminals = tuple(f"X{i}" for i in range(n))
    output = {x: random_element(S, max_coeff, rng) for x in nonterminals}
    rule = {
        (x, a): random_polynomial(S, nonterminals, (), max_terms, max_len, max_coeff, rng)
        for x in nonterminals for a in terminals
    }
    return WeightedGrammar(semiring=S, nonterminals=nonterminals, terminals=tuple(terminals),
                           output=output, rule=rule)


def random_wfa(S: Semiring, max_states: int = 3, alphabet: Sequence[str] = ("a", "b"), edge_prob: float = 0.5,
               max_coeff: int = 2, random_state: RandomState = RANDOM_STATE) -> WeightedAutomaton:
    """States s0..sn-1 with random output weights and weighted edges."""
    rng = make_rng(random_state)
    n = int(rng.integers(1, max_states + 1))
    states = tuple(f"s{i}" for i in range(n))
    output = {s: random_element(S, max_coeff, rng) for s in states}
    transition = {
        (s, a): Polynomial(S, [((var(t),), random_element(S, max_coeff, rng))
                               for t in states if rng.random() < edge_prob])
        for s in states for a in alphabet
    }
    return WeightedAutomaton(semiring=S, states=states, alphabet=tuple(alphabet),
                             output=output, transition=transition)


def random_stack_action(stack_alphabet: Sequence[str], states: Sequence, max_lookahead: int = 2,
                        max_push: int = 2, random_state: RandomState = RANDOM_STATE) -> StackAction:
    """A random table on all stacks of length <= k, normalized."""
    rng = make_rng(random_state)
    gamma = sorted(stack_alphabet)
    k = int(rng.integers(0, max_lookahead + 1))
    table = {}
    for w in stacks_up_to(gamma, k):
        state = states[int(rng.integers(0, len(states)))]
        size = int(rng.integers(0, max_push + 1))
        replacement = tuple(gamma[i] for i in rng.integers(0, len(gamma), size=size)) if size else ()
        table[w] = (state, replacement)
    return StackAction.build(gamma, k, table)


def random_stack_machine(stack_alphabet: Sequence[str] = ("A", "B"), states: Sequence[str] = ("p", "q"),
                         alphabet: Sequence[str] = ("a", "b"), max_lookahead: int = 1, max_push: int = 2,
                         random_state: RandomState = RANDOM_STATE) -> StackMachine:
    """A deterministic machine whose outputs test the top of the stack."""
    rng = make_rng(random_state)
    gamma = tuple(sorted(stack_alphabet))
    output = {}
    for q in states:
        tops = {w for w in stacks_up_to(gamma, 1) if rng.random() < 0.5}
        output[q] = StackPredicate.from_function(gamma, 1, lambda s, tops=tops: s[:1] in tops)
    transition = {
        (q, a): random_stack_action(gamma, states, max_lookahead, max_push, rng)
        for q in states for a in alphabet
    }
    return StackMachine(states=tuple(states), alphabet=tuple(alphabet), stack_alphabet=gamma,
                        output=output, transition=transition)


def random_configuration(stack_alphabet: Sequence[str], states: Sequence, max_height: int = 4,
                         random_state: RandomState = RANDOM_STATE) -> Configuration:
    rng = make_rng(random_state)
    gamma = sorted(stack_alphabet)
    height = int(rng.integers(0, max_height + 1))
    stack = tuple(gamma[i] for i in rng.integers(0, len(gamma), size=height)) if height else ()
    return Configuration(states[int(rng.integers(0, len(states)))], stack)


DEFAULT_GIVENS = Signature({"a": 1, "b": 2, "c": 0})


def _random_term(rng: np.random.Generator, symbols, params: Sequence[str], depth: int) -> Tree:
    leaves = [Var(p) for p in params] + [App(s) for s, n in symbols if n == 0]
    if depth <= 0 or rng.random() < 0.3:
        return leaves[int(rng.integers(0, len(leaves)))]
    s, n = symbols[int(rng.integers(0, len(symbols)))]
    return App(s, tuple(_random_term(rng, symbols, params, depth - 1) for _ in range(n)))


def random_scheme(givens: Optional[Signature] = None, max_defined: int = 2, max_depth: int = 3,
                  random_state: RandomState = RANDOM_STATE) -> Scheme:
    """
    Guarded schemes phi0(z), phi1(z), ... whose bodies start with a given
    symbol of positive arity.
    """
    rng = make_rng(random_state)
    givens = givens or DEFAULT_GIVENS
    n = int(rng.integers(1, max_defined + 1))
    defined = [f"phi{i}" for i in range(n)]
    symbols = sorted(givens.symbols.items()) + [(d, 1) for d in defined]
    roots = [(s, k) for s, k in sorted(givens.symbols.items()) if k > 0]
    bodies = {}
    for d in defined:
        s, k = roots[int(rng.integers(0, len(roots)))]
        bodies[d] = App(s, tuple(_random_term(rng, symbols, ("z",), max_depth - 1) for _ in range(k)))
    return Scheme(givens=givens, params={d: ("z",) for d in defined}, body=bodies)
