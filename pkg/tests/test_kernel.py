"""Generalized powerset construction, behaviour queries and equivalence search."""
import pytest

from src.kernel import (
    AlphabetMismatchError,
    BehaviourQuery,
    BudgetExceeded,
    CounterexampleWord,
    EffectInterface,
    Equal,
    MonadicMooreSystem,
    UnknownLetterError,
    behaviour_at,
    behaviours_up_to,
    bisim_decide,
    disjoint_union,
    equiv_bounded,
    generalized_powerset,
    is_bisimulation,
    left,
    right,
    words_up_to,
)
from src.algebra import BOOLEAN, NATURAL
from src.cfg import fuse, grammar_determinize, pointed_step
from src.generators import (
    random_grammar,
    random_nfa,
    random_polynomial,
    random_stack_machine,
    random_wfa,
    random_word,
)
from src.nfa import Nfa, ends_with, nfa_determinize
from src.stack import StackAction, stack_determinize
from src.weighted import wfa_determinize


def union_of(n1, n2):
    return disjoint_union(nfa_determinize(n1), nfa_determinize(n2))


def test_words_up_to_is_length_lex():
    assert list(words_up_to(("b", "a"), 2)) == [
        (), ("a",), ("b",),
        ("a", "a"), ("a", "b"), ("b", "a"), ("b", "b"),
    ]


def test_behaviours_up_to_matches_single_queries():
    system = nfa_determinize(ends_with("a"))
    table = behaviours_up_to(system, (0,), 3)
    assert len(table) == 1 + 2 + 4 + 8
    for w, value in table.items():
        assert value == behaviour_at(BehaviourQuery(system, (0,), w))


def test_query_rejects_unknown_letters():
    system = nfa_determinize(ends_with("a"))
    with pytest.raises(UnknownLetterError):
        BehaviourQuery(system, (0,), ("c",))


def test_equivalent_start_values():
    dfa = Nfa.from_edges(states=("p", "q"), alphabet=("a", "b"), accepting={"q"},
                         edges={("p", "a"): ["q"], ("p", "b"): ["p"], ("q", "a"): ["q"], ("q", "b"): ["p"]})
    system = union_of(ends_with("a"), dfa)
    verdict = bisim_decide(system, left((0,)), right(("p",)))
    assert isinstance(verdict, Equal)
    assert is_bisimulation(system, verdict.relation)
    assert isinstance(equiv_bounded(system, left((0,)), right(("p",)), depth=5), Equal)


def test_counterexample_is_the_least_word():
    system = union_of(ends_with("a"), ends_with("b"))
    verdict = bisim_decide(system, left((0,)), right((0,)))
    assert verdict == CounterexampleWord(word=("a",), left=1, right=0)


def test_bounded_search_stops_at_depth():
    """ε separates nothing, so at depth 0 the two start sets look equal."""
    system = union_of(ends_with("a"), ends_with("b"))
    assert equiv_bounded(system, left((0,)), right((0,)), depth=0) == Equal(
        relation=frozenset({(left((0,)), right((0,)))}), depth=0)
    assert isinstance(equiv_bounded(system, left((0,)), right((0,)), depth=1), CounterexampleWord)
    with pytest.raises(ValueError):
        equiv_bounded(system, left((0,)), right((0,)), depth=-1)


def test_budget_exceeded():
    dfa = Nfa.from_edges(states=("p", "q"), alphabet=("a", "b"), accepting={"q"},
                         edges={("p", "a"): ["q"], ("p", "b"): ["p"], ("q", "a"): ["q"], ("q", "b"): ["p"]})
    system = union_of(ends_with("a"), dfa)
    assert bisim_decide(system, left((0,)), right(("p",)), state_budget=1) == BudgetExceeded(explored=1)
    with pytest.raises(ValueError):
        bisim_decide(system, left((0,)), right(("p",)), state_budget=0)


def test_is_bisimulation_rejects_unclosed_relations():
    system = union_of(ends_with("a"), ends_with("a"))
    # outputs agree at the start, but the a-derivatives are not related
    assert not is_bisimulation(system, {(left((0,)), right(()))})
    assert not is_bisimulation(system, {(left((0,)), right((0,)))})
    verdict = bisim_decide(system, left((0,)), right((0,)))
    assert is_bisimulation(system, verdict.relation)


def test_union_needs_one_alphabet():
    with pytest.raises(AlphabetMismatchError):
        union_of(ends_with("a", ("a", "b")), ends_with("a", ("a", "c")))


def test_generalized_powerset_needs_bind_and_evaluate():
    effect = EffectInterface(name="bare", unit=lambda s: s)
    base = MonadicMooreSystem(states=("s",), alphabet=("a",), output={"s": 0},
                              transition={("s", "a"): "s"}, effect=effect)
    with pytest.raises(ValueError, match="bind/evaluate"):
        generalized_powerset(base)


def test_incomplete_systems_are_rejected():
    effect = EffectInterface(name="bare", unit=lambda s: s)
    with pytest.raises(ValueError, match="Transition undefined"):
        MonadicMooreSystem(states=("s",), alphabet=("a",), output={"s": 0}, transition={}, effect=effect)


def test_determinizations_extend_the_system(dyck, counting, anbn, count_a):
    """x#(unit(s)) agrees with x(s) for every kind of side effect."""
    systems = [
        nfa_determinize(ends_with("a")),
        grammar_determinize(dyck),
        grammar_determinize(counting, "powerset"),
        stack_determinize(anbn),
        wfa_determinize(count_a),
    ]
    for system in systems:
        assert system.unit_violations() == []


def start_pair(kind, seed):
    """A determinized system and two start values whose effect depends on ``kind``."""
    if kind == "powerset":
        return (union_of(random_nfa(max_states=3, random_state=seed), random_nfa(max_states=3, random_state=seed + 100)),
                left((0,)), right((0,)))
    if kind == "same-nfa":
        n = random_nfa(max_states=3, random_state=seed)
        return union_of(n, n), left((0,)), right((0,))
    if kind in ("polynomial", "fused"):
        G = random_grammar(NATURAL, max_nonterminals=2, max_terms=2, max_len=2, random_state=seed)
        v = random_polynomial(NATURAL, G.nonterminals, G.terminals, max_terms=2, max_len=2, random_state=seed + 10)
        if kind == "fused":
            return grammar_determinize(G), v, fuse(pointed_step(G, v), G)
        w = random_polynomial(NATURAL, G.nonterminals, G.terminals, max_terms=2, max_len=2, random_state=seed + 20)
        return grammar_determinize(G), v, w
    if kind in ("semimodule", "boolean-semimodule"):
        A = random_wfa(BOOLEAN if kind == "boolean-semimodule" else NATURAL, random_state=seed)
        return wfa_determinize(A), A.start(A.states[0]), A.start(A.states[-1])
    m = random_stack_machine(random_state=seed)
    return (stack_determinize(m), StackAction.unit(m.stack_alphabet, "p"),
            StackAction.unit(m.stack_alphabet, "q"))


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("kind, depth", [
    ("powerset", 6),
    ("same-nfa", 6),
    ("polynomial", 4),
    ("fused", 4),
    ("semimodule", 5),
    ("stack", 4),
])
def test_bounded_equivalence_matches_exhaustive_comparison(kind, depth, seed):
    system, s1, s2 = start_pair(kind, seed)
    t1, t2 = behaviours_up_to(system, s1, depth), behaviours_up_to(system, s2, depth)
    differing = [w for w in words_up_to(system.alphabet, depth) if t1[w] != t2[w]]
    verdict = equiv_bounded(system, s1, s2, depth)
    if differing:
        least = differing[0]
        assert verdict == CounterexampleWord(word=least, left=t1[least], right=t2[least])
    else:
        assert isinstance(verdict, Equal)


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("kind", ["powerset", "same-nfa", "boolean-semimodule"])
def test_bisimulation_implies_bounded_equality(kind, seed):
    system, s1, s2 = start_pair(kind, seed)
    verdict = bisim_decide(system, s1, s2)
    if isinstance(verdict, Equal):
        assert is_bisimulation(system, verdict.relation)
        assert isinstance(equiv_bounded(system, s1, s2, 10), Equal)
    else:
        assert isinstance(verdict, CounterexampleWord)
        assert equiv_bounded(system, s1, s2, len(verdict.word)) == verdict


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("kind", ["powerset", "polynomial", "semimodule", "stack"])
def test_derivatives_compose_along_words(kind, seed):
    system, start, _ = start_pair(kind, seed)
    u = random_word(system.alphabet, 3, random_state=seed)
    v = random_word(system.alphabet, 3, random_state=seed + 1)
    assert system.effect.is_equal(system.derive(start, u + v), system.derive(system.derive(start, u), v))
