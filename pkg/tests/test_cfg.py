"""Weighted grammars: derivatives, the lifted algebra, the derivation oracle and CYK."""
import pytest

from src.algebra import BOOLEAN, NATURAL, Polynomial, UnboundGeneratorError, parse_polynomial
from src.cfg import (
    NotGreibachableError,
    OracleBoundError,
    WeightedGrammar,
    coefficient,
    cyk_recognize,
    fuse,
    grammar_derivative,
    grammar_determinize,
    grammar_from_nfa,
    grammar_from_productions,
    grammar_output,
    grammar_productions,
    grammar_step,
    lift_add,
    lift_mul,
    lift_scale,
    oracle_coefficient,
    pointed_step,
    series_up_to,
    start_polynomial,
    unit_pair,
    zero_pair,
)
from src import cfg
from src.generators import random_grammar, random_lifted_pair, random_polynomial, random_rules_only_grammar
from src.kernel import behaviours_up_to, words_up_to
from src.nfa import Nfa, ends_with, nfa_member


@pytest.mark.parametrize("text, expected", [
    ("", 1),
    ("()", 1),
    ("(())", 1),
    ("()()", 1),
    ("(()", 0),
    (")(", 0),
])
def test_dyck_membership(dyck, text, expected):
    assert coefficient(dyck, dyck.start("D"), tuple(text)) == expected


def test_dyck_agrees_with_cyk(dyck, dyck_cnf):
    for w in words_up_to(dyck.terminals, 8):
        assert bool(coefficient(dyck, dyck.start("D"), w)) == cyk_recognize(dyck_cnf, w)


def test_palindromes_agree_with_cyk(palindromes, palindrome_cnf):
    system = grammar_determinize(palindromes)
    for w in words_up_to(palindromes.terminals, 8):
        expected = cyk_recognize(palindrome_cnf, w)
        assert bool(system.lifted_output(system.derive(palindromes.start("P"), w))) == expected


def test_counting_grammar_gives_catalan_numbers(counting):
    """The number of binary bracketings of a^n."""
    catalan = [1, 1, 2, 5, 14, 42]
    for n, expected in enumerate(catalan, start=1):
        assert coefficient(counting, counting.start("A"), ("a",) * n) == expected
    assert coefficient(counting, counting.start("A"), ()) == 0


def test_series_up_to(counting):
    assert series_up_to(counting, counting.start("A"), 4) == {
        ("a",): 1, ("a", "a"): 1, ("a", "a", "a"): 2, ("a", "a", "a", "a"): 5,
    }


def test_oracle_agrees_with_derivatives(dyck, counting):
    for G, name in ((dyck, "D"), (counting, "A")):
        start = G.start(name)
        for w in words_up_to(G.terminals, 6):
            assert oracle_coefficient(G, start, w) == coefficient(G, start, w)


def test_oracle_bound(counting):
    with pytest.raises(OracleBoundError):
        oracle_coefficient(counting, counting.start("A"), ("a",) * 13)
    assert oracle_coefficient(counting, counting.start("A"), ("a",) * 13, bound=13) == 208012


def test_both_determinizations_agree(dyck, counting):
    for G, name in ((dyck, "D"), (counting, "A")):
        start = G.start(name)
        assert series_up_to(G, start, 5) == series_up_to(G, start, 5, mode="powerset")
    with pytest.raises(ValueError, match="Unknown determinization mode"):
        grammar_determinize(dyck, "magic")


def test_powerset_mode_reaches_longer_words(dyck, counting):
    assert series_up_to(dyck, dyck.start("D"), 10, mode="powerset") == series_up_to(dyck, dyck.start("D"), 10)
    assert series_up_to(counting, counting.start("A"), 9, mode="powerset") == series_up_to(
        counting, counting.start("A"), 9)


def test_powerset_mode_computes_one_step_per_value(dyck, monkeypatch):
    calls = []

    def counted(G, v, collect=False):
        calls.append(v)
        return grammar_step(G, v)

    monkeypatch.setattr(cfg, "pointed_step", counted)
    system = grammar_determinize(dyck, "powerset")
    start = dyck.start("D")
    behaviours_up_to(system, start, 4)
    reached = {grammar_determinize(dyck).derive(start, w) for w in words_up_to(dyck.terminals, 4)}
    assert len(calls) == len(set(calls)) == len(reached)


@pytest.mark.parametrize("seed", range(8))
def test_collected_pointed_step_is_the_derivative_engine(seed):
    G = random_grammar(NATURAL, max_nonterminals=2, max_terms=2, max_len=3, random_state=seed)
    v = random_polynomial(NATURAL, G.nonterminals, G.terminals, max_terms=3, max_len=3, random_state=seed + 90)
    assert pointed_step(G, v, collect=True) == grammar_step(G, v)


def test_uncollected_pointed_step_unfolds_the_suffix(dyck):
    v = parse_polynomial("D.')'.D", BOOLEAN)
    raw, collected = pointed_step(dyck, v), pointed_step(dyck, v, collect=True)
    assert len(raw.derivative("(")) > len(collected.derivative("("))
    assert series_up_to(dyck, raw.derivative("("), 5) == series_up_to(dyck, collected.derivative("("), 5)


@pytest.mark.parametrize("seed", range(6))
def test_rules_only_grammars_stay_inside_the_nonterminals(seed):
    S = BOOLEAN if seed % 2 == 0 else NATURAL
    G = random_rules_only_grammar(S, random_state=seed)
    assert G.is_rules_only
    v = random_polynomial(S, G.nonterminals, max_terms=2, max_len=2, random_state=seed + 30)
    direct = grammar_determinize(G, "rules")
    assert behaviours_up_to(direct, v, 4) == behaviours_up_to(grammar_determinize(G, "powerset"), v, 4)
    for w in words_up_to(G.terminals, 3):
        assert direct.derive(v, w).is_variables_only()

    raw = pointed_step(G, v)
    table = behaviours_up_to(direct, v, 4)
    for a in G.terminals:
        after = behaviours_up_to(grammar_determinize(G), raw.derivative(a), 3)
        assert all(after[w] == table[(a,) + w] for w in after)


def test_rules_mode_needs_terminal_free_rule_bodies(dyck):
    assert not dyck.is_rules_only
    with pytest.raises(ValueError, match="no terminals"):
        grammar_determinize(dyck, "rules")
    G = random_rules_only_grammar(BOOLEAN, random_state=1)
    with pytest.raises(UnboundGeneratorError):
        grammar_determinize(G, "rules").lifted_transition(parse_polynomial("'a'", BOOLEAN), "a")


def test_pointed_step_on_a_nonterminal_is_its_rule(dyck, counting):
    for G in (dyck, counting):
        for x in G.nonterminals:
            assert pointed_step(G, G.start(x)) == grammar_step(G, G.start(x))


def test_output_is_multiplicative(counting):
    v = parse_polynomial("2*A1.A1 + 3*A + 4", NATURAL)
    assert grammar_output(counting, v) == 2 + 0 + 4


def test_derivative_product_rule(counting):
    """d(A1.A1) = d(A1).A1 + o(A1).d(A1) with o(A1) = 1 and d(A1) = A1.A1."""
    v = parse_polynomial("A1.A1", NATURAL)
    expected = parse_polynomial("A1.A1.A1 + A1.A1", NATURAL)
    assert grammar_derivative(counting, v, "a") == expected


@pytest.mark.parametrize("seed", range(10))
def test_lifted_algebra_laws(seed):
    S, alphabet, variables = NATURAL, ("a", "b"), ("x", "y")
    p, q, r = (random_lifted_pair(S, alphabet, variables, random_state=seed * 3 + i, max_terms=2, max_len=2)
               for i in range(3))
    one, zero = unit_pair(S, alphabet), zero_pair(S, alphabet)

    assert lift_mul(one, p) == p
    assert lift_mul(p, one) == p
    assert lift_mul(zero, p) == zero
    assert lift_mul(lift_mul(p, q), r) == lift_mul(p, lift_mul(q, r))
    assert lift_mul(p, lift_add(q, r)) == lift_add(lift_mul(p, q), lift_mul(p, r))
    assert lift_mul(lift_add(p, q), r) == lift_add(lift_mul(p, r), lift_mul(q, r))
    assert lift_scale(3, lift_mul(p, q)) == lift_mul(lift_scale(3, p), q)


@pytest.mark.parametrize("seed", range(6))
def test_fused_step_denotes_the_same_series(seed):
    G = random_grammar(NATURAL, max_nonterminals=2, max_terms=2, max_len=2, random_state=seed)
    v = random_polynomial(NATURAL, G.nonterminals, G.terminals, max_terms=2, max_len=2, random_state=seed + 50)
    fused = fuse(pointed_step(G, v), G)
    assert series_up_to(G, fused, 3) == series_up_to(G, v, 3)


@pytest.mark.parametrize("seed", range(6))
def test_derivative_engine_matches_pointed_step(seed):
    G = random_grammar(NATURAL, max_nonterminals=2, max_terms=2, max_len=2, random_state=seed)
    v = random_polynomial(NATURAL, G.nonterminals, G.terminals, max_terms=2, max_len=2, random_state=seed + 70)
    derived, pointed = grammar_step(G, v), pointed_step(G, v)
    assert derived.out == pointed.out
    for a in G.terminals:
        assert series_up_to(G, derived.derivative(a), 2) == series_up_to(G, pointed.derivative(a), 2)


def test_productions_round_trip(counting):
    prods = grammar_productions(counting)
    assert prods == {
        "A": parse_polynomial("1*'a'.A1", NATURAL),
        "A1": parse_polynomial("1 + 1*'a'.A1.A1", NATURAL),
    }
    assert grammar_from_productions(NATURAL, counting.nonterminals, counting.terminals, prods) == counting


def test_productions_must_start_with_a_terminal():
    with pytest.raises(NotGreibachableError):
        grammar_from_productions(NATURAL, ["A"], ["a"], {"A": parse_polynomial("A.'a'", NATURAL)})


def test_right_linear_encoding_of_an_nfa():
    n = ends_with("a")
    G = grammar_from_nfa(n)
    assert G.nonterminals == ("q0", "q1")
    start = start_polynomial(BOOLEAN, ["q0"])
    for w in words_up_to(n.alphabet, 5):
        assert bool(coefficient(G, start, w)) == nfa_member(n, {0}, w)


def test_right_linear_encoding_rejects_clashing_names():
    n = Nfa.from_edges(states=(0, "q0"), alphabet=("a",), accepting={0}, edges={(0, "a"): ["q0"]})
    with pytest.raises(ValueError, match="both become nonterminal q0"):
        grammar_from_nfa(n)


def test_grammar_validation():
    with pytest.raises(ValueError, match="undeclared"):
        WeightedGrammar(semiring=NATURAL, nonterminals=("A",), terminals=("a",),
                        rule={("A", "b"): Polynomial.one(NATURAL)})
    with pytest.raises(UnboundGeneratorError):
        WeightedGrammar(semiring=NATURAL, nonterminals=("A",), terminals=("a",),
                        rule={("A", "a"): parse_polynomial("B", NATURAL)})
    G = WeightedGrammar(semiring=NATURAL, nonterminals=("A",), terminals=("a",))
    with pytest.raises(UnboundGeneratorError):
        G.start("B")


def test_cyk_on_small_words(dyck_cnf):
    assert cyk_recognize(dyck_cnf, ())
    assert cyk_recognize(dyck_cnf, tuple("(()())"))
    assert not cyk_recognize(dyck_cnf, tuple("())("))
