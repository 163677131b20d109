"""
Master script to run the acceptance probes at desk scale
Executes: NFAs → Lifting laws → Grammars → Stack machines → Schemes → Summary
"""
import sys
import os
import logging
import time
from datetime import datetime

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from src.algebra import BOOLEAN, NATURAL, Polynomial, poly_add, poly_mul, poly_scale, var
from src.cfg import (
    CnfGrammar,
    coefficient,
    cyk_recognize,
    fuse,
    grammar_derivative,
    grammar_determinize,
    grammar_from_nfa,
    grammar_output,
    lift_add,
    lift_mul,
    lift_scale,
    nonterminal_name,
    oracle_coefficient,
    pointed_step,
    start_polynomial,
    unit_pair,
    zero_pair,
)
from src.documents import load_document
from src.generators import (
    make_rng,
    random_element,
    random_grammar,
    random_lifted_pair,
    random_nfa,
    random_polynomial,
    random_rules_only_grammar,
    random_scheme,
    random_stack_action,
)
from src.kernel import CounterexampleWord, Equal, behaviours_up_to, disjoint_union, is_bisimulation, words_up_to
from src.nfa import nfa_accepts, nfa_determinize, nfa_equiv, nfa_member
from src.reports import census_table, language_growth, summarize_checks
from src.rps import App, Var, format_tree, prefix_leq, unfold
from src.stack import Configuration, StackAction, language_probe, stack_compose, stacks_up_to
from src.utils import configure_logging, save_dataframe
from src.visualization import BehaviourVisualizer

# Get base directory path (project root)
base_dir = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
documents_dir = os.path.join(base_dir, 'data', 'documents')

logger = logging.getLogger(__name__)

RANDOM_STATE = 42
EXHAUSTIVE_EQUIV_LENGTH = 10

DYCK_CNF = CnfGrammar(
    start="D",
    unary={"L": frozenset({"("}), "R": frozenset({")"})},
    binary={"D": frozenset({("D", "D"), ("L", "R"), ("L", "X")}), "X": frozenset({("D", "R")})},
    accepts_empty=True,
)

PALINDROME_CNF = CnfGrammar(
    start="P",
    unary={"A": frozenset({"a"}), "B": frozenset({"b"})},
    binary={
        "P": frozenset({("A", "A"), ("B", "B"), ("A", "X"), ("B", "Y")}),
        "X": frozenset({("P", "A")}),
        "Y": frozenset({("P", "B")}),
    },
    accepts_empty=True,
)


def timed(name, check):
    """Run a check returning (cases, mismatches) and wrap it as a CheckResult"""
    logger.info(f"Running check: {name}")
    started = time.perf_counter()
    cases, mismatches = check()
    seconds = time.perf_counter() - started
    logger.info(f"{name}: {cases} cases, {mismatches} mismatches in {seconds:.2f}s")
    return {'Check': name, 'Cases': cases, 'Mismatches': mismatches,
            'Passed': mismatches == 0, 'Seconds': seconds}


def check_nfa_soundness():
    rng = make_rng(RANDOM_STATE)
    cases = mismatches = 0
    for _ in range(200):
        n = random_nfa(max_states=5, random_state=rng)
        table = behaviours_up_to(nfa_determinize(n), (0,), 8)
        for w, value in table.items():
            cases += 1
            mismatches += bool(value) != nfa_accepts(n, {0}, w)
    return cases, mismatches


def check_nfa_equivalence():
    rng = make_rng(RANDOM_STATE + 1)
    cases = mismatches = 0
    for _ in range(100):
        n1 = random_nfa(max_states=3, random_state=rng)
        n2 = random_nfa(max_states=3, random_state=rng)
        verdict = nfa_equiv(n1, {0}, n2, {0})
        cases += 1
        first = next((w for w in words_up_to(n1.alphabet, EXHAUSTIVE_EQUIV_LENGTH)
                      if nfa_accepts(n1, {0}, w) != nfa_accepts(n2, {0}, w)), None)
        if isinstance(verdict, CounterexampleWord):
            w = verdict.word
            differs = nfa_accepts(n1, {0}, w) != nfa_accepts(n2, {0}, w)
            shortest = first == w if len(w) <= EXHAUSTIVE_EQUIV_LENGTH else first is None
            mismatches += not (differs and shortest)
        elif isinstance(verdict, Equal):
            system = disjoint_union(nfa_determinize(n1), nfa_determinize(n2))
            mismatches += first is not None or not is_bisimulation(system, verdict.relation)
        else:
            mismatches += 1
    return cases, mismatches


def check_lifting_laws():
    cases = mismatches = 0
    for S in (BOOLEAN, NATURAL):
        rng = make_rng(RANDOM_STATE)
        alphabet = ("a", "b")
        zero, one = zero_pair(S, alphabet), unit_pair(S, alphabet)
        for _ in range(500):
            p, q, r = (random_lifted_pair(S, alphabet, ("x", "y"), random_state=rng, max_terms=2, max_len=2)
                       for _ in range(3))
            s = random_element(S, random_state=rng)
            laws = [
                lift_add(lift_add(p, q), r) == lift_add(p, lift_add(q, r)),
                lift_add(p, q) == lift_add(q, p),
                lift_add(p, zero) == p,
                lift_mul(lift_mul(p, q), r) == lift_mul(p, lift_mul(q, r)),
                lift_mul(p, one) == p and lift_mul(one, p) == p,
                lift_mul(p, zero) == zero and lift_mul(zero, p) == zero,
                lift_mul(p, lift_add(q, r)) == lift_add(lift_mul(p, q), lift_mul(p, r)),
                lift_mul(lift_add(p, q), r) == lift_add(lift_mul(p, r), lift_mul(q, r)),
                lift_scale(s, lift_mul(p, q)) == lift_mul(lift_scale(s, p), q),
                fuse(lift_mul(p, q)) == poly_mul(fuse(p), fuse(q)),
            ]
            cases += 1
            mismatches += not all(laws)
    return cases, mismatches


def check_derivative_laws():
    rng = make_rng(RANDOM_STATE + 2)
    cases = mismatches = 0
    for i in range(1000):
        S = BOOLEAN if i % 2 == 0 else NATURAL
        G = random_grammar(S, random_state=rng)
        p = random_polynomial(S, G.nonterminals, G.terminals, random_state=rng)
        q = random_polynomial(S, G.nonterminals, G.terminals, random_state=rng)
        pq = poly_mul(p, q)
        ok = grammar_output(G, pq) == S.mul(grammar_output(G, p), grammar_output(G, q))
        for a in G.terminals:
            rule = poly_add(poly_mul(grammar_derivative(G, p, a), q),
                            poly_scale(grammar_output(G, p), grammar_derivative(G, q, a)))
            ok = ok and grammar_derivative(G, pq, a) == rule
        cases += 1
        mismatches += not ok
    return cases, mismatches


def _small_grammars(seed):
    rng = make_rng(seed)
    for i in range(50):
        S = BOOLEAN if i % 2 == 0 else NATURAL
        yield random_grammar(S, max_nonterminals=3, max_terms=2, max_len=2, random_state=rng), rng


def check_fused_step():
    cases = mismatches = 0
    for G, rng in _small_grammars(RANDOM_STATE + 3):
        v = random_polynomial(G.semiring, G.nonterminals, G.terminals, max_terms=2, max_len=2, random_state=rng)
        fused = fuse(pointed_step(G, v), G)
        system = grammar_determinize(G)
        a, b = behaviours_up_to(system, v, 6), behaviours_up_to(system, fused, 6)
        cases += len(a)
        mismatches += sum(a[w] != b[w] for w in a)
    return cases, mismatches


def check_determinization_coincidence():
    cases = mismatches = 0
    for G, _ in _small_grammars(RANDOM_STATE + 4):
        v = start_polynomial(G.semiring, G.nonterminals[:1])
        a = behaviours_up_to(grammar_determinize(G, "derivative"), v, 6)
        b = behaviours_up_to(grammar_determinize(G, "powerset"), v, 6)
        cases += len(a)
        mismatches += sum(a[w] != b[w] for w in a)

    # rules-only grammars: S<X> directly against the pointed form on S<X+Σ>
    rng = make_rng(RANDOM_STATE + 8)
    for i in range(50):
        S = BOOLEAN if i % 2 == 0 else NATURAL
        G = random_rules_only_grammar(S, random_state=rng)
        v = random_polynomial(S, G.nonterminals, max_terms=2, max_len=2, random_state=rng)
        direct = behaviours_up_to(grammar_determinize(G, "rules"), v, 6)
        pointed = behaviours_up_to(grammar_determinize(G, "powerset"), v, 6)
        cases += len(direct)
        mismatches += sum(direct[w] != pointed[w] for w in direct)
        raw = pointed_step(G, v)
        mismatches += raw.out != direct[()]
        for letter in G.terminals:
            after = behaviours_up_to(grammar_determinize(G), raw.derivative(letter), 5)
            cases += len(after)
            mismatches += sum(after[w] != direct[(letter,) + w] for w in after)
    return cases, mismatches


def check_context_free_languages():
    cases = mismatches = 0
    for name, cnf in (('dyck.grammar', DYCK_CNF), ('palindrome.grammar', PALINDROME_CNF)):
        G = load_document(os.path.join(documents_dir, name)).body
        start = G.start(G.nonterminals[0])
        table = behaviours_up_to(grammar_determinize(G), start, 10)
        for w, value in table.items():
            cases += 1
            mismatches += bool(value) != cyk_recognize(cnf, w)
    G = load_document(os.path.join(documents_dir, 'counting.grammar')).body
    for n in range(9):
        w = ("a",) * n
        cases += 1
        mismatches += coefficient(G, G.start("A"), w) != oracle_coefficient(G, G.start("A"), w)
    return cases, mismatches


def check_stack_machines():
    cases = mismatches = 0
    anbn = load_document(os.path.join(documents_dir, 'anbn.stack')).body
    probe = language_probe(anbn, Configuration("q0", ("Z",)), 16)
    cases += 1
    mismatches += probe != [("a",) * n + ("b",) * n for n in range(9)]

    palindromes = load_document(os.path.join(documents_dir, 'palindrome.stack')).body
    accepted = set(language_probe(palindromes, Configuration("push", ("Z",)), 8))
    for w in words_up_to(("a", "b"), 8):
        cases += 1
        mismatches += (w in accepted) != cyk_recognize(PALINDROME_CNF, w)

    rng = make_rng(RANDOM_STATE + 5)
    gamma, states = ("A", "B"), ("p", "q")
    stacks = stacks_up_to(gamma, 4)
    for _ in range(100):
        f = random_stack_action(gamma, states, random_state=rng)
        g = {q: random_stack_action(gamma, states, random_state=rng) for q in states}
        h = {q: random_stack_action(gamma, states, random_state=rng) for q in states}
        unit = {q: StackAction.unit(gamma, q) for q in states}
        lhs = stack_compose(stack_compose(f, g), h)
        rhs = stack_compose(f, {q: stack_compose(g[q], h) for q in states})
        laws = [
            stack_compose(f, unit) == f,
            stack_compose(unit["p"], g) == g["p"],
            all(lhs.apply(s) == rhs.apply(s) for s in stacks),
        ]
        cases += 1
        mismatches += not all(laws)
    return cases, mismatches


def check_schemes():
    cases = mismatches = 0
    scheme = load_document(os.path.join(documents_dir, 'nested_products.scheme')).body
    root = scheme.parse("φ(z)")
    expected = {
        3: "+(z, +(×(⋆, z), ⊥))",
        4: "+(z, +(×(⋆, z), +(×(⋆, ×(⋆, z)), ⊥)))",
    }
    for d, text in expected.items():
        cases += 1
        mismatches += format_tree(unfold(scheme, root, d)) != text
    rng = make_rng(RANDOM_STATE + 6)
    for _ in range(50):
        s = random_scheme(random_state=rng)
        root = App("phi0", (Var("z"),))
        prefixes = [unfold(s, root, d) for d in range(7)]
        cases += 1
        mismatches += not all(prefix_leq(a, b) for a, b in zip(prefixes, prefixes[1:]))
    return cases, mismatches


def check_cross_instance():
    rng = make_rng(RANDOM_STATE + 7)
    cases = mismatches = 0
    for _ in range(50):
        n = random_nfa(max_states=4, random_state=rng)
        G = grammar_from_nfa(n)
        start = Polynomial(BOOLEAN, [((var(nonterminal_name(0)),), 1)])
        series = behaviours_up_to(grammar_determinize(G), start, 8)
        for w, value in series.items():
            cases += 1
            mismatches += bool(value) != nfa_member(n, {0}, w)
    return cases, mismatches


CHECKS = [
    ("nfa soundness", check_nfa_soundness),
    ("nfa equivalence", check_nfa_equivalence),
    ("lifting laws", check_lifting_laws),
    ("derivative laws", check_derivative_laws),
    ("fused step", check_fused_step),
    ("determinization coincidence", check_determinization_coincidence),
    ("context-free languages", check_context_free_languages),
    ("stack machines", check_stack_machines),
    ("schemes", check_schemes),
    ("cross-instance consistency", check_cross_instance),
]


def write_plots(charts_dir):
    """Growth plots for the bundled example documents"""
    visualizer = BehaviourVisualizer()
    dyck = load_document(os.path.join(documents_dir, 'dyck.grammar')).body
    table = behaviours_up_to(grammar_determinize(dyck), dyck.start("D"), 12)
    visualizer.plot_language_growth(
        language_growth([w for w, v in table.items() if v], 12),
        title='Dyck Words per Length',
        save_path=os.path.join(charts_dir, 'dyck_growth.png'),
    )
    scheme = load_document(os.path.join(documents_dir, 'nested_products.scheme')).body
    census = census_table(scheme, scheme.parse("φ(z)"), range(0, 9))
    save_dataframe(census, os.path.join(base_dir, 'reports', 'metrics', 'census.csv'), 'Subtree census')
    visualizer.plot_census_growth(census, save_path=os.path.join(charts_dir, 'census_growth.png'))


def main():
    """
    Main execution function for the acceptance run
    """
    os.makedirs(os.path.join(base_dir, 'reports', 'metrics'), exist_ok=True)
    charts_dir = os.path.join(base_dir, 'visualizations', 'charts')
    os.makedirs(charts_dir, exist_ok=True)
    configure_logging(
        'INFO',
        log_file=os.path.join(base_dir, 'reports', f'acceptance_run_{datetime.now().strftime("%Y%m%d_%H%M%S")}.log'),
    )

    print("=" * 70)
    print("BEHAVIOURS - ACCEPTANCE RUN")
    print("=" * 70)

    try:
        results = []
        for step, (name, check) in enumerate(CHECKS, start=1):
            logger.info(f"Step {step}: {name}")
            results.append(timed(name, check))

        summary = summarize_checks(results)
        save_dataframe(summary, os.path.join(base_dir, 'reports', 'metrics', 'acceptance_summary.csv'),
                       'Acceptance summary')

        logger.info("Generating visualizations...")
        write_plots(charts_dir)

        print("\n" + "=" * 70)
        print("ACCEPTANCE RUN COMPLETE!")
        print("=" * 70)
        print(f"\nResults saved to: reports/metrics/acceptance_summary.csv")
        print(f"Charts saved to: visualizations/charts/")
        print("=" * 70)
        return 0 if summary['Passed'].all() else 1

    except Exception as e:
        logger.error(f"Acceptance run failed with error: {str(e)}", exc_info=True)
        raise


if __name__ == "__main__":
    sys.exit(main())
