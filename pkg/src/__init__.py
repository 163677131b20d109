"""
Behaviours of systems with side effects: determinization, equivalence and
unfolding for automata, weighted grammars, stack machines and schemes.
"""

__version__ = '1.0.0'


from src.algebra import BOOLEAN, INTEGER, NATURAL, Polynomial, get_semiring, parse_polynomial
from src.kernel import bisim_decide, behaviour_at, equiv_bounded, generalized_powerset
from src.nfa import Nfa, nfa_determinize, nfa_equiv, nfa_member
from src.cfg import WeightedGrammar, coefficient, grammar_determinize, oracle_coefficient
from src.stack import StackAction, StackMachine, NondeterministicStackMachine, language_probe, run
from src.rps import Scheme, prefix_equal, subtree_census, unfold
from src.weighted import WeightedAutomaton, wfa_weight
from src.documents import load_document, parse_document, format_document
from src.utils import load_dataframe, save_dataframe

__all__ = [
    "BOOLEAN",
    "INTEGER",
    "NATURAL",
    "Polynomial",
    "get_semiring",
    "parse_polynomial",
    "bisim_decide",
    "behaviour_at",
    "equiv_bounded",
    "generalized_powerset",
    "Nfa",
    "nfa_determinize",
    "nfa_equiv",
    "nfa_member",
    "WeightedGrammar",
    "coefficient",
    "grammar_determinize",
    "oracle_coefficient",
    "StackAction",
    "StackMachine",
    "NondeterministicStackMachine",
    "language_probe",
    "run",
    "Scheme",
    "prefix_equal",
    "subtree_census",
    "unfold",
    "WeightedAutomaton",
    "wfa_weight",
    "load_document",
    "parse_document",
    "format_document",
    "load_dataframe",
    "save_dataframe",
]
