"""Document parsing, diagnostics and canonical printing."""
import pytest

from src.algebra import BOOLEAN
from src.cfg import WeightedGrammar
from src.documents import (
    DocumentKind,
    DocumentSyntaxError,
    DocumentValidationError,
    format_document,
    load_document,
    parse_document,
)
from src.nfa import Nfa
from src.rps import Scheme
from src.stack import NondeterministicStackMachine, StackMachine
from src.weighted import WeightedAutomaton

NFA_TEXT = """#kind nfa
alphabet: a b
states: 0 1
accepting: 1
trans: 0 a -> 0 1
trans: 0 b -> 0
trans: 1 a ->
trans: 1 b ->
"""


@pytest.mark.parametrize("name, kind, body_type", [
    ("ends_with_a.nfa", DocumentKind.NFA, Nfa),
    ("dyck.grammar", DocumentKind.GRAMMAR, WeightedGrammar),
    ("anbn.stack", DocumentKind.STACK_MACHINE, StackMachine),
    ("palindrome.stack", DocumentKind.STACK_MACHINE, NondeterministicStackMachine),
    ("nested_products.scheme", DocumentKind.SCHEME, Scheme),
    ("count_a.wfa", DocumentKind.WFA, WeightedAutomaton),
])
def test_bundled_documents_load(documents_dir, name, kind, body_type):
    doc = load_document(documents_dir / name)
    assert doc.kind is kind
    assert isinstance(doc.body, body_type)


def test_printing_is_canonical(documents_dir):
    """Printed documents read back to equal bodies and print the same again."""
    for path in sorted(documents_dir.iterdir()):
        doc = load_document(path)
        text = format_document(doc)
        again = parse_document(text)
        assert again.body == doc.body, path.name
        assert format_document(again) == text, path.name


def test_nfa_document():
    n = parse_document(NFA_TEXT).body
    assert n.states == ("0", "1")
    assert n.transition[("0", "a")] == ("0", "1")
    assert n.transition[("1", "b")] == ()


def test_grammar_document():
    G = parse_document(
        "#kind grammar\nsemiring: B\nnonterminals: D\nterminals: '(' ')'\noutput: D 1\nrule: D '(' -> 1*D.')'.D\n"
    ).body
    assert G.semiring is BOOLEAN
    assert G.terminals == ("(", ")")
    assert G.output == {"D": 1}


def test_productions_and_rules_describe_the_same_grammar(documents_dir):
    rules = load_document(documents_dir / "counting.grammar").body
    productions = load_document(documents_dir / "counting_prod.grammar").body
    assert productions == rules


def test_comments_and_blank_lines_are_skipped():
    text = "\n#kind nfa\n# a comment\n\n" + NFA_TEXT.split("\n", 1)[1]
    assert parse_document(text).kind is DocumentKind.NFA


def test_missing_header():
    with pytest.raises(DocumentSyntaxError) as info:
        parse_document("alphabet: a\n")
    assert (info.value.line, info.value.column) == (1, 1)
    with pytest.raises(DocumentSyntaxError, match="Empty document"):
        parse_document("\n\n")


def test_unknown_kind():
    with pytest.raises(DocumentSyntaxError, match="Unknown document kind 'pda'") as info:
        parse_document("#kind pda\n")
    assert info.value.column == 7


def test_unknown_key():
    with pytest.raises(DocumentSyntaxError, match="Unknown key 'rule'") as info:
        parse_document("#kind nfa\nrule: x\n")
    assert info.value.line == 2


def test_malformed_line():
    with pytest.raises(DocumentSyntaxError, match="Expected 'key: value'") as info:
        parse_document("#kind nfa\nalphabet a b\n")
    assert (info.value.line, info.value.column) == (2, 1)


def test_polynomial_errors_point_into_the_line():
    text = "#kind grammar\nsemiring: B\nnonterminals: D\nterminals: '(' ')'\noutput: D 1\nrule: D '(' -> 1*\n"
    with pytest.raises(DocumentSyntaxError) as info:
        parse_document(text)
    assert (info.value.line, info.value.column) == (6, 18)


def test_non_total_nfa():
    text = NFA_TEXT.replace("trans: 1 b ->\n", "")
    with pytest.raises(DocumentValidationError, match="missing 1 b"):
        parse_document(text)


def test_unknown_state_in_a_transition():
    with pytest.raises(DocumentValidationError, match="Unknown state '2'") as info:
        parse_document(NFA_TEXT.replace("trans: 0 b -> 0", "trans: 0 b -> 2"))
    assert info.value.line == 6


def test_undeclared_terminal():
    text = "#kind grammar\nsemiring: B\nnonterminals: D\nterminals: 'a'\nrule: D 'a' -> 1*'b'\n"
    with pytest.raises(DocumentValidationError, match="Undeclared terminals"):
        parse_document(text)


def test_prod_and_rule_lines_do_not_mix():
    text = "#kind grammar\nsemiring: N\nnonterminals: A\nterminals: 'a'\nprod: A -> 1\nrule: A 'a' -> A\n"
    with pytest.raises(DocumentValidationError, match="cannot be mixed"):
        parse_document(text)


def test_unguarded_scheme_reports_the_chain():
    text = "#kind scheme\ngivens: a/1\ndefine: φ(z) = φ(z)\n"
    with pytest.raises(DocumentValidationError) as info:
        parse_document(text)
    assert info.value.line == 3
    assert "φ → φ" in str(info.value)


def test_clause_lines_need_the_nondeterministic_mode():
    text = ("#kind stackmachine\nmode: deterministic\nalphabet: a\nstack: Z\nstates: q\n"
            "act: q a 0 : - -> q -\nclause: q a : Z -> q -\n")
    with pytest.raises(DocumentValidationError, match="nondeterministic") as info:
        parse_document(text)
    assert info.value.line == 7


def test_stack_action_lookaheads_must_agree():
    text = ("#kind stackmachine\nmode: deterministic\nalphabet: a\nstack: Z\nstates: q\n"
            "act: q a 1 : - -> q -\nact: q a 0 : Z -> q -\n")
    with pytest.raises(DocumentValidationError, match="Lookahead 0 differs"):
        parse_document(text)


def test_missing_accept_line_means_never():
    text = "#kind stackmachine\nmode: deterministic\nalphabet: a\nstack: Z\nstates: q\nact: q a 0 : - -> q -\n"
    m = parse_document(text).body
    assert not m.output["q"](("Z",))
    assert not m.output["q"](())


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_document(tmp_path / "absent.nfa")


@pytest.mark.parametrize("text, line, column", [
    ("#kind wfa\nsemiring: N\nalphabet: a\nstates: p 1\n", 4, 11),
    ("#kind wfa\nsemiring: N\nalphabet: a\nstates:   p q-r\n", 4, 13),
    ("#kind grammar\nsemiring: B\nnonterminals: A 2B\nterminals: 'a'\n", 3, 17),
])
def test_bad_names_are_reported_where_they_start(text, line, column):
    with pytest.raises(DocumentSyntaxError, match="is not a valid name") as info:
        parse_document(text)
    assert (info.value.line, info.value.column) == (line, column)
