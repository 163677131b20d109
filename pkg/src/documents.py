"""
Line-oriented document format for the systems the command line loads.

A document starts with a ``#kind`` header followed by ``key: value`` lines;
other lines starting with ``#`` are comments. Example::

    #kind nfa
    alphabet: a b
    states: 0 1
    accepting: 1
    trans: 0 a -> 0 1
    trans: 0 b -> 0
    trans: 1 a ->
    trans: 1 b ->

Words and stack words are written with ``.`` separators (``-`` is the empty
stack word), grammar terminals are single-quoted.
"""
import logging
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from src.algebra import PolynomialSyntaxError, Semiring, format_polynomial, get_semiring, parse_polynomial
from src.cfg import WeightedGrammar, grammar_from_productions
from src.nfa import Nfa
from src.rps import (
    GuardednessError,
    RankError,
    Scheme,
    Signature,
    TermSyntaxError,
    format_tree,
    parse_term,
)
from src.stack import (
    Clause,
    NondeterministicStackMachine,
    StackAction,
    StackMachine,
    StackPredicate,
    StackTableError,
)
from src.weighted import WeightedAutomaton

logger = logging.getLogger(__name__)


class DocumentKind(str, Enum):
    NFA = "nfa"
    GRAMMAR = "grammar"
    STACK_MACHINE = "stackmachine"
    SCHEME = "scheme"
    WFA = "wfa"


class DocumentError(ValueError):
    """Base class for document diagnostics; ``line``/``column`` are 1-based."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(f"{where}{message}")
        self.message = message
        self.line = line
        self.column = column


class DocumentSyntaxError(DocumentError):
    pass


class DocumentValidationError(DocumentError):
    pass


@dataclass(frozen=True)
class Document:
    kind: DocumentKind
    body: Any


@dataclass(frozen=True)
class _Line:
    number: int
    key: str
    value: str
    column: int

    def syntax_error(self, message: str, offset: int = 0) -> DocumentSyntaxError:
        return DocumentSyntaxError(message, self.number, self.column + offset)

    def invalid(self, message: str) -> DocumentValidationError:
        return DocumentValidationError(message, self.number)


_KEYS = {
    DocumentKind.NFA: {"alphabet", "states", "accepting", "trans"},
    DocumentKind.GRAMMAR: {"semiring", "nonterminals", "terminals", "output", "rule", "prod"},
    DocumentKind.STACK_MACHINE: {"mode", "alphabet", "stack", "states", "accept", "act", "clause"},
    DocumentKind.SCHEME: {"givens", "define"},
    DocumentKind.WFA: {"semiring", "alphabet", "states", "output", "trans"},
}

_HEADER = re.compile(r"#kind\s+(?P<kind>\S+)\s*$")
_LINE = re.compile(r"(?P<key>[A-Za-z_]+)\s*:\s*(?P<value>.*)$")
_SYMBOL = re.compile(r"'([^']*)'|(\S+)")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")

MODES = ("deterministic", "nondeterministic")


# ============================================================
# LINE HELPERS
# ============================================================

def _split_lines(text: str) -> Tuple[DocumentKind, List[_Line]]:
    kind = None
    lines: List[_Line] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped:
            continue
        indent = len(raw) - len(raw.lstrip())
        if stripped.startswith("#"):
            if kind is None:
                m = _HEADER.match(stripped)
                if not m:
                    raise DocumentSyntaxError("Expected a '#kind <name>' header", number, indent + 1)
                try:
                    kind = DocumentKind(m.group("kind"))
                except ValueError:
                    raise DocumentSyntaxError(
                        f"Unknown document kind '{m.group('kind')}'. Available: {[k.value for k in DocumentKind]}",
                        number, indent + m.start("kind") + 1,
                    ) from None
            continue
        if kind is None:
            raise DocumentSyntaxError("Expected a '#kind <name>' header", number, indent + 1)
        m = _LINE.match(raw.rstrip(), indent)
        if not m:
            raise DocumentSyntaxError("Expected 'key: value'", number, indent + 1)
        if m.group("key") not in _KEYS[kind]:
            raise DocumentSyntaxError(f"Unknown key '{m.group('key')}' in a {kind.value} document", number, indent + 1)
        lines.append(_Line(number, m.group("key"), m.group("value"), m.start("value") + 1))
    if kind is None:
        raise DocumentSyntaxError("Empty document: expected a '#kind <name>' header", 1, 1)
    return kind, lines


def _all(lines: List[_Line], key: str) -> List[_Line]:
    return [line for line in lines if line.key == key]


def _single(lines: List[_Line], key: str, required: bool = True) -> Optional[_Line]:
    found = _all(lines, key)
    if len(found) > 1:
        raise found[1].invalid(f"Duplicate '{key}' line")
    if not found:
        if required:
            raise DocumentValidationError(f"Missing '{key}' line")
        return None
    return found[0]


def _symbols(text: str) -> List[str]:
    return [quoted if quoted else bare for quoted, bare in _SYMBOL.findall(text)]


def _names(line: _Line) -> List[str]:
    """Whitespace-separated identifiers; a bad name is reported at its own column."""
    names = []
    for m in re.finditer(r"\S+", line.value):
        if not _NAME.match(m.group()):
            raise line.syntax_error(f"'{m.group()}' is not a valid name", m.start())
        names.append(m.group())
    return names


def _quote(symbol: str) -> str:
    return f"'{symbol}'"


def _split_at(line: _Line, token: str, text: str = None, offset: int = 0) -> Tuple[str, str, int]:
    """Split at the first ``token`` outside quotes; returns (left, right, offset of right)."""
    text = line.value if text is None else text
    quoted = False
    for i, ch in enumerate(text):
        if ch == "'":
            quoted = not quoted
        elif not quoted and text.startswith(token, i):
            return text[:i].strip(), text[i + len(token):], offset + i + len(token)
    raise line.syntax_error(f"Expected '{token}'", offset + len(text))


def _polynomial(line: _Line, text: str, offset: int, S: Semiring, variables: Sequence[str]):
    try:
        return parse_polynomial(text, S, variables)
    except PolynomialSyntaxError as e:
        raise line.syntax_error(e.message, offset + max(e.column, 1) - 1) from e


def _semiring(lines: List[_Line]) -> Semiring:
    line = _single(lines, "semiring")
    try:
        return get_semiring(line.value)
    except ValueError as e:
        raise line.invalid(str(e)) from e


def _element(line: _Line, S: Semiring, text: str):
    try:
        return S.parse_element(text)
    except ValueError as e:
        raise line.invalid(str(e)) from e


def parse_stack_word(text: str) -> Tuple[str, ...]:
    text = text.strip()
    if text in ("", "-", "ε"):
        return ()
    return tuple(text.split("."))


def format_stack_word(w: Sequence[str]) -> str:
    return ".".join(w) if w else "-"


def _stack_word(line: _Line, text: str, gamma: Sequence[str]) -> Tuple[str, ...]:
    w = parse_stack_word(text)
    stray = sorted(set(w) - set(gamma))
    if stray:
        raise line.invalid(f"Unknown stack symbols {stray}")
    return w


# ============================================================
# PARSERS PER KIND
# ============================================================

def _parse_nfa(lines: List[_Line]) -> Nfa:
    alphabet = _single(lines, "alphabet").value.split()
    states = _single(lines, "states").value.split()
    accepting_line = _single(lines, "accepting", required=False)
    accepting = accepting_line.value.split() if accepting_line else []
    for s in accepting:
        if s not in states:
            raise accepting_line.invalid(f"Unknown state '{s}'")
    table: Dict[Tuple[str, str], List[str]] = {}
    for line in _all(lines, "trans"):
        lhs, rhs, _ = _split_at(line, "->")
        parts = lhs.split()
        if len(parts) != 2:
            raise line.syntax_error("Expected 'state letter -> targets'")
        s, a = parts
        if s not in states:
            raise line.invalid(f"Unknown state '{s}'")
        if a not in alphabet:
            raise line.invalid(f"Letter '{a}' is not in the alphabet")
        if (s, a) in table:
            raise line.invalid(f"Duplicate transition for {s} {a}")
        targets = rhs.split()
        for t in targets:
            if t not in states:
                raise line.invalid(f"Unknown state '{t}'")
        table[(s, a)] = targets
    missing = [f"{s} {a}" for s in states for a in alphabet if (s, a) not in table]
    if missing:
        raise DocumentValidationError(f"Transition table is not total: missing {', '.join(missing)}")
    try:
        return Nfa(states=tuple(states), alphabet=tuple(alphabet), accepting=frozenset(accepting), transition=table)
    except ValueError as e:
        raise DocumentValidationError(str(e)) from e


def _check_terminals(line: _Line, p, terminals: Sequence[str]):
    stray = sorted(g.id for g in p.terminals() if g.id not in terminals)
    if stray:
        raise line.invalid(f"Undeclared terminals {stray}")


def _parse_grammar(lines: List[_Line]) -> WeightedGrammar:
    S = _semiring(lines)
    nonterminals = _names(_single(lines, "nonterminals"))
    terminals = _symbols(_single(lines, "terminals").value)
    prod_lines = _all(lines, "prod")
    rule_lines = _all(lines, "rule")
    output_lines = _all(lines, "output")
    if prod_lines and (rule_lines or output_lines):
        raise prod_lines[0].invalid("'prod' lines cannot be mixed with 'rule' or 'output' lines")

    if prod_lines:
        prods = {}
        for line in prod_lines:
            x, rhs, offset = _split_at(line, "->")
            if x not in nonterminals:
                raise line.invalid(f"Unknown nonterminal '{x}'")
            if x in prods:
                raise line.invalid(f"Duplicate production for {x}")
            p = _polynomial(line, rhs, offset, S, nonterminals)
            _check_terminals(line, p, terminals)
            for w, _ in p.items():
                if w and w[0].is_variable:
                    raise line.invalid(f"Alternative of {x} starts with nonterminal {w[0]}")
            prods[x] = p
        try:
            return grammar_from_productions(S, nonterminals, terminals, prods)
        except (ValueError, KeyError) as e:
            raise DocumentValidationError(e.args[0]) from e

    outputs = {}
    for line in output_lines:
        parts = line.value.split()
        if len(parts) != 2:
            raise line.syntax_error("Expected 'nonterminal coefficient'")
        x, value = parts
        if x not in nonterminals:
            raise line.invalid(f"Unknown nonterminal '{x}'")
        if x in outputs:
            raise line.invalid(f"Duplicate output for {x}")
        outputs[x] = _element(line, S, value)
    rules = {}
    for line in rule_lines:
        lhs, rhs, offset = _split_at(line, "->")
        parts = _symbols(lhs)
        if len(parts) != 2:
            raise line.syntax_error("Expected \"nonterminal 'terminal' -> polynomial\"")
        x, a = parts
        if x not in nonterminals:
            raise line.invalid(f"Unknown nonterminal '{x}'")
        if a not in terminals:
            raise line.invalid(f"Undeclared terminal '{a}'")
        if (x, a) in rules:
            raise line.invalid(f"Duplicate rule for {x} '{a}'")
        p = _polynomial(line, rhs, offset, S, nonterminals)
        _check_terminals(line, p, terminals)
        rules[(x, a)] = p
    try:
        return WeightedGrammar(semiring=S, nonterminals=tuple(nonterminals), terminals=tuple(terminals),
                               output=outputs, rule=rules)
    except (ValueError, KeyError) as e:
        raise DocumentValidationError(e.args[0]) from e


def _parse_stack_machine(lines: List[_Line]) -> Union[StackMachine, NondeterministicStackMachine]:
    mode_line = _single(lines, "mode")
    if mode_line.value not in MODES:
        raise mode_line.invalid(f"Mode must be one of {list(MODES)}")
    alphabet = _single(lines, "alphabet").value.split()
    gamma = tuple(sorted(set(_single(lines, "stack").value.split())))
    states = _single(lines, "states").value.split()

    def known_state(line: _Line, q: str) -> str:
        if q not in states:
            raise line.invalid(f"Unknown state '{q}'")
        return q

    def known_letter(line: _Line, a: str) -> str:
        if a not in alphabet:
            raise line.invalid(f"Letter '{a}' is not in the alphabet")
        return a

    outputs = {}
    for line in _all(lines, "accept"):
        lhs, rhs, _ = _split_at(line, ":")
        parts = lhs.split()
        if len(parts) != 2 or not parts[1].isdigit():
            raise line.syntax_error("Expected 'state lookahead : stack words'")
        q, k = known_state(line, parts[0]), int(parts[1])
        if q in outputs:
            raise line.invalid(f"Duplicate accept line for {q}")
        words = [_stack_word(line, tok, gamma) for tok in rhs.split()]
        too_long = [format_stack_word(w) for w in words if len(w) > k]
        if too_long:
            raise line.invalid(f"Stack words {too_long} are longer than the lookahead {k}")
        outputs[q] = StackPredicate(gamma, k, frozenset(w for w in words if len(w) < k),
                                    frozenset(w for w in words if len(w) == k))
    for q in states:
        outputs.setdefault(q, StackPredicate.never(gamma))

    def successor(line: _Line, text: str) -> Tuple[str, Tuple[str, ...]]:
        parts = text.split()
        if len(parts) not in (1, 2):
            raise line.syntax_error("Expected 'state [replacement]' after '->'")
        return known_state(line, parts[0]), _stack_word(line, parts[1] if len(parts) == 2 else "-", gamma)

    try:
        if mode_line.value == "deterministic":
            if _all(lines, "clause"):
                raise _all(lines, "clause")[0].invalid("'clause' lines need mode nondeterministic")
            tables: Dict[Tuple[str, str], Tuple[int, Dict, _Line]] = {}
            for line in _all(lines, "act"):
                lhs, rhs, offset = _split_at(line, ":")
                parts = lhs.split()
                if len(parts) != 3 or not parts[2].isdigit():
                    raise line.syntax_error("Expected 'state letter lookahead : stack word -> state replacement'")
                q, a, k = known_state(line, parts[0]), known_letter(line, parts[1]), int(parts[2])
                w_text, rest, _ = _split_at(line, "->", rhs, offset)
                w = _stack_word(line, w_text, gamma)
                lookahead, table, first = tables.setdefault((q, a), (k, {}, line))
                if k != lookahead:
                    raise line.invalid(f"Lookahead {k} differs from {lookahead} on line {first.number}")
                if w in table:
                    raise line.invalid(f"Duplicate entry for stack word {format_stack_word(w)}")
                table[w] = successor(line, rest)
            actions = {}
            for q in states:
                for a in alphabet:
                    if (q, a) not in tables:
                        raise DocumentValidationError(f"No action for state {q} on '{a}'")
                    k, table, first = tables[(q, a)]
                    try:
                        actions[(q, a)] = StackAction.build(gamma, k, table)
                    except StackTableError as e:
                        raise first.invalid(str(e)) from e
            return StackMachine(states=tuple(states), alphabet=tuple(alphabet), stack_alphabet=gamma,
                                output=outputs, transition=actions)

        if _all(lines, "act"):
            raise _all(lines, "act")[0].invalid("'act' lines need mode deterministic")
        clauses: Dict[Tuple[str, str], List[Clause]] = {}
        for line in _all(lines, "clause"):
            lhs, rhs, offset = _split_at(line, ":")
            parts = lhs.split()
            if len(parts) != 2:
                raise line.syntax_error("Expected 'state letter : pattern -> state replacement'")
            q, a = known_state(line, parts[0]), known_letter(line, parts[1])
            pattern_text, rest, _ = _split_at(line, "->", rhs, offset)
            target, replacement = successor(line, rest)
            clauses.setdefault((q, a), []).append(
                Clause(_stack_word(line, pattern_text, gamma), target, replacement))
        return NondeterministicStackMachine(states=tuple(states), alphabet=tuple(alphabet), stack_alphabet=gamma,
                                            output=outputs, clauses={k: tuple(v) for k, v in clauses.items()})
    except StackTableError as e:
        raise DocumentValidationError(str(e)) from e


_DEFINITION_HEAD = re.compile(r"(?P<name>[^\s(),=]+)\s*(?:\((?P<params>[^()]*)\))?$")


def _parse_scheme(lines: List[_Line]) -> Scheme:
    givens_line = _single(lines, "givens")
    try:
        givens = Signature.from_text(givens_line.value)
    except RankError as e:
        raise givens_line.invalid(str(e)) from e
    heads = {}
    for line in _all(lines, "define"):
        head, body_text, offset = _split_at(line, "=")
        m = _DEFINITION_HEAD.match(head)
        if not m:
            raise line.syntax_error("Expected 'name(params) = body'")
        name = m.group("name")
        params = [p.strip() for p in (m.group("params") or "").split(",") if p.strip()]
        if name in heads:
            raise line.invalid(f"Duplicate definition of {name}")
        if len(set(params)) != len(params):
            raise line.invalid(f"Repeated parameter in {name}")
        heads[name] = (tuple(params), body_text, offset, line)
    symbols = {**givens.symbols, **{name: len(h[0]) for name, h in heads.items()}}
    bodies = {}
    for name, (params, body_text, offset, line) in heads.items():
        try:
            bodies[name] = parse_term(body_text, symbols)
        except TermSyntaxError as e:
            raise line.syntax_error(e.message, offset + e.column - 1) from e
        except RankError as e:
            raise line.invalid(str(e)) from e
    try:
        return Scheme(givens=givens, params={n: h[0] for n, h in heads.items()}, body=bodies)
    except GuardednessError as e:
        raise heads[e.path[0]][3].invalid(str(e)) from e
    except RankError as e:
        raise DocumentValidationError(str(e)) from e


def _parse_wfa(lines: List[_Line]) -> WeightedAutomaton:
    S = _semiring(lines)
    alphabet = _single(lines, "alphabet").value.split()
    states = _names(_single(lines, "states"))
    outputs = {}
    for line in _all(lines, "output"):
        parts = line.value.split()
        if len(parts) != 2:
            raise line.syntax_error("Expected 'state weight'")
        if parts[0] not in states:
            raise line.invalid(f"Unknown state '{parts[0]}'")
        if parts[0] in outputs:
            raise line.invalid(f"Duplicate output for {parts[0]}")
        outputs[parts[0]] = _element(line, S, parts[1])
    table = {}
    for line in _all(lines, "trans"):
        lhs, rhs, offset = _split_at(line, "->")
        parts = lhs.split()
        if len(parts) != 2:
            raise line.syntax_error("Expected 'state letter -> combination of states'")
        s, a = parts
        if s not in states:
            raise line.invalid(f"Unknown state '{s}'")
        if a not in alphabet:
            raise line.invalid(f"Letter '{a}' is not in the alphabet")
        if (s, a) in table:
            raise line.invalid(f"Duplicate transition for {s} {a}")
        table[(s, a)] = _polynomial(line, rhs, offset, S, states)
    try:
        return WeightedAutomaton(semiring=S, states=tuple(states), alphabet=tuple(alphabet),
                                 output=outputs, transition=table)
    except (ValueError, KeyError) as e:
        raise DocumentValidationError(e.args[0]) from e


_PARSERS = {
    DocumentKind.NFA: _parse_nfa,
    DocumentKind.GRAMMAR: _parse_grammar,
    DocumentKind.STACK_MACHINE: _parse_stack_machine,
    DocumentKind.SCHEME: _parse_scheme,
    DocumentKind.WFA: _parse_wfa,
}


def parse_document(text: str) -> Document:
    """Parse and validate; raises DocumentSyntaxError or DocumentValidationError."""
    kind, lines = _split_lines(text)
    body = _PARSERS[kind](lines)
    logger.debug(f"Parsed {kind.value} document with {len(lines)} lines")
    return Document(kind=kind, body=body)


def load_document(path: Union[str, Path]) -> Document:
    text = Path(path).read_text(encoding="utf-8")
    doc = parse_document(text)
    logger.info(f"Loaded {doc.kind.value} document from {path}")
    return doc


# ============================================================
# PRINTING
# ============================================================

def _format_nfa(n: Nfa) -> List[str]:
    out = [
        f"alphabet: {' '.join(n.alphabet)}",
        f"states: {' '.join(map(str, n.states))}",
        f"accepting: {' '.join(str(s) for s in n.states if s in n.accepting)}".rstrip(),
    ]
    for s in n.states:
        for a in n.alphabet:
            out.append(f"trans: {s} {a} -> {' '.join(map(str, n.transition[(s, a)]))}".rstrip())
    return out


def _format_grammar(G: WeightedGrammar) -> List[str]:
    S = G.semiring
    out = [
        f"semiring: {S.name}",
        f"nonterminals: {' '.join(G.nonterminals)}",
        f"terminals: {' '.join(_quote(a) for a in G.terminals)}",
    ]
    out.extend(f"output: {x} {S.format_element(G.output[x])}"
               for x in G.nonterminals if not S.is_zero(G.output[x]))
    out.extend(f"rule: {x} {_quote(a)} -> {format_polynomial(G.rule[(x, a)])}"
               for x in G.nonterminals for a in G.terminals if not G.rule[(x, a)].is_zero())
    return out


def _format_predicate(q, p: StackPredicate) -> str:
    words = sorted(p.accept_short) + sorted(p.accept_k)
    return f"accept: {q} {p.lookahead} : {' '.join(format_stack_word(w) for w in words)}".rstrip()


def _format_stack_machine(m) -> List[str]:
    out = [
        f"mode: {'deterministic' if m.deterministic else 'nondeterministic'}",
        f"alphabet: {' '.join(m.alphabet)}",
        f"stack: {' '.join(m.stack_alphabet)}",
        f"states: {' '.join(map(str, m.states))}",
    ]
    out.extend(_format_predicate(q, m.output[q]) for q in m.states)
    for q in m.states:
        for a in m.alphabet:
            if m.deterministic:
                act = m.transition[(q, a)]
                for w, (r, replacement) in act.at_short + act.at_k:
                    out.append(f"act: {q} {a} {act.lookahead} : {format_stack_word(w)} -> "
                               f"{r} {format_stack_word(replacement)}")
            else:
                for c in m.clauses[(q, a)]:
                    out.append(f"clause: {q} {a} : {format_stack_word(c.pattern)} -> "
                               f"{c.target} {format_stack_word(c.replacement)}")
    return out


def _format_scheme(s: Scheme) -> List[str]:
    out = [f"givens: {s.givens}"]
    for name, params in s.params.items():
        head = f"{name}({', '.join(params)})" if params else name
        out.append(f"define: {head} = {format_tree(s.body[name])}")
    return out


def _format_wfa(A: WeightedAutomaton) -> List[str]:
    S = A.semiring
    out = [
        f"semiring: {S.name}",
        f"alphabet: {' '.join(A.alphabet)}",
        f"states: {' '.join(A.states)}",
    ]
    out.extend(f"output: {s} {S.format_element(A.output[s])}" for s in A.states if not S.is_zero(A.output[s]))
    out.extend(f"trans: {s} {a} -> {format_polynomial(A.transition[(s, a)])}"
               for s in A.states for a in A.alphabet if not A.transition[(s, a)].is_zero())
    return out


_FORMATTERS = {
    DocumentKind.NFA: _format_nfa,
    DocumentKind.GRAMMAR: _format_grammar,
    DocumentKind.STACK_MACHINE: _format_stack_machine,
    DocumentKind.SCHEME: _format_scheme,
    DocumentKind.WFA: _format_wfa,
}


def format_document(doc: Document) -> str:
    """Canonical text of a document; parse_document reads it back to an equal body."""
    lines = [f"#kind {doc.kind.value}"] + _FORMATTERS[doc.kind](doc.body)
    return "\n".join(lines) + "\n"
