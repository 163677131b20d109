"""
Command-line front end: membership, coefficients, equivalence, unfolding
and enumeration over documents (see src.documents).

Exit status: 0 on success, 1 for rejected/distinguished/inconclusive
answers, 2 for input errors.
"""
import argparse
import logging
import re
import sys
from typing import Any, List, Optional, Sequence, Tuple

from src.algebra import Polynomial, parse_polynomial
from src.cfg import coefficient, grammar_determinize
from src.documents import Document, DocumentError, DocumentKind, format_stack_word, load_document, parse_stack_word
from src.kernel import (
    DEFAULT_BUDGET,
    DEFAULT_DEPTH,
    BehaviourQuery,
    BudgetExceeded,
    CounterexampleWord,
    DeterminizedSystem,
    Equal,
    behaviour_at,
    behaviours_up_to,
    bisim_decide,
    disjoint_union,
    equiv_bounded,
    left,
    right,
)
from src.nfa import nfa_determinize, nfa_equiv, state_set
from src.reports import language_growth, series_table
from src.rps import prefix_equal, subtree_census, format_tree, unfold
from src.stack import Configuration, StackAction, StackPredicate, language_probe, run, stack_determinize
from src.utils import configure_logging, format_input_word, parse_input_word, save_dataframe
from src.weighted import wfa_determinize

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT_ERROR = 2


# ============================================================
# START VALUES
# ============================================================

def _names(text: str) -> List[str]:
    return [t for t in re.split(r"[\s,]+", text.strip()) if t]


def _start_states(states: Sequence, text: str) -> Tuple:
    chosen = _names(text)
    unknown = [s for s in chosen if s not in states]
    if unknown:
        raise ValueError(f"Unknown states {unknown}; available: {list(map(str, states))}")
    return state_set(chosen)


def _start_polynomial(doc: Document, text: str) -> Polynomial:
    body = doc.body
    names = body.nonterminals if doc.kind is DocumentKind.GRAMMAR else body.states
    p = parse_polynomial(text, body.semiring, names)
    if doc.kind is DocumentKind.GRAMMAR:
        body.check_generators(p)
    elif p.terminals():
        raise ValueError("A weighted automaton start vector cannot mention terminals")
    return p


def _start_state(m, text: str):
    if text not in m.states:
        raise ValueError(f"Unknown state '{text}'; available: {list(map(str, m.states))}")
    return text


def _stack(text: Optional[str]) -> Tuple[str, ...]:
    if text is None:
        return ()
    if "." in text or text.strip() in ("", "-", "ε"):
        return parse_stack_word(text)
    return tuple(text.strip())


def _behaviour_system(doc: Document, start_text: str, mode: str = "derivative") -> Tuple[DeterminizedSystem, Any]:
    if doc.kind is DocumentKind.NFA:
        return nfa_determinize(doc.body), _start_states(doc.body.states, start_text)
    if doc.kind is DocumentKind.GRAMMAR:
        return grammar_determinize(doc.body, mode), _start_polynomial(doc, start_text)
    if doc.kind is DocumentKind.WFA:
        return wfa_determinize(doc.body), _start_polynomial(doc, start_text)
    if doc.kind is DocumentKind.STACK_MACHINE and doc.body.deterministic:
        m = doc.body
        return stack_determinize(m), StackAction.unit(m.stack_alphabet, _start_state(m, start_text))
    raise ValueError(f"A {doc.kind.value} document has no determinized behaviour")


def format_value(v) -> str:
    if isinstance(v, StackPredicate):
        words = sorted(v.accept_short) + sorted(v.accept_k)
        return f"[k={v.lookahead}: {' '.join(format_stack_word(w) for w in words) or 'none'}]"
    return str(v)


# ============================================================
# COMMANDS
# ============================================================

def cmd_member(args) -> int:
    doc = load_document(args.file)
    word = parse_input_word(args.word)
    if doc.kind is DocumentKind.STACK_MACHINE:
        m = doc.body
        result = run(m, Configuration(_start_state(m, args.start), _stack(args.stack)), word)
        accepted = result.accepted
        logger.info(f"Run ended in {len(result.configurations)} configurations")
    elif doc.kind is DocumentKind.SCHEME:
        raise ValueError("member is not defined for scheme documents; use unfold")
    else:
        system, start = _behaviour_system(doc, args.start)
        value = behaviour_at(BehaviourQuery(system, start, word))
        accepted = not doc.body.semiring.is_zero(value) if doc.kind is not DocumentKind.NFA else bool(value)
    print("accept" if accepted else "reject")
    return EXIT_OK if accepted else EXIT_NEGATIVE


def cmd_coeff(args) -> int:
    doc = load_document(args.file)
    word = parse_input_word(args.word)
    if doc.kind is DocumentKind.GRAMMAR and args.mode == "derivative":
        value = coefficient(doc.body, _start_polynomial(doc, args.start), word)
    elif doc.kind in (DocumentKind.NFA, DocumentKind.GRAMMAR, DocumentKind.WFA):
        system, start = _behaviour_system(doc, args.start, args.mode)
        value = behaviour_at(BehaviourQuery(system, start, word))
    else:
        raise ValueError(f"coeff is not defined for {doc.kind.value} documents")
    print(format_value(value))
    return EXIT_OK


def _report_verdict(verdict, exact: bool) -> int:
    if isinstance(verdict, Equal):
        if exact:
            print(f"equivalent (bisimulation of size {verdict.size})")
        else:
            print(f"equivalent up to depth {verdict.depth} ({verdict.size} pairs explored)")
        return EXIT_OK
    if isinstance(verdict, CounterexampleWord):
        print(f"distinguished by {format_input_word(verdict.word)} "
              f"({format_value(verdict.left)} vs {format_value(verdict.right)})")
        return EXIT_NEGATIVE
    if isinstance(verdict, BudgetExceeded):
        print(f"inconclusive (budget exceeded after {verdict.explored} pairs)")
        return EXIT_NEGATIVE
    print(f"distinguished at {verdict}")
    return EXIT_NEGATIVE


def cmd_equiv(args) -> int:
    doc_a = load_document(args.file_a)
    doc_b = load_document(args.file_b)
    if DocumentKind.SCHEME in (doc_a.kind, doc_b.kind):
        if doc_a.kind is not doc_b.kind:
            raise ValueError("A scheme can only be compared with another scheme")
        if args.exact:
            raise ValueError("Schemes are compared up to a depth only; drop --exact")
        depth = DEFAULT_DEPTH if args.depth is None else args.depth
        verdict = prefix_equal(doc_a.body, doc_a.body.parse(args.start_a),
                               doc_b.body, doc_b.body.parse(args.start_b), depth)
        if isinstance(verdict, Equal):
            print(f"equal up to depth {depth}")
            return EXIT_OK
        return _report_verdict(verdict, exact=False)

    if args.exact and doc_a.kind is DocumentKind.NFA and doc_b.kind is DocumentKind.NFA:
        verdict = nfa_equiv(doc_a.body, _start_states(doc_a.body.states, args.start_a),
                            doc_b.body, _start_states(doc_b.body.states, args.start_b))
        return _report_verdict(verdict, exact=True)

    sys_a, start_a = _behaviour_system(doc_a, args.start_a)
    sys_b, start_b = _behaviour_system(doc_b, args.start_b)
    system = disjoint_union(sys_a, sys_b)
    if args.exact:
        verdict = bisim_decide(system, left(start_a), right(start_b), state_budget=args.budget)
    else:
        depth = DEFAULT_DEPTH if args.depth is None else args.depth
        verdict = equiv_bounded(system, left(start_a), right(start_b), depth=depth)
    return _report_verdict(verdict, exact=args.exact)


def cmd_unfold(args) -> int:
    doc = load_document(args.file)
    if doc.kind is not DocumentKind.SCHEME:
        raise ValueError(f"unfold needs a scheme document, got {doc.kind.value}")
    prefix = unfold(doc.body, doc.body.parse(args.root), args.depth)
    print(format_tree(prefix))
    print(f"census: {subtree_census(prefix)}")
    return EXIT_OK


def cmd_enumerate(args) -> int:
    doc = load_document(args.file)
    if doc.kind is DocumentKind.SCHEME:
        raise ValueError("enumerate is not defined for scheme documents; use unfold")

    weighted = doc.kind in (DocumentKind.GRAMMAR, DocumentKind.WFA)
    if doc.kind is DocumentKind.STACK_MACHINE:
        m = doc.body
        words = language_probe(m, Configuration(_start_state(m, args.start), _stack(args.stack)), args.max_len)
        series = {w: 1 for w in words}
    else:
        system, start = _behaviour_system(doc, args.start, args.mode)
        table = behaviours_up_to(system, start, args.max_len)
        if weighted:
            series = {w: v for w, v in table.items() if not doc.body.semiring.is_zero(v)}
        else:
            series = {w: v for w, v in table.items() if v}

    for w, v in series.items():
        print(f"{format_input_word(w)}\t{format_value(v)}" if weighted else format_input_word(w))

    if args.csv and not save_dataframe(series_table(series), args.csv, "Enumerated words"):
        raise OSError(f"could not write {args.csv}")
    if args.plot:
        from src.visualization import BehaviourVisualizer
        visualizer = BehaviourVisualizer()
        if weighted:
            visualizer.plot_coefficient_series(series_table(series), save_path=args.plot)
        else:
            visualizer.plot_language_growth(language_growth(series, args.max_len), save_path=args.plot)
    return EXIT_OK


# ============================================================
# PARSER
# ============================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="behaviours",
        description="Membership, coefficients and equivalence for automata, grammars, stack machines and schemes",
    )
    parser.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="log level (logs go to stderr)")
    sub = parser.add_subparsers(dest="command", required=True)

    member = sub.add_parser("member", help="accept or reject a word")
    member.add_argument("file")
    member.add_argument("--start", required=True, help="start states, start polynomial or start state")
    member.add_argument("--word", required=True, help="a.b.c, abc, or '' for the empty word")
    member.add_argument("--stack", help="initial stack, top first (stack machines)")
    member.set_defaults(handler=cmd_member)

    coeff = sub.add_parser("coeff", help="coefficient of a word")
    coeff.add_argument("file")
    coeff.add_argument("--start", required=True)
    coeff.add_argument("--word", required=True)
    coeff.add_argument("--mode", choices=["derivative", "powerset", "rules"], default="derivative",
                       help="grammar determinization")
    coeff.set_defaults(handler=cmd_coeff)

    equiv = sub.add_parser("equiv", help="compare two behaviours")
    equiv.add_argument("file_a")
    equiv.add_argument("file_b")
    equiv.add_argument("--start-a", required=True)
    equiv.add_argument("--start-b", required=True)
    bound = equiv.add_mutually_exclusive_group()
    bound.add_argument("--depth", type=int, help=f"compare words up to this length (default {DEFAULT_DEPTH})")
    bound.add_argument("--exact", action="store_true", help="search for a bisimulation")
    equiv.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="pair budget for --exact")
    equiv.set_defaults(handler=cmd_equiv)

    unfold_cmd = sub.add_parser("unfold", help="unfold a scheme to a finite prefix")
    unfold_cmd.add_argument("file")
    unfold_cmd.add_argument("--root", required=True)
    unfold_cmd.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    unfold_cmd.set_defaults(handler=cmd_unfold)

    enum_cmd = sub.add_parser("enumerate", help="list behaviours on all short words")
    enum_cmd.add_argument("file")
    enum_cmd.add_argument("--start", required=True)
    enum_cmd.add_argument("--max-len", type=int, default=DEFAULT_DEPTH)
    enum_cmd.add_argument("--stack", help="initial stack, top first (stack machines)")
    enum_cmd.add_argument("--mode", choices=["derivative", "powerset", "rules"], default="derivative")
    enum_cmd.add_argument("--csv", help="also write the words to this CSV file")
    enum_cmd.add_argument("--plot", help="also plot the growth (or coefficients) to this image")
    enum_cmd.set_defaults(handler=cmd_enumerate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.handler(args)
    except (DocumentError, ValueError, KeyError, OSError) as e:
        message = e.args[0] if isinstance(e, KeyError) and e.args else str(e)
        logger.debug("Command failed", exc_info=True)
        print(f"error: {message}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
