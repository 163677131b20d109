"""
Weighted context-free grammars as coalgebras c: X -> S x S<X+Σ>^Σ.

Two determinizations are offered: the derivative engine ``grammar_step``
(output multiplicative on words, product rule with the literal suffix) and
the generalized powerset construction ``pointed_step`` that multiplies the
S-algebra structure on S x A^Σ (fuse, lifted multiplication, Σ-pointing).
Both have the same behaviours. Grammars whose rule bodies contain no
terminals can also be determinized inside S<X>, without the pointing.
"""
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from src.algebra import (
    BOOLEAN,
    EMPTY_WORD,
    GeneratorTag,
    Polynomial,
    PolynomialMonad,
    Semiring,
    UnboundGeneratorError,
    poly_add,
    poly_mul,
    poly_scale,
    poly_sum,
    poly_unit,
    term,
    var,
)
from src.kernel import (
    BehaviourQuery,
    DeterminizedSystem,
    EffectInterface,
    MonadicMooreSystem,
    behaviour_at,
    behaviours_up_to,
)

logger = logging.getLogger(__name__)

DEFAULT_ORACLE_BOUND = 12


class OracleBoundError(ValueError):
    """Raised when the derivation oracle is asked about a word that is too long."""


class NotGreibachableError(ValueError):
    """Raised when a production alternative starts with a nonterminal."""


# ============================================================
# GRAMMARS
# ============================================================

@dataclass(frozen=True)
class WeightedGrammar:
    """
    A grammar given by its derivatives: ``rule[(x, a)]`` is the a-derivative
    of nonterminal x, ``output[x]`` its constant term. Missing entries are
    zero.
    """
    semiring: Semiring
    nonterminals: Tuple[str, ...]
    terminals: Tuple[str, ...]
    output: Mapping[str, Any] = field(default_factory=dict)
    rule: Mapping[Tuple[str, str], Polynomial] = field(default_factory=dict)

    def __post_init__(self):
        S = self.semiring
        PolynomialMonad(S)
        object.__setattr__(self, "nonterminals", tuple(sorted(set(self.nonterminals))))
        object.__setattr__(self, "terminals", tuple(sorted(set(self.terminals))))
        if set(self.nonterminals) & set(self.terminals):
            logger.debug("Nonterminal and terminal names overlap; they stay distinct generators")
        unknown = set(self.output) - set(self.nonterminals)
        if unknown:
            raise ValueError(f"Output given for undeclared nonterminals {sorted(unknown)}")
        outputs = {}
        for x in self.nonterminals:
            value = self.output.get(x, S.zero)
            if not S.contains(value):
                raise ValueError(f"Output of {x} is not an element of {S.name}")
            outputs[x] = value
        rules = {}
        for (x, a), p in self.rule.items():
            if x not in self.nonterminals or a not in self.terminals:
                raise ValueError(f"Rule for undeclared pair ({x}, '{a}')")
            if p.semiring.name != S.name:
                raise ValueError(f"Rule ({x}, '{a}') is over {p.semiring.name}, expected {S.name}")
            self.check_generators(p)
        for x in self.nonterminals:
            for a in self.terminals:
                rules[(x, a)] = self.rule.get((x, a), Polynomial.zero(S))
        object.__setattr__(self, "output", outputs)
        object.__setattr__(self, "rule", rules)

    @property
    def generators(self) -> FrozenSet[GeneratorTag]:
        return frozenset(var(x) for x in self.nonterminals) | frozenset(term(a) for a in self.terminals)

    def check_generators(self, p: Polynomial):
        stray = p.generators() - self.generators
        if stray:
            raise UnboundGeneratorError(f"Undeclared generators {sorted(str(g) for g in stray)}")

    @property
    def is_rules_only(self) -> bool:
        """True when no rule body mentions a terminal (c: X -> S x S<X>^Σ)."""
        return all(p.is_variables_only() for p in self.rule.values())

    def start(self, name: str) -> Polynomial:
        """The start polynomial 1*x for a nonterminal name."""
        if name not in self.nonterminals:
            raise UnboundGeneratorError(f"Unknown nonterminal {name}")
        return poly_unit(var(name), self.semiring)


# ============================================================
# THE LIFTED S-ALGEBRA ON S x A^Σ
# ============================================================

@dataclass(frozen=True)
class LiftedPair:
    """An element (o, δ) of S x A^Σ with A = S<X+Σ>; δ is total on Σ."""
    semiring: Semiring
    out: Any
    deriv: Tuple[Tuple[str, Polynomial], ...]

    @classmethod
    def of(cls, semiring: Semiring, out, deriv: Mapping[str, Polynomial], alphabet: Iterable[str]):
        table = tuple((a, deriv.get(a, Polynomial.zero(semiring))) for a in sorted(set(alphabet)))
        return cls(semiring=semiring, out=out, deriv=table)

    @property
    def alphabet(self) -> Tuple[str, ...]:
        return tuple(a for a, _ in self.deriv)

    def derivative(self, a: str) -> Polynomial:
        for b, p in self.deriv:
            if b == a:
                return p
        raise KeyError(a)


def zero_pair(S: Semiring, alphabet: Iterable[str]) -> LiftedPair:
    return LiftedPair.of(S, S.zero, {}, alphabet)


def unit_pair(S: Semiring, alphabet: Iterable[str]) -> LiftedPair:
    return LiftedPair.of(S, S.one, {}, alphabet)


def pointing(S: Semiring, alphabet: Iterable[str], a: str) -> LiftedPair:
    """The Σ-pointing a -> (0, ρ_a)."""
    return LiftedPair.of(S, S.zero, {a: Polynomial.one(S)}, alphabet)


def _check_pairs(p: LiftedPair, q: LiftedPair):
    if p.semiring.name != q.semiring.name or p.alphabet != q.alphabet:
        raise ValueError("Lifted pairs over different semirings or alphabets")


def fuse(p: LiftedPair, G: Optional[WeightedGrammar] = None) -> Polynomial:
    """<o, δ> = o·ε + Σ_b b·δ(b)."""
    S = p.semiring
    if G is not None and tuple(G.terminals) != p.alphabet:
        raise ValueError("Lifted pair and grammar use different alphabets")
    pieces = [Polynomial.constant(S, p.out)]
    pieces.extend(poly_mul(poly_unit(term(b), S), d) for b, d in p.deriv)
    return poly_sum(S, pieces)


def lift_add(p: LiftedPair, q: LiftedPair) -> LiftedPair:
    _check_pairs(p, q)
    S = p.semiring
    return LiftedPair(S, S.add(p.out, q.out),
                      tuple((a, poly_add(d, e)) for (a, d), (_, e) in zip(p.deriv, q.deriv)))


def lift_scale(s, p: LiftedPair) -> LiftedPair:
    S = p.semiring
    return LiftedPair(S, S.mul(s, p.out), tuple((a, poly_scale(s, d)) for a, d in p.deriv))


def lift_mul(p: LiftedPair, q: LiftedPair, fused: Optional[Polynomial] = None) -> LiftedPair:
    """
    (o1,δ1)*(o2,δ2) = (o1·o2, a -> δ1(a)·<o2,δ2> + i(o1)·δ2(a)).

    ``fused`` stands in for <o2,δ2> when the caller knows a smaller
    polynomial with the same behaviour.
    """
    _check_pairs(p, q)
    S = p.semiring
    if fused is None:
        fused = fuse(q)
    return LiftedPair(S, S.mul(p.out, q.out), tuple(
        (a, poly_add(poly_mul(d1, fused), poly_scale(p.out, d2)))
        for (a, d1), (_, d2) in zip(p.deriv, q.deriv)
    ))


# ============================================================
# DETERMINIZATIONS
# ============================================================

def _generator_output(G: WeightedGrammar, g: GeneratorTag):
    if g.is_variable:
        if g.id not in G.output:
            raise UnboundGeneratorError(f"Unknown nonterminal {g}")
        return G.output[g.id]
    if g.id not in G.terminals:
        raise UnboundGeneratorError(f"Unknown terminal {g}")
    return G.semiring.zero


def _generator_derivative(G: WeightedGrammar, g: GeneratorTag, a: str) -> Polynomial:
    S = G.semiring
    if g.is_variable:
        if g.id not in G.output:
            raise UnboundGeneratorError(f"Unknown nonterminal {g}")
        return G.rule[(g.id, a)]
    if g.id not in G.terminals:
        raise UnboundGeneratorError(f"Unknown terminal {g}")
    return Polynomial.one(S) if g.id == a else Polynomial.zero(S)


def grammar_output(G: WeightedGrammar, v: Polynomial):
    """ô: multiplicative on words, linear on sums."""
    S = G.semiring
    return S.sum(S.mul(c, S.prod(_generator_output(G, g) for g in w)) for w, c in v.items())


def grammar_derivative(G: WeightedGrammar, v: Polynomial, a: str) -> Polynomial:
    """
    δ̂(v, a) by the product rule δ̂(g·u, a) = δ̂(g, a)·u + ô(g)·δ̂(u, a),
    unrolled along each word.
    """
    S = G.semiring
    if a not in G.terminals:
        raise UnboundGeneratorError(f"Unknown letter '{a}'")
    terms: List[Tuple[tuple, Any]] = []
    for w, c in v.items():
        prefix_out = c
        for i, g in enumerate(w):
            d = _generator_derivative(G, g, a)
            suffix = w[i + 1:]
            terms.extend((u + suffix, S.mul(prefix_out, e)) for u, e in d.items())
            prefix_out = S.mul(prefix_out, _generator_output(G, g))
            if S.is_zero(prefix_out):
                break
    return Polynomial(S, terms)


def grammar_step(G: WeightedGrammar, v: Polynomial) -> LiftedPair:
    """The determinized coalgebra ĉ(v) = (ô(v), a -> δ̂(v, a))."""
    G.check_generators(v)
    return LiftedPair(G.semiring, grammar_output(G, v),
                      tuple((a, grammar_derivative(G, v, a)) for a in G.terminals))


def pointed_step(G: WeightedGrammar, v: Polynomial, collect: bool = False) -> LiftedPair:
    """
    c#(v) from the generalized powerset construction: the unique
    S-algebra map extending c on variables and the pointing on terminals,
    multiplied with ``lift_mul``.

    Each factor g after the first enters the derivatives as <c#(g)>, which
    for a nonterminal is its whole unfolded rule set. With ``collect`` that
    fused image is written back as the nonterminal itself (the two have the
    same behaviour), so carriers stay as small as the derivative engine's.
    """
    G.check_generators(v)
    S = G.semiring
    images: Dict[GeneratorTag, LiftedPair] = {}

    def image(g: GeneratorTag) -> LiftedPair:
        if g not in images:
            if g.is_variable:
                images[g] = LiftedPair.of(S, G.output[g.id],
                                          {a: G.rule[(g.id, a)] for a in G.terminals}, G.terminals)
            else:
                images[g] = pointing(S, G.terminals, g.id)
        return images[g]

    def fused(g: GeneratorTag) -> Optional[Polynomial]:
        return poly_unit(g, S) if collect and g.is_variable else None

    total = zero_pair(S, G.terminals)
    for w, c in v.items():
        acc = unit_pair(S, G.terminals)
        for g in w:
            acc = lift_mul(acc, image(g), fused(g))
        total = lift_add(total, lift_scale(c, acc))
    return total


def _polynomial_effect(G: WeightedGrammar) -> EffectInterface:
    return EffectInterface(name=f"S<X+Σ> over {G.semiring.name}",
                           unit=lambda x: poly_unit(var(x), G.semiring))


def as_system(G: WeightedGrammar) -> MonadicMooreSystem:
    return MonadicMooreSystem(
        states=G.nonterminals,
        alphabet=G.terminals,
        output=dict(G.output),
        transition=dict(G.rule),
        effect=_polynomial_effect(G),
    )


def grammar_determinize(G: WeightedGrammar, mode: str = "derivative") -> DeterminizedSystem:
    """
    The determinized system on S<X+Σ>.

    ``derivative`` uses the product rule, ``powerset`` the pointed step
    (computed once per value), ``rules`` the product rule restricted to S<X>
    for grammars without terminals in their rule bodies.
    """
    if mode == "derivative":
        def lifted_transition(v, a):
            return grammar_derivative(G, v, a)

        def lifted_output(v):
            return grammar_output(G, v)
    elif mode == "powerset":
        @lru_cache(maxsize=None)
        def step(v: Polynomial) -> LiftedPair:
            return pointed_step(G, v, collect=True)

        def lifted_transition(v, a):
            return step(v).derivative(a)

        def lifted_output(v):
            return step(v).out
    elif mode == "rules":
        if not G.is_rules_only:
            raise ValueError("Mode 'rules' needs a grammar whose rule bodies have no terminals")

        def lifted_transition(v, a):
            if not v.is_variables_only():
                raise UnboundGeneratorError(f"{v} is not a polynomial over the nonterminals")
            return grammar_derivative(G, v, a)

        def lifted_output(v):
            return grammar_output(G, v)
    else:
        raise ValueError(f"Unknown determinization mode '{mode}'")
    return DeterminizedSystem(base=as_system(G), lifted_output=lifted_output,
                              lifted_transition=lifted_transition)


def coefficient(G: WeightedGrammar, start: Polynomial, w: Sequence[str]):
    """Coefficient of w in the series denoted by ``start``."""
    G.check_generators(start)
    return behaviour_at(BehaviourQuery(grammar_determinize(G), start, tuple(w)))


def series_up_to(G: WeightedGrammar, start: Polynomial, max_len: int,
                 mode: str = "derivative") -> Dict[Tuple[str, ...], Any]:
    """Nonzero coefficients on words of length <= max_len, length-lex ordered."""
    G.check_generators(start)
    table = behaviours_up_to(grammar_determinize(G, mode), start, max_len)
    return {w: c for w, c in table.items() if not G.semiring.is_zero(c)}


# ============================================================
# DERIVATION ORACLE
# ============================================================

def productions(G: WeightedGrammar) -> Dict[str, List[Tuple[tuple, Any]]]:
    """x -> ε with weight output(x) and x -> b·u with weight rule(x,b)(u)."""
    S = G.semiring
    table: Dict[str, List[Tuple[tuple, Any]]] = {}
    for x in G.nonterminals:
        alternatives = []
        if not S.is_zero(G.output[x]):
            alternatives.append((EMPTY_WORD, G.output[x]))
        for b in G.terminals:
            alternatives.extend(((term(b),) + u, c) for u, c in G.rule[(x, b)].items())
        table[x] = alternatives
    return table


def oracle_coefficient(G: WeightedGrammar, start: Polynomial, w: Sequence[str],
                       bound: int = DEFAULT_ORACLE_BOUND):
    """
    Sum over all leftmost derivations from ``start`` to w of the product of
    production weights. Sentential forms whose terminal count exceeds what
    is left of w are pruned; every non-ε production emits a terminal, so the
    search is finite.
    """
    w = tuple(w)
    if len(w) > bound:
        raise OracleBoundError(f"Word of length {len(w)} exceeds the oracle bound {bound}")
    G.check_generators(start)
    S = G.semiring
    table = productions(G)
    n = len(w)
    memo: Dict[Tuple[tuple, int], Any] = {}

    def count(form: tuple, pos: int):
        key = (form, pos)
        if key in memo:
            return memo[key]
        if not form:
            result = S.one if pos == n else S.zero
        elif sum(1 for g in form if g.is_terminal) > n - pos:
            result = S.zero
        else:
            head, rest = form[0], form[1:]
            if head.is_terminal:
                result = count(rest, pos + 1) if pos < n and w[pos] == head.id else S.zero
            else:
                result = S.zero
                for body, weight in table[head.id]:
                    if not body:
                        result = S.add(result, S.mul(weight, count(rest, pos)))
                    elif pos < n and body[0].id == w[pos]:
                        result = S.add(result, S.mul(weight, count(body[1:] + rest, pos + 1)))
        memo[key] = result
        return result

    return S.sum(S.mul(c, count(u, 0)) for u, c in start.items())


# ============================================================
# FRONT-END TRANSLATIONS
# ============================================================

def grammar_from_productions(S: Semiring, nonterminals: Iterable[str], terminals: Iterable[str],
                             prods: Mapping[str, Polynomial]) -> WeightedGrammar:
    """
    Translate x -> p (p a polynomial whose terms are ε or start with a
    terminal) into output and derivative rules.
    """
    nonterminals = tuple(nonterminals)
    terminals = tuple(terminals)
    output: Dict[str, Any] = {}
    rule_terms: Dict[Tuple[str, str], list] = {}
    for x, p in prods.items():
        for w, c in p.items():
            if not w:
                output[x] = S.add(output.get(x, S.zero), c)
            elif w[0].is_terminal:
                rule_terms.setdefault((x, w[0].id), []).append((w[1:], c))
            else:
                raise NotGreibachableError(
                    f"Alternative of {x} starts with nonterminal {w[0]}; rewrite it to start with a terminal"
                )
    rules = {key: Polynomial(S, ts) for key, ts in rule_terms.items()}
    return WeightedGrammar(semiring=S, nonterminals=nonterminals, terminals=terminals,
                           output=output, rule=rules)


def grammar_productions(G: WeightedGrammar) -> Dict[str, Polynomial]:
    """Inverse of ``grammar_from_productions``: x -> fuse(c(x))."""
    return {x: fuse(pointed_step(G, G.start(x)), G) for x in G.nonterminals}


def nonterminal_name(state) -> str:
    """A state as a nonterminal name usable in polynomial text (0 becomes q0)."""
    name = str(state)
    return name if name.isidentifier() else f"q{name}"


def grammar_from_nfa(n) -> WeightedGrammar:
    """Right-linear encoding over B: one nonterminal per state."""
    names: Dict[Any, str] = {}
    owner: Dict[str, Any] = {}
    for s in n.states:
        name = nonterminal_name(s)
        if name in owner:
            raise ValueError(f"States {owner[name]!r} and {s!r} both become nonterminal {name}")
        names[s], owner[name] = name, s
    rules = {
        (names[s], a): Polynomial(BOOLEAN, [((var(names[t]),), 1) for t in n.transition[(s, a)]])
        for s in n.states for a in n.alphabet
    }
    return WeightedGrammar(
        semiring=BOOLEAN,
        nonterminals=tuple(names.values()),
        terminals=n.alphabet,
        output={names[s]: int(s in n.accepting) for s in n.states},
        rule=rules,
    )


def start_polynomial(S: Semiring, names: Iterable[str]) -> Polynomial:
    """1*x + 1*y + ... for the given nonterminals."""
    return poly_sum(S, [poly_unit(var(x), S) for x in names])


# ============================================================
# CYK
# ============================================================

@dataclass(frozen=True)
class CnfGrammar:
    """A grammar in Chomsky normal form: A -> B C | a, plus S -> ε if allowed."""
    start: str
    unary: Mapping[str, FrozenSet[str]]
    binary: Mapping[str, FrozenSet[Tuple[str, str]]]
    accepts_empty: bool = False


def cyk_recognize(g: CnfGrammar, word: Sequence[str]) -> bool:
    n = len(word)
    if n == 0:
        return g.accepts_empty
    # table[i][l] holds the nonterminals deriving word[i:i+l]
    table = [[set() for _ in range(n + 1)] for _ in range(n)]
    for i, a in enumerate(word):
        table[i][1] = {x for x, letters in g.unary.items() if a in letters}
    for length in range(2, n + 1):
        for i in range(n - length + 1):
            cell = table[i][length]
            for split in range(1, length):
                lhs, rhs = table[i][split], table[i + split][length - split]
                if not lhs or not rhs:
                    continue
                for x, pairs in g.binary.items():
                    if x not in cell and any(b in lhs and c in rhs for b, c in pairs):
                        cell.add(x)
    return g.start in table[0][n]
