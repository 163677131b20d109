"""
Semirings, words and the polynomial monad S<X> used as the effect of
weighted grammars and weighted automata.
"""
import enum
import logging
import operator
import re
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Tuple

logger = logging.getLogger(__name__)


class SemiringMismatchError(ValueError):
    """Raised when two values over different semirings are combined."""


class NonCommutativeSemiringError(ValueError):
    """Raised when a monad is requested over a non-commutative semiring."""


class UnboundGeneratorError(KeyError):
    """Raised when a substitution misses a variable of the polynomial."""


class PolynomialSyntaxError(ValueError):
    """Raised for malformed polynomial text."""

    def __init__(self, message: str, column: int = 0):
        super().__init__(f"{message} (column {column})")
        self.column = column
        self.message = message


# ============================================================
# SEMIRINGS
# ============================================================

@dataclass(frozen=True)
class Semiring:
    """
    An exact semiring: carrier elements are Python ints.

    ``contains`` restricts the carrier (booleans are 0/1, naturals are
    non-negative), ``eq`` is exact equality unless overridden.
    """
    name: str
    zero: Any
    one: Any
    add: Callable[[Any, Any], Any] = field(compare=False)
    mul: Callable[[Any, Any], Any] = field(compare=False)
    commutative: bool = True
    contains: Callable[[Any], bool] = field(default=lambda x: True, compare=False)
    eq: Callable[[Any, Any], bool] = field(default=operator.eq, compare=False)

    def is_zero(self, x) -> bool:
        return self.eq(x, self.zero)

    def sum(self, values: Iterable) -> Any:
        total = self.zero
        for v in values:
            total = self.add(total, v)
        return total

    def prod(self, values: Iterable) -> Any:
        total = self.one
        for v in values:
            total = self.mul(total, v)
        return total

    def parse_element(self, text: str):
        text = text.strip()
        try:
            value = int(text)
        except ValueError:
            raise ValueError(f"'{text}' is not an element of {self.name}") from None
        if not self.contains(value):
            raise ValueError(f"'{text}' is not an element of {self.name}")
        return value

    def format_element(self, x) -> str:
        return str(x)

    def __repr__(self):
        return f"Semiring({self.name})"


BOOLEAN = Semiring(
    name="B", zero=0, one=1,
    add=operator.or_, mul=operator.and_,
    contains=lambda x: x in (0, 1),
)

NATURAL = Semiring(
    name="N", zero=0, one=1,
    add=operator.add, mul=operator.mul,
    contains=lambda x: isinstance(x, int) and x >= 0,
)

INTEGER = Semiring(
    name="Z", zero=0, one=1,
    add=operator.add, mul=operator.mul,
    contains=lambda x: isinstance(x, int),
)

SEMIRINGS: Dict[str, Semiring] = {s.name: s for s in (BOOLEAN, NATURAL, INTEGER)}


def get_semiring(name: str) -> Semiring:
    try:
        return SEMIRINGS[name.strip()]
    except KeyError:
        raise ValueError(f"Unknown semiring '{name}'. Available: {sorted(SEMIRINGS)}") from None


def semiring_law_violations(S: Semiring, samples: Iterable) -> List[str]:
    """
    Check the semiring laws on every combination of the sampled elements.

    Returns the sorted names of the violated laws (empty when all hold).
    """
    samples = list(samples)
    broken = set()
    eq = S.eq
    for a in samples:
        if not eq(S.add(a, S.zero), a):
            broken.add("additive unit")
        if not (eq(S.mul(a, S.one), a) and eq(S.mul(S.one, a), a)):
            broken.add("multiplicative unit")
        if not (S.is_zero(S.mul(a, S.zero)) and S.is_zero(S.mul(S.zero, a))):
            broken.add("annihilation")
    for a, b in product(samples, repeat=2):
        if not eq(S.add(a, b), S.add(b, a)):
            broken.add("additive commutativity")
        if S.commutative and not eq(S.mul(a, b), S.mul(b, a)):
            broken.add("multiplicative commutativity")
    for a, b, c in product(samples, repeat=3):
        if not eq(S.add(S.add(a, b), c), S.add(a, S.add(b, c))):
            broken.add("additive associativity")
        if not eq(S.mul(S.mul(a, b), c), S.mul(a, S.mul(b, c))):
            broken.add("multiplicative associativity")
        if not eq(S.mul(a, S.add(b, c)), S.add(S.mul(a, b), S.mul(a, c))):
            broken.add("left distributivity")
        if not eq(S.mul(S.add(b, c), a), S.add(S.mul(b, a), S.mul(c, a))):
            broken.add("right distributivity")
    return sorted(broken)


# ============================================================
# GENERATORS AND WORDS
# ============================================================

class GeneratorKind(enum.IntEnum):
    VARIABLE = 0
    TERMINAL = 1


@dataclass(frozen=True, order=True)
class GeneratorTag:
    """A generator of X+Σ: a Variable (inl) or a Terminal (inr)."""
    kind: GeneratorKind
    id: str

    @property
    def is_variable(self) -> bool:
        return self.kind is GeneratorKind.VARIABLE

    @property
    def is_terminal(self) -> bool:
        return self.kind is GeneratorKind.TERMINAL

    def __str__(self):
        return self.id if self.is_variable else f"'{self.id}'"


def var(name: str) -> GeneratorTag:
    return GeneratorTag(GeneratorKind.VARIABLE, str(name))


def term(name: str) -> GeneratorTag:
    return GeneratorTag(GeneratorKind.TERMINAL, str(name))


Word = Tuple[GeneratorTag, ...]
EMPTY_WORD: Word = ()


def word_key(w: Word):
    """Length-lexicographic sort key."""
    return (len(w), w)


def word(*names: str) -> Word:
    """Build a word from names; quoted names ('a') are terminals."""
    return tuple(term(n[1:-1]) if n.startswith("'") else var(n) for n in names)


# ============================================================
# POLYNOMIALS
# ============================================================

class Polynomial:
    """
    A finite S-linear combination of words over X+Σ in canonical form.

    Terms are kept length-lex sorted and zero coefficients are dropped, so
    equality and hashing are structural.
    """

    __slots__ = ("semiring", "_terms", "_hash")

    def __init__(self, semiring: Semiring, terms: Iterable[Tuple[Word, Any]] = ()):
        accumulated: Dict[Word, Any] = {}
        for w, c in terms:
            w = tuple(w)
            if w in accumulated:
                accumulated[w] = semiring.add(accumulated[w], c)
            else:
                accumulated[w] = c
        self.semiring = semiring
        self._terms: Tuple[Tuple[Word, Any], ...] = tuple(
            (w, accumulated[w])
            for w in sorted(accumulated, key=word_key)
            if not semiring.is_zero(accumulated[w])
        )
        self._hash = None

    # ---- constructors -------------------------------------------------
    @classmethod
    def zero(cls, semiring: Semiring) -> "Polynomial":
        return cls(semiring)

    @classmethod
    def one(cls, semiring: Semiring) -> "Polynomial":
        return cls(semiring, [(EMPTY_WORD, semiring.one)])

    @classmethod
    def constant(cls, semiring: Semiring, s) -> "Polynomial":
        return cls(semiring, [(EMPTY_WORD, s)])

    @classmethod
    def monomial(cls, semiring: Semiring, w: Word, s=None) -> "Polynomial":
        return cls(semiring, [(w, semiring.one if s is None else s)])

    # ---- inspection ---------------------------------------------------
    @property
    def terms(self) -> Mapping[Word, Any]:
        return dict(self._terms)

    def items(self) -> Tuple[Tuple[Word, Any], ...]:
        return self._terms

    def coefficient(self, w: Word):
        for u, c in self._terms:
            if u == w:
                return c
        return self.semiring.zero

    def constant_term(self):
        return self.coefficient(EMPTY_WORD)

    def is_zero(self) -> bool:
        return not self._terms

    def generators(self) -> frozenset:
        return frozenset(g for w, _ in self._terms for g in w)

    def variables(self) -> frozenset:
        return frozenset(g for g in self.generators() if g.is_variable)

    def terminals(self) -> frozenset:
        return frozenset(g for g in self.generators() if g.is_terminal)

    def is_variables_only(self) -> bool:
        return all(g.is_variable for g in self.generators())

    def max_length(self) -> int:
        return max((len(w) for w, _ in self._terms), default=0)

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.semiring.name == other.semiring.name and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.semiring.name, self._terms))
        return self._hash

    def __add__(self, other):
        return poly_add(self, other)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return poly_mul(self, other)
        return NotImplemented

    def __rmul__(self, scalar):
        return poly_scale(scalar, self)

    def __repr__(self):
        return f"Polynomial({self.semiring.name}: {format_polynomial(self)})"

    def __str__(self):
        return format_polynomial(self)


def _check_same(p: Polynomial, q: Polynomial):
    if p.semiring.name != q.semiring.name:
        raise SemiringMismatchError(
            f"Cannot combine polynomials over {p.semiring.name} and {q.semiring.name}"
        )


def poly_unit(g: GeneratorTag, S: Semiring) -> Polynomial:
    """The monad unit: the one-letter word g with coefficient 1."""
    return Polynomial(S, [((g,), S.one)])


def poly_add(p: Polynomial, q: Polynomial) -> Polynomial:
    _check_same(p, q)
    return Polynomial(p.semiring, p.items() + q.items())


def poly_scale(s, p: Polynomial) -> Polynomial:
    S = p.semiring
    if S.is_zero(s):
        return Polynomial.zero(S)
    return Polynomial(S, [(w, S.mul(s, c)) for w, c in p.items()])


def poly_mul(p: Polynomial, q: Polynomial) -> Polynomial:
    """Bilinear extension of word concatenation."""
    _check_same(p, q)
    S = p.semiring
    return Polynomial(S, [
        (u + v, S.mul(c, d))
        for u, c in p.items()
        for v, d in q.items()
    ])


def poly_sum(S: Semiring, polys: Iterable[Polynomial]) -> Polynomial:
    terms = []
    for p in polys:
        if p.semiring.name != S.name:
            raise SemiringMismatchError(f"Expected {S.name}, got {p.semiring.name}")
        terms.extend(p.items())
    return Polynomial(S, terms)


def poly_subst(p: Polynomial, sigma: Mapping[GeneratorTag, Polynomial]) -> Polynomial:
    """Monad multiplication: replace every variable by its image under sigma."""
    return PolynomialMonad(p.semiring).subst(p, sigma)


class PolynomialMonad:
    """
    The monad S<-> (and, with terminal generators, S<- + Σ>).

    Only defined for commutative S.
    """

    def __init__(self, semiring: Semiring):
        if not semiring.commutative:
            raise NonCommutativeSemiringError(
                f"S<X> is a monad only over commutative semirings; {semiring.name} is not"
            )
        self.semiring = semiring

    def unit(self, g: GeneratorTag) -> Polynomial:
        return poly_unit(g, self.semiring)

    def subst(self, p: Polynomial, sigma: Mapping[GeneratorTag, Polynomial]) -> Polynomial:
        S = self.semiring
        if p.semiring.name != S.name:
            raise SemiringMismatchError(f"Expected {S.name}, got {p.semiring.name}")
        cache: Dict[GeneratorTag, Polynomial] = {}

        def image(g: GeneratorTag) -> Polynomial:
            if g not in cache:
                if g in sigma:
                    cache[g] = sigma[g]
                    _check_same(p, cache[g])
                elif g.is_terminal:
                    cache[g] = poly_unit(g, S)
                else:
                    raise UnboundGeneratorError(f"No image for variable {g}")
            return cache[g]

        pieces = []
        for w, c in p.items():
            acc = Polynomial.constant(S, c)
            for g in w:
                acc = poly_mul(acc, image(g))
                if acc.is_zero():
                    break
            pieces.append(acc)
        return poly_sum(S, pieces)


# ============================================================
# TEXT SYNTAX:  3*x.y + 1*'a'
# ============================================================

_TOKEN = re.compile(r"\s*(?:(?P<int>-?\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|'(?P<quoted>[^']*)'|(?P<op>[*.+]))")


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            skipped = len(text[pos:]) - len(text[pos:].lstrip())
            raise PolynomialSyntaxError(f"Unexpected character '{text[pos + skipped]}'", pos + skipped + 1)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind) + 1))
        pos = m.end()
    return tokens


def parse_polynomial(text: str, S: Semiring, variables: Optional[Iterable[str]] = None) -> Polynomial:
    """
    Parse ``coeff*g.g.g + ...``; unquoted names are variables, quoted names
    terminals. A bare coefficient is a constant term. If ``variables`` is
    given, unknown unquoted names are rejected.
    """
    known = None if variables is None else set(variables)
    tokens = _tokenize(text)
    if not tokens:
        raise PolynomialSyntaxError("Empty polynomial", 1)
    terms = []
    i = 0

    def expect_generator(j):
        if j >= len(tokens):
            raise PolynomialSyntaxError("Expected a generator", len(text) + 1)
        kind, value, col = tokens[j]
        if kind == "name":
            if known is not None and value not in known:
                raise PolynomialSyntaxError(f"Unknown variable '{value}'", col)
            return var(value)
        if kind == "quoted":
            if not value:
                raise PolynomialSyntaxError("Empty terminal", col)
            return term(value)
        raise PolynomialSyntaxError(f"Expected a generator, got '{value}'", col)

    while True:
        coeff = S.one
        letters: List[GeneratorTag] = []
        if i < len(tokens) and tokens[i][0] == "int":
            try:
                coeff = S.parse_element(tokens[i][1])
            except ValueError as e:
                raise PolynomialSyntaxError(str(e), tokens[i][2]) from None
            i += 1
            if i < len(tokens) and tokens[i][1] == "*":
                i += 1
                letters.append(expect_generator(i))
                i += 1
        else:
            letters.append(expect_generator(i))
            i += 1
        while letters and i < len(tokens) and tokens[i][1] == ".":
            letters.append(expect_generator(i + 1))
            i += 2
        terms.append((tuple(letters), coeff))
        if i >= len(tokens):
            break
        if tokens[i][1] != "+":
            raise PolynomialSyntaxError(f"Expected '+', got '{tokens[i][1]}'", tokens[i][2])
        i += 1
        if i >= len(tokens):
            raise PolynomialSyntaxError("Dangling '+'", len(text) + 1)
    return Polynomial(S, terms)


def format_word(w: Word) -> str:
    return ".".join(str(g) for g in w)


def format_polynomial(p: Polynomial) -> str:
    if p.is_zero():
        return "0"
    S = p.semiring
    parts = []
    for w, c in p.items():
        if w:
            parts.append(f"{S.format_element(c)}*{format_word(w)}")
        else:
            parts.append(S.format_element(c))
    return " + ".join(parts)


def assignment(S: Semiring, images: Mapping[str, str]) -> Dict[GeneratorTag, Polynomial]:
    """Build a substitution from variable names to polynomial texts."""
    return {var(name): parse_polynomial(text, S) for name, text in images.items()}
