"""Semirings, polynomials over X+Σ, substitution and the text syntax."""
import operator

import pytest

from src.algebra import (
    BOOLEAN,
    INTEGER,
    NATURAL,
    NonCommutativeSemiringError,
    Polynomial,
    PolynomialMonad,
    PolynomialSyntaxError,
    Semiring,
    SemiringMismatchError,
    UnboundGeneratorError,
    assignment,
    format_polynomial,
    get_semiring,
    parse_polynomial,
    poly_mul,
    poly_subst,
    semiring_law_violations,
    var,
    word,
)
from src.generators import random_polynomial


def N(text):
    return parse_polynomial(text, NATURAL)


@pytest.mark.parametrize("S, samples", [
    (BOOLEAN, [0, 1]),
    (NATURAL, range(4)),
    (INTEGER, range(-2, 3)),
])
def test_builtin_semirings_satisfy_the_laws(S, samples):
    assert semiring_law_violations(S, samples) == []


def test_law_check_reports_broken_laws():
    """Subtraction is neither commutative nor associative."""
    broken = Semiring(name="bad", zero=0, one=1, add=operator.sub, mul=operator.mul)
    violations = semiring_law_violations(broken, range(3))
    assert "additive commutativity" in violations
    assert "additive associativity" in violations
    assert "multiplicative unit" not in violations


def test_get_semiring():
    assert get_semiring("N") is NATURAL
    assert get_semiring(" B ") is BOOLEAN
    with pytest.raises(ValueError, match="Unknown semiring"):
        get_semiring("R")


def test_parse_element_respects_the_carrier():
    assert NATURAL.parse_element("3") == 3
    with pytest.raises(ValueError):
        BOOLEAN.parse_element("2")
    with pytest.raises(ValueError):
        NATURAL.parse_element("-1")
    assert INTEGER.parse_element("-1") == -1


def test_parse_and_format():
    p = N("3*x.y + 1*'a'")
    assert p.coefficient(word("x", "y")) == 3
    assert p.coefficient(word("'a'")) == 1
    assert p.coefficient(word("y", "x")) == 0
    # canonical order is length-lex
    assert format_polynomial(p) == "1*'a' + 3*x.y"
    assert N(format_polynomial(p)) == p


def test_zero_and_constants():
    assert N("0").is_zero()
    assert format_polynomial(N("0")) == "0"
    assert N("2").constant_term() == 2
    assert N("x + 0*y") == N("x")


def test_like_terms_are_collected():
    assert N("x.y + 2*x.y") == N("3*x.y")
    # 1 + 1 = 1 in the Boolean semiring
    assert parse_polynomial("x + x", BOOLEAN) == parse_polynomial("x", BOOLEAN)


def test_words_do_not_commute():
    x, y = N("x"), N("y")
    assert poly_mul(x, y) == N("x.y")
    assert poly_mul(x, y) != poly_mul(y, x)
    assert poly_mul(N("x + y"), x) == N("x.x + y.x")


def test_substitution():
    p = N("2*x.x + 1")
    result = poly_subst(p, {var("x"): N("y + 1")})
    assert result == N("2*y.y + 4*y + 3")


def test_substitution_keeps_terminals():
    p = N("1*'a'.x")
    assert poly_subst(p, {var("x"): N("'b'")}) == N("'a'.'b'")


def test_substitution_needs_every_variable():
    with pytest.raises(UnboundGeneratorError):
        poly_subst(N("x.y"), {var("x"): N("1")})


def test_assignment_helper():
    sigma = assignment(NATURAL, {"x": "y.y"})
    assert poly_subst(N("x + x"), sigma) == N("2*y.y")


@pytest.mark.parametrize("seed", range(5))
def test_monad_laws(seed):
    """Unit on the left and right, and associativity of substitution."""
    variables = ["x", "y"]
    p = random_polynomial(NATURAL, variables, ["a"], random_state=seed)
    sigma = {var(v): random_polynomial(NATURAL, variables, ["a"], max_terms=2, max_len=2,
                                       random_state=seed * 10 + i)
             for i, v in enumerate(variables)}
    tau = {var(v): random_polynomial(NATURAL, variables, max_terms=2, max_len=2, random_state=seed * 100 + i)
           for i, v in enumerate(variables)}
    monad = PolynomialMonad(NATURAL)

    assert poly_subst(p, {var(v): monad.unit(var(v)) for v in variables}) == p
    assert poly_subst(monad.unit(var("x")), sigma) == sigma[var("x")]
    composed = {g: poly_subst(q, tau) for g, q in sigma.items()}
    assert poly_subst(poly_subst(p, sigma), tau) == poly_subst(p, composed)


def test_mixing_semirings_is_rejected():
    with pytest.raises(SemiringMismatchError):
        N("x") + parse_polynomial("x", BOOLEAN)


def test_non_commutative_semiring_has_no_monad():
    nc = Semiring(name="nc", zero=0, one=1, add=operator.add, mul=operator.mul, commutative=False)
    with pytest.raises(NonCommutativeSemiringError):
        PolynomialMonad(nc)


@pytest.mark.parametrize("text, column", [
    ("2*", 3),
    ("x +", 4),
    ("x ++ y", 4),
    ("x $ y", 3),
])
def test_syntax_errors_carry_a_column(text, column):
    with pytest.raises(PolynomialSyntaxError) as info:
        N(text)
    assert info.value.column == column


def test_unknown_variables_are_rejected_when_declared():
    with pytest.raises(PolynomialSyntaxError, match="Unknown variable 'z'"):
        parse_polynomial("z", NATURAL, variables=["x"])


def test_polynomials_are_hashable():
    assert len({N("x + y"), N("y + x"), N("x")}) == 2
    assert Polynomial.zero(NATURAL) == N("0")
