"""Shared fixtures: the bundled documents and reference CNF grammars."""
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import pytest

from src.cfg import CnfGrammar
from src.documents import load_document

DOCUMENTS = Path(__file__).resolve().parent.parent / "data" / "documents"


@pytest.fixture
def documents_dir() -> Path:
    return DOCUMENTS


def _body(name: str):
    return load_document(DOCUMENTS / name).body


@pytest.fixture
def dyck():
    return _body("dyck.grammar")


@pytest.fixture
def palindromes():
    return _body("palindrome.grammar")


@pytest.fixture
def counting():
    return _body("counting.grammar")


@pytest.fixture
def anbn():
    return _body("anbn.stack")


@pytest.fixture
def palindrome_machine():
    return _body("palindrome.stack")


@pytest.fixture
def nested_products():
    return _body("nested_products.scheme")


@pytest.fixture
def count_a():
    return _body("count_a.wfa")


@pytest.fixture
def dyck_cnf() -> CnfGrammar:
    return CnfGrammar(
        start="D",
        unary={"L": frozenset({"("}), "R": frozenset({")"})},
        binary={"D": frozenset({("D", "D"), ("L", "R"), ("L", "X")}), "X": frozenset({("D", "R")})},
        accepts_empty=True,
    )


@pytest.fixture
def palindrome_cnf() -> CnfGrammar:
    return CnfGrammar(
        start="P",
        unary={"A": frozenset({"a"}), "B": frozenset({"b"})},
        binary={
            "P": frozenset({("A", "A"), ("B", "B"), ("A", "X"), ("B", "Y")}),
            "X": frozenset({("P", "A")}),
            "Y": frozenset({("P", "B")}),
        },
        accepts_empty=True,
    )
