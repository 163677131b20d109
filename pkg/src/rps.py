"""
Recursive program schemes over a ranked signature.

A guarded scheme defines operations phi_i(x_1..x_n) = body_i by terms over
the given symbols, the defined symbols and the parameters. Its solution is
an infinite (algebraic) tree; here it is approximated by finite prefixes in
which ⊥ marks where unfolding stopped.
"""
import logging
import re
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Mapping, Optional, Set, Tuple, Union

from src.kernel import Equal

logger = logging.getLogger(__name__)

BOTTOM_SYMBOL = "⊥"


class RankError(ValueError):
    """Raised for a symbol used with the wrong number of arguments or unknown symbols/variables."""


class GuardednessError(ValueError):
    """Raised for a definition whose body starts with a defined symbol."""

    def __init__(self, message: str, path: Tuple[str, ...] = ()):
        super().__init__(message)
        self.path = path


class SignatureMismatchError(ValueError):
    """Raised when trees over different givens are compared."""


class TermSyntaxError(ValueError):
    def __init__(self, message: str, column: int):
        super().__init__(f"{message} (column {column})")
        self.column = column
        self.message = message


# ============================================================
# TREES
# ============================================================

@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    symbol: str
    args: Tuple["Tree", ...] = ()

    def __str__(self):
        return format_tree(self)


@dataclass(frozen=True)
class Bottom:
    def __str__(self):
        return BOTTOM_SYMBOL


BOTTOM = Bottom()

Tree = Union[Var, App, Bottom]
Term = Tree
Path = Tuple[int, ...]


def format_tree(t: Tree) -> str:
    if isinstance(t, App):
        if not t.args:
            return t.symbol
        return f"{t.symbol}({', '.join(format_tree(c) for c in t.args)})"
    return str(t)


def contains_bottom(t: Tree) -> bool:
    if isinstance(t, Bottom):
        return True
    return isinstance(t, App) and any(contains_bottom(c) for c in t.args)


def variables_of(t: Tree) -> Set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, App):
        return set().union(*(variables_of(c) for c in t.args))
    return set()


def symbols_of(t: Tree) -> Iterator[Tuple[str, int]]:
    if isinstance(t, App):
        yield t.symbol, len(t.args)
        for c in t.args:
            yield from symbols_of(c)


def tree_height(t: Tree) -> int:
    if isinstance(t, App) and t.args:
        return 1 + max(tree_height(c) for c in t.args)
    return 1


def subtrees(t: Tree) -> Iterator[Tuple[Path, Tree]]:
    """All (path, subtree) pairs in left-to-right preorder."""
    stack = [((), t)]
    while stack:
        path, node = stack.pop()
        yield path, node
        if isinstance(node, App):
            for i in reversed(range(len(node.args))):
                stack.append((path + (i,), node.args[i]))


def substitute(t: Tree, assignment: Mapping[str, Tree]) -> Tree:
    """Replace variable leaves; unassigned variables stay."""
    if isinstance(t, Var):
        return assignment.get(t.name, t)
    if isinstance(t, App):
        return App(t.symbol, tuple(substitute(c, assignment) for c in t.args))
    return t


def prefix_leq(a: Tree, b: Tree) -> bool:
    """a is below b in the prefix order: b is a with some ⊥ leaves filled in."""
    if isinstance(a, Bottom):
        return True
    if isinstance(a, Var) or isinstance(b, (Var, Bottom)):
        return a == b
    return (a.symbol == b.symbol and len(a.args) == len(b.args)
            and all(prefix_leq(x, y) for x, y in zip(a.args, b.args)))


_TOKEN = re.compile(r"\s*(?:(?P<punct>[(),])|(?P<name>[^\s(),]+))")


def parse_term(text: str, symbols: Mapping[str, int]) -> Tree:
    """
    Parse ``f(t1, ..., tn)`` notation. Names listed in ``symbols`` are
    applications (constants may omit the parentheses), ``⊥`` is the
    truncation leaf and every other name is a variable.
    """
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise TermSyntaxError(f"Unexpected character {text[pos]!r}", pos + 1)
        tokens.append((m.group("punct") or m.group("name"), m.start(m.lastindex) + 1))
        pos = m.end()
    tokens.append((None, len(text) + 1))
    index = 0

    def expect(tok):
        nonlocal index
        value, col = tokens[index]
        if value != tok:
            raise TermSyntaxError(f"Expected '{tok}', found {value or 'end of input'!r}", col)
        index += 1

    def term() -> Tree:
        nonlocal index
        name, col = tokens[index]
        if name is None or name in "(),":
            raise TermSyntaxError(f"Expected a symbol, found {name or 'end of input'!r}", col)
        index += 1
        args = []
        if tokens[index][0] == "(":
            index += 1
            args.append(term())
            while tokens[index][0] == ",":
                index += 1
                args.append(term())
            expect(")")
        if name == BOTTOM_SYMBOL:
            if args:
                raise RankError(f"{BOTTOM_SYMBOL} takes no arguments")
            return BOTTOM
        if name in symbols:
            if len(args) != symbols[name]:
                raise RankError(f"Symbol {name} has arity {symbols[name]}, applied to {len(args)} arguments")
            return App(name, tuple(args))
        if args:
            raise RankError(f"Unknown symbol {name}")
        return Var(name)

    result = term()
    if tokens[index][0] is not None:
        raise TermSyntaxError(f"Trailing input {tokens[index][0]!r}", tokens[index][1])
    return result


# ============================================================
# SIGNATURES AND SCHEMES
# ============================================================

@dataclass(frozen=True)
class Signature:
    symbols: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        for name, arity in self.symbols.items():
            if arity < 0:
                raise RankError(f"Symbol {name} has negative arity")
            if name == BOTTOM_SYMBOL or re.search(r"[\s(),]", name):
                raise RankError(f"{name!r} cannot be used as a symbol")
        object.__setattr__(self, "symbols", dict(sorted(self.symbols.items())))

    @classmethod
    def from_text(cls, text: str) -> "Signature":
        """``⋆/0 ×/2 +/2``"""
        symbols = {}
        for item in text.split():
            name, sep, arity = item.rpartition("/")
            if not sep or not name or not arity.isdigit():
                raise RankError(f"Expected symbol/arity, got {item!r}")
            symbols[name] = int(arity)
        return cls(symbols)

    def arity(self, symbol: str) -> int:
        return self.symbols[symbol]

    def __contains__(self, symbol: str) -> bool:
        return symbol in self.symbols

    def __str__(self):
        return " ".join(f"{s}/{n}" for s, n in self.symbols.items())


@dataclass(frozen=True)
class Scheme:
    """
    Definitions phi(params) = body. Bodies may use givens, defined symbols
    and their own parameters; construction checks ranks and guardedness.
    """
    givens: Signature
    params: Mapping[str, Tuple[str, ...]]
    body: Mapping[str, Tree]

    def __post_init__(self):
        object.__setattr__(self, "params", {k: tuple(v) for k, v in self.params.items()})
        object.__setattr__(self, "body", dict(self.body))
        clash = set(self.params) & set(self.givens.symbols)
        if clash:
            raise RankError(f"Symbols {sorted(clash)} are both given and defined")
        if set(self.params) != set(self.body):
            raise RankError(f"Definitions and bodies differ: {sorted(set(self.params) ^ set(self.body))}")
        for name, body in self.body.items():
            self.check_term(body, allowed_variables=set(self.params[name]), where=f"body of {name}")
        check_guarded(self)

    @property
    def defined(self) -> Dict[str, int]:
        return {name: len(ps) for name, ps in self.params.items()}

    @property
    def symbols(self) -> Dict[str, int]:
        return {**self.givens.symbols, **self.defined}

    def check_term(self, t: Tree, allowed_variables: Optional[Set[str]] = None, where: str = "term"):
        arities = self.symbols
        for sym, n in symbols_of(t):
            if sym not in arities:
                raise RankError(f"Unknown symbol {sym} in {where}")
            if arities[sym] != n:
                raise RankError(f"Symbol {sym} has arity {arities[sym]} but has {n} arguments in {where}")
        if contains_bottom(t):
            raise RankError(f"{BOTTOM_SYMBOL} cannot occur in {where}")
        if allowed_variables is not None:
            stray = variables_of(t) - allowed_variables
            if stray:
                raise RankError(f"Variables {sorted(stray)} are not parameters in {where}")

    def parse(self, text: str) -> Tree:
        return parse_term(text, self.symbols)


def unguarded_path(scheme: Scheme, name: str) -> Tuple[str, ...]:
    """The chain of defined symbols met at body roots starting from ``name``."""
    path = [name]
    root = scheme.body[name]
    while isinstance(root, App) and root.symbol in scheme.params:
        path.append(root.symbol)
        if root.symbol in path[:-1]:
            break
        root = scheme.body[root.symbol]
    return tuple(path)


def check_guarded(scheme: Scheme) -> None:
    for name in scheme.params:
        path = unguarded_path(scheme, name)
        if len(path) > 1:
            raise GuardednessError(f"Unguarded definition: {' → '.join(path)}", path)


# ============================================================
# UNFOLDING
# ============================================================

def _expand(scheme: Scheme, t: Tree, level: int, depth: int) -> Tree:
    if not isinstance(t, App):
        return t
    if t.symbol in scheme.params:
        if level >= depth:
            return BOTTOM
        instance = substitute(scheme.body[t.symbol], dict(zip(scheme.params[t.symbol], t.args)))
        return _expand(scheme, instance, level, depth)
    return App(t.symbol, tuple(_expand(scheme, c, level + 1, depth) for c in t.args))


def unfold(scheme: Scheme, root: Tree, depth: int) -> Tree:
    """
    Unravel the definitions below ``root``.

    The root sits at depth 1. A defined symbol met at depth >= ``depth``
    becomes ⊥; given symbols and variables are always kept, so depth 0
    leaves only the given material above the first defined symbol.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    scheme.check_term(root, where="root")
    tree = _expand(scheme, root, 1, depth)
    logger.debug(f"Unfolded {format_tree(root)} to depth {depth}: height {tree_height(tree)}")
    return tree


@dataclass(frozen=True)
class DifferingPath:
    """The first preorder position where two prefixes disagree."""
    path: Path
    left: Tree
    right: Tree

    def __str__(self):
        where = ".".join(map(str, self.path)) or "root"
        return f"{where}: {format_tree(self.left)} vs {format_tree(self.right)}"


def first_difference(a: Tree, b: Tree, path: Path = ()) -> Optional[DifferingPath]:
    """Compare node by node; ⊥ agrees with anything."""
    if isinstance(a, Bottom) or isinstance(b, Bottom):
        return None
    if isinstance(a, App) and isinstance(b, App):
        if a.symbol != b.symbol or len(a.args) != len(b.args):
            return DifferingPath(path, a, b)
        for i, (x, y) in enumerate(zip(a.args, b.args)):
            found = first_difference(x, y, path + (i,))
            if found is not None:
                return found
        return None
    return None if a == b else DifferingPath(path, a, b)


def prefix_equal(s1: Scheme, r1: Tree, s2: Scheme, r2: Tree, depth: int) -> Union[Equal, DifferingPath]:
    if s1.givens != s2.givens:
        raise SignatureMismatchError(f"Givens differ: {s1.givens} vs {s2.givens}")
    found = first_difference(unfold(s1, r1, depth), unfold(s2, r2, depth))
    logger.info(f"Prefix comparison at depth {depth}: {'equal' if found is None else found}")
    return Equal(depth=depth) if found is None else found


def subtree_census(t: Tree) -> int:
    """Number of distinct subtrees free of ⊥."""
    return len({node for _, node in subtrees(t) if not contains_bottom(node)})


def census_by_depth(scheme: Scheme, root: Tree, depths) -> List[Tuple[int, int]]:
    return [(d, subtree_census(unfold(scheme, root, d))) for d in depths]

