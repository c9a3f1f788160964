"""Formula syntax: AST, parser, printer and truth tables.

Surface grammar (ASCII)::

    T  F  p  ~φ  φ & ψ  φ | ψ  φ -> ψ  φ <-> ψ  K φ  <K> φ
    [fw π] φ   <fw π> φ   [f π] φ   <f π> φ
    [fc π] φ   [fs π] φ   [fd π] φ   [! π] φ
    [aux {p,~q};{~p};1] φ

Binding, tightest first: unary operators, ``&``, ``|``, ``->`` (right
associative), ``<->``.  ``&``, ``|`` and ``<->`` associate to the left.
The argument π of every bracketed modality must be propositional.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator

TRUTH_TABLE_CAP = 20

_ATOM_RE = re.compile(r"[a-z][a-z0-9_]*\Z")


class FormulaError(ValueError):
    pass


class ParseError(FormulaError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.message = message
        self.offset = offset


class CapExceeded(FormulaError):
    """An exhaustive computation would exceed its configured size cap."""


# --------------------------------------------------------------------------
# AST


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True, repr=False)
class Top(Formula):
    def __repr__(self):
        return "Top()"


@dataclass(frozen=True, repr=False)
class Bot(Formula):
    def __repr__(self):
        return "Bot()"


@dataclass(frozen=True, order=True)
class Atom(Formula):
    name: str

    def __post_init__(self):
        if not isinstance(self.name, str) or not _ATOM_RE.match(self.name):
            raise FormulaError(f"invalid atom name {self.name!r}")


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Know(Formula):
    arg: Formula


@dataclass(frozen=True)
class _PropModality(Formula):
    prop: Formula
    body: Formula

    def __post_init__(self):
        if not is_propositional(self.prop):
            raise FormulaError("modal formula in forgetting argument")


class ForgetWhether(_PropModality):
    """``[fw π] φ``: after forgetting whether π, φ."""


class Forget(_PropModality):
    """``[f π] φ``: after forgetting π, φ."""


class ForgetCond(_PropModality):
    """``[fc π] φ``: forget π only when π is known."""


class ForgetStrong(_PropModality):
    """``[fs π] φ``: one model with a copy per clause of C(π) ∪ C(¬π)."""


class ForgetDep(_PropModality):
    """``[fd π] φ``: dependent forgetting, clause choice varies per world."""


class Announce(_PropModality):
    """``[! π] φ``: public announcement of π."""


@dataclass(frozen=True)
class Literal:
    atom: str
    positive: bool = True

    def __post_init__(self):
        if not _ATOM_RE.match(self.atom):
            raise FormulaError(f"invalid atom name {self.atom!r}")

    @property
    def key(self) -> tuple[str, int]:
        # by atom name, then positive before negative
        return (self.atom, 0 if self.positive else 1)

    def __lt__(self, other: Literal) -> bool:
        return self.key < other.key

    def negate(self) -> Literal:
        return Literal(self.atom, not self.positive)

    def to_formula(self) -> Formula:
        a = Atom(self.atom)
        return a if self.positive else Not(a)

    def __str__(self):
        return self.atom if self.positive else "~" + self.atom

    @classmethod
    def parse(cls, text: str) -> Literal:
        text = text.strip()
        if text.startswith("~"):
            return cls(text[1:].strip(), False)
        return cls(text, True)


@dataclass(frozen=True)
class Clause:
    """A finite set of literals, read disjunctively."""

    literals: frozenset = frozenset()

    def __init__(self, literals: Iterable[Literal | str] = ()):
        lits = frozenset(l if isinstance(l, Literal) else Literal.parse(l) for l in literals)
        object.__setattr__(self, "literals", lits)

    @property
    def sorted_literals(self) -> tuple[Literal, ...]:
        return tuple(sorted(self.literals, key=lambda l: l.key))

    @property
    def key(self) -> tuple:
        return tuple(l.key for l in self.sorted_literals)

    def __lt__(self, other: Clause) -> bool:
        return self.key < other.key

    def __iter__(self) -> Iterator[Literal]:
        return iter(self.sorted_literals)

    def __len__(self) -> int:
        return len(self.literals)

    def __contains__(self, lit) -> bool:
        if isinstance(lit, str):
            lit = Literal.parse(lit)
        return lit in self.literals

    def subsumes(self, other: Clause) -> bool:
        return self.literals <= other.literals

    @property
    def atoms(self) -> frozenset[str]:
        return frozenset(l.atom for l in self.literals)

    def is_tautological(self) -> bool:
        return any(l.negate() in self.literals for l in self.literals)

    def is_contingent(self) -> bool:
        return bool(self.literals) and not self.is_tautological()

    def to_formula(self) -> Formula:
        lits = self.sorted_literals
        if not lits:
            return Bot()
        out = lits[0].to_formula()
        for l in lits[1:]:
            out = Or(out, l.to_formula())
        return out

    def __str__(self):
        return "{" + ",".join(str(l) for l in self.sorted_literals) + "}"

    def __repr__(self):
        return f"Clause({str(self)!r})"


@dataclass(frozen=True)
class Aux(Formula):
    """Auxiliary modality: evaluate ``body`` at copy ``index`` of M^{first,second}."""

    first: Clause
    second: Clause
    index: int
    body: Formula

    def __post_init__(self):
        if self.index not in (0, 1, 2):
            raise FormulaError(f"aux index must be 0, 1 or 2, got {self.index}")
        for d in (self.first, self.second):
            if d.is_tautological():
                raise FormulaError(f"aux clause {d} is tautological")


PROP_MODALITIES = (ForgetWhether, Forget, ForgetCond, ForgetStrong, ForgetDep, Announce)
BINARY = (And, Or, Implies, Iff)
_KEYWORD = {
    ForgetWhether: "fw",
    Forget: "f",
    ForgetCond: "fc",
    ForgetStrong: "fs",
    ForgetDep: "fd",
    Announce: "!",
}
_BY_KEYWORD = {v: k for k, v in _KEYWORD.items()}


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (Not, Know)):
        return (f.arg,)
    if isinstance(f, BINARY):
        return (f.left, f.right)
    if isinstance(f, _PropModality):
        return (f.prop, f.body)
    if isinstance(f, Aux):
        return (f.body,)
    return ()


def is_propositional(f: Formula) -> bool:
    if isinstance(f, (Top, Bot, Atom)):
        return True
    if isinstance(f, Not):
        return is_propositional(f.arg)
    if isinstance(f, BINARY):
        return is_propositional(f.left) and is_propositional(f.right)
    return False


def is_basic(f: Formula) -> bool:
    """True for formulas of the basic modal language (no dynamic modalities)."""
    if isinstance(f, (_PropModality, Aux)):
        return False
    return all(is_basic(c) for c in children(f))


def atoms_of(f: Formula) -> tuple[str, ...]:
    """Sorted names of every atom occurring in ``f``, Aux clauses included."""
    found: set[str] = set()

    def walk(g):
        if isinstance(g, Atom):
            found.add(g.name)
        elif isinstance(g, Aux):
            found.update(g.first.atoms)
            found.update(g.second.atoms)
        for c in children(g):
            walk(c)

    walk(f)
    return tuple(sorted(found))


def conj(items: Iterable[Formula]) -> Formula:
    """Left-folded conjunction; the empty conjunction is ``T``."""
    items = list(items)
    if not items:
        return Top()
    out = items[0]
    for g in items[1:]:
        out = And(out, g)
    return out


def disj(items: Iterable[Formula]) -> Formula:
    items = list(items)
    if not items:
        return Bot()
    out = items[0]
    for g in items[1:]:
        out = Or(out, g)
    return out


def diamond(f: Formula) -> Formula:
    return Not(Know(Not(f)))


# --------------------------------------------------------------------------
# Tokenizer and parser

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<op><->|->|[~&|()\[\]{};,!<>])"
    r"|(?P<ident>[a-z][a-z0-9_]*)"
    r"|(?P<const>[A-Z][A-Za-z0-9_]*)"
    r"|(?P<num>\d+)"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            if kind == "const" and value not in ("T", "F", "K"):
                raise ParseError(f"unknown constant {value!r}", pos)
            tokens.append((kind, value, pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self, ahead: int = 0):
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def next(self):
        tok = self.tokens[self.i]
        if tok[0] != "eof":
            self.i += 1
        return tok

    def expect(self, value: str):
        kind, v, pos = self.next()
        if v != value or kind == "eof":
            found = "end of input" if kind == "eof" else repr(v)
            raise ParseError(f"expected {value!r}, found {found}", pos)

    def at(self, value: str) -> bool:
        kind, v, _ = self.peek()
        return kind in ("op", "ident", "const") and v == value

    def parse(self) -> Formula:
        f = self.iff()
        kind, v, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected token {v!r}", pos)
        return f

    def iff(self) -> Formula:
        f = self.implies()
        while self.at("<->"):
            self.next()
            f = Iff(f, self.implies())
        return f

    def implies(self) -> Formula:
        f = self.disjunction()
        if self.at("->"):
            self.next()
            return Implies(f, self.implies())
        return f

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.at("|"):
            self.next()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.at("&"):
            self.next()
            f = And(f, self.unary())
        return f

    def prop_arg(self) -> Formula:
        start = self.peek()[2]
        f = self.iff()
        if not is_propositional(f):
            raise ParseError("modal formula in forgetting argument", start)
        return f

    def clause(self) -> Clause:
        self.expect("{")
        lits = []
        if not self.at("}"):
            while True:
                neg = False
                if self.at("~"):
                    self.next()
                    neg = True
                kind, v, pos = self.next()
                if kind != "ident":
                    raise ParseError(f"expected atom in clause, found {v!r}", pos)
                lits.append(Literal(v, not neg))
                if self.at(","):
                    self.next()
                    continue
                break
        self.expect("}")
        return Clause(lits)

    def unary(self) -> Formula:
        kind, v, pos = self.next()
        if kind == "eof":
            raise ParseError("unexpected end of input", pos)
        if kind == "ident":
            return Atom(v)
        if kind == "const":
            if v == "T":
                return Top()
            if v == "F":
                return Bot()
            return Know(self.unary())
        if v == "~":
            return Not(self.unary())
        if v == "(":
            f = self.iff()
            self.expect(")")
            return f
        if v == "[":
            return self.box()
        if v == "<":
            return self.dual()
        raise ParseError(f"unexpected token {v!r}", pos)

    def box(self) -> Formula:
        kind, v, pos = self.next()
        if v == "aux" and kind == "ident":
            d1 = self.clause()
            self.expect(";")
            d2 = self.clause()
            self.expect(";")
            kind, num, npos = self.next()
            if kind != "num" or num not in ("0", "1", "2"):
                raise ParseError("aux index must be 0, 1 or 2", npos)
            self.expect("]")
            for d in (d1, d2):
                if d.is_tautological():
                    raise ParseError(f"aux clause {d} is tautological", pos)
            return Aux(d1, d2, int(num), self.unary())
        cls = _BY_KEYWORD.get(v) if kind in ("ident", "op") else None
        if cls is None:
            raise ParseError(f"unknown modality {v!r}", pos)
        prop = self.prop_arg()
        self.expect("]")
        return cls(prop, self.unary())

    def dual(self) -> Formula:
        kind, v, pos = self.next()
        if kind == "const" and v == "K":
            self.expect(">")
            return diamond(self.unary())
        cls = _BY_KEYWORD.get(v) if kind in ("ident", "op") else None
        if cls is None:
            raise ParseError(f"unknown modality {v!r}", pos)
        prop = self.prop_arg()
        self.expect(">")
        return Not(cls(prop, Not(self.unary())))


def parse_formula(text: str) -> Formula:
    return _Parser(text).parse()


def parse_clause(text: str) -> Clause:
    p = _Parser(text)
    c = p.clause()
    kind, v, pos = p.peek()
    if kind != "eof":
        raise ParseError(f"unexpected token {v!r}", pos)
    return c


# --------------------------------------------------------------------------
# Printer

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}
_SYMBOL = {Iff: "<->", Implies: "->", Or: "|", And: "&"}
_UNARY_PREC = 5


def _prec(f: Formula) -> int:
    return _PREC.get(type(f), _UNARY_PREC)


def _operand(f: Formula) -> str:
    s = print_formula(f)
    return f"({s})" if isinstance(f, BINARY) else s


def print_formula(f: Formula) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Top):
        return "T"
    if isinstance(f, Bot):
        return "F"
    if isinstance(f, Not):
        g = f.arg
        if isinstance(g, Know) and isinstance(g.arg, Not):
            return "<K> " + _operand(g.arg.arg)
        if isinstance(g, (ForgetWhether, Forget)) and isinstance(g.body, Not):
            return f"<{_KEYWORD[type(g)]} {_operand(g.prop)}> {_operand(g.body.arg)}"
        return "~" + _operand(g)
    if isinstance(f, Know):
        return "K " + _operand(f.arg)
    if isinstance(f, _PropModality):
        return f"[{_KEYWORD[type(f)]} {_operand(f.prop)}] {_operand(f.body)}"
    if isinstance(f, Aux):
        return f"[aux {f.first};{f.second};{f.index}] {_operand(f.body)}"
    if isinstance(f, BINARY):
        p = _PREC[type(f)]
        right_assoc = isinstance(f, Implies)
        lp, rp = _prec(f.left), _prec(f.right)
        left = print_formula(f.left)
        right = print_formula(f.right)
        if lp < p or (lp == p and right_assoc):
            left = f"({left})"
        if rp < p or (rp == p and not right_assoc):
            right = f"({right})"
        return f"{left} {_SYMBOL[type(f)]} {right}"
    raise TypeError(f"not a formula: {f!r}")


# --------------------------------------------------------------------------
# Truth tables
#
# A propositional formula over k atoms is evaluated to a 2^k-bit integer;
# bit r is its value on row r, where atom i is true on row r iff bit i of r
# is set.


def _atom_column(i: int, k: int) -> int:
    rows = 1 << k
    half = 1 << i
    block = ((1 << half) - 1) << half
    period = half << 1
    return block * (((1 << rows) - 1) // ((1 << period) - 1))


def truth_column(f: Formula, atoms: tuple[str, ...]) -> int:
    k = len(atoms)
    full = (1 << (1 << k)) - 1
    cols = {a: _atom_column(i, k) for i, a in enumerate(atoms)}

    def ev(g):
        if isinstance(g, Atom):
            try:
                return cols[g.name]
            except KeyError:
                raise FormulaError(f"atom {g.name!r} not in table atoms") from None
        if isinstance(g, Top):
            return full
        if isinstance(g, Bot):
            return 0
        if isinstance(g, Not):
            return full & ~ev(g.arg)
        if isinstance(g, And):
            return ev(g.left) & ev(g.right)
        if isinstance(g, Or):
            return ev(g.left) | ev(g.right)
        if isinstance(g, Implies):
            return (full & ~ev(g.left)) | ev(g.right)
        if isinstance(g, Iff):
            return full & ~(ev(g.left) ^ ev(g.right))
        raise FormulaError("formula is not propositional")

    return ev(f)


def _check_cap(atoms, cap: int) -> None:
    if len(atoms) > cap:
        raise CapExceeded(f"{len(atoms)} atoms exceed the truth-table cap of {cap}")


def classify_prop(f: Formula, cap: int = TRUTH_TABLE_CAP) -> str:
    """Return ``"tautology"``, ``"contradiction"`` or ``"contingent"``."""
    if not is_propositional(f):
        raise FormulaError("formula is not propositional")
    atoms = atoms_of(f)
    _check_cap(atoms, cap)
    col = truth_column(f, atoms)
    if col == (1 << (1 << len(atoms))) - 1:
        return "tautology"
    if col == 0:
        return "contradiction"
    return "contingent"


def prop_equivalent(f: Formula, g: Formula, cap: int = TRUTH_TABLE_CAP) -> bool:
    if not (is_propositional(f) and is_propositional(g)):
        raise FormulaError("formula is not propositional")
    atoms = tuple(sorted(set(atoms_of(f)) | set(atoms_of(g))))
    _check_cap(atoms, cap)
    return truth_column(f, atoms) == truth_column(g, atoms)
