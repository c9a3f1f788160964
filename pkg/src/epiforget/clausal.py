"""Canonical clausal forms (prime implicates) of propositional formulas."""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .formula import (
    TRUTH_TABLE_CAP,
    And,
    Atom,
    Bot,
    CapExceeded,
    Clause,
    Formula,
    FormulaError,
    Iff,
    Implies,
    Literal,
    Not,
    Or,
    ParseError,
    Top,
    _Parser,
    atoms_of,
    conj,
    is_propositional,
    truth_column,
)

ORACLE_ATOM_CAP = 6


@dataclass(frozen=True)
class ClauseSet(Sequence):
    """Non-tautological clauses in canonical order, without duplicates.

    Position ``i`` (0-based) corresponds to index ``i + 1`` of the copies
    built by :func:`epiforget.transform.forget_multiclause`.
    """

    clauses: tuple = ()

    def __init__(self, clauses: Iterable[Clause] = ()):
        uniq = sorted(set(clauses), key=lambda c: c.key)
        for c in uniq:
            if c.is_tautological():
                raise FormulaError(f"clause {c} is tautological")
        object.__setattr__(self, "clauses", tuple(uniq))

    def __getitem__(self, i):
        return self.clauses[i]

    def __len__(self) -> int:
        return len(self.clauses)

    def __iter__(self) -> Iterator[Clause]:
        return iter(self.clauses)

    def __or__(self, other: ClauseSet) -> ClauseSet:
        return ClauseSet(self.clauses + tuple(other))

    def is_antichain(self) -> bool:
        return not any(
            a.subsumes(b) for a, b in itertools.permutations(self.clauses, 2)
        )

    def __str__(self):
        return "{" + ",".join(str(c) for c in self.clauses) + "}"

    def __repr__(self):
        return f"ClauseSet({str(self)!r})"


def parse_clause_set(text: str) -> ClauseSet:
    p = _Parser(text)
    p.expect("{")
    out = []
    if not p.at("}"):
        while True:
            out.append(p.clause())
            if p.at(","):
                p.next()
                continue
            break
    p.expect("}")
    kind, v, pos = p.peek()
    if kind != "eof":
        raise ParseError(f"unexpected token {v!r}", pos)
    return ClauseSet(out)


def clause_set_to_formula(clauses: Iterable[Clause]) -> Formula:
    return conj(c.to_formula() for c in clauses)


# --------------------------------------------------------------------------
# CNF by distribution, then resolution closure with subsumption.
# Internally a literal is a signed int (atom index + 1) and a clause a frozenset.


def _tautological(c: frozenset) -> bool:
    return any(-l in c for l in c)


def _reduce(clauses: Iterable[frozenset]) -> set[frozenset]:
    kept: list[frozenset] = []
    for c in sorted(set(clauses), key=len):
        if _tautological(c):
            continue
        if not any(k <= c for k in kept):
            kept.append(c)
    return set(kept)


def _cnf(f: Formula, positive: bool, index: dict[str, int]) -> set[frozenset]:
    if isinstance(f, Top):
        return set() if positive else {frozenset()}
    if isinstance(f, Bot):
        return {frozenset()} if positive else set()
    if isinstance(f, Atom):
        i = index[f.name]
        return {frozenset([i if positive else -i])}
    if isinstance(f, Not):
        return _cnf(f.arg, not positive, index)
    if isinstance(f, And):
        a, b = _cnf(f.left, positive, index), _cnf(f.right, positive, index)
        return _reduce(a | b) if positive else _product(a, b)
    if isinstance(f, Or):
        a, b = _cnf(f.left, positive, index), _cnf(f.right, positive, index)
        return _product(a, b) if positive else _reduce(a | b)
    if isinstance(f, Implies):
        return _cnf(Or(Not(f.left), f.right), positive, index)
    if isinstance(f, Iff):
        if positive:
            g = And(Or(Not(f.left), f.right), Or(f.left, Not(f.right)))
        else:
            g = And(Or(f.left, f.right), Or(Not(f.left), Not(f.right)))
        return _cnf(g, True, index)
    raise FormulaError("formula is not propositional")


def _product(a: set[frozenset], b: set[frozenset]) -> set[frozenset]:
    return _reduce(x | y for x in a for y in b)


def _resolution_closure(clauses: set[frozenset]) -> set[frozenset]:
    current = _reduce(clauses)
    changed = True
    while changed:
        changed = False
        snapshot = sorted(current, key=lambda c: (len(c), sorted(c)))
        for a, b in itertools.combinations(snapshot, 2):
            clash = [l for l in a if -l in b]
            if len(clash) != 1:
                continue
            l = clash[0]
            r = (a - {l}) | (b - {-l})
            if any(k <= r for k in current):
                continue
            current = {k for k in current if not r <= k}
            current.add(r)
            changed = True
    return current


def _to_clause(c: frozenset, atoms: Sequence[str]) -> Clause:
    return Clause(Literal(atoms[abs(l) - 1], l > 0) for l in c)


def _check(f: Formula, cap: int) -> tuple[str, ...]:
    if not is_propositional(f):
        raise FormulaError("formula is not propositional")
    atoms = atoms_of(f)
    if len(atoms) > cap:
        raise CapExceeded(f"{len(atoms)} atoms exceed the cap of {cap}")
    return atoms


@functools.lru_cache(maxsize=4096)
def _clausal_form_cached(f: Formula, cap: int) -> ClauseSet:
    atoms = _check(f, cap)
    index = {a: i + 1 for i, a in enumerate(atoms)}
    closed = _resolution_closure(_cnf(f, True, index))
    return ClauseSet(_to_clause(c, atoms) for c in closed)


def clausal_form(f: Formula, cap: int = TRUTH_TABLE_CAP) -> ClauseSet:
    """The minimal non-tautological consequences of ``f``, canonically ordered.

    >>> from epiforget.formula import parse_formula
    >>> str(clausal_form(parse_formula("~(p <-> q)")))
    '{{p,q},{~p,~q}}'
    """
    return _clausal_form_cached(f, cap)


def prime_implicates_oracle(f: Formula) -> ClauseSet:
    """Brute-force clausal form: test all 3^k clauses against the truth table."""
    atoms = _check(f, ORACLE_ATOM_CAP)
    k = len(atoms)
    full = (1 << (1 << k)) - 1
    target = truth_column(f, atoms)
    cols = [truth_column(Atom(a), atoms) for a in atoms]
    consequences = []
    for signs in itertools.product((0, 1, -1), repeat=k):
        col = 0
        lits = []
        for a, s, c in zip(atoms, signs, cols):
            if s == 1:
                col |= c
                lits.append(Literal(a, True))
            elif s == -1:
                col |= full & ~c
                lits.append(Literal(a, False))
        if target & ~col == 0:
            consequences.append(frozenset(lits))
    minimal = [c for c in consequences if not any(d < c for d in consequences)]
    return ClauseSet(Clause(c) for c in minimal)
