"""Compile forgetting, announcement and aux modalities into basic modal logic.

Rewriting is inside-out: a modality's body is translated first, so each
reduction step only ever pushes one action through a basic formula.  The
clause-copy reductions follow the action-model axioms for U_C (all
preconditions ``T``, full action relation)::

    [U,i] p        <->  p, T or F depending on the sign of p in D_i
    [U,i] ~φ       <->  ~[U,i] φ
    [U,i] (φ & ψ)  <->  [U,i] φ & [U,i] ψ
    [U,i] K φ      <->  K([U,0] φ & [U,1] φ & ... & [U,n] φ)

Outputs are not simplified.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .clausal import clausal_form
from .formula import (
    BINARY,
    And,
    Announce,
    Atom,
    Aux,
    Bot,
    Clause,
    Formula,
    FormulaError,
    Forget,
    ForgetCond,
    ForgetDep,
    ForgetStrong,
    ForgetWhether,
    Iff,
    Implies,
    Know,
    Literal,
    Not,
    Or,
    Top,
    conj,
    is_propositional,
)
from .kripke import PointedModel
from .search import find_countermodel
from .semantics import whether_outcomes


class UnsupportedOperator(FormulaError):
    pass


def push_action(clauses: Sequence[Clause], index: int, f: Formula) -> Formula:
    """Eliminate ``[U_clauses, e_index] f`` for a basic formula ``f``."""
    t = type(f)
    if t is Atom:
        if index == 0:
            return f
        d = clauses[index - 1]
        if Literal(f.name, True) in d.literals:
            return Bot()
        if Literal(f.name, False) in d.literals:
            return Top()
        return f
    if t is Top or t is Bot:
        return f
    if t is Not:
        return Not(push_action(clauses, index, f.arg))
    if t in BINARY:
        return t(push_action(clauses, index, f.left), push_action(clauses, index, f.right))
    if t is Know:
        return Know(conj(push_action(clauses, j, f.arg) for j in range(len(clauses) + 1)))
    raise FormulaError(f"push_action expects a basic formula, got {t.__name__}")


def aux_step(f: Aux) -> Formula:
    """One reduction axiom applied at the root of an aux formula."""
    body = f.body
    d1, d2, i = f.first, f.second, f.index
    t = type(body)
    if t in (Atom, Top, Bot):
        return push_action((d1, d2), i, body)
    if t is Not:
        return Not(Aux(d1, d2, i, body.arg))
    if t in BINARY:
        return t(Aux(d1, d2, i, body.left), Aux(d1, d2, i, body.right))
    if t is Know:
        return Know(conj(Aux(d1, d2, j, body.arg) for j in range(3)))
    raise FormulaError(f"aux_step expects a basic body, got {t.__name__}")


def push_announcement(prop: Formula, f: Formula) -> Formula:
    """Eliminate ``[! prop] f`` for a basic formula ``f``."""
    t = type(f)
    if t in (Atom, Top, Bot):
        return Implies(prop, f)
    if t is Not:
        return Implies(prop, Not(push_announcement(prop, f.arg)))
    if t is And:
        return And(push_announcement(prop, f.left), push_announcement(prop, f.right))
    if t in (Or, Implies, Iff):
        return Implies(prop, t(push_announcement(prop, f.left), push_announcement(prop, f.right)))
    if t is Know:
        return Implies(prop, Know(Implies(prop, push_announcement(prop, f.arg))))
    raise FormulaError(f"push_announcement expects a basic formula, got {t.__name__}")


def translate(f: Formula) -> Formula:
    """An equivalent formula of the basic modal language.

    ``[fs π]`` and ``[fd π]`` have no reduction axioms and are rejected.
    """
    t = type(f)
    if t in (Atom, Top, Bot):
        return f
    if t is Not:
        return Not(translate(f.arg))
    if t in BINARY:
        return t(translate(f.left), translate(f.right))
    if t is Know:
        return Know(translate(f.arg))
    if t in (ForgetStrong, ForgetDep):
        raise UnsupportedOperator(f"{t.__name__} has no reduction axioms")
    if t is Aux:
        return push_action((f.first, f.second), f.index, translate(f.body))
    if not is_propositional(f.prop):
        raise FormulaError("modal formula in forgetting argument")
    if t is ForgetWhether:
        body = translate(f.body)
        return conj(push_action(pair, 0, body) for pair in whether_outcomes(f.prop))
    if t is Forget:
        body = translate(f.body)
        return conj(push_action((d,), 0, body) for d in clausal_form(f.prop))
    if t is ForgetCond:
        body = translate(f.body)
        known = Know(f.prop)
        forgotten = conj(push_action((d,), 0, body) for d in clausal_form(f.prop))
        return Or(And(Not(known), body), And(known, forgotten))
    if t is Announce:
        return push_announcement(f.prop, translate(f.body))
    raise FormulaError(f"cannot translate {t.__name__}")


def equivalence_check(f: Formula, g: Formula, spec) -> tuple[bool, Optional[PointedModel]]:
    """Exhaustively compare ``f`` and ``g`` on every pointed model within ``spec``.

    Returns ``(True, None)`` or ``(False, first disagreeing pointed model)``.
    """
    cm = find_countermodel(Iff(f, g), spec)
    return cm is None, cm


__all__ = [
    "UnsupportedOperator",
    "aux_step",
    "equivalence_check",
    "push_action",
    "push_announcement",
    "translate",
]
