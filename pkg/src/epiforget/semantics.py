"""Satisfaction for the full language, forgetting modalities included.

Every operator is evaluated on whole models: the truth set of ``[fw π] φ``
in M is computed from the truth sets of φ in each outcome model, so a single
pass answers the question for every world at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from .clausal import ClauseSet, clausal_form
from .formula import (
    Announce,
    Aux,
    Clause,
    Formula,
    Forget,
    ForgetCond,
    ForgetDep,
    ForgetStrong,
    ForgetWhether,
    Know,
    Not,
    BINARY,
    is_propositional,
    FormulaError,
    print_formula,
)
from .kripke import KripkeModel, PointedModel, extension_mask as _basic_mask
from .transform import (
    ENUMERATION_CAP,
    ForgettingFunctionPair,
    forget_dependent,
    forget_multiclause,
    function_pairs,
)


class EmptyClauseSetError(FormulaError):
    """Dependent forgetting of a tautology or contradiction has no function pairs."""


def whether_outcomes(prop: Formula) -> list[tuple[Clause, Clause]]:
    """The clause pairs ``(D1, D2)`` in ``C(π) × C(¬π)``."""
    return [(d1, d2) for d1 in clausal_form(prop) for d2 in clausal_form(Not(prop))]


def strong_clauses(prop: Formula) -> ClauseSet:
    return clausal_form(prop) | clausal_form(Not(prop))


def _at_copy(model: KripkeModel, clauses, body: Formula, index: int = 0) -> int:
    n = len(model)
    big = forget_multiclause(model, clauses)
    return (extension_mask(big, body) >> (index * n)) & model.full


def _conjunction(model: KripkeModel, choices, body: Formula) -> int:
    out = model.full
    for clauses in choices:
        out &= _at_copy(model, clauses, body)
        if not out:
            break
    return out


def forget_whether_mask(model: KripkeModel, prop: Formula, body: Formula) -> int:
    return _conjunction(model, whether_outcomes(prop), body)


def forget_mask(model: KripkeModel, prop: Formula, body: Formula) -> int:
    return _conjunction(model, [(d,) for d in clausal_form(prop)], body)


def forget_conditional_mask(model: KripkeModel, prop: Formula, body: Formula) -> int:
    knows = extension_mask(model, Know(prop))
    out = 0
    if knows:
        out |= knows & forget_mask(model, prop, body)
    if knows != model.full:
        out |= model.full & ~knows & extension_mask(model, body)
    return out


def forget_strong_mask(model: KripkeModel, prop: Formula, body: Formula) -> int:
    # evaluated at the (w, 0) copies, like every other forgetting operator
    return _at_copy(model, strong_clauses(prop), body)


def dependent_pairs(
    model: KripkeModel, prop: Formula, cap: int = ENUMERATION_CAP
) -> Iterator[ForgettingFunctionPair]:
    first, second = clausal_form(prop), clausal_form(Not(prop))
    if not first or not second:
        raise EmptyClauseSetError(
            f"{print_formula(prop)} is not contingent: dependent forgetting has no function pairs"
        )
    return function_pairs(model, first, second, cap)


def forget_dependent_mask(
    model: KripkeModel, prop: Formula, body: Formula, cap: int = ENUMERATION_CAP
) -> int:
    out = model.full
    for pair in dependent_pairs(model, prop, cap):
        big = forget_dependent(model, pair)
        out &= extension_mask(big, body) & model.full
        if not out:
            break
    return out


def announce_mask(model: KripkeModel, prop: Formula, body: Formula) -> int:
    keep = extension_mask(model, prop)
    out = model.full & ~keep
    if keep:
        sub, old = model.restrict(keep)
        inner = extension_mask(sub, body)
        for new_i, old_i in enumerate(old):
            if inner >> new_i & 1:
                out |= 1 << old_i
    return out


def aux_mask(model: KripkeModel, first: Clause, second: Clause, index: int, body: Formula) -> int:
    return _at_copy(model, (first, second), body, index)


def _dynamic(model: KripkeModel, f: Formula) -> int:
    t = type(f)
    if t is ForgetWhether:
        return forget_whether_mask(model, f.prop, f.body)
    if t is Forget:
        return forget_mask(model, f.prop, f.body)
    if t is ForgetCond:
        return forget_conditional_mask(model, f.prop, f.body)
    if t is ForgetStrong:
        return forget_strong_mask(model, f.prop, f.body)
    if t is ForgetDep:
        return forget_dependent_mask(model, f.prop, f.body)
    if t is Announce:
        return announce_mask(model, f.prop, f.body)
    if t is Aux:
        return aux_mask(model, f.first, f.second, f.index, f.body)
    raise FormulaError(f"cannot evaluate {t.__name__}")


def extension_mask(model: KripkeModel, f: Formula) -> int:
    return _basic_mask(model, f, _dynamic)


def extension(model: KripkeModel, f: Formula) -> frozenset[str]:
    return model.labels(extension_mask(model, f))


def _bit(pointed: PointedModel, mask: int) -> bool:
    return bool(mask >> pointed.index & 1)


def sat(pointed: PointedModel, f: Formula) -> bool:
    return _bit(pointed, extension_mask(pointed.model, f))


def _require_prop(prop: Formula) -> None:
    if not is_propositional(prop):
        raise FormulaError("modal formula in forgetting argument")


def sat_forget_whether(pointed: PointedModel, prop: Formula, body: Formula) -> bool:
    _require_prop(prop)
    return _bit(pointed, forget_whether_mask(pointed.model, prop, body))


def sat_forget(pointed: PointedModel, prop: Formula, body: Formula) -> bool:
    _require_prop(prop)
    return _bit(pointed, forget_mask(pointed.model, prop, body))


def sat_forget_conditional(pointed: PointedModel, prop: Formula, body: Formula) -> bool:
    _require_prop(prop)
    return _bit(pointed, forget_conditional_mask(pointed.model, prop, body))


def sat_forget_strong(pointed: PointedModel, prop: Formula, body: Formula) -> bool:
    _require_prop(prop)
    return _bit(pointed, forget_strong_mask(pointed.model, prop, body))


def sat_forget_dependent(
    pointed: PointedModel, prop: Formula, body: Formula, cap: int = ENUMERATION_CAP
) -> bool:
    _require_prop(prop)
    return _bit(pointed, forget_dependent_mask(pointed.model, prop, body, cap))


def sat_announce(pointed: PointedModel, prop: Formula, body: Formula) -> bool:
    _require_prop(prop)
    return _bit(pointed, announce_mask(pointed.model, prop, body))


def sat_aux(pointed: PointedModel, first: Clause, second: Clause, index: int, body: Formula) -> bool:
    return _bit(pointed, aux_mask(pointed.model, first, second, index, body))


def dependent_countermodel(
    pointed: PointedModel, prop: Formula, body: Formula, cap: int = ENUMERATION_CAP
) -> Optional[tuple[ForgettingFunctionPair, PointedModel]]:
    """First function pair (in enumeration order) whose model falsifies ``body`` at ``(w, d0)``."""
    for pair in dependent_pairs(pointed.model, prop, cap):
        big = forget_dependent(pointed.model, pair)
        p = PointedModel(big, f"{pointed.point}#d0")
        if not sat(p, body):
            return pair, p
    return None


# --------------------------------------------------------------------------
# Per-outcome traces for the CLI


@dataclass(frozen=True)
class Outcome:
    modality: str
    clauses: tuple
    verdict: bool


def trace(pointed: PointedModel, f: Formula) -> list[Outcome]:
    """Per-outcome verdicts of the forgetting modalities evaluated at the point itself.

    Only occurrences reachable through Boolean connectives are reported;
    those under ``K`` or another modality are evaluated elsewhere.
    """
    out: list[Outcome] = []
    model, w = pointed.model, pointed.point

    def at0(clauses, body):
        big = forget_multiclause(model, clauses)
        return sat(PointedModel(big, f"{w}#0"), body)

    def walk(g):
        if isinstance(g, Not):
            walk(g.arg)
        elif isinstance(g, BINARY):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, (ForgetWhether, Forget, ForgetStrong, ForgetCond, ForgetDep)):
            label = print_formula(g)
            if isinstance(g, ForgetWhether):
                choices = whether_outcomes(g.prop)
            elif isinstance(g, ForgetStrong):
                choices = [tuple(strong_clauses(g.prop))]
            elif isinstance(g, ForgetCond) and not sat(pointed, Know(g.prop)):
                out.append(Outcome(label, (), sat(pointed, g.body)))
                return
            elif isinstance(g, ForgetDep):
                for pair in dependent_pairs(model, g.prop):
                    big = forget_dependent(model, pair)
                    clauses = tuple(
                        f"{v}:{pair.f1[v]}/{pair.f2[v]}" for v in model.worlds
                    )
                    out.append(Outcome(label, clauses, sat(PointedModel(big, f"{w}#d0"), g.body)))
                return
            else:
                choices = [(d,) for d in clausal_form(g.prop)]
            for clauses in choices:
                out.append(Outcome(label, tuple(str(d) for d in clauses), at0(clauses, g.body)))

    walk(f)
    return out
