"""Model-building operations: clause-falsifying copies, announcements, action models."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Sequence

from .formula import Atom, Bot, CapExceeded, Clause, Formula, FormulaError, Top, is_propositional
from .kripke import KripkeModel, ModelError, extension_mask, _bits

ENUMERATION_CAP = 10**6


class EmptyModelError(ModelError):
    """An update left no worlds."""


def _dependent_masks(model: KripkeModel, choices: Sequence[Sequence[Clause]]) -> dict[str, int]:
    """Valuation masks for ``len(choices) + 1`` stacked copies of ``model``.

    Copy ``i >= 1`` falsifies, at world ``w``, the clause ``choices[i - 1][w]``.
    """
    n = len(model)
    signs = [[{l.atom: l.positive for l in d.literals} for d in per_world] for per_world in choices]
    atoms = set(model.atom_masks)
    for per_world in signs:
        for sd in per_world:
            atoms.update(sd)
    masks = {}
    for p in atoms:
        orig = model.atom_masks.get(p, 0)
        m = orig
        for i, per_world in enumerate(signs, start=1):
            block = 0
            for w, sd in enumerate(per_world):
                positive = sd.get(p)
                if positive is None:
                    block |= orig & (1 << w)
                elif not positive:
                    block |= 1 << w
            m |= block << (i * n)
        masks[p] = m
    return masks


def _stack(model: KripkeModel, copies: int, tags: Sequence[str], masks) -> KripkeModel:
    n = len(model)
    rep = sum(1 << (j * n) for j in range(copies))
    succ = tuple(s * rep for s in model.succ) * copies
    worlds = [f"{w}#{t}" for t in tags for w in model.worlds]
    return KripkeModel.from_masks(worlds, succ, masks)


def forget_multiclause(model: KripkeModel, clauses: Sequence[Clause]) -> KripkeModel:
    """Append one copy of ``model`` per clause, falsifying that clause throughout.

    World ``(w, i)`` is labelled ``"w#i"``: index 0 is the untouched copy and
    index ``i >= 1`` falsifies ``clauses[i - 1]``.  Every copy sees every
    copy of the original successors.
    """
    clauses = tuple(clauses)
    n = len(model)
    full = model.full
    signs = []
    atoms = set(model.atom_masks)
    for d in clauses:
        if d.is_tautological():
            raise FormulaError(f"clause {d} is tautological")
        sd = {l.atom: l.positive for l in d.literals}
        signs.append(sd)
        atoms.update(sd)
    masks = {}
    for p in atoms:
        orig = model.atom_masks.get(p, 0)
        m = orig
        for i, sd in enumerate(signs, start=1):
            positive = sd.get(p)
            if positive is None:
                m |= orig << (i * n)
            elif not positive:
                m |= full << (i * n)
        masks[p] = m
    return _stack(model, len(clauses) + 1, [str(i) for i in range(len(clauses) + 1)], masks)


@dataclass(frozen=True)
class ForgettingFunctionPair:
    """Per-world clause choices ``f1: W -> first`` and ``f2: W -> second``."""

    f1: Mapping[str, Clause]
    f2: Mapping[str, Clause]
    first: tuple = field(default=())
    second: tuple = field(default=())

    def __post_init__(self):
        for f, allowed, name in ((self.f1, self.first, "f1"), (self.f2, self.second, "f2")):
            if allowed:
                bad = [d for d in f.values() if d not in allowed]
                if bad:
                    raise ModelError(f"{name} maps to {bad[0]}, outside its clause set")
            for d in f.values():
                if d.is_tautological():
                    raise FormulaError(f"clause {d} is tautological")

    def check_total(self, model: KripkeModel) -> None:
        for f, name in ((self.f1, "f1"), (self.f2, "f2")):
            missing = [w for w in model.worlds if w not in f]
            if missing:
                raise ModelError(f"{name} is undefined on world {missing[0]!r}")


def forget_dependent(model: KripkeModel, pair: ForgettingFunctionPair) -> KripkeModel:
    """Three copies tagged ``d0``/``d1``/``d2``; copy ``di`` falsifies ``fi(w)`` at each ``w``."""
    pair.check_total(model)
    choices = [
        [pair.f1[w] for w in model.worlds],
        [pair.f2[w] for w in model.worlds],
    ]
    return _stack(model, 3, ["d0", "d1", "d2"], _dependent_masks(model, choices))


def function_pairs(
    model: KripkeModel,
    first: Sequence[Clause],
    second: Sequence[Clause],
    cap: int = ENUMERATION_CAP,
) -> Iterator[ForgettingFunctionPair]:
    """All forgetting function pairs, ``f1`` outermost, earlier worlds varying slowest."""
    n = len(model)
    first, second = tuple(first), tuple(second)
    if not first or not second:
        return
    total = len(first) ** n * len(second) ** n
    if total > cap:
        raise CapExceeded(f"{total} forgetting function pairs exceed the cap of {cap}")
    for c1 in itertools.product(first, repeat=n):
        for c2 in itertools.product(second, repeat=n):
            yield ForgettingFunctionPair(
                dict(zip(model.worlds, c1)), dict(zip(model.worlds, c2)), first, second
            )


def announce(model: KripkeModel, prop: Formula) -> Optional[KripkeModel]:
    """Restrict ``model`` to the worlds satisfying ``prop``; None when none do."""
    if not is_propositional(prop):
        raise FormulaError("announced formula must be propositional")
    keep = extension_mask(model, prop)
    if not keep:
        return None
    return model.restrict(keep)[0]


# --------------------------------------------------------------------------
# Action models


@dataclass(frozen=True)
class ActionModel:
    """Actions with preconditions and per-atom postconditions.

    ``post`` lists only the changed atoms; unlisted ``(action, atom)`` pairs
    keep the atom's value.
    """

    actions: tuple
    relation: frozenset
    pre: Mapping[str, Formula]
    post: Mapping[tuple[str, str], Formula]

    def __post_init__(self):
        if not self.actions:
            raise ModelError("an action model needs at least one action")
        acts = set(self.actions)
        for a, b in self.relation:
            if a not in acts or b not in acts:
                raise ModelError(f"action relation names unknown action in ({a}, {b})")

    def precondition(self, action: str) -> Formula:
        return self.pre.get(action, Top())

    def postcondition(self, action: str, atom: str) -> Formula:
        return self.post.get((action, atom), Atom(atom))


def build_action_model(clauses: Sequence[Clause]) -> ActionModel:
    """The action model U_C: ``e0`` is the identity, ``ei`` falsifies ``clauses[i-1]``."""
    clauses = tuple(clauses)
    actions = tuple(f"e{i}" for i in range(len(clauses) + 1))
    post = {}
    for i, d in enumerate(clauses, start=1):
        if d.is_tautological():
            raise FormulaError(f"clause {d} is tautological")
        for lit in d:
            post[(actions[i], lit.atom)] = Bot() if lit.positive else Top()
    return ActionModel(
        actions=actions,
        relation=frozenset(itertools.product(actions, repeat=2)),
        pre={a: Top() for a in actions},
        post=post,
    )


def product_update(model: KripkeModel, action_model: ActionModel) -> KripkeModel:
    """Restricted product ``M ⊗ U``; worlds ``(w, e)`` are labelled ``"w#e"``."""
    acts = action_model.actions
    pre_ext = [extension_mask(model, action_model.precondition(e)) for e in acts]
    cells = [(a, i) for a in range(len(acts)) for i in _bits(pre_ext[a])]
    if not cells:
        raise EmptyModelError("no world satisfies any action precondition")
    pos = {c: k for k, c in enumerate(cells)}
    arel = [[(acts[a], acts[b]) in action_model.relation for b in range(len(acts))] for a in range(len(acts))]
    succ = []
    for a, i in cells:
        s = 0
        for b, j in cells:
            if arel[a][b] and model.succ[i] >> j & 1:
                s |= 1 << pos[(b, j)]
        succ.append(s)
    atoms = set(model.atom_masks) | {p for (_, p) in action_model.post}
    masks = {}
    for p in atoms:
        m = 0
        for a, e in enumerate(acts):
            ext = extension_mask(model, action_model.postcondition(e, p))
            for i in _bits(ext & pre_ext[a]):
                m |= 1 << pos[(a, i)]
        masks[p] = m
    worlds = [f"{model.worlds[i]}#{acts[a]}" for a, i in cells]
    return KripkeModel.from_masks(worlds, succ, masks)
