"""Kripke models, basic satisfaction, frame properties, bisimulation, isomorphism.

Worlds are string labels.  Internally a model stores, per world index, the
set of successors as an int bitmask, and per atom the set of worlds where it
holds, also as a bitmask.  Truth sets ("extensions") are bitmasks too.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Mapping, Optional

from .formula import (
    And,
    Atom,
    Bot,
    Formula,
    FormulaError,
    Iff,
    Implies,
    Know,
    Not,
    Or,
    Top,
    _ATOM_RE,
)

ISOMORPHISM_CAP = 64

PROPERTIES = ("serial", "reflexive", "transitive", "symmetric", "euclidean")

FRAME_CLASSES: dict[str, frozenset[str]] = {
    "K": frozenset(),
    "T": frozenset({"reflexive"}),
    "K4": frozenset({"transitive"}),
    "K5": frozenset({"euclidean"}),
    "S4": frozenset({"reflexive", "transitive"}),
    "S5": frozenset({"reflexive", "symmetric", "transitive"}),
    "serial": frozenset({"serial"}),
}


class ModelError(ValueError):
    pass


class ModelFormatError(ModelError):
    """Malformed model JSON; the message names the offending location."""


class UnsupportedFormula(FormulaError):
    pass


def _bits(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class KripkeModel:
    """An immutable Kripke model ``(W, R, V)``.

    ``valuation`` maps worlds to the atoms true there; a world missing from
    it satisfies no atom.
    """

    def __init__(
        self,
        worlds: Iterable[str],
        relation: Iterable[tuple[str, str]] = (),
        valuation: Optional[Mapping[str, Iterable[str]]] = None,
    ):
        worlds = tuple(worlds)
        if not worlds:
            raise ModelError("a model needs at least one world")
        index = {w: i for i, w in enumerate(worlds)}
        if len(index) != len(worlds):
            raise ModelError("duplicate world label")
        succ = [0] * len(worlds)
        for a, b in relation:
            if a not in index or b not in index:
                raise ModelError(f"relation pair ({a}, {b}) names an unknown world")
            succ[index[a]] |= 1 << index[b]
        masks: dict[str, int] = {}
        for w, atoms in (valuation or {}).items():
            if w not in index:
                raise ModelError(f"valuation names unknown world {w!r}")
            for p in atoms:
                if not _ATOM_RE.match(p):
                    raise ModelError(f"invalid atom name {p!r}")
                masks[p] = masks.get(p, 0) | (1 << index[w])
        self._init(worlds, tuple(succ), masks, index)

    def _init(self, worlds, succ, masks, index=None):
        self.worlds: tuple[str, ...] = worlds
        self.succ: tuple[int, ...] = succ
        self.atom_masks: dict[str, int] = {p: m for p, m in masks.items() if m}
        self._index = index

    @classmethod
    def from_masks(cls, worlds, succ, atom_masks) -> KripkeModel:
        """Fast constructor used by transforms; performs no validation."""
        m = cls.__new__(cls)
        m._init(tuple(worlds), tuple(succ), atom_masks)
        return m

    @property
    def index(self) -> dict[str, int]:
        if self._index is None:
            self._index = {w: i for i, w in enumerate(self.worlds)}
        return self._index

    def __len__(self) -> int:
        return len(self.worlds)

    @property
    def full(self) -> int:
        return (1 << len(self.worlds)) - 1

    @cached_property
    def relation(self) -> frozenset[tuple[str, str]]:
        w = self.worlds
        return frozenset((w[i], w[j]) for i, s in enumerate(self.succ) for j in _bits(s))

    @cached_property
    def valuation(self) -> dict[str, frozenset[str]]:
        out = {}
        for i, w in enumerate(self.worlds):
            out[w] = frozenset(p for p, m in self.atom_masks.items() if m >> i & 1)
        return out

    @property
    def atoms(self) -> tuple[str, ...]:
        return tuple(sorted(self.atom_masks))

    def successors(self, world: str) -> tuple[str, ...]:
        return tuple(self.worlds[j] for j in _bits(self.succ[self.index[world]]))

    def labels(self, mask: int) -> frozenset[str]:
        return frozenset(self.worlds[i] for i in _bits(mask))

    def mask(self, worlds: Iterable[str]) -> int:
        out = 0
        for w in worlds:
            out |= 1 << self.index[w]
        return out

    def world_index(self, world: str) -> int:
        try:
            return self.index[world]
        except KeyError:
            raise ModelError(f"unknown world {world!r}") from None

    def __eq__(self, other):
        if not isinstance(other, KripkeModel):
            return NotImplemented
        return (
            self.worlds == other.worlds
            and self.succ == other.succ
            and self.atom_masks == other.atom_masks
        )

    def __hash__(self):
        return hash((self.worlds, self.succ, frozenset(self.atom_masks.items())))

    def __repr__(self):
        return f"KripkeModel({len(self.worlds)} worlds, atoms={list(self.atoms)})"

    def restrict(self, keep: int) -> tuple[KripkeModel, list[int]]:
        """Submodel on the worlds in bitmask ``keep``, plus new→old indices."""
        old = list(_bits(keep))
        new_of = {o: i for i, o in enumerate(old)}
        succ = []
        for o in old:
            s = 0
            for j in _bits(self.succ[o] & keep):
                s |= 1 << new_of[j]
            succ.append(s)
        masks = {}
        for p, m in self.atom_masks.items():
            nm = 0
            for j in _bits(m & keep):
                nm |= 1 << new_of[j]
            masks[p] = nm
        return KripkeModel.from_masks([self.worlds[o] for o in old], succ, masks), old


@dataclass(frozen=True)
class PointedModel:
    model: KripkeModel
    point: str

    def __post_init__(self):
        if self.point not in self.model.index:
            raise ModelError(f"point {self.point!r} is not a world of the model")

    @property
    def index(self) -> int:
        return self.model.index[self.point]


# --------------------------------------------------------------------------
# Satisfaction for the basic modal language

Hook = Callable[[KripkeModel, Formula], int]


def extension_mask(model: KripkeModel, f: Formula, hook: Optional[Hook] = None) -> int:
    """Bitmask of the worlds satisfying ``f``.

    Nodes outside the basic language are delegated to ``hook``; without one
    they raise :class:`UnsupportedFormula`.
    """
    full = model.full

    def ev(g):
        t = type(g)
        if t is Atom:
            return model.atom_masks.get(g.name, 0)
        if t is Top:
            return full
        if t is Bot:
            return 0
        if t is Not:
            return full & ~ev(g.arg)
        if t is And:
            return ev(g.left) & ev(g.right)
        if t is Or:
            return ev(g.left) | ev(g.right)
        if t is Implies:
            return (full & ~ev(g.left)) | ev(g.right)
        if t is Iff:
            return full & ~(ev(g.left) ^ ev(g.right))
        if t is Know:
            bad = full & ~ev(g.arg)
            out = 0
            for i, s in enumerate(model.succ):
                if not s & bad:
                    out |= 1 << i
            return out
        if hook is None:
            raise UnsupportedFormula(f"{t.__name__} is outside the basic modal language")
        return hook(model, g)

    return ev(f)


def eval_basic(model: KripkeModel, world: str, f: Formula) -> bool:
    return bool(extension_mask(model, f) >> model.world_index(world) & 1)


def extension(model: KripkeModel, f: Formula) -> frozenset[str]:
    return model.labels(extension_mask(model, f))


# --------------------------------------------------------------------------
# Frames


def frame_properties(model: KripkeModel) -> frozenset[str]:
    succ = model.succ
    n = len(succ)
    props = set()
    if all(succ):
        props.add("serial")
    if all(succ[i] >> i & 1 for i in range(n)):
        props.add("reflexive")
    if all((succ[j] >> i & 1) for i in range(n) for j in _bits(succ[i])):
        props.add("symmetric")
    if all(succ[j] & ~succ[i] == 0 for i in range(n) for j in _bits(succ[i])):
        props.add("transitive")
    if all(succ[i] & ~succ[j] == 0 for i in range(n) for j in _bits(succ[i])):
        props.add("euclidean")
    return frozenset(props)


def in_frame_class(model: KripkeModel, frame_class: str) -> bool:
    try:
        required = FRAME_CLASSES[frame_class]
    except KeyError:
        raise ModelError(f"unknown frame class {frame_class!r}") from None
    return required <= frame_properties(model)


# --------------------------------------------------------------------------
# Bisimulation, isomorphism, generated submodels


def bisimulation(m1: KripkeModel, m2: KripkeModel) -> list[int]:
    """Greatest bisimulation as, for each world of ``m1``, a mask over ``m2``."""
    atoms = set(m1.atom_masks) | set(m2.atom_masks)

    def sig(m, i):
        return frozenset(p for p in atoms if m.atom_masks.get(p, 0) >> i & 1)

    sig2 = [sig(m2, j) for j in range(len(m2))]
    z = []
    for i in range(len(m1)):
        s = sig(m1, i)
        z.append(sum(1 << j for j in range(len(m2)) if sig2[j] == s))
    changed = True
    while changed:
        changed = False
        for i in range(len(m1)):
            succ_i = list(_bits(m1.succ[i]))
            reach = 0
            for i2 in succ_i:
                reach |= z[i2]
            for j in _bits(z[i]):
                succ_j = m2.succ[j]
                zig = all(z[i2] & succ_j for i2 in succ_i)
                zag = succ_j & ~reach == 0
                if not (zig and zag):
                    z[i] &= ~(1 << j)
                    changed = True
    return z


def bisimilar(p1: PointedModel, p2: PointedModel) -> bool:
    z = bisimulation(p1.model, p2.model)
    return bool(z[p1.index] >> p2.index & 1)


def _refined_colors(models: list[KripkeModel]) -> list[list[int]]:
    atoms = sorted(set().union(*(m.atom_masks for m in models)))
    colors = [
        [tuple(m.atom_masks.get(p, 0) >> i & 1 for p in atoms) for i in range(len(m))]
        for m in models
    ]
    preds = []
    for m in models:
        pr = [0] * len(m)
        for i, s in enumerate(m.succ):
            for j in _bits(s):
                pr[j] |= 1 << i
        preds.append(pr)
    while True:
        sigs = [
            [
                (
                    c[i],
                    tuple(sorted(c[j] for j in _bits(m.succ[i]))),
                    tuple(sorted(c[j] for j in _bits(pr[i]))),
                )
                for i in range(len(m))
            ]
            for m, c, pr in zip(models, colors, preds)
        ]
        table = {s: k for k, s in enumerate(sorted(set(s for ss in sigs for s in ss)))}
        new = [[table[s] for s in ss] for ss in sigs]
        old_classes = len(set(c for cs in colors for c in cs))
        colors = new
        if len(table) == old_classes:
            return colors


def isomorphic(
    m1: KripkeModel, m2: KripkeModel, cap: int = ISOMORPHISM_CAP
) -> Optional[dict[str, str]]:
    """A relation- and valuation-preserving bijection from ``m1`` to ``m2``, or None."""
    n = len(m1)
    if n > cap or len(m2) > cap:
        raise ModelError(f"isomorphism search is capped at {cap} worlds")
    if n != len(m2) or set(m1.atom_masks) != set(m2.atom_masks):
        return None
    c1, c2 = _refined_colors([m1, m2])
    if sorted(c1) != sorted(c2):
        return None
    order = sorted(range(n), key=lambda i: (c1.count(c1[i]), i))
    mapping = [-1] * n
    used = 0

    def consistent(i, j):
        for i2 in range(n):
            j2 = mapping[i2]
            if j2 < 0 and i2 != i:
                continue
            if i2 == i:
                j2 = j
            if (m1.succ[i] >> i2 & 1) != (m2.succ[j] >> j2 & 1):
                return False
            if (m1.succ[i2] >> i & 1) != (m2.succ[j2] >> j & 1):
                return False
        return True

    def extend(k):
        nonlocal used
        if k == n:
            return True
        i = order[k]
        for j in range(n):
            if used >> j & 1 or c2[j] != c1[i] or not consistent(i, j):
                continue
            mapping[i] = j
            used |= 1 << j
            if extend(k + 1):
                return True
            mapping[i] = -1
            used &= ~(1 << j)
        return False

    if not extend(0):
        return None
    return {m1.worlds[i]: m2.worlds[mapping[i]] for i in range(n)}


def reachable_mask(model: KripkeModel, start: int) -> int:
    seen = 1 << start
    frontier = seen
    while frontier:
        nxt = 0
        for i in _bits(frontier):
            nxt |= model.succ[i]
        frontier = nxt & ~seen
        seen |= nxt
    return seen


def generated_submodel(pointed: PointedModel) -> PointedModel:
    sub, _ = pointed.model.restrict(reachable_mask(pointed.model, pointed.index))
    return PointedModel(sub, pointed.point)


# --------------------------------------------------------------------------
# JSON

_KEYS = {"worlds", "relation", "valuation", "point"}


def model_from_json(obj) -> tuple[KripkeModel, Optional[str]]:
    """Validate a decoded JSON model; returns the model and its optional point."""
    if not isinstance(obj, dict):
        raise ModelFormatError("$: expected an object")
    extra = set(obj) - _KEYS
    if extra:
        raise ModelFormatError(f"$: unknown keys {sorted(extra)}")
    worlds = obj.get("worlds")
    if not isinstance(worlds, list) or not worlds:
        raise ModelFormatError("$.worlds: expected a non-empty list of strings")
    for i, w in enumerate(worlds):
        if not isinstance(w, str) or not w:
            raise ModelFormatError(f"$.worlds[{i}]: expected a non-empty string")
    if len(set(worlds)) != len(worlds):
        raise ModelFormatError("$.worlds: duplicate world label")
    declared = set(worlds)
    relation = obj.get("relation", [])
    if not isinstance(relation, list):
        raise ModelFormatError("$.relation: expected a list of pairs")
    pairs = []
    for i, pair in enumerate(relation):
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(x, str) for x in pair)
        ):
            raise ModelFormatError(f"$.relation[{i}]: expected [string, string]")
        for x in pair:
            if x not in declared:
                raise ModelFormatError(f"$.relation[{i}]: undeclared world {x!r}")
        pairs.append((pair[0], pair[1]))
    valuation = obj.get("valuation", {})
    if not isinstance(valuation, dict):
        raise ModelFormatError("$.valuation: expected an object")
    for w, atoms in valuation.items():
        if w not in declared:
            raise ModelFormatError(f"$.valuation: undeclared world {w!r}")
        if not isinstance(atoms, list):
            raise ModelFormatError(f"$.valuation.{w}: expected a list of atoms")
        for a in atoms:
            if not isinstance(a, str) or not _ATOM_RE.match(a):
                raise ModelFormatError(f"$.valuation.{w}: invalid atom {a!r}")
    point = obj.get("point")
    if point is not None and point not in declared:
        raise ModelFormatError(f"$.point: undeclared world {point!r}")
    return KripkeModel(worlds, pairs, valuation), point


def model_to_json(model: KripkeModel, point: Optional[str] = None) -> dict:
    val = model.valuation
    out = {
        "worlds": list(model.worlds),
        "relation": [
            [model.worlds[i], model.worlds[j]]
            for i, s in enumerate(model.succ)
            for j in _bits(s)
        ],
        "valuation": {w: sorted(val[w]) for w in model.worlds if val[w]},
    }
    if point is not None:
        out["point"] = point
    return out


def loads_model(text: str) -> tuple[KripkeModel, Optional[str]]:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"line {e.lineno} column {e.colno}: {e.msg}") from None
    return model_from_json(obj)


def dumps_model(model: KripkeModel, point: Optional[str] = None) -> str:
    return json.dumps(model_to_json(model, point), indent=2)
