"""Bounded countermodel search and seeded random instances.

Canonical enumeration order, for a given atom universe ``a_0 < ... < a_{k-1}``:

1. number of worlds ``n`` ascending (worlds are labelled ``w0 .. w{n-1}``);
2. relation bitmask ascending, where bit ``i*n + j`` means ``w_i R w_j``;
3. valuation bitmask ascending, where bit ``w*k + a`` means atom ``a`` holds at ``w``;
4. evaluation point index ascending.

With ``symmetry=True`` only the first model of each isomorphism class (in
the order above) is visited.  Satisfaction is invariant under isomorphism,
so the first countermodel found is the same either way.
"""

from __future__ import annotations

import functools
import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .formula import (
    And,
    Announce,
    Atom,
    Aux,
    Bot,
    CapExceeded,
    Clause,
    Formula,
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
    atoms_of,
)
from .kripke import FRAME_CLASSES, KripkeModel, PointedModel, frame_properties, in_frame_class
from .semantics import extension_mask, sat

SEARCH_CAP = 2_000_000


@dataclass(frozen=True)
class SearchSpec:
    max_worlds: int
    atoms: tuple = ("p",)
    frame_class: str = "K"
    cap: int = SEARCH_CAP
    symmetry: bool = True

    def __post_init__(self):
        if self.max_worlds < 1:
            raise ValueError("max_worlds must be at least 1")
        object.__setattr__(self, "atoms", tuple(sorted(set(self.atoms))))
        if not self.atoms:
            raise ValueError("the atom universe must be non-empty")
        if self.frame_class not in FRAME_CLASSES:
            raise ValueError(f"unknown frame class {self.frame_class!r}")

    @classmethod
    def for_formula(cls, f: Formula, max_worlds: int, **kw) -> SearchSpec:
        return cls(max_worlds, atoms_of(f) or ("p",), **kw)


def enumeration_size(spec: SearchSpec) -> int:
    k = len(spec.atoms)
    return sum(2 ** (n * n) * 2 ** (n * k) * n for n in range(1, spec.max_worlds + 1))


def _check_cap(spec: SearchSpec) -> None:
    size = enumeration_size(spec)
    if size > spec.cap:
        raise CapExceeded(f"{size} pointed models exceed the search cap of {spec.cap}")


def _permute_rel(rel: int, perm: Sequence[int], n: int) -> int:
    out = 0
    for i in range(n):
        for j in range(n):
            if rel >> (i * n + j) & 1:
                out |= 1 << (perm[i] * n + perm[j])
    return out


@functools.lru_cache(maxsize=None)
def _val_tables(n: int, k: int) -> tuple:
    tables = []
    for perm in itertools.permutations(range(n)):
        row = []
        for val in range(1 << (n * k)):
            out = 0
            for w in range(n):
                for a in range(k):
                    if val >> (w * k + a) & 1:
                        out |= 1 << (perm[w] * k + a)
            row.append(out)
        tables.append(row)
    return tuple(tables)


def model_from_code(n: int, rel: int, val: int, atoms: Sequence[str]) -> KripkeModel:
    k = len(atoms)
    low = (1 << n) - 1
    succ = [(rel >> (i * n)) & low for i in range(n)]
    masks = {}
    for a, p in enumerate(atoms):
        m = 0
        for w in range(n):
            if val >> (w * k + a) & 1:
                m |= 1 << w
        masks[p] = m
    return KripkeModel.from_masks([f"w{i}" for i in range(n)], succ, masks)


def _relations(n: int, frame_class: str, symmetry: bool) -> Iterator[tuple[int, list[int]]]:
    """Relation codes in order, each with the permutation indices that fix it."""
    perms = list(itertools.permutations(range(n)))
    required = FRAME_CLASSES[frame_class]
    low = (1 << n) - 1
    for rel in range(1 << (n * n)):
        if required:
            succ = [(rel >> (i * n)) & low for i in range(n)]
            if not required <= frame_properties(KripkeModel.from_masks(range(n), succ, {})):
                continue
        if not symmetry:
            yield rel, []
            continue
        stabilizer = []
        for idx, perm in enumerate(perms):
            r = _permute_rel(rel, perm, n)
            if r < rel:
                break
            if r == rel:
                stabilizer.append(idx)
        else:
            yield rel, stabilizer


def _codes(spec: SearchSpec, n: int, rels=None) -> Iterator[tuple[int, int]]:
    k = len(spec.atoms)
    tables = _val_tables(n, k) if spec.symmetry else None
    source = rels if rels is not None else _relations(n, spec.frame_class, spec.symmetry)
    for rel, stabilizer in source:
        for val in range(1 << (n * k)):
            if spec.symmetry and any(tables[s][val] < val for s in stabilizer):
                continue
            yield rel, val


def iter_models(spec: SearchSpec) -> Iterator[KripkeModel]:
    """Every model within ``spec`` (one per isomorphism class if ``spec.symmetry``)."""
    _check_cap(spec)
    for n in range(1, spec.max_worlds + 1):
        for rel, val in _codes(spec, n):
            yield model_from_code(n, rel, val, spec.atoms)


def _first_failure(f, spec, n, rels) -> Optional[tuple[int, int, int]]:
    for rel, val in _codes(spec, n, rels):
        model = model_from_code(n, rel, val, spec.atoms)
        bad = model.full & ~extension_mask(model, f)
        if bad:
            return rel, val, (bad & -bad).bit_length() - 1
    return None


def iter_countermodels(f: Formula, spec: SearchSpec) -> Iterator[PointedModel]:
    """All falsifying pointed models within ``spec``, in canonical order."""
    for model in iter_models(spec):
        bad = model.full & ~extension_mask(model, f)
        for i in range(len(model)):
            if bad >> i & 1:
                pointed = PointedModel(model, model.worlds[i])
                assert not sat(pointed, f)
                yield pointed


def find_countermodel(f: Formula, spec: SearchSpec, jobs: int = 1) -> Optional[PointedModel]:
    """The canonically first pointed model within ``spec`` falsifying ``f``, or None."""
    if jobs <= 1:
        return next(iter_countermodels(f, spec), None)
    _check_cap(spec)
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for n in range(1, spec.max_worlds + 1):
            rels = list(_relations(n, spec.frame_class, spec.symmetry))
            size = max(1, -(-len(rels) // jobs))
            chunks = [rels[i : i + size] for i in range(0, len(rels), size)]
            results = list(pool.map(_first_failure, *zip(*[(f, spec, n, c) for c in chunks])))
            found = [r for r in results if r is not None]
            if found:
                rel, val, point = min(found)
                model = model_from_code(n, rel, val, spec.atoms)
                pointed = PointedModel(model, model.worlds[point])
                assert not sat(pointed, f)
                return pointed
    return None


@dataclass(frozen=True)
class BoundedVerdict:
    """Outcome of a bounded search; absence of a countermodel is not a validity proof."""

    spec: SearchSpec
    countermodel: Optional[PointedModel] = None

    @property
    def label(self) -> str:
        return "no-countermodel-at-bound" if self.countermodel is None else "countermodel"

    @property
    def holds_at_bound(self) -> bool:
        return self.countermodel is None


def check_valid_bounded(f: Formula, spec: SearchSpec, jobs: int = 1) -> BoundedVerdict:
    return BoundedVerdict(spec, find_countermodel(f, spec, jobs))


# --------------------------------------------------------------------------
# Random instances


def close_relation(succ: list[int], frame_class: str, rng: random.Random) -> list[int]:
    """Smallest-effort closure of ``succ`` into ``frame_class``."""
    succ = list(succ)
    n = len(succ)
    required = FRAME_CLASSES[frame_class]
    if "serial" in required:
        for i in range(n):
            if not succ[i]:
                succ[i] = 1 << rng.randrange(n)
    if "reflexive" in required:
        for i in range(n):
            succ[i] |= 1 << i
    if "symmetric" in required:
        for i in range(n):
            for j in range(n):
                if succ[i] >> j & 1:
                    succ[j] |= 1 << i
    if "transitive" in required:
        changed = True
        while changed:
            changed = False
            for i in range(n):
                reach = succ[i]
                for j in range(n):
                    if succ[i] >> j & 1:
                        reach |= succ[j]
                if reach != succ[i]:
                    succ[i] = reach
                    changed = True
    if "euclidean" in required:
        changed = True
        while changed:
            changed = False
            for i in range(n):
                for j in range(n):
                    if succ[i] >> j & 1 and succ[i] & ~succ[j]:
                        succ[j] |= succ[i]
                        changed = True
    return succ


def random_model(
    rng: random.Random,
    worlds: tuple[int, int] = (1, 3),
    atoms: Sequence[str] = ("p", "q"),
    frame_class: str = "K",
    edge_prob: float = 0.4,
) -> KripkeModel:
    n = rng.randint(*worlds)
    succ = [sum(1 << j for j in range(n) if rng.random() < edge_prob) for _ in range(n)]
    succ = close_relation(succ, frame_class, rng)
    masks = {p: sum(1 << w for w in range(n) if rng.random() < 0.5) for p in atoms}
    model = KripkeModel.from_masks([f"w{i}" for i in range(n)], succ, masks)
    assert in_frame_class(model, frame_class)
    return model


def random_prop(rng: random.Random, atoms: Sequence[str], depth: int) -> Formula:
    if depth <= 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.08:
            return Top()
        if r < 0.16:
            return Bot()
        return Atom(rng.choice(list(atoms)))
    op = rng.choice(["not", "and", "or", "implies", "iff"])
    if op == "not":
        return Not(random_prop(rng, atoms, depth - 1))
    cls = {"and": And, "or": Or, "implies": Implies, "iff": Iff}[op]
    return cls(random_prop(rng, atoms, depth - 1), random_prop(rng, atoms, depth - 1))


def random_clause(rng: random.Random, atoms: Sequence[str]) -> Clause:
    lits = []
    for p in atoms:
        r = rng.randrange(3)
        if r:
            lits.append(Literal(p, r == 1))
    return Clause(lits)


_DYNAMIC = {
    "fw": ForgetWhether,
    "f": Forget,
    "fc": ForgetCond,
    "fs": ForgetStrong,
    "fd": ForgetDep,
    "!": Announce,
}


def random_formula(
    rng: random.Random,
    atoms: Sequence[str] = ("p", "q"),
    depth: int = 2,
    dynamic: Sequence[str] = (),
    max_dynamic: int = 2,
    prop_depth: int = 1,
) -> Formula:
    """Random formula of nesting depth at most ``depth``.

    ``dynamic`` names the modalities that may occur (``fw f fc fs fd ! aux``);
    at most ``max_dynamic`` occurrences in total.
    """
    budget = [max_dynamic]

    def gen(d):
        if d <= 0 or rng.random() < 0.2:
            r = rng.random()
            if r < 0.1:
                return Top()
            if r < 0.15:
                return Bot()
            return Atom(rng.choice(list(atoms)))
        ops = ["not", "and", "or", "implies", "iff", "K", "K"]
        if dynamic and budget[0] > 0:
            ops += ["dyn"] * 3
        op = rng.choice(ops)
        if op == "not":
            return Not(gen(d - 1))
        if op == "K":
            return Know(gen(d - 1))
        if op == "dyn":
            budget[0] -= 1
            kind = rng.choice(list(dynamic))
            if kind == "aux":
                d1, d2 = random_clause(rng, atoms), random_clause(rng, atoms)
                return Aux(d1, d2, rng.randrange(3), gen(d - 1))
            return _DYNAMIC[kind](random_prop(rng, atoms, prop_depth), gen(d - 1))
        cls = {"and": And, "or": Or, "implies": Implies, "iff": Iff}[op]
        return cls(gen(d - 1), gen(d - 1))

    return gen(depth)


@dataclass(frozen=True)
class GeneratorSpec:
    worlds: tuple = (1, 3)
    atoms: tuple = ("p", "q")
    frame_class: str = "K"
    edge_prob: float = 0.4
    depth: int = 2
    dynamic: tuple = field(default=())
    max_dynamic: int = 2
    prop_depth: int = 1


def random_instances(seed: int, spec: GeneratorSpec = GeneratorSpec()) -> Iterator[tuple[PointedModel, Formula]]:
    """Endless deterministic stream of (pointed model, formula) pairs."""
    rng = random.Random(seed)
    while True:
        model = random_model(rng, spec.worlds, spec.atoms, spec.frame_class, spec.edge_prob)
        point = model.worlds[rng.randrange(len(model))]
        f = random_formula(
            rng, spec.atoms, spec.depth, spec.dynamic, spec.max_dynamic, spec.prop_depth
        )
        yield PointedModel(model, point), f
