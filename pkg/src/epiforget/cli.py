"""Command-line interface: ``epiforget <command> ...``.

Exit codes: 0 true/success, 1 false, 2 usage/parse/IO error, 3 cap exceeded.
Every file argument accepts ``-`` for stdin.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .clausal import clausal_form
from .formula import CapExceeded, FormulaError, Not, atoms_of, parse_clause, parse_formula, print_formula
from .kripke import (
    FRAME_CLASSES,
    PROPERTIES,
    KripkeModel,
    ModelError,
    PointedModel,
    bisimilar,
    frame_properties,
    loads_model,
    model_to_json,
)
from .search import SEARCH_CAP, SearchSpec, check_valid_bounded
from .semantics import EmptyClauseSetError, sat, strong_clauses, trace, whether_outcomes
from .transform import (
    ENUMERATION_CAP,
    ForgettingFunctionPair,
    forget_dependent,
    forget_multiclause,
    function_pairs,
)
from .translate import translate

EXIT_TRUE, EXIT_FALSE, EXIT_ERROR, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"{path}: {e.strerror}") from None


def _load_model(path: str) -> tuple[KripkeModel, Optional[str]]:
    try:
        return loads_model(_read(path))
    except ModelError as e:
        raise UsageError(f"{path}: {e}") from None


def _pointed(path: str, point: Optional[str]) -> PointedModel:
    model, default = _load_model(path)
    point = point or default
    if point is None:
        raise UsageError(f"{path}: no evaluation point (set \"point\" or pass --point)")
    if point not in model.index:
        raise UsageError(f"{path}: unknown world {point!r}")
    return PointedModel(model, point)


def _formula(text: str):
    return parse_formula(_read("-") if text == "-" else text)


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def _copy_point(point: Optional[str], tag: str) -> Optional[str]:
    return None if point is None else f"{point}#{tag}"


# --------------------------------------------------------------------------
# Commands


def cmd_check(args) -> int:
    pointed = _pointed(args.model, args.point)
    f = _formula(args.formula)
    verdict = sat(pointed, f)
    outcomes = trace(pointed, f) if args.trace else []
    if args.format == "json":
        obj = {"verdict": verdict, "point": pointed.point, "formula": print_formula(f)}
        if args.trace:
            obj["trace"] = [
                {"modality": o.modality, "clauses": list(o.clauses), "verdict": o.verdict}
                for o in outcomes
            ]
        _emit(obj)
    else:
        print("true" if verdict else "false")
        for o in outcomes:
            choice = " ".join(o.clauses) if o.clauses else "(unchanged)"
            print(f"  {o.modality}  {choice}  {'true' if o.verdict else 'false'}")
    return EXIT_TRUE if verdict else EXIT_FALSE


def cmd_clauses(args) -> int:
    cs = clausal_form(_formula(args.formula))
    if args.format == "json":
        _emit([[str(l) for l in d.sorted_literals] for d in cs])
    elif args.lines:
        if not cs:
            print("{}")
        for d in cs:
            print(d)
    else:
        print(cs)
    return EXIT_TRUE


def _load_pair(path: str, model: KripkeModel, first, second) -> ForgettingFunctionPair:
    try:
        obj = json.loads(_read(path))
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from None
    if not isinstance(obj, dict) or set(obj) != {"f1", "f2"}:
        raise UsageError(f'{path}: expected an object with keys "f1" and "f2"')
    maps = []
    for key in ("f1", "f2"):
        part = obj[key]
        if not isinstance(part, dict) or not all(isinstance(v, str) for v in part.values()):
            raise UsageError(f"{path}: $.{key} must map worlds to clause strings")
        unknown = [w for w in part if w not in model.index]
        if unknown:
            raise UsageError(f"{path}: $.{key}: undeclared world {unknown[0]!r}")
        maps.append({w: parse_clause(v) for w, v in part.items()})
    try:
        pair = ForgettingFunctionPair(maps[0], maps[1], tuple(first), tuple(second))
        pair.check_total(model)
    except ModelError as e:
        raise UsageError(f"{path}: {e}") from None
    return pair


def _pair_json(pair: ForgettingFunctionPair, model: KripkeModel) -> dict:
    return {
        "f1": {w: str(pair.f1[w]) for w in model.worlds},
        "f2": {w: str(pair.f2[w]) for w in model.worlds},
    }


def cmd_forget(args) -> int:
    model, point = _load_model(args.model)
    prop = _formula(args.prop)
    if args.point:
        point = args.point
    results = []
    if args.mode == "fw":
        for d1, d2 in whether_outcomes(prop):
            big = forget_multiclause(model, (d1, d2))
            results.append({"clauses": [str(d1), str(d2)], "model": model_to_json(big, _copy_point(point, "0"))})
    elif args.mode == "f":
        for d in clausal_form(prop):
            big = forget_multiclause(model, (d,))
            results.append({"clauses": [str(d)], "model": model_to_json(big, _copy_point(point, "0"))})
    elif args.mode == "fs":
        cs = strong_clauses(prop)
        big = forget_multiclause(model, cs)
        results.append({"clauses": [str(d) for d in cs], "model": model_to_json(big, _copy_point(point, "0"))})
    else:
        first, second = clausal_form(prop), clausal_form(Not(prop))
        if not first or not second:
            raise EmptyClauseSetError(
                f"{print_formula(prop)} is not contingent: no forgetting function pairs, "
                "so [fd] holds vacuously"
            )
        if args.pair:
            pairs = [_load_pair(args.pair, model, first, second)]
        elif args.enumerate:
            pairs = function_pairs(model, first, second, args.cap)
        else:
            raise UsageError("fd needs --pair FILE or --enumerate")
        for pair in pairs:
            big = forget_dependent(model, pair)
            results.append({"pair": _pair_json(pair, model), "model": model_to_json(big, _copy_point(point, "d0"))})
    if not results:
        print(
            f"note: no outcomes for {args.mode} {print_formula(prop)}; the operator holds vacuously",
            file=sys.stderr,
        )
    _emit(results)
    return EXIT_TRUE


def cmd_translate(args) -> int:
    out = translate(_formula(args.formula))
    if args.format == "json":
        _emit({"formula": print_formula(out)})
    else:
        print(print_formula(out))
    return EXIT_TRUE


def cmd_valid(args) -> int:
    f = _formula(args.formula)
    atoms = tuple(a for a in args.atoms.split(",") if a) if args.atoms else atoms_of(f) or ("p",)
    spec = SearchSpec(args.worlds, atoms, args.frame, cap=args.cap, symmetry=not args.no_symmetry)
    verdict = check_valid_bounded(f, spec, jobs=args.jobs)
    cm = verdict.countermodel
    if args.format == "json":
        obj = {"verdict": verdict.label}
        if cm is not None:
            obj["countermodel"] = model_to_json(cm.model, cm.point)
        _emit(obj)
    elif cm is None:
        print(verdict.label)
    else:
        print(verdict.label)
        _emit(model_to_json(cm.model, cm.point))
    return EXIT_TRUE if cm is None else EXIT_FALSE


def cmd_bisim(args) -> int:
    p1 = _pointed(args.first, args.point1)
    p2 = _pointed(args.second, args.point2)
    same = bisimilar(p1, p2)
    label = "bisimilar" if same else "not-bisimilar"
    if args.format == "json":
        _emit({"verdict": label})
    else:
        print(label)
    return EXIT_TRUE if same else EXIT_FALSE


def cmd_frame(args) -> int:
    model, _ = _load_model(args.model)
    props = frame_properties(model)
    held = [p for p in PROPERTIES if p in props]
    classes = [c for c, req in FRAME_CLASSES.items() if req <= props]
    if args.format == "json":
        _emit({"properties": held, "classes": classes})
    else:
        for p in held:
            print(p)
    return EXIT_TRUE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epiforget", description="Forgetting operators on epistemic Kripke models."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def fmt(p):
        p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("check", help="evaluate a formula at a pointed model")
    p.add_argument("model", help="JSON model file or -")
    p.add_argument("formula")
    p.add_argument("--point", help="evaluation world (overrides the model's point)")
    p.add_argument("--trace", action="store_true", help="per-outcome verdicts of forgetting modalities")
    fmt(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("clauses", help="canonical clausal form of a propositional formula")
    p.add_argument("formula")
    p.add_argument("--lines", action="store_true", help="one clause per line")
    fmt(p)
    p.set_defaults(func=cmd_clauses)

    p = sub.add_parser("forget", help="build the forgetting outcome models")
    p.add_argument("model")
    p.add_argument("mode", choices=("fw", "f", "fs", "fd"))
    p.add_argument("prop")
    p.add_argument("--point")
    p.add_argument("--pair", help="fd only: JSON file {\"f1\": {world: clause}, \"f2\": {...}}")
    p.add_argument("--enumerate", action="store_true", help="fd only: every forgetting function pair")
    p.add_argument("--cap", type=int, default=ENUMERATION_CAP)
    p.set_defaults(func=cmd_forget)

    p = sub.add_parser("translate", help="compile into the basic modal language")
    p.add_argument("formula")
    fmt(p)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("valid", help="bounded countermodel search")
    p.add_argument("formula")
    p.add_argument("--worlds", type=int, default=3)
    p.add_argument("--atoms", help="comma-separated atom universe (default: atoms of the formula)")
    p.add_argument("--frame", choices=tuple(FRAME_CLASSES), default="K")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--cap", type=int, default=SEARCH_CAP)
    p.add_argument("--no-symmetry", action="store_true", help="visit every model, not one per isomorphism class")
    fmt(p)
    p.set_defaults(func=cmd_valid)

    p = sub.add_parser("bisim", help="bisimilarity of two pointed models")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--point1")
    p.add_argument("--point2")
    fmt(p)
    p.set_defaults(func=cmd_bisim)

    p = sub.add_parser("frame", help="relational properties of a model")
    p.add_argument("model")
    fmt(p)
    p.set_defaults(func=cmd_frame)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code else EXIT_TRUE
    try:
        return args.func(args)
    except CapExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, FormulaError, ModelError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
