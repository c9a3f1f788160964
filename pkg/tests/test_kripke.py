import json
import random

import pytest

from epiforget.formula import parse_formula
from epiforget.kripke import (
    KripkeModel,
    ModelError,
    ModelFormatError,
    PointedModel,
    UnsupportedFormula,
    bisimilar,
    bisimulation,
    dumps_model,
    eval_basic,
    extension,
    frame_properties,
    generated_submodel,
    in_frame_class,
    isomorphic,
    loads_model,
)
from epiforget.search import random_formula, random_model
from epiforget.transform import forget_multiclause

from conftest import load_pointed

ALL = {"serial", "reflexive", "transitive", "symmetric", "euclidean"}


def knows_p():
    return load_pointed("knows_p.json")


def test_eval_basic_examples():
    p = knows_p()
    assert eval_basic(p.model, "w0", parse_formula("K p"))
    assert eval_basic(p.model, "w1", parse_formula("T"))
    assert eval_basic(p.model, "w1", parse_formula("K F"))
    with pytest.raises(ModelError):
        eval_basic(p.model, "nowhere", parse_formula("p"))
    with pytest.raises(UnsupportedFormula):
        eval_basic(p.model, "w0", parse_formula("[fw p] p"))


def test_extension_examples():
    m = knows_p().model
    assert extension(m, parse_formula("p")) == {"w0", "w1"}
    assert extension(m, parse_formula("T")) == {"w0", "w1"}
    assert extension(m, parse_formula("F")) == set()


def test_frame_properties():
    assert frame_properties(load_pointed("loop_pq.json").model) == ALL
    assert frame_properties(knows_p().model) == {"transitive"}
    full = KripkeModel(["a", "b"], [(x, y) for x in "ab" for y in "ab"], {})
    assert frame_properties(full) == ALL
    assert in_frame_class(full, "S5")
    assert not in_frame_class(knows_p().model, "serial")


def test_bisimilar_examples():
    p = knows_p()
    assert bisimilar(p, p)
    dup = KripkeModel(["w0", "w1", "w2"], [("w0", "w0"), ("w0", "w1"), ("w0", "w2")], {w: ["p"] for w in ("w0", "w1", "w2")})
    assert bisimilar(p, PointedModel(dup, "w0"))
    assert not bisimilar(p, PointedModel(p.model, "w1"))
    assert len(bisimulation(p.model, dup)) == 2


def test_isomorphic_examples():
    m = knows_p().model
    assert isomorphic(m, m) == {"w0": "w0", "w1": "w1"}
    other = KripkeModel(["w0", "w1"], [("w0", "w0"), ("w0", "w1")], {"w0": ["p"]})
    assert isomorphic(m, other) is None
    swapped = KripkeModel(["b", "a"], [("a", "a"), ("a", "b")], {"a": ["p"], "b": ["p"]})
    assert isomorphic(m, swapped) == {"w0": "a", "w1": "b"}


def test_generated_submodel_examples():
    p = knows_p()
    assert generated_submodel(p).model == p.model
    sub = generated_submodel(PointedModel(p.model, "w1"))
    assert sub.model.worlds == ("w1",) and not sub.model.relation


def test_model_validation():
    with pytest.raises(ModelError):
        KripkeModel([], [], {})
    with pytest.raises(ModelError):
        KripkeModel(["a"], [("a", "b")], {})
    with pytest.raises(ModelError):
        PointedModel(knows_p().model, "zz")


@pytest.mark.parametrize(
    "text, where",
    [
        ('{"worlds": ["a"], "extra": 1}', "unknown keys"),
        ('{"worlds": ["a"], "relation": [["a", "b"]]}', "$.relation[0]"),
        ('{"worlds": ["a"], "valuation": {"b": ["p"]}}', "$.valuation"),
        ('{"worlds": ["a"], "point": "b"}', "$.point"),
        ('{"worlds": []}', "$.worlds"),
        ('{"worlds": ["a"], "valuation": {"a": ["P"]}}', "invalid atom"),
        ('{"worlds": ["a"]', "line 1 column"),
    ],
)
def test_json_errors(text, where):
    with pytest.raises(ModelFormatError, match=where.replace("[", r"\[").replace("$", r"\$")):
        loads_model(text)


def test_json_round_trip():
    rng = random.Random(3)
    for _ in range(50):
        m = random_model(rng, (1, 4))
        point = m.worlds[0]
        back, bp = loads_model(dumps_model(m, point))
        assert back == m and bp == point
        json.loads(dumps_model(m))


def _basic_formulas(rng, n):
    return [random_formula(rng, ("p", "q"), 3) for _ in range(n)]


def test_bisimilar_points_agree():
    rng = random.Random(11)
    fs = _basic_formulas(rng, 60)
    checked = 0
    for _ in range(150):
        m1, m2 = random_model(rng, (1, 3)), random_model(rng, (1, 3))
        for w in m1.worlds:
            for v in m2.worlds:
                if bisimilar(PointedModel(m1, w), PointedModel(m2, v)):
                    checked += 1
                    for f in fs:
                        assert eval_basic(m1, w, f) == eval_basic(m2, v, f)
    assert checked > 0


def test_isomorphism_implies_bisimilarity():
    rng = random.Random(5)
    for _ in range(60):
        m = random_model(rng, (1, 4))
        perm = list(m.worlds)
        rng.shuffle(perm)
        ren = dict(zip(m.worlds, [f"x{i}" for i in range(len(perm))]))
        copy = KripkeModel(
            [ren[w] for w in perm],
            [(ren[a], ren[b]) for a, b in m.relation],
            {ren[w]: atoms for w, atoms in m.valuation.items()},
        )
        iso = isomorphic(m, copy)
        assert iso is not None
        for w, v in iso.items():
            assert bisimilar(PointedModel(m, w), PointedModel(copy, v))


def test_generated_submodel_preserves_truth():
    rng = random.Random(9)
    fs = _basic_formulas(rng, 40)
    for _ in range(60):
        m = random_model(rng, (1, 4))
        w = rng.choice(m.worlds)
        sub = generated_submodel(PointedModel(m, w))
        for f in fs:
            assert eval_basic(m, w, f) == eval_basic(sub.model, sub.point, f)


def test_full_relation_has_all_properties():
    for n in range(1, 5):
        ws = [f"w{i}" for i in range(n)]
        m = KripkeModel(ws, [(a, b) for a in ws for b in ws], {})
        assert frame_properties(m) == ALL


def test_isomorphism_cap():
    m = forget_multiclause(knows_p().model, [])
    with pytest.raises(ModelError):
        isomorphic(m, m, cap=1)
