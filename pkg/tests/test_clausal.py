import random

import pytest
from hypothesis import given

from epiforget.clausal import (
    ClauseSet,
    clausal_form,
    clause_set_to_formula,
    parse_clause_set,
    prime_implicates_oracle,
)
from epiforget.formula import Clause, FormulaError, CapExceeded, conj, Atom, parse_formula, prop_equivalent
from epiforget.search import random_prop

from conftest import props

# formula -> prime implicates, as tabulated for the two-atom cases
TABLE = {
    "p & q": "{{p},{q}}",
    "p | q": "{{p,q}}",
    "p -> q": "{{~p,q}}",
    "p <-> q": "{{p,~q},{~p,q}}",
    "~(p & q)": "{{~p,~q}}",
    "~(p | q)": "{{~p},{~q}}",
    "~(p -> q)": "{{p},{~q}}",
    "~(p <-> q)": "{{p,q},{~p,~q}}",
}


@pytest.mark.parametrize("text, expected", sorted(TABLE.items()))
def test_table(text, expected):
    got = clausal_form(parse_formula(text))
    assert got == parse_clause_set(expected)
    assert set(got) == set(parse_clause_set(expected))


def test_constants():
    assert clausal_form(parse_formula("T")) == ClauseSet([])
    assert clausal_form(parse_formula("F")) == ClauseSet([Clause([])])
    assert str(clausal_form(parse_formula("T"))) == "{}"
    assert str(clausal_form(parse_formula("F"))) == "{{}}"


@pytest.mark.parametrize(
    "text, expected",
    [("p -> q", "{{~p,q}}"), ("~(p | q)", "{{~p},{~q}}"), ("(p & q) | (p & ~q)", "{{p}}")],
)
def test_oracle_examples(text, expected):
    assert prime_implicates_oracle(parse_formula(text)) == parse_clause_set(expected)


def test_clause_set_to_formula():
    assert clause_set_to_formula(parse_clause_set("{}")) == parse_formula("T")
    assert clause_set_to_formula(parse_clause_set("{{}}")) == parse_formula("F")
    assert clause_set_to_formula(parse_clause_set("{{p},{~q}}")) == parse_formula("p & ~q")


def test_canonical_order():
    cs = parse_clause_set("{{~q},{p,q},{p}}")
    keys = [[l.key for l in d.sorted_literals] for d in cs]
    assert keys == sorted(keys)


def test_tautological_clause_rejected():
    with pytest.raises(FormulaError):
        ClauseSet([Clause(["p", "~p"])])


def test_modal_input_rejected():
    with pytest.raises(FormulaError):
        clausal_form(parse_formula("K p"))


def test_caps():
    with pytest.raises(CapExceeded):
        prime_implicates_oracle(conj(Atom(f"a{i}") for i in range(7)))
    with pytest.raises(CapExceeded):
        clausal_form(conj(Atom(f"a{i}") for i in range(4)), cap=3)


@given(props())
def test_matches_oracle(f):
    assert clausal_form(f) == prime_implicates_oracle(f)


@given(props())
def test_equivalent_to_input_and_antichain(f):
    cs = clausal_form(f)
    assert prop_equivalent(f, clause_set_to_formula(cs))
    assert cs.is_antichain()
    assert all(not d.is_tautological() for d in cs)


@given(props(), props())
def test_equivalent_inputs_same_form(a, b):
    if prop_equivalent(a, b):
        assert clausal_form(a) == clausal_form(b)


def test_oracle_on_wider_formulas():
    rng = random.Random(7)
    atoms = ("p", "q", "r", "s", "t", "u")
    for _ in range(40):
        f = random_prop(rng, atoms, 4)
        assert clausal_form(f) == prime_implicates_oracle(f)
