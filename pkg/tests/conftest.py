from pathlib import Path

from hypothesis import settings
from hypothesis import strategies as st

from epiforget.formula import (
    And,
    Announce,
    Atom,
    Aux,
    Bot,
    Clause,
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
)
from epiforget.kripke import PointedModel, loads_model

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_path(name: str) -> str:
    return str(FIXTURES / name)


def load_pointed(name: str) -> PointedModel:
    model, point = loads_model((FIXTURES / name).read_text())
    return PointedModel(model, point)


ATOMS = ("p", "q", "r")


def props(atoms=ATOMS, depth=3):
    leaves = st.one_of(st.sampled_from([Atom(a) for a in atoms]), st.just(Top()), st.just(Bot()))

    def extend(inner):
        return st.one_of(
            inner.map(Not),
            st.tuples(inner, inner).map(lambda t: And(*t)),
            st.tuples(inner, inner).map(lambda t: Or(*t)),
            st.tuples(inner, inner).map(lambda t: Implies(*t)),
            st.tuples(inner, inner).map(lambda t: Iff(*t)),
        )

    return st.recursive(leaves, extend, max_leaves=2**depth)


def clauses(atoms=ATOMS):
    def build(signs):
        return Clause([Literal(a, s == 1) for a, s in zip(atoms, signs) if s])

    return st.lists(st.integers(0, 2), min_size=len(atoms), max_size=len(atoms)).map(build)


def formulas(atoms=ATOMS, prop_depth=2):
    leaves = st.one_of(st.sampled_from([Atom(a) for a in atoms]), st.just(Top()), st.just(Bot()))
    pi = props(atoms, prop_depth)
    modal = [ForgetWhether, Forget, ForgetCond, ForgetStrong, ForgetDep, Announce]

    def extend(inner):
        return st.one_of(
            inner.map(Not),
            inner.map(Know),
            st.tuples(inner, inner).map(lambda t: And(*t)),
            st.tuples(inner, inner).map(lambda t: Or(*t)),
            st.tuples(inner, inner).map(lambda t: Implies(*t)),
            st.tuples(inner, inner).map(lambda t: Iff(*t)),
            st.tuples(st.sampled_from(modal), pi, inner).map(lambda t: t[0](t[1], t[2])),
            st.tuples(clauses(atoms), clauses(atoms), st.integers(0, 2), inner).map(lambda t: Aux(*t)),
        )

    return st.recursive(leaves, extend, max_leaves=8)


# one line per acceptance criterion, shown at the end of every run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
