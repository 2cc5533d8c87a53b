from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from qkant.behaviour import Coalgebra
from qkant.enriched import VCategory, VRelation, transitive_closure
from qkant.functors import Dist, Distribution, Labelled, Maybe, Powerset
from qkant.quantale import BOOL2, COST, LUK01, MAXCOST

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ACCEPTANCE: dict = {}


def rationals(den=12):
    return st.builds(Fraction, st.integers(0, den), st.just(den))


def values(q):
    if q is BOOL2:
        return st.booleans()
    if q is LUK01:
        return rationals()
    if q is COST or q is MAXCOST:
        return st.one_of(st.builds(Fraction, st.integers(0, 30), st.integers(1, 6)),
                         st.just(q.bottom))
    return st.sampled_from(q.elements())


def carrier(prefix, n):
    return tuple(f"{prefix}{i}" for i in range(n))


@st.composite
def relations(draw, q, n=None, m=None, max_size=3, src="x", tgt="y"):
    n = draw(st.integers(1, max_size)) if n is None else n
    m = draw(st.integers(1, max_size)) if m is None else m
    mat = [[draw(values(q)) for _ in range(m)] for _ in range(n)]
    return VRelation(q, carrier(src, n), carrier(tgt, m), mat)


@st.composite
def categories(draw, q, max_size=4, min_size=1):
    n = draw(st.integers(min_size, max_size))
    X = carrier("x", n)
    mat = [[q.unit if i == j else draw(values(q)) for j in range(n)] for i in range(n)]
    closed = transitive_closure(q, VRelation(q, X, X, mat))
    return VCategory(q, X, closed.matrix)


@st.composite
def distributions(draw, support, max_den=6):
    den = draw(st.integers(1, max_den))
    counts = [0] * len(support)
    for _ in range(den):
        counts[draw(st.integers(0, len(support) - 1))] += 1
    return Dist({x: Fraction(c, den) for x, c in zip(support, counts)})


@st.composite
def transition_systems(draw, max_states=4, labels=()):
    """Finite (labelled) powerset coalgebras over bool2."""
    n = draw(st.integers(1, max_states))
    X = carrier("s", n)
    succ = st.frozensets(st.sampled_from(X), max_size=n)
    if labels:
        F = Labelled(tuple(labels), Powerset())
        alpha = {x: tuple(draw(succ) for _ in labels) for x in X}
    else:
        F = Powerset()
        alpha = {x: draw(succ) for x in X}
    return Coalgebra(BOOL2, F, X, alpha, labels=tuple(labels))


@st.composite
def markov_chains(draw, max_states=3, max_den=4):
    """(1+D)-coalgebras over luk01; some states stop."""
    n = draw(st.integers(1, max_states))
    X = carrier("s", n)
    alpha = {x: None if draw(st.booleans()) and draw(st.booleans())
             else draw(distributions(X, max_den)) for x in X}
    return Coalgebra(LUK01, Maybe(Distribution()), X, alpha)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def record_criterion():
    def record(number, ok, detail=""):
        ACCEPTANCE[number] = (bool(ok), detail)
    return record
