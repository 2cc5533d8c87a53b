import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qkant.enriched import MapWitness, VRelation, all_maps
from qkant.extensions import EgliMilner, IdentityExtension
from qkant.functors import Dist, Distribution, Identity, Maybe, Powerset
from qkant.predicates import (box, constant_top, diamond, expectation, expectation_or_stop,
                              from_yoneda, identity_lifting, induced_pl, is_monotone, labelled,
                              monotonicity_violation, naturality_violation, negation,
                              neighbourhood_box, stop, yoneda_component)
from qkant.quantale import BOOL2, DomainError, LUK01
from conftest import distributions, rationals

X = ("a", "b")
Y = ("c", "d", "e")


def test_diamond_and_box_values():
    f = {"a": True, "b": False}
    assert diamond()((f,), frozenset({"a", "b"})) is True
    assert diamond()((f,), frozenset()) is False
    assert box()((f,), frozenset({"a", "b"})) is False
    assert box()((f,), frozenset()) is True


def test_luk_diamond_is_numeric_min():
    f = {"a": Fraction(1, 4), "b": Fraction(3, 4)}
    assert diamond(LUK01)((f,), frozenset(X)) == Fraction(1, 4)
    assert diamond(LUK01)((f,), frozenset()) == 1


def test_arity_is_checked():
    with pytest.raises(ValueError):
        diamond()((), frozenset())


def test_expectation_only_over_luk():
    with pytest.raises(DomainError):
        expectation(BOOL2)


@given(distributions(("a", "b", "c")), rationals())
def test_expectation_of_constant(mu, u):
    assert expectation()(({x: u for x in "abc"},), mu) == u


def test_one_plus_d_modalities():
    f = {"a": Fraction(0)}
    assert expectation_or_stop()((f,), None) == 1
    assert stop(LUK01)((), None) == 0 and stop(LUK01)((), Dist.dirac("a")) == 1


@pytest.mark.parametrize("lam", [diamond(), box(), diamond(LUK01), box(LUK01),
                                 identity_lifting(BOOL2), neighbourhood_box()],
                         ids=lambda l: f"{l.name}-{l.quantale.name}")
def test_naturality_on_small_maps(lam):
    q = lam.quantale
    vals = q.elements() if q.finite else (Fraction(0), Fraction(1, 2), Fraction(1))
    elements = lam.functor.obj(X)
    for f in all_maps(X, Y):
        for pv in itertools.product(vals, repeat=len(Y)):
            p = dict(zip(Y, pv))
            assert naturality_violation(lam, f, (p,), elements) is None


@given(st.lists(distributions(("c", "d", "e")), min_size=1, max_size=3),
       st.tuples(rationals(), rationals(), rationals()))
def test_expectation_naturality(mus, pv):
    f = MapWitness(Y, X, {"c": "a", "d": "b", "e": "a"})
    p = dict(zip(X, pv[:2]))
    assert naturality_violation(expectation(), f, (p,), mus) is None


def test_monotone_catalogue():
    for lam in (diamond(), box(), identity_lifting(BOOL2), constant_top(BOOL2)):
        assert is_monotone(lam, X)


def test_negation_is_not_monotone():
    w = monotonicity_violation(negation(BOOL2), X)
    assert w is not None


def test_labelled_modality():
    lam = labelled(diamond(), ("l", "r"), "r")
    t = (frozenset(), frozenset({"a"}))
    assert lam.name == "dia_r"
    assert lam(({"a": True, "b": False},), t) is True


@pytest.mark.parametrize("lam", [diamond(), box(), constant_top(BOOL2, Powerset())],
                         ids=lambda l: l.name)
def test_yoneda_round_trip(lam):
    rebuilt = from_yoneda(lam.name, lam.functor, BOOL2, lam.arity, yoneda_component(lam))
    for pv in itertools.product((False, True), repeat=len(Y)):
        p = dict(zip(Y, pv))
        for A in Powerset().obj(Y):
            assert rebuilt((p,), A) == lam((p,), A)


class TestInduced:
    def test_singleton_selection_gives_diamond(self):
        E = EgliMilner(BOOL2, "lower")
        P1 = Powerset().obj((0,))
        r = VRelation(BOOL2, ("*",), P1, [[A == frozenset({0}) for A in P1]])
        lam = induced_pl(E, r, 1)
        for pv in itertools.product((False, True), repeat=len(Y)):
            p = dict(zip(Y, pv))
            for A in Powerset().obj(Y):
                assert lam((p,), A) == diamond()((p,), A)

    def test_bottom_row_gives_bottom(self):
        E = EgliMilner(LUK01, "lower")
        P1 = Powerset().obj((0,))
        lam = induced_pl(E, VRelation(LUK01, ("*",), P1, [[1] * len(P1)]), 1)
        assert lam(({"a": Fraction(0)},), frozenset({"a"})) == 1

    def test_identity_extension_gives_evaluation(self):
        E = IdentityExtension(BOOL2)
        lam = induced_pl(E, VRelation(BOOL2, ("*",), (0,), [[True]]), 1)
        for pv in itertools.product((False, True), repeat=2):
            p = dict(zip(X, pv))
            assert all(lam((p,), x) == p[x] for x in X)
