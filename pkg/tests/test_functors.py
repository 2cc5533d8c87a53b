from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qkant.enriched import MapWitness, all_maps
from qkant.functors import (Compose, Dist, Distribution, DistributionError, Identity, LabelProduct,
                            Labelled, Maybe, Neighbourhood, Powerset, functor_from_string)
from qkant.quantale import UnsupportedEnumeration
from conftest import distributions

X = ("a", "b")
Y = ("c", "d", "e")
Z = ("u", "v")

FUNCTORS = [Identity(), Powerset(), Distribution(den=2), Maybe(Powerset()),
            Labelled(("l", "r"), Powerset()), LabelProduct(("l", "r"), Identity()),
            Neighbourhood(), Compose(Powerset(), Maybe(Identity()))]


@pytest.mark.parametrize("F", FUNCTORS, ids=lambda F: F.name)
def test_functor_laws_on_all_small_maps(F):
    FX = F.obj(X)
    assert len(set(FX)) == len(FX)
    ident = MapWitness.identity(X)
    for t in FX:
        assert F.contains(X, t)
        assert F.fmap(ident, t) == t
    for f in all_maps(X, Y):
        for g in list(all_maps(Y, Z))[::5]:
            gf = MapWitness(X, Z, {x: g(f(x)) for x in X})
            for t in FX:
                image = F.fmap(f, t)
                assert F.contains(Y, image)
                assert F.fmap(gf, t) == F.fmap(g, image)


def test_powerset_sizes():
    assert len(Powerset().obj(Y)) == 8
    with pytest.raises(UnsupportedEnumeration):
        Powerset(max_carrier=2).obj(Y)


def test_distribution_enumeration_needs_denominator():
    with pytest.raises(UnsupportedEnumeration):
        Distribution().obj(X)
    assert len(Distribution(den=3).obj(X)) == 4


class TestDist:
    def test_validation(self):
        with pytest.raises(DistributionError):
            Dist({"a": Fraction(1, 2)})
        with pytest.raises(DistributionError):
            Dist({"a": Fraction(3, 2), "b": Fraction(-1, 2)})

    def test_zero_masses_dropped(self):
        d = Dist({"a": 1, "b": 0})
        assert d.support == frozenset({"a"}) and d == Dist.dirac("a")
        assert d["b"] == 0

    @given(distributions(("a", "b", "c")))
    def test_pushforward_preserves_mass(self, d):
        f = MapWitness(("a", "b", "c"), ("x", "y"), {"a": "x", "b": "y", "c": "x"})
        e = Distribution().fmap(f, d)
        assert e["x"] == d["a"] + d["c"] and e["y"] == d["b"]
        assert sum(e.values()) == 1


def test_neighbourhood_pulls_back():
    f = MapWitness(("a", "b"), ("c",), {"a": "c", "b": "c"})
    U = frozenset({frozenset({"a", "b"})})
    assert Neighbourhood().fmap(f, U) == frozenset({frozenset({"c"})})
    with pytest.raises(ValueError):
        Neighbourhood().fmap(lambda x: "c", U)


@pytest.mark.parametrize("text,expected", [
    ("powerset", Powerset()), ("dist", Distribution()), ("1+dist", Maybe(Distribution())),
    ("(1+dist)^A", Labelled(("a", "b"), Maybe(Distribution()))),
    ("dist^A", Labelled(("a", "b"), Distribution())), ("nbhd", Neighbourhood()), ("id", Identity()),
])
def test_functor_strings(text, expected):
    assert functor_from_string(text, ["a", "b"]) == expected


def test_functor_string_errors():
    with pytest.raises(ValueError):
        functor_from_string("list")
    with pytest.raises(ValueError):
        functor_from_string("powerset^A", [])


@given(st.data())
def test_labelled_component(data):
    F = Labelled(("l", "r"), Powerset())
    t = data.draw(st.sampled_from(F.obj(X)))
    assert F.component(t, "l") == t[0] and F.component(t, "r") == t[1]
