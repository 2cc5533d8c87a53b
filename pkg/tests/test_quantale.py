import itertools
import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qkant.quantale import (BOOL2, COST, INF, LUK01, MAXCOST, DomainError, FreeQuantale, Monoid,
                            OVERFLOW, get_quantale, hom, join_family, meet_family, tensor,
                            truncated_free_commutative_monoid)
from conftest import rationals, values

FREE = FreeQuantale(truncated_free_commutative_monoid(["a", "b"], 2))
SMALL_FREE = FreeQuantale(truncated_free_commutative_monoid(["a"], 1))
NUMERIC = [LUK01, COST, MAXCOST]


def F(s):
    return Fraction(s)


class TestExamples:
    def test_luk_tensor_saturates(self):
        assert LUK01.tensor(F("7/10"), F("6/10")) == 1

    def test_bool_tensor_is_meet(self):
        assert BOOL2.tensor(True, False) is False

    def test_free_tensor_multiplies_words(self):
        assert FREE.tensor(frozenset({"a"}), frozenset({"b"})) == frozenset({"ab"})

    def test_bool_hom_is_implication(self):
        assert BOOL2.hom(True, False) is False
        assert BOOL2.hom(False, False) is True

    def test_luk_hom_value(self):
        assert LUK01.hom(F("3/10"), F("1/2")) == F("1/5")

    @given(rationals())
    def test_luk_hom_self_is_unit(self, u):
        assert LUK01.hom(u, u) == LUK01.unit == 0

    def test_luk_join_is_numeric_min(self):
        assert join_family(LUK01, [F("3/10"), F("7/10")]).payload == F("3/10")

    def test_empty_meet_is_top(self):
        assert meet_family(BOOL2, []).payload is True

    def test_cost_join_with_infinity(self):
        assert join_family(COST, [2, 5, INF]).payload == 2

    def test_wrapped_operations(self):
        assert tensor(LUK01, F("1/4"), F("1/2")).payload == F("3/4")
        assert hom(LUK01, LUK01.value("1/4"), F("1/2")).payload == F("1/4")
        with pytest.raises(DomainError):
            tensor(LUK01, BOOL2.value(True), F("1/2"))


def _adjunction_grid(q):
    if q.finite:
        return q.elements()
    return tuple(v for v in q.grid(4))


@pytest.mark.parametrize("q", [BOOL2, LUK01, COST, MAXCOST, SMALL_FREE], ids=lambda q: q.name)
def test_exhaustive_laws_on_grid(q):
    vals = _adjunction_grid(q)
    t, h, le = q.tensor, q.hom, q.leq
    for u, v, w in itertools.product(vals, repeat=3):
        assert t(t(u, v), w) == t(u, t(v, w))
        assert le(t(u, v), w) == le(v, h(u, w))
        assert t(u, q.join(v, w)) == q.join(t(u, v), t(u, w))
    for u in vals:
        assert t(q.unit, u) == u
        assert t(u, q.bottom) == q.bottom
    assert q.top != q.bottom


@pytest.mark.parametrize("q", [BOOL2, LUK01, COST, MAXCOST], ids=lambda q: q.name)
def test_random_laws(q):
    @given(values(q), values(q), values(q))
    def check(u, v, w):
        assert q.tensor(u, v) == q.tensor(v, u)
        assert q.leq(q.tensor(u, v), w) == q.leq(v, q.hom(u, w))
        assert q.leq(q.meet(u, v), u) and q.leq(u, q.join(u, v))
        assert q.hom_s(u, v) == q.meet(q.hom(u, v), q.hom(v, u))
    check()


def test_numeric_order_is_reversed():
    assert LUK01.leq(F("1/2"), F("1/4"))
    assert not LUK01.leq(F("1/4"), F("1/2"))
    assert LUK01.top == 0 and LUK01.bottom == 1


def test_parse_and_format_round_trip():
    for q in NUMERIC:
        for u in q.grid(3):
            assert q.parse(q.format(u)) == u
    assert LUK01.parse("top") == 0 and LUK01.parse("bot") == 1
    assert COST.parse("inf") == INF
    assert BOOL2.parse("top") is True and BOOL2.parse(False) is False


@pytest.mark.parametrize("bad", ["3/2", "-1/3", "abc", INF])
def test_luk_rejects_out_of_range(bad):
    with pytest.raises(DomainError):
        LUK01.parse(bad)


def test_truncated_monoid_overflow():
    m = truncated_free_commutative_monoid(["a", "b"], 2)
    assert m.mul("a", "b") == "ab" and m.mul("ab", "a") == OVERFLOW
    assert m.mul("", "ab") == "ab"


def test_monoid_validation_rejects_non_commutative():
    els = ("e", "x", "y")
    table = {(a, b): b if a == "e" else a if b == "e" else "x" for a in els for b in els}
    table[("x", "y")] = "y"
    with pytest.raises(ValueError):
        Monoid(els, "e", table)


def test_free_quantale_from_file(tmp_path):
    doc = {"elements": ["e", "a"], "unit": "e", "table": [["e", "a"], ["a", "a"]]}
    path = tmp_path / "m.json"
    path.write_text(json.dumps(doc))
    q = get_quantale(f"free:{path}")
    assert q.unit == frozenset({"e"})
    assert q.tensor(frozenset({"a"}), frozenset({"e"})) == frozenset({"a"})


def test_unknown_quantale():
    with pytest.raises(DomainError):
        get_quantale("reals")


@given(st.lists(rationals(), max_size=5))
def test_join_meet_families_match_min_max(xs):
    assert LUK01.join_all(xs) == min(xs, default=Fraction(1))
    assert LUK01.meet_all(xs) == max(xs, default=Fraction(0))
