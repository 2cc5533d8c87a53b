from fractions import Fraction

import pytest
from hypothesis import given

from qkant.enriched import VRelation, all_relations, converse, identity_relation
from qkant.extensions import (BrokenExtension, EgliMilner, IdentityExtension, KantorovichExtension,
                              LabelledExtension, MaybeExtension, SymmetrizedExtension,
                              TopExtension, egli_milner, extension_from_string,
                              kantorovich_extension)
from qkant.functors import Powerset
from qkant.predicates import box, diamond
from qkant.propcheck import check_lax_axioms
from qkant.quantale import BOOL2, LUK01, UnsupportedEnumeration
from conftest import relations


def lower_oracle(r, A, B):
    return all(any(r(a, b) for b in B) for a in A)


def upper_oracle(r, A, B):
    return all(any(r(a, b) for a in A) for b in B)


class TestEgliMilner:
    eq = VRelation(BOOL2, (1, 2), (1, 2), [[True, False], [False, True]])

    def test_lower_examples(self):
        E = egli_milner(self.eq, "lower")
        assert E(frozenset({1}), frozenset({1, 2})) is True
        assert E(frozenset({1, 2}), frozenset({1})) is False

    def test_luk_constant(self):
        X = ("p", "q")
        r = VRelation(LUK01, X, X, [[Fraction(3, 10)] * 2] * 2)
        E = egli_milner(r, "both")
        for A in Powerset().obj(X):
            for B in Powerset().obj(X):
                if A and B:
                    assert E(A, B) == Fraction(3, 10)

    @given(relations(BOOL2, max_size=3))
    def test_matches_quantifier_oracles(self, r):
        lo, up, both = (egli_milner(r, m) for m in ("lower", "upper", "both"))
        for A in Powerset().obj(r.source):
            for B in Powerset().obj(r.target):
                assert lo(A, B) == lower_oracle(r, A, B)
                assert up(A, B) == upper_oracle(r, A, B)
                assert both(A, B) == (lo(A, B) and up(A, B))

    @given(relations(LUK01, max_size=3))
    def test_fast_lower_path_agrees_with_generic(self, r):
        E = EgliMilner(LUK01, "lower")
        xs, ys = Powerset().obj(r.source), Powerset().obj(r.target)
        fast = E.relate(r, xs, ys)
        for A in xs:
            for B in ys:
                assert fast(A, B) == E.value(r, A, B)

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            EgliMilner(BOOL2, "sideways")


class TestKantorovichExtension:
    def test_empty_family_is_top(self):
        r = identity_relation(BOOL2, ("a", "b"))
        K = KantorovichExtension([], BOOL2, Powerset()).apply(r)
        assert all(all(row) for row in K.matrix)

    def test_identity_is_reflexive(self):
        r = identity_relation(BOOL2, ("a", "b"))
        K = kantorovich_extension([diamond()], r)
        assert identity_relation(BOOL2, K.source).leq(K)

    def test_equals_lower_egli_on_two_points(self):
        X = ("a", "b")
        for r in all_relations(BOOL2, X, X):
            assert kantorovich_extension([diamond()], r) == egli_milner(r, "lower")

    def test_box_gives_upper_egli_on_nonempty_sets(self):
        X = ("a", "b")
        for r in all_relations(BOOL2, X, X):
            K = kantorovich_extension([box()], r)
            E = egli_milner(r, "upper")
            for A in Powerset().obj(X):
                for B in Powerset().obj(X):
                    if A and B:
                        assert K(A, B) == E(A, B)

    def test_infinite_quantale_needs_values(self):
        with pytest.raises(UnsupportedEnumeration):
            KantorovichExtension([diamond(LUK01)], LUK01)


class TestCombinators:
    def test_symmetrized_is_symmetric_on_symmetric_relations(self):
        X = ("a", "b")
        E = SymmetrizedExtension(EgliMilner(BOOL2, "lower"))
        for r in all_relations(BOOL2, X, X):
            if r == converse(r):
                out = E.apply(r)
                assert out == converse(out)
                assert out == egli_milner(r, "both")

    def test_maybe_convention(self):
        E = MaybeExtension(IdentityExtension(BOOL2))
        r = identity_relation(BOOL2, ("a",))
        assert E.value(r, None, None) is True
        assert E.value(r, None, "a") is False
        assert E.value(r, "a", "a") is True

    def test_labelled_meets_components(self):
        E = LabelledExtension(("l", "r"), EgliMilner(BOOL2))
        r = identity_relation(BOOL2, ("a", "b"))
        s1 = (frozenset({"a"}), frozenset())
        s2 = (frozenset({"a", "b"}), frozenset({"b"}))
        assert E.value(r, s1, s2) is True
        assert E.value(r, s2, s1) is False

    @pytest.mark.parametrize("E", [TopExtension(BOOL2, Powerset()), IdentityExtension(BOOL2),
                                   SymmetrizedExtension(EgliMilner(BOOL2)),
                                   LabelledExtension(("l",), EgliMilner(BOOL2))],
                             ids=lambda E: E.name)
    def test_lax_axioms(self, E):
        assert check_lax_axioms(E).passed


def test_broken_extension_fails_l3():
    rep = check_lax_axioms(BrokenExtension(BOOL2))
    assert not rep.passed
    assert any(f["axiom"] == "L3" for f in rep.failures)


@pytest.mark.parametrize("text", ["egli-lower", "egli-upper", "egli", "broken", "identity",
                                  "kantorovich-ext:dia"])
def test_extension_strings(text):
    assert extension_from_string(text, BOOL2).quantale == BOOL2


def test_extension_string_unknown():
    with pytest.raises(ValueError):
        extension_from_string("hausdorff", BOOL2)
