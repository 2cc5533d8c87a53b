import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qkant.enriched import (DimensionError, MapWitness, VCategory, VRelation, all_maps,
                            all_relations, compose_relations, converse, discrete, dualize, graph,
                            identity_relation, indiscrete, initial_from_predicates,
                            initial_structure, initial_violation, is_category, is_initial_morphism,
                            is_vfunctor, kan_extension, power, pullback_structure,
                            residual_initial_structure, symmetrize, transitive_closure,
                            validate_category, value_category, vfunctors_into_values)
from qkant.quantale import BOOL2, COST, LUK01
from conftest import categories, relations

F = Fraction


def brute_compose(s, r):
    q = r.quantale
    return [[q.join_all([q.tensor(r(x, y), s(y, z)) for y in r.target]) for z in s.target]
            for x in r.source]


class TestComposition:
    def test_ordinary_relations(self):
        r = VRelation(BOOL2, ("x",), ("y",), [[True]])
        s = VRelation(BOOL2, ("y",), ("z",), [[True]])
        assert compose_relations(s, r).matrix == ((True,),)

    def test_luk_constants(self):
        X = ("p", "q")
        r = VRelation(LUK01, X, X, [[F("2/5")] * 2] * 2)
        s = VRelation(LUK01, X, X, [[F("3/10")] * 2] * 2)
        assert compose_relations(s, r).matrix == ((F("7/10"),) * 2,) * 2

    def test_shape_mismatch(self):
        r = VRelation(BOOL2, ("x",), ("y",), [[True]])
        with pytest.raises(DimensionError):
            compose_relations(r, r)

    @given(st.data())
    def test_matches_formula_and_associative(self, data):
        for q in (LUK01, COST, BOOL2):
            r = data.draw(relations(q, max_size=3, src="x", tgt="y"))
            s = data.draw(relations(q, n=len(r.target), src="y", tgt="z"))
            t = data.draw(relations(q, n=len(s.target), src="z", tgt="w"))
            assert [list(row) for row in compose_relations(s, r).matrix] == brute_compose(s, r)
            assert compose_relations(t, compose_relations(s, r)) == \
                compose_relations(compose_relations(t, s), r)
            assert compose_relations(r, identity_relation(q, r.source)) == r
            assert compose_relations(identity_relation(q, r.target), r) == r

    @given(relations(LUK01))
    def test_converse_involution(self, r):
        assert converse(converse(r)) == r


class TestKanExtension:
    def test_full_relation_gives_full(self):
        X = ("a", "b")
        full = VRelation(BOOL2, X, X, [[True] * 2] * 2)
        for s in all_relations(BOOL2, X, X):
            assert all(all(row) for row in kan_extension(full, s).matrix)

    def test_adjunction_exhaustive_bool(self):
        X, Y, Z = ("x0", "x1"), ("y0", "y1"), ("z0", "z1")
        ts = list(all_relations(BOOL2, Z, Y))
        for r in all_relations(BOOL2, X, Y):
            for s in all_relations(BOOL2, X, Z):
                k = kan_extension(r, s)
                for t in ts:
                    assert compose_relations(t, s).leq(r) == t.leq(k)

    @given(relations(LUK01, src="x", tgt="y"))
    def test_residual_of_identity(self, r):
        one = identity_relation(LUK01, r.source)
        assert kan_extension(r, one) == r


class TestCategories:
    def test_discrete_report(self):
        rep = validate_category(discrete(BOOL2, ("a", "b")))
        assert (rep.is_category, rep.is_symmetric, rep.is_separated) == (True, True, True)

    def test_asymmetric_luk(self):
        c = VCategory(LUK01, ("x", "y"), [[0, F("1/5")], [F("1/2"), 0]])
        rep = validate_category(c)
        assert rep.is_category and not rep.is_symmetric

    def test_bad_diagonal(self):
        c = VCategory(LUK01, ("x", "y"), [[F("1/10"), 0], [0, 0]])
        rep = validate_category(c)
        assert not rep.is_category and rep.reflexivity_failures == ["x"]

    def test_triangle_failure(self):
        c = VCategory(LUK01, ("x", "y", "z"), [[0, F("1/5"), 1], [1, 0, F("1/5")], [1, 1, 0]])
        rep = validate_category(c)
        assert not rep.is_category and ("x", "y", "z") in rep.transitivity_failures

    def test_symmetrize_and_dual(self):
        c = VCategory(LUK01, ("x", "y"), [[0, F("1/5")], [F("1/2"), 0]])
        s = symmetrize(c)
        assert s("x", "y") == s("y", "x") == F("1/2")
        assert symmetrize(s) == s
        assert dualize(dualize(c)) == c
        assert dualize(c)("x", "y") == F("1/2")

    @given(categories(LUK01), categories(COST), categories(BOOL2))
    def test_random_closures_are_categories(self, a, b, c):
        for cat in (a, b, c):
            assert is_category(cat)
            assert is_category(symmetrize(cat)) and is_category(dualize(cat))

    @given(relations(LUK01, n=3, m=3))
    def test_transitive_closure_is_least(self, r):
        X = r.source
        r = VRelation(LUK01, X, X, r.matrix)
        t = transitive_closure(LUK01, r)
        assert r.leq(t)
        assert compose_relations(t, t).leq(t)


class TestInitial:
    def appendix(self):
        two = discrete(BOOL2, ("0", "1"))
        three = VCategory(BOOL2, ("0", "1", "2"),
                          [[True, False, False], [False, True, False], [True, True, True]])
        return two, three, MapWitness(two.carrier, three.carrier, {"0": "0", "1": "1"})

    def test_appendix_inclusion_is_initial(self):
        two, three, inc = self.appendix()
        assert is_category(three)
        assert is_vfunctor(inc, two, three) and is_initial_morphism(inc, two, three)

    def test_constant_map_not_initial(self):
        c = VCategory(LUK01, ("x", "y"), [[0, F("1/3")], [F("1/3"), 0]])
        point = indiscrete(LUK01, ("p",))
        f = MapWitness(c.carrier, point.carrier, {"x": "p", "y": "p"})
        assert is_vfunctor(f, c, point) and not is_initial_morphism(f, c, point)
        assert initial_violation(f, c, point)[:2] == ("x", "y")

    def test_identity_leg_and_empty_cone(self):
        c = VCategory(LUK01, ("x", "y"), [[0, F("1/5")], [F("1/2"), 0]])
        assert initial_structure(c.carrier, [(lambda x: x, c)]) == c
        empty = initial_structure(("x", "y"), [], LUK01)
        assert empty == indiscrete(LUK01, ("x", "y"))
        assert all(v == 0 for row in empty.matrix for v in row)

    def test_two_projections_by_hand(self):
        # predicates f = (1/4, 3/4) and g = (1/2, 0) into ([0,1], hom)
        V = value_category(LUK01, LUK01.grid(4))
        f = {"x": F("1/4"), "y": F("3/4")}
        g = {"x": F("1/2"), "y": F(0)}
        c = initial_structure(("x", "y"), [(f, V), (g, V)])
        assert c("x", "y") == F("1/2")
        assert c("y", "x") == F("1/2")
        legs = [{"x": (F("1/4"), F("1/2")), "y": (F("3/4"), F(0))}]
        assert residual_initial_structure(LUK01, ("x", "y"), legs) == c
        assert initial_from_predicates(LUK01, ("x", "y"), [(F("1/4"), F("3/4")),
                                                           (F("1/2"), F(0))]) == c

    @given(categories(LUK01, max_size=3))
    def test_pullback_makes_map_initial(self, c):
        f = MapWitness(("u", "v", "w"), c.carrier, {k: c.carrier[i % len(c)]
                                                     for i, k in enumerate(("u", "v", "w"))})
        p = pullback_structure(f, c, ("u", "v", "w"))
        assert is_initial_morphism(f, p, c)


class TestPowers:
    def test_singleton_exponent_copies(self):
        V = value_category(BOOL2)
        P = power(V, ("i",))
        assert P.matrix == V.matrix

    def test_bool_square(self):
        P = power(value_category(BOOL2), (0, 1))
        assert len(P) == 4
        le = {(p, q) for p in P.carrier for q in P.carrier if P(p, q)}
        expected = {(p, q) for p in P.carrier for q in P.carrier
                    if all((not a) or b for a, b in zip(p, q))}
        assert le == expected

    def test_empty_exponent(self):
        P = power(discrete(LUK01, ("x", "y")), ())
        assert P.carrier == ((),) and P.matrix == ((0,),)

    def test_vfunctors_match_brute_force(self):
        c = VCategory(BOOL2, ("a", "b", "c"),
                      [[True, True, False], [False, True, False], [False, True, True]])
        V2 = power(value_category(BOOL2), (0, 1))
        found = {tuple(f[x] for x in c.carrier) for f in vfunctors_into_values(c, 2)}
        brute = {tuple(m.table[x] for x in c.carrier) for m in all_maps(c.carrier, V2.carrier)
                 if is_vfunctor(m, c, V2)}
        assert found == brute


def test_graph_of_map():
    f = MapWitness(("a", "b"), ("c",), {"a": "c", "b": "c"})
    g = graph(BOOL2, f)
    assert g.matrix == ((True,), (True,))
    assert converse(g).source == ("c",)


def test_map_witness_rejects_bad_table():
    with pytest.raises(ValueError):
        MapWitness(("a",), ("b",), {"a": "z"})
