import itertools
import json
import random

import pytest
from hypothesis import given

from qkant.enriched import VCategory, discrete, is_category, is_initial_morphism
from qkant.extensions import BrokenExtension, EgliMilner, KantorovichExtension, TopExtension
from qkant.functors import Powerset
from qkant.liftings import (DiscreteLifting, DualLifting, EquivalenceLifting, ExtensionLifting,
                            KantorovichLifting, SymmetrizeLifting, TVLifting)
from qkant.predicates import diamond, expectation
from qkant.propcheck import (all_categories, appendix_witness, check_enriched, check_galois,
                             check_lax_axioms, check_locally_monotone, check_order_reflecting,
                             check_preserves_initial, collapse_witness, example_constant_top,
                             initial_failure, random_initial_morphism, run_suite, upsets_bool2)
from qkant.quantale import BOOL2, LUK01, UnsupportedEnumeration
from conftest import categories

LOWER = EgliMilner(BOOL2, "lower")


class TestLaxAxioms:
    @pytest.mark.parametrize("mode", ["lower", "upper", "both"])
    def test_egli_milner_passes_exhaustively(self, mode):
        rep = check_lax_axioms(EgliMilner(BOOL2, mode))
        assert rep.passed and rep.exhaustive
        # 3^4 pairs r <= r', 16 * 16 composable pairs, 4 maps for L3
        assert rep.instances == 341

    def test_kantorovich_extension_of_diamond(self):
        assert check_lax_axioms(KantorovichExtension([diamond()], BOOL2)).passed

    def test_broken_rule_is_caught(self):
        rep = check_lax_axioms(BrokenExtension(BOOL2))
        assert not rep.passed
        assert {f["axiom"] for f in rep.failures} == {"L3"}

    def test_grid_mode_is_not_exhaustive(self):
        rep = check_lax_axioms(EgliMilner(LUK01), values=LUK01.grid(1))
        assert rep.passed and not rep.exhaustive
        assert "on a value grid" in rep.summary()

    def test_sampled_mode(self):
        rep = check_lax_axioms(EgliMilner(LUK01), values=LUK01.grid(4), budget=30, seed=5)
        assert rep.passed and rep.seed == 5

    def test_zero_budget(self):
        rep = check_lax_axioms(LOWER, budget=0)
        assert rep.instances == 0 and rep.passed and rep.notes


class TestInitialMorphisms:
    def test_witnesses_are_initial(self):
        for X, Y, m in (appendix_witness(), collapse_witness(BOOL2), collapse_witness(LUK01)):
            assert is_initial_morphism(m, X, Y)

    def test_random_morphisms_are_initial(self):
        rng = random.Random(7)
        for _ in range(50):
            X, Y, m, kind = random_initial_morphism(LUK01, rng, LUK01.grid(4))
            assert is_category(X) and is_initial_morphism(m, X, Y)

    def test_kantorovich_expectation_passes(self):
        rep = check_preserves_initial(KantorovichLifting([expectation()]), LUK01, budget=30)
        assert rep.passed and rep.instances == 31

    @pytest.mark.parametrize("q", [BOOL2, LUK01], ids=str)
    def test_kantorovich_diamond_passes(self, q):
        assert check_preserves_initial(KantorovichLifting([diamond(q)]), q, budget=30).passed

    @pytest.mark.parametrize("L", [DualLifting(), SymmetrizeLifting()], ids=lambda L: L.name)
    def test_identity_liftings_pass(self, L):
        assert check_preserves_initial(L, LUK01, budget=30).passed

    def test_discrete_fails_on_a_collapse(self):
        rep = check_preserves_initial(DiscreteLifting(), BOOL2, budget=10)
        assert not rep.passed
        assert "appendix" not in {f["kind"] for f in rep.failures}
        assert rep.failures[0]["kind"] == "collapse"

    def test_discrete_on_the_appendix_inclusion(self):
        X, Y, m = appendix_witness()
        assert initial_failure(DiscreteLifting(), X, Y, m, X.carrier) is None

    def test_equivalence_lifting_fails_on_the_appendix_inclusion(self):
        X, Y, m = appendix_witness()
        w = initial_failure(EquivalenceLifting(), X, Y, m, X.carrier)
        assert w is not None
        assert w["domain_value"] is False and w["codomain_value"] is True

    def test_tv_fails_with_witness(self):
        rep = check_preserves_initial(TVLifting(), LUK01, budget=30)
        assert not rep.passed
        w = rep.failures[0]
        assert w["domain_value"] != w["codomain_value"]

    def test_seed_reproduces_report(self):
        a = check_preserves_initial(TVLifting(), LUK01, budget=20, seed=3)
        b = check_preserves_initial(TVLifting(), LUK01, budget=20, seed=3)
        assert json.dumps(a.to_json(), sort_keys=True) == json.dumps(b.to_json(), sort_keys=True)
        assert "sampled (seed 3)" in a.summary()

    def test_zero_budget(self):
        rep = check_preserves_initial(TVLifting(), LUK01, budget=0)
        assert rep.instances == 0 and rep.passed


class TestGalois:
    def test_lower_egli_round_trip(self):
        rep = check_galois(ExtensionLifting(LOWER), "lift", family=[diamond()])
        assert rep.passed and rep.exhaustive
        assert rep.instances == 7

    @pytest.mark.parametrize("E", [LOWER, EgliMilner(BOOL2, "both"),
                                   KantorovichExtension([diamond()], BOOL2)],
                             ids=lambda E: E.name)
    def test_extension_is_recovered_from_induced_liftings(self, E):
        rep = check_galois(mode="extension", extension=E)
        assert rep.passed and rep.instances == 26

    def test_order_reflecting(self):
        exts = [EgliMilner(BOOL2, m) for m in ("lower", "upper", "both")]
        exts.append(TopExtension(BOOL2, Powerset()))
        rep = check_order_reflecting(exts)
        assert rep.passed and rep.instances == 12

    def test_constant_top(self):
        assert example_constant_top() == {"compatible": True, "induced": False}

    def test_infinite_quantale_rejected(self):
        with pytest.raises(UnsupportedEnumeration):
            check_galois(ExtensionLifting(EgliMilner(LUK01)), q=LUK01)

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            check_galois(ExtensionLifting(LOWER), "sideways")


class TestSmallCategories:
    def test_counts(self):
        # one empty, one singleton, four preorders on two labelled points
        assert len(list(all_categories(BOOL2, 2))) == 6
        assert all(is_category(c) for c in all_categories(BOOL2, 3))
        # 29 preorders on three labelled points
        assert sum(1 for c in all_categories(BOOL2, 3) if len(c) == 3) == 29

    def test_upsets_of_chain_and_antichain(self):
        chain = VCategory(BOOL2, ("a", "b", "c"),
                          [[True, True, True], [False, True, True], [False, False, True]])
        assert len(upsets_bool2(chain)) == 4
        assert len(upsets_bool2(discrete(BOOL2, ("a", "b", "c")))) == 8

    @given(categories(BOOL2, max_size=4))
    def test_upsets_match_brute_force(self, c):
        n = len(c)
        brute = [v for v in itertools.product((False, True), repeat=n)
                 if all(not (v[i] and c.matrix[i][j]) or v[j] for i in range(n) for j in range(n))]
        assert sorted(upsets_bool2(c)) == sorted(brute)

    def test_local_monotonicity(self):
        assert check_locally_monotone(ExtensionLifting(LOWER)).passed
        assert not check_locally_monotone(DualLifting()).passed


class TestEnriched:
    @pytest.mark.parametrize("mode", ["lower", "upper", "both"])
    def test_egli_over_luk(self, mode):
        rep = check_enriched(EgliMilner(LUK01, mode), LUK01.grid(10))
        assert rep.passed and rep.instances > 0

    def test_bool_bottom_is_trivial(self):
        assert check_enriched(LOWER).passed
        # at u = top the inequality is reflexivity, which the broken rule lacks
        rep = check_enriched(BrokenExtension(BOOL2))
        assert {f["u"] for f in rep.failures} == {True}


class TestSuites:
    def test_all_suite_only_negative_controls_fail(self):
        reports = run_suite("all", seed=0, budget=20)
        failing = [r for r in reports if not r.passed]
        assert failing and all(r.negative_control for r in failing)
        assert {r.name for r in failing} == {"lax[broken-swapped]", "initial[discrete]", "initial[tv]"}

    def test_zero_budget_runs_nothing(self):
        reports = run_suite("all", budget=0)
        assert all(r.instances == 0 for r in reports)

    def test_report_json_is_serialisable(self):
        rep = check_preserves_initial(DiscreteLifting(), BOOL2, budget=5)
        doc = json.loads(json.dumps(rep.to_json()))
        assert doc["failures"][0]["domain"]["quantale"] == "bool2"
