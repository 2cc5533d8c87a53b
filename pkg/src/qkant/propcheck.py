"""Randomised and exhaustive checks of structural properties on small instances.

Every check returns a :class:`CheckReport`. Failures carry full witnesses;
sampled checks are reproducible from the stored seed.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .enriched import (MapWitness, VCategory, VRelation, all_maps, all_relations,
                       compose_relations, converse, graph, identity_relation, indiscrete,
                       is_category, is_vfunctor, power, transitive_closure, value_category,
                       vfunctors_into_values)
from .extensions import KantorovichExtension, LaxExtension
from .functors import (Distribution, Dist, Identity, Labelled, LabelProduct, Maybe,
                       Neighbourhood, Powerset, SetFunctor)
from .liftings import ExtensionLifting, KantorovichLifting, Lifting, compatibility_check
from .predicates import (PredicateLifting, constant_top, from_yoneda, induced_pl,
                         power_carrier, yoneda_component)
from .quantale import BOOL2, Quantale, TwoValued, UnsupportedEnumeration


@dataclass
class CheckReport:
    name: str
    instances: int = 0
    failures: list = field(default_factory=list)
    exhaustive: bool = False
    seed: int | None = None
    partial: bool = False
    negative_control: bool = False
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, **witness):
        self.failures.append(witness)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        if self.exhaustive:
            mode = "exhaustive"
        elif self.seed is None:
            mode = "on a value grid"
        else:
            mode = f"sampled (seed {self.seed})"
        extra = " [negative control]" if self.negative_control else ""
        return f"{status} {self.name}: {self.instances} instances, {mode}, " \
               f"{len(self.failures)} failures{extra}"

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "instances": self.instances,
                "exhaustive": self.exhaustive, "seed": self.seed, "partial": self.partial,
                "negative_control": self.negative_control, "notes": list(self.notes),
                "failures": [_jsonable(f) for f in self.failures[:20]]}


def _jsonable(x) -> Any:
    from .serialization import category_to_json, relation_to_json
    if isinstance(x, VCategory):
        return category_to_json(x)
    if isinstance(x, VRelation):
        return relation_to_json(x)
    if isinstance(x, MapWitness):
        return {str(k): str(v) for k, v in x.table.items()}
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    if isinstance(x, frozenset):
        return sorted(_jsonable(v) for v in x) if all(isinstance(v, str) for v in x) else repr(x)
    return str(x)


def _carrier(prefix: str, n: int) -> tuple:
    return tuple(f"{prefix}{i}" for i in range(n))


def _values(q: Quantale, values):
    if values is not None:
        return tuple(values)
    if q.finite:
        return q.elements()
    return q.grid(4)


def _fmap_graph(q: Quantale, F: SetFunctor, f: MapWitness) -> VRelation:
    FX, FY = F.obj(f.source), F.obj(f.target)
    Ff = MapWitness(FX, FY, {t: F.fmap(f, t) for t in FX})
    return graph(q, Ff)


# -- lax extension axioms -------------------------------------------------

def check_lax_axioms(E: LaxExtension, size: int = 2, values: Sequence | None = None,
                     budget: int | None = None, seed: int = 0) -> CheckReport:
    """(L1) monotonicity, (L2) lax composition, (L3) compatibility with maps.

    Without a ``budget`` all relations between ``size``-element carriers are
    enumerated (exhaustive for a finite quantale, restricted to ``values``
    otherwise); with one, ``budget`` random relations are drawn.
    """
    q = E.quantale
    F = E.functor
    vals = _values(q, values)
    X, Y, Z = _carrier("x", size), _carrier("y", size), _carrier("z", size)
    enumerate_all = budget is None
    exhaustive = enumerate_all and q.finite and values is None
    rep = CheckReport(f"lax[{E.name}]", exhaustive=exhaustive,
                      seed=None if enumerate_all else seed)
    if budget == 0:
        rep.notes.append("zero budget: nothing checked")
        return rep
    rng = random.Random(seed)
    cache: dict = {}

    def ext(r):
        if r not in cache:
            cache[r] = E.apply(r)
        return cache[r]

    def rels(src, tgt):
        if enumerate_all:
            return list(all_relations(q, src, tgt, vals))
        return [VRelation(q, src, tgt, [[rng.choice(vals) for _ in tgt] for _ in src])
                for _ in range(budget)]

    rxy = rels(X, Y)
    pairs = itertools.product(rxy, repeat=2) if enumerate_all else zip(rxy, rels(X, Y))
    for r, r2 in pairs:
        if not r.leq(r2):
            if enumerate_all:
                continue
            r2 = r.join(r2)
        rep.instances += 1
        if not ext(r).leq(ext(r2)):
            rep.fail(axiom="L1", r=r, r_prime=r2)
    ryz = rels(Y, Z)
    pairs = itertools.product(rxy, ryz) if enumerate_all else zip(rxy, ryz)
    for r, s in pairs:
        rep.instances += 1
        if not compose_relations(ext(s), ext(r)).leq(ext(compose_relations(s, r))):
            rep.fail(axiom="L2", r=r, s=s)
    for f in all_maps(X, Y):
        rep.instances += 1
        gf = graph(q, f)
        Ff = _fmap_graph(q, F, f)
        if not Ff.leq(ext(gf)):
            rep.fail(axiom="L3", map=f, part="F f <= E f")
        if not converse(Ff).leq(ext(converse(gf))):
            rep.fail(axiom="L3", map=f, part="(F f)° <= E(f°)")
    return rep


def check_enriched(E: LaxExtension, grid: Sequence | None = None, sizes: Sequence[int] = (1, 2)) -> CheckReport:
    """``u (x) 1_{FX} <= E(u (x) 1_X)`` for every ``u`` in ``grid``."""
    q = E.quantale
    us = _values(q, grid)
    rep = CheckReport(f"enriched[{E.name}]", exhaustive=q.finite and grid is None)
    for n in sizes:
        X = _carrier("x", n)
        FX = E.functor.obj(X)
        for u in us:
            rep.instances += 1
            lhs = identity_relation(q, FX).scale(u)
            rhs = E.apply(identity_relation(q, X).scale(u))
            if not lhs.leq(rhs):
                rep.fail(u=u, size=n)
    return rep


# -- initial morphisms ----------------------------------------------------

def random_category(q: Quantale, carrier: Sequence, rng: random.Random, values: Sequence) -> VCategory:
    n = len(carrier)
    m = [[q.unit if i == j else rng.choice(values) for j in range(n)] for i in range(n)]
    closed = transitive_closure(q, VRelation(q, carrier, carrier, m))
    return VCategory(q, carrier, closed.matrix)


def appendix_witness() -> tuple:
    """Discrete two-point order included in the three-point order with ``2 <= 0, 2 <= 1``."""
    q = BOOL2
    X = VCategory(q, ("0", "1"), [[True, False], [False, True]])
    Y = VCategory(q, ("0", "1", "2"), [[True, False, False], [False, True, False], [True, True, True]])
    return X, Y, MapWitness(X.carrier, Y.carrier, {"0": "0", "1": "1"})


def collapse_witness(q: Quantale) -> tuple:
    """Two points at distance ``top`` both ways, sent to a single point."""
    X = indiscrete(q, ("p", "p'"))
    Y = indiscrete(q, ("p",))
    return X, Y, MapWitness(X.carrier, Y.carrier, {"p": "p", "p'": "p"})


def random_initial_morphism(q: Quantale, rng: random.Random, values: Sequence, max_points: int = 4):
    """An inclusion of a random subspace, optionally after duplicating a point."""
    n = rng.randint(1, max_points)
    Y = random_category(q, _carrier("y", n), rng, values)
    pts = [x for x in Y.carrier if rng.random() < 0.7] or [Y.carrier[0]]
    table = {x: x for x in pts}
    if rng.random() < 0.5:
        y = rng.choice(pts)
        table[y + "'"] = y
    src = tuple(table)
    m = [[Y(table[x], table[z]) for z in src] for x in src]
    X = VCategory(q, src, m)
    kind = "collapse+inclusion" if len(src) > len(pts) else "inclusion"
    return X, Y, MapWitness(src, Y.carrier, table), kind


def sample_elements(F: SetFunctor, carrier: Sequence, rng: random.Random, k: int = 5,
                    enumerate_limit: int = 32) -> tuple:
    """All of ``F X`` when it is small, otherwise ``k`` random elements."""
    X = tuple(carrier)
    try:
        allv = F.obj(X)
        if len(allv) <= enumerate_limit:
            return allv
    except UnsupportedEnumeration:
        pass

    def one(G):
        if isinstance(G, Identity):
            return rng.choice(X)
        if isinstance(G, Powerset):
            return frozenset(x for x in X if rng.random() < 0.5)
        if isinstance(G, Distribution):
            den = rng.randint(1, 4)
            counts = [0] * len(X)
            for _ in range(den):
                counts[rng.randrange(len(X))] += 1
            return Dist({x: Fraction(c, den) for x, c in zip(X, counts)})
        if isinstance(G, Maybe):
            return None if rng.random() < 0.25 else one(G.inner)
        if isinstance(G, Labelled):
            return tuple(one(G.inner) for _ in G.labels)
        if isinstance(G, LabelProduct):
            return (rng.choice(G.labels), one(G.inner))
        if isinstance(G, Neighbourhood):
            subsets = Powerset().obj(X)
            return frozenset(b for b in subsets if rng.random() < 0.5)
        raise UnsupportedEnumeration(f"cannot sample {G.name}")

    return tuple(dict.fromkeys(one(F) for _ in range(k)))


def initial_failure(L: Lifting, X: VCategory, Y: VCategory, m: MapWitness, els: Sequence):
    F = L.functor
    imgs = {e: F.fmap(m, e) for e in els}
    LX = L.structure(X, els)
    LY = L.structure(Y, list(dict.fromkeys(imgs.values())))
    for e1, e2 in itertools.product(els, repeat=2):
        if LX(e1, e2) != LY(imgs[e1], imgs[e2]):
            return {"pair": (e1, e2), "domain_value": LX(e1, e2),
                    "codomain_value": LY(imgs[e1], imgs[e2])}
    return None


def check_preserves_initial(L: Lifting, q: Quantale, budget: int = 100, seed: int = 0,
                            values: Sequence | None = None, max_points: int = 4,
                            samples: int = 4, negative_control: bool = False) -> CheckReport:
    """Send initial morphisms through ``L`` and test that the images are initial.

    The fixed witnesses (the collapse of two indistinguishable points and,
    over ``bool2``, the discrete two-point subspace of the three-point order)
    come first, followed by ``budget`` random subspace inclusions, some
    composed with the collapse of a duplicated point.
    """
    rng = random.Random(seed)
    vals = _values(q, values)
    rep = CheckReport(f"initial[{L.name}]", seed=seed, negative_control=negative_control)
    if budget == 0:
        rep.notes.append("zero budget: nothing checked")
        return rep
    cases = []
    if isinstance(q, TwoValued):
        cases.append((*appendix_witness(), "appendix"))
    cases.append((*collapse_witness(q), "collapse"))
    for _ in range(budget):
        X, Y, m, kind = random_initial_morphism(q, rng, vals, max_points)
        cases.append((X, Y, m, kind))
    for X, Y, m, kind in cases:
        els = sample_elements(L.functor, X.carrier, rng, samples)
        rep.instances += 1
        bad = initial_failure(L, X, Y, m, els)
        if bad is not None:
            rep.fail(kind=kind, domain=X, codomain=Y, map=m, **bad)
    return rep


def check_locally_monotone(L: Lifting, q: Quantale = BOOL2, max_points: int = 2) -> CheckReport:
    """``f <= g`` pointwise implies ``F f <= F g`` in the lifted structure."""
    rep = CheckReport(f"local-monotone[{L.name}]", exhaustive=True)
    cats = list(all_categories(q, max_points))
    for X in cats:
        for Y in cats:
            LY = L.structure(Y)
            FX = L.elements(X)
            maps = [f for f in all_maps(X.carrier, Y.carrier) if is_vfunctor(f, X, Y)]
            for f, g in itertools.product(maps, repeat=2):
                if not all(q.leq(q.unit, Y(f(x), g(x))) for x in X.carrier):
                    continue
                rep.instances += 1
                for t in FX:
                    if not q.leq(q.unit, LY(L.functor.fmap(f, t), L.functor.fmap(g, t))):
                        rep.fail(domain=X, codomain=Y, f=f, g=g, element=t)
                        break
    return rep


def all_categories(q: Quantale, max_points: int = 2):
    """Every V-category on carriers of size ``0..max_points`` (finite quantales)."""
    for n in range(max_points + 1):
        X = _carrier("x", n)
        off = [(i, j) for i in range(n) for j in range(n) if i != j]
        for vals in itertools.product(q.elements(), repeat=len(off)):
            m = [[q.unit] * n for _ in range(n)]
            for (i, j), v in zip(off, vals):
                m[i][j] = v
            c = VCategory(q, X, m)
            if is_category(c):
                yield c


# -- Galois connections ---------------------------------------------------

def upsets_bool2(preorder: VCategory) -> list:
    """All up-closed subsets of a ``bool2`` category, as boolean vectors.

    Enumerated as bitmasks with numpy: a mask is kept when no pair
    ``x <= y`` has ``x`` inside and ``y`` outside.
    """
    n = len(preorder)
    if n > 22:
        raise UnsupportedEnumeration("too many points for bitmask enumeration")
    masks = np.arange(1 << n, dtype=np.int64)
    ok = np.ones(masks.shape, dtype=bool)
    for i in range(n):
        for j in range(n):
            if i != j and preorder.matrix[i][j]:
                ok &= ~(((masks >> i) & 1).astype(bool) & ~((masks >> j) & 1).astype(bool))
    keep = masks[ok]
    return [tuple(bool((int(mk) >> i) & 1) for i in range(n)) for mk in keep]


def compatible_components(L: Lifting, q: Quantale, arity: int) -> list:
    """Yoneda components of every ``arity``-ary lifting compatible with ``L``.

    These are the V-functors ``L(V^kappa) -> V``; each is returned as a dict
    on ``F(V^kappa)``.
    """
    Vk = power(value_category(q), tuple(range(arity)))
    lifted = L.structure(Vk)
    els = lifted.carrier
    if isinstance(q, TwoValued):
        return [dict(zip(els, vec)) for vec in upsets_bool2(lifted)]
    return [{e: f[e][0] for e in els} for f in vfunctors_into_values(lifted, 1)]


def lifting_from_compatible(L: Lifting, q: Quantale, max_arity: int = 2) -> list:
    out = []
    for k in range(max_arity + 1):
        for i, comp in enumerate(compatible_components(L, q, k)):
            out.append(from_yoneda(f"P{k}_{i}", L.functor, q, k, comp))
    return out


def check_galois(L: Lifting | None = None, mode: str = "lift", q: Quantale = BOOL2,
                 max_points: int = 2, max_arity: int = 2, extension: LaxExtension | None = None,
                 family: Sequence[PredicateLifting] = ()) -> CheckReport:
    """Finite shadows of the adjunctions between liftings, extensions and predicate liftings.

    ``mode="lift"``: with ``P(L)`` all liftings of arity ``<= max_arity``
    compatible with ``L``, check ``L <= F^{P(L)}`` (equality when ``L`` is
    certified to preserve initial morphisms) and ``family`` is contained in
    ``P(F^family)``.

    ``mode="extension"``: with all liftings induced by ``extension``, check
    that their Kantorovich extension equals ``extension`` on all relations.
    """
    if not q.finite:
        raise UnsupportedEnumeration("Galois checks need a finite quantale")
    if mode == "lift":
        rep = CheckReport(f"galois-lift[{L.name}]", exhaustive=True)
        lams = lifting_from_compatible(L, q, max_arity)
        rep.notes.append(f"{len(lams)} compatible liftings of arity <= {max_arity}")
        for c in all_categories(q, max_points):
            els = L.elements(c)
            original = L.structure(c, els)
            rebuilt = KantorovichLifting(lams, L.functor, q, method="initial").structure(c, els)
            rep.instances += 1
            if not original.relation.leq(rebuilt.relation):
                rep.fail(kind="L <= F^P(L)", category=c)
            elif L.preserves_initial and original != rebuilt:
                rep.fail(kind="F^P(L) = L", category=c, lifted=original, rebuilt=rebuilt)
        for lam in family:
            K = KantorovichLifting([lam], lam.functor, q, method="initial")
            rep.instances += 1
            if not compatibility_check(lam, K):
                rep.fail(kind="family in P(F^family)", lifting=lam.name)
        return rep
    if mode == "extension":
        E = extension
        rep = CheckReport(f"galois-extension[{E.name}]", exhaustive=True)
        lams = induced_family(E, max_arity)
        rep.notes.append(f"{len(lams)} induced liftings of arity <= {max_arity}")
        K = KantorovichExtension(lams, q, E.functor)
        for n, m in itertools.product(range(1, max_points + 1), repeat=2):
            for r in all_relations(q, _carrier("x", n), _carrier("y", m)):
                rep.instances += 1
                if E.apply(r) != K.apply(r):
                    rep.fail(kind="E = E^{induced}", relation=r)
        return rep
    raise ValueError(f"unknown mode {mode!r}")


def induced_family(E: LaxExtension, max_arity: int = 2) -> list:
    q = E.quantale
    out = []
    for k in range(max_arity + 1):
        Fk = E.functor.obj(tuple(range(k)))
        for i, r in enumerate(all_relations(q, ("*",), Fk)):
            out.append(induced_pl(E, r, k, name=f"I{k}_{i}"))
    return out


def induced_by(lam: PredicateLifting, E: LaxExtension, max_points: int = 2) -> bool:
    """Does some ``r: 1 -/-> F kappa`` induce the same evaluator as ``lam`` on small carriers?"""
    q = E.quantale
    for cand in induced_family(E, lam.arity):
        if cand.arity != lam.arity:
            continue
        same = True
        for n in range(max_points + 1):
            X = _carrier("x", n)
            FX = lam.functor.obj(X)
            for flat in itertools.product(q.elements(), repeat=lam.arity * n):
                ps = tuple({x: flat[i * n + j] for j, x in enumerate(X)} for i in range(lam.arity))
                if any(lam(ps, t) != cand(ps, t) for t in FX):
                    same = False
                    break
            if not same:
                break
        if same:
            return True
    return False


def check_order_reflecting(extensions: Sequence[LaxExtension], max_points: int = 2) -> CheckReport:
    """``I(E1) <= I(E2)`` on all small categories implies ``E1 <= E2`` on all small relations."""
    rep = CheckReport("order-reflecting[I]", exhaustive=True)
    q = extensions[0].quantale
    cats = list(all_categories(q, max_points))
    rels = [r for n, m in itertools.product(range(1, max_points + 1), repeat=2)
            for r in all_relations(q, _carrier("x", n), _carrier("y", m))]
    for E1, E2 in itertools.permutations(extensions, 2):
        L1, L2 = ExtensionLifting(E1), ExtensionLifting(E2)
        lift_le = all(L1.structure(c).relation.leq(L2.structure(c).relation) for c in cats)
        ext_le = all(E1.apply(r).leq(E2.apply(r)) for r in rels)
        rep.instances += 1
        if lift_le and not ext_le:
            rep.fail(first=E1.name, second=E2.name)
    return rep


def example_constant_top(q: Quantale = BOOL2) -> dict:
    """Constant-top lifting: compatible with the identity lifting, not induced by the identity extension."""
    from .extensions import IdentityExtension
    E = IdentityExtension(q)
    lam = constant_top(q)
    return {"compatible": bool(compatibility_check(lam, ExtensionLifting(E))),
            "induced": induced_by(lam, E)}


def run_suite(name: str, seed: int = 0, budget: int = 100) -> list:
    """Reports for the CLI suites ``lax``, ``initial``, ``galois``, ``enriched`` or ``all``."""
    from .extensions import BrokenExtension, EgliMilner
    from .liftings import DiscreteLifting, DualLifting, SymmetrizeLifting, TVLifting
    from .predicates import diamond, expectation
    from .quantale import LUK01
    out = []
    if name in ("lax", "all"):
        for mode in ("lower", "upper", "both"):
            out.append(check_lax_axioms(EgliMilner(BOOL2, mode), budget=None if budget else 0))
        out.append(check_lax_axioms(KantorovichExtension([diamond()], BOOL2),
                                    budget=None if budget else 0))
        neg = check_lax_axioms(BrokenExtension(BOOL2), budget=None if budget else 0)
        neg.negative_control = True
        out.append(neg)
    if name in ("initial", "all"):
        out.append(check_preserves_initial(KantorovichLifting([expectation()]), LUK01, budget, seed))
        out.append(check_preserves_initial(KantorovichLifting([diamond()]), BOOL2, budget, seed))
        out.append(check_preserves_initial(KantorovichLifting([diamond(LUK01)]), LUK01, budget, seed))
        for Lx in (DualLifting(), SymmetrizeLifting()):
            out.append(check_preserves_initial(Lx, LUK01, budget, seed))
        out.append(check_preserves_initial(DiscreteLifting(), BOOL2, budget, seed, negative_control=True))
        out.append(check_preserves_initial(TVLifting(), LUK01, budget, seed, negative_control=True))
    if name in ("galois", "all") and budget:
        L = ExtensionLifting(EgliMilner(BOOL2, "lower"))
        out.append(check_galois(L, "lift", family=[diamond()]))
    if name in ("enriched", "all"):
        grid = None if budget else ()
        for mode in ("lower", "upper", "both"):
            out.append(check_enriched(EgliMilner(LUK01, mode), LUK01.grid(10) if grid is None else ()))
    return out


__all__ = [
    "CheckReport", "check_lax_axioms", "check_enriched", "check_preserves_initial",
    "check_locally_monotone", "check_galois", "check_order_reflecting", "compatible_components",
    "lifting_from_compatible", "induced_family", "induced_by", "example_constant_top",
    "all_categories", "random_category", "random_initial_morphism", "appendix_witness",
    "collapse_witness", "sample_elements", "initial_failure", "upsets_bool2", "run_suite",
    "power_carrier", "yoneda_component",
]
