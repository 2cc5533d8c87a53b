"""Predicate liftings stored as evaluators.

A ``kappa``-ary lifting receives ``kappa`` predicates on ``X`` (mappings
``state -> value``) and an element of ``F X`` and returns a value. The same
data can be read as a V-relation ``g: kappa -/-> X`` (row ``i`` is predicate
``i``), which is how residual and induced formulas consume it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Mapping, Sequence

from .enriched import MapWitness, VRelation
from .functors import (Distribution, Identity, Labelled, LabelProduct, Maybe, Neighbourhood,
                       Powerset, SetFunctor)
from .quantale import BOOL2, LUK01, DomainError, Quantale


@dataclass(frozen=True)
class PredicateLifting:
    name: str
    arity: int
    functor: SetFunctor
    quantale: Quantale
    fn: Callable = field(compare=False, repr=False)

    def __call__(self, preds: Sequence[Mapping], elem):
        if len(preds) != self.arity:
            raise ValueError(f"{self.name} expects {self.arity} predicates, got {len(preds)}")
        return self.fn(tuple(preds), elem)

    def on_relation(self, g: VRelation, elem):
        """Evaluate with predicates given as the rows of ``g: kappa -/-> X``."""
        return self(preds_from_relation(g), elem)

    def apply(self, preds, elements) -> dict:
        return {e: self(preds, e) for e in elements}


def preds_from_relation(g: VRelation) -> tuple:
    return tuple(dict(zip(g.target, row)) for row in g.matrix)


def relation_from_preds(q: Quantale, carrier: Sequence, preds: Sequence[Mapping]) -> VRelation:
    return VRelation(q, tuple(range(len(preds))), carrier, [[p[x] for x in carrier] for p in preds])


def preds_from_vectors(carrier: Sequence, f: Mapping[Any, tuple], arity: int) -> tuple:
    """Turn ``state -> kappa-tuple`` into ``kappa`` predicates."""
    return tuple({x: f[x][i] for x in carrier} for i in range(arity))


# -- catalogue -------------------------------------------------------------

def diamond(q: Quantale = BOOL2, functor: SetFunctor | None = None) -> PredicateLifting:
    """``dia(f)(A)`` is the join of ``f`` over ``A``."""
    return PredicateLifting("dia", 1, functor or Powerset(), q,
                            lambda ps, A: q.join_all([ps[0][x] for x in A]))


def box(q: Quantale = BOOL2, functor: SetFunctor | None = None) -> PredicateLifting:
    return PredicateLifting("box", 1, functor or Powerset(), q,
                            lambda ps, A: q.meet_all([ps[0][x] for x in A]))


def _expect(f: Mapping, mu) -> Fraction:
    return sum((p * f[x] for x, p in mu.items()), Fraction(0))


def expectation(q: Quantale = LUK01) -> PredicateLifting:
    """Expected value of a ``[0,1]``-valued predicate."""
    if q != LUK01:
        raise DomainError("the expectation lifting is defined over luk01")
    return PredicateLifting("E", 1, Distribution(), q, lambda ps, mu: _expect(ps[0], mu))


def expectation_or_stop(q: Quantale = LUK01) -> PredicateLifting:
    """Expectation on ``1 + D``; the termination point is sent to bottom."""
    if q != LUK01:
        raise DomainError("the expectation lifting is defined over luk01")
    return PredicateLifting("E", 1, Maybe(Distribution()), q,
                            lambda ps, t: q.bottom if t is None else _expect(ps[0], t))


def stop(q: Quantale, functor: SetFunctor | None = None) -> PredicateLifting:
    """Nullary modality: top at termination, bottom elsewhere."""
    return PredicateLifting("stop", 0, functor or Maybe(Distribution()), q,
                            lambda ps, t: q.top if t is None else q.bottom)


def labelled(lam: PredicateLifting, labels: Sequence, label) -> PredicateLifting:
    """Apply ``lam`` to the ``label`` component of an element of ``F^A``."""
    labels = tuple(labels)
    i = labels.index(label)
    return PredicateLifting(f"{lam.name}_{label}", lam.arity, Labelled(labels, lam.functor),
                            lam.quantale, lambda ps, t: lam(ps, t[i]))


def on_label_product(lam: PredicateLifting, labels: Sequence, label) -> PredicateLifting:
    """For ``A x F``: ``lam`` on matching label, bottom otherwise."""
    labels = tuple(labels)
    q = lam.quantale
    return PredicateLifting(f"{lam.name}_{label}", lam.arity, LabelProduct(labels, lam.functor), q,
                            lambda ps, t: lam(ps, t[1]) if t[0] == label else q.bottom)


def identity_lifting(q: Quantale) -> PredicateLifting:
    return PredicateLifting("id", 1, Identity(), q, lambda ps, x: ps[0][x])


def constant_top(q: Quantale, functor: SetFunctor | None = None, arity: int = 1) -> PredicateLifting:
    return PredicateLifting("const_top", arity, functor or Identity(), q, lambda ps, t: q.top)


def negation(q: Quantale) -> PredicateLifting:
    """``hom(f(x), bottom)`` on the identity functor."""
    return PredicateLifting("neg", 1, Identity(), q, lambda ps, x: q.hom(ps[0][x], q.bottom))


def neighbourhood_box() -> PredicateLifting:
    """Two-valued ``box`` for neighbourhood frames: the truth set is a neighbourhood."""
    q = BOOL2
    return PredicateLifting("nbox", 1, Neighbourhood(), q,
                            lambda ps, U: frozenset(x for x, v in ps[0].items() if v) in U)


# -- Yoneda view -----------------------------------------------------------

def power_carrier(q: Quantale, arity: int, values: Sequence | None = None) -> tuple:
    vals = tuple(q.elements() if values is None else values)
    return tuple(itertools.product(vals, repeat=arity))


def yoneda_component(lam: PredicateLifting, values: Sequence | None = None,
                     functor: SetFunctor | None = None) -> dict:
    """``lam(1)`` as a table on ``F(V^kappa)`` (projections as predicates)."""
    q = lam.quantale
    pts = power_carrier(q, lam.arity, values)
    proj = tuple({p: p[i] for p in pts} for i in range(lam.arity))
    F = functor or lam.functor
    return {t: lam(proj, t) for t in F.obj(pts)}


def from_yoneda(name: str, functor: SetFunctor, q: Quantale, arity: int,
                component: Mapping, values: Sequence | None = None) -> PredicateLifting:
    """The lifting ``f |-> component . F f`` determined by a map ``F(V^kappa) -> V``."""
    pts = power_carrier(q, arity, values)

    def fn(ps, t):
        carrier = tuple(ps[0]) if ps else tuple(functor.support(t))
        tup = {x: tuple(p[x] for p in ps) for x in carrier}
        if isinstance(functor, Neighbourhood):
            return component[functor.fmap(MapWitness(carrier, pts, tup), t)]
        return component[functor.fmap(tup, t)]

    return PredicateLifting(name, arity, functor, q, fn)


# -- induced liftings ------------------------------------------------------

def induced_pl(extension, frak_r: VRelation, arity: int, name: str | None = None) -> PredicateLifting:
    """``lam(f) = E(f) . r`` for ``r: 1 -/-> F kappa`` and ``f: kappa -/-> X``."""
    F = extension.functor
    q = extension.quantale
    Fk = tuple(frak_r.target)
    if len(frak_r.source) != 1:
        raise ValueError("the selecting relation must have a one-point source")
    row = frak_r.matrix[0]
    support = [(s, u) for s, u in zip(Fk, row) if u != q.bottom]

    def fn(ps, t):
        carrier = tuple(ps[0]) if ps else tuple(F.support(t))
        f = relation_from_preds(q, carrier, ps)
        vals = extension.relate(f, [s for s, _ in support], [t]) if support else None
        return q.join_all([q.tensor(u, vals.matrix[i][0]) for i, (_, u) in enumerate(support)])

    return PredicateLifting(name or f"induced[{extension.name}]", arity, F, q, fn)


# -- checks ----------------------------------------------------------------

def _all_preds(q: Quantale, carrier: Sequence, arity: int, values: Sequence | None):
    vals = tuple(q.elements() if values is None else values)
    n = len(carrier)
    for flat in itertools.product(vals, repeat=arity * n):
        yield tuple({x: flat[i * n + j] for j, x in enumerate(carrier)} for i in range(arity))


def monotonicity_violation(lam: PredicateLifting, carrier: Sequence, elements: Sequence | None = None,
                           values: Sequence | None = None):
    """Search for ``f <= g`` with ``lam(f) not <= lam(g)``; return a witness or ``None``."""
    q = lam.quantale
    elements = lam.functor.obj(carrier) if elements is None else elements
    family = list(_all_preds(q, carrier, lam.arity, values))
    table = [lam.apply(ps, elements) for ps in family]
    for (f, tf), (g, tg) in itertools.product(zip(family, table), repeat=2):
        if all(q.leq(f[i][x], g[i][x]) for i in range(lam.arity) for x in carrier):
            for e in elements:
                if not q.leq(tf[e], tg[e]):
                    return {"smaller": f, "larger": g, "element": e,
                            "values": (tf[e], tg[e])}
    return None


def is_monotone(lam, carrier, elements=None, values=None) -> bool:
    return monotonicity_violation(lam, carrier, elements, values) is None


def naturality_violation(lam: PredicateLifting, f: MapWitness, preds: Sequence[Mapping],
                         elements: Sequence):
    """Check ``lam(p . f) = lam(p) . F f`` on ``elements`` of ``F(source)``."""
    pulled = tuple({x: p[f(x)] for x in f.source} for p in preds)
    F = lam.functor
    for e in elements:
        lhs = lam(pulled, e)
        rhs = lam(preds, F.fmap(f, e))
        if lhs != rhs:
            return {"element": e, "pulled": lhs, "pushed": rhs}
    return None

