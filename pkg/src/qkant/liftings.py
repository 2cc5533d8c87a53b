"""Functor liftings: rules sending a V-category ``(X, a)`` to a structure on ``F X``.

Every lifting evaluates on an explicit list of elements of ``F X`` (by default
the whole of ``F X``), because behavioural distance only ever needs the
structure between the images of a transition map.

``preserves_initial`` is a certificate: ``True`` when the construction is
known to send initial morphisms to initial morphisms, ``False`` when it is
known not to, ``None`` when unknown. Empirical checks live in
:mod:`qkant.propcheck`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .enriched import (VCategory, all_relations, compose_relations, converse, dualize,
                       is_vfunctor, power, symmetrize, transitive_closure, value_category,
                       vfunctors_into_values)
from .extensions import EgliMilner, LaxExtension
from .functors import (Compose, Distribution, Identity, Labelled, LabelProduct, Maybe,
                       Neighbourhood, Powerset, SetFunctor, functor_from_string)
from .predicates import (PredicateLifting, diamond, expectation, neighbourhood_box,
                         preds_from_vectors, yoneda_component)
from .quantale import LUK01, DomainError, Quantale, UnsupportedEnumeration
from .transport import tv_lift, wasserstein_lp


def _dedup(elements) -> tuple:
    return tuple(dict.fromkeys(elements))


class Lifting:
    name = "lifting"
    functor: SetFunctor = Identity()
    preserves_initial: bool | None = None
    exact = True

    def elements(self, c: VCategory) -> tuple:
        return self.functor.obj(c.carrier)

    def distance(self, c: VCategory, e1, e2):
        return self.structure(c, [e1, e2])(e1, e2)

    def matrix(self, c: VCategory, els: tuple) -> list:
        return [[self.distance(c, e1, e2) for e2 in els] for e1 in els]

    def structure(self, c: VCategory, elements: Sequence | None = None) -> VCategory:
        els = self.elements(c) if elements is None else _dedup(elements)
        return VCategory(c.quantale, els, self.matrix(c, els), note=self.name)

    def apply(self, c: VCategory) -> VCategory:
        return self.structure(c)

    def __repr__(self):
        return self.name


# -- liftings of the identity functor --------------------------------------

class IdentityLifting(Lifting):
    name = "id"
    preserves_initial = True

    def structure(self, c, elements=None):
        return c if elements is None else c.restrict(_dedup(elements))


class DualLifting(Lifting):
    name = "dual"
    preserves_initial = True

    def structure(self, c, elements=None):
        d = dualize(c)
        return d if elements is None else d.restrict(_dedup(elements))


class SymmetrizeLifting(Lifting):
    name = "sym"
    preserves_initial = True

    def structure(self, c, elements=None):
        d = symmetrize(c)
        return d if elements is None else d.restrict(_dedup(elements))


class EquivalenceLifting(Lifting):
    """Final structure for the cospan ``(X, a) -> X <- (X, a°)``.

    Over ``bool2`` this is the equivalence relation generated by a preorder.
    """

    name = "equiv"
    preserves_initial = False

    def structure(self, c, elements=None):
        r = c.relation
        closed = transitive_closure(c.quantale, r.join(converse(r)))
        d = VCategory(c.quantale, c.carrier, closed.matrix)
        return d if elements is None else d.restrict(_dedup(elements))


class DiscreteLifting(Lifting):
    """``F X`` with the discrete structure, whatever ``a`` is."""

    preserves_initial = False

    def __init__(self, functor: SetFunctor | None = None):
        self.functor = functor or Identity()
        self.name = "discrete"

    def matrix(self, c, els):
        q = c.quantale
        return [[q.unit if e1 == e2 else q.bottom for e2 in els] for e1 in els]


# -- Kantorovich liftings --------------------------------------------------

def _closed_form(liftings, functor) -> str | None:
    names = sorted(l.name for l in liftings)
    if names == ["dia"] and isinstance(functor, Powerset):
        return "egli-lower"
    if names == ["E"] and isinstance(functor, Distribution) and liftings[0].quantale == LUK01:
        return "lp"
    return None


class KantorovichLifting(Lifting):
    """Initial structure on ``F X`` w.r.t. ``lam(f)`` for V-functors ``f: X -> V^kappa``.

    ``method``:

    * ``initial``  -- enumerate V-functors into ``V^kappa`` (finite ``values``);
    * ``residual`` -- meet of ``hom(lam(g)(x), lam(a.g)(y))`` over all ``g``;
    * ``closed``   -- registered closed forms: ``{dia}`` on the powerset is
      the lower Egli-Milner structure, ``{E}`` on distributions is the
      optimal-transport linear program;
    * ``auto``     -- closed form if registered, else ``initial``.

    Over an infinite quantale ``values`` must be given for the enumerating
    methods, and the result is then only an approximation from above.
    """

    preserves_initial = True

    def __init__(self, liftings: Sequence[PredicateLifting], functor: SetFunctor | None = None,
                 quantale: Quantale | None = None, method: str = "auto",
                 values: Sequence | None = None):
        self.liftings = tuple(liftings)
        if functor is None:
            if not self.liftings:
                raise ValueError("an empty family needs an explicit functor")
            functor = self.liftings[0].functor
        self.functor = functor
        self.quantale = quantale or (self.liftings[0].quantale if self.liftings else None)
        closed = _closed_form(self.liftings, functor)
        if method == "auto":
            method = "closed" if closed else "initial"
        if method == "closed" and closed is None:
            raise UnsupportedEnumeration("no closed form registered for this family")
        if method not in ("initial", "residual", "closed"):
            raise ValueError(f"unknown method {method!r}")
        self.method = method
        self.closed = closed
        self.values = None if values is None else tuple(values)
        if method != "closed" and self.values is None and self.quantale is not None \
                and not self.quantale.finite:
            raise UnsupportedEnumeration(
                f"Kantorovich lifting over {self.quantale.name} by enumeration needs a value grid")
        self.exact = method == "closed" or self.values is None
        self.preserves_initial = True if self.exact else None
        self.name = "kantorovich:" + ",".join(l.name for l in self.liftings)

    def matrix(self, c, els):
        q = c.quantale
        if self.method == "closed":
            if self.closed == "egli-lower":
                return [list(r) for r in EgliMilner(q).relate(c.relation, els, els).matrix]
            return [[wasserstein_lp(c, e1, e2) for e2 in els] for e1 in els]
        out = [[q.top] * len(els) for _ in els]
        h, m = q.hom, q.meet
        for vec in self._vectors(c, els):
            for i, u in enumerate(vec[0]):
                row = out[i]
                for j, v in enumerate(vec[1]):
                    row[j] = m(row[j], h(u, v))
        return out

    def _vectors(self, c, els):
        """Pairs (left values, right values) whose hom-meet defines the structure."""
        q = c.quantale
        for lam in self.liftings:
            if self.method == "initial":
                for f in vfunctors_into_values(c, lam.arity, self.values):
                    ps = preds_from_vectors(c.carrier, f, lam.arity)
                    vec = [lam(ps, e) for e in els]
                    yield vec, vec
            else:
                a = c.relation
                for g in all_relations(q, tuple(range(lam.arity)), c.carrier, self.values):
                    ag = compose_relations(a, g)
                    yield [lam.on_relation(g, e) for e in els], [lam.on_relation(ag, e) for e in els]


def kantorovich_lift(liftings: Sequence[PredicateLifting], c: VCategory, method: str = "auto",
                     elements: Sequence | None = None, functor: SetFunctor | None = None,
                     values: Sequence | None = None) -> VCategory:
    L = KantorovichLifting(liftings, functor, c.quantale, method, values)
    return L.structure(c, elements)


class TVLifting(Lifting):
    """Total variation distance on finite distributions; ignores the base structure."""

    name = "tv"
    preserves_initial = False

    def __init__(self):
        self.functor = Distribution()

    def matrix(self, c, els):
        if c.quantale != LUK01:
            raise DomainError("total variation is defined over luk01")
        return [[tv_lift(e1, e2) for e2 in els] for e1 in els]


class ExtensionLifting(Lifting):
    """``(F X, E a)`` for a lax extension ``E``."""

    preserves_initial = True

    def __init__(self, extension: LaxExtension):
        self.extension = extension
        self.functor = extension.functor
        self.name = extension.name

    def matrix(self, c, els):
        return [list(r) for r in self.extension.relate(c.relation, els, els).matrix]


# -- combinators -----------------------------------------------------------

class ComposedLifting(Lifting):
    """``outer . inner``: lift with ``inner``, then lift the result with ``outer``.

    For an ``outer`` lifting of a non-identity functor only the support of the
    requested elements is lifted by ``inner``. This is exact whenever
    ``outer`` preserves initial morphisms (subspace inclusions are initial).
    """

    def __init__(self, outer: Lifting, inner: Lifting):
        self.outer, self.inner = outer, inner
        if isinstance(outer.functor, Identity):
            self.functor = inner.functor
        elif isinstance(inner.functor, Identity):
            self.functor = outer.functor
        else:
            self.functor = Compose(outer.functor, inner.functor)
        both = (outer.preserves_initial, inner.preserves_initial)
        self.preserves_initial = True if both == (True, True) else None
        self.exact = outer.exact and inner.exact
        self.name = f"{outer.name}∘{inner.name}"

    def structure(self, c, elements=None):
        els = self.elements(c) if elements is None else _dedup(elements)
        if isinstance(self.outer.functor, Identity):
            mid = self.inner.structure(c, els)
            return self.outer.structure(mid, els)
        supp = _dedup(x for e in els for x in sorted(self.outer.functor.support(e), key=repr))
        if isinstance(self.inner.functor, Identity):
            supp = tuple(x for x in c.carrier if x in set(supp))
        mid = self.inner.structure(c, supp)
        return self.outer.structure(mid, els)

    def matrix(self, c, els):
        return [list(r) for r in self.structure(c, els).matrix]


class LabelledLifting(Lifting):
    """``F^A``: meet over labels of the inner structure on components."""

    def __init__(self, labels: Sequence, inner: Lifting):
        self.labels = tuple(labels)
        self.inner = inner
        self.functor = Labelled(self.labels, inner.functor)
        self.preserves_initial = inner.preserves_initial
        self.exact = inner.exact
        self.name = f"({inner.name})^A"

    def matrix(self, c, els):
        q = c.quantale
        out = [[q.top] * len(els) for _ in els]
        for i in range(len(self.labels)):
            comp = self.inner.structure(c, [e[i] for e in els])
            for a, e1 in enumerate(els):
                for b, e2 in enumerate(els):
                    out[a][b] = q.meet(out[a][b], comp(e1[i], e2[i]))
        return out


class MaybeLifting(Lifting):
    """``1 + F``: termination is at distance ``k`` from itself and bottom from the rest."""

    def __init__(self, inner: Lifting):
        self.inner = inner
        self.functor = Maybe(inner.functor)
        self.preserves_initial = inner.preserves_initial
        self.exact = inner.exact
        self.name = f"1+{inner.name}"

    def matrix(self, c, els):
        q = c.quantale
        body = [e for e in els if e is not None]
        inner = self.inner.structure(c, body) if body else None
        out = []
        for e1 in els:
            row = []
            for e2 in els:
                if e1 is None or e2 is None:
                    row.append(q.unit if e1 is None and e2 is None else q.bottom)
                else:
                    row.append(inner(e1, e2))
            out.append(row)
        return out


class LabelProductLifting(Lifting):
    def __init__(self, labels: Sequence, inner: Lifting):
        self.labels = tuple(labels)
        self.inner = inner
        self.functor = LabelProduct(self.labels, inner.functor)
        self.preserves_initial = inner.preserves_initial
        self.exact = inner.exact
        self.name = f"A x {inner.name}"

    def matrix(self, c, els):
        q = c.quantale
        inner = self.inner.structure(c, [e[1] for e in els])
        return [[inner(e1[1], e2[1]) if e1[0] == e2[0] else q.bottom for e2 in els] for e1 in els]


def named_lift(kind: str, c: VCategory, extension: LaxExtension | None = None,
               functor: SetFunctor | None = None, elements: Sequence | None = None) -> VCategory:
    """``discrete``, ``dual``, ``symmetrize``/``sym``, ``equiv`` or ``from_extension``."""
    if kind == "discrete":
        L: Lifting = DiscreteLifting(functor)
    elif kind == "dual":
        L = DualLifting()
    elif kind in ("symmetrize", "sym"):
        L = SymmetrizeLifting()
    elif kind == "equiv":
        L = EquivalenceLifting()
    elif kind == "from_extension":
        if extension is None:
            raise ValueError("from_extension needs an extension")
        L = ExtensionLifting(extension)
    else:
        raise ValueError(f"unknown lifting kind {kind!r}")
    return L.structure(c, elements)


# -- compatibility ---------------------------------------------------------

@dataclass
class CompatibilityReport:
    compatible: bool
    witness: dict | None = None
    grid_restricted: bool = False
    checked_pairs: int = 0
    notes: list = field(default_factory=list)

    def __bool__(self):
        return self.compatible


def compatibility_check(lam: PredicateLifting, L: Lifting, values: Sequence | None = None,
                        functor: SetFunctor | None = None, max_points: int = 4096) -> CompatibilityReport:
    """Is the Yoneda component ``lam(1): L(V^kappa) -> V`` a V-functor?

    ``values`` restricts ``V`` to a finite sample (flagged in the report);
    ``functor`` may replace ``lam.functor`` by an enumerable version, e.g.
    distributions on a denominator grid.
    """
    q = lam.quantale
    if values is None and not q.finite:
        raise UnsupportedEnumeration("compatibility over an infinite quantale needs a value grid")
    F = functor or lam.functor
    Vk = power(value_category(q, values), tuple(range(lam.arity)), max_size=max_points)
    comp = yoneda_component(lam, values, F)
    els = tuple(comp)
    if len(els) > max_points:
        raise UnsupportedEnumeration(f"{len(els)} points exceed the guard {max_points}")
    lifted = L.structure(Vk, els)
    h, le = q.hom, q.leq
    n = 0
    for e1, e2 in itertools.product(els, repeat=2):
        n += 1
        if not le(lifted(e1, e2), h(comp[e1], comp[e2])):
            return CompatibilityReport(False, {"pair": (e1, e2), "lifted": lifted(e1, e2),
                                              "values": (comp[e1], comp[e2])},
                                       values is not None, n)
    return CompatibilityReport(True, None, values is not None, n)


def compatible_on(lam: PredicateLifting, L: Lifting, c: VCategory, values: Sequence | None = None,
                  elements: Sequence | None = None):
    """Other side of the equivalence: ``lam(f)`` is a V-functor ``L(X, a) -> V`` for every
    V-functor ``f: (X, a) -> V^kappa``. Returns a witness or ``None``."""
    q = lam.quantale
    els = L.elements(c) if elements is None else _dedup(elements)
    lifted = L.structure(c, els)
    for f in vfunctors_into_values(c, lam.arity, values):
        ps = preds_from_vectors(c.carrier, f, lam.arity)
        vec = {e: lam(ps, e) for e in els}
        for e1, e2 in itertools.product(els, repeat=2):
            if not q.leq(lifted(e1, e2), q.hom(vec[e1], vec[e2])):
                return {"predicate": f, "pair": (e1, e2)}
    return None


def exponential(c: VCategory, d: VCategory, max_size: int = 4096) -> VCategory:
    """``[c, d]``: V-functors ``c -> d`` with ``(h, k)`` at the meet of ``hom(a(x,x'), b(h x, k x'))``."""
    q = c.quantale
    X = c.carrier
    if len(d.carrier) ** len(X) > max_size:
        raise UnsupportedEnumeration("exponential too large")
    maps = [h for h in itertools.product(d.carrier, repeat=len(X))
            if is_vfunctor(dict(zip(X, h)), c, d)]
    out = [[q.meet_all([q.hom(c.matrix[i][j], d(h[i], k[j]))
                        for i in range(len(X)) for j in range(len(X))]) for k in maps] for h in maps]
    return VCategory(q, maps, out, note="exponential")


# -- construction from text ------------------------------------------------

_ID_LIFTINGS = {"id": IdentityLifting, "dual": DualLifting, "sym": SymmetrizeLifting,
                "equiv": EquivalenceLifting}


def _base_lifting(part: str, functor: SetFunctor, q: Quantale) -> Lifting:
    if isinstance(functor, Labelled):
        return LabelledLifting(functor.labels, _base_lifting(part, functor.inner, q))
    if isinstance(functor, LabelProduct):
        return LabelProductLifting(functor.labels, _base_lifting(part, functor.inner, q))
    if isinstance(functor, Maybe):
        return MaybeLifting(_base_lifting(part, functor.inner, q))
    if part == "tv":
        if not isinstance(functor, Distribution):
            raise ValueError("tv lifts the distribution functor")
        return TVLifting()
    if part in ("egli-lower", "egli-upper", "egli"):
        if not isinstance(functor, Powerset):
            raise ValueError(f"{part} lifts the powerset functor")
        mode = {"egli-lower": "lower", "egli-upper": "upper", "egli": "both"}[part]
        return ExtensionLifting(EgliMilner(q, mode))
    if part.startswith("kantorovich:"):
        names = [n.strip() for n in part.split(":", 1)[1].split(",") if n.strip()]
        lams = [_named_predicate(n, functor, q) for n in names]
        return KantorovichLifting(lams, functor, q)
    raise ValueError(f"unknown lifting {part!r}")


def _named_predicate(name: str, functor: SetFunctor, q: Quantale) -> PredicateLifting:
    from .predicates import box
    if isinstance(functor, Powerset) and name == "dia":
        return diamond(q)
    if isinstance(functor, Powerset) and name == "box":
        return box(q)
    if isinstance(functor, Distribution) and name == "E":
        return expectation(q)
    if isinstance(functor, Neighbourhood) and name == "nbox":
        return neighbourhood_box()
    raise ValueError(f"no predicate lifting {name!r} for {functor.name}")


def build_lifting(text: str, functor: SetFunctor | str, q: Quantale,
                  labels: Sequence | None = None) -> Lifting:
    """Parse ``kantorovich:E``, ``tv``, ``egli-lower``, ``discrete``, ``sym`` ... joined by ``∘``.

    The rightmost part is applied first. Parts naming liftings of the identity
    functor (``id``, ``dual``, ``sym``, ``equiv`` and ``discrete`` when it is
    not the only part) are composed around the single functor part.
    """
    if isinstance(functor, str):
        functor = functor_from_string(functor, labels)
    parts = [p.strip() for p in text.replace(" o ", "∘").split("∘") if p.strip()]
    if not parts:
        raise ValueError("empty lifting description")
    main = [i for i, p in enumerate(parts) if p not in _ID_LIFTINGS and p != "discrete"]
    if len(main) > 1:
        raise ValueError(f"more than one functor lifting in {text!r}")
    if not main:
        if isinstance(functor, Identity):
            layers = [DiscreteLifting() if p == "discrete" else _ID_LIFTINGS[p]() for p in parts]
        elif parts[-1] == "discrete":
            layers = [_ID_LIFTINGS[p]() for p in parts[:-1]] + [DiscreteLifting(functor)]
        else:
            raise ValueError(f"{text!r} does not lift {functor.name}")
    else:
        k = main[0]
        layers = []
        for i, p in enumerate(parts):
            if i == k:
                layers.append(_base_lifting(p, functor, q))
            else:
                layers.append(DiscreteLifting() if p == "discrete" else _ID_LIFTINGS[p]())
    result = layers[-1]
    for outer in reversed(layers[:-1]):
        result = ComposedLifting(outer, result)
    return result


__all__ = [
    "Lifting", "IdentityLifting", "DualLifting", "SymmetrizeLifting", "EquivalenceLifting",
    "DiscreteLifting", "KantorovichLifting", "kantorovich_lift", "TVLifting", "ExtensionLifting",
    "ComposedLifting", "LabelledLifting", "MaybeLifting", "LabelProductLifting", "named_lift",
    "CompatibilityReport", "compatibility_check", "compatible_on", "exponential", "build_lifting",
]
