"""Lax extensions of set functors to V-relations.

An extension maps ``r: X -/-> Y`` to ``F r: F X -/-> F Y``. Since ``F X`` can
be large, :meth:`LaxExtension.relate` evaluates the extended relation only
between two given lists of elements; :meth:`LaxExtension.apply` uses the full
object action.
"""
from __future__ import annotations

from typing import Sequence

from .enriched import VRelation, all_relations, compose_relations, converse
from .functors import Identity, Labelled, LabelProduct, Maybe, Powerset, SetFunctor
from .predicates import PredicateLifting
from .quantale import Quantale, UnsupportedEnumeration


class LaxExtension:
    name = "extension"
    functor: SetFunctor
    quantale: Quantale

    def value(self, r: VRelation, ex, ey):
        raise NotImplementedError

    def relate(self, r: VRelation, xs: Sequence, ys: Sequence) -> VRelation:
        return VRelation(self.quantale, xs, ys, [[self.value(r, ex, ey) for ey in ys] for ex in xs])

    def apply(self, r: VRelation) -> VRelation:
        return self.relate(r, self.functor.obj(r.source), self.functor.obj(r.target))

    def __repr__(self):
        return self.name


class EgliMilner(LaxExtension):
    """Lower, upper or full Egli-Milner extension of the powerset functor.

    ``lower(A, B)`` is the meet over ``a in A`` of the join over ``b in B`` of
    ``r(a, b)``; ``upper`` swaps the roles of ``A`` and ``B``.
    """

    def __init__(self, quantale: Quantale, mode: str = "lower", functor: SetFunctor | None = None):
        if mode not in ("lower", "upper", "both"):
            raise ValueError(f"unknown Egli-Milner mode {mode!r}")
        self.quantale = quantale
        self.mode = mode
        self.functor = functor or Powerset()
        self.name = {"lower": "egli-lower", "upper": "egli-upper", "both": "egli"}[mode]

    def value(self, r, A, B):
        q = self.quantale
        out = q.top
        if self.mode in ("lower", "both"):
            out = q.meet(out, q.meet_all([q.join_all([r(a, b) for b in B]) for a in A]))
        if self.mode in ("upper", "both"):
            out = q.meet(out, q.meet_all([q.join_all([r(a, b) for a in A]) for b in B]))
        return out

    def relate(self, r, xs, ys):
        q = self.quantale
        if self.mode != "lower":
            return super().relate(r, xs, ys)
        # lower mode is by far the most used; precompute row joins
        ja, ma = q.join_all, q.meet_all
        si, ti = r._src, r._tgt
        m = r.matrix
        out = []
        for A in xs:
            rows = [m[si[a]] for a in A]
            out.append([ma([ja([row[ti[b]] for b in B]) for row in rows]) for B in ys])
        return VRelation(q, xs, ys, out)


def egli_milner(r: VRelation, mode: str = "lower", xs=None, ys=None) -> VRelation:
    E = EgliMilner(r.quantale, mode)
    if xs is None and ys is None:
        return E.apply(r)
    F = E.functor
    return E.relate(r, F.obj(r.source) if xs is None else xs, F.obj(r.target) if ys is None else ys)


class IdentityExtension(LaxExtension):
    def __init__(self, quantale: Quantale):
        self.quantale = quantale
        self.functor = Identity()
        self.name = "identity"

    def value(self, r, x, y):
        return r(x, y)


class TopExtension(LaxExtension):
    """The largest extension: every pair of elements is related by top."""

    def __init__(self, quantale: Quantale, functor: SetFunctor):
        self.quantale = quantale
        self.functor = functor
        self.name = f"top[{functor.name}]"

    def value(self, r, ex, ey):
        return self.quantale.top


class KantorovichExtension(LaxExtension):
    """Meet over liftings and over all ``g: kappa -/-> X`` of ``hom(lam(g)(x), lam(r.g)(y))``.

    Exact only when the quantale is finite; ``values`` restricts ``g`` to a
    finite set of values otherwise (an approximation from above).
    """

    def __init__(self, liftings: Sequence[PredicateLifting], quantale: Quantale,
                 functor: SetFunctor | None = None, values: Sequence | None = None):
        self.liftings = tuple(liftings)
        self.quantale = quantale
        if functor is None:
            if not self.liftings:
                raise ValueError("an empty family needs an explicit functor")
            functor = self.liftings[0].functor
        self.functor = functor
        if values is None and not quantale.finite:
            raise UnsupportedEnumeration(
                f"Kantorovich extension over {quantale.name} needs enumeration of all "
                "relations; use a closed-form lifting or pass a value grid")
        self.values = tuple(quantale.elements() if values is None else values)
        self.name = "kantorovich-ext[" + ",".join(l.name for l in self.liftings) + "]"

    def relate(self, r, xs, ys):
        q = self.quantale
        xs, ys = tuple(xs), tuple(ys)
        out = [[q.top] * len(ys) for _ in xs]
        h, m = q.hom, q.meet
        for lam in self.liftings:
            kappa = tuple(range(lam.arity))
            for g in all_relations(q, kappa, r.source, self.values):
                rg = compose_relations(r, g)
                vx = [lam.on_relation(g, e) for e in xs]
                vy = [lam.on_relation(rg, e) for e in ys]
                for i, u in enumerate(vx):
                    row = out[i]
                    for j, v in enumerate(vy):
                        row[j] = m(row[j], h(u, v))
        return VRelation(q, xs, ys, out)

    def value(self, r, ex, ey):
        return self.relate(r, [ex], [ey]).matrix[0][0]


def kantorovich_extension(liftings: Sequence[PredicateLifting], r: VRelation,
                          functor: SetFunctor | None = None) -> VRelation:
    return KantorovichExtension(liftings, r.quantale, functor).apply(r)


class LabelledExtension(LaxExtension):
    """``F^A``: meet over labels of the inner extension on components."""

    def __init__(self, labels: Sequence, inner: LaxExtension):
        self.labels = tuple(labels)
        self.inner = inner
        self.quantale = inner.quantale
        self.functor = Labelled(self.labels, inner.functor)
        self.name = f"{inner.name}^A"

    def relate(self, r, xs, ys):
        q = self.quantale
        out = [[q.top] * len(ys) for _ in xs]
        for i in range(len(self.labels)):
            cx = list(dict.fromkeys(e[i] for e in xs))
            cy = list(dict.fromkeys(e[i] for e in ys))
            comp = self.inner.relate(r, cx, cy)
            for a, ex in enumerate(xs):
                for b, ey in enumerate(ys):
                    out[a][b] = q.meet(out[a][b], comp(ex[i], ey[i]))
        return VRelation(q, xs, ys, out)

    def value(self, r, ex, ey):
        return self.relate(r, [ex], [ey]).matrix[0][0]


class MaybeExtension(LaxExtension):
    """``1 + F``: termination relates to termination by ``k``, to anything else by bottom."""

    def __init__(self, inner: LaxExtension):
        self.inner = inner
        self.quantale = inner.quantale
        self.functor = Maybe(inner.functor)
        self.name = f"1+{inner.name}"

    def value(self, r, ex, ey):
        q = self.quantale
        if ex is None or ey is None:
            return q.unit if ex is None and ey is None else q.bottom
        return self.inner.value(r, ex, ey)


class LabelProductExtension(LaxExtension):
    def __init__(self, labels: Sequence, inner: LaxExtension):
        self.labels = tuple(labels)
        self.inner = inner
        self.quantale = inner.quantale
        self.functor = LabelProduct(self.labels, inner.functor)
        self.name = f"A x {inner.name}"

    def value(self, r, ex, ey):
        if ex[0] != ey[0]:
            return self.quantale.bottom
        return self.inner.value(r, ex[1], ey[1])


class SymmetrizedExtension(LaxExtension):
    """``E_s r = E r & (E r°)°``."""

    def __init__(self, inner: LaxExtension):
        self.inner = inner
        self.quantale = inner.quantale
        self.functor = inner.functor
        self.name = f"sym[{inner.name}]"

    def relate(self, r, xs, ys):
        fwd = self.inner.relate(r, xs, ys)
        back = converse(self.inner.relate(converse(r), ys, xs))
        return fwd.meet(back)

    def value(self, r, ex, ey):
        return self.relate(r, [ex], [ey]).matrix[0][0]


class BrokenExtension(LaxExtension):
    """Negative control: Egli-Milner with the quantifiers swapped.

    ``(A, B)`` is related by the join over ``a in A`` of the meet over
    ``b in B`` of ``r(a, b)``; this violates function compatibility.
    """

    def __init__(self, quantale: Quantale):
        self.quantale = quantale
        self.functor = Powerset()
        self.name = "broken-swapped"

    def value(self, r, A, B):
        q = self.quantale
        return q.join_all([q.meet_all([r(a, b) for b in B]) for a in A])


def extension_from_string(text: str, quantale: Quantale) -> LaxExtension:
    key = text.strip()
    if key in ("egli-lower", "egli-upper", "egli"):
        mode = {"egli-lower": "lower", "egli-upper": "upper", "egli": "both"}[key]
        return EgliMilner(quantale, mode)
    if key == "broken":
        return BrokenExtension(quantale)
    if key == "identity":
        return IdentityExtension(quantale)
    if key.startswith("kantorovich-ext:"):
        from .predicates import diamond
        names = key.split(":", 1)[1].split(",")
        if names != ["dia"]:
            raise ValueError(f"unsupported Kantorovich extension family {names}")
        return KantorovichExtension([diamond(quantale)], quantale)
    raise ValueError(f"unknown extension {text!r}")

