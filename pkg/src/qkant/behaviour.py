"""Finite coalgebras, morphisms, simulations and behavioural distance."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Sequence

from .enriched import MapWitness, VCategory, VRelation, indiscrete
from .extensions import LaxExtension
from .functors import Labelled, Powerset, SetFunctor
from .liftings import Lifting
from .quantale import INF, Quantale

DEFAULT_EPSILON = Fraction(1, 10**6)


class CertificateError(ValueError):
    """The lifting is known not to preserve initial morphisms."""


@dataclass
class Coalgebra:
    quantale: Quantale
    functor: SetFunctor
    states: tuple
    transitions: Mapping[Any, Any]
    structure: VCategory | None = None
    labels: tuple = ()

    def __post_init__(self):
        self.states = tuple(self.states)
        self.labels = tuple(self.labels)
        missing = [x for x in self.states if x not in self.transitions]
        if missing:
            raise ValueError(f"no transition given for {missing[0]!r}")
        for x in self.states:
            if not self.functor.contains(self.states, self.transitions[x]):
                raise ValueError(f"transition of {x!r} is not an element of {self.functor.name}")

    def alpha(self, x):
        return self.transitions[x]

    def images(self) -> tuple:
        return tuple(dict.fromkeys(self.transitions[x] for x in self.states))

    def state_category(self) -> VCategory:
        if self.structure is not None:
            return self.structure
        from .enriched import discrete
        return discrete(self.quantale, self.states)


@dataclass
class DistanceResult:
    quantale: Quantale
    carrier: tuple
    matrix: tuple
    iterations: int
    converged: bool
    epsilon: Fraction = Fraction(0)
    certified: bool = True
    history: list = field(default_factory=list, repr=False)
    note: str = ""

    @property
    def category(self) -> VCategory:
        return VCategory(self.quantale, self.carrier, self.matrix)

    def __call__(self, x, y):
        return self.category(x, y)

    def to_csv(self) -> str:
        q = self.quantale
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([""] + [str(x) for x in self.carrier])
        for x, row in zip(self.carrier, self.matrix):
            w.writerow([str(x)] + [_cell(q, v) for v in row])
        return buf.getvalue()

    def to_json(self) -> dict:
        from .serialization import format_value
        return {
            "quantale": self.quantale.name,
            "carrier": [str(x) for x in self.carrier],
            "matrix": [[format_value(self.quantale, v) for v in row] for row in self.matrix],
            "iterations": self.iterations,
            "converged": self.converged,
            "epsilon": str(self.epsilon),
            "certified": self.certified,
            "note": self.note,
        }


def _cell(q: Quantale, v) -> str:
    from .serialization import format_value
    out = format_value(q, v)
    if isinstance(out, bool):
        return "top" if out else "bot"
    return out if isinstance(out, str) else json.dumps(out)


def numeric_gap(q: Quantale, a, b) -> Fraction | float:
    """Max numeric difference between two matrices over a numeric quantale."""
    worst: Any = Fraction(0)
    for r1, r2 in zip(a, b):
        for u, v in zip(r1, r2):
            if u == v:
                continue
            x, y = q.to_number(u), q.to_number(v)
            d = INF if INF in (x, y) else abs(x - y)
            worst = max(worst, d)
    return worst


def behavioural_distance(c: Coalgebra, L: Lifting, epsilon=DEFAULT_EPSILON, max_iter: int = 1000,
                         force: bool = False, record: bool = False) -> DistanceResult:
    """Greatest fixpoint of ``a |-> L(a)(alpha x, alpha y) & a`` from the indiscrete structure.

    Finite quantales stop only at an exact fixpoint; numeric ones also stop
    when two iterates are closer than ``epsilon`` (the result is then an
    approximation from above in the quantale order and is flagged through
    ``epsilon``).
    """
    if L.preserves_initial is False and not force:
        raise CertificateError(f"lifting {L.name} does not preserve initial morphisms; pass force=True")
    q = c.quantale
    X = c.states
    imgs = c.images()
    pos = {e: i for i, e in enumerate(imgs)}
    ax = [pos[c.alpha(x)] for x in X]
    a = indiscrete(q, X).matrix
    history = [a] if record else []
    numeric = not q.finite
    eps = Fraction(epsilon) if epsilon is not None else Fraction(0)
    for it in range(1, max_iter + 1):
        lifted = L.structure(VCategory(q, X, a), imgs).matrix
        m = q.meet
        new = tuple(tuple(m(lifted[ax[i]][ax[j]], a[i][j]) for j in range(len(X)))
                    for i in range(len(X)))
        if record:
            history.append(new)
        if new == a:
            return DistanceResult(q, X, new, it, True, Fraction(0), L.preserves_initial is True,
                                  history)
        if numeric and eps > 0 and numeric_gap(q, new, a) < eps:
            return DistanceResult(q, X, new, it, True, eps, L.preserves_initial is True, history,
                                  note="stopped by epsilon")
        a = new
    return DistanceResult(q, X, a, max_iter, False, eps, L.preserves_initial is True, history,
                          note="iteration limit reached")


def k_level(result: DistanceResult) -> frozenset:
    q = result.quantale
    X = result.carrier
    return frozenset((X[i], X[j]) for i in range(len(X)) for j in range(len(X))
                     if q.leq(q.unit, result.matrix[i][j]))


# -- two-valued oracles ----------------------------------------------------

def _successor_sets(c: Coalgebra):
    F = c.functor
    if isinstance(F, Powerset):
        return {x: (c.alpha(x),) for x in c.states}
    if isinstance(F, Labelled) and isinstance(F.inner, Powerset):
        return {x: tuple(c.alpha(x)) for x in c.states}
    raise ValueError(f"bisimilarity oracle supports (labelled) powerset systems, not {F.name}")


def bisimilarity_oracle(c: Coalgebra, symmetric: bool = True):
    """Partition into bisimilarity classes, or the simulation preorder.

    The preorder is a set of pairs ``(x, y)`` meaning ``y`` simulates ``x``.
    """
    succ = _successor_sets(c)
    X = c.states
    if symmetric:
        block = {x: 0 for x in X}
        while True:
            sig = {x: (block[x], tuple(frozenset(block[y] for y in S) for S in succ[x])) for x in X}
            ids: dict = {}
            new = {x: ids.setdefault(sig[x], len(ids)) for x in X}
            if len(ids) == len(set(block.values())):
                break
            block = new
        classes: dict = {}
        for x in X:
            classes.setdefault(block[x], set()).add(x)
        return frozenset(frozenset(b) for b in classes.values())
    R = {(x, y) for x in X for y in X}
    changed = True
    while changed:
        changed = False
        for x, y in list(R):
            for Sx, Sy in zip(succ[x], succ[y]):
                if any(all((x2, y2) not in R for y2 in Sy) for x2 in Sx):
                    R.discard((x, y))
                    changed = True
                    break
    return frozenset(R)


def partition_pairs(partition) -> frozenset:
    return frozenset((x, y) for b in partition for x in b for y in b)


# -- morphisms and simulations --------------------------------------------

def morphism_violation(f: MapWitness, c1: Coalgebra, c2: Coalgebra):
    if c1.functor != c2.functor:
        raise ValueError("coalgebras for different functors")
    for x in c1.states:
        lhs = c2.alpha(f(x))
        rhs = c1.functor.fmap(f, c1.alpha(x))
        if lhs != rhs:
            return {"state": x, "beta_f": lhs, "F_f_alpha": rhs}
    return None


def is_coalgebra_morphism(f: MapWitness, c1: Coalgebra, c2: Coalgebra) -> bool:
    return morphism_violation(f, c1, c2) is None


def is_simulation(s: VRelation, c: Coalgebra, E: LaxExtension) -> bool:
    """``alpha . s <= E s . alpha``, i.e. ``s(x, y) <= E s(alpha x, alpha y)``."""
    if s.source != c.states or s.target != c.states:
        raise ValueError("relation must live on the states of the coalgebra")
    q = c.quantale
    imgs = c.images()
    lifted = E.relate(s, imgs, imgs)
    return all(q.leq(s(x, y), lifted(c.alpha(x), c.alpha(y))) for x in c.states for y in c.states)


def greatest_simulation(c: Coalgebra, E: LaxExtension, max_iter: int = 1000) -> VRelation:
    q = c.quantale
    X = c.states
    s = VRelation(q, X, X, [[q.top] * len(X) for _ in X])
    imgs = c.images()
    for _ in range(max_iter):
        lifted = E.relate(s, imgs, imgs)
        nxt = s.meet(VRelation(q, X, X, [[lifted(c.alpha(x), c.alpha(y)) for y in X] for x in X]))
        if nxt == s:
            return s
        s = nxt
    raise ArithmeticError("simulation iteration did not stabilise")


def is_vfunctor_transition(c: Coalgebra, L: Lifting, structure: VCategory) -> bool:
    """Is ``alpha: (X, structure) -> L(X, structure)`` a V-functor?"""
    q = c.quantale
    imgs = c.images()
    lifted = L.structure(structure, imgs)
    return all(q.leq(structure(x, y), lifted(c.alpha(x), c.alpha(y)))
               for x in c.states for y in c.states)


def coalgebra(quantale: Quantale, functor: SetFunctor, transitions: Mapping,
              states: Sequence | None = None, **kw) -> Coalgebra:
    return Coalgebra(quantale, functor, tuple(transitions) if states is None else tuple(states),
                     dict(transitions), **kw)
