"""Finite V-categories, V-relations and the constructions on them.

Carriers are ordered tuples of hashable states (strings in files, arbitrary
hashables internally, e.g. subsets or distributions when a structure lives
on ``F X``). Matrices are dense tuples of tuples of raw quantale payloads.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Iterable, Iterator, Mapping, Sequence

from .quantale import Quantale, UnsupportedEnumeration


class DimensionError(ValueError):
    """Matrix shape or carrier mismatch."""


def _freeze(matrix) -> tuple:
    return tuple(tuple(row) for row in matrix)


def _index(carrier: Sequence) -> dict:
    idx = {x: i for i, x in enumerate(carrier)}
    if len(idx) != len(carrier):
        raise DimensionError("carrier contains duplicates")
    return idx


@dataclass(frozen=True)
class VRelation:
    quantale: Quantale
    source: tuple
    target: tuple
    matrix: tuple

    def __post_init__(self):
        object.__setattr__(self, "source", tuple(self.source))
        object.__setattr__(self, "target", tuple(self.target))
        object.__setattr__(self, "matrix", _freeze(self.matrix))
        if len(self.matrix) != len(self.source) or any(len(r) != len(self.target) for r in self.matrix):
            raise DimensionError(
                f"matrix shape does not match carriers {len(self.source)}x{len(self.target)}")

    @cached_property
    def _src(self):
        return _index(self.source)

    @cached_property
    def _tgt(self):
        return _index(self.target)

    def __call__(self, x, y):
        return self.matrix[self._src[x]][self._tgt[y]]

    def leq(self, other: "VRelation") -> bool:
        _same_shape(self, other)
        le = self.quantale.leq
        return all(le(u, v) for r1, r2 in zip(self.matrix, other.matrix) for u, v in zip(r1, r2))

    def meet(self, other: "VRelation") -> "VRelation":
        _same_shape(self, other)
        m = self.quantale.meet
        return self._with([[m(u, v) for u, v in zip(r1, r2)] for r1, r2 in zip(self.matrix, other.matrix)])

    def join(self, other: "VRelation") -> "VRelation":
        _same_shape(self, other)
        j = self.quantale.join
        return self._with([[j(u, v) for u, v in zip(r1, r2)] for r1, r2 in zip(self.matrix, other.matrix)])

    def scale(self, u) -> "VRelation":
        """The relation ``u (x) r``."""
        t = self.quantale.tensor
        return self._with([[t(u, v) for v in row] for row in self.matrix])

    def restrict(self, source: Sequence, target: Sequence) -> "VRelation":
        return VRelation(self.quantale, source, target,
                         [[self(x, y) for y in target] for x in source])

    def _with(self, matrix):
        return VRelation(self.quantale, self.source, self.target, matrix)

    def check_values(self):
        for row in self.matrix:
            for v in row:
                self.quantale.check(v)
        return self


def _same_shape(r: VRelation, s: VRelation):
    if r.source != s.source or r.target != s.target or r.quantale != s.quantale:
        raise DimensionError("relations live on different carriers")


@dataclass(frozen=True)
class VCategory:
    quantale: Quantale
    carrier: tuple
    matrix: tuple
    note: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "carrier", tuple(self.carrier))
        object.__setattr__(self, "matrix", _freeze(self.matrix))
        n = len(self.carrier)
        if len(self.matrix) != n or any(len(r) != n for r in self.matrix):
            raise DimensionError(f"structure matrix is not {n}x{n}")

    @cached_property
    def _idx(self):
        return _index(self.carrier)

    def __call__(self, x, y):
        return self.matrix[self._idx[x]][self._idx[y]]

    def index(self, x) -> int:
        return self._idx[x]

    @property
    def relation(self) -> VRelation:
        return VRelation(self.quantale, self.carrier, self.carrier, self.matrix)

    def restrict(self, carrier: Sequence) -> "VCategory":
        """Initial substructure on a subset (or any list of distinct states)."""
        return VCategory(self.quantale, carrier, [[self(x, y) for y in carrier] for x in carrier])

    def __len__(self):
        return len(self.carrier)


@dataclass(frozen=True)
class MapWitness:
    """A total function between finite carriers."""

    source: tuple
    target: tuple
    table: Mapping = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "source", tuple(self.source))
        object.__setattr__(self, "target", tuple(self.target))
        tgt = set(self.target)
        for x in self.source:
            if x not in self.table:
                raise DimensionError(f"map is undefined at {x!r}")
            if self.table[x] not in tgt:
                raise DimensionError(f"map sends {x!r} outside its target")

    def __call__(self, x):
        return self.table[x]

    @classmethod
    def identity(cls, carrier):
        return cls(carrier, carrier, {x: x for x in carrier})


def all_maps(source: Sequence, target: Sequence) -> Iterator[MapWitness]:
    for images in itertools.product(target, repeat=len(source)):
        yield MapWitness(source, target, dict(zip(source, images)))


# -- basic relations -------------------------------------------------------

def identity_relation(q: Quantale, carrier: Sequence) -> VRelation:
    n = len(carrier)
    return VRelation(q, carrier, carrier,
                     [[q.unit if i == j else q.bottom for j in range(n)] for i in range(n)])


def constant_relation(q: Quantale, source, target, value) -> VRelation:
    return VRelation(q, source, target, [[value] * len(target) for _ in source])


def graph(q: Quantale, f: MapWitness) -> VRelation:
    """The function ``f`` as the V-relation sending its graph to ``k``."""
    return VRelation(q, f.source, f.target,
                     [[q.unit if f(x) == y else q.bottom for y in f.target] for x in f.source])


def all_relations(q: Quantale, source: Sequence, target: Sequence,
                  values: Sequence | None = None) -> Iterator[VRelation]:
    vals = q.elements() if values is None else values
    n, m = len(source), len(target)
    for flat in itertools.product(vals, repeat=n * m):
        yield VRelation(q, source, target, [flat[i * m:(i + 1) * m] for i in range(n)])


# -- relational algebra ----------------------------------------------------

def compose_relations(s: VRelation, r: VRelation) -> VRelation:
    """``s . r`` for ``r: X -/-> Y`` and ``s: Y -/-> Z`` (apply ``r`` first)."""
    if r.target != s.source or r.quantale != s.quantale:
        raise DimensionError("cannot compose: middle carriers differ")
    q = r.quantale
    t, ja = q.tensor, q.join_all
    cols = list(zip(*s.matrix)) if s.matrix and s.target else [() for _ in s.target]
    out = [[ja([t(u, v) for u, v in zip(row, col)]) for col in cols] for row in r.matrix]
    if not s.target:
        out = [[] for _ in r.source]
    return VRelation(q, r.source, s.target, out)


def converse(r: VRelation) -> VRelation:
    cols = [list(c) for c in zip(*r.matrix)] if r.source else [[] for _ in r.target]
    return VRelation(r.quantale, r.target, r.source, cols)


def kan_extension(r: VRelation, s: VRelation) -> VRelation:
    """The residual ``r <- s : Z -/-> Y`` of ``r: X -/-> Y`` along ``s: X -/-> Z``.

    Characterised by ``t . s <= r  iff  t <= r <- s`` and computed pointwise as
    the meet over ``x`` of ``hom(s(x, z), r(x, y))``.
    """
    if r.source != s.source or r.quantale != s.quantale:
        raise DimensionError("kan_extension needs relations with a common source")
    q = r.quantale
    h, ma = q.hom, q.meet_all
    out = [[ma([h(s.matrix[i][zi], r.matrix[i][yi]) for i in range(len(r.source))])
            for yi in range(len(r.target))] for zi in range(len(s.target))]
    return VRelation(q, s.target, r.target, out)


# -- V-categories ----------------------------------------------------------

@dataclass
class CategoryReport:
    is_category: bool
    is_symmetric: bool
    is_separated: bool
    natural_order: frozenset
    reflexivity_failures: list
    transitivity_failures: list

    def __bool__(self):
        return self.is_category


def validate_category(c: VCategory, max_witnesses: int = 10) -> CategoryReport:
    q = c.quantale
    X, a = c.carrier, c.matrix
    n = len(X)
    refl = [X[i] for i in range(n) if not q.leq(q.unit, a[i][i])]
    trans = []
    for i, j, l in itertools.product(range(n), repeat=3):
        if not q.leq(q.tensor(a[i][j], a[j][l]), a[i][l]):
            trans.append((X[i], X[j], X[l]))
            if len(trans) >= max_witnesses:
                break
    symmetric = all(a[i][j] == a[j][i] for i in range(n) for j in range(i))
    order = frozenset((X[i], X[j]) for i in range(n) for j in range(n) if q.leq(q.unit, a[i][j]))
    separated = all(not ((X[i], X[j]) in order and (X[j], X[i]) in order)
                    for i in range(n) for j in range(n) if i != j)
    return CategoryReport(not refl and not trans, symmetric, separated, order, refl, trans)


def is_category(c: VCategory) -> bool:
    return validate_category(c, max_witnesses=1).is_category


def discrete(q: Quantale, carrier: Sequence) -> VCategory:
    r = identity_relation(q, carrier)
    return VCategory(q, carrier, r.matrix)


def indiscrete(q: Quantale, carrier: Sequence) -> VCategory:
    return VCategory(q, carrier, [[q.top] * len(carrier) for _ in carrier])


def symmetrize(c: VCategory) -> VCategory:
    m = c.quantale.meet
    a = c.matrix
    n = len(a)
    return VCategory(c.quantale, c.carrier, [[m(a[i][j], a[j][i]) for j in range(n)] for i in range(n)])


def dualize(c: VCategory) -> VCategory:
    return VCategory(c.quantale, c.carrier, [list(col) for col in zip(*c.matrix)] if c.carrier else [])


def _leg(f) -> Callable:
    if isinstance(f, Mapping):
        return f.__getitem__
    return f


def initial_structure(carrier: Sequence, cone: Iterable[tuple[Any, VCategory]],
                      quantale: Quantale | None = None) -> VCategory:
    """Initial structure on ``carrier`` w.r.t. legs ``(f_i, (X_i, a_i))``.

    ``a(x, y)`` is the meet of ``a_i(f_i x, f_i y)``; an empty cone gives the
    indiscrete structure, which needs ``quantale`` to be passed explicitly.
    """
    legs = [(_leg(f), cat) for f, cat in cone]
    if quantale is None:
        if not legs:
            raise ValueError("empty cone: pass the quantale explicitly")
        quantale = legs[0][1].quantale
    q = quantale
    out = [[q.top] * len(carrier) for _ in carrier]
    for f, cat in legs:
        if cat.quantale != q:
            raise DimensionError("cone legs over different quantales")
        img = [cat.index(f(x)) for x in carrier]
        b = cat.matrix
        for i, fi in enumerate(img):
            row, brow = out[i], b[fi]
            for j, fj in enumerate(img):
                row[j] = q.meet(row[j], brow[fj])
    return VCategory(q, carrier, out)


def initial_from_predicates(q: Quantale, carrier: Sequence, predicates: Iterable[Sequence]) -> VCategory:
    """Initial structure w.r.t. maps ``carrier -> (V, hom)`` given as value vectors."""
    n = len(carrier)
    out = [[q.top] * n for _ in range(n)]
    h, m = q.hom, q.meet
    for vec in predicates:
        for i in range(n):
            row, u = out[i], vec[i]
            for j in range(n):
                row[j] = m(row[j], h(u, vec[j]))
    return VCategory(q, carrier, out)


def residual_initial_structure(q: Quantale, carrier: Sequence,
                               legs: Iterable[Mapping[Any, tuple]]) -> VCategory:
    """Same initial structure computed as the meet of ``f_flat <- f_flat``.

    Each leg maps a state to a ``kappa``-tuple, i.e. a map into ``V^kappa``;
    ``f_flat(i, x) = f(x)[i]`` is the transposed relation ``kappa -/-> X``.
    """
    result = VRelation(q, carrier, carrier, [[q.top] * len(carrier) for _ in carrier])
    for f in legs:
        kappa = len(next(iter(f.values()))) if f else 0
        flat = VRelation(q, tuple(range(kappa)), carrier,
                         [[f[x][i] for x in carrier] for i in range(kappa)])
        result = result.meet(kan_extension(flat, flat))
    return VCategory(q, carrier, result.matrix)


def is_vfunctor(f, dom: VCategory, cod: VCategory) -> bool:
    q = dom.quantale
    f = _leg(f)
    img = [cod.index(f(x)) for x in dom.carrier]
    a, b = dom.matrix, cod.matrix
    return all(q.leq(a[i][j], b[fi][fj]) for i, fi in enumerate(img) for j, fj in enumerate(img))


def is_initial_morphism(f, dom: VCategory, cod: VCategory) -> bool:
    f = _leg(f)
    img = [cod.index(f(x)) for x in dom.carrier]
    a, b = dom.matrix, cod.matrix
    return all(a[i][j] == b[fi][fj] for i, fi in enumerate(img) for j, fj in enumerate(img))


def initial_violation(f, dom: VCategory, cod: VCategory):
    """First pair where ``f`` fails to reflect distances, or ``None``."""
    f = _leg(f)
    for x in dom.carrier:
        for y in dom.carrier:
            if dom(x, y) != cod(f(x), f(y)):
                return (x, y, dom(x, y), cod(f(x), f(y)))
    return None


def pullback_structure(f, cod: VCategory, carrier: Sequence) -> VCategory:
    """The structure making ``f: carrier -> cod`` initial."""
    return initial_structure(carrier, [(f, cod)])


def transitive_closure(q: Quantale, rel: VRelation, max_rounds: int | None = None) -> VRelation:
    """Least ``t >= rel`` with ``t . t <= t`` (reached by repeated squaring)."""
    t = rel
    rounds = max_rounds if max_rounds is not None else 2 * max(len(rel.source), 1) + 2
    for _ in range(rounds):
        nxt = t.join(compose_relations(t, t))
        if nxt == t:
            return t
        t = nxt
    return t


# -- powers and the value category ----------------------------------------

def value_category(q: Quantale, values: Sequence | None = None) -> VCategory:
    """``(V, hom)`` on the finite carrier, or on a finite sample ``values``."""
    vals = tuple(q.elements() if values is None else values)
    return VCategory(q, vals, [[q.hom(u, v) for v in vals] for u in vals])


def symmetric_value_category(q: Quantale, values: Sequence | None = None) -> VCategory:
    vals = tuple(q.elements() if values is None else values)
    return VCategory(q, vals, [[q.hom_s(u, v) for v in vals] for u in vals])


def power(c: VCategory, exponent: Sequence, max_size: int = 4096) -> VCategory:
    """``c^S``: functions ``S -> carrier`` (as tuples) under the pointwise meet."""
    S = tuple(exponent)
    size = len(c.carrier) ** len(S)
    if size > max_size:
        raise UnsupportedEnumeration(f"power has {size} points, above the guard {max_size}")
    q = c.quantale
    pts = tuple(itertools.product(c.carrier, repeat=len(S)))
    idx = [[c.index(v) for v in p] for p in pts]
    a = c.matrix
    out = [[q.meet_all([a[i][j] for i, j in zip(pi, pj)]) for pj in idx] for pi in idx]
    return VCategory(q, pts, out, note=f"power over {len(S)} coordinates")


def vfunctors_into_values(c: VCategory, kappa: int, values: Sequence | None = None,
                          hom_cat: VCategory | None = None) -> Iterator[dict]:
    """Enumerate V-functors ``c -> V^kappa`` with coordinates from ``values``.

    Yields dicts ``state -> kappa-tuple``. Backtracking prunes partial
    assignments that already violate ``a(x, y) <= hom(f x, f y)``.
    """
    q = c.quantale
    vals = tuple(q.elements() if values is None else values)
    pts = list(itertools.product(vals, repeat=kappa))
    h, le, ma = q.hom, q.leq, q.meet_all
    # hom on V^kappa is the coordinatewise meet
    dist = {}
    for p in pts:
        for p2 in pts:
            dist[p, p2] = ma([h(u, v) for u, v in zip(p, p2)])
    X, a = c.carrier, c.matrix
    n = len(X)
    assign: list = [None] * n

    def extend(i):
        if i == n:
            yield dict(zip(X, assign))
            return
        for p in pts:
            ok = le(a[i][i], dist[p, p])
            if ok:
                for j in range(i):
                    pj = assign[j]
                    if not (le(a[i][j], dist[p, pj]) and le(a[j][i], dist[pj, p])):
                        ok = False
                        break
            if ok:
                assign[i] = p
                yield from extend(i + 1)
        assign[i] = None

    yield from extend(0)
