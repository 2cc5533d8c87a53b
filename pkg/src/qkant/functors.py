"""Enumerable set functors: object action, morphism action and supports.

Elements of ``F X`` are plain hashable Python values:

=====================  ==============================================
Identity               the state itself
Powerset               ``frozenset`` of states
Distribution           :class:`Dist`
Maybe(F)               ``None`` (termination) or an element of ``F X``
Labelled(A, F)  F^A    tuple of ``F X`` elements, one per label
LabelProduct(A, F)     ``(label, element of F X)``
Neighbourhood          ``frozenset`` of ``frozenset`` of states
=====================  ==============================================
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping, Sequence

from .quantale import UnsupportedEnumeration, as_fraction


class DistributionError(ValueError):
    """Masses are negative or do not sum to one."""


class Dist(Mapping):
    """Finitely supported probability distribution with exact masses."""

    __slots__ = ("_items", "_hash")

    def __init__(self, masses: Mapping[Any, Any] | Iterable[tuple[Any, Any]]):
        pairs = masses.items() if isinstance(masses, Mapping) else masses
        acc: dict = {}
        for x, p in pairs:
            p = as_fraction(p)
            if p < 0:
                raise DistributionError(f"negative mass {p} at {x!r}")
            if p:
                acc[x] = acc.get(x, Fraction(0)) + p
        if sum(acc.values(), Fraction(0)) != 1:
            raise DistributionError(f"masses sum to {sum(acc.values(), Fraction(0))}, not 1")
        self._items = tuple(sorted(acc.items(), key=lambda kv: repr(kv[0])))
        self._hash = hash(frozenset(self._items))

    @classmethod
    def dirac(cls, x) -> "Dist":
        return cls({x: 1})

    def __getitem__(self, x):
        for y, p in self._items:
            if y == x:
                return p
        return Fraction(0)

    def __iter__(self):
        return (x for x, _ in self._items)

    def __len__(self):
        return len(self._items)

    def __contains__(self, x):
        return any(y == x for y, _ in self._items)

    @property
    def support(self) -> frozenset:
        return frozenset(x for x, _ in self._items)

    def __eq__(self, other):
        return isinstance(other, Dist) and frozenset(self._items) == frozenset(other._items)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        body = ", ".join(f"{x!r}: {p}" for x, p in self._items)
        return f"Dist({{{body}}})"

    def vector(self, carrier: Sequence) -> list:
        return [self[x] for x in carrier]


def _fn(f) -> Callable:
    return f.__getitem__ if isinstance(f, Mapping) else f


class SetFunctor:
    name = "functor"

    def obj(self, carrier: Sequence) -> tuple:
        raise NotImplementedError

    def fmap(self, f, elem):
        raise NotImplementedError

    def support(self, elem) -> frozenset:
        raise NotImplementedError

    def contains(self, carrier: Sequence, elem) -> bool:
        raise NotImplementedError

    def __repr__(self):
        return self.name


@dataclass(frozen=True, repr=False)
class Identity(SetFunctor):
    name = "id"

    def obj(self, carrier):
        return tuple(carrier)

    def fmap(self, f, elem):
        return _fn(f)(elem)

    def support(self, elem):
        return frozenset([elem])

    def contains(self, carrier, elem):
        return elem in set(carrier)


@dataclass(frozen=True, repr=False)
class Powerset(SetFunctor):
    max_carrier: int = 10
    name = "powerset"

    def obj(self, carrier):
        X = tuple(carrier)
        if len(X) > self.max_carrier:
            raise UnsupportedEnumeration(f"powerset of {len(X)} states exceeds guard {self.max_carrier}")
        return tuple(frozenset(c) for n in range(len(X) + 1) for c in itertools.combinations(X, n))

    def fmap(self, f, elem):
        g = _fn(f)
        return frozenset(g(x) for x in elem)

    def support(self, elem):
        return frozenset(elem)

    def contains(self, carrier, elem):
        return isinstance(elem, frozenset) and elem <= set(carrier)


@dataclass(frozen=True, repr=False)
class Distribution(SetFunctor):
    """Finite distributions; ``obj`` enumerates only masses with denominator ``den``."""

    den: int | None = None
    name = "dist"

    def obj(self, carrier):
        if self.den is None:
            raise UnsupportedEnumeration("distributions form an infinite set; set a grid denominator")
        X = tuple(carrier)
        out = []
        for counts in _compositions(self.den, len(X)):
            out.append(Dist({x: Fraction(c, self.den) for x, c in zip(X, counts)}))
        return tuple(out)

    def fmap(self, f, elem):
        g = _fn(f)
        return Dist([(g(x), p) for x, p in elem.items()])

    def support(self, elem):
        return elem.support

    def contains(self, carrier, elem):
        return isinstance(elem, Dist) and elem.support <= set(carrier)


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True, repr=False)
class Maybe(SetFunctor):
    """``1 + F``; ``None`` is the extra point (termination)."""

    inner: SetFunctor

    @property
    def name(self):
        return f"(1+{self.inner.name})"

    def obj(self, carrier):
        return (None,) + self.inner.obj(carrier)

    def fmap(self, f, elem):
        return None if elem is None else self.inner.fmap(f, elem)

    def support(self, elem):
        return frozenset() if elem is None else self.inner.support(elem)

    def contains(self, carrier, elem):
        return elem is None or self.inner.contains(carrier, elem)


@dataclass(frozen=True, repr=False)
class Labelled(SetFunctor):
    """``F^A`` for a finite label set ``A``; elements are tuples indexed by label."""

    labels: tuple
    inner: SetFunctor

    @property
    def name(self):
        return f"{self.inner.name}^{len(self.labels)}"

    def obj(self, carrier):
        return tuple(itertools.product(self.inner.obj(carrier), repeat=len(self.labels)))

    def fmap(self, f, elem):
        return tuple(self.inner.fmap(f, e) for e in elem)

    def support(self, elem):
        return frozenset().union(*(self.inner.support(e) for e in elem))

    def contains(self, carrier, elem):
        return (isinstance(elem, tuple) and len(elem) == len(self.labels)
                and all(self.inner.contains(carrier, e) for e in elem))

    def component(self, elem, label):
        return elem[self.labels.index(label)]


@dataclass(frozen=True, repr=False)
class LabelProduct(SetFunctor):
    """``A x F``; elements are ``(label, inner element)`` pairs."""

    labels: tuple
    inner: SetFunctor

    @property
    def name(self):
        return f"{len(self.labels)}x{self.inner.name}"

    def obj(self, carrier):
        return tuple((a, e) for a in self.labels for e in self.inner.obj(carrier))

    def fmap(self, f, elem):
        return (elem[0], self.inner.fmap(f, elem[1]))

    def support(self, elem):
        return self.inner.support(elem[1])

    def contains(self, carrier, elem):
        return (isinstance(elem, tuple) and len(elem) == 2 and elem[0] in self.labels
                and self.inner.contains(carrier, elem[1]))


@dataclass(frozen=True, repr=False)
class Neighbourhood(SetFunctor):
    """``N X = P P X``; ``N f`` pulls subsets back along ``f``."""

    max_carrier: int = 3
    name = "nbhd"

    def obj(self, carrier):
        X = tuple(carrier)
        if len(X) > self.max_carrier:
            raise UnsupportedEnumeration(f"neighbourhood functor guarded to {self.max_carrier} states")
        subsets = Powerset(self.max_carrier).obj(X)
        return Powerset(2 ** self.max_carrier).obj(subsets)

    def fmap(self, f, elem):
        """``N f(U) = {B | f^-1[B] in U}``; ``f`` must be a :class:`MapWitness`."""
        src, tgt = getattr(f, "source", None), getattr(f, "target", None)
        if src is None or tgt is None:
            raise ValueError("neighbourhood fmap needs a map with explicit source and target")
        out = []
        for B in Powerset(len(tgt)).obj(tgt):
            if frozenset(x for x in src if f(x) in B) in elem:
                out.append(B)
        return frozenset(out)

    def support(self, elem):
        return frozenset().union(*elem) if elem else frozenset()

    def contains(self, carrier, elem):
        cs = set(carrier)
        return isinstance(elem, frozenset) and all(isinstance(b, frozenset) and b <= cs for b in elem)


@dataclass(frozen=True, repr=False)
class Compose(SetFunctor):
    """``outer . inner``."""

    outer: SetFunctor
    inner: SetFunctor

    @property
    def name(self):
        return f"{self.outer.name}.{self.inner.name}"

    def obj(self, carrier):
        return self.outer.obj(self.inner.obj(carrier))

    def fmap(self, f, elem):
        return self.outer.fmap(lambda e: self.inner.fmap(f, e), elem)

    def support(self, elem):
        return frozenset().union(*(self.inner.support(e) for e in self.outer.support(elem)))

    def contains(self, carrier, elem):
        return self.outer.contains(self.inner.obj(carrier), elem)


def functor_from_string(text: str, labels: Sequence[str] | None = None) -> SetFunctor:
    """Parse ``powerset``, ``dist``, ``1+dist``, ``nbhd``, ``id`` with optional ``^A`` suffix."""
    key = text.strip().replace(" ", "")
    labelled = key.endswith("^A")
    if labelled:
        key = key[:-2]
    if key.startswith("(") and key.endswith(")"):
        key = key[1:-1]
    base = {
        "powerset": Powerset(),
        "dist": Distribution(),
        "1+dist": Maybe(Distribution()),
        "nbhd": Neighbourhood(),
        "id": Identity(),
    }.get(key)
    if base is None:
        raise ValueError(f"unknown functor {text!r}")
    if labelled:
        if not labels:
            raise ValueError(f"functor {text!r} needs a non-empty label set")
        return Labelled(tuple(labels), base)
    return base
