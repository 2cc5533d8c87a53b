"""Commutative unital quantales with exact arithmetic.

Raw payloads are used everywhere inside the library for speed:

* ``Bool2``       -- ``bool``
* ``Luk01``       -- :class:`fractions.Fraction` in ``[0, 1]``
* ``LawvereCost`` / ``LawvereMax`` -- ``Fraction`` or :data:`INF`
* ``FreeQuantale`` -- ``frozenset`` of monoid element names

The numeric quantales are ordered by ``>=``: a numerically smaller distance
is *higher* in the quantale order, so the quantale join is ``min`` and the
top element is ``0``.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Any, Iterable, Mapping, Sequence

INF = math.inf


class DomainError(ValueError):
    """A value does not belong to the quantale it is used with."""


class UnsupportedEnumeration(ValueError):
    """An operation needs to enumerate an infinite carrier."""


def as_fraction(x: Any) -> Fraction:
    """Parse ``x`` as an exact rational; floats are rejected."""
    if isinstance(x, bool):
        raise DomainError(f"boolean {x!r} is not a rational")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot parse rational {x!r}") from exc
    raise DomainError(f"{x!r} is not an exact rational")


class Quantale:
    """Base class; concrete quantales override the lattice and tensor ops."""

    name: str = "quantale"
    finite: bool = False
    bottom: Any
    top: Any
    unit: Any

    # -- lattice ----------------------------------------------------------
    def leq(self, u, v) -> bool:
        raise NotImplementedError

    def join(self, u, v):
        raise NotImplementedError

    def meet(self, u, v):
        raise NotImplementedError

    def join_all(self, values: Iterable) -> Any:
        return reduce(self.join, values, self.bottom)

    def meet_all(self, values: Iterable) -> Any:
        return reduce(self.meet, values, self.top)

    # -- monoid -----------------------------------------------------------
    def tensor(self, u, v):
        raise NotImplementedError

    def hom(self, u, w):
        raise NotImplementedError

    def hom_s(self, u, v):
        """Symmetrised internal hom ``hom(u, v) & hom(v, u)``."""
        return self.meet(self.hom(u, v), self.hom(v, u))

    # -- carrier ----------------------------------------------------------
    def contains(self, u) -> bool:
        raise NotImplementedError

    def check(self, u):
        if not self.contains(u):
            raise DomainError(f"{u!r} is not an element of {self.name}")
        return u

    def elements(self) -> tuple:
        raise UnsupportedEnumeration(f"{self.name} has an infinite carrier")

    def grid(self, den: int = 20) -> tuple:
        """Finite sample of the carrier used for law checks and enumeration."""
        return self.elements()

    @property
    def integral(self) -> bool:
        return self.unit == self.top

    # -- conversions ------------------------------------------------------
    def parse(self, text: Any):
        raise NotImplementedError

    def format(self, u) -> Any:
        raise NotImplementedError

    def to_number(self, u):
        """Numeric distance reading of ``u`` (``top`` maps to 0)."""
        raise DomainError(f"{self.name} has no numeric reading")

    def value(self, x) -> "QuantaleValue":
        return QuantaleValue(self, self.parse(x) if not self.contains(x) else x)

    def __repr__(self):
        return self.name


class TwoValued(Quantale):
    """The two-element frame ``{False < True}`` with tensor = meet."""

    name = "bool2"
    finite = True
    bottom = False
    top = True
    unit = True

    def leq(self, u, v):
        return (not u) or v

    def join(self, u, v):
        return u or v

    def meet(self, u, v):
        return u and v

    def join_all(self, values):
        return any(values)

    def meet_all(self, values):
        return all(values)

    def tensor(self, u, v):
        return u and v

    def hom(self, u, w):
        return (not u) or w

    def contains(self, u):
        return isinstance(u, bool)

    def elements(self):
        return (False, True)

    def parse(self, text):
        if isinstance(text, bool):
            return text
        key = str(text).strip().lower()
        if key in ("top", "true", "t", "unit", "k"):
            return True
        if key in ("bot", "bottom", "false", "f"):
            return False
        raise DomainError(f"cannot parse {text!r} as a bool2 value")

    def format(self, u):
        return bool(u)

    def to_number(self, u):
        return Fraction(0) if u else Fraction(1)

    def __eq__(self, other):
        return isinstance(other, TwoValued)

    def __hash__(self):
        return hash("bool2")


class _NumericQuantale(Quantale):
    """Shared code for quantales on sets of non-negative reals under ``>=``."""

    top = Fraction(0)
    unit = Fraction(0)
    upper: Any

    def leq(self, u, v):
        return u >= v

    def join(self, u, v):
        return u if u <= v else v

    def meet(self, u, v):
        return u if u >= v else v

    def join_all(self, values):
        return min(values, default=self.bottom)

    def meet_all(self, values):
        return max(values, default=self.top)

    def contains(self, u):
        if isinstance(u, bool):
            return False
        if u == INF:
            return self.upper == INF
        return isinstance(u, (Fraction, int)) and 0 <= u <= self.upper

    def grid(self, den=20):
        pts = [Fraction(i, den) for i in range(den + 1)]
        if self.upper == INF:
            pts = [Fraction(i, den) for i in range(2 * den + 1)] + [INF]
        return tuple(pts)

    def parse(self, text):
        if isinstance(text, str) and text.strip().lower() in ("inf", "infinity", "∞"):
            value = INF
        elif isinstance(text, str) and text.strip().lower() in ("top", "unit", "k"):
            value = self.top
        elif isinstance(text, str) and text.strip().lower() in ("bot", "bottom"):
            value = self.bottom
        elif text == INF:
            value = INF
        else:
            value = as_fraction(text)
        return self.check(value)

    def format(self, u):
        if u == INF:
            return "inf"
        return str(Fraction(u))

    def to_number(self, u):
        return u

    def __eq__(self, other):
        return type(other) is type(self)

    def __hash__(self):
        return hash(self.name)


class Lukasiewicz(_NumericQuantale):
    """``[0,1]`` with truncated addition; bounded-by-1 hemimetrics."""

    name = "luk01"
    upper = Fraction(1)
    bottom = Fraction(1)

    def tensor(self, u, v):
        s = u + v
        return s if s < 1 else Fraction(1)

    def hom(self, u, w):
        return w - u if w > u else Fraction(0)


class LawvereCost(_NumericQuantale):
    """``[0,inf]`` with addition; Lawvere generalised metric spaces."""

    name = "cost"
    upper = INF
    bottom = INF

    def tensor(self, u, v):
        if u == INF or v == INF:
            return INF
        return u + v

    def hom(self, u, w):
        if u == INF:
            return Fraction(0)
        if w == INF:
            return INF
        return w - u if w > u else Fraction(0)


class LawvereMax(_NumericQuantale):
    """``[0,inf]`` with maximum; generalised ultrametric spaces."""

    name = "maxcost"
    upper = INF
    bottom = INF

    def tensor(self, u, v):
        return u if u >= v else v

    def hom(self, u, w):
        return Fraction(0) if u >= w else w


@dataclass(frozen=True)
class Monoid:
    """A finite commutative monoid given by its multiplication table."""

    elements: tuple
    unit: Any
    table: Mapping = field(compare=False, repr=False)

    def __post_init__(self):
        els = self.elements
        if self.unit not in els:
            raise ValueError("monoid unit is not an element")
        for a, b in itertools.product(els, repeat=2):
            if (a, b) not in self.table or self.table[(a, b)] not in els:
                raise ValueError(f"monoid table is not total/closed at {(a, b)}")
        for a in els:
            if self.table[(self.unit, a)] != a:
                raise ValueError(f"unit law fails at {a!r}")
        for a, b in itertools.product(els, repeat=2):
            if self.table[(a, b)] != self.table[(b, a)]:
                raise ValueError(f"monoid is not commutative at {(a, b)}")
        for a, b, c in itertools.product(els, repeat=3):
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)):
                raise ValueError(f"monoid is not associative at {(a, b, c)}")

    def mul(self, a, b):
        return self.table[(a, b)]

    @classmethod
    def from_json(cls, doc: Mapping) -> "Monoid":
        els = tuple(doc["elements"])
        rows = doc["table"]
        table = {(a, b): rows[i][j] for i, a in enumerate(els) for j, b in enumerate(els)}
        return cls(els, doc["unit"], table)


OVERFLOW = "#"


def truncated_free_commutative_monoid(generators: Sequence[str], max_len: int = 2) -> Monoid:
    """Words over ``generators`` up to length ``max_len``, longer products collapse.

    Words are multisets written as sorted strings (``""`` is the unit). The
    absorbing element :data:`OVERFLOW` stands for every word that is too long,
    which keeps the quotient associative and commutative.
    """
    words = [""]
    for n in range(1, max_len + 1):
        words += ["".join(w) for w in itertools.combinations_with_replacement(sorted(generators), n)]
    els = tuple(words) + (OVERFLOW,)

    def mul(a, b):
        if OVERFLOW in (a, b) or len(a) + len(b) > max_len:
            return OVERFLOW
        return "".join(sorted(a + b))

    table = {(a, b): mul(a, b) for a in els for b in els}
    return Monoid(els, "", table)


class FreeQuantale(Quantale):
    """Subsets of a finite commutative monoid, ordered by inclusion."""

    finite = True

    def __init__(self, monoid: Monoid, name: str | None = None):
        self.monoid = monoid
        self.name = name or f"free[{len(monoid.elements)}]"
        self.bottom = frozenset()
        self.top = frozenset(monoid.elements)
        self.unit = frozenset([monoid.unit])

    def leq(self, u, v):
        return u <= v

    def join(self, u, v):
        return u | v

    def meet(self, u, v):
        return u & v

    def tensor(self, u, v):
        mul = self.monoid.mul
        return frozenset(mul(a, b) for a in u for b in v)

    def hom(self, u, w):
        mul = self.monoid.mul
        return frozenset(m for m in self.monoid.elements if all(mul(a, m) in w for a in u))

    def contains(self, u):
        return isinstance(u, frozenset) and u <= self.top

    def elements(self):
        els = self.monoid.elements
        subsets = itertools.chain.from_iterable(
            itertools.combinations(els, n) for n in range(len(els) + 1))
        return tuple(frozenset(s) for s in subsets)

    def parse(self, text):
        if isinstance(text, frozenset):
            return self.check(text)
        if isinstance(text, (list, tuple, set)):
            return self.check(frozenset(text))
        raise DomainError(f"cannot parse {text!r} as a subset of the monoid")

    def format(self, u):
        order = {e: i for i, e in enumerate(self.monoid.elements)}
        return sorted(u, key=order.__getitem__)

    def __eq__(self, other):
        return isinstance(other, FreeQuantale) and other.monoid == self.monoid

    def __hash__(self):
        return hash(("free", self.monoid.elements))


BOOL2 = TwoValued()
LUK01 = Lukasiewicz()
COST = LawvereCost()
MAXCOST = LawvereMax()

_NAMED = {"bool2": BOOL2, "luk01": LUK01, "cost": COST, "maxcost": MAXCOST}


def get_quantale(name: str) -> Quantale:
    """Resolve ``bool2``, ``luk01``, ``cost``, ``maxcost`` or ``free:<monoid.json>``."""
    key = name.strip()
    if key.lower() in _NAMED:
        return _NAMED[key.lower()]
    if key.startswith("free:"):
        with open(key[5:], encoding="utf-8") as fh:
            return FreeQuantale(Monoid.from_json(json.load(fh)), name=key)
    raise DomainError(f"unknown quantale {name!r}")


# -- tagged values ---------------------------------------------------------

@dataclass(frozen=True)
class QuantaleValue:
    quantale: Quantale
    payload: Any

    def __post_init__(self):
        self.quantale.check(self.payload)

    def __repr__(self):
        return f"{self.quantale.name}:{self.quantale.format(self.payload)}"


def _unwrap(q: Quantale, u):
    if isinstance(u, QuantaleValue):
        if u.quantale != q:
            raise DomainError(f"value from {u.quantale.name} used with {q.name}")
        return u.payload
    return q.check(u)


def tensor(q: Quantale, u, v) -> QuantaleValue:
    return QuantaleValue(q, q.tensor(_unwrap(q, u), _unwrap(q, v)))


def hom(q: Quantale, u, w) -> QuantaleValue:
    return QuantaleValue(q, q.hom(_unwrap(q, u), _unwrap(q, w)))


def join_family(q: Quantale, values: Iterable) -> QuantaleValue:
    return QuantaleValue(q, q.join_all([_unwrap(q, u) for u in values]))


def meet_family(q: Quantale, values: Iterable) -> QuantaleValue:
    return QuantaleValue(q, q.meet_all([_unwrap(q, u) for u in values]))


def heyting_implication(q: Quantale, u, v):
    """Right adjoint of ``u & -`` in the underlying lattice (chains and powersets only)."""
    if isinstance(q, FreeQuantale):
        return (q.top - u) | v
    if isinstance(q, (TwoValued, _NumericQuantale)):
        return q.top if q.leq(u, v) else v
    raise DomainError(f"no Heyting implication for {q.name}")
