"""JSON documents for V-categories, V-relations and system specifications.

Values are written losslessly: ``bool2`` as JSON booleans, numeric quantales
as ``"p/q"`` strings (``"inf"`` for infinity), free quantales as lists.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping

from .behaviour import Coalgebra
from .enriched import VCategory, VRelation, validate_category
from .functors import (Dist, DistributionError, Distribution, Identity, Labelled, Maybe,
                       Neighbourhood, Powerset, SetFunctor, functor_from_string)
from .quantale import DomainError, FreeQuantale, Quantale, TwoValued, get_quantale


class SpecError(ValueError):
    """Invalid input document; ``path`` locates the offending field."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
        self.message = message


def format_value(q: Quantale, u) -> Any:
    if isinstance(q, TwoValued):
        return bool(u)
    if isinstance(q, FreeQuantale):
        return q.format(u)
    out = q.format(u)
    return out if isinstance(out, str) else str(out)


def parse_value(q: Quantale, x, path: str = ""):
    try:
        if isinstance(x, float):
            raise DomainError("floating point values are not accepted; write p/q")
        return q.parse(x)
    except (DomainError, ValueError, TypeError) as exc:
        raise SpecError(str(exc), path) from None


def _matrix(q, rows, n, m, path):
    if not isinstance(rows, list) or len(rows) != n:
        raise SpecError(f"expected {n} rows", path)
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != m:
            raise SpecError(f"expected {m} entries", f"{path}[{i}]")
        out.append([parse_value(q, v, f"{path}[{i}][{j}]") for j, v in enumerate(row)])
    return out


def category_to_json(c: VCategory) -> dict:
    return {"quantale": c.quantale.name, "carrier": [str(x) for x in c.carrier],
            "matrix": [[format_value(c.quantale, v) for v in row] for row in c.matrix]}


def category_from_json(doc: Mapping, check: bool = True) -> VCategory:
    q = _quantale(doc, "quantale")
    carrier = _carrier(doc, "carrier")
    c = VCategory(q, carrier, _matrix(q, doc.get("matrix"), len(carrier), len(carrier), "matrix"))
    if check:
        rep = validate_category(c)
        if not rep.is_category:
            where = rep.reflexivity_failures[:1] or rep.transitivity_failures[:1]
            raise SpecError(f"not a V-category (violation at {where[0]!r})", "matrix")
    return c


def relation_to_json(r: VRelation) -> dict:
    return {"quantale": r.quantale.name, "source": [str(x) for x in r.source],
            "target": [str(x) for x in r.target],
            "matrix": [[format_value(r.quantale, v) for v in row] for row in r.matrix]}


def relation_from_json(doc: Mapping) -> VRelation:
    q = _quantale(doc, "quantale")
    src = _carrier(doc, "source" if "source" in doc else "carrier")
    tgt = _carrier(doc, "target" if "target" in doc else "carrier")
    return VRelation(q, src, tgt, _matrix(q, doc.get("matrix"), len(src), len(tgt), "matrix"))


def _quantale(doc, key) -> Quantale:
    if not isinstance(doc, Mapping):
        raise SpecError("expected a JSON object")
    name = doc.get(key)
    if not isinstance(name, str):
        raise SpecError("missing quantale name", key)
    try:
        return get_quantale(name)
    except (DomainError, OSError, ValueError, KeyError) as exc:
        raise SpecError(str(exc), key) from None


def _carrier(doc, key) -> tuple:
    xs = doc.get(key)
    if not isinstance(xs, list) or not all(isinstance(x, str) for x in xs):
        raise SpecError("expected a list of state names", key)
    if len(set(xs)) != len(xs):
        raise SpecError("duplicate state names", key)
    return tuple(xs)


# -- system specifications -------------------------------------------------

@dataclass
class SystemSpec:
    quantale: Quantale
    functor: SetFunctor
    coalgebra: Coalgebra
    lifting: str | None
    modalities: list | None
    metric: VCategory | None


def _payload(F: SetFunctor, q: Quantale, states: tuple, x, path: str, labels: tuple):
    S = set(states)
    if isinstance(F, Labelled):
        if not isinstance(x, Mapping):
            raise SpecError("expected an object keyed by label", path)
        extra = set(x) - set(F.labels)
        if extra:
            raise SpecError(f"unknown label {sorted(extra)[0]!r}", path)
        return tuple(_payload(F.inner, q, states, x.get(a, _empty(F.inner)), f"{path}.{a}", labels)
                     for a in F.labels)
    if isinstance(F, Maybe):
        if x is None or x == "stop":
            return None
        return _payload(F.inner, q, states, x, path, labels)
    if isinstance(F, Powerset):
        if not isinstance(x, list):
            raise SpecError("expected a list of states", path)
        for i, y in enumerate(x):
            if y not in S:
                raise SpecError(f"unknown state {y!r}", f"{path}[{i}]")
        return frozenset(x)
    if isinstance(F, Distribution):
        if not isinstance(x, Mapping):
            raise SpecError("expected an object state -> probability", path)
        masses = {}
        for y, p in x.items():
            if y not in S:
                raise SpecError(f"unknown state {y!r}", f"{path}.{y}")
            if isinstance(p, float):
                raise SpecError("write probabilities as exact rationals \"p/q\"", f"{path}.{y}")
            try:
                masses[y] = Fraction(p) if not isinstance(p, bool) else None
            except (ValueError, TypeError, ZeroDivisionError):
                masses[y] = None
            if masses[y] is None:
                raise SpecError(f"cannot parse probability {p!r}", f"{path}.{y}")
            if masses[y] < 0:
                raise SpecError("negative probability", f"{path}.{y}")
        try:
            return Dist(masses)
        except DistributionError as exc:
            raise SpecError(str(exc), path) from None
    if isinstance(F, Identity):
        if x not in S:
            raise SpecError(f"unknown state {x!r}", path)
        return x
    if isinstance(F, Neighbourhood):
        if not isinstance(x, list) or not all(isinstance(b, list) for b in x):
            raise SpecError("expected a list of lists of states", path)
        for i, b in enumerate(x):
            for j, y in enumerate(b):
                if y not in S:
                    raise SpecError(f"unknown state {y!r}", f"{path}[{i}][{j}]")
        return frozenset(frozenset(b) for b in x)
    raise SpecError(f"unsupported functor {F.name}", "functor")


def _empty(F: SetFunctor):
    if isinstance(F, Powerset):
        return []
    if isinstance(F, Maybe):
        return None
    raise SpecError("every label needs a transition for this functor", "transitions")


def load_system(doc: Mapping) -> SystemSpec:
    if not isinstance(doc, Mapping):
        raise SpecError("expected a JSON object")
    q = _quantale(doc, "quantale")
    states = _carrier(doc, "states")
    labels = doc.get("labels", [])
    if not isinstance(labels, list) or not all(isinstance(a, str) for a in labels):
        raise SpecError("expected a list of label names", "labels")
    fname = doc.get("functor")
    if not isinstance(fname, str):
        raise SpecError("missing functor name", "functor")
    try:
        F = functor_from_string(fname, labels)
    except ValueError as exc:
        raise SpecError(str(exc), "functor") from None
    trans = doc.get("transitions")
    if not isinstance(trans, Mapping):
        raise SpecError("expected an object state -> payload", "transitions")
    for x in trans:
        if x not in states:
            raise SpecError(f"unknown state {x!r}", f"transitions.{x}")
    alpha = {}
    for x in states:
        if x not in trans:
            raise SpecError("missing transition", f"transitions.{x}")
        alpha[x] = _payload(F, q, states, trans[x], f"transitions.{x}", tuple(labels))
    metric = None
    if "metric" in doc:
        metric = VCategory(q, states, _matrix(q, doc["metric"], len(states), len(states), "metric"))
        rep = validate_category(metric)
        if not rep.is_category:
            raise SpecError("metric is not a V-category", "metric")
    lifting = doc.get("lifting")
    if lifting is not None and not isinstance(lifting, str):
        raise SpecError("expected a lifting description string", "lifting")
    mods = doc.get("modalities")
    if mods is not None and (not isinstance(mods, list) or not all(isinstance(m, str) for m in mods)):
        raise SpecError("expected a list of modality names", "modalities")
    co = Coalgebra(q, F, states, alpha, metric, tuple(labels))
    return SystemSpec(q, F, co, lifting, mods, metric)


def load_system_file(path: str) -> SystemSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON: {exc.msg} at line {exc.lineno}") from None
    except OSError as exc:
        raise SpecError(str(exc)) from None
    return load_system(doc)
