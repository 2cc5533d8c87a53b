"""Quantitative coalgebraic modal logic.

Concrete syntax::

    phi ::= T | (phi | phi) | (phi & phi) | u * phi | hom(u, phi)
          | name | name(phi, ..., phi)

where ``u`` is a rational ``p/q``, an integer, or one of ``top``, ``bot``,
``inf``. ``hom(u, phi)`` denotes the symmetrised hom ``hom(u, v) & hom(v, u)``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Sequence

from .behaviour import Coalgebra, DistanceResult, behavioural_distance
from .functors import Distribution, Identity, Labelled, Maybe, Neighbourhood, Powerset, SetFunctor
from .liftings import Lifting
from .predicates import (PredicateLifting, box, diamond, expectation, expectation_or_stop,
                         identity_lifting, labelled, neighbourhood_box, stop)
from .quantale import INF, LUK01, Quantale

CONST_NAMES = ("top", "bot", "inf")


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownModality(FormulaSyntaxError):
    pass


class ArityError(FormulaSyntaxError):
    pass


# -- AST -------------------------------------------------------------------

@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Or:
    left: Any
    right: Any


@dataclass(frozen=True)
class And:
    left: Any
    right: Any


@dataclass(frozen=True)
class TensorConst:
    u: Any
    body: Any


@dataclass(frozen=True)
class HomConst:
    u: Any
    body: Any


@dataclass(frozen=True)
class Modal:
    name: str
    args: tuple = ()


def depth(phi) -> int:
    if isinstance(phi, Top):
        return 0
    if isinstance(phi, (Or, And)):
        return max(depth(phi.left), depth(phi.right))
    if isinstance(phi, (TensorConst, HomConst)):
        return depth(phi.body)
    return 1 + max((depth(a) for a in phi.args), default=0)


# -- parsing ---------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def _tokens(text: str):
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex) if m.lastindex else m.end()
        if m.group(1):
            out.append(("num", m.group(1), start))
        elif m.group(2):
            out.append(("id", m.group(2), start))
        elif m.group(3):
            out.append(("sym", m.group(3), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text, registry):
        self.toks = _tokens(text)
        self.i = 0
        self.registry = registry

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, sym):
        t = self.take()
        if t[1] != sym or t[0] == "num":
            raise FormulaSyntaxError(f"expected {sym!r}, found {t[1] or 'end of input'!r}", t[2])
        return t

    def const(self):
        t = self.take()
        if t[0] == "num":
            return Fraction(t[1])
        if t[0] == "id" and t[1].lower() in CONST_NAMES:
            return t[1].lower()
        raise FormulaSyntaxError(f"expected a constant, found {t[1] or 'end of input'!r}", t[2])

    def formula(self):
        kind, val, pos = self.peek()
        if kind == "sym" and val == "(":
            self.take()
            left = self.formula()
            op = self.take()
            if op[1] not in ("|", "&") or op[0] != "sym":
                raise FormulaSyntaxError(f"expected '|' or '&', found {op[1] or 'end of input'!r}", op[2])
            right = self.formula()
            self.expect(")")
            return Or(left, right) if op[1] == "|" else And(left, right)
        if kind == "num" or (kind == "id" and val.lower() in CONST_NAMES):
            u = self.const()
            self.expect("*")
            return TensorConst(u, self.formula())
        if kind == "id":
            self.take()
            if val == "T":
                return Top()
            if val == "hom":
                self.expect("(")
                u = self.const()
                self.expect(",")
                body = self.formula()
                self.expect(")")
                return HomConst(u, body)
            args = []
            if self.peek()[1] == "(" and self.peek()[0] == "sym":
                self.take()
                if self.peek()[1] != ")":
                    args.append(self.formula())
                    while self.peek()[1] == ",":
                        self.take()
                        args.append(self.formula())
                self.expect(")")
            if self.registry is not None:
                if val not in self.registry:
                    raise UnknownModality(f"unknown modality {val!r}", pos)
                ar = self.registry[val]
                ar = ar if isinstance(ar, int) else ar.arity
                if ar != len(args):
                    raise ArityError(f"modality {val!r} takes {ar} arguments, got {len(args)}", pos)
            return Modal(val, tuple(args))
        raise FormulaSyntaxError(f"unexpected {val or 'end of input'!r}", pos)


def parse_formula(text: str, registry: Mapping | None = None):
    """Parse ``text``; with a registry (name -> lifting or arity) names and arities are checked."""
    p = _Parser(text, registry)
    phi = p.formula()
    t = p.peek()
    if t[0] != "end":
        raise FormulaSyntaxError(f"trailing input {t[1]!r}", t[2])
    return phi


def _fmt_const(u) -> str:
    if isinstance(u, bool):
        return "top" if u else "bot"
    if u == INF:
        return "inf"
    if isinstance(u, (Fraction, int)):
        return str(Fraction(u))
    return str(u)


def format_formula(phi) -> str:
    if isinstance(phi, Top):
        return "T"
    if isinstance(phi, Or):
        return f"({format_formula(phi.left)} | {format_formula(phi.right)})"
    if isinstance(phi, And):
        return f"({format_formula(phi.left)} & {format_formula(phi.right)})"
    if isinstance(phi, TensorConst):
        return f"{_fmt_const(phi.u)} * {format_formula(phi.body)}"
    if isinstance(phi, HomConst):
        return f"hom({_fmt_const(phi.u)}, {format_formula(phi.body)})"
    if not phi.args:
        return phi.name
    return f"{phi.name}(" + ", ".join(format_formula(a) for a in phi.args) + ")"


# -- semantics -------------------------------------------------------------

@dataclass(frozen=True)
class Interpretation:
    quantale: Quantale
    states: tuple
    values: tuple

    def __getitem__(self, x):
        return self.values[self.states.index(x)]

    def as_dict(self) -> dict:
        return dict(zip(self.states, self.values))


def _const(q: Quantale, u):
    return u if (not isinstance(u, str) and q.contains(u)) else q.parse(u)


def eval_formula(phi, c: Coalgebra, registry: Mapping[str, PredicateLifting]) -> Interpretation:
    q = c.quantale
    X = c.states

    def ev(f) -> tuple:
        if isinstance(f, Top):
            return tuple(q.top for _ in X)
        if isinstance(f, Or):
            return tuple(q.join(a, b) for a, b in zip(ev(f.left), ev(f.right)))
        if isinstance(f, And):
            return tuple(q.meet(a, b) for a, b in zip(ev(f.left), ev(f.right)))
        if isinstance(f, TensorConst):
            u = _const(q, f.u)
            return tuple(q.tensor(u, v) for v in ev(f.body))
        if isinstance(f, HomConst):
            u = _const(q, f.u)
            return tuple(q.hom_s(u, v) for v in ev(f.body))
        if f.name not in registry:
            raise UnknownModality(f"unknown modality {f.name!r}", 0)
        lam = registry[f.name]
        if lam.arity != len(f.args):
            raise ArityError(f"modality {f.name!r} takes {lam.arity} arguments", 0)
        preds = tuple(dict(zip(X, ev(a))) for a in f.args)
        return tuple(lam(preds, c.alpha(x)) for x in X)

    return Interpretation(q, X, ev(phi))


# -- modality catalogue ----------------------------------------------------

def available_modalities(functor: SetFunctor, q: Quantale) -> dict:
    if isinstance(functor, Labelled):
        inner = available_modalities(functor.inner, q)
        out = {}
        for a in functor.labels:
            for lam in inner.values():
                lab = labelled(lam, functor.labels, a)
                out[lab.name] = lab
        return out
    if isinstance(functor, Powerset):
        return {"dia": diamond(q), "box": box(q)}
    if isinstance(functor, Maybe) and isinstance(functor.inner, Distribution) and q == LUK01:
        return {"E": expectation_or_stop(q), "stop": stop(q)}
    if isinstance(functor, Distribution) and q == LUK01:
        return {"E": expectation(q)}
    if isinstance(functor, Neighbourhood):
        return {"nbox": neighbourhood_box()}
    if isinstance(functor, Identity):
        return {"id": identity_lifting(q)}
    return {}


def default_modalities(functor: SetFunctor, q: Quantale, names: Sequence[str] | None = None) -> dict:
    """Registry used when none is given: ``dia`` (powerset), ``E`` and ``stop`` (distributions)."""
    avail = available_modalities(functor, q)
    if names is not None:
        missing = [n for n in names if n not in avail]
        if missing:
            raise UnknownModality(f"unknown modality {missing[0]!r}", 0)
        return {n: avail[n] for n in names}
    return {n: lam for n, lam in avail.items() if not n.startswith("box")}


# -- logical distance ------------------------------------------------------

def default_grid(q: Quantale) -> tuple:
    if q.finite:
        return q.elements()
    return tuple(v for v in q.grid(4) if v != INF)


@dataclass
class FormulaFamily:
    """Semantic vectors realised by formulas up to some depth, with a witness each."""

    depth: int
    vectors: dict
    partial: bool


def formula_levels(c: Coalgebra, registry: Mapping[str, PredicateLifting], max_depth: int,
                   const_grid: Sequence | None = None, budget: int = 400,
                   max_tuples: int = 20000):
    """Yield the family for depth ``0, 1, ..., max_depth``; each contains the previous."""
    q = c.quantale
    X = c.states
    grid = tuple(default_grid(q) if const_grid is None else const_grid)
    known: dict = {}
    state = {"partial": False}

    def add(vec, phi, frontier):
        if vec in known:
            return
        if len(known) >= budget:
            state["partial"] = True
            return
        known[vec] = phi
        frontier.append(vec)

    def close(frontier):
        k = 0
        while k < len(frontier):
            v = frontier[k]
            k += 1
            phi = known[v]
            for u in grid:
                add(tuple(q.tensor(u, a) for a in v), TensorConst(u, phi), frontier)
                add(tuple(q.hom_s(u, a) for a in v), HomConst(u, phi), frontier)
            for w in list(known):
                psi = known[w]
                add(tuple(q.meet(a, b) for a, b in zip(v, w)), And(phi, psi), frontier)
                add(tuple(q.join(a, b) for a, b in zip(v, w)), Or(phi, psi), frontier)

    frontier: list = []
    add(tuple(q.top for _ in X), Top(), frontier)
    close(frontier)
    yield FormulaFamily(0, dict(known), state["partial"])
    alphas = [c.alpha(x) for x in X]
    for d in range(1, max_depth + 1):
        base = list(known.items())
        frontier = []
        for name, lam in registry.items():
            combos = itertools.product(base, repeat=lam.arity)
            for n, combo in enumerate(combos):
                if n >= max_tuples:
                    state["partial"] = True
                    break
                preds = tuple(dict(zip(X, v)) for v, _ in combo)
                vec = tuple(lam(preds, t) for t in alphas)
                add(vec, Modal(name, tuple(phi for _, phi in combo)), frontier)
        close(frontier)
        yield FormulaFamily(d, dict(known), state["partial"])


@dataclass
class LogicalDistanceResult(DistanceResult):
    formulas: int = 0
    partial: bool = False
    grid: tuple = ()
    witnesses: dict = field(default_factory=dict, repr=False)


def _ld_matrix(q: Quantale, n: int, vectors) -> tuple:
    out = [[q.top] * n for _ in range(n)]
    for v in vectors:
        for i in range(n):
            row, vi = out[i], v[i]
            for j in range(n):
                row[j] = q.meet(row[j], q.hom_s(vi, v[j]))
    return tuple(tuple(r) for r in out)


def _result(c: Coalgebra, fam: FormulaFamily, grid) -> LogicalDistanceResult:
    q = c.quantale
    m = _ld_matrix(q, len(c.states), fam.vectors)
    return LogicalDistanceResult(q, c.states, m, fam.depth, not fam.partial, Fraction(0), True,
                                 note="partial enumeration" if fam.partial else "",
                                 formulas=len(fam.vectors), partial=fam.partial, grid=tuple(grid),
                                 witnesses=fam.vectors)


def logical_distance(c: Coalgebra, registry: Mapping[str, PredicateLifting], depth: int,
                     const_grid: Sequence | None = None, budget: int = 400) -> LogicalDistanceResult:
    """Meet of ``hom_s(phi(x), phi(y))`` over formulas of modal depth at most ``depth``.

    Formulas are enumerated up to their value vector on this system, so the
    family is finite; ``budget`` caps the number of vectors, in which case
    the result is flagged ``partial``.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    grid = tuple(default_grid(c.quantale) if const_grid is None else const_grid)
    fam = None
    for fam in formula_levels(c, registry, depth, grid, budget):
        pass
    return _result(c, fam, grid)


@dataclass
class ExpressivityRow:
    depth: int
    max_gap: Any
    formulas: int
    partial: bool
    universal_ok: bool


@dataclass
class ExpressivityReport:
    bd: DistanceResult
    rows: list
    ld: list = field(repr=False, default_factory=list)

    @property
    def universal_ok(self) -> bool:
        return all(r.universal_ok for r in self.rows)

    @property
    def gap_non_increasing(self) -> bool:
        gaps = [r.max_gap for r in self.rows]
        return all(b <= a for a, b in zip(gaps, gaps[1:]))

    def to_csv(self) -> str:
        lines = ["depth,max_gap,formulas_enumerated,partial,universal_ok"]
        for r in self.rows:
            lines.append(f"{r.depth},{r.max_gap},{r.formulas},{str(r.partial).lower()},"
                         f"{str(r.universal_ok).lower()}")
        return "\n".join(lines) + "\n"

    def table(self) -> str:
        head = f"{'depth':>5} {'max_gap':>12} {'formulas':>9} {'partial':>8} {'bd<=ld':>7}"
        body = [f"{r.depth:>5} {_short(r.max_gap):>12} {r.formulas:>9} {str(r.partial):>8} "
                f"{str(r.universal_ok):>7}" for r in self.rows]
        return "\n".join([head] + body)


def _short(x) -> str:
    """Exact when the fraction is short, a 6-digit decimal otherwise."""
    text = str(x)
    return text if len(text) <= 12 else f"{float(x):.6f}"


def max_gap(q: Quantale, bd, ld) -> Fraction:
    """Largest numeric difference between ``bd`` and ``ld`` (0 when they agree)."""
    worst = Fraction(0)
    for r1, r2 in zip(bd, ld):
        for u, v in zip(r1, r2):
            d = abs(q.to_number(u) - q.to_number(v))
            worst = max(worst, d)
    return worst


def expressivity_report(c: Coalgebra, L: Lifting, registry: Mapping[str, PredicateLifting],
                        depths: Sequence[int], const_grid: Sequence | None = None,
                        budget: int = 400, bd: DistanceResult | None = None) -> ExpressivityReport:
    q = c.quantale
    if bd is None:
        bd = behavioural_distance(c, L)
    grid = tuple(default_grid(q) if const_grid is None else const_grid)
    wanted = sorted(set(depths))
    rows, lds = [], []
    for fam in formula_levels(c, registry, max(wanted, default=0), grid, budget):
        if fam.depth not in wanted:
            continue
        ld = _result(c, fam, grid)
        ok = all(q.leq(u, v) for r1, r2 in zip(bd.matrix, ld.matrix) for u, v in zip(r1, r2))
        rows.append(ExpressivityRow(fam.depth, max_gap(q, bd.matrix, ld.matrix), ld.formulas,
                                    ld.partial, ok))
        lds.append(ld)
    return ExpressivityReport(bd, rows, lds)
