"""Exact-rational optimal transport between finite distributions.

Two independent solvers compute the same number:

* :func:`wasserstein_lp` maximises ``sum f(x) (nu(x) - mu(x))`` over
  non-expansive ``f: (X, a) -> [0, 1]`` with a dense tableau simplex;
* :func:`transport_primal` minimises the cost of a coupling with the
  transportation simplex (north-west corner start, potentials, Bland-style
  pivoting).

All arithmetic is on :class:`fractions.Fraction`.
"""
from __future__ import annotations

from collections import deque
from fractions import Fraction
from typing import Sequence

from .enriched import VCategory
from .functors import Dist
from .quantale import LUK01, DomainError

ZERO = Fraction(0)


class UnboundedLP(ArithmeticError):
    pass


def simplex_max(c: Sequence, A: Sequence[Sequence], b: Sequence, max_pivots: int = 100_000):
    """Maximise ``c.x`` subject to ``A x <= b``, ``x >= 0`` where ``b >= 0``.

    The origin is feasible so no phase one is needed. Bland's rule (lowest
    index enters, lowest basic index leaves on ties) prevents cycling.
    Returns ``(value, x)``.
    """
    m, n = len(A), len(c)
    if any(bi < 0 for bi in b):
        raise ValueError("simplex_max needs a non-negative right-hand side")
    rows = [[Fraction(v) for v in A[i]] + [Fraction(int(i == k)) for k in range(m)] + [Fraction(b[i])]
            for i in range(m)]
    obj = [Fraction(v) for v in c] + [ZERO] * m
    z = ZERO
    basis = [n + i for i in range(m)]
    for _ in range(max_pivots):
        enter = next((j for j, rc in enumerate(obj) if rc > 0), None)
        if enter is None:
            x = [ZERO] * n
            for i, bv in enumerate(basis):
                if bv < n:
                    x[bv] = rows[i][-1]
            return z, x
        best = None
        for i, row in enumerate(rows):
            a = row[enter]
            if a > 0:
                ratio = row[-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            raise UnboundedLP("objective is unbounded")
        p = best[1]
        prow = rows[p]
        piv = prow[enter]
        prow = [v / piv for v in prow]
        rows[p] = prow
        for i, row in enumerate(rows):
            if i != p and row[enter] != 0:
                f = row[enter]
                rows[i] = [v - f * w for v, w in zip(row, prow)]
        f = obj[enter]
        obj = [v - f * w for v, w in zip(obj, prow[:-1])]
        z += f * prow[-1]
        basis[p] = enter
    raise ArithmeticError("simplex pivot limit reached")


def _check_dists(c: VCategory, mu, nu):
    if c.quantale != LUK01:
        raise DomainError("optimal transport is implemented over luk01")
    mu = mu if isinstance(mu, Dist) else Dist(mu)
    nu = nu if isinstance(nu, Dist) else Dist(nu)
    if not (mu.support | nu.support) <= set(c.carrier):
        raise DomainError("distribution has mass outside the carrier")
    return mu, nu


def wasserstein_lp(c: VCategory, mu, nu) -> Fraction:
    """Kantorovich distance from ``mu`` to ``nu`` over a ``luk01`` category.

    Only states in the union of the supports enter the program: a
    non-expansive map on a subspace always extends to the whole space.
    """
    mu, nu = _check_dists(c, mu, nu)
    S = [x for x in c.carrier if x in mu or x in nu]
    n = len(S)
    A, b = [], []
    for i, x in enumerate(S):
        for j, y in enumerate(S):
            if i != j and c(x, y) < 1:
                row = [ZERO] * n
                row[j], row[i] = Fraction(1), Fraction(-1)
                A.append(row)
                b.append(c(x, y))
    for i in range(n):
        row = [ZERO] * n
        row[i] = Fraction(1)
        A.append(row)
        b.append(Fraction(1))
    obj = [nu[x] - mu[x] for x in S]
    value, _ = simplex_max(obj, A, b)
    return value


def transport_primal(c: VCategory, mu, nu, max_iter: int = 10_000) -> Fraction:
    """Cheapest coupling of ``mu`` (sources) and ``nu`` (sinks) under cost ``a``."""
    mu, nu = _check_dists(c, mu, nu)
    src = [x for x in c.carrier if x in mu]
    snk = [y for y in c.carrier if y in nu]
    m, n = len(src), len(snk)
    cost = [[Fraction(c(x, y)) for y in snk] for x in src]
    supply = [mu[x] for x in src]
    demand = [nu[y] for y in snk]
    alloc: dict = {}
    i = j = 0
    while True:
        qty = min(supply[i], demand[j])
        alloc[i, j] = qty
        supply[i] -= qty
        demand[j] -= qty
        if i == m - 1 and j == n - 1:
            break
        if supply[i] == 0 and i < m - 1:
            i += 1
        else:
            j += 1
    for _ in range(max_iter):
        u, v = _potentials(alloc, cost, m, n)
        enter = next(((i, j) for i in range(m) for j in range(n)
                      if (i, j) not in alloc and cost[i][j] - u[i] - v[j] < 0), None)
        if enter is None:
            return sum((q * cost[i][j] for (i, j), q in alloc.items()), ZERO)
        cycle = _cycle(alloc, enter)
        minus = cycle[1::2]
        theta = min(alloc[cell] for cell in minus)
        leave = min(cell for cell in minus if alloc[cell] == theta)
        for k, cell in enumerate(cycle):
            if k == 0:
                alloc[cell] = theta
            elif k % 2:
                alloc[cell] -= theta
            else:
                alloc[cell] += theta
        del alloc[leave]
    raise ArithmeticError("transportation simplex iteration limit reached")


def _potentials(alloc, cost, m, n):
    u: list = [None] * m
    v: list = [None] * n
    u[0] = ZERO
    by_row: dict = {}
    by_col: dict = {}
    for i, j in alloc:
        by_row.setdefault(i, []).append(j)
        by_col.setdefault(j, []).append(i)
    todo = deque([("r", 0)])
    while todo:
        kind, k = todo.popleft()
        if kind == "r":
            for j in by_row.get(k, ()):
                if v[j] is None:
                    v[j] = cost[k][j] - u[k]
                    todo.append(("c", j))
        else:
            for i in by_col.get(k, ()):
                if u[i] is None:
                    u[i] = cost[i][k] - v[k]
                    todo.append(("r", i))
    return u, v


def _cycle(alloc, enter):
    """Cells of the cycle created by ``enter``, starting with it, signs alternating."""
    ei, ej = enter
    adj: dict = {}
    for i, j in alloc:
        adj.setdefault(("r", i), []).append(("c", j))
        adj.setdefault(("c", j), []).append(("r", i))
    start, goal = ("c", ej), ("r", ei)
    prev = {start: None}
    todo = deque([start])
    while todo:
        node = todo.popleft()
        if node == goal:
            break
        for nb in adj.get(node, ()):
            if nb not in prev:
                prev[nb] = node
                todo.append(nb)
    path = [goal]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    path.reverse()
    cells = [enter]
    for a, b in zip(path, path[1:]):
        r, col = (a, b) if a[0] == "r" else (b, a)
        cells.append((r[1], col[1]))
    return cells


def tv_lift(mu, nu) -> Fraction:
    """Total variation distance: the total positive part of ``nu - mu``."""
    mu = mu if isinstance(mu, Dist) else Dist(mu)
    nu = nu if isinstance(nu, Dist) else Dist(nu)
    return sum((max(nu[x] - mu[x], ZERO) for x in set(mu) | set(nu)), ZERO)
