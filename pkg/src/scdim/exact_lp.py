"""Exact rational linear programming.

A dense two-phase tableau simplex over ``fractions.Fraction`` using Bland's
rule, which rules out cycling.  Problems are small here (tens of variables),
so clarity wins over speed.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    value: Fraction | None
    x: tuple[Fraction, ...] | None


def _pivot(T: list[list[Fraction]], basis: list[int], r: int, c: int) -> None:
    row = T[r]
    p = row[c]
    if p != ONE:
        T[r] = row = [v / p for v in row]
    for i, other in enumerate(T):
        if i != r:
            f = other[c]
            if f:
                T[i] = [a - f * b for a, b in zip(other, row)]
    basis[r] = c


def _run(T: list[list[Fraction]], basis: list[int], ncols: int, allowed: Sequence[bool]) -> str:
    """Minimise the objective stored in the last row (reduced costs form)."""
    m = len(T) - 1
    obj = T[m]
    while True:
        obj = T[m]
        enter = -1
        for j in range(ncols):
            if allowed[j] and obj[j] < 0:
                enter = j
                break
        if enter < 0:
            return "optimal"
        leave = -1
        best = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave < 0:
            return "unbounded"
        _pivot(T, basis, leave, enter)


def solve_lp(c: Sequence, A: Sequence[Sequence], b: Sequence) -> LPResult:
    """Minimise c.x subject to A x = b and x >= 0, exactly."""
    m = len(A)
    n = len(c)
    c = [Fraction(v) for v in c]
    rows = []
    rhs = []
    for i in range(m):
        r = [Fraction(v) for v in A[i]]
        bi = Fraction(b[i])
        if bi < 0:
            r = [-v for v in r]
            bi = -bi
        rows.append(r)
        rhs.append(bi)
    # phase one with artificial columns n .. n+m-1
    T = []
    for i in range(m):
        art = [ZERO] * m
        art[i] = ONE
        T.append(rows[i] + art + [rhs[i]])
    obj = [ZERO] * (n + m + 1)
    for i in range(m):
        for j in range(n):
            obj[j] -= rows[i][j]
        obj[-1] -= rhs[i]
    T.append(obj)
    basis = [n + i for i in range(m)]
    _run(T, basis, n + m, [True] * (n + m))
    if T[m][-1] != 0:
        return LPResult("infeasible", None, None)
    # drive artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= n:
            for j in range(n):
                if T[i][j] != 0:
                    _pivot(T, basis, i, j)
                    break
    keep = [i for i in range(m) if basis[i] < n]
    T2 = [T[i][:n] + [T[i][-1]] for i in keep]
    basis2 = [basis[i] for i in keep]
    obj2 = list(c) + [ZERO]
    for i, bj in enumerate(basis2):
        f = obj2[bj]
        if f:
            obj2 = [a - f * v for a, v in zip(obj2, T2[i])]
    T2.append(obj2)
    status = _run(T2, basis2, n, [True] * n)
    if status == "unbounded":
        return LPResult("unbounded", None, None)
    x = [ZERO] * n
    for i, bj in enumerate(basis2):
        x[bj] = T2[i][-1]
    value = sum((ci * xi for ci, xi in zip(c, x)), ZERO)
    return LPResult("optimal", value, tuple(x))


def l1_distance_simplices(P: Sequence[Sequence[Fraction]], Q: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact l1 distance between conv(P) and conv(Q)."""
    d = len(P[0])
    nP, nQ = len(P), len(Q)
    nvar = nP + nQ + 2 * d
    A = []
    b = []
    for k in range(d):
        row = [ZERO] * nvar
        for i, p in enumerate(P):
            row[i] = Fraction(p[k])
        for j, q in enumerate(Q):
            row[nP + j] = -Fraction(q[k])
        row[nP + nQ + k] = -ONE
        row[nP + nQ + d + k] = ONE
        A.append(row)
        b.append(ZERO)
    A.append([ONE] * nP + [ZERO] * (nQ + 2 * d))
    b.append(ONE)
    A.append([ZERO] * nP + [ONE] * nQ + [ZERO] * (2 * d))
    b.append(ONE)
    c = [ZERO] * (nP + nQ) + [ONE] * (2 * d)
    res = solve_lp(c, A, b)
    assert res.status == "optimal"
    return res.value


def l1_distance_point_affine(p: Sequence[Fraction], Q: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact l1 distance from p to the affine hull of Q."""
    d = len(p)
    nQ = len(Q)
    # coefficients as differences of nonnegative parts
    nvar = 2 * nQ + 2 * d
    A = []
    b = []
    for k in range(d):
        row = [ZERO] * nvar
        for j, q in enumerate(Q):
            row[j] = Fraction(q[k])
            row[nQ + j] = -Fraction(q[k])
        row[2 * nQ + k] = ONE
        row[2 * nQ + d + k] = -ONE
        A.append(row)
        b.append(Fraction(p[k]))
    A.append([ONE] * nQ + [-ONE] * nQ + [ZERO] * (2 * d))
    b.append(ONE)
    c = [ZERO] * (2 * nQ) + [ONE] * (2 * d)
    res = solve_lp(c, A, b)
    assert res.status == "optimal"
    return res.value
