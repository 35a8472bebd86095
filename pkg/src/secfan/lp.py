"""Exact phase-one simplex for ``{y >= 0 : M y = b}``.

The tableau is kept fraction-free: every entry is an integer numerator over a
common positive denominator (the last pivot), and pivoting divides exactly by
the previous pivot.  Entries live in ``int64`` while they provably cannot
overflow and switch to Python integers otherwise, so results are always
exact.  Pivoting follows Bland's rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

_SAFE = 1 << 31


@dataclass
class Feasibility:
    """Outcome of a feasibility test.

    If ``feasible``, ``point`` solves the system.  Otherwise ``farkas`` is a
    row vector ``pi`` with ``pi @ M <= 0`` and ``pi @ b > 0``.
    """

    feasible: bool
    point: tuple = None
    farkas: tuple = None
    pivots: int = 0


def feasible_point(M, b) -> Feasibility:
    """Decide whether ``M y = b`` has a solution with ``y >= 0``.

    ``M`` is an integer matrix (any array-like), ``b`` an integer vector.
    """
    M = np.array(M, dtype=object)
    b = np.array(b, dtype=object)
    r, c = M.shape
    flip = b < 0
    M[flip] = -M[flip]
    b[flip] = -b[flip]

    width = c + r + 1
    T = np.zeros((r + 1, width), dtype=object)
    T[1:, :c] = M
    T[1:, c:c + r] = np.identity(r, dtype=object) if r else T[1:, c:c + r]
    T[1:, -1] = b
    T[0, :] = -T[1:, :].sum(axis=0)
    T[0, c:c + r] = 0
    T = _compact(T)

    basis = list(range(c, c + r))
    D = 1
    pivots = 0
    while True:
        neg = np.nonzero(T[0, :c] < 0)[0]
        if len(neg) == 0:
            break
        j = int(neg[0])
        col = T[1:, j]
        rhs = T[1:, -1]
        best = None
        for i in np.nonzero(col > 0)[0]:
            i = int(i)
            if best is None:
                best = i
                continue
            # rhs[i]/col[i] < rhs[best]/col[best], ties by smaller basic index
            lhs = int(rhs[i]) * int(col[best])
            rgt = int(rhs[best]) * int(col[i])
            if lhs < rgt or (lhs == rgt and basis[i] < basis[best]):
                best = i
        if best is None:  # pragma: no cover - phase one is bounded below by 0
            raise RuntimeError("unbounded phase-one problem")
        T, D = _pivot(T, best + 1, j, D)
        basis[best] = j
        pivots += 1

    if T[0, -1] == 0:
        y = [Fraction(0)] * c
        for i, v in enumerate(basis):
            if v < c:
                y[v] = Fraction(int(T[i + 1, -1]), int(D))
        return Feasibility(True, point=tuple(y), pivots=pivots)
    pi = [1 - Fraction(int(T[0, c + i]), int(D)) for i in range(r)]
    pi = [-p if f else p for p, f in zip(pi, flip)]
    return Feasibility(False, farkas=tuple(pi), pivots=pivots)


def _compact(T):
    if T.size == 0 or np.abs(T).max() < _SAFE:
        return T.astype(np.int64)
    return T


def _pivot(T, i, j, D):
    p = T[i, j]
    if T.dtype == np.int64 and (np.abs(T).max() >= _SAFE):
        T = T.astype(object)
    new = (T * p - np.outer(T[:, j], T[i])) // D
    new[i] = T[i]
    return new, p


def in_convex_hull(v, points) -> Feasibility:
    """Is ``v`` a convex combination of ``points``?"""
    pts = [tuple(p) for p in points]
    n = len(v)
    if not pts:
        return Feasibility(False, farkas=tuple([Fraction(0)] * n + [Fraction(1)]))
    M = [[p[k] for p in pts] for k in range(n)] + [[1] * len(pts)]
    return feasible_point(M, list(v) + [1])
