"""Exact regularity test for triangulations.

A triangulation is regular iff some heights ``w`` lift every point that is
not a vertex of a cell strictly above that cell's lifted hyperplane.  Each
such condition reads ``sum(lam[i] * w[i]) > 0`` for the affine dependency
``lam`` of the cell plus the point.  It suffices to impose it across interior
facets (strict local convexity) and for each unused point against a cell
containing it; the decision is made through the Gordan alternative of that
system, which is a phase-one LP solved exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .lp import feasible_point
from .triang import Triangulation, _facet_owners, validate


@dataclass(frozen=True)
class HeightCertificate:
    heights: tuple
    margin: Fraction


def _oriented_row(cfg, cell, q):
    """Constraint row ``{point: coeff}`` for ``q`` above ``cell``."""
    pts = tuple(sorted(cell + (q,)))
    lam = cfg.dependency(pts)
    if lam[pts.index(q)] < 0:
        lam = [-x for x in lam]
    return {p: l for p, l in zip(pts, lam) if l}


def constraint_rows(cfg, t: Triangulation, full=False) -> list:
    """Strict-inequality rows whose joint feasibility is regularity of ``t``.

    ``full=True`` gives every cell against every non-vertex; the default is
    the equivalent compact system (interior facets plus unused points).
    """
    rows = []
    if full:
        for c in t.cells:
            for q in range(cfg.n):
                if q not in c:
                    rows.append(_oriented_row(cfg, c, q))
        return rows
    for facet, own in _facet_owners(t.cells).items():
        if len(own) == 2:
            (c1, _), (_, q) = own
            rows.append(_oriented_row(cfg, c1, q))
    used = t.used_points
    for u in range(cfg.n):
        if u not in used:
            rows.append(_oriented_row(cfg, _containing_cell(cfg, t.cells, u), u))
    return rows


def _containing_cell(cfg, cells, u):
    for c in cells:
        pts = tuple(sorted(c + (u,)))
        lam = cfg.dependency(pts)
        lu = lam[pts.index(u)]
        if all(l * lu <= 0 for p, l in zip(pts, lam) if p != u):
            return c
    raise ValueError(f"point {u} lies in no cell")


def is_regular(cfg, t: Triangulation, certificate=False, check=False, full=False):
    """Decide regularity exactly.

    Returns a bool, or ``(bool, HeightCertificate | None)`` when
    ``certificate`` is set.  ``check`` validates ``t`` first.
    """
    if check:
        validate(cfg, t)
    rows = constraint_rows(cfg, t, full=full)
    if not rows:
        # a single cell using every point: any heights work
        cert = HeightCertificate(tuple([Fraction(0)] * cfg.n), Fraction(1))
        return (True, cert) if certificate else True
    gauge = set(t.cells[0])
    free = [i for i in range(cfg.n) if i not in gauge]
    M = [[row.get(i, 0) for row in rows] for i in free] + [[1] * len(rows)]
    b = [0] * len(free) + [1]
    res = feasible_point(M, b)
    if res.feasible:
        return (False, None) if certificate else False
    if not certificate:
        return True
    pi = res.farkas
    w = [Fraction(0)] * cfg.n
    for k, i in enumerate(free):
        w[i] = -pi[k]
    margin = lifting_margin(cfg, t, w)
    assert margin > 0, "Farkas certificate does not lift the triangulation"
    return True, HeightCertificate(tuple(w), margin)


def lifting_margin(cfg, t: Triangulation, heights) -> Fraction:
    """Smallest height of a non-vertex above a lifted cell (may be <= 0)."""
    hs = [Fraction(h) for h in heights]
    L = lcm(*(h.denominator for h in hs)) if hs else 1
    w = [int(h * L) for h in hs]
    big = max((abs(x) for x in w), default=0) >= 1 << 40
    wv = np.array(w, dtype=object if big else np.int64)
    best = None
    for c in t.cells:
        D, B = cfg.barycentric(c)
        # D * (w_q - interpolated value at q); zero on the cell's own vertices
        num = np.delete(D * wv - wv[list(c)] @ (B.astype(object) if big else B), c)
        if not num.size:
            continue
        m = Fraction(int(num.min()), D * L)
        if best is None or m < best:
            best = m
    return Fraction(1) if best is None else best


def certificate_check(cfg, t: Triangulation, heights) -> bool:
    """True iff ``heights`` induce exactly ``t``."""
    if len(heights) != cfg.n:
        return False
    try:
        validate(cfg, t)
    except ValueError:
        return False
    return lifting_margin(cfg, t, heights) > 0
