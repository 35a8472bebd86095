"""Exact integer linear algebra on small dense matrices (lists of int rows)."""

from __future__ import annotations

from itertools import combinations
from math import gcd


def det(rows):
    """Determinant of a square integer matrix (fraction-free Bareiss)."""
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    if n == 2:
        (a, b), (c, d) = rows
        return a * d - b * c
    if n == 3:
        (a, b, c), (d, e, f), (g, h, i) = rows
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    m = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pk = m[k][k]
        rk = m[k]
        for i in range(k + 1, n):
            ri = m[i]
            f = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * pk - f * rk[j]) // prev
        prev = pk
    return sign * m[n - 1][n - 1]


def rank(rows):
    """Rank over the rationals."""
    m = [list(r) for r in rows if any(r)]
    if not m:
        return 0
    ncol = len(m[0])
    r = 0
    for c in range(ncol):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        for i in range(r + 1, len(m)):
            f = m[i][c]
            if f:
                m[i] = [x * p - f * y for x, y in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def hermite_basis(rows):
    """Row-echelon integer basis of the lattice generated by ``rows``.

    Returns ``(basis, pivots)``: each basis row has a positive leading entry in
    column ``pivots[k]`` and zeros to the left of it.
    """
    m = [list(r) for r in rows if any(r)]
    if not m:
        return [], []
    ncol = len(m[0])
    basis, pivots = [], []
    for c in range(ncol):
        active = [r for r in m if r[c] != 0]
        if not active:
            continue
        rest = [r for r in m if r[c] == 0]
        # Euclid on column c until one row carries the gcd.
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[c]))
            p = active[0]
            nxt = [p]
            for r in active[1:]:
                q = r[c] // p[c]
                r = [x - q * y for x, y in zip(r, p)]
                if r[c] != 0:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            active = nxt
        p = active[0]
        if p[c] < 0:
            p = [-x for x in p]
        basis.append(p)
        pivots.append(c)
        m = rest
        if not m:
            break
    return basis, pivots


def coordinates_in_basis(basis, pivots, v):
    """Integer coefficients ``c`` with ``sum(c[k] * basis[k]) == v``."""
    v = list(v)
    coeffs = []
    for row, c in zip(basis, pivots):
        q, r = divmod(v[c], row[c])
        if r:
            raise ValueError("vector is not in the lattice")
        coeffs.append(q)
        if q:
            v = [x - q * y for x, y in zip(v, row)]
    if any(v):
        raise ValueError("vector is not in the lattice")
    return coeffs


def kernel_vector(rows):
    """Integer kernel of a k x (k+1) matrix via signed maximal minors.

    The result is primitive (gcd 1) and is the zero vector iff the rank is
    below k.
    """
    ncol = len(rows[0]) if rows else 1
    out = []
    for k in range(ncol):
        minor = [r[:k] + r[k + 1:] for r in rows]
        out.append((-1) ** k * det(minor))
    g = 0
    for x in out:
        g = gcd(g, x)
    if g > 1:
        out = [x // g for x in out]
    return out


def gcd_of_maximal_minors(rows):
    """gcd of all k x k minors of a k x n integer matrix (k <= n)."""
    k = len(rows)
    if k == 0:
        return 1
    n = len(rows[0])
    g = 0
    for cols in combinations(range(n), k):
        g = gcd(g, det([[r[c] for c in cols] for r in rows]))
        if g == 1:
            break
    return g
