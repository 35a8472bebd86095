"""Permutation groups on point indices and canonical orbit representatives.

A permutation ``g`` is a tuple of images: point ``i`` goes to ``g[i]``.  It
acts on triangulations by relabeling vertices and on vectors indexed by
points by ``(g.v)[g[i]] = v[i]``.  The canonical representative of an orbit
is the member with the lexicographically largest GKZ vector; leftover ties
(possible only for non-regular triangulations) go to the smallest cell tuple.
"""

from __future__ import annotations

import hashlib
from fractions import Fraction
from itertools import permutations, product

import numpy as np

from . import _linalg
from .config import PointConfiguration
from .triang import Triangulation, gkz_array


class GroupError(ValueError):
    pass


class PermutationGroup:
    """A finite group of point permutations, expanded eagerly by closure."""

    def __init__(self, generators, n: int):
        self.n = n
        gens = []
        for g in generators:
            g = tuple(int(x) for x in g)
            if sorted(g) != list(range(n)):
                raise GroupError(f"not a permutation of 0..{n - 1}: {g}")
            gens.append(g)
        self.generators = tuple(gens)
        ident = tuple(range(n))
        elems = {ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for h in frontier:
                for g in gens:
                    gh = tuple(g[h[i]] for i in range(n))
                    if gh not in elems:
                        elems.add(gh)
                        nxt.append(gh)
            frontier = nxt
        self.elements = tuple(sorted(elems))
        # images[k] is element k; preimages[k][j] = element k inverse at j
        self._images = np.array(self.elements, dtype=np.intp).reshape(len(self.elements), n)
        self._preimages = np.argsort(self._images, axis=1)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __repr__(self):
        return f"PermutationGroup(order={len(self)}, n={self.n})"

    @property
    def digest(self) -> str:
        text = "\n".join(" ".join(map(str, g)) for g in self.elements)
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    @classmethod
    def trivial(cls, n):
        return cls([], n)

    def act_vector(self, g, v) -> tuple:
        out = [0] * self.n
        for i, x in enumerate(v):
            out[g[i]] = x
        return tuple(out)

    def vector_orbit(self, v) -> set:
        arr = np.asarray(v)
        return {tuple(int(x) for x in row) for row in arr[self._preimages]}


def read_group(path, n: int) -> PermutationGroup:
    """Group file: one permutation per line as images of ``0..n-1``."""
    gens = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                gens.append([int(x) for x in line.split()])
    return PermutationGroup(gens, n)


def induced_group(cfg: PointConfiguration, coordinate_permutations) -> PermutationGroup:
    """Point permutations induced by permuting raw coordinates."""
    index = {p: i for i, p in enumerate(cfg.points)}
    gens = []
    for perm in coordinate_permutations:
        g = []
        for p in cfg.points:
            img = tuple(p[perm[k]] for k in range(len(p)))
            if img not in index:
                raise GroupError(f"coordinate permutation {tuple(perm)} moves {p} off the configuration")
            g.append(index[img])
        gens.append(g)
    return PermutationGroup(gens, cfg.n)


def coordinate_symmetry_group(cfg: PointConfiguration) -> PermutationGroup:
    """All coordinate permutations of the raw points that preserve the set."""
    index = {p: i for i, p in enumerate(cfg.points)}
    k = len(cfg.points[0])
    perms = [perm for perm in permutations(range(k))
             if all(tuple(p[perm[j]] for j in range(k)) in index for p in cfg.points)]
    return induced_group(cfg, perms)


def affine_symmetry_group(cfg: PointConfiguration, max_points=12) -> PermutationGroup:
    """All lattice-preserving affine symmetries, by brute force (small inputs)."""
    if cfg.n > max_points:
        raise GroupError(f"brute-force symmetry detection is limited to {max_points} points")
    d, X = cfg.dim, cfg.coords
    index = {c: i for i, c in enumerate(X)}
    basis = _affine_basis(cfg)
    B = [[X[b][r] - X[basis[0]][r] for r in range(d)] for b in basis[1:]]
    detB = _linalg.det(B)
    elems = []
    for images in product(range(cfg.n), repeat=d + 1):
        if len(set(images)) < d + 1:
            continue
        C = [[X[c][r] - X[images[0]][r] for r in range(d)] for c in images[1:]]
        if abs(_linalg.det(C)) != abs(detB):
            continue
        L = _solve_linear_map(B, C)
        g = []
        for x in X:
            dx = [x[r] - X[basis[0]][r] for r in range(d)]
            y = tuple(X[images[0]][r] + sum(dx[s] * L[s][r] for s in range(d)) for r in range(d))
            if any(v.denominator != 1 for v in y) or tuple(int(v) for v in y) not in index:
                break
            g.append(index[tuple(int(v) for v in y)])
        else:
            if len(set(g)) == cfg.n:
                elems.append(g)
    return PermutationGroup(elems, cfg.n)


def _affine_basis(cfg):
    chosen = [0]
    for i in range(1, cfg.n):
        trial = chosen + [i]
        if cfg.is_independent(tuple(trial)):
            chosen = trial
        if len(chosen) == cfg.dim + 1:
            break
    return chosen


def _solve_linear_map(B, C):
    """Rational ``L`` (row-vector convention) with ``B @ L == C``."""
    d = len(B)
    aug = [[Fraction(x) for x in B[i]] + [Fraction(x) for x in C[i]] for i in range(d)]
    for col in range(d):
        piv = next(r for r in range(col, d) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(d):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[d:] for row in aug]


def apply(g, t: Triangulation) -> Triangulation:
    """Relabel every vertex ``i`` of ``t`` as ``g[i]``."""
    return Triangulation(tuple(g[i] for i in c) for c in t.cells)


def orbit(G: PermutationGroup, t: Triangulation) -> set:
    return {apply(g, t) for g in G}


def canonical_form(cfg, G: PermutationGroup, t: Triangulation, phi=None):
    """``(representative, its GKZ vector)``; ``phi`` may pass ``t``'s GKZ array.

    The lex-maximal permuted GKZ vector is found on the stacked images of the
    vector under all group elements, so no triangulation other than the
    winner is built.
    """
    if phi is None:
        phi = gkz_array(cfg, t.cells)
    if len(G) == 1:
        return t, tuple(int(x) for x in phi)
    rows = phi[G._preimages]
    order = np.lexsort(rows.T[::-1])
    top = rows[order[-1]]
    ties = [k for k in order[::-1] if np.array_equal(rows[k], top)]
    if len(ties) == 1:
        rep = apply(G.elements[ties[0]], t)
    else:
        rep = min(apply(G.elements[k], t) for k in ties)
    return rep, tuple(int(x) for x in top)


def canonical_fingerprint(G: PermutationGroup, phi) -> tuple:
    """Lex-maximal image of a GKZ vector (the orbit fingerprint)."""
    if len(G) == 1:
        return tuple(int(x) for x in phi)
    rows = np.asarray(phi)[G._preimages]
    order = np.lexsort(rows.T[::-1])
    return tuple(int(x) for x in rows[order[-1]])


def canonical_representative(cfg, G: PermutationGroup, t: Triangulation) -> Triangulation:
    return canonical_form(cfg, G, t)[0]
