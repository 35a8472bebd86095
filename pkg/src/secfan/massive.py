"""Massive GKZ vectors.

``eta_direct`` evaluates the alternating sum over all massive faces of a
triangulation.  ``eta_cached`` adds up per-cell contributions instead: each
massive face of a cell is weighted by the number of massive chains it starts
inside that cell, divided by the number it starts in the whole hull (which
depends only on its carrier face).  Contributions depend only on the cell, so
they are computed once and reused for every triangulation.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from itertools import combinations
from math import lcm

import numpy as np

from .config import HullFaceLattice, PointConfiguration, _mask, mc_count
from .triang import Triangulation


class NonIntegralEta(ArithmeticError):
    """Cached contributions did not sum to an integer vector."""


def all_faces(cfg: PointConfiguration, t: Triangulation) -> list:
    """Faces of ``t`` grouped by dimension: ``result[j]`` is a sorted list."""
    faces = [set() for _ in range(cfg.dim + 1)]
    for c in t.cells:
        for k in range(1, len(c) + 1):
            faces[k - 1].update(combinations(c, k))
    return [sorted(f) for f in faces]


def eta_components(cfg: PointConfiguration, t: Triangulation) -> list:
    """``[eta_{T,0}, ..., eta_{T,d}]``: per dimension, volumes of incident massive faces."""
    lat = cfg.face_lattice
    out = []
    for j, faces in enumerate(all_faces(cfg, t)):
        v = [0] * cfg.n
        for f in faces:
            if lat.smallest_face_of_mask(_mask(f)).dim == j:
                vol = cfg.volume(f)
                for i in f:
                    v[i] += vol
        out.append(tuple(v))
    return out


def eta_direct(cfg: PointConfiguration, t: Triangulation) -> tuple:
    """Massive GKZ vector from its definition."""
    d = cfg.dim
    eta = [0] * cfg.n
    for j, comp in enumerate(eta_components(cfg, t)):
        s = (-1) ** (d - j)
        for i, x in enumerate(comp):
            eta[i] += s * x
    return tuple(eta)


def chains_within(cfg: PointConfiguration, lat: HullFaceLattice, face, cell) -> int:
    """Massive chains from ``face`` up to the full-dimensional ``cell``."""
    face, cell = tuple(sorted(face)), tuple(sorted(cell))
    if not set(face) <= set(cell):
        raise ValueError(f"{face} is not a face of {cell}")
    return _chains_table(lat, cell)[face]


def _chains_table(lat, cell):
    """face of ``cell`` -> number of massive chains from it to ``cell``."""
    table = {cell: 1}
    for k in range(len(cell) - 1, 0, -1):
        for f in combinations(cell, k):
            if lat.smallest_face_of_mask(_mask(f)).dim != k - 1:
                table[f] = 0
                continue
            fs = set(f)
            table[f] = sum(table[g] for g in combinations(cell, k + 1) if fs <= set(g))
    return table


def contribution_components(cfg, lat, mc_table, cell) -> list:
    """``[eta^0(cell), ..., eta^d(cell)]`` as rational vectors."""
    cell = tuple(sorted(cell))
    chains = _chains_table(lat, cell)
    comps = [[Fraction(0)] * cfg.n for _ in range(cfg.dim + 1)]
    for f, k in chains.items():
        if not k:
            continue
        carrier = lat.smallest_face_of_mask(_mask(f))
        w = Fraction(k * cfg.volume(f), mc_table[carrier])
        for i in f:
            comps[len(f) - 1][i] += w
    return [tuple(c) for c in comps]


def simplex_contribution(cfg, lat, mc_table, cell) -> tuple:
    """Alternating sum of the per-dimension contributions of one cell."""
    d = cfg.dim
    out = [Fraction(0)] * cfg.n
    for j, comp in enumerate(contribution_components(cfg, lat, mc_table, cell)):
        s = (-1) ** (d - j)
        for i, x in enumerate(comp):
            out[i] += s * x
    return tuple(out)


class ContributionCache:
    """Per-cell contributions stored as integer numerators over one denominator.

    The common denominator is the lcm of all chain counts of the hull, so
    every contribution is an integer vector.  Lookups are lock-free; inserts
    take a lock and keep the first value written (values are a pure function
    of the key, so a lost race is harmless).
    """

    def __init__(self, cfg: PointConfiguration):
        self.cfg = cfg
        self.lattice = cfg.face_lattice
        self.mc_table = mc_count(self.lattice)
        self.denominator = lcm(*self.mc_table.values())
        self.store = {}
        self._lock = threading.Lock()
        self.misses = 0

    def __len__(self):
        return len(self.store)

    def __contains__(self, cell):
        return tuple(cell) in self.store

    def numerators(self, cell) -> np.ndarray:
        v = self.store.get(cell)
        if v is None:
            contrib = simplex_contribution(self.cfg, self.lattice, self.mc_table, cell)
            L = self.denominator
            v = np.array([int(x * L) for x in contrib], dtype=np.int64)
            with self._lock:
                v = self.store.setdefault(cell, v)
                self.misses += 1
        return v

    def __getitem__(self, cell) -> tuple:
        L = self.denominator
        return tuple(Fraction(int(x), L) for x in self.numerators(tuple(cell)))

    def populate(self, cells=None):
        """Eagerly compute contributions (every full-dimensional simplex by default)."""
        if cells is None:
            cfg = self.cfg
            cells = (c for c in combinations(range(cfg.n), cfg.dim + 1) if cfg.orientation(c))
        for c in cells:
            self.numerators(tuple(c))

    def save(self, path):
        L = self.denominator
        with open(path, "w") as fh:
            for cell in sorted(self.store):
                vec = ",".join(str(Fraction(int(x), L)) for x in self.store[cell])
                fh.write(f"({','.join(map(str, cell))}): ({vec})\n")

    def load(self, path):
        L = self.denominator
        with open(path) as fh:
            for line in fh:
                if not line.strip():
                    continue
                key, val = line.split(":")
                cell = tuple(int(x) for x in key.strip()[1:-1].split(","))
                vec = [Fraction(x) for x in val.strip()[1:-1].split(",")]
                if len(vec) != self.cfg.n or len(cell) != self.cfg.dim + 1:
                    raise ValueError(f"cache entry {line.strip()!r} does not fit this configuration")
                self.store[cell] = np.array([int(x * L) for x in vec], dtype=np.int64)
        return self


def eta_cached(cfg: PointConfiguration, cache: ContributionCache, t: Triangulation) -> tuple:
    """Massive GKZ vector as the sum of cached per-cell contributions."""
    total = np.zeros(cfg.n, dtype=np.int64)
    for c in t.cells:
        total += cache.numerators(c)
    q, r = np.divmod(total, cache.denominator)
    if r.any():
        raise NonIntegralEta(f"non-integral massive GKZ vector for {t}")
    return tuple(int(x) for x in q)
