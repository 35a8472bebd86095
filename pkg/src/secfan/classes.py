"""D-equivalence classes: grouping regular triangulations by massive GKZ vector.

Only orbit representatives are ever processed.  Each representative's massive
vector is expanded under the group, and class sizes come from orbit sizes:
the orbit of a triangulation ``T`` spreads evenly over the orbit of its
vector, so each vector in that orbit receives ``|G.T| / |G.eta|`` members.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .lp import in_convex_hull
from .massive import ContributionCache, eta_cached
from .symmetry import PermutationGroup, canonical_fingerprint
from .triang import Triangulation, gkz_array


@dataclass
class ClassEntry:
    representatives: int
    witness: Triangulation
    triangulations: int


@dataclass
class ClassTable:
    """Massive vector (lex-max in its orbit) -> representatives that reach it."""

    group: PermutationGroup
    entries: dict = field(default_factory=dict)

    def add(self, eta: tuple, t: Triangulation, orbit_size: int):
        key = canonical_fingerprint(self.group, eta)
        vorbit = len(self.group.vector_orbit(key))
        if orbit_size % vorbit:
            raise ArithmeticError(f"orbit of {t} does not spread evenly over {vorbit} vectors")
        e = self.entries.get(key)
        if e is None:
            self.entries[key] = ClassEntry(1, t, orbit_size // vorbit)
        else:
            e.representatives += 1
            e.triangulations += orbit_size // vorbit

    def merge(self, other: "ClassTable") -> "ClassTable":
        for key, e in other.entries.items():
            mine = self.entries.get(key)
            if mine is None:
                self.entries[key] = ClassEntry(e.representatives, e.witness, e.triangulations)
            else:
                mine.representatives += e.representatives
                mine.triangulations += e.triangulations
        return self

    def vectors(self) -> list:
        """All class vectors after group expansion, lexicographically descending."""
        out = set()
        for key in self.entries:
            out |= self.group.vector_orbit(key)
        return sorted(out, reverse=True)

    def orbits(self) -> list:
        """``[(orbit representative, orbit size)]`` in descending order."""
        return [(k, len(self.group.vector_orbit(k))) for k in sorted(self.entries, reverse=True)]

    def sizes(self) -> dict:
        """Every expanded vector -> number of regular triangulations with it."""
        out = {}
        for key, e in self.entries.items():
            for v in self.group.vector_orbit(key):
                out[v] = e.triangulations
        return dict(sorted(out.items(), reverse=True))

    @property
    def n_classes(self) -> int:
        return sum(len(self.group.vector_orbit(k)) for k in self.entries)

    @property
    def n_orbits(self) -> int:
        return len(self.entries)

    @property
    def n_triangulations(self) -> int:
        return sum(e.triangulations * len(self.group.vector_orbit(k)) for k, e in self.entries.items())

    def summary(self) -> str:
        return f"classes={self.n_classes} orbits={self.n_orbits} triangulations={self.n_triangulations}"


def collect_classes(cfg, G: PermutationGroup, representatives: Iterable, cache=None,
                    etas: Iterable = None) -> ClassTable:
    """Build the class table from a stream of orbit representatives.

    ``etas`` may supply precomputed massive vectors in the same order.  The
    orbit size of a regular triangulation is that of its GKZ vector, since
    the vector determines the triangulation.
    """
    G = G or PermutationGroup.trivial(cfg.n)
    cache = cache or ContributionCache(cfg)
    table = ClassTable(G)
    etas = iter(etas) if etas is not None else None
    for t in representatives:
        eta = next(etas) if etas is not None else eta_cached(cfg, cache, t)
        table.add(tuple(eta), t, len(G.vector_orbit(gkz_array(cfg, t.cells))))
    return table


def class_sizes(cfg, G, representatives, cache=None) -> dict:
    return collect_classes(cfg, G, representatives, cache).sizes()


@dataclass
class VertexReport:
    vertices: list
    non_vertices: list

    @property
    def ok(self) -> bool:
        return not self.non_vertices


def vertex_certify(vectors) -> VertexReport:
    """Exact test of each vector against the hull of the others."""
    vecs = sorted({tuple(int(x) for x in v) for v in vectors}, reverse=True)
    good, bad = [], []
    for k, v in enumerate(vecs):
        others = vecs[:k] + vecs[k + 1:]
        if others and in_convex_hull(v, others).feasible:
            bad.append(v)
        else:
            good.append(v)
    return VertexReport(good, bad)
