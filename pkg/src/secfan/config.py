"""Point configurations and exact lattice geometry of their convex hull.

A configuration is an ordered list of integer points.  On construction the
points are mapped by an affine lattice isomorphism onto ``Z^d``, where ``d``
is the affine dimension, so that every volume below is the ordinary
normalized lattice volume.  Point indices are the input order and never
change.

Simplices are plain sorted tuples of point indices.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from . import _linalg

Simplex = tuple  # sorted tuple of point indices


class ConfigurationError(ValueError):
    """Invalid point input."""


def _mask(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def _indices(mask: int) -> tuple:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


class PointConfiguration:
    """An ordered, lattice-normalized integral point configuration.

    Attributes
    ----------
    points : tuple of tuple of int
        The raw input points, in input order.
    coords : tuple of tuple of int
        Normalized coordinates in ``Z^dim``; the first point is the origin.
    dim : int
        Affine dimension.
    n : int
        Number of points.
    """

    def __init__(self, points, coords, dim):
        self.points = tuple(tuple(p) for p in points)
        self.coords = tuple(tuple(c) for c in coords)
        self.dim = dim
        self.n = len(self.points)
        self._homog = [(1,) + c for c in self.coords]
        self._volumes = {}
        self._dependencies = {}
        self._barycentric = {}

    def __repr__(self):
        return f"PointConfiguration(n={self.n}, dim={self.dim})"

    def __eq__(self, other):
        return isinstance(other, PointConfiguration) and self.points == other.points

    def __hash__(self):
        return hash(self.points)

    # Pickling drops the memo tables; workers rebuild them on demand.
    def __getstate__(self):
        return {"points": self.points, "coords": self.coords, "dim": self.dim}

    def __setstate__(self, state):
        self.__init__(state["points"], state["coords"], state["dim"])

    @property
    def digest(self) -> str:
        text = "\n".join(" ".join(map(str, p)) for p in self.points)
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def volume(self, simplex: Simplex) -> int:
        """Normalized lattice volume; memoized by vertex tuple."""
        v = self._volumes.get(simplex)
        if v is None:
            v = _simplex_volume(self.coords, simplex)
            self._volumes[simplex] = v
        return v

    def dependency(self, pts: Simplex) -> tuple:
        """Affine dependency of ``dim + 2`` points, aligned with ``pts``.

        Returns the primitive integer vector ``lam`` with
        ``sum(lam[k] * (1, coords[pts[k]])) == 0``.  It is zero iff the points
        do not affinely span.
        """
        lam = self._dependencies.get(pts)
        if lam is None:
            rows = [[self._homog[p][r] for p in pts] for r in range(self.dim + 1)]
            lam = tuple(_linalg.kernel_vector(rows))
            self._dependencies[pts] = lam
        return lam

    def barycentric(self, cell: Simplex):
        """``(D, B)`` with ``B[:, q] / D`` the barycentric coordinates of point ``q``.

        ``cell`` must be full-dimensional; ``D > 0`` and ``B`` is an integer
        array of shape ``(dim + 1, n)``.  Memoized by cell.
        """
        hit = self._barycentric.get(cell)
        if hit is None:
            k = self.dim + 1
            A = [[self._homog[p][r] for p in cell] for r in range(k)]
            D = _linalg.det(A)
            if D == 0:
                raise ConfigurationError(f"{cell} is not full-dimensional")
            adj = [[(-1) ** (i + j) * _linalg.det([row[:i] + row[i + 1:] for r, row in enumerate(A) if r != j])
                    for j in range(k)] for i in range(k)]
            B = np.array(adj, dtype=np.int64) @ np.array(self._homog, dtype=np.int64).T
            if D < 0:
                D, B = -D, -B
            hit = (D, B)
            self._barycentric[cell] = hit
        return hit

    def orientation(self, simplex: Simplex) -> int:
        """Signed determinant of the homogenized full-dimensional simplex."""
        return _linalg.det([self._homog[p] for p in simplex])

    def is_independent(self, simplex: Simplex) -> bool:
        rows = [[a - b for a, b in zip(self.coords[p], self.coords[simplex[0]])]
                for p in simplex[1:]]
        return _linalg.rank(rows) == len(rows)

    @cached_property
    def face_lattice(self) -> "HullFaceLattice":
        return hull_face_lattice(self)

    @cached_property
    def hull_volume(self) -> int:
        """Normalized volume of the convex hull."""
        from .triang import placing_triangulation

        t = placing_triangulation(self)
        return sum(self.volume(c) for c in t.cells)


def _simplex_volume(coords, simplex):
    base = coords[simplex[0]]
    edges = [[a - b for a, b in zip(coords[p], base)] for p in simplex[1:]]
    if not edges:
        return 1
    if len(edges) == len(base):
        vol = abs(_linalg.det(edges))
    else:
        vol = _linalg.gcd_of_maximal_minors(edges)
    if vol == 0:
        raise ConfigurationError(f"affinely dependent vertex set {simplex}")
    return vol


def normalize_configuration(raw_points: Sequence[Sequence[int]]) -> PointConfiguration:
    """Build a configuration whose coordinates affinely span ``Z^d``.

    Difference vectors to the first point are row reduced over the integers;
    each point is then expressed in the resulting lattice basis.

    >>> normalize_configuration([[0], [2], [4]]).coords
    ((0,), (1,), (2,))
    """
    pts = [tuple(int(x) for x in p) for p in raw_points]
    if len(pts) < 2:
        raise ConfigurationError("need at least 2 points")
    if len({len(p) for p in pts}) != 1:
        raise ConfigurationError("points have different lengths")
    if len(set(pts)) != len(pts):
        seen = set()
        dup = next(p for p in pts if p in seen or seen.add(p))
        raise ConfigurationError(f"duplicate point {dup}")
    origin = pts[0]
    diffs = [[a - b for a, b in zip(p, origin)] for p in pts]
    basis, pivots = _linalg.hermite_basis(diffs[1:])
    coords = [tuple(_linalg.coordinates_in_basis(basis, pivots, v)) for v in diffs]
    return PointConfiguration(pts, coords, len(basis))


def read_points(path) -> PointConfiguration:
    """Read a points file: one point per line, ``#`` starts a comment."""
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                rows.append([int(x) for x in line.replace(",", " ").split()])
            except ValueError as exc:
                raise ConfigurationError(f"{path}:{lineno}: {exc}") from None
    return normalize_configuration(rows)


def lattice_volume(cfg: PointConfiguration, s: Iterable[int]) -> int:
    """Normalized volume of ``s`` in the intersection lattice of its span."""
    return cfg.volume(tuple(sorted(s)))


@dataclass(frozen=True, eq=False)
class Face:
    """A nonempty face of the hull, given by the configuration points on it."""

    dim: int
    mask: int
    points: frozenset = field(repr=False)

    def __hash__(self):
        return self.mask

    def __eq__(self, other):
        return isinstance(other, Face) and self.mask == other.mask

    def __repr__(self):
        return f"Face(dim={self.dim}, points={sorted(self.points)})"


class HullFaceLattice:
    """All nonempty faces of ``conv(A)`` with their point sets."""

    def __init__(self, faces: list, dim: int):
        self.dim = dim
        self.faces = sorted(faces, key=lambda f: (-f.dim, _indices(f.mask)))
        self._by_mask = {f.mask: f for f in self.faces}
        (self.top,) = [f for f in self.faces if f.dim == dim]
        self.facets = [f for f in self.faces if f.dim == dim - 1]
        self._smallest = {}

    def __iter__(self):
        return iter(self.faces)

    def __len__(self):
        return len(self.faces)

    def of_dim(self, j: int) -> list:
        return [f for f in self.faces if f.dim == j]

    def f_vector(self) -> tuple:
        return tuple(len(self.of_dim(j)) for j in range(self.dim + 1))

    def contains(self, small: Face, big: Face) -> bool:
        return small.mask & big.mask == small.mask

    def cofaces(self, face: Face) -> list:
        """Faces of dimension ``face.dim + 1`` containing ``face``."""
        return [f for f in self.faces if f.dim == face.dim + 1 and self.contains(face, f)]

    def smallest_face_of_mask(self, mask: int) -> Face:
        face = self._smallest.get(mask)
        if face is None:
            m = self.top.mask
            for f in self.facets:
                if f.mask & mask == mask:
                    m &= f.mask
            face = self._by_mask[m]
            self._smallest[mask] = face
        return face


def hull_face_lattice(cfg: PointConfiguration) -> HullFaceLattice:
    """Face lattice of the hull, built from exact facet normals."""
    d, coords = cfg.dim, cfg.coords
    top = Face(d, _mask(range(cfg.n)), frozenset(range(cfg.n)))
    facet_masks = []
    if d >= 1:
        for sub in combinations(range(cfg.n), d):
            m = _mask(sub)
            if any(fm & m == m for fm in facet_masks):
                continue
            base = coords[sub[0]]
            rows = [[a - b for a, b in zip(coords[p], base)] for p in sub[1:]]
            normal = _linalg.kernel_vector(rows) if rows else [1]
            if not any(normal):
                continue
            vals = [sum(a * b for a, b in zip(normal, c)) - sum(a * b for a, b in zip(normal, base))
                    for c in coords]
            if all(v >= 0 for v in vals) or all(v <= 0 for v in vals):
                facet_masks.append(_mask(i for i, v in enumerate(vals) if v == 0))
    # Every proper face is an intersection of facets.
    masks = set(facet_masks)
    frontier = set(facet_masks)
    while frontier:
        new = set()
        for a in frontier:
            for b in facet_masks:
                c = a & b
                if c and c not in masks:
                    new.add(c)
        masks |= new
        frontier = new
    faces = [top]
    for m in masks:
        idx = _indices(m)
        base = coords[idx[0]]
        dim = _linalg.rank([[a - b for a, b in zip(coords[p], base)] for p in idx[1:]])
        faces.append(Face(dim, m, frozenset(idx)))
    return HullFaceLattice(faces, d)


def smallest_containing_face(lat: HullFaceLattice, s: Iterable[int]) -> Face:
    """Minimal hull face containing ``s``; the top face when ``s`` is interior."""
    return lat.smallest_face_of_mask(_mask(s))


def is_massive(lat: HullFaceLattice, s: Sequence[int]) -> bool:
    """True iff the simplex lies in a hull face of its own dimension."""
    return lat.smallest_face_of_mask(_mask(s)).dim == len(s) - 1


def mc_count(lat: HullFaceLattice) -> dict:
    """Number of saturated face chains from each face up to the top face."""
    counts = {lat.top: 1}
    for j in range(lat.dim - 1, -1, -1):
        for f in lat.of_dim(j):
            counts[f] = sum(counts[g] for g in lat.cofaces(f))
    return counts
