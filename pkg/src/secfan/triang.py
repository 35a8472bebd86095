"""Triangulations, GKZ vectors, bistellar flips and height-induced subdivisions."""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .config import PointConfiguration, _mask


class InvalidTriangulation(ValueError):
    """A cell list that does not triangulate the configuration."""


@dataclass(frozen=True)
class Triangulation:
    """A set of full-dimensional cells, stored sorted.

    Two triangulations are equal iff their sorted cell tuples are equal.
    """

    cells: tuple

    def __init__(self, cells: Iterable[Iterable[int]]):
        object.__setattr__(self, "cells", tuple(sorted(tuple(sorted(c)) for c in cells)))

    @property
    def used_points(self) -> frozenset:
        return frozenset(i for c in self.cells for i in c)

    def __str__(self):
        return format_triangulation(self)

    def __lt__(self, other):
        return self.cells < other.cells


_CELL_RE = re.compile(r"\{([0-9,]*)\}")


def format_triangulation(t: Triangulation) -> str:
    """``{{0,2,4},{0,4,5}}`` with sorted cells and no whitespace."""
    return "{" + ",".join("{" + ",".join(map(str, c)) + "}" for c in t.cells) + "}"


def parse_triangulation(text: str) -> Triangulation:
    s = text.strip().replace(" ", "")
    if not (s.startswith("{") and s.endswith("}")):
        raise ValueError(f"malformed triangulation {text!r}")
    inner = s[1:-1]
    cells = _CELL_RE.findall(inner)
    if _CELL_RE.sub("", inner).strip(",") or not cells:
        raise ValueError(f"malformed triangulation {text!r}")
    return Triangulation([int(x) for x in c.split(",") if x] for c in cells)


def read_batch(path) -> list:
    """Read a batch file; raises ``ValueError`` naming the bad line number."""
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            try:
                out.append(parse_triangulation(line))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    return out


def write_batch(path, triangulations, sort=False) -> int:
    lines = [format_triangulation(t) for t in triangulations]
    if sort:
        lines.sort()
    with open(path, "w") as fh:
        for line in lines:
            fh.write(line + "\n")
    return len(lines)


def format_vector(v) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


def parse_vector(text: str) -> tuple:
    s = text.strip()
    if not (s.startswith("(") and s.endswith(")")):
        raise ValueError(f"malformed vector {text!r}")
    out = []
    for x in s[1:-1].split(","):
        if x.strip():
            q = Fraction(x.strip())
            out.append(int(q) if q.denominator == 1 else q)
    return tuple(out)


# --------------------------------------------------------------------------
# validation and GKZ vectors


def validate(cfg: PointConfiguration, cells) -> Triangulation:
    """Return the triangulation or raise :class:`InvalidTriangulation`."""
    t = cells if isinstance(cells, Triangulation) else Triangulation(cells)
    d = cfg.dim
    if not t.cells:
        raise InvalidTriangulation("no cells")
    if len(set(t.cells)) != len(t.cells):
        raise InvalidTriangulation("repeated cell")
    for c in t.cells:
        if len(c) != d + 1:
            raise InvalidTriangulation(f"cell {c} is not {d}-dimensional")
        if c[0] < 0 or c[-1] >= cfg.n or len(set(c)) != len(c):
            raise InvalidTriangulation(f"cell {c} has invalid indices")
        if cfg.orientation(c) == 0:
            raise InvalidTriangulation(f"cell {c} is affinely dependent")
    total = sum(cfg.volume(c) for c in t.cells)
    if total != cfg.hull_volume:
        raise InvalidTriangulation(f"volume {total} != {cfg.hull_volume}")
    lat = cfg.face_lattice
    for facet, owners in _facet_owners(t.cells).items():
        boundary = lat.smallest_face_of_mask(_mask(facet)).dim == d - 1
        if boundary and len(owners) != 1:
            raise InvalidTriangulation(f"boundary facet {facet} shared by {len(owners)} cells")
        if not boundary:
            if len(owners) != 2:
                raise InvalidTriangulation(f"interior facet {facet} shared by {len(owners)} cells")
            (c1, p), (c2, q) = owners
            lam = cfg.dependency(tuple(sorted(facet + (p, q))))
            union = sorted(facet + (p, q))
            if lam[union.index(p)] * lam[union.index(q)] <= 0:
                raise InvalidTriangulation(f"cells {c1} and {c2} overlap")
    return t


def _facet_owners(cells):
    """facet -> list of (cell, opposite vertex)."""
    owners = defaultdict(list)
    for c in cells:
        for k in range(len(c)):
            owners[c[:k] + c[k + 1:]].append((c, c[k]))
    return owners


def gkz_vector(cfg: PointConfiguration, t: Triangulation) -> tuple:
    """Sum of cell volumes incident to each point."""
    phi = [0] * cfg.n
    for c in t.cells:
        v = cfg.volume(c)
        for i in c:
            phi[i] += v
    return tuple(phi)


def gkz_array(cfg: PointConfiguration, cells) -> np.ndarray:
    phi = np.zeros(cfg.n, dtype=np.int64)
    for c in cells:
        phi[list(c)] += cfg.volume(c)
    return phi


def is_full(t: Triangulation, n: int) -> bool:
    return len(t.used_points) == n


# --------------------------------------------------------------------------
# flips


@dataclass(frozen=True)
class Flip:
    """A bistellar flip along the circuit ``(removed_side, added_side)``.

    The cells ``{Z - z : z in removed_side} * link`` of the source are
    replaced by ``{Z - z : z in added_side} * link``.
    """

    circuit: tuple
    result: Triangulation
    removed: tuple = ()
    added: tuple = ()


def _link(cell_masks, tau):
    return frozenset(c & ~tau for c in cell_masks if c & tau == tau)


def _try_flip(cell_masks, zmask, side, other):
    """Flip on circuit ``zmask`` if the ``side`` triangulation sits in ``T``."""
    link = None
    for z in side:
        lk = _link(cell_masks, zmask & ~(1 << z))
        if not lk or (link is not None and lk != link):
            return None
        link = lk
    removed = [(zmask & ~(1 << z)) | r for z in side for r in link]
    added = [(zmask & ~(1 << z)) | r for z in other for r in link]
    return removed, added


def _cells_of_masks(masks):
    from .config import _indices

    return [_indices(m) for m in masks]


def flips(cfg: PointConfiguration, t: Triangulation) -> list:
    """All bistellar flips of ``t``, including point insertions and removals."""
    out = []
    for zpos, zneg, removed, added in flip_moves(cfg, t):
        cells = set(t.cells)
        cells.difference_update(removed)
        cells.update(added)
        out.append(Flip((zpos, zneg), Triangulation(cells), tuple(removed), tuple(added)))
    return out


def flip_moves(cfg: PointConfiguration, t: Triangulation):
    """Yield ``(side, other, removed_cells, added_cells)`` for every flip.

    ``side`` is the part of the circuit whose triangulation is currently in
    ``t``.  Each circuit is reported once.
    """
    cells = t.cells
    masks = [_mask(c) for c in cells]
    seen = set()
    owners = _facet_owners(cells)
    # Adjacent cell pairs carry every flip whose current side has >= 2 simplices.
    for facet, own in owners.items():
        if len(own) != 2:
            continue
        (_, p), (_, q) = own
        union = tuple(sorted(facet + (p, q)))
        lam = cfg.dependency(union)
        sp = lam[union.index(p)]
        side = tuple(u for u, l in zip(union, lam) if l and (l > 0) == (sp > 0))
        other = tuple(u for u, l in zip(union, lam) if l and (l > 0) != (sp > 0))
        key = (side, other)
        if key in seen:
            continue
        seen.add(key)
        zmask = _mask(side) | _mask(other)
        res = _try_flip(masks, zmask, side, other)
        if res is not None:
            yield side, other, _cells_of_masks(res[0]), _cells_of_masks(res[1])
    # Unused points: insertion into their carrier face (always flippable).
    used = t.used_points
    for u in range(cfg.n):
        if u in used:
            continue
        carrier = _carrier(cfg, cells, u)
        side, other = (u,), carrier
        zmask = _mask(carrier) | (1 << u)
        res = _try_flip(masks, zmask, side, other)
        if res is None:  # pragma: no cover - a valid triangulation always admits this
            raise InvalidTriangulation(f"point {u} has no carrier")
        yield side, other, _cells_of_masks(res[0]), _cells_of_masks(res[1])


def _carrier(cfg, cells, u):
    """Vertices of the face of ``cells`` whose relative interior holds point ``u``."""
    for c in cells:
        pts = tuple(sorted(c + (u,)))
        lam = cfg.dependency(pts)
        lu = lam[pts.index(u)]
        if all(l * lu <= 0 for p, l in zip(pts, lam) if p != u):
            return tuple(p for p, l in zip(pts, lam) if l and p != u)
    raise InvalidTriangulation(f"point {u} lies in no cell")


def apply_flip(t: Triangulation, removed, added) -> Triangulation:
    cells = set(t.cells)
    cells.difference_update(removed)
    cells.update(added)
    return Triangulation(cells)


# --------------------------------------------------------------------------
# subdivisions induced by heights


class NonGenericHeights(ValueError):
    """Heights whose lower hull is not simplicial."""


def _above_value(cfg, cell, q, heights):
    """Signed height of lifted ``q`` above the lifted hyperplane of ``cell``.

    The value is scaled by a positive factor; only its sign is meaningful.
    ``heights=None`` means placing heights (point ``i`` lifted to ``t**i`` with
    ``t`` going to infinity), evaluated symbolically.
    """
    pts = tuple(sorted(cell + (q,)))
    lam = cfg.dependency(pts)
    lq = lam[pts.index(q)]
    if heights is None:
        for p, l in zip(reversed(pts), reversed(lam)):
            if l:
                return 1 if (l > 0) == (lq > 0) else -1
    s = sum(l * heights[p] for p, l in zip(pts, lam))
    return s if lq > 0 else -s


def regular_subdivision(cfg: PointConfiguration, heights=None) -> Triangulation:
    """The lower-hull triangulation induced by ``heights``.

    ``heights`` may be any exact numbers (ints or Fractions).  ``None`` selects
    the placing triangulation of the point order.  Raises
    :class:`NonGenericHeights` if some lower face is not a simplex.
    """
    d = cfg.dim
    cells = []
    for cell in combinations(range(cfg.n), d + 1):
        if cfg.orientation(cell) == 0:
            continue
        ok, touching = True, None
        for q in range(cfg.n):
            if q in cell:
                continue
            if heights is None and q > cell[-1]:
                continue  # highest-index point dominates: always above
            v = _above_value(cfg, cell, q, heights)
            if v < 0:
                ok = False
                break
            if v == 0:
                touching = q
        if ok and touching is not None:
            raise NonGenericHeights(f"point {touching} lies on the lifted lower cell {cell}")
        if ok:
            cells.append(cell)
    return validate(cfg, cells) if heights is not None else Triangulation(cells)


def placing_triangulation(cfg: PointConfiguration) -> Triangulation:
    """Placing triangulation for the point order (regular by construction)."""
    return regular_subdivision(cfg, None)
