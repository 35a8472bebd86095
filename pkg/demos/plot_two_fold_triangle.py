"""
Regular triangulations of the 2-fold triangle
=============================================

The six lattice points of twice the standard triangle have 14 triangulations,
all regular.  Under the symmetric group on the three corners they fall into
five orbits, and their massive GKZ vectors give five D-equivalence classes.
"""

from secfan.classes import collect_classes, vertex_certify
from secfan.config import normalize_configuration
from secfan.enumeration import enumerate_regular
from secfan.massive import eta_direct
from secfan.symmetry import coordinate_symmetry_group, orbit
from secfan.triang import format_triangulation, format_vector, gkz_vector

# Homogeneous coordinates make the corner permutations coordinate permutations.
points = [(0, 0, 2), (0, 1, 1), (0, 2, 0), (1, 0, 1), (1, 1, 0), (2, 0, 0)]
cfg = normalize_configuration(points)
G = coordinate_symmetry_group(cfg)
print(cfg, "symmetry group of order", len(G))

###############################################################################
# Every triangulation, with its GKZ vector and massive GKZ vector

for t in sorted(enumerate_regular(cfg).representatives):
    print(f"{format_triangulation(t):40s} phi={format_vector(gkz_vector(cfg, t))} "
          f"eta={format_vector(eta_direct(cfg, t))}")

###############################################################################
# Only one representative per orbit is needed

reps = enumerate_regular(cfg, G).representatives
for t in reps:
    print(format_triangulation(t), "orbit size", len(orbit(G, t)))

###############################################################################
# D-equivalence classes are expanded from the representatives

table = collect_classes(cfg, G, reps)
print(table.summary())
for v, size in table.sizes().items():
    print(format_vector(v), "triangulations:", size)

# The five vectors are the vertices of a pentagon.
report = vertex_certify(table.vectors())
print(len(report.vertices), "of", len(table.vectors()), "are vertices")
