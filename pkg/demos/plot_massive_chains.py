"""
Massive GKZ vectors from cached cell contributions
==================================================

A massive face of a triangulation is weighted by how many massive chains it
starts inside each cell, relative to the chains it starts in the whole hull.
That makes the massive GKZ vector a sum of per-cell contributions, which can
be cached once per cell and reused across triangulations.
"""

from secfan.config import mc_count, normalize_configuration
from secfan.massive import (ContributionCache, chains_within, contribution_components, eta_cached,
                            eta_direct, simplex_contribution)
from secfan.triang import parse_triangulation

cfg = normalize_configuration([(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (2, 0)])
lat = cfg.face_lattice
mc = mc_count(lat)

###############################################################################
# Chain counts on the hull: corners start two chains, edges one

for face in lat:
    print(face, mc[face])

###############################################################################
# The right cell (0,0),(1,1),(2,0)

cell = (0, 4, 5)
print("chains from (2,0):", chains_within(cfg, lat, (5,), cell))
print("chains from (0,0):", chains_within(cfg, lat, (0,), cell))
for j, comp in enumerate(contribution_components(cfg, lat, mc, cell)):
    print(f"eta^{j}", tuple(str(x) for x in comp))
print("contribution", tuple(str(x) for x in simplex_contribution(cfg, lat, mc, cell)))

###############################################################################
# Two half contributions add up to an integer vector

t = parse_triangulation("{{0,2,4},{0,4,5}}")
cache = ContributionCache(cfg)
print(eta_cached(cfg, cache, t), eta_direct(cfg, t))
