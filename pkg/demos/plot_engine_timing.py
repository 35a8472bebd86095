"""
Direct versus cached massive GKZ evaluation
===========================================

The direct engine visits every face of every triangulation.  The cached
engine only adds up per-cell vectors, and the cache fills up after the first
pass, so repeated batches get cheaper.
"""

import random

from secfan.cli import bench
from secfan.config import normalize_configuration
from secfan.enumeration import enumerate_regular
from secfan.symmetry import apply, coordinate_symmetry_group

points = [(a, b, 3 - a - b) for a in range(4) for b in range(4 - a)]
cfg = normalize_configuration(sorted(points))
G = coordinate_symmetry_group(cfg)
triangulations = enumerate_regular(cfg).representatives

rng = random.Random(0)
for size in (100, 1000, 10000):
    batch = [apply(rng.choice(G.elements), rng.choice(triangulations)) for _ in range(size)]
    r = bench(cfg, batch)
    print(f"{size:6d}  direct {r['direct']:.3f}s  cold {r['cached_cold']:.3f}s  "
          f"warm {r['cached_warm']:.3f}s  speedup {r['speedup_warm']:.1f}x")
