"""
Interrupting and resuming an enumeration
========================================

The search state is written at quiescence: no task in flight, every visited
node either expanded or waiting in the frontier.  A resumed run emits exactly
the representatives the interrupted run had not found yet, and the nodes
found between two checkpoints can be recovered from the checkpoints alone.
"""

import os
import tempfile

from secfan.config import normalize_configuration
from secfan.enumeration import checkpoint_resume, enumerate_regular, recover_between
from secfan.symmetry import coordinate_symmetry_group

points = [(a, b, 3 - a - b) for a in range(4) for b in range(4 - a)]
cfg = normalize_configuration(sorted(points))
G = coordinate_symmetry_group(cfg)
workdir = tempfile.mkdtemp()
pattern = os.path.join(workdir, "ck{n}.txt")

###############################################################################
# Stop after the second checkpoint (one every 20 merged tasks)

first = enumerate_regular(cfg, G, checkpoint_path=pattern, checkpoint_every=20,
                          halt_after_checkpoints=2)
print("found before stopping:", len(first.representatives), "complete:", first.completed)

###############################################################################
# Resume and compare with an uninterrupted run

state = checkpoint_resume(pattern.replace("{n}", "2"), cfg, G)
rest = enumerate_regular(cfg, G, state=state)
whole = set(enumerate_regular(cfg, G).representatives)
print(len(rest.representatives), "more;", set(first.representatives) | set(rest.representatives) == whole)

###############################################################################
# What was emitted between checkpoint 1 and checkpoint 2?

gap = recover_between(cfg, G, pattern.replace("{n}", "1"), pattern.replace("{n}", "2"))
print(len(gap), "recovered;", set(gap) == set(first.emitted_between[1]))
