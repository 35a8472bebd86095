import random

import numpy as np
import pytest

from conftest import PHI_FIXTURES, TWO_D2_PLANE, tri
from secfan.config import normalize_configuration
from secfan.massive import eta_direct
from secfan.symmetry import (GroupError, PermutationGroup, affine_symmetry_group, apply,
                             canonical_fingerprint, canonical_form, canonical_representative,
                             coordinate_symmetry_group, induced_group, orbit, read_group)
from secfan.triang import gkz_vector

AXIS_SWAP = (0, 3, 5, 1, 4, 2)


def test_group_orders(d2, d3_3):
    assert len(coordinate_symmetry_group(d2)) == 6
    assert len(coordinate_symmetry_group(d3_3)) == 24
    assert len(PermutationGroup.trivial(5)) == 1


def test_axis_swap_induced():
    cfg = normalize_configuration(TWO_D2_PLANE)
    G = induced_group(cfg, [(1, 0)])
    assert AXIS_SWAP in G.elements and len(G) == 2


def test_affine_detection_on_plane_triangle():
    cfg = normalize_configuration(TWO_D2_PLANE)
    G = affine_symmetry_group(cfg)
    assert len(G) == 6 and AXIS_SWAP in G.elements
    with pytest.raises(GroupError):
        affine_symmetry_group(normalize_configuration([(i,) for i in range(14)]))


def test_bad_generators(d2):
    with pytest.raises(GroupError):
        PermutationGroup([(0, 0, 1, 2, 3, 4)], 6)
    cfg = normalize_configuration([(0, 0), (1, 0), (0, 2)])
    with pytest.raises(GroupError):
        induced_group(cfg, [(1, 0)])


def test_read_group(tmp_path):
    p = tmp_path / "g"
    p.write_text("# swap\n0 3 5 1 4 2\n1 2 0 4 5 3  # not a symmetry, still a permutation\n")
    G = read_group(p, 6)
    assert AXIS_SWAP in G.elements


def test_closure(d3_3):
    G = coordinate_symmetry_group(d3_3)
    elems = set(G.elements)
    for g in G.generators:
        for h in G:
            assert tuple(g[h[i]] for i in range(d3_3.n)) in elems


def test_apply_examples(d2):
    t1 = tri(1)
    assert apply(tuple(range(6)), t1) == t1
    assert apply(AXIS_SWAP, t1) == t1


def test_three_cycle_moves_t1_to_corner_orbit(d2, s3):
    images = {apply(g, tri(1)) for g in s3 if g != tuple(range(6))}
    assert {tri(5), tri(9)} <= images


def test_canonical_examples(d2, s3):
    rep = canonical_representative(d2, s3, tri(5))
    assert gkz_vector(d2, rep) == PHI_FIXTURES[1][1] and rep == tri(1)
    for k in range(14):
        t = tri(k)
        r = canonical_representative(d2, s3, t)
        assert canonical_representative(d2, s3, r) == r
        for g in s3:
            assert canonical_representative(d2, s3, apply(g, t)) == r


def test_canonical_is_exhaustive_lex_max(d3_3):
    G = coordinate_symmetry_group(d3_3)
    from secfan.triang import placing_triangulation
    t = placing_triangulation(d3_3)
    rep, fp = canonical_form(d3_3, G, t)
    assert fp == max(gkz_vector(d3_3, u) for u in orbit(G, t))
    assert gkz_vector(d3_3, rep) == fp
    assert canonical_fingerprint(G, np.array(gkz_vector(d3_3, t))) == fp


def test_orbit_sizes(d2, s3, all14):
    reps = {canonical_representative(d2, s3, t) for t in all14}
    sizes = sorted(len(orbit(s3, r)) for r in reps)
    assert sizes == [1, 1, 3, 3, 6]
    assert sum(sizes) == 14
    assert orbit(PermutationGroup.trivial(6), tri(3)) == {tri(3)}


def test_equivariance(d2, s3, all14):
    for t in all14:
        for g in s3:
            assert gkz_vector(d2, apply(g, t)) == s3.act_vector(g, gkz_vector(d2, t))
            assert eta_direct(d2, apply(g, t)) == s3.act_vector(g, eta_direct(d2, t))


def test_orbit_sizes_divide_group_order(d3_3):
    from secfan.enumeration import enumerate_regular
    G = coordinate_symmetry_group(d3_3)
    res = enumerate_regular(d3_3, G, limit=60)
    for r in res.representatives:
        assert 24 % len(orbit(G, r)) == 0


def test_vector_orbit(s3):
    assert s3.vector_orbit((1, 0, 0, 0, 2, 0)) == {(1, 0, 0, 0, 2, 0), (0, 0, 1, 2, 0, 0), (0, 2, 0, 0, 0, 1)}
