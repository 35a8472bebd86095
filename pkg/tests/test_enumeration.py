import random
from itertools import combinations

import pytest

from conftest import tri
from oracles import all_triangulations
from secfan.config import normalize_configuration
from secfan.enumeration import (CheckpointError, EnumerationState, checkpoint_resume,
                                checkpoint_write, enumerate_regular, full_stats,
                                parse_checkpoint_every, recover_between, recover_gap,
                                run_budgeted, seed_triangulation)
from secfan.regularity import certificate_check, is_regular
from secfan.symmetry import PermutationGroup, canonical_form, canonical_representative, orbit
from secfan.triang import Triangulation, gkz_vector


def _set(res):
    return set(res.representatives)


def test_seed(segment, d2, d3_2):
    for cfg in (segment, d2, d3_2):
        t = seed_triangulation(cfg)
        ok, cert = is_regular(cfg, t, certificate=True)
        assert ok and certificate_check(cfg, t, cert.heights)


def test_counts(segment, d2, s3):
    assert len(enumerate_regular(segment).representatives) == 2
    res = enumerate_regular(d2)
    assert _set(res) == {tri(k) for k in range(14)}
    reps = enumerate_regular(d2, s3).representatives
    assert len(reps) == 5
    assert sorted(len(orbit(s3, r)) for r in reps) == [1, 1, 3, 3, 6]


@pytest.mark.parametrize("budget,workers,backend", [(1, 4, "thread"), (2, 2, "thread"), (3, 1, "thread"),
                                                    (100, 1, "thread"), (2, 2, "process")])
def test_budgeted_matches_bfs(d2, s3, budget, workers, backend):
    for G, n in ((s3, 5), (None, 14)):
        res = run_budgeted(d2, G, budget, workers, backend=backend)
        assert len(res.representatives) == n
        assert res.completed


def test_budget_beyond_diameter_returns_nothing(d2):
    res = run_budgeted(d2, None, 50, 1)
    assert res.stats["expansions"] == 14
    assert res.completed


def test_emitted_are_canonical_and_regular(d3_2):
    from secfan.symmetry import coordinate_symmetry_group
    G = coordinate_symmetry_group(d3_2)
    res = enumerate_regular(d3_2, G)
    fps = set()
    for r in res.representatives:
        assert canonical_representative(d3_2, G, r) == r
        assert is_regular(d3_2, r)
        fps.add(gkz_vector(d3_2, r))
    assert len(fps) == len(res.representatives) == 213
    assert res.stats["orbits"] == 213


def test_exhaustive_against_brute_force():
    rng = random.Random(5)
    grid = [(x, y) for x in range(3) for y in range(3)]
    configs = [normalize_configuration(p) for p in rng.sample(list(combinations(grid, 6)), 10)]
    configs.append(normalize_configuration([(0,), (1,), (2,), (4,), (5,)]))
    for cfg in configs:
        if cfg.dim < 1:
            continue
        if cfg.dim == 2 or len(cfg.coords[0]) == 1:
            G = PermutationGroup.trivial(cfg.n)
            brute = {Triangulation(c) for c in all_triangulations(cfg.coords)}
            expected = {canonical_form(cfg, G, t)[0] for t in brute if is_regular(cfg, t)}
            assert _set(enumerate_regular(cfg)) == expected


def test_checkpoint_roundtrip(tmp_path, d2, s3):
    res = enumerate_regular(d2, s3, limit=3)
    p = tmp_path / "c.txt"
    checkpoint_write(res.state, p, d2, s3)
    text = p.read_text().splitlines()
    assert text[0] == "secfan-checkpoint v1"
    assert text[1].startswith("config-digest ") and text[2].startswith("group-digest ")
    assert text[3].startswith("stats orbits=3 ")
    back = checkpoint_resume(p, d2, s3)
    assert back.stats == res.state.stats
    assert back.visited == res.state.visited
    assert list(back.frontier.values()) == list(res.state.frontier.values())


def test_checkpoint_guards(tmp_path, d2, s3, d3_2):
    p = tmp_path / "c.txt"
    checkpoint_write(enumerate_regular(d2, s3, limit=2).state, p, d2, s3)
    with pytest.raises(CheckpointError, match="point configuration"):
        checkpoint_resume(p, d3_2, PermutationGroup.trivial(d3_2.n))
    with pytest.raises(CheckpointError, match="symmetry group"):
        checkpoint_resume(p, d2, PermutationGroup.trivial(6))
    p.write_text("secfan-checkpoint v0\n")
    with pytest.raises(CheckpointError):
        checkpoint_resume(p, d2, s3)


def test_interrupted_run_resumes_to_same_set(tmp_path, d2):
    full = _set(enumerate_regular(d2))
    p = str(tmp_path / "c.txt")
    first = enumerate_regular(d2, checkpoint_path=p, checkpoint_every=3, halt_after_checkpoints=1)
    assert not first.completed and first.checkpoints == 1
    state = checkpoint_resume(p, d2, PermutationGroup.trivial(6))
    assert state.stats["expansions"] == 3
    rest = enumerate_regular(d2, state=state)
    assert rest.completed
    assert _set(first) | _set(rest) == full
    assert not (_set(first) & _set(rest))


def test_limit_then_resume(tmp_path, d3_2):
    full = _set(enumerate_regular(d3_2))
    p = str(tmp_path / "c.txt")
    part = enumerate_regular(d3_2, limit=500, checkpoint_path=p)
    assert len(part.representatives) == 500 and not part.completed
    rest = enumerate_regular(d3_2, state=checkpoint_resume(p, d3_2, PermutationGroup.trivial(d3_2.n)))
    assert _set(part) | _set(rest) == full
    assert len(part.representatives) + len(rest.representatives) == len(full)


def test_full_stats(d2, s3, segment):
    res = enumerate_regular(d2)
    curve = full_stats(gkz_vector(d2, t) for t in res.representatives)
    assert curve[-1] == 4 and curve == sorted(curve)
    assert full_stats([Triangulation([(0, 1), (1, 2)]), Triangulation([(0, 2)])], n=3) == [1, 1]
    reps = enumerate_regular(d2, s3).representatives
    assert full_stats(gkz_vector(d2, t) for t in reps)[-1] == 2


def test_recover_gap(d2):
    G = PermutationGroup.trivial(6)
    assert set(recover_gap(d2, G, [tri(4)], [tri(4)])) == {tri(4)}
    full = [tri(k) for k in (4, 8, 12, 13)]
    got = set(recover_gap(d2, G, [tri(0)], full))
    non_full = {tri(k) for k in range(14)} - set(full)
    assert non_full <= got
    assert got - non_full <= set(full)
    closure = set(got)
    for t in got & set(full):
        closure |= set(recover_gap(d2, G, [t], []))
    assert closure == {tri(k) for k in range(14)}


def test_recover_between_checkpoints(tmp_path, d3_2):
    from secfan.symmetry import coordinate_symmetry_group
    G = coordinate_symmetry_group(d3_2)
    pat = str(tmp_path / "c{n}.txt")
    res = enumerate_regular(d3_2, G, checkpoint_path=pat, checkpoint_every=15)
    assert res.checkpoints >= 3
    for k in range(1, res.checkpoints):
        a, b = pat.replace("{n}", str(k)), pat.replace("{n}", str(k + 1))
        got = recover_between(d3_2, G, a, b)
        assert set(got) == set(res.emitted_between[k])


def test_parse_checkpoint_every():
    assert parse_checkpoint_every("2s") == 2.0
    assert parse_checkpoint_every("10") == 10
    assert parse_checkpoint_every(None) is None


def test_bad_options(d2):
    with pytest.raises(ValueError):
        enumerate_regular(d2, mode="dfs")
    with pytest.raises(ValueError):
        run_budgeted(d2, None, 0, 1)
    with pytest.raises(TypeError):
        enumerate_regular(d2, nonsense=1)
