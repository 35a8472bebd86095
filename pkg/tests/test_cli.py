import json
import os
import subprocess
import sys

import pytest

from conftest import PHI_FIXTURES
from oracles import simplex_points
from secfan.cli import main, verify_manifest


def _pts(path, pts):
    path.write_text("".join(" ".join(map(str, p)) + "\n" for p in pts))
    return str(path)


@pytest.fixture
def files(tmp_path):
    d2 = _pts(tmp_path / "2d2.pts", simplex_points(2, 2))
    seg = _pts(tmp_path / "seg.pts", [(0,), (1,), (2,)])
    grp = tmp_path / "s3.grp"
    grp.write_text("0 3 5 1 4 2\n2 1 0 4 3 5\n")
    return tmp_path, d2, seg, str(grp)


def _lines(path):
    return [line for line in open(path).read().splitlines() if line]


def test_enumerate_counts(files):
    tmp, d2, seg, grp = files
    for pts, group, n in ((d2, grp, 5), (d2, None, 14), (seg, None, 2), (d2, "coords", 5)):
        out = str(tmp / f"out{n}.txt")
        argv = ["enumerate", "--points", pts, "--out", out, "--sort"]
        if group:
            argv += ["--group", group]
        assert main(argv) == 0
        assert len(_lines(out)) == n
        assert verify_manifest(out + ".manifest.json") == []


def test_pipeline(files, capsys):
    tmp, d2, _, grp = files
    reps = str(tmp / "reps.txt")
    assert main(["enumerate", "--points", d2, "--group", grp, "--out", reps, "--stats-out",
                 str(tmp / "stats.txt")]) == 0
    assert main(["massive-gkz", "--points", d2, reps, "--out", str(tmp / "eta.txt")]) == 0
    assert len(_lines(tmp / "eta.txt")) == 5
    capsys.readouterr()
    assert main(["classes", "--points", d2, "--group", grp, reps, "--out", str(tmp / "cls"),
                 "--certify"]) == 0
    assert capsys.readouterr().out.strip() == "classes=5 orbits=3 triangulations=14 certified=5"
    assert len(_lines(tmp / "cls" / "vectors.txt")) == 5
    assert _lines(tmp / "cls" / "orbits.txt")[0] == "(1,0,1,0,0,1) 1"
    assert verify_manifest(tmp / "cls" / "manifest.json") == []
    stats = _lines(tmp / "stats.txt")
    assert stats[0].startswith("# orbits=5 full=2")


def test_massive_engines_agree(files, capsys):
    tmp, d2, _, _ = files
    batch = tmp / "b.txt"
    batch.write_text("".join(t + "\n" for t, _ in PHI_FIXTURES.values()))
    os.environ.pop("SECFAN_CACHE_DIR", None)
    main(["massive-gkz", "--points", d2, str(batch), "--engine", "direct", "--out", str(tmp / "a")])
    cache = str(tmp / "cache.txt")
    main(["massive-gkz", "--points", d2, str(batch), "--engine", "cached", "--cache-file", cache,
          "--out", str(tmp / "b")])
    main(["massive-gkz", "--points", d2, str(batch), "--cache-file", cache, "--out", str(tmp / "c")])
    a = open(tmp / "a").read()
    assert a == open(tmp / "b").read() == open(tmp / "c").read()
    assert a.splitlines()[1] == "(1,0,0,0,2,0)"
    assert "(0,4,5): (1/2,0,0,0,1,0)" in open(cache).read()


def test_cache_dir_env(files, monkeypatch):
    tmp, d2, _, _ = files
    batch = tmp / "b.txt"
    batch.write_text(PHI_FIXTURES[1][0] + "\n")
    monkeypatch.setenv("SECFAN_CACHE_DIR", str(tmp / "cache"))
    assert main(["massive-gkz", "--points", d2, str(batch), "--out", str(tmp / "o")]) == 0
    assert len(os.listdir(tmp / "cache")) == 1


def test_empty_batch(files):
    tmp, d2, _, _ = files
    (tmp / "empty.txt").write_text("")
    assert main(["massive-gkz", "--points", d2, str(tmp / "empty.txt"), "--out", str(tmp / "o")]) == 0
    assert open(tmp / "o").read() == ""


def test_malformed_line_reports_line_number(files, capsys):
    tmp, d2, _, _ = files
    (tmp / "bad.txt").write_text("{{0,2,5}}\n{{0,2,\n")
    assert main(["massive-gkz", "--points", d2, str(tmp / "bad.txt")]) == 2
    assert "bad.txt:2:" in capsys.readouterr().err


def test_gkz_check_volume(files, capsys):
    tmp, d2, seg, _ = files
    batch = tmp / "b.txt"
    batch.write_text(PHI_FIXTURES[13][0] + "\n")
    assert main(["gkz", "--points", d2, str(batch), "--validate"]) == 0
    assert capsys.readouterr().out.strip() == "(1,3,1,3,3,1)"
    assert main(["check", "--points", d2, PHI_FIXTURES[1][0]]) == 0
    assert capsys.readouterr().out.strip() == "REGULAR (0,1/2,0,1,0,1)"
    assert main(["check", "--points", d2, "{{0,2,4}}"]) == 2
    assert main(["volume", "--points", d2, "0,2,5", "4,5"]) == 0
    assert capsys.readouterr().out.split() == ["4", "1"]
    assert main(["volume", "--points", seg]) == 0
    assert capsys.readouterr().out.strip() == "2"


def test_check_not_regular(tmp_path, capsys):
    pts = _pts(tmp_path / "m.pts", [(0, 0), (4, 0), (0, 4), (1, 1), (2, 1), (1, 2)])
    twisted = "{{0,1,3},{0,2,5},{0,3,5},{1,2,4},{1,3,4},{2,4,5},{3,4,5}}"
    assert main(["check", "--points", pts, twisted]) == 0
    assert capsys.readouterr().out.strip() == "NOT_REGULAR"


def test_resume_mismatch_exit_code(files, capsys):
    tmp, d2, seg, grp = files
    ck = str(tmp / "ck.txt")
    assert main(["enumerate", "--points", d2, "--group", grp, "--limit", "2", "--checkpoint", ck,
                 "--out", str(tmp / "o")]) == 0
    assert main(["enumerate", "--points", seg, "--resume", ck]) == 2
    assert "different point configuration" in capsys.readouterr().err
    assert main(["enumerate", "--points", d2, "--group", grp, "--resume", ck, "--out",
                 str(tmp / "o2")]) == 0
    assert len(_lines(tmp / "o")) + len(_lines(tmp / "o2")) == 5


def test_recover(files):
    tmp, d2, _, _ = files
    (tmp / "start.txt").write_text(PHI_FIXTURES[0][0] + "\n")
    (tmp / "target.txt").write_text("".join(PHI_FIXTURES[k][0] + "\n" for k in (4, 8, 12, 13)))
    assert main(["recover", "--points", d2, "--start", str(tmp / "start.txt"), "--target",
                 str(tmp / "target.txt"), "--out", str(tmp / "r.txt")]) == 0
    assert len(_lines(tmp / "r.txt")) >= 10
    (tmp / "bad.txt").write_text(PHI_FIXTURES[5][0] + "\n")
    assert main(["recover", "--points", d2, "--group", "coords", "--start", str(tmp / "bad.txt"),
                 "--target", str(tmp / "target.txt")]) == 2


def test_bench(files, capsys):
    tmp, d2, _, _ = files
    batch = tmp / "b.txt"
    batch.write_text("".join(t + "\n" for t, _ in PHI_FIXTURES.values()))
    assert main(["bench", "--points", d2, str(batch), "--repetitions", "2"]) == 0
    out = dict(line.split() for line in capsys.readouterr().out.splitlines())
    assert out["batch"] == "14"
    assert main(["bench", "--points", d2, str(batch), "--repetitions", "0"]) == 2


def test_module_entry_point(files):
    _, d2, _, _ = files
    r = subprocess.run([sys.executable, "-m", "secfan", "enumerate", "--points", d2],
                       capture_output=True, text=True)
    assert r.returncode == 0 and len(r.stdout.splitlines()) == 14


def test_manifest_detects_tampering(files):
    tmp, d2, _, _ = files
    out = str(tmp / "o.txt")
    main(["enumerate", "--points", d2, "--out", out])
    with open(out, "a") as fh:
        fh.write("{{0,2,5}}\n")
    assert verify_manifest(out + ".manifest.json")
    data = json.load(open(out + ".manifest.json"))
    assert data["command"] == "enumerate" and data["summary"]["orbits"] == 14
