"""Command line interface: ``secfan <subcommand> ...``.

Exit codes: 0 success, 2 bad input, 3 internal invariant violated.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from contextlib import contextmanager
from datetime import datetime, timezone
from pathlib import Path

from .classes import collect_classes, vertex_certify
from .config import ConfigurationError, lattice_volume, read_points
from .enumeration import (CheckpointError, EnumerationError, FingerprintCollision, checkpoint_resume,
                          enumerate_regular, full_stats, parse_checkpoint_every, recover_gap)
from .massive import ContributionCache, NonIntegralEta, eta_cached, eta_direct
from .regularity import is_regular
from .symmetry import (GroupError, PermutationGroup, affine_symmetry_group, canonical_form,
                       coordinate_symmetry_group, read_group)
from .triang import (format_triangulation, format_vector, gkz_vector, parse_triangulation,
                     read_batch, validate, write_batch)

log = logging.getLogger("secfan")


class UsageError(ValueError):
    pass


# --------------------------------------------------------------------------
# shared helpers


def load_group(source, cfg) -> PermutationGroup:
    """``None`` -> trivial, ``auto`` -> affine symmetries, ``coords`` -> coordinate permutations."""
    if source is None:
        return PermutationGroup.trivial(cfg.n)
    if source == "coords":
        return coordinate_symmetry_group(cfg)
    if source == "auto":
        if cfg.n <= 12:
            return affine_symmetry_group(cfg)
        return coordinate_symmetry_group(cfg)
    return read_group(source, cfg.n)


def _need_points(args):
    if not args.points:
        raise UsageError("--points is required")
    return read_points(args.points)


def _read_batches(paths):
    out = []
    for p in paths:
        out.extend(read_batch(p))
    return out


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _count_lines(path):
    with open(path) as fh:
        return sum(1 for line in fh if line.strip())


class RunManifest:
    """JSON record of one invocation: inputs, options, outputs, counters."""

    def __init__(self, command, args, cfg=None, group=None):
        self.data = {
            "command": command,
            "options": {k: v for k, v in vars(args).items() if k != "func" and _jsonable(v)},
            "inputs": {},
            "started": _now(),
            "outputs": [],
            "summary": {},
        }
        if cfg is not None:
            self.data["inputs"]["config-digest"] = cfg.digest
        if group is not None:
            self.data["inputs"]["group-digest"] = group.digest
            self.data["inputs"]["group-order"] = len(group)

    def output(self, path):
        self.data["outputs"].append({"path": str(path), "records": _count_lines(path)})

    def write(self, path, **summary):
        self.data["summary"].update(summary)
        self.data["finished"] = _now()
        with open(path, "w") as fh:
            json.dump(self.data, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _jsonable(v):
    return isinstance(v, (str, int, float, bool, type(None), list))


def _now():
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def verify_manifest(path) -> list:
    """Problems with a manifest: missing outputs or wrong record counts."""
    with open(path) as fh:
        data = json.load(fh)
    problems = []
    for entry in data["outputs"]:
        p = Path(entry["path"])
        if not p.exists():
            problems.append(f"{p}: missing")
        elif _count_lines(p) != entry["records"]:
            problems.append(f"{p}: expected {entry['records']} records")
    return problems


def _manifest_path(args, default_dir=None):
    if getattr(args, "manifest", None):
        return args.manifest
    if default_dir is not None:
        return os.path.join(default_dir, "manifest.json")
    if args.out and args.out != "-":
        return args.out + ".manifest.json"
    return None


# --------------------------------------------------------------------------
# subcommands


def cmd_enumerate(args):
    cfg = _need_points(args)
    G = load_group(args.group, cfg)
    state = checkpoint_resume(args.resume, cfg, G) if args.resume else None
    ckpt = args.checkpoint or args.resume
    if args.checkpoint_every and not ckpt:
        ckpt = (args.out + ".ckpt") if args.out and args.out != "-" else "secfan.ckpt"
    emitted = []
    with _output(None if args.sort else args.out) as fh:
        def emit(rep, fp):
            emitted.append((rep, fp))
            if not args.sort:
                fh.write(format_triangulation(rep) + "\n")
                fh.flush()

        res = enumerate_regular(
            cfg, G, state=state, on_emit=emit, mode=args.mode, budget=args.budget,
            workers=args.workers, backend=args.backend, limit=args.limit,
            checkpoint_path=ckpt, checkpoint_every=parse_checkpoint_every(args.checkpoint_every),
            halt_after_checkpoints=args.halt_after_checkpoints)
    if args.sort:
        if args.out in (None, "-"):
            for line in sorted(format_triangulation(r) for r, _ in emitted):
                print(line)
        else:
            write_batch(args.out, [r for r, _ in emitted], sort=True)
    if args.stats_out:
        curve = full_stats(fp for _, fp in emitted)
        with open(args.stats_out, "w") as fh:
            fh.write("# " + " ".join(f"{k}={v}" for k, v in res.stats.items()) + "\n")
            fh.write("# emitted full\n")
            for k, c in enumerate(curve, 1):
                fh.write(f"{k} {c}\n")
    status = "complete" if res.completed else "incomplete"
    print(f"{status} " + " ".join(f"{k}={v}" for k, v in res.stats.items()), file=sys.stderr)
    mpath = _manifest_path(args)
    if mpath:
        m = RunManifest("enumerate", args, cfg, G)
        for p in (args.out, args.stats_out, ckpt):
            if p and p != "-" and os.path.exists(p):
                m.output(p)
        m.write(mpath, emitted=len(emitted), completed=res.completed, **res.stats)
    return 0


def cmd_gkz(args):
    cfg = _need_points(args)
    ts = _read_batches(args.batch)
    lines = [format_vector(gkz_vector(cfg, validate(cfg, t.cells) if args.validate else t)) for t in ts]
    _write_lines(args, lines, "gkz", cfg)
    return 0


def _cache_path(args, cfg):
    if args.cache_file:
        return args.cache_file
    d = os.environ.get("SECFAN_CACHE_DIR")
    if d:
        os.makedirs(d, exist_ok=True)
        return os.path.join(d, f"{cfg.digest}.cache")
    return None


def _load_cache(cfg, path):
    cache = ContributionCache(cfg)
    if path and os.path.exists(path) and os.path.getsize(path):
        cache.load(path)
    return cache


def cmd_massive(args):
    cfg = _need_points(args)
    ts = _read_batches(args.batch)
    if args.engine == "direct":
        lines = [format_vector(eta_direct(cfg, t)) for t in ts]
    else:
        path = _cache_path(args, cfg)
        cache = _load_cache(cfg, path)
        lines = [format_vector(eta_cached(cfg, cache, t)) for t in ts]
        if path:
            cache.save(path)
    _write_lines(args, lines, "massive-gkz", cfg)
    return 0


def _write_lines(args, lines, command, cfg):
    if args.sort:
        lines = sorted(lines)
    with _output(args.out) as fh:
        for line in lines:
            fh.write(line + "\n")
    mpath = _manifest_path(args)
    if mpath:
        m = RunManifest(command, args, cfg)
        m.output(args.out)
        m.write(mpath, records=len(lines))


def cmd_classes(args):
    cfg = _need_points(args)
    G = load_group(args.group, cfg)
    reps = _read_batches(args.batch)
    cache = _load_cache(cfg, _cache_path(args, cfg))
    table = collect_classes(cfg, G, reps, cache)
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    vpath, opath = os.path.join(out, "vectors.txt"), os.path.join(out, "orbits.txt")
    with open(vpath, "w") as fh:
        for v in table.vectors():
            fh.write(format_vector(v) + "\n")
    with open(opath, "w") as fh:
        for v, size in table.orbits():
            fh.write(f"{format_vector(v)} {size}\n")
    summary = table.summary()
    if args.certify:
        report = vertex_certify(table.vectors())
        summary += f" certified={len(report.vertices)}"
        for v in report.non_vertices:
            print(f"NOT_A_VERTEX {format_vector(v)}", file=sys.stderr)
    print(summary)
    m = RunManifest("classes", args, cfg, G)
    m.output(vpath)
    m.output(opath)
    m.write(_manifest_path(args, out), classes=table.n_classes, orbits=table.n_orbits,
            triangulations=table.n_triangulations)
    if args.certify and not report.ok:
        return 3
    return 0


def cmd_check(args):
    cfg = _need_points(args)
    ts = [parse_triangulation(x) for x in args.triangulation] + _read_batches(args.batch)
    if not ts:
        raise UsageError("give triangulations as arguments or with --batch")
    with _output(args.out) as fh:
        for t in ts:
            validate(cfg, t.cells)
            ok, cert = is_regular(cfg, t, certificate=True)
            if ok:
                fh.write("REGULAR " + format_vector(cert.heights) + "\n")
            else:
                fh.write("NOT_REGULAR\n")
    return 0


def cmd_volume(args):
    cfg = _need_points(args)
    if not args.simplex:
        print(cfg.hull_volume)
        return 0
    for s in args.simplex:
        idx = tuple(int(x) for x in s.strip("{}()").split(","))
        print(lattice_volume(cfg, idx))
    return 0


def cmd_recover(args):
    cfg = _need_points(args)
    G = load_group(args.group, cfg)
    start, target = read_batch(args.start), read_batch(args.target)
    for t in start + target:
        validate(cfg, t.cells)
        rep, _ = canonical_form(cfg, G, t)
        if rep != t:
            raise UsageError(f"{format_triangulation(t)} is not a canonical representative")
        if not is_regular(cfg, t):
            raise UsageError(f"{format_triangulation(t)} is not regular")
    exclude = checkpoint_resume(args.exclude_visited, cfg, G).visited if args.exclude_visited else ()
    found = recover_gap(cfg, G, start, target, exclude=exclude)
    if args.out in (None, "-"):
        lines = [format_triangulation(t) for t in found]
        for line in (sorted(lines) if args.sort else lines):
            print(line)
    else:
        write_batch(args.out, found, sort=args.sort)
    return 0


def cmd_bench(args):
    if args.repetitions < 1:
        raise UsageError("--repetitions must be at least 1")
    cfg = _need_points(args)
    ts = _read_batches(args.batch)
    report = bench(cfg, ts, args.repetitions)
    for k, v in report.items():
        print(f"{k} {v:.6f}" if isinstance(v, float) else f"{k} {v}")
    return 0


def bench(cfg, ts, repetitions=1) -> dict:
    """Wall times of the two engines; cache runs share one cache."""
    def timed(fn):
        best = None
        for _ in range(repetitions):
            t0 = time.perf_counter()
            fn()
            dt = time.perf_counter() - t0
            best = dt if best is None else min(best, dt)
        return best

    direct = timed(lambda: [eta_direct(cfg, t) for t in ts])
    cache = ContributionCache(cfg)
    t0 = time.perf_counter()
    for t in ts:
        eta_cached(cfg, cache, t)
    cold = time.perf_counter() - t0
    warm = timed(lambda: [eta_cached(cfg, cache, t) for t in ts])
    warm2 = timed(lambda: [eta_cached(cfg, cache, t) for t in ts])
    return {"batch": len(ts), "cells": len(cache), "direct": direct, "cached_cold": cold,
            "cached_warm": warm, "cached_warm2": warm2,
            "speedup_warm": direct / warm if warm else float("inf")}


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--points", help="points file")
    common.add_argument("--group", help="group file, or 'auto' / 'coords' to detect symmetries")
    common.add_argument("--sort", action="store_true", help="lexicographically sorted output")
    common.add_argument("--out", help="output file (directory for 'classes')")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="secfan", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("enumerate", parents=[common], help="regular triangulations up to symmetry")
    e.add_argument("--mode", choices=("bfs", "budgeted"), default="bfs")
    e.add_argument("--budget", type=int, default=1)
    e.add_argument("--workers", type=int, default=1)
    e.add_argument("--backend", choices=("thread", "process"), default="thread")
    e.add_argument("--limit", type=int, help="stop after this many representatives")
    e.add_argument("--checkpoint-every", help="seconds ('2s') or number of merged tasks")
    e.add_argument("--checkpoint", help="checkpoint file (default: <out>.ckpt)")
    e.add_argument("--halt-after-checkpoints", type=int, help="stop after writing N checkpoints")
    e.add_argument("--resume", help="continue from a checkpoint file")
    e.add_argument("--stats-out", help="write counters and the full-triangulation curve here")
    e.add_argument("--manifest", help="run manifest path (default: <out>.manifest.json)")
    e.set_defaults(func=cmd_enumerate)

    g = sub.add_parser("gkz", parents=[common], help="GKZ vectors of a batch")
    g.add_argument("batch", nargs="+")
    g.add_argument("--validate", action="store_true")
    g.add_argument("--manifest")
    g.set_defaults(func=cmd_gkz)

    m = sub.add_parser("massive-gkz", parents=[common], help="massive GKZ vectors of a batch")
    m.add_argument("batch", nargs="+")
    m.add_argument("--engine", choices=("direct", "cached"), default="cached")
    m.add_argument("--cache-file", help="persistent contribution cache")
    m.add_argument("--manifest")
    m.set_defaults(func=cmd_massive)

    c = sub.add_parser("classes", parents=[common], help="D-equivalence classes of representatives")
    c.add_argument("batch", nargs="+")
    c.add_argument("--cache-file")
    c.add_argument("--certify", action="store_true", help="check every vector is a hull vertex")
    c.add_argument("--manifest")
    c.set_defaults(func=cmd_classes)

    k = sub.add_parser("check", parents=[common], help="regularity test with heights")
    k.add_argument("triangulation", nargs="*")
    k.add_argument("--batch", nargs="*", default=[])
    k.set_defaults(func=cmd_check)

    v = sub.add_parser("volume", parents=[common], help="lattice volume of simplices (or of the hull)")
    v.add_argument("simplex", nargs="*", help="comma-separated point indices")
    v.set_defaults(func=cmd_volume)

    r = sub.add_parser("recover", parents=[common], help="representatives between two node sets")
    r.add_argument("--start", required=True)
    r.add_argument("--target", required=True)
    r.add_argument("--exclude-visited", help="checkpoint whose visited set is skipped")
    r.set_defaults(func=cmd_recover)

    b = sub.add_parser("bench", parents=[common], help="time the massive GKZ engines")
    b.add_argument("batch", nargs="+")
    b.add_argument("--repetitions", type=int, default=1)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (NonIntegralEta, FingerprintCollision, AssertionError) as exc:
        print(f"secfan: internal error: {exc}", file=sys.stderr)
        return 3
    except (UsageError, ConfigurationError, GroupError, CheckpointError, EnumerationError,
            ValueError, OSError) as exc:
        print(f"secfan: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
