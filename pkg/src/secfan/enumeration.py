"""Enumeration of regular triangulations up to symmetry by flip-graph search.

The coordinator owns the frontier (canonical representatives not yet
expanded) and the visited set (GKZ fingerprints of every representative
found).  A task hands one frontier node and a depth budget to a worker, which
runs a depth-limited search from it and returns what it found; nodes at the
budget boundary come back unexpanded and join the frontier.  ``bfs`` mode is
the same loop with budget 1.  Because the output is a set, any scheduling of
tasks gives the same representatives.

At quiescence every visited node is either in the frontier or has been
expanded with all of its regular neighbours visited, which is exactly what a
checkpoint stores.
"""

from __future__ import annotations

import logging
import time
from collections import OrderedDict
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, ThreadPoolExecutor, wait
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .config import PointConfiguration
from .regularity import is_regular
from .symmetry import PermutationGroup, canonical_fingerprint, canonical_form
from .triang import (Triangulation, apply_flip, flip_moves, format_triangulation,
                     format_vector, parse_triangulation, parse_vector, placing_triangulation)

log = logging.getLogger(__name__)

CHECKPOINT_VERSION = "secfan-checkpoint v1"
STAT_KEYS = ("orbits", "full", "flips", "regularity_checks", "expansions")


class EnumerationError(RuntimeError):
    pass


class FingerprintCollision(EnumerationError):
    """Two different representatives share a GKZ fingerprint."""


class CheckpointError(EnumerationError):
    pass


# --------------------------------------------------------------------------
# node expansion (worker side)


class Explorer:
    """Expands nodes of the regular flip graph.

    Holds only caches: fingerprints already proven regular or non-regular.
    A non-regular fingerprint cannot belong to a regular triangulation (GKZ
    vectors of regular triangulations are vertices of the secondary polytope
    and are attained once), so rejecting by fingerprint is sound.
    """

    def __init__(self, cfg: PointConfiguration, G: PermutationGroup):
        self.cfg = cfg
        self.G = G
        self.regular = set()
        self.rejected = set()
        self.flips = 0
        self.checks = 0
        self.expansions = 0

    def take_stats(self) -> dict:
        out = {"flips": self.flips, "regularity_checks": self.checks, "expansions": self.expansions}
        self.flips = self.checks = self.expansions = 0
        return out

    def canonicalize(self, t: Triangulation):
        rep, fp = canonical_form(self.cfg, self.G, t)
        return rep, fp

    def is_regular_rep(self, rep: Triangulation, fp) -> bool:
        if fp in self.regular:
            return True
        if fp in self.rejected:
            return False
        self.checks += 1
        ok = is_regular(self.cfg, rep)
        (self.regular if ok else self.rejected).add(fp)
        return ok

    def expand(self, node: Triangulation, phi, skip=None) -> list:
        """Regular neighbours of ``node`` as ``(fingerprint, representative)``.

        ``phi`` is the node's GKZ vector; ``skip`` is an optional membership
        test for fingerprints the caller already has (those are left out).
        """
        cfg, G = self.cfg, self.G
        self.expansions += 1
        phi = np.asarray(phi, dtype=np.int64)
        out = []
        seen = set()
        for _side, _other, removed, added in flip_moves(cfg, node):
            self.flips += 1
            nphi = phi.copy()
            for c in removed:
                nphi[list(c)] -= cfg.volume(c)
            for c in added:
                nphi[list(c)] += cfg.volume(c)
            fp = canonical_fingerprint(G, nphi)
            if fp in seen or fp in self.rejected or (skip is not None and fp in skip):
                continue
            seen.add(fp)
            rep, fp2 = canonical_form(cfg, G, apply_flip(node, removed, added), nphi)
            assert fp2 == fp
            if self.is_regular_rep(rep, fp):
                out.append((fp, rep))
        return out

    def explore(self, root: Triangulation, root_fp, budget: int, skip=None) -> list:
        """Depth-limited search from ``root``.

        Returns ``[(fingerprint, representative, expanded)]``: every node
        found, flagged with whether its neighbours are also in the list.
        The root is included (expanded).
        """
        found = {root_fp: [root, True]}
        stack = [(root, root_fp, 0)]
        while stack:
            node, fp, depth = stack.pop()
            for cfp, child in self.expand(node, fp, skip):
                if cfp in found:
                    continue
                if depth + 1 < budget:
                    found[cfp] = [child, True]
                    stack.append((child, cfp, depth + 1))
                else:
                    found[cfp] = [child, False]
        return [(fp, rep, exp) for fp, (rep, exp) in found.items()]


# process-pool plumbing: one Explorer per worker process
_WORKER = None


def _init_worker(cfg, G):
    global _WORKER
    _WORKER = Explorer(cfg, G)


def _process_task(cells, fp, budget):
    found = _WORKER.explore(Triangulation(cells), fp, budget)
    return [(f, r.cells, e) for f, r, e in found], _WORKER.take_stats()


# --------------------------------------------------------------------------
# state and checkpoints


@dataclass
class EnumerationState:
    """Frontier, visited fingerprints and counters of a search."""

    frontier: OrderedDict = field(default_factory=OrderedDict)
    visited: set = field(default_factory=set)
    stats: dict = field(default_factory=lambda: dict.fromkeys(STAT_KEYS, 0))

    def add_stats(self, delta: dict):
        for k, v in delta.items():
            self.stats[k] = self.stats.get(k, 0) + v


def checkpoint_write(state: EnumerationState, path, cfg: PointConfiguration, G: PermutationGroup):
    """Write a quiescent state; the file is replaced atomically."""
    import os

    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        fh.write(CHECKPOINT_VERSION + "\n")
        fh.write(f"config-digest {cfg.digest}\n")
        fh.write(f"group-digest {G.digest}\n")
        fh.write("stats " + " ".join(f"{k}={state.stats.get(k, 0)}" for k in STAT_KEYS) + "\n")
        fh.write("frontier:\n")
        for rep in state.frontier.values():
            fh.write(format_triangulation(rep) + "\n")
        fh.write("visited:\n")
        for fp in sorted(state.visited):
            fh.write(format_vector(fp) + "\n")
    os.replace(tmp, path)


def checkpoint_resume(path, cfg: PointConfiguration, G: PermutationGroup) -> EnumerationState:
    """Load a checkpoint, refusing one written for other input."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != CHECKPOINT_VERSION:
        raise CheckpointError(f"{path}: not a {CHECKPOINT_VERSION} file")
    header = dict(line.split(" ", 1) for line in lines[1:4])
    if header.get("config-digest") != cfg.digest:
        raise CheckpointError(f"{path}: written for a different point configuration")
    if header.get("group-digest") != G.digest:
        raise CheckpointError(f"{path}: written for a different symmetry group")
    stats = dict.fromkeys(STAT_KEYS, 0)
    for kv in header.get("stats", "").split():
        k, v = kv.split("=")
        stats[k] = int(v)
    i_front = lines.index("frontier:")
    i_vis = lines.index("visited:")
    state = EnumerationState(stats=stats)
    for line in lines[i_front + 1:i_vis]:
        rep = parse_triangulation(line)
        fp = canonical_fingerprint(G, _gkz(cfg, rep))
        state.frontier[fp] = rep
    state.visited = {parse_vector(line) for line in lines[i_vis + 1:] if line.strip()}
    missing = [fp for fp in state.frontier if fp not in state.visited]
    if missing:
        raise CheckpointError(f"{path}: frontier node {missing[0]} is not marked visited")
    return state


def _gkz(cfg, t):
    phi = np.zeros(cfg.n, dtype=np.int64)
    for c in t.cells:
        phi[list(c)] += cfg.volume(c)
    return phi


# --------------------------------------------------------------------------
# coordinator


@dataclass
class EnumerationOptions:
    mode: str = "bfs"  # "bfs" | "budgeted"
    budget: int = 1
    workers: int = 1
    backend: str = "thread"  # "thread" | "process"
    limit: int = None
    checkpoint_path: str = None
    checkpoint_every: object = None  # float seconds, or int count of merged tasks
    halt_after_checkpoints: int = None


@dataclass
class EnumerationResult:
    representatives: list
    state: EnumerationState
    completed: bool
    checkpoints: int = 0
    emitted_between: list = field(default_factory=list)

    @property
    def stats(self):
        return self.state.stats


def parse_checkpoint_every(text):
    """``"2s"`` or ``"2.5s"`` means seconds; a bare integer counts tasks."""
    if text is None:
        return None
    text = str(text).strip()
    if text.endswith("s"):
        return float(text[:-1])
    return int(text)


def seed_triangulation(cfg: PointConfiguration) -> Triangulation:
    """The placing triangulation of the point order."""
    return placing_triangulation(cfg)


def initial_state(cfg, G, explorer=None) -> EnumerationState:
    explorer = explorer or Explorer(cfg, G)
    seed = seed_triangulation(cfg)
    rep, fp = explorer.canonicalize(seed)
    if not explorer.is_regular_rep(rep, fp):
        raise EnumerationError("seed triangulation is not regular")
    state = EnumerationState()
    state.visited.add(fp)
    state.frontier[fp] = rep
    state.stats["orbits"] = 1
    state.stats["full"] = int(all(fp))
    state.stats["regularity_checks"] = explorer.checks
    explorer.checks = 0
    return state


def enumerate_regular(cfg: PointConfiguration, G: PermutationGroup = None, options=None,
                      state: EnumerationState = None, on_emit: Callable = None,
                      **kw) -> EnumerationResult:
    """Enumerate canonical representatives of all regular triangulation orbits.

    ``state`` resumes a search (e.g. from :func:`checkpoint_resume`); only
    representatives found after that point are emitted.  Keyword arguments
    override fields of :class:`EnumerationOptions`.
    """
    G = G or PermutationGroup.trivial(cfg.n)
    opts = options or EnumerationOptions()
    for k, v in kw.items():
        if not hasattr(opts, k):
            raise TypeError(f"unknown option {k!r}")
        setattr(opts, k, v)
    if opts.mode not in ("bfs", "budgeted"):
        raise ValueError(f"unknown mode {opts.mode!r}")
    budget = 1 if opts.mode == "bfs" else int(opts.budget)
    if budget < 1 or opts.workers < 1:
        raise ValueError("budget and workers must be at least 1")
    return _Coordinator(cfg, G, opts, budget, on_emit).run(state)


class _Coordinator:
    def __init__(self, cfg, G, opts, budget, on_emit):
        self.cfg, self.G, self.opts, self.budget = cfg, G, opts, budget
        self.explorer = Explorer(cfg, G)
        self.on_emit = on_emit
        self.emitted = OrderedDict()
        self.limit_hit = False

    def run(self, state):
        opts = self.opts
        new_run = state is None
        if new_run:
            state = initial_state(self.cfg, self.G, self.explorer)
        self.state = state
        if new_run:
            (fp, rep), = state.frontier.items()
            self._emit(fp, rep)
        self.limit_hit = opts.limit is not None and state.stats["orbits"] >= opts.limit
        every = opts.checkpoint_every
        if isinstance(every, str):
            every = parse_checkpoint_every(every)
        checkpoints = 0
        marks = [0]
        pool = self._make_pool()
        inflight = {}
        try:
            last_ckpt = time.monotonic()
            merged_since = 0
            while True:
                due = False
                if every is not None and opts.checkpoint_path:
                    if isinstance(every, float):
                        due = time.monotonic() - last_ckpt >= every
                    else:
                        due = merged_since >= every
                while not due and not self.limit_hit and state.frontier and len(inflight) < opts.workers:
                    fp, rep = state.frontier.popitem(last=False)
                    inflight[self._submit(pool, rep, fp)] = (fp, rep)
                if not inflight:
                    if due and state.frontier and not self.limit_hit:
                        checkpoints += 1
                        checkpoint_write(state, _numbered(opts.checkpoint_path, checkpoints),
                                         self.cfg, self.G)
                        marks.append(len(self.emitted))
                        last_ckpt = time.monotonic()
                        merged_since = 0
                        log.info("checkpoint %d: %s", checkpoints, state.stats)
                        if opts.halt_after_checkpoints and checkpoints >= opts.halt_after_checkpoints:
                            return self._result(False, checkpoints, marks)
                        continue
                    break
                for fut in self._completed(inflight):
                    root = inflight.pop(fut)
                    found, stats = self._collect(fut)
                    state.add_stats(stats)
                    self._merge(root, found)
                    merged_since += 1
        finally:
            if pool is not None:
                pool.shutdown(wait=True, cancel_futures=True)
        completed = not state.frontier
        if opts.checkpoint_path:
            checkpoint_write(state, _numbered(opts.checkpoint_path, "final"), self.cfg, self.G)
        marks.append(len(self.emitted))
        return self._result(completed, checkpoints, marks)

    def _result(self, completed, checkpoints, marks):
        reps = list(self.emitted.values())
        between = [reps[a:b] for a, b in zip(marks, marks[1:])]
        return EnumerationResult(reps, self.state, completed, checkpoints, between)

    # task plumbing ---------------------------------------------------------

    def _make_pool(self):
        if self.opts.workers == 1:
            return None
        if self.opts.backend == "process":
            return ProcessPoolExecutor(self.opts.workers, initializer=_init_worker,
                                       initargs=(self.cfg, self.G))
        if self.opts.backend == "thread":
            return ThreadPoolExecutor(self.opts.workers)
        raise ValueError(f"unknown backend {self.opts.backend!r}")

    def _submit(self, pool, rep, fp):
        if pool is None:
            return _Done(self._run_local(rep, fp))
        if self.opts.backend == "process":
            return pool.submit(_process_task, rep.cells, fp, self.budget)
        return pool.submit(self._run_thread, rep, fp)

    def _run_local(self, rep, fp):
        found = self.explorer.explore(rep, fp, self.budget, skip=self.state.visited)
        return found, self.explorer.take_stats()

    def _run_thread(self, rep, fp):
        # Each thread task gets its own counters; caches are per task too.
        ex = Explorer(self.cfg, self.G)
        ex.regular, ex.rejected = self.explorer.regular, self.explorer.rejected
        found = ex.explore(rep, fp, self.budget, skip=self.state.visited)
        return found, ex.take_stats()

    @staticmethod
    def _completed(inflight):
        done = [f for f in inflight if f.done()]
        if done:
            return done
        finished, _ = wait(list(inflight), return_when=FIRST_COMPLETED)
        return list(finished)

    def _collect(self, fut):
        found, stats = fut.result()
        if self.opts.backend == "process" and self.opts.workers > 1:
            found = [(f, Triangulation(c), e) for f, c, e in found]
        return found, stats

    # merging ---------------------------------------------------------------

    def _emit(self, fp, rep):
        if fp in self.emitted and self.emitted[fp] != rep:
            raise FingerprintCollision(f"{rep} and {self.emitted[fp]} share fingerprint {fp}")
        self.emitted[fp] = rep
        if self.on_emit is not None:
            self.on_emit(rep, fp)

    def _merge(self, root, found):
        state = self.state
        limit = self.opts.limit
        root_fp = root[0]
        requeue = []
        for fp, rep, expanded in found:
            if fp == root_fp:
                continue
            if fp in state.visited:
                if fp in self.emitted and self.emitted[fp] != rep:
                    raise FingerprintCollision(f"{rep} and {self.emitted[fp]} share fingerprint {fp}")
                if expanded:
                    if self.limit_hit:
                        requeue.append((fp, rep))
                    else:
                        state.frontier.pop(fp, None)
                continue
            if self.limit_hit:
                # Children are dropped; whoever found them must be expanded again.
                requeue = [(fp2, rep2) for fp2, rep2, exp2 in found
                           if exp2 and fp2 in state.visited and fp2 != root_fp]
                break
            state.visited.add(fp)
            state.stats["orbits"] += 1
            state.stats["full"] += int(all(fp))
            self._emit(fp, rep)
            if not expanded:
                state.frontier[fp] = rep
            if limit is not None and state.stats["orbits"] >= limit:
                self.limit_hit = True
        if self.limit_hit:
            # The root's expansion may be incomplete: put it (and any node the
            # worker expanded) back at the head of the queue.
            for fp, rep in [root] + requeue:
                if fp in state.visited:
                    state.frontier[fp] = rep
                    state.frontier.move_to_end(fp, last=False)


def _numbered(path, n):
    """Checkpoint paths may contain ``{n}`` to keep every checkpoint."""
    return path.replace("{n}", str(n))


class _Done:
    """A completed future for inline (single-worker) execution."""

    def __init__(self, value):
        self._value = value

    def done(self):
        return True

    def result(self):
        return self._value


def run_budgeted(cfg, G, budget: int, workers: int, **kw) -> EnumerationResult:
    return enumerate_regular(cfg, G, mode="budgeted", budget=budget, workers=workers, **kw)


# --------------------------------------------------------------------------
# statistics and gap recovery


def full_stats(stream: Iterable, n: int = None) -> list:
    """Cumulative count of full representatives along an emission stream.

    Items may be GKZ fingerprints or triangulations (then ``n`` is needed).
    """
    curve, count = [], 0
    for item in stream:
        if isinstance(item, Triangulation):
            full = len(item.used_points) == n
        else:
            full = all(item)
        count += int(full)
        curve.append(count)
    return curve


def recover_gap(cfg, G, start_reps, target_reps, exclude=()) -> list:
    """Representatives reachable from ``start_reps`` without passing targets.

    Targets are reported but never expanded.  Fingerprints in ``exclude`` are
    neither reported nor expanded unless they are start nodes.
    """
    G = G or PermutationGroup.trivial(cfg.n)
    ex = Explorer(cfg, G)
    targets = {canonical_fingerprint(G, _gkz(cfg, t)) for t in target_reps}
    exclude = set(exclude)
    seen = OrderedDict()
    stack = []
    for t in reversed(list(start_reps)):
        rep, fp = ex.canonicalize(t)
        stack.append((fp, rep))
    while stack:
        fp, rep = stack.pop()
        if fp in seen:
            continue
        seen[fp] = rep
        if fp in targets:
            continue
        for cfp, child in reversed(ex.expand(rep, fp)):
            if cfp not in seen and cfp not in exclude:
                stack.append((cfp, child))
    return list(seen.values())


def recover_between(cfg, G, ckpt_before, ckpt_after) -> list:
    """Representatives first visited between two checkpoints of one run."""
    G = G or PermutationGroup.trivial(cfg.n)
    a = checkpoint_resume(ckpt_before, cfg, G)
    b = checkpoint_resume(ckpt_after, cfg, G)
    found = recover_gap(cfg, G, a.frontier.values(), b.frontier.values(), exclude=a.visited)
    return [rep for rep in found
            if canonical_fingerprint(G, _gkz(cfg, rep)) not in a.visited]
