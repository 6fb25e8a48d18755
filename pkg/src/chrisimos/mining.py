"""Dominating-set solvers and block generation under a time budget.

The default solver is a single deterministic greedy pass: pick the
vertex covering the most yet-uncovered vertices, ties preferring
uncovered candidates and then the ascending id.  Miners may plug any
procedure that streams candidate sets; block generation keeps the best
valid result seen before the deadline.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from ._kernels import greedy_cover
from .errors import AbortBadInstance, AbortNoSolution, TooLarge
from .graphs import Graph, build_csr
from .ledger import (
    Block,
    BlockHeader,
    ProblemInstance,
    TransactionSet,
    graph_digest,
    merkle_digest,
    verify_committee,
)
from .bitseq import Bits
from .transform import ExtendedGraph, compute_bound, extend

BRUTE_FORCE_CAP = 20


@dataclass(frozen=True)
class DominatingSet:
    vertices: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.vertices)


def _csr_view(g) -> tuple[np.ndarray, np.ndarray, int]:
    if isinstance(g, ExtendedGraph):
        indptr, indices = g.adjacency
        return indptr, indices, g.n_t
    indptr, indices = g.csr
    return indptr, indices, g.n


def is_dominating(g, vertices) -> bool:
    """Every vertex is a member or adjacent to one."""
    indptr, indices, n = _csr_view(g)
    covered = np.zeros(n + 1, dtype=bool)
    for v in vertices:
        covered[v] = True
        covered[indices[indptr[v]:indptr[v + 1]]] = True
    return bool(covered[1:].all())


def greedy_ds(g) -> DominatingSet:
    """Greedy heuristic over a Graph or ExtendedGraph."""
    indptr, indices, n = _csr_view(g)
    chosen = greedy_cover(indptr, indices, n)
    return DominatingSet(tuple(sorted(int(v) for v in chosen)))


def greedy_ds_permuted(g, rng: random.Random) -> DominatingSet:
    """Greedy with randomised tie-breaking via a seeded id relabeling.

    Coverage counts are label-independent, so permuting ids changes only
    which vertex wins ties; relabeling back yields a valid set for g.
    """
    indptr, indices, n = _csr_view(g)
    tail = list(range(1, n + 1))
    rng.shuffle(tail)
    perm = np.zeros(n + 1, dtype=np.int32)
    perm[1:] = tail
    inv = np.zeros(n + 1, dtype=np.int32)
    inv[perm] = np.arange(n + 1, dtype=np.int32)
    deg = np.diff(indptr)
    u = np.repeat(np.arange(n + 1, dtype=np.int32), deg)
    new_ptr, new_idx = build_csr(n, perm[u], perm[indices])
    chosen = greedy_cover(new_ptr, new_idx, n)
    return DominatingSet(tuple(sorted(int(inv[v]) for v in chosen)))


def brute_min_ds(g: Graph) -> DominatingSet:
    """Exhaustive minimum dominating set; test oracle for small graphs.

    Enumerates subsets by increasing size, lexicographic within a size,
    so the returned set is the lexicographically smallest minimum.
    """
    n = g.n
    if n > BRUTE_FORCE_CAP:
        raise TooLarge(f"exhaustive search capped at {BRUTE_FORCE_CAP} vertices")
    full = (1 << n) - 1
    closed = [0] * (n + 1)
    for v in range(1, n + 1):
        m = 1 << (v - 1)
        for u in g.adjacency[v]:
            m |= 1 << (u - 1)
        closed[v] = m
    lower = max(1, math.ceil(n / (g.gamma + 1)))
    for k in range(lower, n + 1):
        for combo in itertools.combinations(range(1, n + 1), k):
            acc = 0
            for v in combo:
                acc |= closed[v]
            if acc == full:
                return DominatingSet(combo)
    raise AssertionError("unreachable: the full vertex set always dominates")


# --- clocks and budgets --------------------------------------------------------


class WallClock:
    """Epoch-relative wall time in seconds, anchored at construction."""

    def __init__(self):
        self._t0 = time.monotonic()

    def now(self) -> float:
        return time.monotonic() - self._t0


class TickClock:
    """Manually advanced logical clock for deterministic simulation."""

    def __init__(self, start: float = 0.0):
        self._t = start

    def now(self) -> float:
        return self._t

    def advance(self, dt: float = 1.0) -> None:
        self._t += dt


@dataclass(frozen=True)
class SolverBudget:
    deadline: float
    bound_k: float


Solver = Callable[[ExtendedGraph, SolverBudget, object], Iterator[DominatingSet]]


def single_greedy_solver(eg: ExtendedGraph, budget: SolverBudget,
                         clock) -> Iterator[DominatingSet]:
    """One deterministic greedy pass; the default mining strategy."""
    yield greedy_ds(eg)


def make_restart_solver(seed: int, max_passes: int | None = None) -> Solver:
    """Greedy followed by seeded random-tie-break restarts until the deadline."""

    def solver(eg: ExtendedGraph, budget: SolverBudget, clock):
        yield greedy_ds(eg)
        rng = random.Random(f"restart:{seed}")
        passes = 0
        while max_passes is None or passes < max_passes:
            yield greedy_ds_permuted(eg, rng)
            passes += 1

    return solver


# --- block generation -----------------------------------------------------------


@dataclass(frozen=True)
class MiningPolicy:
    """Deadline, clock and chain context under which a block is mined."""

    deadline: float
    clock: object
    prev_instance_id: int


def mine_block(inst: ProblemInstance, txs: TransactionSet, h_prev: Bits,
               policy: MiningPolicy,
               solver: Solver = single_greedy_solver) -> Block:
    """Mine one block: guard the instance, extend, solve, assemble.

    The solver stream is consumed until the deadline, keeping the best
    (smallest) valid dominating set; the kept sizes are non-increasing
    by construction.
    """
    if inst.digest != graph_digest(inst.graph):
        raise AbortBadInstance("instance digest does not match the graph")
    if not verify_committee(inst):
        raise AbortBadInstance("committee signatures below threshold")
    if inst.id_g <= policy.prev_instance_id:
        raise AbortBadInstance(
            f"instance id {inst.id_g} not above previous {policy.prev_instance_id}"
        )
    h_mr = merkle_digest(txs, h_prev.length)
    eg = extend(inst.graph, h_prev, h_mr)
    k = compute_bound(eg.n_t, eg.delta_t)
    clock = policy.clock
    best: DominatingSet | None = None
    if clock.now() < policy.deadline:
        for ds in solver(eg, SolverBudget(policy.deadline, k), clock):
            if (
                (best is None or ds.size < best.size)
                and ds.size <= k
                and is_dominating(eg, ds.vertices)
            ):
                best = ds
            if clock.now() >= policy.deadline:
                break
    if best is None:
        raise AbortNoSolution(
            f"no dominating set within bound {k:.2f} before the deadline"
        )
    header = BlockHeader(
        h_prev=h_prev,
        h_mr=h_mr,
        id_g=inst.id_g,
        graph_digest=inst.digest,
        sigs=inst.sigs,
        delta_hat=2 * inst.graph.delta,
        ds=best.vertices,
        timestamp_ms=int(clock.now() * 1000),
    )
    return Block(header=header, body=txs)
