"""Per-miner graph extension and the permissible-size bound.

The extension doubles the vertex set: each of the n base vertices gets a
mirror partner, and the i-th *ranked* base vertex (descending degree,
ties by id) is paired with mirror id n + i.  Mirror-to-base edges are
dictated by the hash-derived edge mask, consumed in ranking order, one
bit per base neighbor; mirror-to-mirror edges follow the fixed
upper-triangular pattern parameterised by the doubled minimum degree.

The miner materialises the full adjacency (solvers need degrees); the
lazy per-vertex queries exist so correctness can be checked against the
materialised form, and mirror-side verification never needs this module
at all.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import bitseq
from .bitseq import Bits, WAdjacencySpec
from .errors import VertexOutOfRange
from .graphs import Graph, build_csr, rank_vertices


@dataclass(frozen=True, eq=False)
class ExtendedGraph:
    base: Graph
    ranking: tuple[int, ...]
    seed: Bits
    mask: np.ndarray  # edge mask L as uint8, length 2|E|
    w_spec: WAdjacencySpec
    n_t: int
    delta_t: int
    rank_pos: np.ndarray  # vertex id -> 1-based rank
    bit_offsets: np.ndarray  # rank i -> bits consumed before rank i
    vw_w: np.ndarray  # mirror endpoint of each mask-selected edge
    vw_v: np.ndarray  # base endpoint of each mask-selected edge
    ww_a: np.ndarray  # mirror-mirror pattern edges
    ww_b: np.ndarray

    @property
    def edge_count(self) -> int:
        return self.base.m + len(self.vw_v) + len(self.ww_a)

    @cached_property
    def adjacency(self) -> tuple[np.ndarray, np.ndarray]:
        """Materialised CSR over ids 1..2n."""
        base = np.asarray(self.base.edges, dtype=np.int32).reshape(-1, 2)
        u = np.concatenate([base[:, 0], self.vw_w, self.ww_a]).astype(np.int32)
        v = np.concatenate([base[:, 1], self.vw_v, self.ww_b]).astype(np.int32)
        return build_csr(self.n_t, np.concatenate([u, v]), np.concatenate([v, u]))

    @cached_property
    def _w_pattern_adj(self) -> dict[int, tuple[int, ...]]:
        """Mirror-local pattern adjacency (1-based mirror indices)."""
        adj: dict[int, list[int]] = {}
        for a, b in zip(self.ww_a, self.ww_b):
            adj.setdefault(int(a) - self.base.n, []).append(int(b) - self.base.n)
            adj.setdefault(int(b) - self.base.n, []).append(int(a) - self.base.n)
        return {k: tuple(sorted(v)) for k, v in adj.items()}

    def edge_set(self) -> set[tuple[int, int]]:
        """All edges of the extended graph as (u, v) with u < v."""
        out = set(self.base.edges)
        for w, v in zip(self.vw_w, self.vw_v):
            out.add((int(v), int(w)))
        for a, b in zip(self.ww_a, self.ww_b):
            out.add((int(a), int(b)))
        return out


def _w_pair_arrays(spec: WAdjacencySpec) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised pattern-index decode into pair endpoint arrays."""
    ones = np.asarray(bitseq.w_ones_indices(spec), dtype=np.int64)
    if not len(ones):
        return np.zeros(0, np.int32), np.zeros(0, np.int32)
    n = spec.n
    t = ones - 1
    # invert the row-start function r*n - r*(r+1)/2, then fix float slop
    r = ((2 * n - 1 - np.sqrt((2 * n - 1) ** 2 - 8 * t)) // 2).astype(np.int64)
    r = np.clip(r, 0, n - 2)
    while True:
        starts = r * n - r * (r + 1) // 2
        over = starts > t
        if not over.any():
            break
        r[over] -= 1
    while True:
        next_starts = (r + 1) * n - (r + 1) * (r + 2) // 2
        under = (next_starts <= t) & (r < n - 2)
        if not under.any():
            break
        r[under] += 1
    col = t - (r * n - r * (r + 1) // 2)
    return (r + 1).astype(np.int32), (r + 2 + col).astype(np.int32)


def extend(g: Graph, h_prev: Bits, h_mr: Bits, *,
           mask_override: np.ndarray | None = None) -> ExtendedGraph:
    """Build the extended graph for this miner's (h_prev, h_mr) context.

    ``mask_override`` substitutes the hash-derived edge mask and exists
    purely as a test hook.
    """
    n = g.n
    seed = bitseq.derive_seed(h_prev, h_mr)
    two_e = 2 * g.m
    if mask_override is not None:
        mask = np.asarray(mask_override, dtype=np.uint8)
        if mask.shape != (two_e,):
            raise ValueError(f"mask override must have length {two_e}")
    else:
        mask = bitseq.mask_array(seed, two_e) if two_e else np.zeros(0, np.uint8)

    ranking = rank_vertices(g)
    rank_pos = np.zeros(n + 1, dtype=np.int32)
    for i, r in enumerate(ranking, 1):
        rank_pos[r] = i
    ranked_deg = np.array([g.degree[r] for r in ranking], dtype=np.int64)
    bit_offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(ranked_deg[:-1], out=bit_offsets[2:])

    # scatter each vertex's (contiguous, ascending) neighbor block from the
    # CSR into its position in the rank-ordered bit stream
    indptr, indices = g.csr
    if g.m:
        deg = np.asarray(g.degree[1:], dtype=np.int64)
        dest_start = bit_offsets[rank_pos[1:]]  # per base vertex id
        within = np.arange(2 * g.m, dtype=np.int64) - np.repeat(indptr[1:n + 1], deg)
        dest = np.repeat(dest_start, deg) + within
        neighbor_stream = np.empty(2 * g.m, dtype=np.int32)
        neighbor_stream[dest] = indices
        owner_stream = np.empty(2 * g.m, dtype=np.int32)
        owner_stream[dest] = np.repeat(n + rank_pos[1:], deg)
    else:
        neighbor_stream = owner_stream = np.zeros(0, np.int32)
    sel = mask.astype(bool)
    vw_w = owner_stream[sel]
    vw_v = neighbor_stream[sel]

    w_spec = WAdjacencySpec.create(n, 2 * g.delta)
    pa, pb = _w_pair_arrays(w_spec)
    pa = pa + n
    pb = pb + n

    deg_t = np.zeros(2 * n + 1, dtype=np.int64)
    deg_t[1:n + 1] = g.degree[1:]
    for arr in (vw_w, vw_v, pa, pb):
        if len(arr):
            deg_t += np.bincount(arr, minlength=2 * n + 1)
    delta_t = int(deg_t[1:].min())

    return ExtendedGraph(
        base=g,
        ranking=ranking,
        seed=seed,
        mask=mask,
        w_spec=w_spec,
        n_t=2 * n,
        delta_t=delta_t,
        rank_pos=rank_pos,
        bit_offsets=bit_offsets,
        vw_w=vw_w,
        vw_v=vw_v,
        ww_a=pa,
        ww_b=pb,
    )


def neighbors_t(eg: ExtendedGraph, v: int) -> tuple[int, ...]:
    """Neighbor list in the extended graph, computed from the rules alone.

    Deliberately avoids the materialised CSR so the two derivations can
    be cross-checked.
    """
    n = eg.base.n
    if not 1 <= v <= eg.n_t:
        raise VertexOutOfRange(f"vertex {v} outside 1..{eg.n_t}")
    if v <= n:
        out = list(eg.base.adjacency[v])
        for u in eg.base.adjacency[v]:
            i = int(eg.rank_pos[u])
            nb = eg.base.adjacency[u]
            slot = int(eg.bit_offsets[i]) + bisect_left(nb, v) + 1
            if eg.mask[slot - 1]:
                out.append(n + i)
        return tuple(sorted(out))
    i = v - n
    partner = eg.ranking[i - 1]
    nb = eg.base.adjacency[partner]
    base_off = int(eg.bit_offsets[i])
    out = [nb[l] for l in range(len(nb)) if eg.mask[base_off + l]]
    out.extend(n + j for j in eg._w_pattern_adj.get(i, ()))
    return tuple(sorted(out))


def compute_bound(n_prime: int, delta_prime: int) -> float:
    """Permissible dominating-set size: n'(1 + ln(1 + d')) / (1 + d')."""
    if n_prime < 1:
        raise ValueError("vertex count must be positive")
    if delta_prime < 0:
        raise ValueError("minimum degree cannot be negative")
    return n_prime * (1 + math.log(1 + delta_prime)) / (1 + delta_prime)
