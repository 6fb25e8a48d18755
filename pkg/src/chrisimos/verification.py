"""Block verification via the index rules, and solution retrieval.

The verifier never rebuilds the extended graph.  It recomputes the seed
from the previous-block digest and the Merkle root, probes mask bits in
O(1) per neighbor, decodes the mirror-side pattern indices once, and
confirms that the claimed set's closed neighborhoods reach all 2n
vertices.  Work is proportional to the degrees of the claimed set, not
to the extended edge count.

Epoch arbitration is strict-improvement: a block only displaces the
cached best if its set is strictly smaller, so the earliest block wins
ties deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Optional

from . import bitseq
from .bitseq import Bits, WAdjacencySpec
from .errors import NotDominatingG
from .graphs import Graph, rank_vertices
from .ledger import Block, ProblemInstance, graph_digest, merkle_digest, verify_committee


class RejectReason(Enum):
    BAD_MERKLE = "BadMerkle"
    BAD_INSTANCE_DIGEST = "BadInstanceDigest"
    BAD_SIGNATURE = "BadSignature"
    LATE = "Late"
    STALE_INSTANCE_ID = "StaleInstanceId"
    NOT_BETTER = "NotBetter"
    NOT_DOMINATING = "NotDominating"


@dataclass
class EpochVerifierState:
    """Best-so-far cache for one epoch."""

    past_size_ds: int
    epoch_deadline: float
    best_block: Optional[Block] = None

    @classmethod
    def fresh(cls, n_vertices: int, deadline: float) -> "EpochVerifierState":
        return cls(past_size_ds=2 * n_vertices, epoch_deadline=deadline)


@dataclass(frozen=True)
class TipContext:
    """What the verifier knows from its chain tip."""

    h_prev: Bits
    prev_instance_id: int
    lookup: Callable[[int], Optional[ProblemInstance]]


@dataclass(frozen=True)
class VerifyOutcome:
    accepted: bool
    reason: Optional[RejectReason] = None
    queries: int = 0

    def __bool__(self) -> bool:
        return self.accepted


@lru_cache(maxsize=8)
def _ranked_layout(graph_key, n: int):
    # cache key is the graph object itself (immutable, identity-hashed);
    # recomputing the ranking, prefix offsets and neighbor-slot maps per
    # block would dominate small epochs
    g = graph_key
    ranking = rank_vertices(g)
    rank_pos = [0] * (n + 1)
    offsets = [0] * (n + 1)
    acc = 0
    for i, r in enumerate(ranking, 1):
        rank_pos[r] = i
        offsets[i] = acc
        acc += g.degree[r]
    # slot_in[u][v]: 1-based position of v inside u's neighbor list
    slot_in = [None] * (n + 1)
    for u in range(1, n + 1):
        slot_in[u] = {v: l for l, v in enumerate(g.adjacency[u], 1)}
    return ranking, rank_pos, offsets, slot_in


@lru_cache(maxsize=64)
def _pattern_partners(n: int, delta_hat: int) -> dict[int, tuple[int, ...]]:
    spec = WAdjacencySpec.create(n, delta_hat)
    adj: dict[int, list[int]] = {}
    for a, b in bitseq.w_pairs(spec):
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    return {k: tuple(v) for k, v in adj.items()}


def check_coverage(graph: Graph, seed: Bits, delta_hat: int,
                   ds: tuple[int, ...]) -> tuple[bool, int]:
    """Does ds dominate the extended graph implied by (graph, seed)?

    Returns (ok, adjacency queries performed).  The mask is probed
    pointwise (the seed repeats with period 2*lambda, second half
    complemented), so no 2|E|-bit structure is ever materialised.
    """
    n = graph.n
    ranking, rank_pos, offsets, slot_in = _ranked_layout(graph, n)
    partners = _pattern_partners(n, delta_hat)
    lam = seed.length
    period = 2 * lam
    sbits = seed.to_array().tolist()
    visited = bytearray(2 * n + 1)
    left = 2 * n
    queries = 0

    for v in ds:
        if not 1 <= v <= 2 * n:
            return False, queries
        if not visited[v]:
            visited[v] = 1
            left -= 1
        if v <= n:
            adj_v = graph.adjacency[v]
            queries += len(adj_v)
            for u in adj_v:
                if not visited[u]:
                    visited[u] = 1
                    left -= 1
                # u's mirror partner may reach back to v through the mask
                i = rank_pos[u]
                j = (offsets[i] + slot_in[u][v] - 1) % period
                if (sbits[j] if j < lam else 1 - sbits[j - lam]):
                    w = n + i
                    if not visited[w]:
                        visited[w] = 1
                        left -= 1
        else:
            i = v - n
            base = offsets[i]
            adj_r = graph.adjacency[ranking[i - 1]]
            queries += len(adj_r)
            for l, u in enumerate(adj_r):
                j = (base + l) % period
                if (sbits[j] if j < lam else 1 - sbits[j - lam]) and not visited[u]:
                    visited[u] = 1
                    left -= 1
            mates = partners.get(i, ())
            queries += len(mates)
            for m in mates:
                w = n + m
                if not visited[w]:
                    visited[w] = 1
                    left -= 1
        if left == 0:
            return True, queries
    return left == 0, queries


def verify_block(block: Block, state: EpochVerifierState, ctx: TipContext,
                 now: float) -> VerifyOutcome:
    """Full acceptance check for one arriving block.

    On acceptance the epoch state is updated in place (best block and
    its size).  Rejection reasons follow the guard order: Merkle root,
    instance digest, committee signatures, lateness, instance id, strict
    improvement, then the coverage check.
    """
    h = block.header
    if merkle_digest(block.body, h.h_mr.length) != h.h_mr:
        return VerifyOutcome(False, RejectReason.BAD_MERKLE)
    inst = ctx.lookup(h.id_g)
    if inst is None or h.graph_digest != inst.digest \
            or inst.digest != graph_digest(inst.graph) \
            or h.delta_hat != 2 * inst.graph.delta:
        return VerifyOutcome(False, RejectReason.BAD_INSTANCE_DIGEST)
    if not verify_committee(inst, sigs=h.sigs):
        return VerifyOutcome(False, RejectReason.BAD_SIGNATURE)
    if now >= state.epoch_deadline:
        return VerifyOutcome(False, RejectReason.LATE)
    if h.id_g <= ctx.prev_instance_id:
        return VerifyOutcome(False, RejectReason.STALE_INSTANCE_ID)
    if len(h.ds) >= state.past_size_ds:
        return VerifyOutcome(False, RejectReason.NOT_BETTER)
    if h.h_prev != ctx.h_prev:
        # mined against a different parent: its mask seed cannot match
        # this epoch's extension, so the set cannot dominate it
        return VerifyOutcome(False, RejectReason.NOT_DOMINATING)
    seed = bitseq.derive_seed(ctx.h_prev, h.h_mr)
    ok, queries = check_coverage(inst.graph, seed, h.delta_hat, h.ds)
    if not ok:
        return VerifyOutcome(False, RejectReason.NOT_DOMINATING, queries)
    state.past_size_ds = len(h.ds)
    state.best_block = block
    return VerifyOutcome(True, None, queries)


def finalize_epoch(state: EpochVerifierState) -> Optional[Block]:
    """Commit the cached best block once the deadline has expired."""
    return state.best_block


# --- retrieval of the base-graph solution ---------------------------------------


def retrieve_ds_g(block: Block, inst: ProblemInstance) -> tuple[int, ...]:
    """Map the extended-graph set back to a dominating set of the base graph.

    Base-side members are kept (redundant ones pruned in ascending-id
    order); every base vertex still uncovered is covered through some
    mirror member, whose ranked partner is substituted in.
    """
    g = inst.graph
    n = g.n
    ranking, rank_pos, offsets, slot_in = _ranked_layout(g, n)
    seed = bitseq.derive_seed(block.header.h_prev, block.header.h_mr)
    v_ds = sorted(v for v in block.header.ds if v <= n)
    w_ds = set(v - n for v in block.header.ds if v > n)

    def closed(v: int):
        return (v, *g.adjacency[v])

    chosen = set(v_ds)
    cover_count = [0] * (n + 1)
    for v in chosen:
        for u in closed(v):
            cover_count[u] += 1
    for v in sorted(chosen):
        if all(cover_count[u] >= 2 for u in closed(v)):
            chosen.discard(v)
            for u in closed(v):
                cover_count[u] -= 1
    covered = set()
    for v in chosen:
        covered.update(closed(v))

    for u in range(1, n + 1):
        if u in covered:
            continue
        # smallest-ranked mirror member adjacent to u through the mask
        partner = None
        for nb in g.adjacency[u]:
            i = rank_pos[nb]
            if i not in w_ds:
                continue
            if bitseq.mask_bit(seed, offsets[i] + slot_in[nb][u]):
                if partner is None or rank_pos[nb] < rank_pos[partner]:
                    partner = nb
        if partner is None:
            raise NotDominatingG(f"base vertex {u} unreachable from the claimed set")
        chosen.add(partner)
        covered.update(closed(partner))

    if any(u not in covered for u in range(1, n + 1)):
        raise NotDominatingG("pruned set lost coverage")  # pragma: no cover
    return tuple(sorted(chosen))
