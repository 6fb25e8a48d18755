"""Work-done weights, checkpointing, and fork choice.

A block's work is the extended instance size (edge count times vertex
count) scaled by how far the achieved set beats the expected permissible
size: smaller sets mean more work.  Fork choice compares post-fork
suffix work, never reorganises past the last checkpointed block, and
breaks exact ties with an injected seed so simulations replay.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .bitseq import Bits
from .errors import HeightOutOfRange, IncompatibleGenesis
from .ledger import (
    Block,
    ProblemInstance,
    block_from_json,
    block_hash,
    block_to_json,
    graph_digest,
    instance_from_json,
    instance_to_json,
    verify_committee,
)


def expected_ds_bound(n: int, delta: int) -> float:
    """Expected permissible size for the extended graph: the doubled vertex
    count under the expectation that extension lifts the min degree to 1.5x."""
    lifted = 1 + 1.5 * delta
    return 2 * n * (1 + math.log(lifted)) / lifted


def work_done(block: Block, inst: ProblemInstance) -> float:
    """(2|E| + delta_hat*(n-1)/2) * n * expected_bound / |DS|."""
    g = inst.graph
    e_t = 2 * g.m + block.header.delta_hat * (g.n - 1) / 2
    return e_t * g.n * (expected_ds_bound(g.n, g.delta) / len(block.header.ds))


@dataclass(frozen=True)
class ChainEntry:
    block: Block
    instance: Optional[ProblemInstance]
    work: float


@dataclass
class ChainView:
    """Block sequence from genesis with per-block work cached."""

    entries: list[ChainEntry]
    f: int

    @classmethod
    def new(cls, genesis: Block, f: int) -> "ChainView":
        return cls([ChainEntry(genesis, None, 0.0)], f)

    @property
    def tip(self) -> ChainEntry:
        return self.entries[-1]

    @property
    def tip_height(self) -> int:
        return len(self.entries) - 1

    def tip_hash(self, lam: int | None = None) -> Bits:
        return block_hash(self.tip.block, lam)

    @property
    def tip_instance_id(self) -> int:
        return self.tip.block.header.id_g

    def append(self, block: Block, inst: ProblemInstance) -> None:
        self.entries.append(ChainEntry(block, inst, work_done(block, inst)))

    @property
    def last_checkpoint_height(self) -> int:
        return max(self.tip_height - self.f, 0)

    def suffix_work(self, after_height: int) -> float:
        return sum(e.work for e in self.entries[after_height + 1:])

    def copy(self) -> "ChainView":
        return ChainView(list(self.entries), self.f)

    def to_json(self) -> dict:
        out = []
        for e in self.entries:
            item = {"block": block_to_json(e.block)}
            if e.instance is not None:
                item["instance"] = instance_to_json(e.instance, include_graph=True)
            out.append(item)
        return {"f": self.f, "entries": out}

    @classmethod
    def from_json(cls, obj: dict) -> "ChainView":
        entries = []
        for item in obj["entries"]:
            block = block_from_json(item["block"])
            inst = (
                instance_from_json(item["instance"]) if "instance" in item else None
            )
            work = work_done(block, inst) if inst is not None else 0.0
            entries.append(ChainEntry(block, inst, work))
        return cls(entries, int(obj["f"]))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), sort_keys=True) + "\n")

    @classmethod
    def load(cls, path) -> "ChainView":
        return cls.from_json(json.loads(Path(path).read_text()))


def is_checkpointed(chain: ChainView, height: int) -> bool:
    """At least f confirmations; everything at or below the last
    checkpointed block counts."""
    if not 0 <= height <= chain.tip_height:
        raise HeightOutOfRange(f"height {height} outside 0..{chain.tip_height}")
    return chain.tip_height - height >= chain.f


def validate_chain(chain: ChainView) -> tuple[bool, str]:
    """Structural validity: linkage, strictly increasing instance ids,
    committee signatures, digest match (fork-choice rule on block data)."""
    prev_id = chain.entries[0].block.header.id_g
    for height in range(1, len(chain.entries)):
        entry = chain.entries[height]
        h = entry.block.header
        prev_block = chain.entries[height - 1].block
        if h.h_prev != block_hash(prev_block, h.h_prev.length):
            return False, f"height {height}: broken hash linkage"
        if h.id_g <= prev_id:
            return False, f"height {height}: instance id {h.id_g} not above {prev_id}"
        inst = entry.instance
        if inst is None:
            return False, f"height {height}: no instance recorded"
        if inst.id_g != h.id_g or h.graph_digest != inst.digest \
                or inst.digest != graph_digest(inst.graph):
            return False, f"height {height}: graph digest mismatch"
        if not verify_committee(inst, sigs=h.sigs):
            return False, f"height {height}: committee signature invalid"
        prev_id = h.id_g
    return True, "ok"


def fork_height(current: ChainView, candidate: ChainView) -> int:
    """Height of the deepest common block."""
    if current.entries[0].block != candidate.entries[0].block:
        raise IncompatibleGenesis("chains do not share a genesis block")
    top = min(current.tip_height, candidate.tip_height)
    h = 0
    while h + 1 <= top and current.entries[h + 1].block == candidate.entries[h + 1].block:
        h += 1
    return h


def select_chain(current: ChainView, candidate: ChainView,
                 tie_seed: int = 0) -> tuple[ChainView, list[str]]:
    """Fork-choice between the adopted chain and a candidate.

    Returns the chain to adopt plus a human-readable decision trace.
    Ordered rules: candidate structural validity; no reorganisation past
    the last checkpoint; length floor for forks at the checkpoint;
    otherwise highest post-fork suffix work with seeded random ties.
    """
    trace: list[str] = []
    ok, why = validate_chain(candidate)
    if not ok:
        trace.append(f"rule(i): candidate invalid ({why}); kept current")
        return current, trace
    fork = fork_height(current, candidate)
    checkpoint = current.last_checkpoint_height
    trace.append(f"fork at height {fork}; last checkpoint at {checkpoint}")
    if fork < checkpoint:
        trace.append("rule(iii): fork precedes last checkpointed block; discarded")
        return current, trace
    if fork == checkpoint:
        cand_len = candidate.tip_height - fork
        cur_len = current.tip_height - fork
        if cand_len < current.f:
            trace.append(
                f"rule(iii)(a): candidate suffix {cand_len} shorter than f={current.f}; discarded"
            )
            return current, trace
        if cur_len < current.f:
            trace.append(
                f"rule(iii)(a): current suffix {cur_len} shorter than f={current.f}; adopted candidate"
            )
            return candidate, trace
    w_cur = current.suffix_work(fork)
    w_cand = candidate.suffix_work(fork)
    trace.append(f"suffix work: current {w_cur:.6g} vs candidate {w_cand:.6g}")
    if w_cand > w_cur:
        trace.append("rule(iii)(b): candidate has higher work; adopted")
        return candidate, trace
    if w_cand < w_cur:
        trace.append("rule(iii)(b): current has higher work; kept")
        return current, trace
    pick = random.Random(f"tie:{tie_seed}").choice([0, 1])
    chosen = current if pick == 0 else candidate
    trace.append(f"exact tie; seeded coin chose {'current' if pick == 0 else 'candidate'}")
    return chosen, trace
