"""Synchronous-round multi-miner simulation with scripted adversaries.

Time is logical (ticks).  Each epoch: the instance is announced at tick
0, miners mine under per-miner tick budgets and submit with seeded
jitter, messages reach every node within delta_net ticks, and every node
runs the same strict-improvement arbitration over submissions ordered by
(timestamp, miner).  Honest miners stop early enough that their blocks
reach everyone before the epoch deadline, which is what makes the
synchronous model give byte-identical commits across nodes.

Miners differ only in coinbase payload and solver seed; that is what
makes each miner's extension distinct.  Adversaries are scenario
scripts, not strategies.
"""

from __future__ import annotations

import dataclasses
import json
import random
from dataclasses import dataclass, field

from .bitseq import Bits
from .chain import ChainView, select_chain, work_done
from .errors import MiningAbort, UnknownScenario
from .graphs import Graph, erdos_renyi
from .ledger import (
    Block,
    BlockHeader,
    CommitteeSigner,
    ProblemInstance,
    Transaction,
    TransactionSet,
    block_hash,
    generate_committee,
    genesis_block,
    make_instance,
    merkle_digest,
)
from .mining import (
    MiningPolicy,
    TickClock,
    greedy_ds,
    mine_block,
    single_greedy_solver,
)
from .transform import extend
from .verification import (
    EpochVerifierState,
    TipContext,
    finalize_epoch,
    verify_block,
)

SCENARIOS = (
    "honest",
    "tie",
    "forged_instance",
    "stale_id",
    "fork_work",
    "selfish_fork",
)


@dataclass(frozen=True)
class SimConfig:
    miners: int = 3
    epochs: int = 5
    delta_net: int = 2
    f: int = 2
    l: float = 2.0
    lam: int = 256
    tmax_ticks: int = 64
    n_vertices: int = 48
    avg_degree: float = 6.0
    seed: int = 0
    budgets: tuple | None = None  # per-miner mining tick budgets

    def budget_for(self, miner: int) -> int:
        default = self.tmax_ticks - self.delta_net - 1
        if self.budgets is None:
            return default
        return min(self.budgets[miner], default)


@dataclass
class SimReport:
    scenario: str
    seed: int
    miners: int
    params: dict
    epochs: list = field(default_factory=list)
    fork_events: list = field(default_factory=list)
    chain_instance_ids: list = field(default_factory=list)
    chain_height: int = 0
    total_work: float = 0.0
    ok: bool = True

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "miners": self.miners,
            "params": self.params,
            "epochs": self.epochs,
            "fork_events": self.fork_events,
            "chain_instance_ids": self.chain_instance_ids,
            "chain_height": self.chain_height,
            "total_work": self.total_work,
            "ok": self.ok,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def _tick_solver(base=single_greedy_solver, cost: int = 1):
    """Wrap a solver so each pass consumes logical time."""

    def solver(eg, budget, clock):
        for ds in base(eg, budget, clock):
            clock.advance(cost)
            yield ds

    return solver


def _fresh_report(name: str, cfg: SimConfig) -> SimReport:
    return SimReport(
        scenario=name,
        seed=cfg.seed,
        miners=cfg.miners,
        params={
            "delta_net": cfg.delta_net,
            "f": cfg.f,
            "l": cfg.l,
            "lambda": cfg.lam,
            "tmax_ticks": cfg.tmax_ticks,
            "n_vertices": cfg.n_vertices,
            "avg_degree": cfg.avg_degree,
            "epochs": cfg.epochs,
        },
    )


def _make_instances(cfg: SimConfig, signer: CommitteeSigner,
                    count: int, start_id: int = 1) -> list[ProblemInstance]:
    p = min(1.0, cfg.avg_degree / max(cfg.n_vertices - 1, 1))
    out = []
    for i in range(count):
        g = erdos_renyi(cfg.n_vertices, p, seed=cfg.seed * 7919 + i)
        out.append(make_instance(g, start_id + i, signer))
    return out


def _coinbase_txs(cfg: SimConfig, epoch: int, miner: int) -> TransactionSet:
    coinbase = Transaction(f"coinbase:{cfg.seed}:{epoch}:m{miner}".encode(), fee=1)
    reward = Transaction(f"utility-reward:{epoch}".encode(), fee=0)
    return TransactionSet(coinbase, (reward,))


def mine_submissions(cfg: SimConfig, inst: ProblemInstance, tip_hash: Bits,
                     prev_id: int, epoch: int, rng: random.Random):
    """All miners attempt the epoch; returns submissions and abort records."""
    submissions = []
    aborts = []
    for miner in range(cfg.miners):
        jitter = 1 + rng.randrange(4)
        budget = cfg.budget_for(miner)
        clock = TickClock()
        policy = MiningPolicy(deadline=budget, clock=clock, prev_instance_id=prev_id)
        try:
            block = mine_block(inst, _coinbase_txs(cfg, epoch, miner), tip_hash,
                               policy, solver=_tick_solver())
        except MiningAbort as exc:
            aborts.append({"miner": miner, "error": type(exc).__name__})
            continue
        tick = min(jitter + int(clock.now()), cfg.tmax_ticks - cfg.delta_net - 1)
        submissions.append((tick, miner, block))
    submissions.sort(key=lambda s: (s[0], s[1]))
    return submissions, aborts


def arbitrate(cfg: SimConfig, inst: ProblemInstance, node_chain: ChainView,
              node: int, submissions, registry, rng_delays) -> tuple[Block | None, list]:
    """One node's epoch: verify arrivals in timestamp order, commit at expiry."""
    state = EpochVerifierState.fresh(inst.graph.n, deadline=cfg.tmax_ticks)
    ctx = TipContext(
        h_prev=node_chain.tip_hash(cfg.lam),
        prev_instance_id=node_chain.tip_instance_id,
        lookup=registry.get,
    )
    outcomes = []
    for tick, miner, block in submissions:
        arrival = tick + rng_delays[(node, miner)]
        out = verify_block(block, state, ctx, now=arrival)
        outcomes.append(
            {
                "miner": miner,
                "tick": tick,
                "size": len(block.header.ds),
                "outcome": "accept" if out.accepted else "reject",
                "reason": None if out.accepted else out.reason.value,
            }
        )
    return finalize_epoch(state), outcomes


def run_epoch(cfg: SimConfig, chains: list[ChainView], inst: ProblemInstance,
              epoch: int, registry, rng: random.Random,
              extra_submissions=None) -> tuple[Block | None, dict]:
    """Mine, broadcast, arbitrate and (on success) append at every node.

    ``extra_submissions`` lets scenarios inject scripted (tick, miner,
    block) triples, e.g. late or forged blocks.
    """
    tip_hash = chains[0].tip_hash(cfg.lam)
    prev_id = chains[0].tip_instance_id
    submissions, aborts = mine_submissions(cfg, inst, tip_hash, prev_id, epoch, rng)
    if extra_submissions:
        submissions = sorted(
            submissions + list(extra_submissions), key=lambda s: (s[0], s[1])
        )
    delays = {
        (node, miner): rng.randrange(cfg.delta_net + 1)
        for node in range(len(chains))
        for miner in {s[1] for s in submissions}
    }
    committed = []
    node_outcomes = []
    for node, chain_view in enumerate(chains):
        block, outcomes = arbitrate(cfg, inst, chain_view, node, submissions,
                                    registry, delays)
        committed.append(block)
        node_outcomes.append(outcomes)
    agree = all(b == committed[0] for b in committed)
    winner = committed[0]
    if winner is not None and agree:
        for chain_view in chains:
            chain_view.append(winner, inst)
    winner_miner = None
    winner_tick = None
    for tick, miner, block in submissions:
        if winner is not None and block == winner:
            winner_miner = miner
            winner_tick = tick
            break
    record = {
        "epoch": epoch,
        "instance_id": inst.id_g,
        "submissions": node_outcomes[0],
        "aborts": aborts,
        "winner_miner": winner_miner,
        "winner_size": None if winner is None else len(winner.header.ds),
        "winner_tick": winner_tick,
        "commit_latency": None if winner_tick is None else cfg.tmax_ticks - winner_tick,
        "agree": agree,
    }
    return (winner if agree else None), record


# --- scripted building blocks --------------------------------------------------


def script_block(prev: Block, inst: ProblemInstance, ds, lam: int,
                 timestamp_ms: int = 0, tag: str = "script") -> Block:
    """Assemble a block directly (no mining guards); scenario tooling."""
    body = TransactionSet(Transaction(f"{tag}:{inst.id_g}".encode()))
    header = BlockHeader(
        h_prev=block_hash(prev, lam),
        h_mr=merkle_digest(body, lam),
        id_g=inst.id_g,
        graph_digest=inst.digest,
        sigs=inst.sigs,
        delta_hat=2 * inst.graph.delta,
        ds=tuple(ds),
        timestamp_ms=timestamp_ms,
    )
    return Block(header, body)


def forge_block(inst: ProblemInstance, txs: TransactionSet, h_prev: Bits,
                lam: int, timestamp_ms: int = 0) -> Block:
    """Mine without guards: used to exercise verifier-side rejection."""
    h_mr = merkle_digest(txs, lam)
    eg = extend(inst.graph, h_prev, h_mr)
    ds = greedy_ds(eg)
    header = BlockHeader(
        h_prev=h_prev,
        h_mr=h_mr,
        id_g=inst.id_g,
        graph_digest=inst.digest,
        sigs=inst.sigs,
        delta_hat=2 * inst.graph.delta,
        ds=ds.vertices,
        timestamp_ms=timestamp_ms,
    )
    return Block(header, txs)


def ring_with_chords(n: int = 100, m: int = 300) -> Graph:
    """Deterministic graph with exactly n vertices, m edges, min degree 2.

    A cycle plus chords that never touch vertex 1, so vertex 1 pins the
    minimum degree at 2.
    """
    edges = [(i, i + 1) for i in range(1, n)] + [(1, n)]
    extra = m - n
    if extra < 0:
        raise ValueError("need m >= n for the cycle")
    k = 2
    while extra > 0:
        added = False
        for i in range(2, n - k + 1):
            edges.append((i, i + k))
            extra -= 1
            added = True
            if extra == 0:
                break
        if not added:
            raise ValueError("cannot place enough chords")
        k += 1
    return Graph.from_edges(n, edges)


# --- scenarios -------------------------------------------------------------------


def _setup(cfg: SimConfig):
    signer = generate_committee(4, 3, seed=cfg.seed)
    genesis = genesis_block(cfg.lam)
    chains = [ChainView.new(genesis, cfg.f) for _ in range(cfg.miners)]
    return signer, genesis, chains


def _scenario_honest(cfg: SimConfig) -> SimReport:
    report = _fresh_report("honest", cfg)
    signer, _, chains = _setup(cfg)
    instances = _make_instances(cfg, signer, cfg.epochs)
    registry = {inst.id_g: inst for inst in instances}
    rng = random.Random(f"honest:{cfg.seed}")
    for epoch, inst in enumerate(instances):
        committed, record = run_epoch(cfg, chains, inst, epoch, registry, rng)
        report.epochs.append(record)
        if committed is None or not record["agree"]:
            report.ok = False
    ids = [e.block.header.id_g for e in chains[0].entries[1:]]
    if ids != sorted(ids) or len(set(ids)) != len(ids):
        report.ok = False
    report.chain_instance_ids = ids
    report.chain_height = chains[0].tip_height
    report.total_work = sum(e.work for e in chains[0].entries)
    return report


def _pad_ds(block: Block, n_t: int, target: int) -> Block:
    """Enlarge the block's set to ``target`` vertices (supersets of a
    dominating set still dominate); keeps the body and Merkle root."""
    ds = list(block.header.ds)
    have = set(ds)
    for v in range(1, n_t + 1):
        if len(ds) >= target:
            break
        if v not in have:
            ds.append(v)
    h = block.header
    header = BlockHeader(
        h_prev=h.h_prev, h_mr=h.h_mr, id_g=h.id_g, graph_digest=h.graph_digest,
        sigs=h.sigs, delta_hat=h.delta_hat, ds=tuple(sorted(ds)),
        timestamp_ms=h.timestamp_ms,
    )
    return Block(header, block.body)


def _scenario_tie(cfg: SimConfig) -> SimReport:
    cfg = dataclasses.replace(cfg, miners=max(cfg.miners, 2))
    report = _fresh_report("tie", cfg)
    signer, _, chains = _setup(cfg)
    inst = _make_instances(cfg, signer, 1)[0]
    registry = {inst.id_g: inst}
    rng = random.Random(f"tie:{cfg.seed}")
    tip_hash = chains[0].tip_hash(cfg.lam)
    budget = cfg.tmax_ticks - cfg.delta_net - 1
    blocks = []
    for miner in range(2):
        policy = MiningPolicy(deadline=budget, clock=TickClock(),
                              prev_instance_id=0)
        blocks.append(
            mine_block(inst, _coinbase_txs(cfg, 0, miner), tip_hash, policy,
                       solver=_tick_solver())
        )
    target = max(len(b.header.ds) for b in blocks)
    padded = [_pad_ds(b, 2 * inst.graph.n, target) for b in blocks]
    submissions = [(2, 0, padded[0]), (4, 1, padded[1])]
    # zero budgets mute organic mining; only the scripted pair competes
    muted = dataclasses.replace(cfg, budgets=(0,) * cfg.miners)
    committed, record = run_epoch(muted, chains, inst, 0, registry, rng,
                                  extra_submissions=submissions)
    report.epochs.append(record)
    report.ok = (
        committed == padded[0]
        and record["agree"]
        and record["winner_tick"] == 2
        and record["winner_size"] == target
    )
    report.chain_instance_ids = [inst.id_g] if committed else []
    report.chain_height = chains[0].tip_height
    return report


def _scenario_forged_instance(cfg: SimConfig) -> SimReport:
    report = _fresh_report("forged_instance", cfg)
    signer, _, chains = _setup(cfg)
    good = _make_instances(cfg, signer, 1)[0]
    # same graph, but signed below threshold
    forged = make_instance(good.graph, 1, signer, signer_indices=(0, 1))
    registry = {forged.id_g: forged}
    rng = random.Random(f"forged:{cfg.seed}")
    adversary = forge_block(forged, _coinbase_txs(cfg, 0, 99), chains[0].tip_hash(cfg.lam),
                            cfg.lam)
    committed, record = run_epoch(cfg, chains, forged, 0, registry, rng,
                                  extra_submissions=[(1, 99, adversary)])
    report.epochs.append(record)
    rejected = [s for s in record["submissions"] if s["miner"] == 99]
    report.ok = (
        committed is None
        and all(a["error"] == "AbortBadInstance" for a in record["aborts"])
        and len(record["aborts"]) == cfg.miners
        and rejected
        and all(s["reason"] == "BadSignature" for s in rejected)
    )
    report.chain_height = chains[0].tip_height
    return report


def _mined_chain(cfg: SimConfig, chains: list[ChainView], instances, registry,
                 rng) -> list[dict]:
    records = []
    for epoch, inst in enumerate(instances):
        committed, record = run_epoch(cfg, chains, inst, epoch, registry, rng)
        records.append(record)
    return records


def _scenario_stale_id(cfg: SimConfig) -> SimReport:
    report = _fresh_report("stale_id", cfg)
    signer, _, chains = _setup(cfg)
    instances = _make_instances(cfg, signer, 2)
    registry = {inst.id_g: inst for inst in instances}
    rng = random.Random(f"stale:{cfg.seed}")
    report.epochs = _mined_chain(cfg, chains, instances, registry, rng)
    # candidate chain replays instance id 1 on top of the block that
    # already solved it
    honest = chains[0]
    candidate = ChainView(honest.entries[:2].copy(), cfg.f)
    replay = script_block(candidate.tip.block, instances[0],
                          ds=range(1, instances[0].graph.n + 1), lam=cfg.lam)
    candidate.append(replay, instances[0])
    ok = True
    for node, chain_view in enumerate(chains):
        adopted, trace = select_chain(chain_view, candidate, tie_seed=cfg.seed)
        report.fork_events.append({"node": node, "trace": trace})
        if adopted is not chain_view:
            ok = False
    report.ok = ok and all(r["agree"] for r in report.epochs)
    report.chain_instance_ids = [e.block.header.id_g for e in honest.entries[1:]]
    report.chain_height = honest.tip_height
    return report


def _scenario_fork_work(cfg: SimConfig) -> SimReport:
    report = _fresh_report("fork_work", cfg)
    signer, genesis, chains = _setup(cfg)
    work_graph = ring_with_chords(100, 300)
    inst1 = make_instance(work_graph, 1, signer)
    inst2 = make_instance(work_graph, 2, signer)
    registry = {1: inst1, 2: inst2}
    b1 = script_block(genesis, inst1, ds=range(1, 111), lam=cfg.lam, tag="base")
    for chain_view in chains:
        chain_view.append(b1, inst1)
    block_a = script_block(b1, inst2, ds=range(1, 101), lam=cfg.lam, tag="forkA")
    block_b = script_block(b1, inst2, ds=range(1, 121), lam=cfg.lam, tag="forkB")
    cand_a = ChainView(chains[0].entries.copy(), cfg.f)
    cand_a.append(block_a, inst2)
    cand_b = ChainView(chains[0].entries.copy(), cfg.f)
    cand_b.append(block_b, inst2)
    works = {"ds100": work_done(block_a, inst2), "ds120": work_done(block_b, inst2)}
    ok = True
    for node, chain_view in enumerate(chains):
        order = [cand_a, cand_b] if (node + cfg.seed) % 2 == 0 else [cand_b, cand_a]
        current = chain_view
        traces = []
        for cand in order:
            current, trace = select_chain(current, cand, tie_seed=cfg.seed)
            traces.append(trace)
        chains[node] = current
        adopted_tip = current.tip.block
        report.fork_events.append(
            {"node": node, "traces": traces,
             "adopted_ds_size": len(adopted_tip.header.ds)}
        )
        if adopted_tip != block_a:
            ok = False
    report.ok = ok
    report.fork_events.append({"works": works})
    report.chain_height = chains[0].tip_height
    report.chain_instance_ids = [e.block.header.id_g for e in chains[0].entries[1:]]
    report.total_work = sum(e.work for e in chains[0].entries)
    return report


def _scenario_selfish_fork(cfg: SimConfig) -> SimReport:
    report = _fresh_report("selfish_fork", cfg)
    signer, genesis, chains = _setup(cfg)
    rng = random.Random(f"selfish:{cfg.seed}")
    work_graph = ring_with_chords(60, 120)
    # enough honest blocks that heights strictly before the checkpoint exist
    honest_insts = [make_instance(work_graph, i, signer)
                    for i in range(1, cfg.f + 5)]
    honest = chains[0]
    for inst in honest_insts:
        honest.append(script_block(honest.tip.block, inst,
                                   ds=range(1, 31), lam=cfg.lam, tag="honest"),
                      inst)
    for chain_view in chains[1:]:
        chain_view.entries = list(honest.entries)
    checkpoint = honest.last_checkpoint_height
    fork_at = rng.choice(range(0, checkpoint))
    private = ChainView(honest.entries[: fork_at + 1].copy(), cfg.f)
    for j in range(6):
        inst = make_instance(work_graph, 100 + j, signer)
        # tiny sets give the private chain far more work than the honest one
        private.append(script_block(private.tip.block, inst,
                                    ds=range(1, 4), lam=cfg.lam, tag="private"),
                       inst)
    ok = True
    for node, chain_view in enumerate(chains):
        adopted, trace = select_chain(chain_view, private, tie_seed=cfg.seed)
        report.fork_events.append({"node": node, "fork_at": fork_at, "trace": trace})
        if adopted is not chain_view:
            ok = False
    report.ok = ok
    report.chain_height = honest.tip_height
    report.chain_instance_ids = [e.block.header.id_g for e in honest.entries[1:]]
    return report


def run_scenario(name: str, miners: int = 3, seed: int = 0,
                 **overrides) -> SimReport:
    """Run one named scenario and return its deterministic report."""
    if name not in SCENARIOS:
        raise UnknownScenario(f"unknown scenario {name!r}; choose from {SCENARIOS}")
    cfg = SimConfig(miners=miners, seed=seed, **overrides)
    runner = {
        "honest": _scenario_honest,
        "tie": _scenario_tie,
        "forged_instance": _scenario_forged_instance,
        "stale_id": _scenario_stale_id,
        "fork_work": _scenario_fork_work,
        "selfish_fork": _scenario_selfish_fork,
    }[name]
    return runner(cfg)
