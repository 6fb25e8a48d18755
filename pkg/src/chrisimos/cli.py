"""Command-line entry point exposing every pipeline stage.

Exit codes: 0 success, 1 domain rejection (e.g. a block fails
verification), 2 usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import bitseq, timing
from ._kernels import greedy_cover_native, greedy_cover_pure, implementation
from .bitseq import Bits, WAdjacencySpec
from .chain import ChainView, select_chain
from .errors import ChrisimosError, MiningAbort
from .graphs import generate_graph, load_graph, save_graph
from .ledger import (
    block_to_json,
    deserialize_block,
    generate_committee,
    load_committee,
    load_instance,
    make_instance,
    save_committee,
    save_instance,
    serialize_block,
    Transaction,
    TransactionSet,
)
from .mining import MiningPolicy, WallClock, brute_min_ds, greedy_ds, mine_block
from .params import resolve_params
from .simnet import SCENARIOS, run_scenario
from .timing import LookupTable, estimate_tmax
from .transform import compute_bound, extend, neighbors_t
from .verification import (
    EpochVerifierState,
    TipContext,
    retrieve_ds_g,
    verify_block,
)


def _bits_from_hex(s: str, lam: int) -> Bits:
    return Bits.from_bytes_right(bytes.fromhex(s), lam)


def _load_instance_pair(args):
    graph = load_graph(args.graph)
    return load_instance(args.instance, graph)


def _emit(args, payload: dict, text: str) -> None:
    if getattr(args, "format", "text") == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


# --- subcommand handlers ------------------------------------------------------


def cmd_keygen(args) -> int:
    signer = generate_committee(args.members, args.threshold, args.seed)
    save_committee(signer, args.out)
    print(f"wrote committee keys ({args.members} members, t={args.threshold}) to {args.out}")
    return 0


def cmd_gen_graph(args) -> int:
    kwargs = {}
    if args.model == "barabasi_albert":
        kwargs["m_attach"] = args.m_attach
    else:
        kwargs["p_edge"] = args.p_edge
    g = generate_graph(args.model, args.n, args.seed, **kwargs)
    save_graph(g, args.out)
    print(f"wrote {args.model} graph n={g.n} m={g.m} delta={g.delta} to {args.out}")
    if args.instance_out:
        if not args.sign_keys:
            print("--instance-out requires --sign-keys", file=sys.stderr)
            return 2
        signer = load_committee(args.sign_keys)
        inst = make_instance(g, args.id_g, signer)
        save_instance(inst, args.instance_out)
        print(f"wrote signed instance id={args.id_g} to {args.instance_out}")
    return 0


def cmd_extend(args) -> int:
    params = resolve_params(args.config, lam=args.lam)
    g = load_graph(args.graph)
    h_prev = _bits_from_hex(args.prev_hash, params.lam)
    h_mr = _bits_from_hex(args.merkle, params.lam)
    eg = extend(g, h_prev, h_mr)
    seed = eg.seed
    print(f"seed S = {seed}" if params.lam <= 64 else f"seed S = {seed.to_bytes().hex()}")
    two_e = 2 * g.m
    if two_e <= args.dump_limit:
        print(f"edge mask L = {bitseq.expand_mask(seed, two_e)}")
    print(f"mask one-positions: {bitseq.ones_indices(seed, two_e)[:args.dump_limit]}")
    print(f"mirror pattern one-positions: {bitseq.w_ones_indices(eg.w_spec)[:args.dump_limit]}")
    print(f"|V_T|={eg.n_t} |E_T|={eg.edge_count} delta_T={eg.delta_t}")
    if eg.n_t <= args.dump_limit:
        for v in range(1, eg.n_t + 1):
            print(f"  {v}: {list(neighbors_t(eg, v))}")
    return 0


def cmd_solve(args) -> int:
    g = load_graph(args.graph)
    ds = brute_min_ds(g) if args.exact else greedy_ds(g)
    bound = compute_bound(g.n, g.delta)
    payload = {
        "vertices": list(ds.vertices),
        "size": ds.size,
        "bound": bound,
        "method": "exact" if args.exact else "greedy",
    }
    _emit(args, payload, f"size={ds.size} bound={bound:.4f}\n{' '.join(map(str, ds.vertices))}")
    return 0


def cmd_mine(args) -> int:
    params = resolve_params(args.config, lam=args.lam)
    inst = _load_instance_pair(args)
    h_prev = _bits_from_hex(args.prev_hash, params.lam)
    coinbase = Transaction(args.coinbase.encode(), fee=1)
    txs = TransactionSet(coinbase)
    policy = MiningPolicy(
        deadline=args.budget, clock=WallClock(), prev_instance_id=args.prev_id
    )
    try:
        block = mine_block(inst, txs, h_prev, policy)
    except MiningAbort as exc:
        print(f"Abort({type(exc).__name__}): {exc}")
        return 1
    Path(args.out).write_bytes(serialize_block(block) + b"\n")
    print(f"mined block: |DS|={len(block.header.ds)} -> {args.out}")
    return 0


def cmd_verify(args) -> int:
    params = resolve_params(args.config, lam=args.lam)
    inst = _load_instance_pair(args)
    block = deserialize_block(Path(args.block).read_bytes())
    h_prev = _bits_from_hex(args.prev_hash, params.lam)
    deadline = args.tmax if args.tmax is not None else math.inf
    state = EpochVerifierState.fresh(inst.graph.n, deadline)
    if args.past_size is not None:
        state.past_size_ds = args.past_size
    ctx = TipContext(
        h_prev=h_prev,
        prev_instance_id=args.prev_id,
        lookup={inst.id_g: inst}.get,
    )
    outcome = verify_block(block, state, ctx, now=args.now)
    if outcome.accepted:
        print("Accept")
        return 0
    print(f"Reject({outcome.reason.value})")
    return 1


def cmd_retrieve(args) -> int:
    inst = _load_instance_pair(args)
    block = deserialize_block(Path(args.block).read_bytes())
    ds_g = retrieve_ds_g(block, inst)
    payload = {"vertices": list(ds_g), "size": len(ds_g)}
    _emit(args, payload, " ".join(map(str, ds_g)))
    return 0


def _bench_impls(choice: str):
    impls = []
    if choice in ("auto", "both", "native") and greedy_cover_native is not None:
        impls.append(("native", greedy_cover_native))
    if choice in ("both", "pure") or (choice == "auto" and not impls):
        impls.append(("pure", greedy_cover_pure))
    if choice == "native" and greedy_cover_native is None:
        raise ChrisimosError("native kernel not built")
    return impls


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s]
    rows = []
    table_entries = []
    for n in sizes:
        g = generate_graph("barabasi_albert", n, args.seed, m_attach=args.m_attach)
        for name, kernel in _bench_impls(args.impl):
            gens, vers = [], []
            for rep in range(args.repeats):
                h_prev = bitseq.hash_bits(f"bench:{args.seed}:{rep}".encode(), 256)
                h_mr = bitseq.hash_bits(f"bench-mr:{args.seed}:{rep}".encode(), 256)
                t0 = time.perf_counter()
                eg = extend(g, h_prev, h_mr)
                indptr, indices = eg.adjacency
                chosen = kernel(indptr, indices, eg.n_t)
                gen = time.perf_counter() - t0
                from .verification import check_coverage

                t0 = time.perf_counter()
                ok, _ = check_coverage(g, eg.seed, eg.w_spec.delta_hat,
                                       tuple(sorted(int(v) for v in chosen)))
                ver = time.perf_counter() - t0
                if not ok:
                    raise ChrisimosError("bench solution failed verification")
                gens.append(gen)
                vers.append(ver)
            gen_t, ver_t = min(gens), min(vers)
            rows.append((n, eg.edge_count, name, gen_t, ver_t, gen_t / ver_t))
            if name == implementation():
                table_entries.append((n, g.m, g.delta, gen_t + ver_t))
    lines = ["n,e_t,impl,gen_time,verify_time,ratio"]
    lines += [f"{n},{et},{name},{g:.6f},{v:.6f},{r:.3f}" for n, et, name, g, v, r in rows]
    text = "\n".join(lines)
    if args.out:
        Path(args.out).write_text(text + "\n")
        print(f"wrote bench report to {args.out}")
    else:
        print(text)
    if args.table_out:
        table = LookupTable(
            [timing.LookupEntry(n, m, d, tau) for n, m, d, tau in table_entries],
            timing.hardware_tag(),
        )
        table.save(args.table_out)
        print(f"wrote lookup table to {args.table_out}")
    return 0


def cmd_estimate(args) -> int:
    table = LookupTable.load(args.table)
    tmax = estimate_tmax(table, args.n, args.m, args.delta, args.l)
    print(f"{tmax:.6f}")
    return 0


def cmd_chain_select(args) -> int:
    current = ChainView.load(args.current)
    candidate = ChainView.load(args.candidate)
    adopted, trace = select_chain(current, candidate, tie_seed=args.tie_seed)
    for line in trace:
        print(line)
    which = "candidate" if adopted is candidate else "current"
    print(f"adopted: {which}")
    if args.out:
        adopted.save(args.out)
    return 0


def cmd_simulate(args) -> int:
    report = run_scenario(args.scenario, miners=args.miners, seed=args.seed,
                          epochs=args.epochs)
    payload = report.to_json()
    if args.out:
        Path(args.out).write_text(payload + "\n")
        print(f"wrote report to {args.out}")
    print(f"scenario={report.scenario} ok={report.ok} height={report.chain_height}")
    return 0 if report.ok else 1


# --- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chrisimos",
        description="Useful-PoW lab: dominating-set mining over signed graph instances",
    )
    parser.add_argument("--config", help="key=value config file (or CHRISIMOS_CONFIG)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="generate a committee key file")
    p.add_argument("--members", type=int, default=4)
    p.add_argument("--threshold", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("gen-graph", help="generate a synthetic graph instance")
    p.add_argument("--model", choices=["barabasi_albert", "erdos_renyi"],
                   default="barabasi_albert")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m-attach", type=int, default=4)
    p.add_argument("--p-edge", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--sign-keys", help="committee key file; enables --instance-out")
    p.add_argument("--id-g", type=int, default=1)
    p.add_argument("--instance-out", help="write a signed instance sidecar JSON")
    p.set_defaults(func=cmd_gen_graph)

    p = sub.add_parser("extend", help="debug-dump the extension for a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--prev-hash", required=True, help="hex digest")
    p.add_argument("--merkle", required=True, help="hex digest")
    p.add_argument("--lambda", dest="lam", type=int, default=None)
    p.add_argument("--dump-limit", type=int, default=64)
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("solve", help="dominating set of a plain graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--exact", action="store_true", help="exhaustive search (n <= 20)")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("mine", help="mine a block for a signed instance")
    p.add_argument("--graph", required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--prev-hash", required=True)
    p.add_argument("--prev-id", type=int, default=0)
    p.add_argument("--budget", type=float, default=30.0, help="seconds")
    p.add_argument("--coinbase", default="coinbase:cli")
    p.add_argument("--lambda", dest="lam", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("verify", help="verify a block against its instance")
    p.add_argument("--block", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--prev-hash", required=True)
    p.add_argument("--prev-id", type=int, default=0)
    p.add_argument("--now", type=float, default=0.0)
    p.add_argument("--tmax", type=float, default=None)
    p.add_argument("--past-size", type=int, default=None)
    p.add_argument("--lambda", dest="lam", type=int, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("retrieve", help="map a block's set back to the base graph")
    p.add_argument("--block", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_retrieve)

    p = sub.add_parser("bench", help="time generation vs verification over sizes")
    p.add_argument("--sizes", default="1000,2000,4000")
    p.add_argument("--m-attach", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--impl", choices=["auto", "native", "pure", "both"], default="auto")
    p.add_argument("--out")
    p.add_argument("--table-out", help="also write a lookup-table CSV")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("estimate", help="block interval for a new instance")
    p.add_argument("--table", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--l", type=float, default=2.0)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("chain-select", help="fork choice between two chain files")
    p.add_argument("--current", required=True)
    p.add_argument("--candidate", required=True)
    p.add_argument("--tie-seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_chain_select)

    p = sub.add_parser("simulate", help="run a multi-miner scenario")
    p.add_argument("--scenario", choices=list(SCENARIOS), required=True)
    p.add_argument("--miners", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ChrisimosError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
