"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion
lines as they complete.  Headline large-scale timings are hardware-bound,
so criteria assert properties and scaled-down trends, not absolute times.
"""

import json
import math
import random
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from chrisimos.bitseq import (
    Bits,
    WAdjacencySpec,
    hash_bits,
    mask_array,
    ones_indices,
    w_ones_indices,
)
from chrisimos.graphs import Graph, barabasi_albert, erdos_renyi
from chrisimos.ledger import (
    Transaction,
    TransactionSet,
    generate_committee,
    instance_to_json,
    make_instance,
    serialize_block,
)
from chrisimos.mining import (
    MiningPolicy,
    TickClock,
    brute_min_ds,
    greedy_ds,
    mine_block,
)
from chrisimos.simnet import run_scenario
from chrisimos.timing import LookupTable, build_table, estimate_tmax, measure_once
from chrisimos.transform import compute_bound, extend, neighbors_t
from chrisimos.verification import check_coverage

DRIVER = Path(__file__).with_name("acceptance_verify_driver.py")


def _report(num: int, ok: bool, detail: str) -> bool:
    print(f"\nACCEPTANCE {num:02d} {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


def test_criterion_01_greedy_within_bound():
    """Greedy size <= n'(1+ln(1+d'))/(1+d') on 500 seeded instances."""
    t0 = time.perf_counter()
    rng = random.Random("acceptance-1")
    violations = 0
    for trial in range(500):
        n = rng.randint(100, 2000)
        avg = rng.randint(10, 50)
        if trial % 2 == 0:
            g = barabasi_albert(n, max(5, min(avg // 2, n - 1)), seed=trial)
        else:
            g = erdos_renyi(n, min(1.0, avg / (n - 1)), seed=trial)
        eg = extend(g, hash_bits(f"p{trial}".encode(), 256),
                    hash_bits(f"m{trial}".encode(), 256))
        ds = greedy_ds(eg)
        if ds.size > compute_bound(eg.n_t, eg.delta_t):
            violations += 1
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and elapsed < 120
    assert _report(
        1, ok, f"0 required, {violations} bound violations over 500 instances "
               f"(n<=2000, avg degree 10-50), {elapsed:.1f}s"
    )


def _min_ds_size_sweep(g: Graph) -> int:
    """Independent oracle: full subset enumeration via incremental OR."""
    n = g.n
    closed = [0] * (n + 1)
    for v in range(1, n + 1):
        m = 1 << (v - 1)
        for u in g.adjacency[v]:
            m |= 1 << (u - 1)
        closed[v] = m
    full = (1 << n) - 1
    cover = [0] * (1 << n)
    best = n
    for mask in range(1, 1 << n):
        low = mask & -mask
        cover[mask] = cover[mask ^ low] | closed[low.bit_length()]
        if cover[mask] == full:
            pc = bin(mask).count("1")
            if pc < best:
                best = pc
    return best


def test_criterion_02_oracle_equivalence():
    """Exhaustive minimum vs full sweep; greedy sandwich on 1000 graphs."""
    t0 = time.perf_counter()
    rng = random.Random("acceptance-2")
    checked = 0
    while checked < 1000:
        n = rng.randint(5, 12)
        p = rng.uniform(0.3, 0.85)
        edges = [
            (u, v)
            for u in range(1, n + 1)
            for v in range(u + 1, n + 1)
            if rng.random() < p
        ]
        g = Graph.from_edges(n, edges)
        if g.delta < 1:  # instances require min degree 1
            continue
        checked += 1
        brute = brute_min_ds(g)
        covered = set(brute.vertices)
        for v in brute.vertices:
            covered.update(g.adjacency[v])
        assert covered == set(range(1, n + 1)), "brute result must dominate"
        assert brute.size == _min_ds_size_sweep(g), "brute must be minimum"
        greedy = greedy_ds(g)
        assert greedy.size >= brute.size
        assert greedy.size <= math.log(g.gamma) * brute.size + 1
    elapsed = time.perf_counter() - t0
    ok = elapsed < 120
    assert _report(
        2, ok, f"1000 graphs n<=12: brute minimal+valid, "
               f"brute <= greedy <= ln(gamma)*brute+1, {elapsed:.1f}s"
    )


def test_criterion_03_bit_rule_exactness():
    """Index calculator equals a scan of the materialised mask; worked example."""
    seed = Bits.from_str("0101010110")
    idx = ones_indices(seed, 200)
    arr = mask_array(seed, 200)
    assert idx == [i + 1 for i in range(200) if arr[i]]
    assert len(idx) == 100
    assert all(p in idx for p in range(2, 183, 20))
    assert all(p in idx for p in range(11, 192, 20))
    rng = random.Random("acceptance-3")
    for _ in range(10_000):
        lam = rng.randint(1, 128)
        s = Bits(lam, rng.getrandbits(lam)) if lam > 1 else Bits(1, rng.randint(0, 1))
        out_len = rng.randint(1, 4 * lam + 7)
        arr = mask_array(s, out_len)
        assert ones_indices(s, out_len) == [i + 1 for i in range(out_len) if arr[i]]
    assert _report(3, True, "10000 random (seed, out_len) pairs exact; "
                            "worked example reproduced (100 one-positions)")


def test_criterion_04_w_adjacency():
    """Formula indices vs two-chunk periodic oracle; count near target.

    The count clause cannot hold together with the list clause: matching
    the two-chunk tiling forces a ones density of 1/chunk, which exceeds
    delta_hat/n whenever delta_hat does not divide n, pushing the count
    above the allowance.  The construction is the normative one (both
    worked examples pin it), so the list clause passes and the count
    clause fails; see the README's known-issues note.
    """
    list_mismatches = []
    count_violations = []
    pairs = 0
    for n in range(4, 65):
        for delta in range(1, n // 4 + 1):
            dh = 2 * delta
            spec = WAdjacencySpec.create(n, dh)
            got = w_ones_indices(spec)
            c = spec.chunk
            x = [0] * (c - 1) + [1] if dh % 2 else [1] + [0] * (c - 1)
            period = x + x[::-1]
            seq = (period * (spec.length // len(period) + 1))[: spec.length]
            oracle = [i + 1 for i, b in enumerate(seq) if b]
            pairs += 1
            if got != oracle:
                list_mismatches.append((n, delta))
            if abs(len(got) - dh * (n - 1) / 2) > dh:
                count_violations.append((n, delta))
    list_ok = not list_mismatches
    count_ok = not count_violations
    detail = (
        f"{pairs} (n, delta) pairs: list-vs-oracle "
        f"{'exact' if list_ok else f'mismatch at {list_mismatches[:3]}'}; "
        f"count within delta_hat: {len(count_violations)} violations"
        + (f" (first: {count_violations[:3]}, known spec defect on "
           f"non-divisible pairs)" if count_violations else "")
    )
    ok = list_ok and count_ok
    assert _report(4, ok, detail)


def test_criterion_05_miner_verifier_determinism():
    """100 mined blocks accepted by a verifier in a separate process."""
    rng = random.Random("acceptance-5")
    jobs = []
    for round_no in range(100):
        n = rng.randint(30, 120)
        g = erdos_renyi(n, min(1.0, 8 / (n - 1)), seed=round_no)
        signer = generate_committee(4, 3, seed=round_no)
        inst = make_instance(g, 1, signer)
        h_prev = hash_bits(f"tip:{round_no}".encode(), 256)
        txs = TransactionSet(Transaction(f"cb:{round_no}".encode()),
                             (Transaction(b"pay"),))
        block = mine_block(inst, txs, h_prev,
                           MiningPolicy(deadline=5, clock=TickClock(),
                                        prev_instance_id=0))
        jobs.append(json.dumps({
            "block": serialize_block(block).decode(),
            "instance": instance_to_json(inst, include_graph=True),
            "h_prev": h_prev.to_json(),
            "prev_id": 0,
        }))
    proc = subprocess.run(
        [sys.executable, str(DRIVER)],
        input="\n".join(jobs) + "\n",
        capture_output=True,
        text=True,
        timeout=300,
    )
    assert proc.returncode == 0, proc.stderr
    verdicts = proc.stdout.split()
    disagreements = [i for i, v in enumerate(verdicts) if v != "accept"]
    ok = len(verdicts) == 100 and not disagreements
    assert _report(
        5, ok, f"100 seeded rounds, separate-process verification, "
               f"{len(disagreements)} disagreements"
    )


def test_criterion_06_coverage_statistic():
    """Mean extended-graph coverage of a fixed base solution near 3n/2."""
    n = 200
    g = erdos_renyi(n, 6 / (n - 1), seed=101)
    ds = greedy_ds(g).vertices
    totals = []
    for trial in range(200):
        eg = extend(g, hash_bits(f"prev{trial}".encode(), 256),
                    hash_bits(f"mr{trial}".encode(), 256))
        covered = set(ds)
        for v in ds:
            covered.update(neighbors_t(eg, v))
        totals.append(len(covered))
    mean = sum(totals) / len(totals)
    ok = abs(mean - 300) <= 30
    assert _report(6, ok, f"mean dominated vertices {mean:.1f} vs 300 +/- 30 "
                          f"(200 digests, n=200)")


def test_criterion_07_fork_choice():
    """Hand-computed work values; adversarial fork scenarios stay honest."""
    r = run_scenario("fork_work", miners=3, seed=0)
    works = [e for e in r.fork_events if "works" in e][0]["works"]
    hand100 = (600 + 198) * 100 * (200 * (1 + math.log(4)) / 4) / 100
    hand120 = hand100 * 100 / 120
    exact = (
        works["ds100"] == pytest.approx(hand100, rel=1e-6)
        and works["ds100"] == pytest.approx(95213.1, rel=1e-6)
        and works["ds120"] == pytest.approx(hand120, rel=1e-6)
        and works["ds120"] == pytest.approx(79344.3, rel=1e-6)
        and works["ds100"] / works["ds120"] == pytest.approx(1.2, rel=1e-9)
    )
    adopted_ok = r.ok
    selfish_ok = all(run_scenario("selfish_fork", seed=s).ok for s in range(50))
    stale_ok = all(run_scenario("stale_id", seed=s).ok for s in range(50))
    ok = exact and adopted_ok and selfish_ok and stale_ok
    assert _report(
        7, ok, f"work {works['ds100']:.1f} vs {works['ds120']:.1f} "
               f"(hand: 95213.1 vs 79344.3, ratio 1.2); "
               f"selfish_fork and stale_id honest on 50/50 seeds"
    )


def test_criterion_08_safety_liveness():
    """5 miners x 20 epochs x 20 seeds: no conflicts, every epoch commits."""
    conflicts = 0
    missed = 0
    for seed in range(20):
        r = run_scenario("honest", miners=5, seed=seed, epochs=20)
        for e in r.epochs:
            if not e["agree"]:
                conflicts += 1
            if e["winner_size"] is None:
                missed += 1
    ok = conflicts == 0 and missed == 0
    assert _report(
        8, ok, f"400 epochs: {conflicts} height conflicts, "
               f"{missed} epochs without a committed block"
    )


def test_criterion_09_scaling_trend():
    """Generation time linear in extended edge count; verify below it."""
    sizes = [1000, 2000, 4000, 8000, 16000]
    gen_times, ver_times, e_ts = [], [], []
    for n in sizes:
        g = barabasi_albert(n, 8, seed=1)
        best_gen, best_ver = math.inf, math.inf
        for rep in range(3):
            hp = hash_bits(f"p{n}:{rep}".encode(), 256)
            hm = hash_bits(f"m{n}:{rep}".encode(), 256)
            t0 = time.perf_counter()
            eg = extend(g, hp, hm)
            ds = greedy_ds(eg)
            gen = time.perf_counter() - t0
            t0 = time.perf_counter()
            covered, _ = check_coverage(g, eg.seed, eg.w_spec.delta_hat, ds.vertices)
            ver = time.perf_counter() - t0
            assert covered
            best_gen, best_ver = min(best_gen, gen), min(best_ver, ver)
        gen_times.append(best_gen)
        ver_times.append(best_ver)
        e_ts.append(eg.edge_count)
    x = np.log(np.array(e_ts, dtype=float))
    y = np.log(np.array(gen_times))
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(((y - fitted) ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1 - ss_res / ss_tot
    ordered = all(v < g_ for v, g_ in zip(ver_times, gen_times))
    ratios = [g_ / v for g_, v in zip(gen_times, ver_times)]
    ok = r2 >= 0.9 and abs(slope - 1) <= 0.3 and ordered
    assert _report(
        9, ok, f"log-log slope {slope:.2f} (R2={r2:.3f}); verify < gen at all "
               f"sizes; gen/verify ratio {min(ratios):.1f}-{max(ratios):.1f} "
               f"(reported, not asserted)"
    )


def test_criterion_10_tmax_sufficiency():
    """With l=2 and a desk-scale table, mining fits the estimate >=95%."""
    configs = [
        ("erdos_renyi", 400, {"p_edge": 12 / 399}),
        ("erdos_renyi", 800, {"p_edge": 12 / 799}),
    ]
    table = build_table(configs, seeds=[1, 2], repeats=2)
    rng = random.Random("acceptance-10")
    measure_once(erdos_renyi(500, 12 / 499, seed=0), seed=0)  # warm-up
    within = 0
    for trial in range(100):
        n = rng.randint(300, 1000)
        g = erdos_renyi(n, 12 / (n - 1), seed=5000 + trial)
        tmax = estimate_tmax(table, g.n, g.m, g.delta, l=2.0)
        gen, _ = measure_once(g, seed=trial)
        if gen <= tmax:
            within += 1
    ok = within >= 95
    assert _report(
        10, ok, f"{within}/100 seeded mining runs within the estimated "
                f"block interval (l=2)"
    )
