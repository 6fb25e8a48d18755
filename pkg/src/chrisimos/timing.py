"""Benchmark lookup table and block-interval estimation.

One entry per vertex count: the measured generation-plus-verification
time of the reference greedy miner, averaged over instances with varied
edge counts.  New instances scale the nearest entry by the work ratio
(2m + delta*(n-1)) * n of the two extended instances and multiply by the
safety factor l > 1.
"""

from __future__ import annotations

import csv
import platform
import time
from dataclasses import dataclass
from pathlib import Path

from . import bitseq
from .errors import EmptyTable
from .graphs import Graph, generate_graph
from .mining import greedy_ds
from .transform import extend
from .verification import check_coverage


@dataclass(frozen=True)
class LookupEntry:
    n: int
    m: int
    delta: int
    tau: float


@dataclass
class LookupTable:
    entries: list[LookupEntry]
    hardware: str = ""

    def save(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n", "m", "delta", "tau", "hardware"])
            for e in self.entries:
                writer.writerow([e.n, e.m, e.delta, f"{e.tau:.9f}", self.hardware])

    @classmethod
    def load(cls, path) -> "LookupTable":
        entries = []
        hardware = ""
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                entries.append(
                    LookupEntry(
                        int(row["n"]), int(row["m"]), int(row["delta"]),
                        float(row["tau"]),
                    )
                )
                hardware = row.get("hardware", "")
        return cls(entries, hardware)


def hardware_tag() -> str:
    return f"{platform.system()}-{platform.machine()}"


def _work_product(n: int, m: int, delta: int) -> float:
    return (2 * m + delta * (n - 1)) * n


def scale_factor(n_new: int, m_new: int, d_new: int,
                 n_ref: int, m_ref: int, d_ref: int) -> float:
    return _work_product(n_new, m_new, d_new) / _work_product(n_ref, m_ref, d_ref)


def select_entry(table: LookupTable, n: int) -> LookupEntry:
    """Exact vertex-count match if present, else the largest entry below
    n; when nothing is below, the smallest entry (scaling down)."""
    if not table.entries:
        raise EmptyTable("lookup table has no entries")
    exact = [e for e in table.entries if e.n == n]
    if exact:
        return exact[0]
    below = [e for e in table.entries if e.n < n]
    if below:
        return max(below, key=lambda e: e.n)
    return min(table.entries, key=lambda e: e.n)


def estimate_tmax(table: LookupTable, n: int, m: int, delta: int,
                  l: float = 2.0) -> float:
    """Block interval estimate for a new instance."""
    if not l > 1:
        raise ValueError("interval factor l must exceed 1")
    ref = select_entry(table, n)
    return l * ref.tau * scale_factor(n, m, delta, ref.n, ref.m, ref.delta)


def measure_once(g: Graph, seed: int, lam: int = 256) -> tuple[float, float]:
    """Time one generation (extend + greedy) and one lazy verification."""
    h_prev = bitseq.hash_bits(f"bench-prev:{seed}".encode(), lam)
    h_mr = bitseq.hash_bits(f"bench-mr:{seed}".encode(), lam)
    t0 = time.perf_counter()
    eg = extend(g, h_prev, h_mr)
    ds = greedy_ds(eg)
    gen = time.perf_counter() - t0
    t0 = time.perf_counter()
    ok, _ = check_coverage(g, eg.seed, eg.w_spec.delta_hat, ds.vertices)
    ver = time.perf_counter() - t0
    if not ok:
        raise AssertionError("greedy result failed verification during timing")
    return gen, ver


def build_table(configs, seeds, repeats: int = 1, lam: int = 256) -> LookupTable:
    """Measure tau for each (model, n, kwargs) config, averaged over seeds.

    ``configs`` is an iterable of (model, n, params-dict); one table row
    per config; the greedy heuristic is the reference solver.
    """
    entries = []
    for model, n, params in configs:
        taus = []
        m_sum = 0
        d_sum = 0
        count = 0
        for seed in seeds:
            g = generate_graph(model, n, seed, **params)
            for rep in range(repeats):
                gen, ver = measure_once(g, seed * 1000 + rep, lam)
                taus.append(gen + ver)
            m_sum += g.m
            d_sum += g.delta
            count += 1
        entries.append(
            LookupEntry(
                n=n,
                m=round(m_sum / count),
                delta=round(d_sum / count),
                tau=sum(taus) / len(taus),
            )
        )
    return LookupTable(entries, hardware_tag())
