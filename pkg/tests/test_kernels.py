"""Parity between the compiled kernel and the pure-Python fallback."""

import random

import numpy as np
import pytest

from chrisimos._kernels import (
    greedy_cover_native,
    greedy_cover_pure,
    implementation,
)
from chrisimos.bitseq import hash_bits
from chrisimos.graphs import erdos_renyi
from chrisimos.transform import extend

from conftest import dominates_oracle, random_graph

needs_native = pytest.mark.skipif(
    greedy_cover_native is None, reason="compiled kernel not built"
)


def test_active_implementation_reported():
    assert implementation() in ("native", "pure")


def test_pure_dominates_random_graphs():
    rng = random.Random(2)
    for _ in range(25):
        g = random_graph(rng, rng.randint(2, 60), rng.uniform(0.05, 0.5))
        indptr, indices = g.csr
        chosen = [int(v) for v in greedy_cover_pure(indptr, indices, g.n)]
        assert dominates_oracle(g, chosen)


@needs_native
def test_native_matches_pure_exactly():
    rng = random.Random(3)
    for _ in range(40):
        g = random_graph(rng, rng.randint(2, 80), rng.uniform(0.03, 0.6))
        indptr, indices = g.csr
        pure = list(greedy_cover_pure(indptr, indices, g.n))
        native = list(greedy_cover_native(indptr, indices, g.n))
        assert pure == native  # identical picks in identical order


@needs_native
def test_native_matches_pure_on_extended_graphs():
    for seed in range(5):
        g = erdos_renyi(150, 0.05, seed=seed)
        eg = extend(g, hash_bits(f"p{seed}".encode(), 256),
                    hash_bits(f"m{seed}".encode(), 256))
        indptr, indices = eg.adjacency
        pure = list(greedy_cover_pure(indptr, indices, eg.n_t))
        native = list(greedy_cover_native(indptr, indices, eg.n_t))
        assert pure == native


@needs_native
def test_native_handles_isolated_vertices():
    # vertices with empty rows must still be picked (rows 0..n, so n+2 ptrs)
    indptr = np.zeros(5, dtype=np.int64)
    indices = np.array([], dtype=np.int32)
    assert sorted(int(v) for v in greedy_cover_native(indptr, indices, 3)) == [1, 2, 3]
    assert sorted(int(v) for v in greedy_cover_pure(indptr, indices, 3)) == [1, 2, 3]


def test_malformed_indptr_rejected():
    indptr = np.zeros(4, dtype=np.int64)  # one entry short
    indices = np.array([], dtype=np.int32)
    with pytest.raises(ValueError):
        greedy_cover_pure(indptr, indices, 3)
    if greedy_cover_native is not None:
        with pytest.raises(ValueError):
            greedy_cover_native(indptr, indices, 3)
