import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chrisimos import bitseq
from chrisimos.bitseq import (
    Bits,
    WAdjacencySpec,
    derive_seed,
    expand_mask,
    hash_bits,
    mask_array,
    mask_bit,
    ones_indices,
    triangular_to_pair,
    w_ones_indices,
    w_pairs,
)
from chrisimos.errors import ChunkUnderflow, IndexOutOfRange

EXAMPLE_SEED = Bits.from_str("0101010110")  # the lambda=10 worked example


class TestBits:
    def test_roundtrip(self):
        b = Bits.from_str("10011")
        assert b.to_str() == "10011"
        assert b.ones() == (1, 4, 5)
        assert b.complement().to_str() == "01100"
        assert list(b.to_array()) == [1, 0, 0, 1, 1]

    def test_bit_access_is_one_based(self):
        b = Bits.from_str("10")
        assert b.bit(1) == 1
        assert b.bit(2) == 0
        with pytest.raises(IndexOutOfRange):
            b.bit(3)

    def test_json_roundtrip(self):
        b = hash_bits(b"x", 77)
        assert Bits.from_json(b.to_json()) == b

    def test_hash_truncates_sha256(self):
        import hashlib

        full = hashlib.sha256(b"abc").digest()
        b = hash_bits(b"abc", 256)
        assert b.to_bytes() == full
        short = hash_bits(b"abc", 12)
        assert short.to_str() == format(int.from_bytes(full, "big") >> 244, "012b")

    def test_hash_width_cap(self):
        with pytest.raises(ValueError):
            hash_bits(b"x", 257)


class TestEdgeMask:
    def test_worked_example_expansion(self):
        mask = expand_mask(EXAMPLE_SEED, 200)
        got = [i for i in range(1, 201) if mask.bit(i)]
        want = sorted(
            [i + 20 * m for i in (2, 4, 6, 8, 9) for m in range(10)]
            + [10 + j + 20 * m for j in (1, 3, 5, 7, 10) for m in range(10)]
        )
        assert got == want
        assert len(got) == 100

    def test_worked_example_index_families(self):
        idx = ones_indices(EXAMPLE_SEED, 200)
        assert len(idx) == 100
        assert all(p in idx for p in range(2, 183, 20))
        assert all(p in idx for p in range(11, 192, 20))

    def test_truncation_identity(self):
        s = hash_bits(b"seed", 32)
        assert expand_mask(s, 32) == s

    def test_hand_expansion_lambda4(self):
        s = Bits.from_str("1100")
        assert expand_mask(s, 10).to_str() == "1100001111"
        assert ones_indices(s, 10) == [1, 2, 7, 8, 9, 10]

    def test_all_ones_seed(self):
        s = Bits.from_str("1" * 8)
        assert ones_indices(s, 16) == list(range(1, 9))

    @settings(max_examples=300, deadline=None)
    @given(st.data())
    def test_indices_match_mask_scan(self, data):
        lam = data.draw(st.integers(1, 64))
        value = data.draw(st.integers(0, (1 << lam) - 1))
        out_len = data.draw(st.integers(1, 4 * lam + 7))
        s = Bits(lam, value)
        arr = mask_array(s, out_len)
        scan = [i + 1 for i in range(out_len) if arr[i]]
        assert ones_indices(s, out_len) == scan
        assert all(mask_bit(s, p) == int(arr[p - 1]) for p in range(1, out_len + 1))

    @settings(max_examples=200, deadline=None)
    @given(st.data())
    def test_balance_bound(self, data):
        lam = data.draw(st.integers(1, 48))
        value = data.draw(st.integers(0, (1 << lam) - 1))
        out_len = data.draw(st.integers(1, 5 * lam))
        s = Bits(lam, value)
        ones = int(mask_array(s, out_len).sum())
        slack = lam / 2 + (out_len % (2 * lam)) / 2
        assert abs(ones - out_len / 2) <= slack
        assert abs(ones - out_len / 2) <= lam

    def test_seed_derivation_is_symmetric_free(self):
        a, b = hash_bits(b"a", 64), hash_bits(b"b", 64)
        assert derive_seed(a, b) != derive_seed(b, a)
        with pytest.raises(ValueError):
            derive_seed(a, hash_bits(b"b", 63))


class TestWAdjacency:
    def test_even_case_n6(self):
        spec = WAdjacencySpec.create(6, 2)
        assert spec.chunk == 3 and spec.length == 15
        assert w_ones_indices(spec) == [1, 6, 7, 12, 13]

    def test_odd_case_n9(self):
        spec = WAdjacencySpec.create(9, 3)
        assert w_ones_indices(spec) == [3, 4, 9, 10, 15, 16, 21, 22, 27, 28, 33, 34]

    def test_chunk_underflow(self):
        with pytest.raises(ChunkUnderflow):
            WAdjacencySpec.create(4, 8)

    def test_count_bounds(self):
        import math

        # the tiling guarantees the one-sided bounds everywhere: at least
        # the idealized count up to truncation slack, and at least the
        # target edge share.  It only stays within delta_hat of the
        # idealized count when delta_hat divides n; otherwise the floored
        # chunk makes the density overshoot (never undershoot).
        for n in range(4, 40):
            for delta in range(1, n // 2 + 1):
                dh = 2 * delta
                if n // dh < 1:
                    continue
                spec = WAdjacencySpec.create(n, dh)
                count = len(w_ones_indices(spec))
                assert count >= dh * (n - 1) // 2 - dh
                assert count >= math.ceil((delta / n) * spec.length) - dh
                if n % dh == 0:
                    assert abs(count - dh * (n - 1) / 2) <= dh

    def test_matches_two_chunk_periodic_oracle(self):
        # direct generation: first chunk by parity rule, second its mirror,
        # the pair tiled to C(n,2) bits
        for n in range(4, 33):
            for delta in range(1, n // 4 + 1):
                dh = 2 * delta
                spec = WAdjacencySpec.create(n, dh)
                c = spec.chunk
                x = [0] * (c - 1) + [1] if dh % 2 else [1] + [0] * (c - 1)
                period = x + x[::-1]
                seq = (period * (spec.length // len(period) + 1))[: spec.length]
                oracle = [i + 1 for i, b in enumerate(seq) if b]
                assert w_ones_indices(spec) == oracle


class TestTriangular:
    def test_corners(self):
        assert triangular_to_pair(1, 6) == (1, 2)
        assert triangular_to_pair(6, 6) == (2, 3)
        assert triangular_to_pair(15, 6) == (5, 6)

    def test_out_of_range(self):
        with pytest.raises(IndexOutOfRange):
            triangular_to_pair(16, 6)
        with pytest.raises(IndexOutOfRange):
            triangular_to_pair(0, 6)

    def test_bijection(self):
        for n in (2, 3, 7, 12):
            pairs = [triangular_to_pair(i, n) for i in range(1, n * (n - 1) // 2 + 1)]
            expect = [(i, j) for i in range(1, n) for j in range(i + 1, n + 1)]
            assert pairs == expect

    def test_w_pairs_decode(self):
        spec = WAdjacencySpec.create(6, 2)
        assert w_pairs(spec) == [(1, 2), (2, 3), (2, 4), (3, 6), (4, 5)]
