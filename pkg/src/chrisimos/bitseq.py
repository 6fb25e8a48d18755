"""Deterministic bit-sequence rules shared by miner and verifier.

Two bit sources drive the graph extension and must be reproduced exactly
on both sides:

* the edge mask ``L``: a seed digest ``S`` followed by its complement,
  repeated periodically and truncated to ``2|E|`` bits.  The three
  length regimes (shorter than the seed, up to twice the seed, longer)
  all fall out of the same periodic construction;
* the mirror-side adjacency pattern: a two-chunk periodic sequence over
  the ``C(n, 2)`` upper-triangular cells whose one-positions have a
  closed form, parameterised by the doubled minimum degree.

All bit positions and vertex indices are 1-based, matching the worked
examples the protocol rules are anchored to.  Digests are fixed-length
bit strings; the seed is the hash of the previous-block digest and the
Merkle-root digest, truncated to the configured width.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .errors import ChunkUnderflow, IndexOutOfRange

MAX_DIGEST_BITS = 256


@dataclass(frozen=True)
class Bits:
    """Immutable bit string. Bit 1 is the leftmost (most significant)."""

    length: int
    value: int

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("bit string must have positive length")
        if not 0 <= self.value < (1 << self.length):
            raise ValueError("value does not fit in the declared length")

    @classmethod
    def from_str(cls, s: str) -> "Bits":
        if not s or set(s) - {"0", "1"}:
            raise ValueError(f"not a bit string: {s!r}")
        return cls(len(s), int(s, 2))

    @classmethod
    def from_bytes(cls, raw: bytes, length: int) -> "Bits":
        """Take the first ``length`` bits of ``raw`` (MSB first)."""
        if length > len(raw) * 8:
            raise ValueError("byte string shorter than requested length")
        return cls(length, int.from_bytes(raw, "big") >> (len(raw) * 8 - length))

    def bit(self, i: int) -> int:
        """1-based bit access; bit 1 is the leftmost."""
        if not 1 <= i <= self.length:
            raise IndexOutOfRange(f"bit position {i} outside 1..{self.length}")
        return (self.value >> (self.length - i)) & 1

    def ones(self) -> tuple[int, ...]:
        return tuple(i for i in range(1, self.length + 1) if self.bit(i))

    def complement(self) -> "Bits":
        return Bits(self.length, self.value ^ ((1 << self.length) - 1))

    def to_str(self) -> str:
        return format(self.value, f"0{self.length}b")

    def to_bytes(self) -> bytes:
        """Right-aligned big-endian value bytes."""
        return self.value.to_bytes((self.length + 7) // 8, "big")

    def to_array(self) -> np.ndarray:
        """Bits as a uint8 array, index 0 holding bit 1."""
        nbytes = (self.length + 7) // 8
        buf = (self.value << (nbytes * 8 - self.length)).to_bytes(nbytes, "big")
        return np.unpackbits(np.frombuffer(buf, dtype=np.uint8))[: self.length]

    def to_json(self) -> dict:
        return {"len": self.length, "hex": self.to_bytes().hex()}

    @classmethod
    def from_json(cls, obj: dict) -> "Bits":
        return cls.from_bytes_right(bytes.fromhex(obj["hex"]), int(obj["len"]))

    @classmethod
    def from_bytes_right(cls, raw: bytes, length: int) -> "Bits":
        """Inverse of :meth:`to_bytes`: value is right-aligned in ``raw``."""
        value = int.from_bytes(raw, "big")
        return cls(length, value)

    def canonical_bytes(self) -> bytes:
        """Length-prefixed encoding used wherever digests are hashed."""
        return self.length.to_bytes(4, "big") + self.to_bytes()

    def __str__(self) -> str:
        return self.to_str()


def zero_bits(length: int) -> Bits:
    return Bits(length, 0)


def hash_bits(data: bytes, length: int) -> Bits:
    """First ``length`` bits of SHA-256 over ``data`` (``length`` <= 256)."""
    if not 1 <= length <= MAX_DIGEST_BITS:
        raise ValueError(f"digest width must be in 1..{MAX_DIGEST_BITS}, got {length}")
    return Bits.from_bytes(hashlib.sha256(data).digest(), length)


def derive_seed(h_prev: Bits, h_mr: Bits) -> Bits:
    """Seed S: hash of the previous-block digest and the Merkle root."""
    if h_prev.length != h_mr.length:
        raise ValueError("digest widths differ")
    return hash_bits(h_prev.canonical_bytes() + h_mr.canonical_bytes(), h_prev.length)


# --- edge mask -------------------------------------------------------------


def mask_array(seed: Bits, out_len: int) -> np.ndarray:
    """The edge mask as a uint8 array: (S || ~S) tiled, cut to out_len."""
    if out_len < 1:
        raise ValueError("mask length must be positive")
    s = seed.to_array()
    period = np.concatenate([s, 1 - s])
    reps = -(-out_len // period.size)
    return np.tile(period, reps)[:out_len]


def mask_bit(seed: Bits, position: int) -> int:
    """Pointwise form of the mask: O(1) probe of bit ``position`` (1-based)."""
    lam = seed.length
    j = (position - 1) % (2 * lam)
    if j < lam:
        return seed.bit(j + 1)
    return 1 - seed.bit(j - lam + 1)


def expand_mask(seed: Bits, out_len: int) -> Bits:
    """Materialised edge mask as a bit string (debug / small sizes)."""
    arr = mask_array(seed, out_len)
    value = int.from_bytes(np.packbits(arr).tobytes(), "big") >> (-out_len % 8)
    return Bits(out_len, value)


def edge_mask(h_prev: Bits, h_mr: Bits, out_len: int) -> Bits:
    """Mask from the two block digests directly."""
    return expand_mask(derive_seed(h_prev, h_mr), out_len)


def ones_indices(seed: Bits, out_len: int) -> list[int]:
    """Sorted 1-positions of the mask, computed without materialising it.

    Positions are ``m*lam + i`` for set bits ``i`` of the seed when ``m``
    is even, and ``z*lam + i`` for clear bits ``i`` when ``z`` is odd,
    clipped to ``out_len``.
    """
    lam = seed.length
    set_bits = [i for i in range(1, lam + 1) if seed.bit(i)]
    clear_bits = [i for i in range(1, lam + 1) if not seed.bit(i)]
    out: list[int] = []
    block = 0
    base = 0
    while base < out_len:
        for i in set_bits if block % 2 == 0 else clear_bits:
            p = base + i
            if p > out_len:
                break
            out.append(p)
        block += 1
        base += lam
    return out


# --- mirror-side adjacency pattern -----------------------------------------


@dataclass(frozen=True)
class WAdjacencySpec:
    """Parameters of the mirror-side adjacency bit sequence.

    The sequence covers the C(n, 2) unordered pairs of mirror vertices in
    row-major upper-triangular order; ``chunk`` is the period parameter
    n // delta_hat.
    """

    n: int
    delta_hat: int
    chunk: int
    length: int

    @classmethod
    def create(cls, n: int, delta_hat: int) -> "WAdjacencySpec":
        if n < 1:
            raise ValueError("need at least one vertex")
        if delta_hat < 1:
            raise ChunkUnderflow(f"doubled min degree must be >= 1, got {delta_hat}")
        chunk = n // delta_hat
        if chunk < 1:
            raise ChunkUnderflow(
                f"chunk size n//delta_hat = {n}//{delta_hat} is below 1"
            )
        return cls(n=n, delta_hat=delta_hat, chunk=chunk, length=n * (n - 1) // 2)


def w_ones_indices(spec: WAdjacencySpec) -> list[int]:
    """Sorted 1-positions of the mirror adjacency sequence.

    Odd doubled degree: positions (2m+1)*c and (2m+1)*c + 1.
    Even doubled degree: positions 1 + 2m*c and 2(m+1)*c.
    Both families are emitted for m = 0, 1, ... while inside the sequence.
    """
    c, limit = spec.chunk, spec.length
    out: list[int] = []
    m = 0
    if spec.delta_hat % 2 == 1:
        while (a := (2 * m + 1) * c) <= limit:
            out.append(a)
            if a + 1 <= limit:
                out.append(a + 1)
            m += 1
    else:
        while (a := 1 + 2 * m * c) <= limit:
            out.append(a)
            b = 2 * (m + 1) * c
            if b <= limit:
                out.append(b)
            m += 1
    return out


def triangular_to_pair(index: int, n: int) -> tuple[int, int]:
    """Decode a 1-based upper-triangular position into a pair (i, j), i < j.

    Positions 1..n-1 are (1,2)..(1,n), the next n-2 are (2,3)..(2,n), etc.
    """
    limit = n * (n - 1) // 2
    if not 1 <= index <= limit:
        raise IndexOutOfRange(f"position {index} outside 1..{limit}")
    t = index - 1  # 0-based cell
    # row r (0-based) starts at cell r*n - r*(r+1)/2
    r = int((2 * n - 1 - math.isqrt((2 * n - 1) * (2 * n - 1) - 8 * t)) // 2)
    while r * n - r * (r + 1) // 2 > t:
        r -= 1
    while (r + 1) * n - (r + 1) * (r + 2) // 2 <= t:
        r += 1
    j0 = t - (r * n - r * (r + 1) // 2)
    return r + 1, r + 2 + j0


def w_pairs(spec: WAdjacencySpec) -> list[tuple[int, int]]:
    """All mirror-vertex pairs (local 1-based indices) joined by the pattern."""
    return [triangular_to_pair(ix, spec.n) for ix in w_ones_indices(spec)]
