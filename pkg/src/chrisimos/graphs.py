"""Immutable graph container, deterministic orderings, generators, file I/O.

Vertices are 1-based ids.  Two canonical orders keep miner and verifier in
lockstep: neighbor lists are stored ascending by id, and the degree ranking
breaks ties by ascending id.  Both choices are load-bearing: the extension
rules index "the l-th neighbor" and "the i-th ranked vertex", so every node
must agree on what those mean.
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import (
    DuplicateEdge,
    EmptyGraph,
    InvalidModelParams,
    MalformedHeader,
    RetryExhausted,
    SelfLoop,
    VertexOutOfRange,
)

_RETRY_CAP = 64


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph; immutable after construction."""

    n: int
    edges: tuple[tuple[int, int], ...]  # sorted, u < v
    adjacency: tuple[tuple[int, ...], ...]  # index 0 unused; lists ascending
    degree: tuple[int, ...]  # index 0 unused
    delta: int
    gamma: int

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> tuple[int, ...]:
        if not 1 <= v <= self.n:
            raise VertexOutOfRange(f"vertex {v} outside 1..{self.n}")
        return self.adjacency[v]

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Adjacency in CSR form over rows 0..n (row 0 empty)."""
        if self.m:
            e = np.asarray(self.edges, dtype=np.int32)
            u = np.concatenate([e[:, 0], e[:, 1]])
            v = np.concatenate([e[:, 1], e[:, 0]])
        else:
            u = v = np.zeros(0, dtype=np.int32)
        return build_csr(self.n, u, v)

    @classmethod
    def from_edges(cls, n: int, edges, *, dedup_warn: bool = True) -> "Graph":
        if n == 0:
            raise EmptyGraph("graph has no vertices")
        if n < 0:
            raise MalformedHeader(f"negative vertex count {n}")
        seen: set[tuple[int, int]] = set()
        for u, v in edges:
            if u == v:
                raise SelfLoop(f"self-loop at vertex {u}")
            if not (1 <= u <= n and 1 <= v <= n):
                raise VertexOutOfRange(f"edge ({u}, {v}) outside 1..{n}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                if dedup_warn:
                    warnings.warn(f"duplicate edge {key} dropped", DuplicateEdge)
                continue
            seen.add(key)
        ordered = tuple(sorted(seen))
        adj_lists: list[list[int]] = [[] for _ in range(n + 1)]
        for u, v in ordered:
            adj_lists[u].append(v)
            adj_lists[v].append(u)
        adjacency = tuple(tuple(sorted(a)) for a in adj_lists)
        degree = tuple(len(a) for a in adjacency)
        return cls(
            n=n,
            edges=ordered,
            adjacency=adjacency,
            degree=degree,
            delta=min(degree[1:]),
            gamma=max(degree[1:]),
        )


def build_csr(n: int, u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """CSR over rows 0..n from directed arc arrays; rows sorted ascending."""
    order = np.lexsort((v, u))
    uu = u[order]
    indices = v[order].astype(np.int32, copy=False)
    counts = np.bincount(uu, minlength=n + 1)
    indptr = np.zeros(n + 2, dtype=np.int64)
    np.cumsum(counts[: n + 1], out=indptr[1:])
    return indptr, indices


def rank_vertices(g: Graph) -> tuple[int, ...]:
    """Vertices sorted by descending degree, ties by ascending id."""
    return tuple(sorted(range(1, g.n + 1), key=lambda v: (-g.degree[v], v)))


# --- file I/O ----------------------------------------------------------------


def load_graph(path) -> Graph:
    """Read the plain-text edge list: header line "n m", then m lines "u v"."""
    lines = Path(path).read_text().splitlines()
    rows = [ln.strip() for ln in lines]
    body = [ln for ln in rows if ln]
    if not body:
        raise MalformedHeader("empty file")
    head = body[0].split()
    if len(head) != 2:
        raise MalformedHeader(f"expected 'n m' header, got {body[0]!r}")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise MalformedHeader(f"non-integer header {body[0]!r}") from None
    if n == 0:
        raise EmptyGraph("graph has no vertices")
    if len(body) - 1 != m:
        raise MalformedHeader(f"header claims {m} edges, file has {len(body) - 1}")
    edges = []
    for ln in body[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise MalformedHeader(f"expected 'u v' edge line, got {ln!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise MalformedHeader(f"non-integer edge line {ln!r}") from None
    return Graph.from_edges(n, edges)


def save_graph(g: Graph, path) -> None:
    out = [f"{g.n} {g.m}"]
    out.extend(f"{u} {v}" for u, v in g.edges)
    Path(path).write_text("\n".join(out) + "\n")


def canonical_text(g: Graph) -> str:
    """Canonical serialization (header plus sorted edge list); the instance
    digest is the hash of these bytes."""
    return "\n".join([f"{g.n} {g.m}", *(f"{u} {v}" for u, v in g.edges)]) + "\n"


# --- synthetic generators -----------------------------------------------------


def _er_edges(n: int, p: float, rng: random.Random) -> list[tuple[int, int]]:
    """G(n, p) via geometric gap sampling; O(m) draws."""
    if p <= 0:
        return []
    if p >= 1:
        return [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    import math

    edges = []
    lp = math.log1p(-p)
    v, w = 1, -1
    while v < n:
        lr = math.log1p(-rng.random())
        w = w + 1 + int(lr / lp)
        while w >= v and v < n:
            w -= v
            v += 1
        if v < n:
            edges.append((w + 1, v + 1))
    return edges


def _ba_edges(n: int, m_attach: int, rng: random.Random) -> list[tuple[int, int]]:
    """Preferential attachment: each new vertex attaches m distinct targets."""
    targets = list(range(1, m_attach + 1))
    repeated: list[int] = []
    edges = []
    for new in range(m_attach + 1, n + 1):
        for t in targets:
            edges.append((t, new))
        repeated.extend(targets)
        repeated.extend([new] * m_attach)
        chosen: set[int] = set()
        while len(chosen) < m_attach:
            chosen.add(repeated[rng.randrange(len(repeated))])
        targets = sorted(chosen)
    return edges


def erdos_renyi(n: int, p_edge: float, seed: int) -> Graph:
    """Seeded G(n, p); resamples until the minimum degree is at least 1."""
    if n < 2:
        raise InvalidModelParams(f"need n >= 2, got {n}")
    if not 0 <= p_edge <= 1:
        raise InvalidModelParams(f"edge probability {p_edge} outside [0, 1]")
    for attempt in range(_RETRY_CAP):
        rng = random.Random(f"er:{n}:{p_edge!r}:{seed}:{attempt}")
        g = Graph.from_edges(n, _er_edges(n, p_edge, rng))
        if g.delta >= 1:
            return g
    raise RetryExhausted(
        f"could not reach min degree 1 for erdos_renyi(n={n}, p={p_edge})"
    )


def barabasi_albert(n: int, m_attach: int, seed: int) -> Graph:
    """Seeded preferential-attachment graph; min degree 1 holds by design."""
    if n < 2:
        raise InvalidModelParams(f"need n >= 2, got {n}")
    if not 1 <= m_attach < n:
        raise InvalidModelParams(f"attachment count {m_attach} outside 1..{n - 1}")
    for attempt in range(_RETRY_CAP):
        rng = random.Random(f"ba:{n}:{m_attach}:{seed}:{attempt}")
        g = Graph.from_edges(n, _ba_edges(n, m_attach, rng))
        if g.delta >= 1:
            return g
    raise RetryExhausted(
        f"could not reach min degree 1 for barabasi_albert(n={n}, m={m_attach})"
    )


def generate_graph(model: str, n: int, seed: int, *, m_attach: int | None = None,
                   p_edge: float | None = None) -> Graph:
    """Dispatch on model name; parameters are model-specific."""
    if model == "barabasi_albert":
        if m_attach is None:
            raise InvalidModelParams("barabasi_albert requires m_attach")
        return barabasi_albert(n, m_attach, seed)
    if model == "erdos_renyi":
        if p_edge is None:
            raise InvalidModelParams("erdos_renyi requires p_edge")
        return erdos_renyi(n, p_edge, seed)
    raise InvalidModelParams(f"unknown model {model!r}")
