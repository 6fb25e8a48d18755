"""Pure-Python reference kernels; the compiled module mirrors these exactly."""

from __future__ import annotations

import heapq

import numpy as np


def greedy_cover(indptr, indices, n: int) -> np.ndarray:
    """Greedy dominating set over a CSR adjacency (rows 1..n).

    Repeatedly picks the vertex whose closed neighborhood contains the
    most uncovered vertices; ties prefer uncovered candidates, then the
    ascending id.  Returns the picked ids in selection order.

    Uses a lazy max-heap: counts only decrease and every decrement pushes
    a fresh entry, so a popped entry is valid exactly when its count is
    current (a covered-status flip always decrements the count too).
    """
    ptr = np.asarray(indptr, dtype=np.int64).tolist()
    idx = np.asarray(indices, dtype=np.int64).tolist()
    if len(ptr) != n + 2:
        raise ValueError(f"indptr must have {n + 2} entries (rows 0..{n})")
    count = [0] * (n + 1)
    for v in range(1, n + 1):
        count[v] = ptr[v + 1] - ptr[v] + 1
    covered = bytearray(n + 1)
    heap = [(-count[v], 0, v) for v in range(1, n + 1)]
    heapq.heapify(heap)
    chosen: list[int] = []
    remaining = n
    while remaining:
        negc, flag, v = heapq.heappop(heap)
        if -negc != count[v]:
            continue
        chosen.append(v)
        closed = [v]
        closed.extend(idx[ptr[v]:ptr[v + 1]])
        for u in closed:
            if covered[u]:
                continue
            covered[u] = 1
            remaining -= 1
            count[u] -= 1
            heapq.heappush(heap, (-count[u], 1, u))
            for x in idx[ptr[u]:ptr[u + 1]]:
                count[x] -= 1
                heapq.heappush(heap, (-count[x], covered[x], x))
    return np.asarray(chosen, dtype=np.int32)
