# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled greedy-cover kernel.

Same algorithm and tie-breaking as ``_pure.greedy_cover``: a lazy
max-heap over (uncovered-coverage, uncovered-candidate, id).  Heap keys
pack (count, uncovered flag, inverted id) into one int64 so the binary
heap orders by count descending, uncovered candidates first, then id
ascending.  Counts only decrease and every decrement pushes a fresh
entry, so a popped entry is valid exactly when its count is current.
"""

import numpy as np

cdef long long _KEY_ID_SPAN = 1 << 31


cdef inline void _heap_push(long long[::1] heap, Py_ssize_t* size, long long key) noexcept:
    cdef Py_ssize_t i = size[0]
    cdef Py_ssize_t parent
    heap[i] = key
    size[0] += 1
    while i > 0:
        parent = (i - 1) >> 1
        if heap[parent] < heap[i]:
            heap[parent], heap[i] = heap[i], heap[parent]
            i = parent
        else:
            break


cdef inline long long _heap_pop(long long[::1] heap, Py_ssize_t* size) noexcept:
    cdef long long top = heap[0]
    cdef Py_ssize_t i = 0, child, n
    size[0] -= 1
    n = size[0]
    heap[0] = heap[n]
    while True:
        child = 2 * i + 1
        if child >= n:
            break
        if child + 1 < n and heap[child + 1] > heap[child]:
            child += 1
        if heap[child] > heap[i]:
            heap[child], heap[i] = heap[i], heap[child]
            i = child
        else:
            break
    return top


def greedy_cover(indptr_obj, indices_obj, int n):
    indptr_arr = np.ascontiguousarray(indptr_obj, dtype=np.int64)
    indices_arr = np.ascontiguousarray(indices_obj, dtype=np.int32)
    if indptr_arr.shape[0] != n + 2:
        raise ValueError(f"indptr must have {n + 2} entries (rows 0..{n})")
    cdef long long[::1] ptr = indptr_arr
    cdef int[::1] idx = indices_arr
    cdef Py_ssize_t n_arcs = idx.shape[0]

    count_arr = np.zeros(n + 1, dtype=np.int64)
    covered_arr = np.zeros(n + 1, dtype=np.uint8)
    # pushes: n initial + one per decrement; each vertex self-decrements
    # once when covered and its neighbors decrement once per covering,
    # so 2n + 2E caps the total
    heap_arr = np.empty(2 * n + 2 * n_arcs + 8, dtype=np.int64)
    out_arr = np.empty(n, dtype=np.int32)

    cdef long long[::1] count = count_arr
    cdef unsigned char[::1] covered = covered_arr
    cdef long long[::1] heap = heap_arr
    cdef int[::1] out = out_arr

    cdef Py_ssize_t heap_size = 0
    cdef Py_ssize_t n_chosen = 0
    cdef long long remaining = n
    cdef long long key, c, unc
    cdef int v, u, x
    cdef Py_ssize_t k, t

    for v in range(1, n + 1):
        count[v] = ptr[v + 1] - ptr[v] + 1
        _heap_push(heap, &heap_size,
                   (count[v] << 33) | (1 << 32) | (_KEY_ID_SPAN - v))

    while remaining > 0:
        key = _heap_pop(heap, &heap_size)
        c = key >> 33
        v = <int> (_KEY_ID_SPAN - (key & 0xFFFFFFFF))
        if c != count[v]:
            continue
        out[n_chosen] = v
        n_chosen += 1
        if not covered[v]:
            covered[v] = 1
            remaining -= 1
            count[v] -= 1
            _heap_push(heap, &heap_size, (count[v] << 33) | (_KEY_ID_SPAN - v))
            for k in range(ptr[v], ptr[v + 1]):
                x = idx[k]
                count[x] -= 1
                unc = 0 if covered[x] else 1
                _heap_push(heap, &heap_size,
                           (count[x] << 33) | (unc << 32) | (_KEY_ID_SPAN - x))
        for t in range(ptr[v], ptr[v + 1]):
            u = idx[t]
            if covered[u]:
                continue
            covered[u] = 1
            remaining -= 1
            count[u] -= 1
            _heap_push(heap, &heap_size, (count[u] << 33) | (_KEY_ID_SPAN - u))
            for k in range(ptr[u], ptr[u + 1]):
                x = idx[k]
                count[x] -= 1
                unc = 0 if covered[x] else 1
                _heap_push(heap, &heap_size,
                           (count[x] << 33) | (unc << 32) | (_KEY_ID_SPAN - x))

    return out_arr[:n_chosen].copy()
