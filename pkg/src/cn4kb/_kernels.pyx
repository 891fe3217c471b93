# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled graph kernels over CSR arrays; see _fallback.py for semantics."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()

ctypedef cnp.int64_t i64


def bfs_histogram(const i64[::1] indptr, const i64[::1] indices, Py_ssize_t n,
                  Py_ssize_t start, Py_ssize_t stop):
    cdef cnp.ndarray[i64, ndim=1] hist_arr = np.zeros(max(n, 1), dtype=np.int64)
    cdef i64[::1] hist = hist_arr
    cdef i64 *dist = <i64 *> malloc(max(n, 1) * sizeof(i64))
    cdef i64 *queue = <i64 *> malloc(max(n, 1) * sizeof(i64))
    cdef Py_ssize_t s, head, tail, k, i
    cdef i64 u, v, du, far, tgt
    cdef i64 best_len = 0, best_src = -1, best_tgt = -1
    if dist == NULL or queue == NULL:
        free(dist)
        free(queue)
        raise MemoryError()
    with nogil:
        for i in range(n):
            dist[i] = -1
        for s in range(start, stop):
            dist[s] = 0
            queue[0] = s
            head = 0
            tail = 1
            while head < tail:
                u = queue[head]
                head += 1
                du = dist[u] + 1
                for k in range(indptr[u], indptr[u + 1]):
                    v = indices[k]
                    if dist[v] < 0:
                        dist[v] = du
                        hist[du] += 1
                        queue[tail] = v
                        tail += 1
            far = dist[queue[tail - 1]]
            if far > best_len:
                tgt = queue[tail - 1]
                for i in range(tail):
                    if dist[queue[i]] == far and queue[i] < tgt:
                        tgt = queue[i]
                best_len = far
                best_src = s
                best_tgt = tgt
            for i in range(tail):
                dist[queue[i]] = -1
    free(dist)
    free(queue)
    return hist_arr, int(best_len), int(best_src), int(best_tgt)


def core_numbers(const i64[::1] indptr, const i64[::1] indices, Py_ssize_t n, extra):
    cdef cnp.ndarray[i64, ndim=1] deg_arr = (
        np.diff(np.asarray(indptr)) + np.asarray(extra, dtype=np.int64)).astype(np.int64)
    if n == 0:
        return deg_arr
    cdef i64[::1] deg = deg_arr
    cdef i64 md = deg_arr.max()
    cdef cnp.ndarray[i64, ndim=1] bin_arr = np.zeros(md + 1, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] pos_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] vert_arr = np.zeros(n, dtype=np.int64)
    cdef i64[::1] bin_ = bin_arr
    cdef i64[::1] pos = pos_arr
    cdef i64[::1] vert = vert_arr
    cdef i64 d, start, tmp, v, u, du, pu, pw, w
    cdef Py_ssize_t i, k
    with nogil:
        for i in range(n):
            bin_[deg[i]] += 1
        start = 0
        for d in range(md + 1):
            tmp = bin_[d]
            bin_[d] = start
            start += tmp
        for i in range(n):
            pos[i] = bin_[deg[i]]
            vert[pos[i]] = i
            bin_[deg[i]] += 1
        d = md
        while d > 0:
            bin_[d] = bin_[d - 1]
            d -= 1
        bin_[0] = 0
        for i in range(n):
            v = vert[i]
            for k in range(indptr[v], indptr[v + 1]):
                u = indices[k]
                if deg[u] > deg[v]:
                    du = deg[u]
                    pu = pos[u]
                    pw = bin_[du]
                    w = vert[pw]
                    if u != w:
                        pos[u] = pw
                        pos[w] = pu
                        vert[pu] = w
                        vert[pw] = u
                    bin_[du] += 1
                    deg[u] = du - 1
    return deg_arr


def tarjan_scc(const i64[::1] indptr, const i64[::1] indices, Py_ssize_t n):
    cdef cnp.ndarray[i64, ndim=1] comp_arr = np.full(n, -1, dtype=np.int64)
    if n == 0:
        return comp_arr
    cdef i64[::1] comp = comp_arr
    cdef cnp.ndarray[i64, ndim=1] index_arr = np.full(n, -1, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] low_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] stack_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] wv_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] wk_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] on_arr = np.zeros(n, dtype=np.uint8)
    cdef i64[::1] index = index_arr
    cdef i64[::1] low = low_arr
    cdef i64[::1] stack = stack_arr
    cdef i64[::1] wv = wv_arr
    cdef i64[::1] wk = wk_arr
    cdef cnp.uint8_t[::1] on_stack = on_arr
    cdef i64 counter = 0, n_comp = 0, sp = 0, wp = 0
    cdef i64 root, v, k, w, p
    with nogil:
        for root in range(n):
            if index[root] >= 0:
                continue
            wv[0] = root
            wk[0] = indptr[root]
            wp = 1
            index[root] = counter
            low[root] = counter
            counter += 1
            stack[sp] = root
            sp += 1
            on_stack[root] = 1
            while wp > 0:
                v = wv[wp - 1]
                k = wk[wp - 1]
                if k < indptr[v + 1]:
                    wk[wp - 1] = k + 1
                    w = indices[k]
                    if index[w] < 0:
                        index[w] = counter
                        low[w] = counter
                        counter += 1
                        stack[sp] = w
                        sp += 1
                        on_stack[w] = 1
                        wv[wp] = w
                        wk[wp] = indptr[w]
                        wp += 1
                    elif on_stack[w] and index[w] < low[v]:
                        low[v] = index[w]
                    continue
                wp -= 1
                if wp > 0:
                    p = wv[wp - 1]
                    if low[v] < low[p]:
                        low[p] = low[v]
                if low[v] == index[v]:
                    while True:
                        sp -= 1
                        w = stack[sp]
                        on_stack[w] = 0
                        comp[w] = n_comp
                        if w == v:
                            break
                    n_comp += 1
    return comp_arr


def triangle_counts(const i64[::1] indptr, const i64[::1] indices, Py_ssize_t n):
    cdef cnp.ndarray[i64, ndim=1] tri_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] mark_arr = np.zeros(max(n, 1), dtype=np.uint8)
    cdef i64[::1] tri = tri_arr
    cdef cnp.uint8_t[::1] mark = mark_arr
    cdef i64 u, v, w, a, k
    with nogil:
        for u in range(n):
            for a in range(indptr[u], indptr[u + 1]):
                mark[indices[a]] = 1
            for a in range(indptr[u], indptr[u + 1]):
                v = indices[a]
                if v <= u:
                    continue
                for k in range(indptr[v], indptr[v + 1]):
                    w = indices[k]
                    if w > v and mark[w]:
                        tri[u] += 1
                        tri[v] += 1
                        tri[w] += 1
            for a in range(indptr[u], indptr[u + 1]):
                mark[indices[a]] = 0
    return tri_arr
