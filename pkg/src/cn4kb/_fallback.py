"""Pure-Python versions of the graph kernels.

Same signatures and results as the compiled module; used when it is not
built or when ``CN4KB_PURE_PYTHON`` is set.  Graphs are CSR arrays
(``indptr``, ``indices``) over vertices ``0 .. n-1``.
"""

from __future__ import annotations

from collections import deque

import numpy as np


def bfs_histogram(indptr, indices, n, start, stop):
    """BFS from every source in ``[start, stop)``.

    Returns ``(hist, best_len, best_src, best_tgt)`` where ``hist[d]`` counts
    the ordered pairs (s, t), s != t, at distance d, and the best triple is
    the longest finite distance with the smallest (s, t) reaching it.
    """
    ip = indptr.tolist()
    ix = indices.tolist()
    hist = [0] * max(n, 1)
    dist = [-1] * n
    best_len, best_src, best_tgt = 0, -1, -1
    for s in range(start, stop):
        dist[s] = 0
        seen = [s]
        q = deque([s])
        while q:
            u = q.popleft()
            du = dist[u] + 1
            for k in range(ip[u], ip[u + 1]):
                v = ix[k]
                if dist[v] < 0:
                    dist[v] = du
                    hist[du] += 1
                    seen.append(v)
                    q.append(v)
        far = dist[seen[-1]]
        if far > best_len:
            best_len = far
            best_src = s
            best_tgt = min(v for v in seen if dist[v] == far)
        for v in seen:
            dist[v] = -1
    return np.array(hist, dtype=np.int64), best_len, best_src, best_tgt


def core_numbers(indptr, indices, n, extra):
    """Batagelj-Zaversnik peeling.

    ``extra[v]`` is added to the degree of ``v`` and never removed (a kept
    self-loop contributes 2).  Neighbour lists must not contain ``v`` itself.
    """
    ip = indptr.tolist()
    ix = indices.tolist()
    deg = [ip[v + 1] - ip[v] + int(extra[v]) for v in range(n)]
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    md = max(deg)
    bin_ = [0] * (md + 1)
    for d in deg:
        bin_[d] += 1
    start = 0
    for d in range(md + 1):
        bin_[d], start = start, start + bin_[d]
    pos = [0] * n
    vert = [0] * n
    for v in range(n):
        pos[v] = bin_[deg[v]]
        vert[pos[v]] = v
        bin_[deg[v]] += 1
    for d in range(md, 0, -1):
        bin_[d] = bin_[d - 1]
    bin_[0] = 0
    for i in range(n):
        v = vert[i]
        for k in range(ip[v], ip[v + 1]):
            u = ix[k]
            if deg[u] > deg[v]:
                du = deg[u]
                pu = pos[u]
                pw = bin_[du]
                w = vert[pw]
                if u != w:
                    pos[u], pos[w] = pw, pu
                    vert[pu], vert[pw] = w, u
                bin_[du] += 1
                deg[u] = du - 1
    return np.array(deg, dtype=np.int64)


def tarjan_scc(indptr, indices, n):
    """Iterative Tarjan; component ids are assigned in completion order."""
    ip = indptr.tolist()
    ix = indices.tolist()
    index = [-1] * n
    low = [0] * n
    comp = [-1] * n
    on_stack = [False] * n
    stack = []
    counter = 0
    n_comp = 0
    for root in range(n):
        if index[root] >= 0:
            continue
        work = [(root, ip[root])]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, k = work[-1]
            if k < ip[v + 1]:
                work[-1] = (v, k + 1)
                w = ix[k]
                if index[w] < 0:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, ip[w]))
                elif on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
                continue
            work.pop()
            if work:
                p = work[-1][0]
                if low[v] < low[p]:
                    low[p] = low[v]
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = n_comp
                    if w == v:
                        break
                n_comp += 1
    return np.array(comp, dtype=np.int64)


def triangle_counts(indptr, indices, n):
    """Triangles through each vertex of a simple undirected graph."""
    ip = indptr.tolist()
    ix = indices.tolist()
    tri = [0] * n
    mark = [False] * n
    for u in range(n):
        nbrs = ix[ip[u]:ip[u + 1]]
        for v in nbrs:
            mark[v] = True
        for v in nbrs:
            if v <= u:
                continue
            for k in range(ip[v], ip[v + 1]):
                w = ix[k]
                if w > v and mark[w]:
                    tri[u] += 1
                    tri[v] += 1
                    tri[w] += 1
        for v in nbrs:
            mark[v] = False
    return np.array(tri, dtype=np.int64)
