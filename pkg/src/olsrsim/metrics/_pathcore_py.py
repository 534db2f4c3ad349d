"""Pure-Python route-computation kernel.

The compiled kernel in ``_pathcore.pyx`` is a line-for-line twin of this
module: same traversal order, same arithmetic order, same operation counts.
Any change here must be mirrored there (the backend-agreement tests enforce
this on random graphs).
"""

from __future__ import annotations

from heapq import heappop, heappush

HOP = 0
ETX = 1
INVETX = 2
ML = 3
MD = 4

_UNREACHED = float("nan")


def compute_paths_kernel(kind, n, eu, ev, edf, edr, eowd, src):
    """Single-source best paths over an indexed edge list.

    Nodes are 0..n-1; edges are undirected and pre-filtered (d_f*d_r > 0).
    Returns (next_hop, value, hops, (adds, mults, divs, compares)) where
    next_hop[i] == -1 marks an unreachable node.
    """
    m = len(eu)
    adds = 0
    mults = 0
    divs = 0
    compares = 0

    weights = [0.0] * m
    if kind == HOP:
        for e in range(m):
            weights[e] = 1.0
    elif kind == ETX:
        for e in range(m):
            weights[e] = 1.0 / (edf[e] * edr[e])
        mults += m
        divs += m
    elif kind == INVETX or kind == ML:
        for e in range(m):
            weights[e] = edf[e] * edr[e]
        mults += m
    else:  # MD
        for e in range(m):
            weights[e] = eowd[e]

    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for e in range(m):
        adj[eu[e]].append((ev[e], e))
        adj[ev[e]].append((eu[e], e))
    for lst in adj:
        lst.sort()

    next_hop = [-1] * n
    value = [_UNREACHED] * n
    hops = [-1] * n

    if kind == INVETX:
        # BFS layering for minimum hop counts, then a per-layer DP maximizing
        # the summed link products over the min-hop DAG. Hop-first ordering
        # keeps the resulting next hops loop-free.
        layer = [-1] * n
        layer[src] = 0
        bfs_order = [src]
        head = 0
        while head < len(bfs_order):
            u = bfs_order[head]
            head += 1
            lu = layer[u]
            for v, _ in adj[u]:
                if layer[v] < 0:
                    layer[v] = lu + 1
                    bfs_order.append(v)
        best = [0.0] * n
        value[src] = 0.0
        hops[src] = 0
        for idx in range(1, len(bfs_order)):
            v = bfs_order[idx]
            prev_layer = layer[v] - 1
            have = False
            bv = 0.0
            bp = -1
            for u, e in adj[v]:
                if layer[u] != prev_layer:
                    continue
                cand = best[u] + weights[e]
                adds += 1
                if not have:
                    have = True
                    bv = cand
                    bp = u
                else:
                    compares += 1
                    if cand > bv:
                        bv = cand
                        bp = u
            best[v] = bv
            value[v] = bv
            hops[v] = layer[v]
            next_hop[v] = v if bp == src else next_hop[bp]
        return next_hop, value, hops, (adds, mults, divs, compares)

    maximize = kind == ML
    settled = [False] * n
    reached = [False] * n
    reached[src] = True
    value[src] = 1.0 if maximize else 0.0
    hops[src] = 0
    heap: list[tuple[float, int, int]] = [(-value[src] if maximize else value[src], 0, src)]
    while heap:
        _, _, u = heappop(heap)
        if settled[u]:
            continue
        settled[u] = True
        vu = value[u]
        hu = hops[u]
        for v, e in adj[u]:
            if settled[v]:
                continue
            if maximize:
                cand = vu * weights[e]
                mults += 1
            else:
                cand = vu + weights[e]
                adds += 1
            cand_hops = hu + 1
            if not reached[v]:
                reached[v] = True
            else:
                compares += 1
                if maximize:
                    if not (cand > value[v] or (cand == value[v] and cand_hops < hops[v])):
                        continue
                else:
                    if not (cand < value[v] or (cand == value[v] and cand_hops < hops[v])):
                        continue
            value[v] = cand
            hops[v] = cand_hops
            next_hop[v] = v if u == src else next_hop[u]
            heappush(heap, (-cand if maximize else cand, cand_hops, v))
    for i in range(n):
        if not reached[i]:
            value[i] = _UNREACHED
            hops[i] = -1
    return next_hop, value, hops, (adds, mults, divs, compares)
