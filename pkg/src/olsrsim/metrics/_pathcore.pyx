# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled route-computation kernel.

Line-for-line twin of ``_pathcore_py``: identical traversal order, identical
arithmetic order, identical operation counts. IEEE-754 double arithmetic with
the same operation sequence keeps results bit-equal to the pure backend.
"""

from libc.stdlib cimport free, malloc

cdef int HOP = 0
cdef int ETX = 1
cdef int INVETX = 2
cdef int ML = 3
cdef int MD = 4


cdef struct HeapItem:
    double prio
    int hops
    int node


cdef inline bint _less(HeapItem a, HeapItem b) noexcept:
    if a.prio != b.prio:
        return a.prio < b.prio
    if a.hops != b.hops:
        return a.hops < b.hops
    return a.node < b.node


cdef inline void _heap_push(HeapItem* heap, int* size, HeapItem item) noexcept:
    cdef int i = size[0]
    cdef int parent
    cdef HeapItem tmp
    heap[i] = item
    size[0] += 1
    while i > 0:
        parent = (i - 1) >> 1
        if _less(heap[i], heap[parent]):
            tmp = heap[parent]
            heap[parent] = heap[i]
            heap[i] = tmp
            i = parent
        else:
            break


cdef inline HeapItem _heap_pop(HeapItem* heap, int* size) noexcept:
    cdef HeapItem top = heap[0]
    cdef int n = size[0] - 1
    cdef int i = 0
    cdef int child
    cdef HeapItem tmp
    size[0] = n
    heap[0] = heap[n]
    while True:
        child = 2 * i + 1
        if child >= n:
            break
        if child + 1 < n and _less(heap[child + 1], heap[child]):
            child += 1
        if _less(heap[child], heap[i]):
            tmp = heap[i]
            heap[i] = heap[child]
            heap[child] = tmp
            i = child
        else:
            break
    return top


def compute_paths_kernel(int kind, int n, eu, ev, edf, edr, eowd, int src):
    """Single-source best paths over an indexed edge list (see pure twin)."""
    cdef int m = len(eu)
    cdef long long adds = 0, mults = 0, divs = 0, compares = 0
    cdef int e, i, u, v, head, idx, lu, prev_layer, bp, cand_hops
    cdef double cand, bv, vu
    cdef bint have, maximize, improved

    cdef int* c_eu = <int*> malloc(max(m, 1) * sizeof(int))
    cdef int* c_ev = <int*> malloc(max(m, 1) * sizeof(int))
    cdef double* weights = <double*> malloc(max(m, 1) * sizeof(double))
    # CSR adjacency: adj_nbr/adj_edge slices per node, id-sorted.
    cdef int* deg = <int*> malloc(n * sizeof(int))
    cdef int* start = <int*> malloc((n + 1) * sizeof(int))
    cdef int* adj_nbr = <int*> malloc(max(2 * m, 1) * sizeof(int))
    cdef int* adj_edge = <int*> malloc(max(2 * m, 1) * sizeof(int))
    cdef int* fill = <int*> malloc(n * sizeof(int))
    cdef int* next_hop = <int*> malloc(n * sizeof(int))
    cdef double* value = <double*> malloc(n * sizeof(double))
    cdef int* hops = <int*> malloc(n * sizeof(int))
    cdef int* layer = <int*> malloc(n * sizeof(int))
    cdef int* bfs_order = <int*> malloc(n * sizeof(int))
    cdef double* best = <double*> malloc(n * sizeof(double))
    cdef char* settled = <char*> malloc(n * sizeof(char))
    cdef char* reached = <char*> malloc(n * sizeof(char))
    cdef HeapItem* heap = NULL
    cdef int heap_size = 0, heap_cap
    cdef int bfs_len, j, k, nbr_j, edge_j
    cdef HeapItem item
    cdef double unreached = float("nan")

    if (c_eu == NULL or c_ev == NULL or weights == NULL or deg == NULL
            or start == NULL or adj_nbr == NULL or adj_edge == NULL
            or fill == NULL or next_hop == NULL or value == NULL
            or hops == NULL or layer == NULL or bfs_order == NULL
            or best == NULL or settled == NULL or reached == NULL):
        free(c_eu); free(c_ev); free(weights); free(deg); free(start)
        free(adj_nbr); free(adj_edge); free(fill); free(next_hop)
        free(value); free(hops); free(layer); free(bfs_order)
        free(best); free(settled); free(reached)
        raise MemoryError()

    try:
        for e in range(m):
            c_eu[e] = eu[e]
            c_ev[e] = ev[e]

        if kind == HOP:
            for e in range(m):
                weights[e] = 1.0
        elif kind == ETX:
            for e in range(m):
                weights[e] = 1.0 / (<double> edf[e] * <double> edr[e])
            mults += m
            divs += m
        elif kind == INVETX or kind == ML:
            for e in range(m):
                weights[e] = <double> edf[e] * <double> edr[e]
            mults += m
        else:  # MD
            for e in range(m):
                weights[e] = <double> eowd[e]

        for i in range(n):
            deg[i] = 0
        for e in range(m):
            deg[c_eu[e]] += 1
            deg[c_ev[e]] += 1
        start[0] = 0
        for i in range(n):
            start[i + 1] = start[i] + deg[i]
            fill[i] = start[i]
        for e in range(m):
            u = c_eu[e]
            v = c_ev[e]
            adj_nbr[fill[u]] = v
            adj_edge[fill[u]] = e
            fill[u] += 1
            adj_nbr[fill[v]] = u
            adj_edge[fill[v]] = e
            fill[v] += 1
        # Insertion-sort each adjacency slice by (neighbor, edge); neighbor
        # ids are unique per slice, the edge tie-break mirrors the pure twin.
        for i in range(n):
            for j in range(start[i] + 1, start[i + 1]):
                nbr_j = adj_nbr[j]
                edge_j = adj_edge[j]
                k = j - 1
                while k >= start[i] and (
                    adj_nbr[k] > nbr_j or (adj_nbr[k] == nbr_j and adj_edge[k] > edge_j)
                ):
                    adj_nbr[k + 1] = adj_nbr[k]
                    adj_edge[k + 1] = adj_edge[k]
                    k -= 1
                adj_nbr[k + 1] = nbr_j
                adj_edge[k + 1] = edge_j

        for i in range(n):
            next_hop[i] = -1
            value[i] = unreached
            hops[i] = -1

        if kind == INVETX:
            for i in range(n):
                layer[i] = -1
            layer[src] = 0
            bfs_order[0] = src
            bfs_len = 1
            head = 0
            while head < bfs_len:
                u = bfs_order[head]
                head += 1
                lu = layer[u]
                for j in range(start[u], start[u + 1]):
                    v = adj_nbr[j]
                    if layer[v] < 0:
                        layer[v] = lu + 1
                        bfs_order[bfs_len] = v
                        bfs_len += 1
            for i in range(n):
                best[i] = 0.0
            value[src] = 0.0
            hops[src] = 0
            for idx in range(1, bfs_len):
                v = bfs_order[idx]
                prev_layer = layer[v] - 1
                have = False
                bv = 0.0
                bp = -1
                for j in range(start[v], start[v + 1]):
                    u = adj_nbr[j]
                    if layer[u] != prev_layer:
                        continue
                    cand = best[u] + weights[adj_edge[j]]
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
            return (
                [next_hop[i] for i in range(n)],
                [value[i] for i in range(n)],
                [hops[i] for i in range(n)],
                (adds, mults, divs, compares),
            )

        maximize = kind == ML
        heap_cap = 4 * (m + n) + 8
        heap = <HeapItem*> malloc(heap_cap * sizeof(HeapItem))
        if heap == NULL:
            raise MemoryError()
        for i in range(n):
            settled[i] = 0
            reached[i] = 0
        reached[src] = 1
        value[src] = 1.0 if maximize else 0.0
        hops[src] = 0
        item.prio = -value[src] if maximize else value[src]
        item.hops = 0
        item.node = src
        _heap_push(heap, &heap_size, item)
        while heap_size > 0:
            item = _heap_pop(heap, &heap_size)
            u = item.node
            if settled[u]:
                continue
            settled[u] = 1
            vu = value[u]
            lu = hops[u]
            for j in range(start[u], start[u + 1]):
                v = adj_nbr[j]
                if settled[v]:
                    continue
                if maximize:
                    cand = vu * weights[adj_edge[j]]
                    mults += 1
                else:
                    cand = vu + weights[adj_edge[j]]
                    adds += 1
                cand_hops = lu + 1
                if not reached[v]:
                    reached[v] = 1
                else:
                    compares += 1
                    if maximize:
                        improved = cand > value[v] or (cand == value[v] and cand_hops < hops[v])
                    else:
                        improved = cand < value[v] or (cand == value[v] and cand_hops < hops[v])
                    if not improved:
                        continue
                value[v] = cand
                hops[v] = cand_hops
                next_hop[v] = v if u == src else next_hop[u]
                item.prio = -cand if maximize else cand
                item.hops = cand_hops
                item.node = v
                _heap_push(heap, &heap_size, item)
        for i in range(n):
            if not reached[i]:
                value[i] = unreached
                hops[i] = -1
        return (
            [next_hop[i] for i in range(n)],
            [value[i] for i in range(n)],
            [hops[i] for i in range(n)],
            (adds, mults, divs, compares),
        )
    finally:
        free(c_eu); free(c_ev); free(weights); free(deg); free(start)
        free(adj_nbr); free(adj_edge); free(fill); free(next_hop)
        free(value); free(hops); free(layer); free(bfs_order)
        free(best); free(settled); free(reached)
        if heap != NULL:
            free(heap)
