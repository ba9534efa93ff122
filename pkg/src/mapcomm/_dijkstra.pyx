# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Dijkstra kernel for grid path planning.

Behaviorally identical to ``_dijkstra_py.dijkstra_grid``: vertex costs,
strict relaxation, and (distance, row, col) lexicographic pop order, so the
two kernels return the same path on the same input.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline bint _less(double da, long ra, long ca,
                       double db, long rb, long cb) nogil:
    if da != db:
        return da < db
    if ra != rb:
        return ra < rb
    return ca < cb


def dijkstra_grid(cnp.ndarray[cnp.float64_t, ndim=2] cost, start, goal):
    """Min vertex-cost path on a 4-connected grid (see pure twin)."""
    cdef long rows = cost.shape[0]
    cdef long cols = cost.shape[1]
    cdef long n = rows * cols
    cdef long sr = start[0], sc = start[1]
    cdef long gr = goal[0], gc = goal[1]

    cdef cnp.ndarray[cnp.float64_t, ndim=1] dist = np.full(n, np.inf)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] prev = np.full(n, -1, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] done = np.zeros(n, dtype=np.uint8)

    # binary heap of (dist, row, col), array-backed
    cdef cnp.ndarray[cnp.float64_t, ndim=1] hd = np.empty(4 * n, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] hr = np.empty(4 * n, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] hc = np.empty(4 * n, dtype=np.int64)
    cdef long size = 0

    cdef double[::1] dv = dist
    cdef long[::1] pv = prev
    cdef unsigned char[::1] dn = done
    cdef double[::1] qd = hd
    cdef long[::1] qr = hr
    cdef long[::1] qc = hc

    cdef double d, nd, td
    cdef long r, c, nr, nc, node, i, parent, child, tr, tc, m
    cdef long dr[4]
    cdef long dc[4]
    dr[0] = -1; dr[1] = 1; dr[2] = 0; dr[3] = 0
    dc[0] = 0; dc[1] = 0; dc[2] = -1; dc[3] = 1

    dv[sr * cols + sc] = 0.0
    qd[0] = 0.0; qr[0] = sr; qc[0] = sc
    size = 1

    while size > 0:
        d = qd[0]; r = qr[0]; c = qc[0]
        # pop root
        size -= 1
        td = qd[size]; tr = qr[size]; tc = qc[size]
        i = 0
        while True:
            child = 2 * i + 1
            if child >= size:
                break
            if child + 1 < size and _less(qd[child + 1], qr[child + 1], qc[child + 1],
                                          qd[child], qr[child], qc[child]):
                child += 1
            if _less(qd[child], qr[child], qc[child], td, tr, tc):
                qd[i] = qd[child]; qr[i] = qr[child]; qc[i] = qc[child]
                i = child
            else:
                break
        if size > 0:
            qd[i] = td; qr[i] = tr; qc[i] = tc

        node = r * cols + c
        if dn[node]:
            continue
        dn[node] = 1
        if r == gr and c == gc:
            break
        for m in range(4):
            nr = r + dr[m]
            nc = c + dc[m]
            if nr < 0 or nr >= rows or nc < 0 or nc >= cols:
                continue
            if dn[nr * cols + nc]:
                continue
            nd = d + cost[nr, nc]
            if nd < dv[nr * cols + nc]:
                dv[nr * cols + nc] = nd
                pv[nr * cols + nc] = node
                # push
                if size == qd.shape[0]:
                    hd = np.concatenate([hd, np.empty_like(hd)])
                    hr = np.concatenate([hr, np.empty_like(hr)])
                    hc = np.concatenate([hc, np.empty_like(hc)])
                    qd = hd; qr = hr; qc = hc
                i = size
                size += 1
                while i > 0:
                    parent = (i - 1) // 2
                    if _less(nd, nr, nc, qd[parent], qr[parent], qc[parent]):
                        qd[i] = qd[parent]; qr[i] = qr[parent]; qc[i] = qc[parent]
                        i = parent
                    else:
                        break
                qd[i] = nd; qr[i] = nr; qc[i] = nc

    path = []
    node = gr * cols + gc
    while node != -1:
        path.append((node // cols, node % cols))
        if node == sr * cols + sc:
            break
        node = pv[node]
    path.reverse()
    return path
