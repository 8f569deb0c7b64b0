# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: cut profiling and Markov path sampling.

Transliteration of foliolab._kernels.pure; the two must agree exactly.
"""

import numpy as np

cimport numpy as cnp  # noqa


def cut_profile(arrays, bytes mask):
    cdef int n = arrays.n_tris
    cdef const int[:] partner = arrays.partner
    cdef const int[:] edge_id = arrays.edge_id
    cdef const signed char[:] flip = arrays.pivot_flip
    cdef const unsigned char[:] cut = mask

    cdef int[:] parent = np.arange(n, dtype=np.intc)
    cdef int h, p, a, b, ncomp, s, corner, ns, g, h0, fwd, g_tail, at_tail, sp
    cdef long steps, budget

    ncomp = n
    for h in range(3 * n):
        p = partner[h]
        if p > h and not cut[edge_id[h]]:
            a = h // 3
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            b = p // 3
            while parent[b] != b:
                parent[b] = parent[parent[b]]
                b = parent[b]
            if a != b:
                parent[a] = b
                ncomp -= 1

    cdef unsigned char[:] visited = np.zeros(3 * n, dtype=np.uint8)
    cdef int nbound = 0
    budget = 6 * n + 6
    for h0 in range(3 * n):
        if visited[h0]:
            continue
        if partner[h0] >= 0 and not cut[edge_id[h0]]:
            continue
        nbound += 1
        h = h0
        fwd = 1
        steps = 0
        while True:
            visited[h] = 1
            s = h % 3
            corner = (s + 1) % 3 if fwd else s
            ns = (corner + 2) % 3 if s == corner else corner
            g = 3 * (h // 3) + ns
            g_tail = 1 if ns == corner else 0
            while partner[g] >= 0 and not cut[edge_id[g]]:
                at_tail = 1 if g_tail == flip[g] else 0
                p = partner[g]
                sp = p % 3
                corner = sp if at_tail else (sp + 1) % 3
                ns = (corner + 2) % 3 if sp == corner else corner
                g = 3 * (p // 3) + ns
                g_tail = 1 if ns == corner else 0
                steps += 1
                if steps > budget:
                    raise RuntimeError("boundary walk does not close up")
            h = g
            fwd = g_tail
            steps += 1
            if steps > budget:
                raise RuntimeError("boundary walk does not close up")
            if h == h0 and fwd:
                break
    return ncomp, nbound


def sample_markov_path(cum_rows, start, uniforms):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] cum = np.ascontiguousarray(
        cum_rows, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] u = np.ascontiguousarray(
        uniforms, dtype=np.float64)
    cdef Py_ssize_t m = u.shape[0]
    cdef int k = cum.shape[1]
    cdef cnp.ndarray[cnp.int32_t, ndim=1] out = np.empty(m + 1, dtype=np.int32)
    cdef int state = start
    cdef Py_ssize_t i
    cdef int lo, hi, mid
    out[0] = state
    for i in range(m):
        # leftmost index with u[i] < cum[state, index]
        lo = 0
        hi = k
        while lo < hi:
            mid = (lo + hi) // 2
            if cum[state, mid] <= u[i]:
                lo = mid + 1
            else:
                hi = mid
        state = lo
        out[i + 1] = state
    return out
