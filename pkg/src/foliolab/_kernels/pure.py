"""Pure-Python kernels; reference implementation for the compiled core.

Both backends must agree bit for bit: the compiled module is a
transliteration of the routines below.
"""

from bisect import bisect_right

import numpy as np


def cut_profile(arrays, mask):
    """(components, boundary cycles) of the surface cut along the masked
    edges.  ``arrays`` is a foliolab.surfaces.SurfaceArrays, ``mask`` a
    bytes object indexed by edge id."""
    n = arrays.n_tris
    partner = arrays.partner
    edge_id = arrays.edge_id
    flip = arrays.pivot_flip

    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    ncomp = n
    for h in range(3 * n):
        p = partner[h]
        if p > h and not mask[edge_id[h]]:
            a, b = find(h // 3), find(p // 3)
            if a != b:
                parent[a] = b
                ncomp -= 1

    visited = bytearray(3 * n)
    nbound = 0
    budget = 6 * n + 6
    for h0 in range(3 * n):
        if visited[h0] or (partner[h0] >= 0 and not mask[edge_id[h0]]):
            continue
        nbound += 1
        h, fwd = h0, True
        steps = 0
        while True:
            visited[h] = 1
            # rotate around the pivot endpoint of (h, fwd)
            s = h % 3
            corner = (s + 1) % 3 if fwd else s
            ns = (corner + 2) % 3 if s == corner else corner
            g = 3 * (h // 3) + ns
            g_tail = (ns == corner)
            while partner[g] >= 0 and not mask[edge_id[g]]:
                at_tail = (g_tail == (flip[g] == 1))
                p = partner[g]
                sp = p % 3
                corner = sp if at_tail else (sp + 1) % 3
                ns = (corner + 2) % 3 if sp == corner else corner
                g = 3 * (p // 3) + ns
                g_tail = (ns == corner)
                steps += 1
                if steps > budget:
                    raise RuntimeError("boundary walk does not close up")
            h, fwd = g, g_tail
            steps += 1
            if steps > budget:
                raise RuntimeError("boundary walk does not close up")
            if h == h0 and fwd:
                break
    return ncomp, nbound


def sample_markov_path(cum_rows, start, uniforms):
    """Walk a finite chain: cum_rows[i] is the cumulative distribution of
    row i, uniforms the pre-drawn innovations.  Returns the visited
    states including the start (length ``len(uniforms) + 1``)."""
    cum = [list(map(float, row)) for row in cum_rows]
    m = len(uniforms)
    out = np.empty(m + 1, dtype=np.int32)
    state = int(start)
    out[0] = state
    for i in range(m):
        state = bisect_right(cum[state], float(uniforms[i]))
        out[i + 1] = state
    return out
