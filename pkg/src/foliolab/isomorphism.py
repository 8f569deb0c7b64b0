"""Canonical forms and isomorphism tests for triangulated surfaces.

Two surfaces are isomorphic when there is a bijection of triangles and
vertices preserving incidence and gluings.  We compute a canonical
encoding by running a breadth-first relabelling from every rooted
symmetry (triangle x rotation x reflection) and keeping the smallest
string; equality of encodings then decides isomorphism.  Optional
per-triangle flags are carried along, which classifies pairs
(surface, subdomain) as well.
"""

from __future__ import annotations

from .surfaces import TriangulatedSurface

_SYMS = tuple((rot, refl) for refl in (0, 1) for rot in (0, 1, 2))


def _stored_pos(rot, refl, i):
    return (rot + i) % 3 if not refl else (rot - i) % 3


def _stored_side(rot, refl, j):
    return (rot + j) % 3 if not refl else (rot - j - 1) % 3


def _canonical_side(rot, refl, s):
    return (s - rot) % 3 if not refl else (rot - 1 - s) % 3


def _encode_from_root(surface, flags, root, rot, refl):
    tris = surface.triangles
    glu = surface.gluings
    sym = {root: (rot, refl)}
    index = {root: 0}
    order = [root]
    out = []
    head = 0
    vmap: dict[int, int] = {}
    while head < len(order):
        t = order[head]
        head += 1
        r, f = sym[t]
        tri = tris[t]
        canon_tri = []
        for p in range(3):
            v = tri[_stored_pos(r, f, p)]
            if v not in vmap:
                vmap[v] = len(vmap)
            canon_tri.append(vmap[v])
        record = [tuple(canon_tri), -2 if flags is None else int(flags(t))]
        for j in range(3):
            s = _stored_side(r, f, j)
            mate = glu.get((t, s))
            if mate is None:
                record.append(-1)
                continue
            pt, ps = mate
            # canonical head vertex of our side j
            hv = tri[_stored_pos(r, f, (j + 1) % 3)]
            if pt not in sym:
                u, w = surface.side_vertices((pt, ps))
                if u == hv:
                    psym = (ps, 0)
                elif w == hv:
                    psym = ((ps + 1) % 3, 1)
                else:  # impossible on validated surfaces
                    raise ValueError("gluing does not share the pivot vertex")
                sym[pt] = psym
                index[pt] = len(order)
                order.append(pt)
            pr, pf = sym[pt]
            jj = _canonical_side(pr, pf, ps)
            tv = surface.side_vertices((pt, ps))
            canon_tail = tv[1] if pf else tv[0]
            # does their canonical direction of that side equal ours?
            our_tail = tri[_stored_pos(r, f, j)]
            # their canonical side jj runs from canonical pos jj; its stored
            # tail depends on the reflection
            their_tail = tris[pt][_stored_pos(pr, pf, jj)]
            record.append((index[pt], jj, 1 if their_tail == our_tail else 0))
        out.append(tuple(record))
    return tuple(out), len(order)


def _component_encoding(surface, flags, component):
    best = None
    for root in sorted(component):
        for rot, refl in _SYMS:
            enc, size = _encode_from_root(surface, flags, root, rot, refl)
            if size != len(component):  # cannot happen: components are closed
                raise AssertionError("BFS escaped the component")
            if best is None or enc < best:
                best = enc
    return best


def canonical_form(surface: TriangulatedSurface, flags=None):
    """A hashable encoding equal for exactly the isomorphic surfaces.

    ``flags``: optional callable triangle id -> int carried through the
    relabelling (used to encode marked subdomains).
    """
    comps = surface.triangle_components
    encs = sorted(_component_encoding(surface, flags, c) for c in comps)
    return tuple(encs)


def _quick_invariants(surface):
    return (
        len(surface.triangles),
        len(surface.vertices),
        len(surface.edges),
        len(surface.boundary_sides),
        len(surface.boundary_cycles),
        len(surface.triangle_components),
    )


def are_isomorphic(s1: TriangulatedSurface, s2: TriangulatedSurface,
                   flags1=None, flags2=None) -> bool:
    if _quick_invariants(s1) != _quick_invariants(s2):
        return False
    return canonical_form(s1, flags1) == canonical_form(s2, flags2)
