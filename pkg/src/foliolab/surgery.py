"""Cut/glue/sum/graft calculus on surfaces and prismatic foliations.

Surface-level helpers (boundary refinement, circle gluing, vertex-star
removal, cone capping, planarization) keep exact control of the Euler
characteristic; the foliation-level operations lift them pile by pile
with exact rational measure bookkeeping.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from .foliation import (
    EMPTY_TRANSVERSAL,
    FoliationError,
    GluingMatch,
    Pile,
    PrismaticFoliation,
    TransversalSpec,
    as_fraction,
    normalize_vertical,
    require_valid,
    validate_transversal,
)
from .surfaces import (
    BarySubdivision,
    CurveSystem,
    CycleSearchError,
    InvalidCurveSystemError,
    NonOrientableError,
    Side,
    TriangulatedSurface,
    classify_surface,
    cut_along_with_data,
    find_nonseparating_cycle,
    sub_surface,
)


class SurgeryError(ValueError):
    """A surgery precondition failed."""


# ---------------------------------------------------------------------------
# surface-level helpers
# ---------------------------------------------------------------------------


def disjoint_union(s1: TriangulatedSurface, s2: TriangulatedSurface):
    """Union with s2 relabelled; returns (surface, tri_map2, vertex_map2)."""
    t_off = max(s1.triangles, default=-1) + 1 - min(s2.triangles, default=0)
    v_off = max(s1.vertices, default=-1) + 1 - min(s2.vertices, default=0)
    tri_map = {t: t + t_off for t in s2.triangles}
    v_map = {v: v + v_off for v in s2.vertices}
    tris = dict(s1.triangles)
    for t, tri in s2.triangles.items():
        tris[tri_map[t]] = tuple(v_map[v] for v in tri)
    glu = dict(s1.gluings)
    for a, b in s2.gluings.items():
        glu[(tri_map[a[0]], a[1])] = (tri_map[b[0]], b[1])
    return TriangulatedSurface(tris, glu, validate=False), tri_map, v_map


def anchored_cycle(surface: TriangulatedSurface, cycle_index: int,
                   signs=None):
    """A boundary walk anchored at its minimal vertex.

    When orientation signs are given, the walk direction is flipped if
    needed so that positively-oriented triangles are traversed forward;
    gluing two such walks against each other then keeps the surface
    orientable.
    """
    walk = surface.boundary_cycles[cycle_index]
    if signs is not None:
        side0, fwd0 = walk[0]
        if (signs[side0[0]] > 0) != fwd0:
            walk = tuple((s, not f) for s, f in reversed(walk))
    verts = surface.cycle_vertices(walk)
    k = verts.index(min(verts))
    return tuple(walk[k:] + walk[:k])


def split_boundary_side(surface: TriangulatedSurface, side: Side, k: int):
    """Split a boundary side into k collinear pieces.

    Returns (surface, side_map) where side_map tracks every relocated
    side of the subdivided triangle.
    """
    if k < 2:
        return surface, {}
    if side in surface.gluings:
        raise SurgeryError(f"{side} is not a boundary side")
    t, s = side
    tri = surface.triangles[t]
    a, b, c = tri[s], tri[(s + 1) % 3], tri[(s + 2) % 3]
    fresh_v = surface.fresh_vertex()
    fresh_t = surface.fresh_triangle()
    mids = [a] + [fresh_v + i for i in range(k - 1)] + [b]
    ids = [t] + [fresh_t + i for i in range(k - 1)]
    tris = dict(surface.triangles)
    for j, tid in enumerate(ids):
        tris[tid] = (mids[j], mids[j + 1], c)
    side_map = {
        (t, s): (ids[0], 0),
        (t, (s + 1) % 3): (ids[-1], 1),
        (t, (s + 2) % 3): (ids[0], 2),
    }
    glu = {}
    for x, y in surface.gluings.items():
        glu[side_map.get(x, x)] = side_map.get(y, y)
    for j in range(k - 1):
        glu[(ids[j], 1)] = (ids[j + 1], 2)
        glu[(ids[j + 1], 2)] = (ids[j], 1)
    return TriangulatedSurface(tris, glu, validate=False), side_map


def refine_boundary_cycle(surface: TriangulatedSurface, cycle_index: int,
                          factor: int) -> TriangulatedSurface:
    """Split every side of one boundary circle into ``factor`` pieces."""
    if factor < 2:
        return surface
    sides = [s for s, _ in surface.boundary_cycles[cycle_index]]
    work = surface
    pending = list(sides)
    while pending:
        side = pending.pop()
        work, smap = split_boundary_side(work, side, factor)
        pending = [smap.get(s, s) for s in pending]
    return work


class DegenerateGluingError(SurgeryError):
    """Merging the circles would collapse a triangle; subdivide first."""


def _merge_vertices(surface: TriangulatedSurface, pairs):
    parent: dict[int, int] = {}

    def find(v):
        root = v
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(v, v) != v:
            parent[v], v = root, parent[v]
        return root

    for x, y in pairs:
        rx, ry = find(x), find(y)
        if rx != ry:
            rx, ry = max(rx, ry), min(rx, ry)
            parent[rx] = ry
    tris = {}
    for t, tri in surface.triangles.items():
        new = tuple(find(v) for v in tri)
        if len(set(new)) != 3:
            raise DegenerateGluingError(
                f"triangle {t} degenerates to {new} under the gluing")
        tris[t] = new
    vmap = {v: find(v) for v in surface.vertices}
    return TriangulatedSurface(tris, surface.gluings, validate=False), vmap


def glue_surfaces(s1: TriangulatedSurface, cycle1: int,
                  s2: TriangulatedSurface | None, cycle2: int,
                  twist: int = 0):
    """Glue two boundary circles (of one surface or of two).

    Circle lengths are refined to a common multiple; the identification
    reverses the walk direction, so gluing oriented pieces stays
    orientable.  A degenerate merge triggers a barycentric subdivision
    and a retry.  Returns (surface, vmap1, vmap2) with the vertex
    relabelling applied to each input.
    """
    if s2 is None and cycle1 == cycle2:
        raise SurgeryError("cannot glue a boundary circle to itself")
    from .surfaces import orientation_signs
    if s2 is None:
        work, vmap1, vmap2 = s1, {v: v for v in s1.vertices}, None
        m1 = min(s1.cycle_vertices(s1.boundary_cycles[cycle1]))
        m2 = min(s1.cycle_vertices(s1.boundary_cycles[cycle2]))
    else:
        work, _, vmap2 = disjoint_union(s1, s2)
        vmap1 = {v: v for v in s1.vertices}
        m1 = min(s1.cycle_vertices(s1.boundary_cycles[cycle1]))
        m2 = vmap2[min(s2.cycle_vertices(s2.boundary_cycles[cycle2]))]

    for attempt in range(4):
        c1 = work.boundary_cycle_with_vertex(m1)
        c2 = work.boundary_cycle_with_vertex(m2)
        l1, l2 = len(work.boundary_cycles[c1]), len(work.boundary_cycles[c2])
        common = lcm(l1, l2)
        if common > l1:
            work = refine_boundary_cycle(work, c1, common // l1)
            c2 = work.boundary_cycle_with_vertex(m2)
        if common > l2:
            work = refine_boundary_cycle(work, c2, common // l2)
        c1 = work.boundary_cycle_with_vertex(m1)
        c2 = work.boundary_cycle_with_vertex(m2)
        signs = orientation_signs(work)
        walk1 = anchored_cycle(work, c1, signs)
        walk2 = anchored_cycle(work, c2, signs)
        u = work.cycle_vertices(walk1)
        w = work.cycle_vertices(walk2)
        n = len(walk1)
        pairs = []
        for i in range(n):
            pairs.append((u[i], w[(twist - i + 1) % n]))
        try:
            merged, vmap = _merge_vertices(work, pairs)
        except DegenerateGluingError:
            work = BarySubdivision(work).surface
            twist *= 2
            continue
        glu = dict(merged.gluings)
        for i in range(n):
            a = walk1[i][0]
            b = walk2[(twist - i) % n][0]
            glu[a] = b
            glu[b] = a
        out = TriangulatedSurface(merged.triangles, glu)
        vm1 = {v: vmap[vmap1[v]] for v in vmap1}
        vm2 = None if vmap2 is None else {v: vmap[vmap2[v]] for v in vmap2}
        return out, vm1, vm2
    raise SurgeryError("circle gluing kept degenerating after subdivisions")


def remove_vertex_stars(surface: TriangulatedSurface, vertices: Sequence[int]):
    """Puncture the surface at marked interior vertices.

    The surface is barycentrically subdivided until the marked links are
    pairwise disjoint, then each open vertex star is removed, producing
    one new boundary circle per vertex (chi drops by one per vertex).
    Returns (surface, {vertex: new boundary cycle index}).
    """
    marked = [int(v) for v in vertices]
    if len(set(marked)) != len(marked):
        raise SurgeryError("repeated puncture vertices")
    for v in marked:
        if v not in surface.vertices:
            raise SurgeryError(f"no vertex {v}")
        if v in surface.boundary_vertices:
            raise SurgeryError(f"puncture point {v} lies on the boundary")
    if not marked:
        return surface, {}
    work = surface
    for attempt in range(3):
        bary = BarySubdivision(work)
        nb: dict[int, set[int]] = {v: set() for v in marked}
        for tri in bary.surface.triangles.values():
            for v in marked:
                if v in tri:
                    nb[v].update(x for x in tri if x != v)
        disjoint = True
        for i, v in enumerate(marked):
            for w in marked[i + 1:]:
                if nb[v] & nb[w]:
                    disjoint = False
        if not disjoint:
            work = bary.surface
            continue
        forbidden = set(marked)
        keep = [t for t, tri in bary.surface.triangles.items()
                if not (set(tri) & forbidden)]
        out = sub_surface(bary.surface, keep)
        circles = {}
        for v in marked:
            circles[v] = out.boundary_cycle_with_vertex(min(nb[v]))
        return out, circles
    raise SurgeryError("could not separate puncture points")


def cap_boundary_cycle(surface: TriangulatedSurface, cycle_index: int):
    """Cone off one boundary circle with a fresh apex vertex.

    Returns (surface, apex).  Adds one triangle per boundary side.
    """
    walk = anchored_cycle(surface, cycle_index)
    verts = surface.cycle_vertices(walk)
    apex = surface.fresh_vertex()
    t0 = surface.fresh_triangle()
    n = len(walk)
    tris = dict(surface.triangles)
    glu = dict(surface.gluings)
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        tid = t0 + i
        tris[tid] = (b, a, apex)
        glu[(tid, 0)] = walk[i][0]
        glu[walk[i][0]] = (tid, 0)
        nxt = t0 + (i + 1) % n
        glu[(tid, 2)] = (nxt, 1)
        glu[(nxt, 1)] = (tid, 2)
    return TriangulatedSurface(tris, glu), apex


def puncture_surface(surface: TriangulatedSurface, vertices):
    return remove_vertex_stars(surface, vertices)


def surface_connected_sum(s1: TriangulatedSurface, v1: int,
                          s2: TriangulatedSurface, v2: int,
                          twist: int = 0) -> TriangulatedSurface:
    """Connected sum realized by puncturing at two interior vertices and
    gluing the resulting circles."""
    p1, c1 = remove_vertex_stars(s1, [v1])
    p2, c2 = remove_vertex_stars(s2, [v2])
    out, _, _ = glue_surfaces(p1, c1[v1], p2, c2[v2], twist)
    return out


# ---------------------------------------------------------------------------
# planarization
# ---------------------------------------------------------------------------


def planarize(surface: TriangulatedSurface):
    """Remove all handles of a connected orientable surface.

    Repeatedly cuts a non-separating interior cycle and cones off the
    two released circles, marking one cone apex per removed handle.
    Returns (planar surface, marked apex vertices); the genus equals the
    number of marks, and regrafting one handle per mark restores the
    surface class of the input.
    """
    cls = classify_surface(surface)
    if not cls.orientable:
        raise NonOrientableError("cannot planarize a non-orientable surface")
    work = surface
    marks: list[int] = []
    subdivisions = 0
    while True:
        current = classify_surface(work)
        if current.genus == 0:
            break
        try:
            cycle = find_nonseparating_cycle(work, avoid=frozenset(marks))
        except CycleSearchError:
            if subdivisions >= 2:
                raise
            work = BarySubdivision(work).surface
            subdivisions += 1
            continue
        if cycle is None:  # unreachable: genus > 0
            raise CycleSearchError("genus positive but no cycle found")
        cut = cut_along_with_data(work, cycle)
        released = set()
        for h1, h2, _ in cut.duplicated:
            released.add(h1)
            released.add(h2)
        new_cycles = [
            i for i, cyc in enumerate(cut.surface.boundary_cycles)
            if any(s in released for s, _ in cyc)
        ]
        if len(new_cycles) != 2:
            raise SurgeryError("cutting the cycle did not release two circles")
        first, second = new_cycles
        marker2 = min(cut.surface.cycle_vertices(
            cut.surface.boundary_cycles[second]))
        capped, apex = cap_boundary_cycle(cut.surface, first)
        capped, _ = cap_boundary_cycle(
            capped, capped.boundary_cycle_with_vertex(marker2))
        marks.append(apex)
        work = capped
    return work, tuple(marks)


# ---------------------------------------------------------------------------
# foliation-level operations
# ---------------------------------------------------------------------------


def _unique_name(base: str, taken) -> str:
    name = base
    while name in taken:
        name += "'"
    return name


def _remap_matches(matches, table):
    """Forward match block refs through a (pile, cycle) -> (pile, cycle)
    table; block names are preserved."""
    out = []
    for m in matches:
        a = table.get((m.a[0], m.a[1]), (m.a[0], m.a[1]))
        b = table.get((m.b[0], m.b[1]), (m.b[0], m.b[1]))
        out.append(GluingMatch((a[0], a[1], m.a[2]), (b[0], b[1], m.b[2]),
                               m.twist))
    return out


def _cycle_markers(surface: TriangulatedSurface):
    return [min(surface.cycle_vertices(c)) for c in surface.boundary_cycles]


def puncture_at_transversal(fol: PrismaticFoliation, spec: TransversalSpec):
    """Remove a disk around every weighted transversal point.

    Each marked point becomes a boundary circle on a vertical block of
    the point's measure; Eu drops by the total transversal measure.
    Returns (foliation, circles) where circles lists
    ``(pile, cycle index, measure)`` for the created boundary prisms,
    in transversal entry order (entries may split vertically).
    """
    require_valid(fol)
    validate_transversal(fol, spec)
    if not spec.entries:
        return fol, []
    extra: dict[str, set[Fraction]] = {}
    spans_per_entry = []
    pos: dict[str, Fraction] = {}
    for p, v, m in spec.entries:
        lo = pos.get(p, Fraction(0))
        hi = lo + m
        pos[p] = hi
        extra.setdefault(p, set()).update((lo, hi))
        spans_per_entry.append((p, v, lo, hi))
    norm, spans = normalize_vertical(fol, extra)

    marks: dict[str, int] = {}
    entry_subs: list[list[str]] = []
    for p, v, lo, hi in spans_per_entry:
        subs = [sub for sub, s, e in spans[p] if lo <= s and e <= hi]
        for sub in subs:
            if sub in marks:
                raise FoliationError(
                    f"overlapping transversal blocks in pile {p}")
            marks[sub] = v
        entry_subs.append(subs)

    new_piles = []
    table: dict[tuple[str, int], tuple[str, int]] = {}
    circle_of_sub: dict[str, int] = {}
    for pile in norm.piles:
        if pile.name not in marks:
            new_piles.append(pile)
            continue
        v = marks[pile.name]
        markers = _cycle_markers(pile.base)
        base2, circs = remove_vertex_stars(pile.base, [v])
        for ci, marker in enumerate(markers):
            table[(pile.name, ci)] = (
                pile.name, base2.boundary_cycle_with_vertex(marker))
        circle_of_sub[pile.name] = circs[v]
        new_piles.append(Pile(pile.name, base2, pile.measure))

    out = PrismaticFoliation(new_piles, None,
                             _remap_matches(norm.matches, table),
                             fol.declared_ends)
    created = []
    for (p, v, lo, hi), subs in zip(spans_per_entry, entry_subs):
        for sub in subs:
            created.append((sub, circle_of_sub[sub], out.pile(sub).measure))
    return out, created


def _glue_circle_pair(fol: PrismaticFoliation, ref_a, ref_b, twist=0):
    """Materialize one full-circle gluing; input must be vertically
    normalized (single blocks).  Returns (foliation, forwarding table)."""
    (pa, ca), (pb, cb) = ref_a, ref_b
    A, B = fol.pile(pa), fol.pile(pb)
    if (pa, ca) == (pb, cb):
        raise FoliationError(f"cannot glue circle {ref_a} to itself")
    markers_a = _cycle_markers(A.base)
    table: dict[tuple[str, int], tuple[str, int]] = {}
    if pa == pb:
        merged, vm, _ = glue_surfaces(A.base, ca, None, cb, twist)
        name = pa
        measure = A.measure
        marker_src = [(pa, ci, vm[mk]) for ci, mk in enumerate(markers_a)
                      if ci not in (ca, cb)]
    else:
        if A.measure != B.measure:
            raise FoliationError(
                f"cannot glue full circles of piles {pa} ({A.measure}) and "
                f"{pb} ({B.measure}) with different measures")
        markers_b = _cycle_markers(B.base)
        merged, vm_a, vm_b = glue_surfaces(A.base, ca, B.base, cb, twist)
        taken = {p.name for p in fol.piles if p.name not in (pa, pb)}
        name = _unique_name(f"{pa}+{pb}", taken)
        measure = A.measure
        marker_src = [(pa, ci, vm_a[mk]) for ci, mk in enumerate(markers_a)
                      if ci != ca]
        marker_src += [(pb, ci, vm_b[mk]) for ci, mk in enumerate(markers_b)
                       if ci != cb]
    for old_pile, old_ci, marker in marker_src:
        table[(old_pile, old_ci)] = (
            name, merged.boundary_cycle_with_vertex(marker))
    new_piles = []
    inserted = False
    for pile in fol.piles:
        if pile.name in (pa, pb):
            if not inserted:
                new_piles.append(Pile(name, merged, measure))
                inserted = True
            continue
        new_piles.append(pile)
    out = PrismaticFoliation(new_piles, None,
                             _remap_matches(fol.matches, table),
                             fol.declared_ends)
    return out, table


def glue_foliation_boundary(fol: PrismaticFoliation,
                            matches: Sequence[GluingMatch] | None = None
                            ) -> PrismaticFoliation:
    """Materialize boundary gluings: matched prisms disappear from the
    boundary and Eu is unchanged.

    With ``matches=None`` every declared match of the foliation is
    glued.  Explicit matches must reference piles that survive vertical
    normalization unchanged.
    """
    require_valid(fol)
    norm, spans = normalize_vertical(fol)
    if matches is None:
        queue = list(norm.matches)
        norm = PrismaticFoliation(norm.piles, None, (), fol.declared_ends)
    else:
        for p, pieces in spans.items():
            if len(pieces) != 1 and any(
                    m.a[0] == p or m.b[0] == p for m in matches):
                raise FoliationError(
                    f"explicit match references pile {p}, which splits "
                    "under vertical normalization")
        known = {(p, c, n) for (p, c), bl in norm.blocks.items()
                 for n, _ in bl}
        for m in matches:
            for ref in (m.a, m.b):
                if ref not in known:
                    raise FoliationError(f"unknown block {ref}")
            sa, ea = norm.block_interval(m.a)
            sb, eb = norm.block_interval(m.b)
            if ea - sa != eb - sb:
                raise FoliationError(
                    f"measure mismatch: {m.a} has {ea - sa}, "
                    f"{m.b} has {eb - sb}")
        queue = list(matches)
    queue.sort(key=lambda m: (m.a, m.b))
    work = norm
    forward: dict[tuple[str, int], tuple[str, int]] = {}

    def fwd(ref):
        cur = (ref[0], ref[1])
        while cur in forward:
            cur = forward[cur]
        return cur

    for m in queue:
        ra, rb = fwd(m.a), fwd(m.b)
        work, table = _glue_circle_pair(work, ra, rb, m.twist)
        for k, v in table.items():
            forward[k] = v
    return work


def cut_along_circle_prism(fol: PrismaticFoliation,
                           prism_cycles: Sequence[tuple[str, Iterable[Side]]]):
    """Cut every pile along interior circle systems, constant in the
    vertical direction.

    Returns (cut foliation, canonical regluing matches); gluing the
    returned matches back restores a foliation isomorphic to the input.
    Disconnecting cuts split a pile into component piles.
    """
    require_valid(fol)
    norm, spans = normalize_vertical(fol)
    per_pile: dict[str, list[Side]] = {}
    for name, edges in prism_cycles:
        fol.pile(name)
        for sub, _, _ in spans[name]:
            per_pile.setdefault(sub, []).extend(edges)

    new_piles: list[Pile] = []
    table: dict[tuple[str, int], tuple[str, int]] = {}
    psi: list[GluingMatch] = []
    taken = set(norm.pile_names)
    for pile in norm.piles:
        if pile.name not in per_pile:
            new_piles.append(pile)
            continue
        system = CurveSystem(pile.base, per_pile[pile.name])
        if system.arcs:
            raise InvalidCurveSystemError(
                "circle prisms must be unions of cycles (arcs found)")
        markers = _cycle_markers(pile.base)
        result = cut_along_with_data(pile.base, system)
        comps = result.surface.triangle_components
        if len(comps) == 1:
            names = {comps[0]: pile.name}
            pieces = {comps[0]: result.surface}
        else:
            names, pieces = {}, {}
            for i, comp in enumerate(comps):
                nm = _unique_name(f"{pile.name}#{i}", taken)
                taken.add(nm)
                names[comp] = nm
                pieces[comp] = sub_surface(result.surface, comp)

        def locate(vertex):
            for comp in comps:
                piece = pieces[comp]
                if vertex in piece.vertices:
                    return names[comp], piece
            raise AssertionError("vertex lost during cut")

        for ci, marker in enumerate(markers):
            nm, piece = locate(marker)
            table[(pile.name, ci)] = (
                nm, piece.boundary_cycle_with_vertex(marker))
        for comp in comps:
            new_piles.append(Pile(names[comp], pieces[comp], pile.measure))
        # pair up the released circles of each cut cycle
        for component in system.cycles:
            pairs = [(h1, h2) for h1, h2, _ in result.duplicated
                     if pile.base.edge_key(h1) in component]
            locate_side = {}
            for h in [h for pr in pairs for h in pr]:
                for comp in comps:
                    if h[0] in comp:
                        piece = pieces[comp]
                        ci = piece.boundary_cycle_of_side(h)
                        locate_side[h] = (names[comp], ci)
            refs = sorted(set(locate_side.values()))
            if len(refs) != 2:
                raise SurgeryError("cut released a single circle; "
                                   "the cycle was one-sided")
            ref_a, ref_b = refs
            oriented_pairs = [
                (h1, h2) if locate_side[h1] == ref_a else (h2, h1)
                for h1, h2 in pairs]
            twist = _identification_twist(pieces, names, ref_a, ref_b,
                                          oriented_pairs)
            psi.append(GluingMatch((*ref_a, "a"), (*ref_b, "a"), twist))

    out = PrismaticFoliation(new_piles, None,
                             _remap_matches(norm.matches, table),
                             fol.declared_ends)
    return out, psi


def _identification_twist(pieces, names, ref_a, ref_b, pairs):
    """The twist realizing a recorded side-to-side circle identification
    under the anchored-walk gluing convention."""
    from .surfaces import orientation_signs

    def walk_positions(ref):
        piece = next(p for c, p in pieces.items() if names[c] == ref[0])
        walk = anchored_cycle(piece, ref[1], orientation_signs(piece))
        return {side: i for i, (side, _) in enumerate(walk)}, len(walk)

    pos_a, n = walk_positions(ref_a)
    pos_b, nb = walk_positions(ref_b)
    if n != nb:
        raise SurgeryError("released circles have different lengths")
    twists = {(pos_a[h1] + pos_b[h2]) % n for h1, h2 in pairs}
    if len(twists) != 1:
        raise SurgeryError(
            "cut identification is not a rigid rotation of the circles")
    return twists.pop()


def _overlay(breaks_a: list[Fraction], breaks_b: list[Fraction]):
    return sorted(set(breaks_a) | set(breaks_b))


def _refine_entries(entries, cutpoints):
    """Split transversal entries at the given measure prefix points."""
    out = []
    pos = Fraction(0)
    cuts = iter(cutpoints)
    for p, v, m in entries:
        lo, hi = pos, pos + m
        inner = [x for x in cutpoints if lo < x < hi]
        marks = [lo] + inner + [hi]
        for i in range(len(marks) - 1):
            out.append((p, v, marks[i + 1] - marks[i]))
        pos = hi
    return tuple(out)


def connected_sum(fol0: PrismaticFoliation, spec0: TransversalSpec,
                  fol1: PrismaticFoliation, spec1: TransversalSpec,
                  twist: int = 0) -> PrismaticFoliation:
    """Connected sum along two transversals of equal measure.

    Both foliations are punctured along their transversals and the
    created circle prisms are glued pairwise (in canonical order, block
    by block after a common vertical refinement).
    """
    require_valid(fol0)
    require_valid(fol1)
    validate_transversal(fol0, spec0)
    validate_transversal(fol1, spec1)
    if spec0.total != spec1.total:
        raise FoliationError(
            f"transversal measures differ: {spec0.total} != {spec1.total}")
    if not spec0.entries:
        raise FoliationError("cannot form a connected sum along an empty "
                             "transversal")

    taken = set(fol0.pile_names)
    rename = {}
    for p in fol1.pile_names:
        nm = _unique_name(p, taken)
        taken.add(nm)
        rename[p] = nm
    piles = list(fol0.piles) + [
        Pile(rename[p.name], p.base, p.measure) for p in fol1.piles]
    blocks = dict(fol0.blocks)
    for (p, c), bl in fol1.blocks.items():
        blocks[(rename[p], c)] = bl
    matches = list(fol0.matches) + [
        GluingMatch((rename[m.a[0]], m.a[1], m.a[2]),
                    (rename[m.b[0]], m.b[1], m.b[2]), m.twist)
        for m in fol1.matches]
    union = PrismaticFoliation(piles, blocks, matches, fol0.declared_ends)
    entries0 = spec0.entries
    entries1 = tuple((rename[p], v, m) for p, v, m in spec1.entries)

    for _ in range(12):
        joint = TransversalSpec(entries0 + entries1)
        punctured, created = puncture_at_transversal(union, joint)
        k = len(entries0)
        idx = 0
        c0, c1 = [], []
        # created is flattened in entry order; regroup by original side
        flat_entries = []
        for p, v, m in joint.entries:
            flat_entries.append((p, v, m))
        # walk created circles against entries
        created_iter = iter(created)
        measures0, measures1 = [], []
        per_side = {0: c0, 1: c1}
        for j, (p, v, m) in enumerate(flat_entries):
            side = 0 if j < k else 1
            remaining = m
            while remaining > 0:
                sub, ci, mm = next(created_iter)
                per_side[side].append((sub, ci, mm))
                remaining -= mm
            if remaining != 0:
                raise AssertionError("created circles do not tile the entry")
        measures0 = [m for _, _, m in c0]
        measures1 = [m for _, _, m in c1]
        if measures0 == measures1:
            work = punctured
            break
        # refine both transversals at the common measure prefix points
        pref = []
        pos = Fraction(0)
        for m in measures0:
            pos += m
            pref.append(pos)
        pos = Fraction(0)
        for m in measures1:
            pos += m
            pref.append(pos)
        cutpoints = sorted(set(pref))
        entries0 = _refine_entries(entries0, cutpoints)
        entries1 = _refine_entries(entries1, cutpoints)
    else:
        raise FoliationError("transversal refinement did not converge")

    forward: dict[tuple[str, int], tuple[str, int]] = {}

    def fwd(ref):
        cur = ref
        while cur in forward:
            cur = forward[cur]
        return cur

    for (pa, ca, _), (pb, cb, _) in zip(c0, c1):
        work, table = _glue_circle_pair(work, fwd((pa, ca)), fwd((pb, cb)),
                                        twist)
        forward.update(table)
    return work


_TORUS_TRIANGLES = None


def torus_complex() -> TriangulatedSurface:
    """The 7-vertex (Moebius-Kantor) triangulation of the torus."""
    global _TORUS_TRIANGLES
    if _TORUS_TRIANGLES is None:
        tris = {}
        tid = 0
        for i in range(7):
            tris[tid] = (i, (i + 1) % 7, (i + 3) % 7)
            tid += 1
            tris[tid] = (i, (i + 2) % 7, (i + 3) % 7)
            tid += 1
        _TORUS_TRIANGLES = tris
    from .surfaces import surface_from_triangles
    return surface_from_triangles(dict(_TORUS_TRIANGLES))


def graft_handles(fol: PrismaticFoliation,
                  spec: TransversalSpec) -> PrismaticFoliation:
    """Graft one handle on every weighted transversal point: connected
    sum with torus prisms along the canonical marked vertical.

    Eu(result) = Eu(input) - 2 * total transversal measure, exactly.
    """
    require_valid(fol)
    validate_transversal(fol, spec)
    if not spec.entries:
        return fol
    torus = torus_complex()
    handle_piles = []
    handle_entries = []
    taken = set(fol.pile_names)
    for i, (p, v, m) in enumerate(spec.entries):
        name = _unique_name(f"handle{i}", taken)
        taken.add(name)
        handle_piles.append(Pile(name, torus, m))
        handle_entries.append((name, 0, m))
    handles = PrismaticFoliation(handle_piles)
    return connected_sum(fol, spec, handles, TransversalSpec(tuple(handle_entries)))
