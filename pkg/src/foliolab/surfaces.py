"""Compact triangulated surfaces with explicit side gluings.

A surface is a finite list of labelled triangles together with a
fixpoint-free partial involution on triangle sides.  Glued sides must
carry the same unordered vertex pair, and the link of every vertex has
to be a single path (boundary vertex) or a single cycle (interior
vertex).  Everything is exact and combinatorial: no coordinates, no
floats.

Sides are addressed as ``(triangle_id, k)`` with ``k in {0,1,2}``;
side ``k`` joins vertex ``k`` to vertex ``(k+1) % 3`` of the triangle.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

Side = tuple[int, int]


class InvalidSurfaceError(ValueError):
    """The triangle/gluing data does not describe a surface."""


class InvalidCurveSystemError(ValueError):
    """An edge set is not a valid 1-submanifold of the surface."""


class NonOrientableError(ValueError):
    """Raised by operations that require an orientable surface."""


class CycleSearchError(RuntimeError):
    """No suitable cycle exists in the current 1-skeleton."""


def _other_side_at_corner(s: int, corner: int) -> int:
    """The second side of a triangle incident to the given corner."""
    # corner c touches sides c (as tail) and (c+2)%3 (as head)
    return (corner + 2) % 3 if s == corner else corner


class TriangulatedSurface:
    """A compact surface given by labelled triangles and side gluings.

    Parameters
    ----------
    triangles : mapping of triangle id to a triple of vertex ids
    gluings : mapping side -> side; may be one-sided, it is closed into
        a symmetric involution
    orientation : optional mapping triangle id -> +1/-1
    validate : run the full surface validation (default True)
    """

    def __init__(self, triangles, gluings=None, orientation=None, validate=True):
        self.triangles: dict[int, tuple[int, int, int]] = {
            int(t): (int(v[0]), int(v[1]), int(v[2]))
            for t, v in sorted(dict(triangles).items())
        }
        glu: dict[Side, Side] = {}
        for a, b in dict(gluings or {}).items():
            a = (int(a[0]), int(a[1]))
            b = (int(b[0]), int(b[1]))
            for x, y in ((a, b), (b, a)):
                if x in glu and glu[x] != y:
                    raise InvalidSurfaceError(f"side {x} glued twice")
                glu[x] = y
        self.gluings: dict[Side, Side] = glu
        self.orientation = dict(orientation) if orientation else None
        if validate:
            self.validate()

    # -- basic structure ------------------------------------------------

    @cached_property
    def tri_ids(self) -> tuple[int, ...]:
        return tuple(self.triangles)

    @cached_property
    def vertices(self) -> tuple[int, ...]:
        seen = set()
        for tri in self.triangles.values():
            seen.update(tri)
        return tuple(sorted(seen))

    @cached_property
    def sides(self) -> tuple[Side, ...]:
        return tuple((t, k) for t in self.triangles for k in range(3))

    def side_vertices(self, side: Side) -> tuple[int, int]:
        """Ordered (tail, head) vertex pair of a side."""
        t, k = side
        tri = self.triangles[t]
        return tri[k], tri[(k + 1) % 3]

    @cached_property
    def boundary_sides(self) -> tuple[Side, ...]:
        return tuple(s for s in self.sides if s not in self.gluings)

    def edge_key(self, side: Side) -> Side:
        """Canonical representative of the geometric edge through a side."""
        partner = self.gluings.get(side)
        return side if partner is None or side <= partner else partner

    @cached_property
    def edges(self) -> tuple[Side, ...]:
        """All geometric edges, as canonical side representatives."""
        return tuple(sorted({self.edge_key(s) for s in self.sides}))

    @cached_property
    def interior_edges(self) -> tuple[Side, ...]:
        return tuple(e for e in self.edges if e in self.gluings)

    def edge_vertices(self, edge: Side) -> frozenset[int]:
        return frozenset(self.side_vertices(edge))

    @cached_property
    def edge_lookup(self) -> dict[frozenset[int], tuple[Side, ...]]:
        """Unordered vertex pair -> edges carrying it (usually one)."""
        table: dict[frozenset[int], list[Side]] = {}
        for e in self.edges:
            table.setdefault(self.edge_vertices(e), []).append(e)
        return {k: tuple(v) for k, v in table.items()}

    def edge_from_vertices(self, a: int, b: int) -> Side:
        hits = self.edge_lookup.get(frozenset((a, b)), ())
        if not hits:
            raise KeyError(f"no edge with vertices {{{a}, {b}}}")
        if len(hits) > 1:
            raise KeyError(f"vertex pair {{{a}, {b}}} is ambiguous: {hits}")
        return hits[0]

    @cached_property
    def boundary_vertices(self) -> frozenset[int]:
        out = set()
        for s in self.boundary_sides:
            out.update(self.side_vertices(s))
        return frozenset(out)

    @cached_property
    def vertex_edges(self) -> dict[int, tuple[Side, ...]]:
        table: dict[int, list[Side]] = {v: [] for v in self.vertices}
        for e in self.edges:
            for v in self.edge_vertices(e):
                table[v].append(e)
        return {v: tuple(es) for v, es in table.items()}

    # -- validation -----------------------------------------------------

    def _corners(self, v: int) -> list[tuple[int, int]]:
        return [
            (t, c)
            for t, tri in self.triangles.items()
            for c in range(3)
            if tri[c] == v
        ]

    def validate(self) -> None:
        """Raise InvalidSurfaceError unless the data describes a surface."""
        for t, tri in self.triangles.items():
            if len(set(tri)) != 3:
                raise InvalidSurfaceError(f"triangle {t} has repeated vertices {tri}")
        for a, b in self.gluings.items():
            if a == b:
                raise InvalidSurfaceError(f"side {a} glued to itself")
            if a[0] not in self.triangles or not 0 <= a[1] < 3:
                raise InvalidSurfaceError(f"gluing references missing side {a}")
            if frozenset(self.side_vertices(a)) != frozenset(self.side_vertices(b)):
                raise InvalidSurfaceError(
                    f"glued sides {a} and {b} carry different vertex pairs "
                    f"{self.side_vertices(a)} vs {self.side_vertices(b)}"
                )
        # Surface condition: the link of each vertex is one path or cycle.
        for v in self.vertices:
            corners = self._corners(v)
            if not self._link_connected(v, corners):
                raise InvalidSurfaceError(
                    f"vertex {v} has a disconnected link (pinched complex)"
                )
        if self.orientation is not None:
            for a, b in self.gluings.items():
                if a > b:
                    continue
                ta, tb = self.side_vertices(a), self.side_vertices(b)
                oa = self.orientation[a[0]]
                ob = self.orientation[b[0]]
                da = ta if oa > 0 else (ta[1], ta[0])
                db = tb if ob > 0 else (tb[1], tb[0])
                if da != (db[1], db[0]):
                    raise InvalidSurfaceError(
                        f"gluing {a}~{b} violates the declared orientation"
                    )

    def _link_connected(self, v, corners, absent_gluings=frozenset()) -> bool:
        if not corners:
            return False
        index = {c: i for i, c in enumerate(corners)}
        parent = list(range(len(corners)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for (t, c) in corners:
            for s in (c, (c + 2) % 3):
                side = (t, s)
                partner = self.gluings.get(side)
                if partner is None or side in absent_gluings:
                    continue
                pt, ps = partner
                tri = self.triangles[pt]
                # corner of v on the partner triangle
                pc = ps if tri[ps] == v else (ps + 1) % 3
                if tri[pc] != v:
                    raise InvalidSurfaceError(
                        f"gluing {side}~{partner} does not respect vertex {v}"
                    )
                i, j = find(index[(t, c)]), find(index[(pt, pc)])
                if i != j:
                    parent[i] = j
        roots = {find(i) for i in range(len(corners))}
        return len(roots) == 1

    # -- invariants -----------------------------------------------------

    @cached_property
    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges) + len(self.triangles)

    @cached_property
    def triangle_components(self) -> tuple[frozenset[int], ...]:
        """Connected components, as frozensets of triangle ids."""
        remaining = set(self.triangles)
        comps = []
        while remaining:
            seed = min(remaining)
            stack, comp = [seed], {seed}
            while stack:
                t = stack.pop()
                for k in range(3):
                    partner = self.gluings.get((t, k))
                    if partner and partner[0] not in comp:
                        comp.add(partner[0])
                        stack.append(partner[0])
            comps.append(frozenset(comp))
            remaining -= comp
        return tuple(sorted(comps, key=min))

    @property
    def is_connected(self) -> bool:
        return len(self.triangle_components) <= 1

    # -- boundary walking -----------------------------------------------

    def _next_boundary(self, side: Side, forward: bool,
                       severed=frozenset()) -> tuple[Side, bool]:
        """Next boundary side when walking past the pivot endpoint.

        ``severed`` is a set of sides whose gluing should be ignored
        (used when profiling a cut without building it).
        """
        t, s = side
        tail, head = self.side_vertices(side)
        pivot = head if forward else tail
        corner = (s + 1) % 3 if forward else s
        g = (t, _other_side_at_corner(s, corner))
        g_tail = self.side_vertices(g)[0] == pivot
        while g in self.gluings and g not in severed:
            pt, ps = self.gluings[g]
            p_tail, p_head = self.side_vertices((pt, ps))
            if p_tail == pivot:
                at_tail = True
            elif p_head == pivot:
                at_tail = False
            else:  # cannot happen on validated data
                raise InvalidSurfaceError(f"gluing {g} loses vertex {pivot}")
            corner = ps if at_tail else (ps + 1) % 3
            ns = _other_side_at_corner(ps, corner)
            g = (pt, ns)
            g_tail = self.side_vertices(g)[0] == pivot
        return g, g_tail

    @cached_property
    def boundary_cycles(self) -> tuple[tuple[tuple[Side, bool], ...], ...]:
        """Boundary as directed walks; each entry is (side, forward)."""
        remaining = set(self.boundary_sides)
        cycles = []
        while remaining:
            start = min(remaining)
            walk = [(start, True)]
            remaining.discard(start)
            cur, fwd = start, True
            while True:
                cur, fwd = self._next_boundary(cur, fwd)
                if (cur, fwd) == walk[0]:
                    break
                walk.append((cur, fwd))
                remaining.discard(cur)
            cycles.append(tuple(walk))
        return tuple(sorted(cycles, key=lambda w: w[0]))

    def cycle_vertices(self, cycle: Sequence[tuple[Side, bool]]) -> tuple[int, ...]:
        """Vertices of a boundary walk, in walk order (tails)."""
        out = []
        for side, fwd in cycle:
            a, b = self.side_vertices(side)
            out.append(a if fwd else b)
        return tuple(out)

    def boundary_cycle_of_side(self, side: Side) -> int:
        for i, cyc in enumerate(self.boundary_cycles):
            if any(s == side for s, _ in cyc):
                return i
        raise KeyError(f"{side} is not a boundary side")

    def boundary_cycle_with_vertex(self, v: int) -> int:
        for i, cyc in enumerate(self.boundary_cycles):
            if v in self.cycle_vertices(cyc):
                return i
        raise KeyError(f"vertex {v} is not on the boundary")

    # -- misc helpers ----------------------------------------------------

    def fresh_vertex(self) -> int:
        return max(self.vertices, default=-1) + 1

    def fresh_triangle(self) -> int:
        return max(self.triangles, default=-1) + 1

    def with_orientation(self) -> "TriangulatedSurface":
        """Reorder triangle vertex triples into a consistent orientation.

        Raises NonOrientableError when no consistent choice exists.
        Triangle and vertex ids are preserved; side indices of flipped
        triangles are remapped accordingly.
        """
        signs = orientation_signs(self)
        if signs is None:
            raise NonOrientableError("surface is not orientable")
        flip = {t for t, sg in signs.items() if sg < 0}
        if not flip:
            return TriangulatedSurface(
                self.triangles, self.gluings, {t: 1 for t in self.triangles},
                validate=False)

        def remap(side: Side) -> Side:
            t, s = side
            if t in flip:
                s = (2, 1, 0)[s]
            return (t, s)

        tris = {
            t: ((v[0], v[2], v[1]) if t in flip else v)
            for t, v in self.triangles.items()
        }
        glu = {remap(a): remap(b) for a, b in self.gluings.items()}
        return TriangulatedSurface(tris, glu, {t: 1 for t in tris}, validate=False)

    def __repr__(self) -> str:
        return (f"TriangulatedSurface({len(self.triangles)} triangles, "
                f"chi={self.euler_characteristic}, "
                f"boundary={len(self.boundary_cycles)})")


def surface_from_triangles(triangles, validate=True) -> TriangulatedSurface:
    """Build a surface from bare triangles, gluing sides that share a
    vertex pair.  Each unordered pair must occur on at most two sides."""
    tris = {int(t): tuple(v) for t, v in dict(triangles).items()}
    by_pair: dict[frozenset[int], list[Side]] = {}
    for t, tri in tris.items():
        for k in range(3):
            pair = frozenset((tri[k], tri[(k + 1) % 3]))
            by_pair.setdefault(pair, []).append((t, k))
    gluings = {}
    for pair, sides in by_pair.items():
        if len(sides) > 2:
            raise InvalidSurfaceError(
                f"vertex pair {set(pair)} occurs on {len(sides)} sides")
        if len(sides) == 2:
            gluings[sides[0]] = sides[1]
    return TriangulatedSurface(tris, gluings, validate=validate)


def orientation_signs(surface: TriangulatedSurface) -> dict[int, int] | None:
    """Greedy orientation propagation; None when inconsistent.

    The lowest triangle id of each component gets sign +1.
    """
    signs: dict[int, int] = {}
    for comp in surface.triangle_components:
        root = min(comp)
        signs[root] = 1
        queue = [root]
        while queue:
            t = queue.pop(0)
            for k in range(3):
                partner = surface.gluings.get((t, k))
                if partner is None:
                    continue
                pt = partner[0]
                a = surface.side_vertices((t, k))
                b = surface.side_vertices(partner)
                # same stored direction forces opposite signs
                same_dir = a == b
                needed = -signs[t] if same_dir else signs[t]
                if pt not in signs:
                    signs[pt] = needed
                    queue.append(pt)
                elif signs[pt] != needed:
                    return None
    return signs


# -- classification --------------------------------------------------------


@dataclass(frozen=True)
class SurfaceClass:
    """Topological type of a connected compact surface."""

    orientable: bool
    genus: int
    boundary_count: int
    chi: int

    def __post_init__(self):
        expected = (2 - 2 * self.genus - self.boundary_count
                    if self.orientable
                    else 2 - self.genus - self.boundary_count)
        if expected != self.chi:
            raise ValueError(f"inconsistent surface class {self}")

    def __str__(self):
        kind = "orientable" if self.orientable else "non-orientable"
        return (f"{kind} genus {self.genus} with "
                f"{self.boundary_count} boundary component(s), chi={self.chi}")


def euler_characteristic(surface: TriangulatedSurface) -> int:
    """V - E + F, counting each glued side pair as a single edge."""
    return surface.euler_characteristic


def boundary_components(surface: TriangulatedSurface) -> list[tuple[int, ...]]:
    """Boundary cycles as vertex walks (one tuple per circle)."""
    return [surface.cycle_vertices(c) for c in surface.boundary_cycles]


def classify_surface(surface: TriangulatedSurface) -> SurfaceClass:
    """Orientability, genus and boundary count of a connected surface."""
    comps = surface.triangle_components
    if len(comps) != 1:
        raise ValueError(
            f"surface is disconnected; components: "
            f"{[sorted(c)[:4] for c in comps]}")
    chi = surface.euler_characteristic
    b = len(surface.boundary_cycles)
    orientable = orientation_signs(surface) is not None
    if orientable:
        if (2 - chi - b) % 2:
            raise InvalidSurfaceError("odd genus defect on orientable surface")
        genus = (2 - chi - b) // 2
    else:
        genus = 2 - chi - b
    if genus < 0:
        raise InvalidSurfaceError(f"negative genus from chi={chi}, b={b}")
    return SurfaceClass(orientable, genus, b, chi)


# -- curve systems ----------------------------------------------------------


class CurveSystem:
    """A simplicial 1-submanifold: disjoint simple arcs and cycles.

    Edges are given by their canonical side representatives.  Arcs have
    their endpoints on boundary vertices; every vertex meets at most two
    selected edges.
    """

    def __init__(self, surface: TriangulatedSurface, edges: Iterable[Side]):
        self.surface = surface
        keys = set()
        for e in edges:
            e = (int(e[0]), int(e[1]))
            if e[0] not in surface.triangles or not 0 <= e[1] < 3:
                raise InvalidCurveSystemError(f"unknown side {e}")
            keys.add(surface.edge_key(e))
        self.edges: frozenset[Side] = frozenset(keys)
        self.arcs, self.cycles = self._split_components()

    @classmethod
    def from_vertex_pairs(cls, surface, pairs) -> "CurveSystem":
        return cls(surface, [surface.edge_from_vertices(a, b) for a, b in pairs])

    @classmethod
    def empty(cls, surface) -> "CurveSystem":
        return cls(surface, ())

    @property
    def volume(self) -> int:
        """Simplicial volume: the number of edges."""
        return len(self.edges)

    @cached_property
    def vertex_set(self) -> frozenset[int]:
        out = set()
        for e in self.edges:
            out.update(self.surface.edge_vertices(e))
        return frozenset(out)

    def _split_components(self):
        surf = self.surface
        incident: dict[int, list[Side]] = {}
        for e in sorted(self.edges):
            for v in surf.edge_vertices(e):
                incident.setdefault(v, []).append(e)
        for v, es in incident.items():
            if len(es) > 2:
                raise InvalidCurveSystemError(
                    f"vertex {v} meets {len(es)} selected edges")
        unused = set(self.edges)
        arcs = []
        endpoints = sorted(v for v, es in incident.items() if len(es) == 1)
        for v in endpoints:
            e = next((e for e in incident[v] if e in unused), None)
            if e is None:
                continue
            if v not in surf.boundary_vertices:
                raise InvalidCurveSystemError(
                    f"arc endpoint {v} is not a boundary vertex")
            path, cur = [], v
            while e is not None:
                unused.discard(e)
                path.append(e)
                cur = next(iter(surf.edge_vertices(e) - {cur}))
                e = next((x for x in incident[cur] if x in unused), None)
            if cur not in surf.boundary_vertices:
                raise InvalidCurveSystemError(
                    f"arc endpoint {cur} is not a boundary vertex")
            arcs.append(tuple(path))
        cycles = []
        while unused:
            e0 = min(unused)
            cyc, cur = [], min(surf.edge_vertices(e0))
            e = e0
            while e is not None:
                unused.discard(e)
                cyc.append(e)
                cur = next(iter(surf.edge_vertices(e) - {cur}))
                e = next((x for x in incident[cur] if x in unused), None)
            cycles.append(tuple(cyc))
        return tuple(arcs), tuple(cycles)

    @property
    def components(self) -> tuple[tuple[Side, ...], ...]:
        return self.arcs + self.cycles

    def __len__(self):
        return len(self.edges)

    def __repr__(self):
        return (f"CurveSystem({len(self.arcs)} arcs, {len(self.cycles)} cycles,"
                f" volume={self.volume})")


def check_cuttable(surface: TriangulatedSurface, system: CurveSystem) -> None:
    """Validate the extra conditions a cut needs: all edges interior,
    cycle vertices interior, arc interiors interior."""
    for e in sorted(system.edges):
        if e not in surface.gluings:
            raise InvalidCurveSystemError(f"edge {e} lies on the boundary")
    bdry = surface.boundary_vertices
    for arc in system.arcs:
        inner = _arc_inner_vertices(surface, arc)
        bad = inner & bdry
        if bad:
            raise InvalidCurveSystemError(
                f"arc interior vertex {min(bad)} lies on the boundary")
    for cyc in system.cycles:
        verts = set()
        for e in cyc:
            verts |= surface.edge_vertices(e)
        bad = verts & bdry
        if bad:
            raise InvalidCurveSystemError(
                f"cycle vertex {min(bad)} lies on the boundary")


def _arc_inner_vertices(surface, arc) -> set[int]:
    count: dict[int, int] = {}
    for e in arc:
        for v in surface.edge_vertices(e):
            count[v] = count.get(v, 0) + 1
    return {v for v, c in count.items() if c == 2}


@dataclass(frozen=True)
class CutResult:
    """Outcome of cutting: the new surface plus regluing data.

    ``duplicated`` maps every cut edge to its two released sides and
    the vertex identifications undoing the cut.
    """

    surface: TriangulatedSurface
    duplicated: tuple[tuple[Side, Side, tuple[tuple[int, int], ...]], ...]


def cut_along_with_data(surface: TriangulatedSurface,
                        system: CurveSystem) -> CutResult:
    """Cut the surface open along a curve system.

    Each selected edge is duplicated; vertices on the system are split
    according to the corner groups that remain attached.  Triangle ids
    and side indices are preserved.
    """
    if system.surface is not surface:
        system = CurveSystem(surface, system.edges)
    check_cuttable(surface, system)
    severed: set[Side] = set()
    for e in sorted(system.edges):
        severed.add(e)
        severed.add(surface.gluings[e])
    new_glu = {a: b for a, b in surface.gluings.items() if a not in severed}

    # split vertices on the system into corner groups
    relabel: dict[tuple[int, int], int] = {}  # (triangle, corner) -> vertex
    next_fresh = surface.fresh_vertex()
    copies: dict[tuple[int, int], dict[tuple[int, int], int]] = {}
    for v in sorted(system.vertex_set):
        corners = surface._corners(v)
        groups = _corner_groups(surface, v, corners, severed)
        assigned = {}
        for gi, group in enumerate(groups):
            label = v if gi == 0 else next_fresh
            if gi > 0:
                next_fresh += 1
            for corner in group:
                relabel[corner] = label
                assigned[corner] = label
        copies[v] = assigned

    tris = {}
    for t, tri in surface.triangles.items():
        tris[t] = tuple(relabel.get((t, c), tri[c]) for c in range(3))

    duplicated = []
    for e in sorted(system.edges):
        h1, h2 = e, surface.gluings[e]
        idents = []
        for v in sorted(surface.edge_vertices(e)):
            c1 = (h1[0], h1[1]) if surface.triangles[h1[0]][h1[1]] == v else (h1[0], (h1[1] + 1) % 3)
            c2 = (h2[0], h2[1]) if surface.triangles[h2[0]][h2[1]] == v else (h2[0], (h2[1] + 1) % 3)
            idents.append((copies[v][c1], copies[v][c2]))
        duplicated.append((h1, h2, tuple(idents)))

    cut = TriangulatedSurface(tris, new_glu, surface.orientation, validate=False)
    return CutResult(cut, tuple(duplicated))


def _corner_groups(surface, v, corners, severed):
    """Corner classes at v connected through non-severed gluings."""
    index = {c: i for i, c in enumerate(corners)}
    parent = list(range(len(corners)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for (t, c) in corners:
        for s in (c, (c + 2) % 3):
            side = (t, s)
            if side in severed:
                continue
            partner = surface.gluings.get(side)
            if partner is None:
                continue
            pt, ps = partner
            tri = surface.triangles[pt]
            pc = ps if tri[ps] == v else (ps + 1) % 3
            i, j = find(index[(t, c)]), find(index[(pt, pc)])
            if i != j:
                parent[i] = j
    groups: dict[int, list] = {}
    for c in corners:
        groups.setdefault(find(index[c]), []).append(c)
    return [sorted(g) for g in sorted(groups.values(), key=min)]


def cut_along(surface: TriangulatedSurface,
              system: CurveSystem) -> TriangulatedSurface:
    """Cut along a curve system (see ``cut_along_with_data``)."""
    return cut_along_with_data(surface, system).surface


def reglue_cut(cut: CutResult) -> TriangulatedSurface:
    """Undo a cut: merge duplicated vertices and restore the gluings."""
    surf = cut.surface
    parent: dict[int, int] = {}

    def find(v):
        root = v
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(v, v) != v:
            parent[v], v = root, parent[v]
        return root

    for _, _, idents in cut.duplicated:
        for a, b in idents:
            ra, rb = find(a), find(b)
            if ra != rb:
                ra, rb = max(ra, rb), min(ra, rb)
                parent[ra] = rb
    tris = {
        t: tuple(find(v) for v in tri) for t, tri in surf.triangles.items()
    }
    glu = dict(surf.gluings)
    for h1, h2, _ in cut.duplicated:
        glu[h1] = h2
        glu[h2] = h1
    return TriangulatedSurface(tris, glu, surf.orientation)


def is_reducing(surface: TriangulatedSurface, system: CurveSystem,
                target_boundary: int = 1) -> bool:
    """True when cutting along the system yields a connected surface
    with exactly ``target_boundary`` boundary components."""
    if system.surface is not surface:
        system = CurveSystem(surface, system.edges)
    check_cuttable(surface, system)
    ncomp, nbound = cut_profile(surface, system.edges)
    return ncomp == 1 and nbound == target_boundary


def cut_profile(surface: TriangulatedSurface,
                cut_edges: Iterable[Side]) -> tuple[int, int]:
    """(components, boundary circles) of the cut surface, without
    constructing it.  Dispatches to the compiled kernel when present."""
    from ._kernels import cut_profile as _kernel
    arrays = surface_arrays(surface)
    mask = bytearray(arrays.n_edges)
    for e in cut_edges:
        mask[arrays.edge_index[surface.edge_key(e)]] = 1
    return _kernel(arrays, bytes(mask))


class SurfaceArrays:
    """Flat integer encoding of the gluing structure, shared by the
    compiled and pure kernels."""

    __slots__ = ("n_tris", "n_edges", "partner", "edge_id", "pivot_flip",
                 "edge_index")

    def __init__(self, surface: TriangulatedSurface):
        tri_index = {t: i for i, t in enumerate(surface.tri_ids)}
        n = len(surface.tri_ids)
        self.n_tris = n
        self.edge_index = {e: i for i, e in enumerate(surface.edges)}
        self.n_edges = len(surface.edges)
        partner = [-1] * (3 * n)
        edge_id = [0] * (3 * n)
        pivot_flip = [0] * (3 * n)
        for t, tid in enumerate(surface.tri_ids):
            for k in range(3):
                side = (tid, k)
                flat = 3 * t + k
                edge_id[flat] = self.edge_index[surface.edge_key(side)]
                mate = surface.gluings.get(side)
                if mate is not None:
                    partner[flat] = 3 * tri_index[mate[0]] + mate[1]
                    a = surface.side_vertices(side)
                    b = surface.side_vertices(mate)
                    pivot_flip[flat] = 1 if a[0] == b[0] else 0
        import array as _array
        self.partner = _array.array("i", partner)
        self.edge_id = _array.array("i", edge_id)
        self.pivot_flip = _array.array("b", pivot_flip)


_ARRAY_CACHE: dict[int, tuple[TriangulatedSurface, SurfaceArrays]] = {}


def surface_arrays(surface: TriangulatedSurface) -> SurfaceArrays:
    hit = _ARRAY_CACHE.get(id(surface))
    if hit is not None and hit[0] is surface:
        return hit[1]
    arrays = SurfaceArrays(surface)
    if len(_ARRAY_CACHE) > 64:
        _ARRAY_CACHE.clear()
    _ARRAY_CACHE[id(surface)] = (surface, arrays)
    return arrays


# -- subcomplexes and subdivision -------------------------------------------


def sub_surface(surface: TriangulatedSurface, tri_ids: Iterable[int],
                resolve_pinches: bool = False) -> TriangulatedSurface:
    """The subcomplex spanned by the given triangles.

    Without ``resolve_pinches`` a pinched vertex raises; with it, each
    pinch point is split into one vertex per surviving corner fan.
    """
    keep = set(int(t) for t in tri_ids)
    missing = keep - set(surface.triangles)
    if missing:
        raise KeyError(f"unknown triangles {sorted(missing)[:5]}")
    tris = {t: surface.triangles[t] for t in sorted(keep)}
    glu = {a: b for a, b in surface.gluings.items()
           if a[0] in keep and b[0] in keep}
    sub = TriangulatedSurface(tris, glu, validate=False)
    pinched = []
    for v in sub.vertices:
        corners = sub._corners(v)
        if not sub._link_connected(v, corners):
            pinched.append(v)
    if not pinched:
        sub.validate()
        return sub
    if not resolve_pinches:
        raise InvalidSurfaceError(
            f"subcomplex pinched at vertex {pinched[0]}")
    relabel = {}
    fresh = max(surface.fresh_vertex(), sub.fresh_vertex())
    for v in pinched:
        corners = sub._corners(v)
        groups = _corner_groups(sub, v, corners, frozenset())
        for gi, group in enumerate(groups):
            label = v if gi == 0 else fresh
            if gi > 0:
                fresh += 1
            for corner in group:
                relabel[corner] = label
    tris = {t: tuple(relabel.get((t, c), tri[c]) for c in range(3))
            for t, tri in tris.items()}
    return TriangulatedSurface(tris, glu)


class BarySubdivision:
    """First barycentric subdivision with provenance maps.

    New triangle ids are ``6*parent + sector``.  Original vertices keep
    their ids; midpoints and barycenters receive fresh ids in a
    deterministic order.
    """

    def __init__(self, surface: TriangulatedSurface):
        self.parent = surface
        fresh = surface.fresh_vertex()
        self.midpoint: dict[Side, int] = {}
        for e in surface.edges:
            self.midpoint[e] = fresh
            fresh += 1
        self.barycenter: dict[int, int] = {}
        for t in surface.tri_ids:
            self.barycenter[t] = fresh
            fresh += 1
        tris = {}
        for t in surface.tri_ids:
            v = surface.triangles[t]
            c = self.barycenter[t]
            m = [self.midpoint[surface.edge_key((t, k))] for k in range(3)]
            sectors = [
                (v[0], m[0], c), (m[0], v[1], c),
                (v[1], m[1], c), (m[1], v[2], c),
                (v[2], m[2], c), (m[2], v[0], c),
            ]
            for j, tri in enumerate(sectors):
                tris[6 * t + j] = tri
        self.surface = surface_from_triangles(tris)
        self._mid_ids = frozenset(self.midpoint.values())
        self._bary_ids = frozenset(self.barycenter.values())

    def parent_triangle(self, small_tid: int) -> int:
        return small_tid // 6

    def is_midpoint(self, v: int) -> bool:
        return v in self._mid_ids

    def is_barycenter(self, v: int) -> bool:
        return v in self._bary_ids


def barycentric_subdivision(surface: TriangulatedSurface) -> TriangulatedSurface:
    return BarySubdivision(surface).surface


def neighborhood_complement(surface: TriangulatedSurface,
                            system: CurveSystem) -> TriangulatedSurface:
    """Complement of the open star of the system in the first
    barycentric subdivision (the standard simplicial regular
    neighborhood complement), as an abstract surface."""
    bary = BarySubdivision(surface)
    return neighborhood_complement_in(bary, system)


def neighborhood_complement_in(bary: BarySubdivision,
                               system: CurveSystem) -> TriangulatedSurface:
    forbidden = set(system.vertex_set)
    for e in system.edges:
        forbidden.add(bary.midpoint[e])
    keep = [
        t for t, tri in bary.surface.triangles.items()
        if not (set(tri) & forbidden)
    ]
    return sub_surface(bary.surface, keep, resolve_pinches=True)


def complement_triangles(bary: BarySubdivision, system: CurveSystem,
                         within: Iterable[int] | None = None) -> list[int]:
    """Small triangles of the subdivision avoiding the system, optionally
    restricted to the subdivision of a parent-triangle subset."""
    forbidden = set(system.vertex_set)
    for e in system.edges:
        forbidden.add(bary.midpoint[e])
    parents = None if within is None else set(within)
    return [
        t for t, tri in bary.surface.triangles.items()
        if (parents is None or t // 6 in parents)
        and not (set(tri) & forbidden)
    ]


# -- non-separating cycles ---------------------------------------------------


def find_nonseparating_cycle(surface: TriangulatedSurface,
                             avoid: frozenset[int] = frozenset()):
    """A simple interior cycle whose cut keeps the surface connected.

    Returns ``None`` when the surface has genus zero.  Candidates are
    fundamental cycles of spanning trees of the interior 1-skeleton
    (several roots), each checked by a cut connectivity test.  Raises
    CycleSearchError when positive genus is present but no candidate
    survives in this skeleton (re-triangulate finer and retry).
    """
    cls = classify_surface(surface)
    if cls.genus == 0:
        return None
    interior = [v for v in surface.vertices
                if v not in surface.boundary_vertices and v not in avoid]
    allowed = set(interior)
    adj: dict[int, list[tuple[int, Side]]] = {v: [] for v in interior}
    for e in surface.interior_edges:
        a, b = sorted(surface.edge_vertices(e))
        if a in allowed and b in allowed:
            adj[a].append((b, e))
            adj[b].append((a, e))
    for v in adj:
        adj[v].sort()
    roots = sorted(allowed)[:6]
    tried = set()
    for root in roots:
        parent_edge: dict[int, tuple[int, Side]] = {root: (root, None)}
        order = [root]
        queue = [root]
        while queue:
            v = queue.pop(0)
            for w, e in adj[v]:
                if w not in parent_edge:
                    parent_edge[w] = (v, e)
                    order.append(w)
                    queue.append(w)
        tree_edges = {e for v, (p, e) in parent_edge.items() if e is not None}
        chords = sorted({
            e for v in order for w, e in adj[v]
            if w in parent_edge and e not in tree_edges
        })
        for chord in chords:
            if chord in tried:
                continue
            tried.add(chord)
            a, b = sorted(surface.edge_vertices(chord))
            cyc = _tree_cycle(surface, parent_edge, a, b, chord)
            if cyc is None:
                continue
            system = CurveSystem(surface, cyc)
            if len(system.cycles) != 1 or system.arcs:
                continue
            ncomp, _ = cut_profile(surface, system.edges)
            if ncomp == 1:
                return system
    raise CycleSearchError(
        "no interior non-separating cycle in this skeleton")


def _tree_cycle(surface, parent_edge, a, b, chord):
    def path_to_root(v):
        out = []
        while True:
            p, e = parent_edge[v]
            if e is None:
                return out, v
            out.append((v, e))
            v = p

    pa, _ = path_to_root(a)
    pb, _ = path_to_root(b)
    ea = [e for _, e in pa]
    eb = [e for _, e in pb]
    common = set(ea) & set(eb)
    edges = [chord] + [e for e in ea if e not in common] + \
        [e for e in eb if e not in common]
    if len(set(edges)) != len(edges):
        return None
    return edges
