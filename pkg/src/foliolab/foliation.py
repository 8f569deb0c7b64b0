"""Prismatic foliations: measured piles glued along boundary circle prisms.

A pile is a connected compact triangulated surface crossed with a
measured vertical of positive rational mass.  Boundary circles carry an
ordered partition into vertical blocks; gluing matches identify blocks
of equal measure.  All measures are exact ``fractions.Fraction`` values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .isomorphism import canonical_form
from .surfaces import InvalidSurfaceError, TriangulatedSurface, classify_surface

ENDS_INF = math.inf

BlockRef = tuple[str, int, str]  # (pile name, boundary cycle index, block name)


class FoliationError(ValueError):
    """A structural precondition on a prismatic foliation failed."""


def as_fraction(x) -> Fraction:
    f = Fraction(x)
    return f


@dataclass(frozen=True)
class Pile:
    """A prism: connected compact base surface x measured vertical."""

    name: str
    base: TriangulatedSurface
    measure: Fraction

    def __post_init__(self):
        object.__setattr__(self, "measure", as_fraction(self.measure))


@dataclass(frozen=True)
class GluingMatch:
    """One block-to-block boundary identification (with a twist offset)."""

    a: BlockRef
    b: BlockRef
    twist: int = 0


@dataclass(frozen=True)
class TransversalSpec:
    """Weighted marked interior vertices: (pile, vertex, measure block)."""

    entries: tuple[tuple[str, int, Fraction], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "entries",
            tuple((str(p), int(v), as_fraction(m)) for p, v, m in self.entries))

    @property
    def total(self) -> Fraction:
        return sum((m for _, _, m in self.entries), Fraction(0))

    def __len__(self):
        return len(self.entries)


EMPTY_TRANSVERSAL = TransversalSpec(())


@dataclass(frozen=True)
class Violation:
    code: str
    where: str
    message: str

    def __str__(self):
        return f"[{self.code}] {self.where}: {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code, where, message):
        self.violations.append(Violation(code, where, message))

    def __str__(self):
        if self.ok:
            return "valid"
        return "\n".join(str(v) for v in self.violations)


class PrismaticFoliation:
    """Finite collection of measured piles with boundary gluing data.

    ``blocks`` assigns each boundary circle an ordered partition of the
    pile measure; circles without an explicit entry get the single
    full-measure block ``a``.  ``matches`` identify blocks pairwise.
    """

    def __init__(self, piles: Sequence[Pile],
                 blocks: Mapping[tuple[str, int], Sequence[tuple[str, Fraction]]] | None = None,
                 matches: Sequence[GluingMatch] = (),
                 declared_ends=None):
        self.piles: tuple[Pile, ...] = tuple(piles)
        self._by_name = {p.name: p for p in self.piles}
        if len(self._by_name) != len(self.piles):
            raise FoliationError("pile names are not unique")
        declared = {
            (str(p), int(c)): tuple((str(n), as_fraction(m)) for n, m in bl)
            for (p, c), bl in (blocks or {}).items()
        }
        full: dict[tuple[str, int], tuple[tuple[str, Fraction], ...]] = {}
        for pile in self.piles:
            for ci in range(len(pile.base.boundary_cycles)):
                full[(pile.name, ci)] = declared.pop(
                    (pile.name, ci), (("a", pile.measure),))
        if declared:
            raise FoliationError(
                f"block declaration for missing circle {next(iter(declared))}")
        self.blocks = full
        self.matches: tuple[GluingMatch, ...] = tuple(matches)
        self.declared_ends = declared_ends

    def pile(self, name: str) -> Pile:
        try:
            return self._by_name[name]
        except KeyError:
            raise FoliationError(f"no pile named {name!r}") from None

    @property
    def pile_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.piles)

    def block_intervals(self, pile: str, cycle: int):
        """Blocks of a circle as (name, start, end) vertical intervals."""
        out, pos = [], Fraction(0)
        for name, m in self.blocks[(pile, cycle)]:
            out.append((name, pos, pos + m))
            pos += m
        return out

    def block_interval(self, ref: BlockRef):
        for name, s, e in self.block_intervals(ref[0], ref[1]):
            if name == ref[2]:
                return s, e
        raise FoliationError(f"no block {ref}")

    @cached_property
    def boundary_refs(self) -> tuple[BlockRef, ...]:
        out = []
        for (p, c), bl in sorted(self.blocks.items()):
            out.extend((p, c, name) for name, _ in bl)
        return tuple(out)

    def matched_refs(self) -> dict[BlockRef, GluingMatch]:
        table: dict[BlockRef, GluingMatch] = {}
        for m in self.matches:
            for ref in (m.a, m.b):
                table[ref] = m
        return table

    def __repr__(self):
        return (f"PrismaticFoliation({len(self.piles)} piles, "
                f"{len(self.matches)} matches)")


# -- validation ---------------------------------------------------------------


def validate_foliation(fol: PrismaticFoliation) -> ValidationReport:
    """Check every structural invariant; returns all violations instead
    of aborting on the first."""
    report = ValidationReport()
    for pile in fol.piles:
        where = f"pile {pile.name}"
        if pile.measure <= 0:
            report.add("measure", where, f"measure {pile.measure} is not positive")
        try:
            pile.base.validate()
        except InvalidSurfaceError as exc:
            report.add("base", where, str(exc))
            continue
        if not pile.base.is_connected:
            report.add("base", where, "base surface is disconnected")
    for (p, c), bl in sorted(fol.blocks.items()):
        where = f"prism {p}.{c}"
        names = [n for n, _ in bl]
        if len(set(names)) != len(names):
            report.add("blocks", where, f"duplicate block names {names}")
        bad = [m for _, m in bl if m <= 0]
        if bad:
            report.add("blocks", where, f"non-positive block measures {bad}")
        total = sum((m for _, m in bl), Fraction(0))
        pile = fol._by_name.get(p)
        if pile is not None and total != pile.measure:
            report.add("blocks", where,
                       f"block measures sum to {total}, pile measure is "
                       f"{pile.measure}")
    seen: dict[BlockRef, int] = {}
    for i, match in enumerate(fol.matches):
        where = f"match {i}"
        if match.a == match.b:
            report.add("match", where, f"block {match.a} matched to itself")
        refs = []
        for ref in (match.a, match.b):
            if (ref[0], ref[1]) not in fol.blocks or all(
                    n != ref[2] for n, _ in fol.blocks.get((ref[0], ref[1]), ())):
                report.add("match", where, f"unknown block {ref}")
            else:
                refs.append(ref)
        for ref in refs:
            if ref in seen:
                report.add("match", where,
                           f"block {ref} already glued by match {seen[ref]}")
            seen[ref] = i
        if len(refs) == 2:
            ma = dict(fol.blocks[(match.a[0], match.a[1])]).get(match.a[2])
            mb = dict(fol.blocks[(match.b[0], match.b[1])]).get(match.b[2])
            if ma is not None and mb is not None and ma != mb:
                report.add("match", where,
                           f"measure mismatch: {match.a}={ma} vs {match.b}={mb}")
    return report


def require_valid(fol: PrismaticFoliation) -> None:
    report = validate_foliation(fol)
    if not report.ok:
        raise FoliationError(str(report))


def validate_transversal(fol: PrismaticFoliation, spec: TransversalSpec) -> None:
    per_pile: dict[str, Fraction] = {}
    for p, v, m in spec.entries:
        pile = fol.pile(p)
        if m <= 0:
            raise FoliationError(f"transversal block measure {m} on {p} "
                                 "is not positive")
        if v not in pile.base.vertices:
            raise FoliationError(f"vertex {v} does not exist in pile {p}")
        if v in pile.base.boundary_vertices:
            raise FoliationError(f"transversal point {v} in pile {p} lies "
                                 "on the boundary")
        per_pile[p] = per_pile.get(p, Fraction(0)) + m
    for p, total in per_pile.items():
        if total > fol.pile(p).measure:
            raise FoliationError(
                f"transversal blocks in pile {p} sum to {total} > pile "
                f"measure {fol.pile(p).measure}")


# -- foliated Euler characteristic -------------------------------------------


def foliated_euler(fol: PrismaticFoliation) -> Fraction:
    """Sum of chi(base) * measure over the pile decomposition."""
    return sum(
        (Fraction(p.base.euler_characteristic) * p.measure for p in fol.piles),
        Fraction(0))


# -- vertical refinement ------------------------------------------------------


def normalize_vertical(fol: PrismaticFoliation,
                       extra_breaks: Mapping[str, Iterable[Fraction]] | None = None
                       ) -> tuple[PrismaticFoliation, dict]:
    """Split piles vertically until every match joins two full circles.

    Returns the refined foliation and a map
    ``pile name -> [(sub name, start, end), ...]``.  Optional extra
    breakpoints per pile are honoured (used to carve out transversal
    blocks before a puncture).
    """
    breaks: dict[str, set[Fraction]] = {p.name: set() for p in fol.piles}
    for (p, c), _ in fol.blocks.items():
        for _, s, e in fol.block_intervals(p, c):
            if 0 < s:
                breaks[p].add(s)
    for p, pts in (extra_breaks or {}).items():
        fol.pile(p)
        for x in pts:
            x = as_fraction(x)
            if 0 < x < fol.pile(p).measure:
                breaks[p].add(x)
    # propagate breakpoints through the matches until stable
    changed = True
    guard = 0
    while changed:
        changed = False
        guard += 1
        if guard > 10000:
            raise FoliationError("vertical refinement does not stabilise")
        for m in fol.matches:
            sa, ea = fol.block_interval(m.a)
            sb, eb = fol.block_interval(m.b)
            pa, pb = m.a[0], m.b[0]
            for x in list(breaks[pa]):
                if sa < x < ea:
                    y = x - sa + sb
                    if y not in breaks[pb]:
                        breaks[pb].add(y)
                        changed = True
            for y in list(breaks[pb]):
                if sb < y < eb:
                    x = y - sb + sa
                    if x not in breaks[pa]:
                        breaks[pa].add(x)
                        changed = True

    sub_spans: dict[str, list[tuple[str, Fraction, Fraction]]] = {}
    new_piles: list[Pile] = []
    for pile in fol.piles:
        pts = sorted(breaks[pile.name])
        cuts = [Fraction(0)] + pts + [pile.measure]
        spans = []
        for i in range(len(cuts) - 1):
            sub = pile.name if len(cuts) == 2 else f"{pile.name}:{i}"
            spans.append((sub, cuts[i], cuts[i + 1]))
            new_piles.append(Pile(sub, pile.base, cuts[i + 1] - cuts[i]))
        sub_spans[pile.name] = spans

    def covering(pile: str, lo: Fraction, hi: Fraction):
        return [(sub, s, e) for sub, s, e in sub_spans[pile]
                if lo <= s and e <= hi]

    new_matches = []
    for m in fol.matches:
        sa, ea = fol.block_interval(m.a)
        sb, _ = fol.block_interval(m.b)
        for sub_a, s, e in covering(m.a[0], sa, ea):
            lo_b = s - sa + sb
            hit = [x for x in covering(m.b[0], lo_b, lo_b + (e - s))
                   if x[1] == lo_b]
            if len(hit) != 1 or hit[0][2] != lo_b + (e - s):
                raise FoliationError(
                    f"refinement failed to align match {m.a}~{m.b}")
            new_matches.append(GluingMatch(
                (sub_a, m.a[1], "a"), (hit[0][0], m.b[1], "a"), m.twist))
    refined = PrismaticFoliation(new_piles, None, tuple(new_matches),
                                 fol.declared_ends)
    return refined, sub_spans


# -- pile partition -----------------------------------------------------------


@dataclass(frozen=True)
class PilePair:
    """A base surface with a marked simplicial subdomain."""

    outer: TriangulatedSurface
    inner: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "inner", frozenset(int(t) for t in self.inner))
        missing = self.inner - set(self.outer.triangles)
        if missing:
            raise ValueError(f"inner triangles {sorted(missing)[:4]} "
                             "are not in the outer surface")


def partition_into_piles(pairs: Sequence[PilePair]):
    """Group pairs into simplicial-isomorphism classes.

    Returns a list of (representative index, member indices) with
    members sharing a pair isomorphism; deterministic order.
    """
    classes: dict[tuple, list[int]] = {}
    for i, pair in enumerate(pairs):
        key = canonical_form(pair.outer,
                             flags=lambda t, inner=pair.inner: t in inner)
        classes.setdefault(key, []).append(i)
    return [(members[0], tuple(members))
            for _, members in sorted(classes.items(),
                                     key=lambda kv: kv[1][0])]


# -- end counting -------------------------------------------------------------


def _match_shift(fol: PrismaticFoliation, m: GluingMatch) -> Fraction:
    sa, _ = fol.block_interval(m.a)
    sb, _ = fol.block_interval(m.b)
    return sb - sa


def end_count_estimate(fol: PrismaticFoliation, depth: int,
                       start_pile: str | None = None):
    """Estimate the number of ends of the generic leaf through a start
    plaque by finite exploration of the unrolled gluing graph.

    Nodes are (pile, offset vector): gluings whose two blocks sit at
    different vertical offsets unroll into a fresh integer direction,
    while zero-shift gluings identify plaques directly.  The estimate
    counts complementary components of a radius ball that reach the
    exploration frontier; plaques reached through different shifted
    gluings are never identified.  Returns 0, 1, 2, inf or
    "undetermined".
    """
    if depth < 1:
        raise ValueError("depth must be positive")
    require_valid(fol)
    if not fol.piles:
        return 0
    shifted = [i for i, m in enumerate(fol.matches)
               if _match_shift(fol, m) != 0]
    coord = {mi: k for k, mi in enumerate(shifted)}
    dim = len(shifted)
    pile_index = {p.name: i for i, p in enumerate(fol.piles)}

    incident: dict[int, list[tuple[int, int]]] = {i: [] for i in pile_index.values()}
    for mi, m in enumerate(fol.matches):
        ia, ib = pile_index[m.a[0]], pile_index[m.b[0]]
        step = coord.get(mi)
        incident[ia].append((ib, 0 if step is None else +(step + 1)))
        incident[ib].append((ia, 0 if step is None else -(step + 1)))

    start_name = start_pile if start_pile is not None else fol.piles[0].name
    if start_name not in pile_index:
        raise FoliationError(f"no pile named {start_pile!r}")
    start = (pile_index[start_name], (0,) * dim)
    dist = {start: 0}
    frontier = [start]
    exhausted = True
    for r in range(1, depth + 1):
        nxt = []
        for node in frontier:
            ip, vec = node
            for iq, step in incident[ip]:
                if step == 0:
                    nv = vec
                else:
                    k = abs(step) - 1
                    nv = vec[:k] + (vec[k] + (1 if step > 0 else -1),) + vec[k + 1:]
                other = (iq, nv)
                if other not in dist:
                    dist[other] = r
                    nxt.append(other)
        frontier = nxt
        if not frontier:
            break
    else:
        exhausted = False
    if exhausted:
        return 0

    nodes = sorted(dist)
    at_frontier = {n for n, d in dist.items() if d == depth}
    counts = []
    for r in range(1, depth):
        outside = [n for n in nodes if dist[n] > r]
        seen: set = set()
        c = 0
        for n in outside:
            if n in seen:
                continue
            stack, comp, touches = [n], {n}, False
            while stack:
                cur = stack.pop()
                if cur in at_frontier:
                    touches = True
                ip, vec = cur
                for iq, step in incident[ip]:
                    if step == 0:
                        nv = vec
                    else:
                        k = abs(step) - 1
                        nv = vec[:k] + (vec[k] + (1 if step > 0 else -1),) + vec[k + 1:]
                    other = (iq, nv)
                    if other in dist and dist[other] > r and other not in comp:
                        comp.add(other)
                        stack.append(other)
            seen |= comp
            if touches:
                c += 1
        counts.append(c)
    window = counts[-2:]
    if len(window) >= 1 and all(c == window[-1] for c in window):
        value = window[-1]
        if value >= 3:
            return ENDS_INF
        return value
    return "undetermined"


# -- the classification table -------------------------------------------------


@dataclass(frozen=True)
class TableCell:
    """One cell of the sign-of-Eu x number-of-ends classification."""

    eu_sign: str
    ends: object
    label: str
    amenability: str

    @property
    def empty(self) -> bool:
        return self.label == "∅"

    def __str__(self):
        return self.label


def _cells():
    A, N, B, E = ("amenable", "non-amenable", "amenable or non-amenable",
                  "empty")
    rows = [
        ("+", 0, "Σ⁰ (sphere)", A),
        ("0", 0, "Σ¹ (torus)", A),
        ("-", 0, "Σ^g = Σ¹#…#Σ¹ (g ≥ 2)", A),
        ("+", 1, "∅", E),
        ("0", 1, "Φ(ℂ)", A),
        ("-", 1, "Φ(ℂ)^#_T / N.M.", B),
        ("+", 2, "∅", E),
        ("0", 2, "Φ(ℝ)×ℝ/ℤ", A),
        ("-", 2, "(Φ(ℝ)×ℝ/ℤ)^#_T", A),
        ("+", ENDS_INF, "∅", E),
        ("0", ENDS_INF, "∅", E),
        ("-", ENDS_INF, "N.M. (non-amenable)", N),
    ]
    return {(s, e): TableCell(s, e, lab, am) for s, e, lab, am in rows}


CLASSIFICATION_TABLE = _cells()


def classify_cell(eu_sign, ends) -> TableCell:
    """Look up the classification cell for a sign of Eu and an end count."""
    if isinstance(eu_sign, str):
        sign = eu_sign
    else:
        val = as_fraction(eu_sign)
        sign = "+" if val > 0 else ("-" if val < 0 else "0")
    if sign not in ("+", "0", "-"):
        raise ValueError(f"bad Euler sign {eu_sign!r}")
    if isinstance(ends, str):
        ends = ENDS_INF if ends in ("inf", "∞") else int(ends)
    if ends not in (0, 1, 2, ENDS_INF):
        raise ValueError(f"bad end count {ends!r}")
    return CLASSIFICATION_TABLE[(sign, ends)]


def classify_piles(fol: PrismaticFoliation):
    """Per-pile surface classes, in pile order."""
    return [(p.name, classify_surface(p.base)) for p in fol.piles]
