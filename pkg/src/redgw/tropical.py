"""Combinatorial shadow of the moduli space: cone complexes, combinatorial
types, central alignment, well-spacedness, and boundary-divisor enumeration.

Conventions
-----------
* Types live over a half-line subdivided at ``s`` interior vertices (levels
  1..s); level 0 is the ambient target.  Edges map onto target edges, so an
  edge joining distinct levels has positive slope and an edge within a level
  has slope 0.  Marking legs may emanate from any vertex.
* A boundary divisor of the recursion at marking 0 is a ray (one-dimensional
  cone) of the aligned complex whose generic map places marking 0 on a
  level-1 vertex.  Rays carry one expansion level and no slope-0 edges: every
  cross-level edge length is tied to the single target edge length.
* Self-loop edges are excluded; a nonseparating node is modelled by a pair of
  parallel edges between two vertices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction as Rat
from math import lcm
from typing import Iterable, Optional, Sequence

from .keys import (
    CombinatorialType,
    Edge,
    TangencyVector,
    ValidationError,
    Vertex,
)

__all__ = [
    "Cone",
    "AlignmentData",
    "BoundaryDivisor",
    "enumerate_types",
    "image_order",
    "align",
    "is_well_spaced",
    "enumerate_boundary_divisors",
    "star",
    "core_vertices",
]


# ---------------------------------------------------------------------------
# Linear forms over named coordinates (exact arithmetic)
# ---------------------------------------------------------------------------

LinForm = tuple[tuple[str, Rat], ...]


def form(*terms: tuple[str, int | Rat]) -> LinForm:
    acc: dict[str, Rat] = {}
    for name, c in terms:
        acc[name] = acc.get(name, Rat(0)) + Rat(c)
    return tuple(sorted((k, v) for k, v in acc.items() if v != 0))


def form_sub(a: LinForm, b: LinForm) -> LinForm:
    acc = dict(a)
    for k, v in b:
        acc[k] = acc.get(k, Rat(0)) - v
    return tuple(sorted((k, v) for k, v in acc.items() if v != 0))


def _echelon(vectors: list[dict[str, Rat]]) -> list[dict[str, Rat]]:
    basis: list[dict[str, Rat]] = []
    for vec in vectors:
        vec = dict(vec)
        for b in basis:
            pivot = next(iter(sorted(b)))
            if vec.get(pivot):
                c = vec[pivot] / b[pivot]
                for k, v in b.items():
                    vec[k] = vec.get(k, Rat(0)) - c * v
        vec = {k: v for k, v in vec.items() if v != 0}
        if vec:
            basis.append(vec)
            basis.sort(key=lambda b: sorted(b)[0])
    return basis


class _Span:
    """Row space of a set of linear relations, with membership testing."""

    def __init__(self, relations: Iterable[LinForm]):
        self.basis = _echelon([dict(r) for r in relations if r])

    @property
    def rank(self) -> int:
        return len(self.basis)

    def reduce(self, vec: LinForm) -> LinForm:
        acc = dict(vec)
        changed = True
        while changed:
            changed = False
            for b in self.basis:
                pivot = sorted(b)[0]
                if acc.get(pivot):
                    c = acc[pivot] / b[pivot]
                    for k, v in b.items():
                        acc[k] = acc.get(k, Rat(0)) - c * v
                    changed = True
        return tuple(sorted((k, v) for k, v in acc.items() if v != 0))

    def contains(self, vec: LinForm) -> bool:
        return not self.reduce(vec)

    def contains_all(self, other: "_Span") -> bool:
        return all(self.contains(tuple(sorted(b.items()))) for b in other.basis)


# ---------------------------------------------------------------------------
# Cones and alignment data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Cone:
    """A cone cut out of a coordinate orthant by integral linear equalities.

    ``blocks`` optionally records the defining total preorder of coordinate
    forms (for subdivision cones), outermost-first; coordinates tied in a
    block are equal on the cone.
    """

    coordinates: tuple[str, ...]
    relations: tuple[LinForm, ...] = ()
    blocks: tuple[tuple[str, ...], ...] = ()

    @property
    def dim(self) -> int:
        return len(self.coordinates) - _Span(self.relations).rank

    def span(self) -> _Span:
        return _Span(self.relations)

    def implies(self, rel: LinForm) -> bool:
        return self.span().contains(rel)


@dataclass(frozen=True)
class AlignmentData:
    """Central-alignment record: the radius, the vertex distance forms, and
    the chosen total order (blocks of vertex indices, innermost first)."""

    delta: LinForm
    distances: tuple[tuple[int, LinForm], ...]
    order: tuple[tuple[int, ...], ...] = ()

    def distance_of(self, v: int) -> Optional[LinForm]:
        for i, f in self.distances:
            if i == v:
                return f
        return None


TRIVIAL_ALIGNMENT = AlignmentData(delta=(), distances=(), order=())


# ---------------------------------------------------------------------------
# Core / graph helpers
# ---------------------------------------------------------------------------

def core_vertices(ct: CombinatorialType) -> tuple[int, ...]:
    """Vertices of the minimal genus-one subgraph (a genus-1 vertex, or the
    unique cycle when the genus is carried by the first Betti number)."""
    g1 = [i for i, v in enumerate(ct.vertices) if v.genus == 1]
    if g1:
        return (g1[0],)
    if ct.betti() == 0:
        return ()
    # find the unique cycle by iteratively stripping leaves
    deg = [0] * len(ct.vertices)
    adj: dict[int, list[tuple[int, int]]] = {i: [] for i in range(len(ct.vertices))}
    for ei, e in enumerate(ct.edges):
        deg[e.v] += 1
        deg[e.w] += 1
        adj[e.v].append((e.w, ei))
        adj[e.w].append((e.v, ei))
    alive = set(range(len(ct.vertices)))
    removed_edges: set[int] = set()
    changed = True
    while changed:
        changed = False
        for i in list(alive):
            live = [(j, ei) for j, ei in adj[i] if j in alive and ei not in removed_edges]
            if len(live) <= 1:
                alive.discard(i)
                for _, ei in live:
                    removed_edges.add(ei)
                changed = True
    return tuple(sorted(alive))


def _adjacency(ct: CombinatorialType) -> dict[int, list[tuple[int, int]]]:
    adj: dict[int, list[tuple[int, int]]] = {i: [] for i in range(len(ct.vertices))}
    for ei, e in enumerate(ct.edges):
        adj[e.v].append((e.w, ei))
        adj[e.w].append((e.v, ei))
    return adj


def _distance_forms(ct: CombinatorialType, roots: Sequence[int]) -> dict[int, LinForm]:
    """Path-length forms from the core to each vertex (edge coordinates
    ``e{i}``), by breadth-first search; the graph minus the core is a forest
    for the types we handle, so paths are unique."""
    dist: dict[int, LinForm] = {r: () for r in roots}
    adj = _adjacency(ct)
    frontier = list(roots)
    while frontier:
        nxt = []
        for v in frontier:
            for w, ei in adj[v]:
                if w not in dist:
                    dist[w] = form(*dist[v], (f"e{ei}", 1))
                    nxt.append(w)
        frontier = nxt
    return dist


# ---------------------------------------------------------------------------
# Ordered set partitions (total preorders)
# ---------------------------------------------------------------------------

def _ordered_set_partitions(items: Sequence):
    items = list(items)
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for sub in _ordered_set_partitions(rest):
        # insert `first` into an existing block or as a new block
        for i in range(len(sub)):
            yield sub[:i] + (sub[i] + (first,),) + sub[i + 1:]
        for i in range(len(sub) + 1):
            yield sub[:i] + ((first,),) + sub[i:]


# ---------------------------------------------------------------------------
# image_order
# ---------------------------------------------------------------------------

def image_order(ct: CombinatorialType) -> list[Cone]:
    """Subdivision of the type's moduli cone induced by totally ordering the
    images of positive-level vertices in R_{>0}."""
    positive = [i for i, v in enumerate(ct.vertices) if v.level >= 1]
    coords = tuple(f"p{i}" for i in positive)
    if not positive:
        return [Cone(coordinates=(), relations=(), blocks=())]
    cones = []
    for partition in _ordered_set_partitions([f"p{i}" for i in positive]):
        relations = []
        for block in partition:
            ref = block[0]
            for other in block[1:]:
                relations.append(form((ref, 1), (other, -1)))
        cones.append(
            Cone(
                coordinates=coords,
                relations=tuple(relations),
                blocks=tuple(tuple(sorted(b)) for b in partition),
            )
        )
    return cones


# ---------------------------------------------------------------------------
# align
# ---------------------------------------------------------------------------

def align(cone: Cone, ct: CombinatorialType) -> list[tuple[Cone, AlignmentData]]:
    """Central-alignment subdivision of ``cone`` for a genus-one type.

    Vertices whose path to the core passes only through degree-0 vertices can
    lie within the alignment radius; their distance forms (in edge-length
    coordinates) are totally preordered, consistently with the path partial
    order and with the relations already on the cone.
    """
    if ct.total_genus() == 0:
        return [(cone, TRIVIAL_ALIGNMENT)]
    core = core_vertices(ct)
    if any(ct.vertices[i].degree > 0 for i in core):
        return [(cone, TRIVIAL_ALIGNMENT)]
    dist = _distance_forms(ct, core)
    adj = _adjacency(ct)
    # vertices reachable from the core through degree-0 vertices
    region: set[int] = set(core)
    frontier = list(core)
    while frontier:
        v = frontier.pop()
        for w, _ in adj[v]:
            if w in region:
                continue
            region.add(w)
            if ct.vertices[w].degree == 0:
                frontier.append(w)
    candidates = sorted(region - set(core))
    if not candidates:
        return [(cone, TRIVIAL_ALIGNMENT)]
    span = cone.span()
    # path partial order: ancestors must come strictly before descendants
    anc = {v: _path_ancestors(ct, adj, dist, core, v) for v in candidates}
    results = []
    for partition in _ordered_set_partitions(candidates):
        block_of = {}
        for bi, block in enumerate(partition):
            for v in block:
                block_of[v] = bi
        ok = True
        for v in candidates:
            for a in anc[v]:
                if block_of[a] >= block_of[v]:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        relations = list(cone.relations)
        for block in partition:
            ref = block[0]
            for other in block[1:]:
                rel = span.reduce(form_sub(dist[ref], dist[other]))
                if rel:
                    relations.append(rel)
        # delta: the distance of the first block containing a positive-degree
        # vertex; if none, the outermost block
        delta_block = None
        for block in partition:
            if any(ct.vertices[v].degree > 0 for v in block):
                delta_block = block
                break
        if delta_block is None:
            delta_block = partition[-1]
        alignment = AlignmentData(
            delta=dist[delta_block[0]],
            distances=tuple((v, dist[v]) for v in sorted(dist)),
            order=tuple(tuple(sorted(b)) for b in partition),
        )
        coords = tuple(sorted({f"e{i}" for i in range(len(ct.edges))} |
                              set(cone.coordinates)))
        results.append(
            (Cone(coordinates=coords, relations=tuple(relations),
                  blocks=tuple(tuple(sorted(b)) for b in partition)),
             alignment)
        )
    return results


def _path_ancestors(ct, adj, dist, core, v) -> set[int]:
    """Vertices strictly between the core and v (excluding core vertices)."""
    # BFS tree parents
    parent: dict[int, Optional[int]] = {c: None for c in core}
    frontier = list(core)
    while frontier:
        u = frontier.pop(0)
        for w, _ in adj[u]:
            if w not in parent:
                parent[w] = u
                frontier.append(w)
    out = set()
    cur = parent.get(v)
    while cur is not None and cur not in core:
        out.add(cur)
        cur = parent.get(cur)
    return out


# ---------------------------------------------------------------------------
# well-spacedness
# ---------------------------------------------------------------------------

def is_well_spaced(ct: CombinatorialType, alignment: Optional[AlignmentData] = None) -> bool:
    """Tropical smoothability of a genus-one type.

    True when (1) no open neighbourhood of the core is contracted to a point
    of R_{>0}, or (2) the minimal core-distance among vertices supporting
    nonzero-slope flags at the contracted image point is attained at two or
    more distinct vertices.  (The paper's figure fixes the reading of
    "two indices": two distinct supporting vertices.)
    """
    if ct.total_genus() != 1:
        raise ValidationError("well-spacedness applies to genus-one types")
    core = core_vertices(ct)
    # condition (1): core at level 0, or some flag at the core has slope != 0
    if any(ct.vertices[i].level == 0 for i in core):
        return True
    for i in core:
        if any(s != 0 for s, _ in ct.flags(i)):
            return True
    # contracted region: slope-0-connected component of the core
    adj = _adjacency(ct)
    region = set(core)
    frontier = list(core)
    while frontier:
        v = frontier.pop()
        for w, ei in adj[v]:
            if ct.edges[ei].slope == 0 and w not in region:
                region.add(w)
                frontier.append(w)
    dist = _distance_forms(ct, core)
    supporting = []
    for v in sorted(region):
        if v in core:
            continue
        nonzero = any(s != 0 for s, _ in ct.flags(v))
        if nonzero:
            supporting.append(v)
    if not supporting:
        return True  # nothing maps with nonzero slope near the core: vacuous
    # compare distance forms, using the alignment order when available
    if alignment is not None and alignment.order:
        block_of = {}
        for bi, block in enumerate(alignment.order):
            for v in block:
                block_of[v] = bi
        ranked = [(block_of.get(v, len(alignment.order)), v) for v in supporting]
        least = min(r for r, _ in ranked)
        return sum(1 for r, _ in ranked if r == least) >= 2
    # coefficientwise comparison: v strictly below w when w - v is a nonzero
    # nonnegative combination of edge lengths
    def leq(a: LinForm, b: LinForm) -> bool:
        diff = dict(form_sub(b, a))
        return all(c >= 0 for c in diff.values()) and bool(diff)

    minimal = []
    for v in supporting:
        if not any(leq(dist[w], dist[v]) for w in supporting if w != v):
            minimal.append(v)
    if len(minimal) >= 2:
        # minimal forms must actually agree (or be incomparable ties)
        return True
    return False


# ---------------------------------------------------------------------------
# Type enumeration
# ---------------------------------------------------------------------------

def canonical_type(ct: CombinatorialType) -> tuple:
    """Canonical signature of a type up to decoration-preserving isomorphism
    (marking labels are fixed; vertex labels are not)."""
    k = len(ct.vertices)
    best = None
    for perm in itertools.permutations(range(k)):
        vsig = tuple(
            (ct.vertices[orig].genus, ct.vertices[orig].degree,
             ct.vertices[orig].level)
            for orig in sorted(range(k), key=lambda i: perm[i])
        )
        esig = tuple(sorted(
            (min(perm[e.v], perm[e.w]), max(perm[e.v], perm[e.w]), e.slope)
            for e in ct.edges
        ))
        lsig = tuple((perm[v], s) for v, s in ct.legs)
        sig = (ct.targetLevels, vsig, esig, lsig)
        if best is None or sig < best:
            best = sig
    return best


def _stable(v: Vertex, nflags: int) -> bool:
    if v.genus == 1:
        return v.degree > 0 or nflags >= 1
    return v.degree > 0 or nflags >= 3


def _vertex_flag_count(ct: CombinatorialType, i: int) -> int:
    return len(ct.flags(i))


def _all_stable(ct: CombinatorialType) -> bool:
    return all(_stable(v, _vertex_flag_count(ct, i)) for i, v in enumerate(ct.vertices))


def enumerate_types(
    genus: int,
    d: int,
    alpha: TangencyVector,
    maxCodim: int,
) -> list[CombinatorialType]:
    """All combinatorial types of cone dimension <= maxCodim, up to
    isomorphism.  Supported up to maxCodim = 1 (smooth types, one-edge
    level-0 degenerations, and single-expansion rays)."""
    if maxCodim > 1:
        raise ValidationError("enumerate_types supports maxCodim <= 1")
    if d < 0:
        raise ValidationError("degree must be nonnegative")
    n = alpha.n
    out: dict[tuple, CombinatorialType] = {}

    def record(ct: CombinatorialType) -> None:
        try:
            ct.validate(genus, d)
        except ValidationError:
            return
        if not _all_stable(ct):
            return
        out.setdefault(canonical_type(ct), ct)

    # codim 0: one vertex at level 0
    record(CombinatorialType(
        vertices=(Vertex(genus=genus, degree=d, level=0, markings=tuple(range(n))),),
        edges=(),
        legs=tuple((0, alpha.entries[i]) for i in range(n)),
        targetLevels=0,
    ))
    if maxCodim == 0:
        return sorted(out.values(), key=canonical_type)

    # codim 1, s=0: two level-0 vertices joined by one or two slope-0 edges
    for marks0 in _subsets(range(n)):
        marks1 = tuple(i for i in range(n) if i not in marks0)
        d0 = sum(alpha.entries[i] for i in marks0)
        d1 = d - d0
        if d1 < 0 or d1 != sum(alpha.entries[i] for i in marks1):
            continue
        legs = tuple(
            (0 if i in marks0 else 1, alpha.entries[i]) for i in range(n)
        )
        for g0, g1, nedges in _genus_splits(genus):
            edges = tuple(Edge(0, 1, 0) for _ in range(nedges))
            if nedges + 0 > 1 and maxCodim < nedges:
                continue
            record(CombinatorialType(
                vertices=(Vertex(g0, d0, 0, marks0), Vertex(g1, d1, 0, marks1)),
                edges=edges,
                legs=legs,
                targetLevels=0,
            ))

    # codim 1, s=1: single-expansion types with no slope-0 edges
    for ct in _expansion_types(genus, d, alpha):
        record(ct)
    return sorted(out.values(), key=canonical_type)


def _subsets(items):
    items = list(items)
    for r in range(len(items) + 1):
        for c in itertools.combinations(items, r):
            yield tuple(c)


def _genus_splits(genus: int):
    """(g0, g1, #parallel slope-0 edges) choices for a two-vertex level-0
    degeneration of total genus ``genus`` with cone dimension 1 (one edge)."""
    if genus == 0:
        yield (0, 0, 1)
    else:
        yield (1, 0, 1)
        yield (0, 1, 1)


def _compositions(total: int, parts: int, minimum: int = 0):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(minimum, total + 1):
        for rest in _compositions(total - first, parts - 1, minimum):
            yield (first,) + rest


def _expansion_types(genus: int, d: int, alpha: TangencyVector,
                     max_vertices: int | None = None):
    """Generate single-expansion (s=1) types with no slope-0 edges."""
    n = alpha.n
    # At most d cross edges (each adds >= 1 to the level-0 degree total), so
    # a connected one-expansion type has at most d+1 vertices (d+2 with a
    # cycle); edgeless types have a single vertex.
    cap = max_vertices if max_vertices is not None else d + 2
    for k in range(1, cap + 1):
        for k1 in range(1, k + 1):  # at least one level-1 vertex in s=1 types
            k0 = k - k1
            # edge count: connected bipartite graph, first Betti number 0 or 1
            for b1 in (0, 1) if genus == 1 else (0,):
                nedges = k - 1 + b1
                if k0 == 0 and nedges > 0:
                    continue
                # Each cross edge contributes its slope (>= 1) to a level-0
                # degree, and level-0 degrees sum to at most d.
                if k0 >= 1 and nedges > d:
                    continue
                yield from _edge_fill(genus, d, alpha, k0, k1, b1, nedges)


def _compositions_bounded(total: int, parts: int):
    """Compositions into ``parts`` nonnegative entries with sum <= total."""
    for t in range(total + 1):
        yield from _compositions(t, parts)


def _genus_assignments(k: int, total: int):
    if total == 0:
        yield (0,) * k
    else:
        for i in range(k):
            yield tuple(1 if j == i else 0 for j in range(k))


def _marking_assignments(n: int, k: int):
    for assign in itertools.product(range(k), repeat=n):
        yield assign


def _edge_fill(genus, d, alpha, k0, k1, b1, nedges):
    """Complete a vertex skeleton with cross-level edges, slopes, markings
    and genus assignment.  Vertex degrees are dictated by balancing: a
    level-0 vertex's degree is the sum of its outgoing slopes, a level-1
    vertex's base degree is its leg slopes minus its downward edge slopes;
    inconsistent or off-total candidates are skipped before any object is
    built."""
    n = alpha.n
    k = k0 + k1
    pairs = [(i, k0 + j) for i in range(k0) for j in range(k1)]
    if nedges > 0 and not pairs:
        return
    max_slope = max(d, max(alpha.entries, default=0), 1)
    slope_choices = [
        s for s in itertools.product(range(1, max_slope + 1), repeat=nedges)
        if k0 == 0 or sum(s) <= d
    ]
    genus_options = (
        [tuple(1 if j == i else 0 for j in range(k)) for i in range(k)]
        if genus - b1 == 1 else [(0,) * k]
    )
    for combo in itertools.combinations_with_replacement(pairs, nedges):
        for slopes in slope_choices:
            edge_slope_at = [0] * k
            for (a, b), s in zip(combo, slopes):
                edge_slope_at[a] += s
                edge_slope_at[b] += s
            for marks in _marking_assignments(n, k):
                leg_slope_at = [0] * k
                for j in range(n):
                    leg_slope_at[marks[j]] += alpha.entries[j]
                degs = []
                ok = True
                for i in range(k):
                    if i < k0:
                        degs.append(edge_slope_at[i] + leg_slope_at[i])
                    else:
                        base = leg_slope_at[i] - edge_slope_at[i]
                        if base < 0:
                            ok = False
                            break
                        degs.append(base)
                if not ok or sum(degs) != d:
                    continue
                legs = tuple((marks[j], alpha.entries[j]) for j in range(n))
                edges = tuple(
                    Edge(a, b, s) for (a, b), s in zip(combo, slopes)
                )
                for g_assign in genus_options:
                    vertices = tuple(
                        Vertex(
                            genus=g_assign[i],
                            degree=degs[i],
                            level=(0 if i < k0 else 1),
                            markings=tuple(
                                j for j in range(n) if marks[j] == i
                            ),
                        )
                        for i in range(k)
                    )
                    yield CombinatorialType(
                        vertices=vertices, edges=edges, legs=legs,
                        targetLevels=1,
                    )


# ---------------------------------------------------------------------------
# Boundary divisors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundaryDivisor:
    """A classified codimension-1 stratum of the aligned complex."""

    ctype: CombinatorialType
    alignment: AlignmentData
    kind: str  # "I" | "II" | "III" | "Dagger"
    slopes: tuple[int, ...]
    pruned: Optional[str] = None  # reason, when excluded by a vanishing lemma

    def cone(self) -> Cone:
        ct = self.ctype
        if not ct.edges:
            return Cone(coordinates=("l1",), relations=())
        coords = tuple(f"e{i}" for i in range(len(ct.edges)))
        relations = []
        ref = None
        for i, e in enumerate(ct.edges):
            if e.slope == 0:
                continue
            if ref is None:
                ref = (i, e.slope)
                continue
            relations.append(form((f"e{ref[0]}", ref[1]), (f"e{i}", -e.slope)))
        return Cone(coordinates=coords, relations=tuple(relations))

    def phi_on_generator(self) -> Optional[int]:
        """Lattice index of the recursion's piecewise-linear function on the
        primitive generator of the ray: the height of the recursion marking's
        vertex, i.e. lcm of the positive edge slopes (or 1 for an edgeless
        whole-curve ray); 0 when the marking stays at level 0."""
        ct = self.ctype
        mark_vertex = ct.legs[0][0]
        if ct.vertices[mark_vertex].level == 0:
            return 0
        positive = [e.slope for e in ct.edges if e.slope >= 1]
        if not positive:
            return 1
        return lcm(*positive)

    def signature(self) -> tuple:
        return (self.kind, self.slopes, canonical_type(self.ctype), self.pruned)


def classify_divisor(ct: CombinatorialType) -> str:
    """Kind of a single-expansion ray: I (genus-one vertex at level 0),
    II (genus carried by a cycle), III (genus-one vertex at a positive level
    with positive base degree), Dagger (contracted core at a positive level).
    """
    core = core_vertices(ct)
    if not core:
        raise ValidationError("classify_divisor expects a genus-one type")
    if ct.betti() == 1:
        return "II"
    [c] = core
    v = ct.vertices[c]
    if v.level == 0:
        return "I"
    return "III" if v.degree > 0 else "Dagger"


def enumerate_boundary_divisors(
    d: int,
    alpha: TangencyVector,
    kindFilter: Optional[set[str]] = None,
    genus: int = 1,
    prune: bool = True,
) -> list[BoundaryDivisor]:
    """Rays of the aligned, well-spaced complex whose generic map puts the
    recursion marking (marking 0) on a level-1 component.

    With ``prune`` (default) the rays whose contribution vanishes by the
    projection-formula lemmas are excluded; without it they are returned with
    a ``pruned`` reason so the vanishing can be tested.
    """
    if d < 1:
        raise ValidationError("boundary enumeration requires d >= 1")
    divisors: dict[tuple, BoundaryDivisor] = {}
    for ct in _expansion_types(genus, d, alpha):
        try:
            ct.validate(genus, d)
        except ValidationError:
            continue
        if ct.vertices[ct.legs[0][0]].level == 0:
            continue
        if not _all_stable(ct):
            continue
        slopes = tuple(sorted(e.slope for e in ct.edges))
        if genus == 1:
            kind = classify_divisor(ct)
            if not is_well_spaced(ct):
                continue
        else:
            kind = "I"
        pruned = None
        if kind == "Dagger":
            level1 = [i for i, v in enumerate(ct.vertices) if v.level >= 1]
            stable1 = [
                i for i in level1
                if _stable(ct.vertices[i], _vertex_flag_count(ct, i))
            ]
            if len(stable1) > 1:
                pruned = "multiple stable vertices over the positive target vertex"
        if pruned and prune:
            continue
        if kindFilter is not None and kind not in kindFilter:
            continue
        div = BoundaryDivisor(
            ctype=ct,
            alignment=TRIVIAL_ALIGNMENT,
            kind=kind,
            slopes=slopes,
            pruned=pruned,
        )
        divisors.setdefault(div.signature(), div)
    return sorted(divisors.values(), key=lambda dv: dv.signature())


# ---------------------------------------------------------------------------
# star
# ---------------------------------------------------------------------------

def _is_face(tau: Cone, sigma: Cone) -> bool:
    """tau is a face of sigma: tau's relations imply sigma's, and sigma's
    preorder refines tau's (each sigma block lies inside one tau block, in
    order)."""
    if not _Span(tau.relations).contains_all(_Span(sigma.relations)):
        return False
    if not tau.blocks or not sigma.blocks:
        return True
    ti = 0
    for sblock in sigma.blocks:
        while ti < len(tau.blocks) and not set(sblock) <= set(tau.blocks[ti]):
            ti += 1
        if ti == len(tau.blocks):
            return False
    return True


def star(cone: Cone, complex_: Sequence[Cone]) -> list[Cone]:
    """All cones of the complex containing ``cone`` (i.e. having it as a
    face), as a sub-complex."""
    if not any(_cone_eq(cone, c) for c in complex_):
        raise ValidationError("cone does not belong to the complex")
    return [c for c in complex_ if _is_face(cone, c)]


def _cone_eq(a: Cone, b: Cone) -> bool:
    sa, sb = _Span(a.relations), _Span(b.relations)
    return (set(a.coordinates) == set(b.coordinates)
            and sa.contains_all(sb) and sb.contains_all(sa)
            and a.blocks == b.blocks)
