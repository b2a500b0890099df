"""Exact bunkbed connection polynomials by exhaustive enumeration.

The bunkbed over a base graph has two copies of every vertex joined by a
vertical edge, and two horizontal copies of every base edge.  Connection
probabilities between bunkbed vertices are computed as exact polynomials
in the retention probability p by enumerating every open/closed
assignment of the randomized edges; optionally the vertical edges are
conditioned to a fixed set of open posts instead of being randomized.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .enumeration import (
    Caps,
    DEFAULT_CAPS,
    CapExceededError,
    connection_counts,
)
from .graphs import INFINITY, Multigraph, Vertex, vertical_free_distance
from .polynomials import VAR_P, RationalPoly

BunkbedVertex = tuple  # (base vertex, level 0 or 1)

LEVELS = (0, 1)


def bunkbed_vertex(v: Vertex, level: int) -> BunkbedVertex:
    if level not in LEVELS:
        raise ValueError("level must be 0 or 1")
    return (v, level)


def horizontal_edge_id(eid, level: int):
    return ("h", eid, level)


def vertical_edge_id(v: Vertex):
    return ("v", v)


def bunkbed(g: Multigraph) -> Multigraph:
    """The two-level graph: 2|V| vertices, 2|E| horizontal + |V| vertical edges."""
    vertices = tuple((v, level) for v in g.vertices for level in LEVELS)
    edges = []
    for eid, a, b in g.edges:
        for level in LEVELS:
            edges.append((horizontal_edge_id(eid, level), (a, level), (b, level)))
    for v in g.vertices:
        edges.append((vertical_edge_id(v), (v, 0), (v, 1)))
    return Multigraph(vertices, tuple(edges))


@dataclass(frozen=True)
class _Arena:
    """Index-space view of a bunkbed with a chosen vertical conditioning."""

    num_vertices: int
    base_pairs: tuple
    items: tuple
    item_ids: tuple
    index: dict

    @property
    def bits(self) -> int:
        return len(self.items)


def _build_arena(g: Multigraph, pinned: Optional[Iterable[Vertex]]) -> _Arena:
    index = {}
    for i, v in enumerate(g.vertices):
        index[(v, 0)] = 2 * i
        index[(v, 1)] = 2 * i + 1

    items = []
    item_ids = []
    for eid, a, b in g.edges:
        for level in LEVELS:
            pair = (index[(a, level)], index[(b, level)])
            items.append(((), (pair,)))
            item_ids.append(horizontal_edge_id(eid, level))

    base_pairs = []
    if pinned is None:
        for v in g.vertices:
            items.append(((), ((index[(v, 0)], index[(v, 1)]),)))
            item_ids.append(vertical_edge_id(v))
    else:
        pinned = set(pinned)
        for v in pinned:
            g.require_vertex(v)
        for v in g.vertices:
            if v in pinned:
                base_pairs.append((index[(v, 0)], index[(v, 1)]))

    return _Arena(
        num_vertices=2 * g.vertex_count,
        base_pairs=tuple(base_pairs),
        items=tuple(items),
        item_ids=tuple(item_ids),
        index=index,
    )


def _check_cap(bits: int, caps: Caps) -> None:
    if bits > caps.max_config_bits:
        raise CapExceededError(
            f"enumeration needs 2^{bits} configurations; "
            f"raise max_config_bits to at least {bits} (currently {caps.max_config_bits})"
        )


def _distance_order(g: Multigraph, arena: _Arena, anchors: Sequence[BunkbedVertex]) -> list[int]:
    """Process items near the query endpoints first.

    Counts bucketed by 1-bits are invariant under item order, but the
    subtree prunes fire much earlier when the neighborhood of an anchor
    vertex is decided before far-away edges.
    """
    bb = bunkbed(g)
    layer = {}
    frontier = [a for a in anchors if a in arena.index]
    for a in frontier:
        layer[a] = 0
    depth = 0
    while frontier:
        depth += 1
        nxt = []
        for x in frontier:
            for y, _ in bb.adjacency[x]:
                if y not in layer:
                    layer[y] = depth
                    nxt.append(y)
        frontier = nxt

    reverse = {i: v for v, i in arena.index.items()}

    def sort_key(pos: int) -> tuple:
        pairs = arena.items[pos][0] + arena.items[pos][1]
        ds = [layer.get(reverse[i], len(layer)) for pair in pairs for i in pair]
        return (min(ds), max(ds), pos)

    return sorted(range(len(arena.items)), key=sort_key)


def _query_counts(
    g: Multigraph,
    queries: Sequence[Sequence[tuple[BunkbedVertex, BunkbedVertex]]],
    pinned: Optional[Iterable[Vertex]],
    caps: Caps,
    workers: int,
    strategy: str,
) -> tuple[list[list[int]], int]:
    arena = _build_arena(g, pinned)
    _check_cap(arena.bits, caps)
    index = arena.index
    idx_queries = []
    for query in queries:
        pairs = []
        for a, b in query:
            if a not in index or b not in index:
                missing = a if a not in index else b
                raise ValueError(f"unknown bunkbed vertex {missing!r}")
            pairs.append((index[a], index[b]))
        idx_queries.append(tuple(pairs))

    items = list(arena.items)
    if arena.bits > 14:
        anchors = [pair[0] for q in queries for pair in q[:1]]
        anchors += [pair[1] for q in queries for pair in q[:1]]
        order = _distance_order(g, arena, anchors)
        items = [arena.items[i] for i in order]

    counts = connection_counts(
        arena.num_vertices,
        arena.base_pairs,
        items,
        idx_queries,
        workers=workers,
        strategy=strategy,
    )
    return counts, arena.bits


def counts_to_polynomial(counts: Sequence[int], bits: int) -> RationalPoly:
    """Sum of counts[j] * p^j * (1-p)^(bits-j), expanded exactly."""
    one_minus = RationalPoly((1, -1), VAR_P)
    powers = [RationalPoly.one(VAR_P)]
    for _ in range(bits):
        powers.append(powers[-1] * one_minus)
    acc = RationalPoly.zero(VAR_P)
    for j, c in enumerate(counts):
        if c:
            acc = acc + RationalPoly.monomial(j, c, VAR_P) * powers[bits - j]
    return acc


def connection_query_polynomials(
    g: Multigraph,
    queries: Sequence[Sequence[tuple[BunkbedVertex, BunkbedVertex]]],
    pinned: Optional[Iterable[Vertex]] = None,
    *,
    caps: Caps = DEFAULT_CAPS,
    workers: int = 1,
    strategy: str = "shared",
) -> list[RationalPoly]:
    """Exact probability, per query, that all its vertex pairs connect.

    Each query is a conjunction of bunkbed vertex pairs.  pinned=None
    randomizes the vertical edges along with the horizontal ones;
    pinned=t fixes verticals open exactly at the vertices of t.
    """
    counts, bits = _query_counts(g, queries, pinned, caps, workers, strategy)
    return [counts_to_polynomial(row, bits) for row in counts]


def connection_polynomial(
    g: Multigraph,
    a: BunkbedVertex,
    b: BunkbedVertex,
    pinned: Optional[Iterable[Vertex]] = None,
    *,
    caps: Caps = DEFAULT_CAPS,
    workers: int = 1,
    strategy: str = "shared",
) -> RationalPoly:
    """Exact polynomial in p for the event that a and b are connected."""
    return connection_query_polynomials(
        g, [((a, b),)], pinned, caps=caps, workers=workers, strategy=strategy
    )[0]


def endpoint_polynomials(
    g: Multigraph,
    u: Vertex,
    v: Vertex,
    pinned: Optional[Iterable[Vertex]] = None,
    *,
    caps: Caps = DEFAULT_CAPS,
    workers: int = 1,
    strategy: str = "shared",
) -> tuple[RationalPoly, RationalPoly]:
    """Connection polynomials for (u bottom, v bottom) and (u bottom, v top).

    Both are computed from one shared enumeration so the pair is exactly
    coupled configuration by configuration.
    """
    u0 = bunkbed_vertex(u, 0)
    polys = connection_query_polynomials(
        g,
        [((u0, bunkbed_vertex(v, 0)),), ((u0, bunkbed_vertex(v, 1)),)],
        pinned,
        caps=caps,
        workers=workers,
        strategy=strategy,
    )
    return polys[0], polys[1]


def difference_polynomial(
    g: Multigraph,
    u: Vertex,
    v: Vertex,
    pinned: Optional[Iterable[Vertex]] = None,
    *,
    caps: Caps = DEFAULT_CAPS,
    workers: int = 1,
    strategy: str = "shared",
) -> RationalPoly:
    """P(u bottom <-> v bottom) - P(u bottom <-> v top), exactly."""
    same, cross = endpoint_polynomials(
        g, u, v, pinned, caps=caps, workers=workers, strategy=strategy
    )
    return same - cross


def threshold_point(edge_count: int) -> Fraction:
    """Dyadic point 1 - 2^(-ceil(|E|/2) - 2), at or above the proof threshold."""
    if edge_count < 0:
        raise ValueError("edge count must be nonnegative")
    return Fraction(1) - Fraction(1, 2 ** ((edge_count + 1) // 2 + 2))


def connected_avoiding(g: Multigraph, u: Vertex, v: Vertex, pinned: Iterable[Vertex]) -> bool:
    """True iff u and v are joined by a path avoiding the pinned set entirely."""
    return vertical_free_distance(g, u, v, pinned) != INFINITY


@dataclass(frozen=True)
class GeodesicCheck:
    """Lowest-order behavior of a connection polynomial near p = 0."""

    distance: float
    geodesic_count: int
    polynomial: RationalPoly
    verdict: bool


def _bfs_geodesics(g: Multigraph, start, goal) -> tuple[float, int]:
    """Distance and number of shortest paths, loops ignored, parallels counted."""
    if start == goal:
        return 0, 1
    dist = {start: 0}
    count = {start: 1}
    frontier = [start]
    d = 0
    while frontier:
        d += 1
        found: dict = {}
        for x in frontier:
            for y, _ in g.adjacency[x]:
                if y == x or y in dist:
                    continue
                found[y] = found.get(y, 0) + count[x]
        for y, c in found.items():
            dist[y] = d
            count[y] = c
        if goal in found:
            return d, found[goal]
        frontier = list(found)
    return INFINITY, 0


def geodesic_check(
    g: Multigraph,
    u: Vertex,
    v: Vertex,
    *,
    caps: Caps = DEFAULT_CAPS,
    workers: int = 1,
) -> GeodesicCheck:
    """Check that the connection polynomial starts at the geodesic term.

    For the fully randomized bunkbed, the lowest nonzero coefficient of
    the (u bottom, v bottom) connection polynomial must sit at degree
    d(u bottom, v bottom) and equal the number of geodesics.  A
    disconnected pair must come back as INFINITY with the zero
    polynomial, which makes the verdict vacuously true.
    """
    g.require_vertex(u)
    g.require_vertex(v)
    bb = bunkbed(g)
    distance, count = _bfs_geodesics(bb, bunkbed_vertex(u, 0), bunkbed_vertex(v, 0))
    poly = connection_polynomial(
        g, bunkbed_vertex(u, 0), bunkbed_vertex(v, 0), None, caps=caps, workers=workers
    )
    if distance == INFINITY:
        verdict = poly.is_zero()
    else:
        lowest = next((k for k, c in enumerate(poly.coeffs) if c != 0), None)
        verdict = lowest == distance and poly.coeff(distance) == count
    return GeodesicCheck(distance, count, poly, verdict)
