"""Exact connection polynomials against a brute-force subset oracle."""

from __future__ import annotations

import itertools
from fractions import Fraction

import pytest

from bunkbed import (
    CapExceededError,
    Caps,
    INFINITY,
    Multigraph,
    RationalPoly,
    VAR_P,
    bunkbed,
    bunkbed_vertex,
    connected_avoiding,
    connection_polynomial,
    connection_query_polynomials,
    difference_polynomial,
    endpoint_polynomials,
    geodesic_check,
    parse_edge_list,
    threshold_point,
)

from conftest import family_graphs


def brute_connection_poly(g, a, b, pinned):
    """Direct 2^k enumeration with per-subset breadth-first search.

    Shares no traversal or counting code with the library kernel: every
    subset of the random edges is materialized and searched on its own.
    """
    bb = bunkbed(g)
    if pinned is None:
        random_ids = [e[0] for e in bb.edges]
        base_open = set()
    else:
        random_ids = [e[0] for e in bb.edges if e[0][0] == "h"]
        base_open = {e[0] for e in bb.edges if e[0][0] == "v" and e[1][0] in pinned}
    k = len(random_ids)
    counts = [0] * (k + 1)
    for mask in range(1 << k):
        open_ids = base_open | {
            random_ids[i] for i in range(k) if mask >> i & 1
        }
        adj = {v: [] for v in bb.vertices}
        for eid, x, y in bb.edges:
            if eid in open_ids:
                adj[x].append(y)
                adj[y].append(x)
        seen = {a}
        stack = [a]
        while stack:
            cur = stack.pop()
            for nxt in adj[cur]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        if b in seen:
            counts[bin(mask).count("1")] += 1
    p = RationalPoly.variable(VAR_P)
    one = RationalPoly.one(VAR_P)
    total = RationalPoly.zero(VAR_P)
    for j, c in enumerate(counts):
        if c:
            total = total + (p ** j) * ((one - p) ** (k - j)) * Fraction(c)
    return total


poly = lambda coeffs: RationalPoly(coeffs, VAR_P)


class TestFrozenValues:
    def test_k2_unconditioned(self, k2):
        same, cross = endpoint_polynomials(k2, "u", "v", None)
        assert same == poly([0, 1, 0, 1, -1])
        assert cross == poly([0, 0, 2, 0, -1])
        assert same - cross == poly([0, 1, -2, 1])

    def test_k2_no_posts(self, k2):
        same, cross = endpoint_polynomials(k2, "u", "v", frozenset())
        assert same == poly([0, 1])
        assert cross.is_zero

    def test_k2_one_post(self, k2):
        same, cross = endpoint_polynomials(k2, "u", "v", frozenset({"u"}))
        assert same == cross == poly([0, 1])

    def test_k2_both_posts(self, k2):
        same, cross = endpoint_polynomials(k2, "u", "v", frozenset({"u", "v"}))
        assert same == cross == poly([0, 2, -1])

    def test_single_vertex_post(self):
        g = Multigraph(vertices=("u",), edges=())
        got = connection_polynomial(
            g, bunkbed_vertex("u", 0), bunkbed_vertex("u", 1), None
        )
        assert got == poly([0, 1])


class TestOracleAgreement:
    CASES = [
        ("u v", None),
        ("u v", frozenset()),
        ("u v", frozenset({"v"})),
        ("a b\nb c", None),
        ("a b\nb c", frozenset({"b"})),
        ("a b\nb c", frozenset({"a", "b", "c"})),
        ("u v\nu v", None),
        ("a a\na b", None),
        ("u v\nv w\nw u", frozenset({"w"})),
    ]

    @pytest.mark.parametrize("text,pinned", CASES)
    def test_endpoint_polynomials_match_brute_force(self, text, pinned):
        g = parse_edge_list(text)
        first, last = g.vertices[0], g.vertices[-1]
        same, cross = endpoint_polynomials(g, first, last, pinned)
        b0 = bunkbed_vertex(first, 0)
        assert same == brute_connection_poly(
            g, b0, bunkbed_vertex(last, 0), pinned
        )
        assert cross == brute_connection_poly(
            g, b0, bunkbed_vertex(last, 1), pinned
        )

    def test_difference_polynomial_is_the_difference(self, k2):
        same, cross = endpoint_polynomials(k2, "u", "v", None)
        assert difference_polynomial(k2, "u", "v", None) == same - cross


class TestInvariances:
    def test_pair_symmetry(self, family):
        for g in family.values():
            x, y = g.vertices[0], g.vertices[-1]
            assert difference_polynomial(g, x, y, None) == (
                difference_polynomial(g, y, x, None)
            )

    def test_level_swap_when_pinned(self, family):
        for name in ("path2", "triangle", "double_edge"):
            g = family[name]
            x, y = g.vertices[0], g.vertices[-1]
            for t in (frozenset(), frozenset({x}), frozenset(g.vertices)):
                top, bottom = connection_query_polynomials(
                    g,
                    [
                        ((bunkbed_vertex(x, 1), bunkbed_vertex(y, 1)),),
                        ((bunkbed_vertex(x, 0), bunkbed_vertex(y, 0)),),
                    ],
                    pinned=t,
                )
                assert top == bottom

    def test_probability_at_endpoints(self, family):
        for g in family.values():
            x, y = g.vertices[0], g.vertices[-1]
            same, cross = endpoint_polynomials(g, x, y, None)
            assert same.evaluate(Fraction(1)) == 1
            assert cross.evaluate(Fraction(1)) == 1
            assert same.evaluate(Fraction(0)) == 0

    def test_values_are_probabilities_on_grid(self, family):
        for name in ("k2", "path3", "paw", "triangle_doubled"):
            g = family[name]
            x, y = g.vertices[0], g.vertices[-1]
            same, cross = endpoint_polynomials(g, x, y, None)
            for k in range(9):
                p = Fraction(k, 8)
                for val in (same.evaluate(p), cross.evaluate(p)):
                    assert 0 <= val <= 1
                assert same.evaluate(p) >= cross.evaluate(p)

    def test_strategy_and_worker_agreement(self, family):
        for name in ("path3", "cycle4"):
            g = family[name]
            x, y = g.vertices[0], g.vertices[-1]
            reference = endpoint_polynomials(g, x, y, None)
            for strategy in ("shared", "scratch"):
                for workers in (1, 2, 8):
                    got = endpoint_polynomials(
                        g, x, y, None, workers=workers, strategy=strategy
                    )
                    assert got == reference


class TestBunkbedShape:
    def test_doubling(self):
        g = parse_edge_list("a b\nb c")
        bb = bunkbed(g)
        assert bb.vertex_count == 6
        assert bb.edge_count == 2 * 2 + 3

    def test_self_loop(self):
        g = parse_edge_list("a a")
        bb = bunkbed(g)
        assert bb.vertex_count == 2
        assert bb.edge_count == 3


class TestThresholdPoint:
    def test_values(self):
        assert threshold_point(1) == Fraction(7, 8)
        assert threshold_point(2) == Fraction(7, 8)
        assert threshold_point(3) == Fraction(15, 16)
        assert threshold_point(4) == Fraction(15, 16)
        assert threshold_point(8) == 1 - Fraction(1, 2 ** 6)

    def test_dominates_fractional_exponent(self):
        for m in range(1, 12):
            assert threshold_point(m) >= 1 - Fraction(1, 2) ** Fraction(m + 4, 2)


class TestConnectedAvoiding:
    def test_matches_distance(self, family):
        for g in family.values():
            vs = g.vertices
            for x, y in itertools.combinations(vs, 2):
                assert connected_avoiding(g, x, y, frozenset()) is True
            assert connected_avoiding(g, vs[0], vs[0], frozenset({vs[0]})) is False


class TestGeodesic:
    def test_k2(self, k2):
        r = geodesic_check(k2, "u", "v")
        assert (r.distance, r.geodesic_count, r.verdict) == (1, 1, True)

    def test_path2(self):
        g = parse_edge_list("a b\nb c")
        r = geodesic_check(g, "a", "c")
        assert (r.distance, r.geodesic_count, r.verdict) == (2, 1, True)

    def test_cycle4_has_two_geodesics(self):
        g = parse_edge_list("a b\nb c\nc d\nd a")
        r = geodesic_check(g, "a", "c")
        assert (r.distance, r.geodesic_count, r.verdict) == (2, 2, True)

    def test_parallel_edges_multiply(self):
        g = parse_edge_list("a b\na b\nb c")
        r = geodesic_check(g, "a", "c")
        assert (r.distance, r.geodesic_count, r.verdict) == (2, 2, True)

    def test_same_vertex(self, k2):
        r = geodesic_check(k2, "u", "u")
        assert (r.distance, r.geodesic_count, r.verdict) == (0, 1, True)

    def test_disconnected_pair_is_vacuous(self):
        g = Multigraph(
            vertices=("a", "b", "c"), edges=((0, "a", "b"),)
        )
        r = geodesic_check(g, "a", "c")
        assert r.distance == INFINITY
        assert r.geodesic_count == 0
        assert r.polynomial.is_zero
        assert r.verdict is True


class TestCaps:
    def test_cap_exceeded_reports_requirement(self, family):
        tight = Caps(max_config_bits=4)
        with pytest.raises(CapExceededError) as err:
            endpoint_polynomials(family["path4"], "a", "e", None, caps=tight)
        assert "max_config_bits" in str(err.value)

    def test_cap_boundary_allows_exact_fit(self, k2):
        # Unconditioned K2 needs exactly 4 random edges.
        caps = Caps(max_config_bits=4)
        same, _ = endpoint_polynomials(k2, "u", "v", None, caps=caps)
        assert same == poly([0, 1, 0, 1, -1])
