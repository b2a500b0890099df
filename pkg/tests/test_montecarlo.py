"""Seeded sampling: determinism, worker invariance, exact agreement."""

from __future__ import annotations

import math
from fractions import Fraction

import pytest

from bunkbed import (
    Estimate,
    agreement_check,
    bunkbed_vertex,
    difference_polynomial,
    endpoint_polynomials,
    estimate_difference,
    estimate_to_json_obj,
    horizontal_edge_id,
    parse_edge_list,
    sample_bunkbed,
    vertical_edge_id,
)


class TestSampleConfigurations:
    def test_p_zero_opens_nothing(self, k2):
        assert sample_bunkbed(k2, Fraction(0), 1, None) == frozenset()

    def test_p_one_opens_everything(self, k2):
        got = sample_bunkbed(k2, Fraction(1), 1, None)
        assert got == frozenset(
            {
                horizontal_edge_id(0, 0),
                horizontal_edge_id(0, 1),
                vertical_edge_id("u"),
                vertical_edge_id("v"),
            }
        )

    def test_pinned_posts_forced(self, k2):
        got = sample_bunkbed(k2, Fraction(1), 1, frozenset({"u"}))
        assert vertical_edge_id("u") in got
        assert vertical_edge_id("v") not in got

    def test_same_seed_same_sample(self, k2):
        a = sample_bunkbed(k2, Fraction(1, 2), 123, None)
        b = sample_bunkbed(k2, Fraction(1, 2), 123, None)
        assert a == b


class TestDeterminism:
    def test_same_seed_reproduces(self, k2):
        a = estimate_difference(k2, "u", "v", Fraction(1, 2), 50_000, 9, None)
        b = estimate_difference(k2, "u", "v", Fraction(1, 2), 50_000, 9, None)
        assert a == b

    def test_worker_count_is_invisible(self, k2):
        # 50000 samples span three full shards plus a partial one.
        reference = estimate_difference(k2, "u", "v", Fraction(1, 2), 50_000, 9, None)
        for workers in (2, 3, 8):
            got = estimate_difference(
                k2, "u", "v", Fraction(1, 2), 50_000, 9, None, workers=workers
            )
            assert got == reference

    def test_different_seeds_differ(self, k2):
        a = estimate_difference(k2, "u", "v", Fraction(1, 2), 50_000, 9, None)
        b = estimate_difference(k2, "u", "v", Fraction(1, 2), 50_000, 10, None)
        assert a.difference.mean != b.difference.mean


class TestAgreement:
    def test_k2_unconditioned(self, k2):
        est = estimate_difference(k2, "u", "v", Fraction(1, 2), 100_000, 7, None)
        exact = difference_polynomial(k2, "u", "v", None).evaluate(Fraction(1, 2))
        assert agreement_check(est.difference, exact, 4)

    def test_k2_pinned(self, k2):
        est = estimate_difference(
            k2, "u", "v", Fraction(3, 4), 100_000, 7, frozenset({"u", "v"})
        )
        same, cross = endpoint_polynomials(k2, "u", "v", frozenset({"u", "v"}))
        p = Fraction(3, 4)
        assert agreement_check(est.same_level, same.evaluate(p), 4)
        assert agreement_check(est.cross_level, cross.evaluate(p), 4)
        assert agreement_check(est.difference, 0, 4)

    def test_zero_stderr_requires_exact_equality(self):
        flat = Estimate(mean=1.0, stderr=0.0, samples=100, seed=1)
        assert agreement_check(flat, Fraction(1), 4) is True
        assert agreement_check(flat, Fraction(1, 2), 4) is False

    def test_window_scales_with_k(self):
        est = Estimate(mean=0.5, stderr=0.01, samples=100, seed=1)
        assert agreement_check(est, Fraction(52, 100), 4) is True
        assert agreement_check(est, Fraction(52, 100), 1) is False

    def test_boundary_is_inclusive(self):
        est = Estimate(mean=0.5, stderr=0.125, samples=100, seed=1)
        assert agreement_check(est, Fraction(1), 4) is True
        assert agreement_check(est, Fraction(1000001, 1000000), 4) is False


class TestEstimates:
    def test_same_vertex_is_certain(self, k2):
        est = estimate_difference(
            k2, "u", "u", Fraction(1, 3), 4096, 3, frozenset({"u"})
        )
        assert est.same_level.mean == 1.0
        assert est.same_level.stderr == 0.0

    def test_pairing_does_not_hurt_precision(self, k2):
        est = estimate_difference(k2, "u", "v", Fraction(1, 2), 100_000, 7, None)
        unpaired = math.hypot(est.same_level.stderr, est.cross_level.stderr)
        assert est.difference.stderr <= unpaired

    def test_sample_and_seed_recorded(self, k2):
        est = estimate_difference(k2, "u", "v", Fraction(1, 2), 12345, 42, None)
        for leg in (est.same_level, est.cross_level, est.difference):
            assert leg.samples == 12345
            assert leg.seed == 42

    def test_json_obj_names_generator(self, k2):
        est = estimate_difference(k2, "u", "v", Fraction(1, 2), 1000, 1, None)
        obj = estimate_to_json_obj(est.difference)
        assert obj["generator"] == "philox4x64-raw"
        assert obj["samples"] == 1000
