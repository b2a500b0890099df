"""Seeded Monte Carlo estimates for bunkbed connection probabilities.

Randomness comes from numpy's Philox counter-based generator.  Samples
are split into fixed-size shards; shard b draws from the stream keyed by
(seed, b), so results depend only on (seed, sample count) and are
byte-identical for every worker count.  An edge is open iff its raw
64-bit draw falls below ceil(p * 2^64), the exact integer threshold of
the rational p, so no double rounding is involved.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from .graphs import Multigraph, Vertex
from .polynomials import format_fraction

GENERATOR = "philox4x64-raw"
SHARD_SAMPLES = 1 << 14


@dataclass(frozen=True)
class Estimate:
    """Sample mean with its standard error, sample count, and seed."""

    mean: float
    stderr: float
    samples: int
    seed: int


@dataclass(frozen=True)
class DifferenceEstimates:
    """Paired estimates: same-level, cross-level, and their difference."""

    same_level: Estimate
    cross_level: Estimate
    difference: Estimate


def _threshold(p: Fraction) -> int:
    """Smallest integer T with: raw < T iff raw * den < num * 2^64."""
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    num, den = p.numerator, p.denominator
    return -((-num << 64) // den)


def _sampling_plan(g: Multigraph, pinned: Optional[Iterable[Vertex]]):
    """Index pairs for the randomized edges and the always-open posts."""
    index = {}
    for i, v in enumerate(g.vertices):
        index[(v, 0)] = 2 * i
        index[(v, 1)] = 2 * i + 1
    random_pairs = []
    random_ids = []
    for eid, a, b in g.edges:
        for level in (0, 1):
            random_pairs.append((index[(a, level)], index[(b, level)]))
            random_ids.append(("h", eid, level))
    base_pairs = []
    if pinned is None:
        for v in g.vertices:
            random_pairs.append((index[(v, 0)], index[(v, 1)]))
            random_ids.append(("v", v))
    else:
        pinned = set(pinned)
        for v in pinned:
            g.require_vertex(v)
        for v in g.vertices:
            if v in pinned:
                base_pairs.append((index[(v, 0)], index[(v, 1)]))
    return index, random_pairs, random_ids, base_pairs


def _shard_bits(seed: int, shard: int, count: int, columns: int, threshold: int):
    key = np.array([seed % (1 << 64), shard], dtype=np.uint64)
    raws = np.random.Philox(key=key).random_raw(count * columns)
    if threshold >= 1 << 64:
        open_bits = np.ones(count * columns, dtype=bool)
    elif threshold <= 0:
        open_bits = np.zeros(count * columns, dtype=bool)
    else:
        open_bits = raws < np.uint64(threshold)
    return open_bits.reshape(count, columns)


def sample_bunkbed(
    g: Multigraph,
    p: Fraction,
    seed: int,
    pinned: Optional[Iterable[Vertex]] = None,
) -> frozenset:
    """One sampled configuration: the set of open bunkbed edge ids.

    Pinned verticals are included as open; with pinned=None the vertical
    edges are sampled like the horizontal ones.
    """
    _, random_pairs, random_ids, _ = _sampling_plan(g, pinned)
    bits = _shard_bits(seed, 0, 1, max(1, len(random_pairs)), _threshold(p))[0]
    open_ids = {eid for eid, bit in zip(random_ids, bits) if bit}
    if pinned is not None:
        open_ids |= {("v", v) for v in pinned}
    return frozenset(open_ids)


def _estimate(total: int, total_sq: int, samples: int, seed: int) -> Estimate:
    mean = total / samples
    if samples > 1:
        variance = (total_sq - samples * mean * mean) / (samples - 1)
        variance = max(variance, 0.0)
    else:
        variance = 0.0
    return Estimate(
        mean=mean,
        stderr=math.sqrt(variance / samples),
        samples=samples,
        seed=seed,
    )


def estimate_difference(
    g: Multigraph,
    u: Vertex,
    v: Vertex,
    p: Fraction,
    samples: int,
    seed: int,
    pinned: Optional[Iterable[Vertex]] = None,
    *,
    workers: int = 1,
) -> DifferenceEstimates:
    """Paired estimates of the two endpoint connections and their difference.

    Both indicators are evaluated on the same sampled configuration, so
    the difference estimate inherits their positive correlation.
    """
    g.require_vertex(u)
    g.require_vertex(v)
    if samples < 1:
        raise ValueError("need at least one sample")
    index, random_pairs, _, base_pairs = _sampling_plan(g, pinned)
    threshold = _threshold(p)
    columns = len(random_pairs)
    num_vertices = 2 * g.vertex_count
    u0 = index[(u, 0)]
    v0 = index[(v, 0)]
    v1 = index[(v, 1)]
    base_parent = list(range(num_vertices))
    for a, b in base_pairs:
        base_parent[b] = base_parent[a]

    shards = range((samples + SHARD_SAMPLES - 1) // SHARD_SAMPLES)

    def run_shard(shard: int) -> tuple[int, int, int, int]:
        start = shard * SHARD_SAMPLES
        count = min(SHARD_SAMPLES, samples - start)
        bits = _shard_bits(seed, shard, count, max(1, columns), threshold)
        same = cross = diff = diff_sq = 0
        pairs = random_pairs
        for row in bits:
            parent = list(base_parent)
            for j in np.flatnonzero(row[:columns]):
                a, b = pairs[j]
                while parent[a] != a:
                    a = parent[a]
                while parent[b] != b:
                    b = parent[b]
                if a != b:
                    parent[b] = a
            x = u0
            while parent[x] != x:
                x = parent[x]
            y = v0
            while parent[y] != y:
                y = parent[y]
            z = v1
            while parent[z] != z:
                z = parent[z]
            s = int(x == y)
            c = int(x == z)
            same += s
            cross += c
            d = s - c
            diff += d
            diff_sq += d * d
        return same, cross, diff, diff_sq

    totals = [0, 0, 0, 0]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_shard, shards))
    else:
        parts = [run_shard(b) for b in shards]
    for part in parts:
        for i, value in enumerate(part):
            totals[i] += value

    same, cross, diff, diff_sq = totals
    return DifferenceEstimates(
        same_level=_estimate(same, same, samples, seed),
        cross_level=_estimate(cross, cross, samples, seed),
        difference=_estimate(diff, diff_sq, samples, seed),
    )


def agreement_check(estimate: Estimate, exact: Fraction, k: float) -> bool:
    """|mean - exact| <= k * stderr; a zero stderr demands exact equality."""
    exact = Fraction(exact)
    if estimate.stderr == 0:
        return Fraction(estimate.mean) == exact
    return abs(Fraction(estimate.mean) - exact) <= Fraction(k) * Fraction(estimate.stderr)


def estimate_to_json_obj(estimate: Estimate) -> dict:
    return {
        "mean": estimate.mean,
        "stderr": estimate.stderr,
        "samples": estimate.samples,
        "seed": estimate.seed,
        "generator": GENERATOR,
    }
