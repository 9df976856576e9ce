"""Shared instance builders for the test suite."""

from __future__ import annotations

import itertools
import random

from simulcut import Assignment, GraphFamily, HypergraphFamily, UNDECIDED


def all_pairs(n):
    return [(u, v) for u in range(n) for v in range(u + 1, n)]


def random_edges(n, m, rng):
    return tuple(sorted(rng.sample(all_pairs(n), m)))


def random_family(n, ms, seed) -> GraphFamily:
    rng = random.Random(seed)
    return GraphFamily(n=n, graphs=tuple(random_edges(n, m, rng) for m in ms))


def random_hyperfamily(n, r, ms, seed) -> HypergraphFamily:
    rng = random.Random(seed)
    subsets = list(itertools.combinations(range(n), r))
    return HypergraphFamily(
        n=n, r=r, hypergraphs=tuple(tuple(sorted(rng.sample(subsets, m))) for m in ms))


def random_partial(n, k, seed, p_undecided=0.4) -> Assignment:
    rng = random.Random(seed)
    labels = tuple(UNDECIDED if rng.random() < p_undecided else rng.randrange(k)
                   for _ in range(n))
    return Assignment(labels, k)


def cycle_edges(n):
    return tuple(sorted((i, (i + 1) % n) if i < (i + 1) % n else ((i + 1) % n, i)
                        for i in range(n)))


def c5_pair() -> GraphFamily:
    """Two edge-disjoint 5-cycles whose union is the complete graph on 5."""
    step1 = cycle_edges(5)
    step2 = tuple(sorted((min(i, (i + 2) % 5), max(i, (i + 2) % 5)) for i in range(5)))
    return GraphFamily(n=5, graphs=(step1, step2))


def triangle() -> GraphFamily:
    return GraphFamily(n=3, graphs=(((0, 1), (1, 2), (0, 2)),))
