"""Core instance types, counting operations, and threshold formulas."""

import math
import random

import pytest
from hypothesis import given, strategies as st

from simulcut import (
    Assignment,
    EpsilonRangeError,
    GraphFamily,
    HypergraphFamily,
    InstanceError,
    PartialAssignmentError,
    UNDECIDED,
    crossing_count,
    edwards_bound,
    epsilon_cap,
    partition_counts,
    rainbow_count,
    threshold_for,
)

from helpers import all_pairs, c5_pair, cycle_edges, random_family, random_hyperfamily


class TestInstanceValidation:
    def test_self_loop_rejected(self):
        with pytest.raises(InstanceError, match="self-loop"):
            GraphFamily(n=4, graphs=(((3, 3),),))

    def test_duplicate_edge_rejected(self):
        with pytest.raises(InstanceError, match="duplicate"):
            GraphFamily(n=4, graphs=(((0, 1), (1, 0)),))

    def test_out_of_range_endpoint_rejected(self):
        with pytest.raises(InstanceError, match="out of range"):
            GraphFamily(n=3, graphs=(((0, 3),),))

    def test_empty_family_rejected(self):
        with pytest.raises(InstanceError):
            GraphFamily(n=3, graphs=())

    def test_graphs_may_share_edges(self):
        fam = GraphFamily(n=3, graphs=(((0, 1),), ((0, 1), (1, 2))))
        assert fam.m == (1, 2)

    def test_isolated_vertices_allowed(self):
        fam = GraphFamily(n=10, graphs=(((0, 1),),))
        assert fam.degrees[0][9] == 0

    def test_derived_stats(self):
        fam = c5_pair()
        assert fam.ell == 2
        assert fam.m == (5, 5)
        assert fam.max_degree == (2, 2)
        # union of the two cycles is complete on 5 vertices
        union = set(fam.graphs[0]) | set(fam.graphs[1])
        assert union == set(all_pairs(5))
        assert not set(fam.graphs[0]) & set(fam.graphs[1])

    def test_hypergraph_uniformity_enforced(self):
        with pytest.raises(InstanceError, match="distinct"):
            HypergraphFamily(n=5, r=3, hypergraphs=(((0, 1, 1),),))

    def test_hypergraph_delta2(self):
        hf = HypergraphFamily(n=5, r=3, hypergraphs=(((0, 1, 2), (0, 1, 3), (2, 3, 4)),))
        assert hf.delta2 == (2,)
        assert hf.pair_count(0, 0, 1) == 2
        assert hf.pair_count(0, 2, 4) == 1

    def test_degree_bounded_by_m(self):
        for seed in range(5):
            fam = random_family(8, [random.Random(seed).randint(0, 20)], seed)
            assert all(d <= m for d, m in zip(fam.max_degree, fam.m))
        hf = random_hyperfamily(8, 3, [10], 3)
        assert all(d <= m for d, m in zip(hf.delta2, hf.m))


class TestAssignment:
    def test_total_and_partial(self):
        a = Assignment((0, 1, UNDECIDED), 2)
        assert not a.is_total
        assert a.undecided_vertices() == (2,)
        b = a.with_label(2, 1)
        assert b.is_total
        assert b.class_sizes() == (1, 2)

    def test_label_range_checked(self):
        with pytest.raises(ValueError):
            Assignment((0, 2), 2)
        with pytest.raises(ValueError):
            Assignment((0,), 1)


class TestCounting:
    def test_crossing_c5(self):
        edges = cycle_edges(5)
        a = Assignment.from_side(5, {0, 2})
        assert crossing_count(edges, a) == 4

    def test_crossing_path(self):
        edges = ((0, 1), (1, 2))
        a = Assignment.from_side(3, {1})
        assert crossing_count(edges, a) == 2

    def test_crossing_single_class(self):
        edges = cycle_edges(6)
        a = Assignment((0,) * 6, 2)
        assert crossing_count(edges, a) == 0

    def test_crossing_requires_total(self):
        with pytest.raises(PartialAssignmentError):
            crossing_count(((0, 1),), Assignment((0, UNDECIDED), 2))

    def test_crossing_requires_k2(self):
        with pytest.raises(ValueError):
            crossing_count(((0, 1),), Assignment((0, 1), 3))

    def test_crossing_label_swap_invariant(self):
        rng = random.Random(5)
        for _ in range(25):
            n = rng.randint(2, 9)
            m = rng.randint(0, n * (n - 1) // 2)
            edges = tuple(rng.sample(all_pairs(n), m))
            labels = tuple(rng.randrange(2) for _ in range(n))
            a = Assignment(labels, 2)
            b = Assignment(tuple(1 - x for x in labels), 2)
            assert crossing_count(edges, a) == crossing_count(edges, b)

    def test_partition_counts_triangle_rainbowish(self):
        edges = ((0, 1), (1, 2), (0, 2))
        a = Assignment((0, 1, 2), 3)
        pairs, within, crossing = partition_counts(edges, a)
        assert all(v == 1 for v in pairs.values())
        assert within == (0, 0, 0)
        assert crossing == 3

    def test_partition_counts_all_in_one_class(self):
        edges = ((0, 1), (1, 2), (0, 2))
        a = Assignment((0, 0, 0), 3)
        pairs, within, crossing = partition_counts(edges, a)
        assert within[0] == 3 and crossing == 0
        assert all(v == 0 for v in pairs.values())

    def test_partition_counts_sum_to_m(self):
        # independent oracle: classify each edge by its endpoint labels
        rng = random.Random(11)
        for _ in range(30):
            n = rng.randint(2, 10)
            m = rng.randint(0, n * (n - 1) // 2)
            edges = tuple(rng.sample(all_pairs(n), m))
            k = rng.randint(2, 5)
            a = Assignment(tuple(rng.randrange(k) for _ in range(n)), k)
            pairs, within, crossing = partition_counts(edges, a)
            assert sum(pairs.values()) + sum(within) == m
            assert crossing == m - sum(within)
            expect_cross = sum(1 for u, v in edges if a.labels[u] != a.labels[v])
            assert crossing == expect_cross

    def test_rainbow_single_edge(self):
        edges = ((0, 1, 2),)
        assert rainbow_count(edges, Assignment((0, 1, 2), 3), 3) == 1
        assert rainbow_count(edges, Assignment((0, 0, 0), 3), 3) == 0

    def test_rainbow_requires_k_equal_r(self):
        with pytest.raises(ValueError, match="k == r"):
            rainbow_count(((0, 1, 2),), Assignment((0, 1, 0), 2), 3)

    def test_rainbow_complementary_count(self):
        rng = random.Random(23)
        for _ in range(20):
            hf = random_hyperfamily(8, 3, [rng.randint(0, 25)], rng.randrange(10 ** 6))
            edges = hf.hypergraphs[0]
            a = Assignment(tuple(rng.randrange(3) for _ in range(8)), 3)
            missing = sum(1 for e in edges if len({a.labels[x] for x in e}) < 3)
            assert rainbow_count(edges, a, 3) == len(edges) - missing


class TestEdwardsBound:
    def test_anchor_values(self):
        assert edwards_bound(1) == pytest.approx(0.75, abs=1e-15)
        assert edwards_bound(3) == pytest.approx(2.0, abs=1e-15)
        assert edwards_bound(10) == pytest.approx(6.0, abs=1e-15)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            edwards_bound(-1)

    @given(st.integers(min_value=1, max_value=10 ** 9))
    def test_at_least_half(self, m):
        assert edwards_bound(m) >= m / 2

    @given(st.integers(min_value=0, max_value=10 ** 6))
    def test_monotone(self, m):
        assert edwards_bound(m + 1) >= edwards_bound(m)


class TestThresholds:
    def test_thm1_value(self):
        assert threshold_for("thm1", m=50, ell=2) == pytest.approx(25 - math.sqrt(50), abs=1e-12)

    def test_thm2_value(self):
        assert threshold_for("thm2", m=90, ell=1, k=3) == pytest.approx(
            60 - math.sqrt(180), abs=1e-12)

    def test_thm3_pair_value(self):
        # eps = 1/144 -> eps^(1/4) = 1/sqrt(12)
        got = threshold_for("thm3_pair", m=1000, ell=1, k=2, eps=1 / 144)
        assert got == pytest.approx(500 - 1000 / math.sqrt(12), abs=1e-9)

    def test_thm3_within_value(self):
        got = threshold_for("thm3_within", m=1000, ell=1, k=2, eps=1 / 144)
        assert got == pytest.approx(250 - 1000 / math.sqrt(12), abs=1e-9)

    def test_thm3_epsilon_gate_names_bound(self):
        with pytest.raises(EpsilonRangeError, match=r"1/\(9\*ell\^2\*k\^4\)"):
            threshold_for("thm3_pair", m=10, ell=2, k=3, eps=0.5)
        cap = epsilon_cap(2, 3)
        with pytest.raises(EpsilonRangeError):
            threshold_for("thm3_pair", m=10, ell=2, k=3, eps=float(cap) * 1.01)

    def test_hyp_value(self):
        got = threshold_for("hyp", m=40, ell=2, r=3, delta2=1)
        want = 6 * 40 / 27 - math.sqrt(2 * 2 * (1 + 6) * 40)
        assert got == pytest.approx(want, abs=1e-12)

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown threshold kind"):
            threshold_for("thm9", m=10)

    @given(st.integers(min_value=0, max_value=10 ** 6), st.integers(min_value=1, max_value=50))
    def test_thm1_at_least_thm2_at_k2(self, m, ell):
        assert (threshold_for("thm1", m=m, ell=ell)
                >= threshold_for("thm2", m=m, ell=ell, k=2) - 1e-12)
