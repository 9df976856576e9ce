"""Instance text format round-trips and seeded generators."""

import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from simulcut import GraphFamily, HypergraphFamily
from simulcut.instances import (
    InstanceFormatError,
    generate,
    parse_instance,
    serialize_instance,
)

from helpers import all_pairs, random_family, random_hyperfamily

C5_PAIR_TEXT = """\
# the five-vertex pair of edge-disjoint cycles
graphs 2 vertices 5
edges 5
0 1
1 2
2 3
3 4
0 4
edges 5
0 2
2 4
1 4
1 3
0 3
"""


class TestParse:
    def test_c5_pair_header(self):
        fam = parse_instance(C5_PAIR_TEXT)
        assert isinstance(fam, GraphFamily)
        assert fam.ell == 2 and fam.n == 5
        assert fam.m == (5, 5)

    def test_empty_graph(self):
        fam = parse_instance("graphs 1 vertices 4\nedges 0\n")
        assert fam.m == (0,)

    def test_hypergraph(self):
        text = "hypergraphs 1 vertices 6 uniformity 3\nedges 2\n0 1 2\n3 4 5\n"
        hf = parse_instance(text)
        assert isinstance(hf, HypergraphFamily)
        assert hf.r == 3 and hf.m == (2,)

    def test_comments_and_blanks_ignored(self):
        text = "# c\n\ngraphs 1 vertices 3\n# c\nedges 1\n\n0 1\n# trailing comment\n"
        assert parse_instance(text).m == (1,)

    def test_self_loop_diagnostic(self):
        text = "graphs 1 vertices 5\nedges 1\n3 3\n"
        with pytest.raises(InstanceFormatError, match=r"line 3: .*self-loop"):
            parse_instance(text)

    def test_duplicate_edge_diagnostic(self):
        text = "graphs 1 vertices 5\nedges 2\n0 1\n1 0\n"
        with pytest.raises(InstanceFormatError, match=r"line 4: .*duplicate"):
            parse_instance(text)

    def test_out_of_range_diagnostic(self):
        text = "graphs 1 vertices 3\nedges 1\n0 3\n"
        with pytest.raises(InstanceFormatError, match=r"line 3: .*out of range"):
            parse_instance(text)

    def test_count_mismatch_short_block(self):
        text = "graphs 2 vertices 5\nedges 2\n0 1\nedges 1\n0 2\n"
        with pytest.raises(InstanceFormatError, match="declared 2 edges"):
            parse_instance(text)

    def test_count_mismatch_eof(self):
        text = "graphs 1 vertices 5\nedges 3\n0 1\n"
        with pytest.raises(InstanceFormatError, match="file ended"):
            parse_instance(text)

    def test_trailing_content(self):
        text = "graphs 1 vertices 3\nedges 1\n0 1\n1 2\n"
        with pytest.raises(InstanceFormatError, match="trailing"):
            parse_instance(text)

    def test_bad_header(self):
        with pytest.raises(InstanceFormatError, match="header"):
            parse_instance("widgets 1 vertices 3\n")
        with pytest.raises(InstanceFormatError, match="empty"):
            parse_instance("# nothing here\n")

    def test_wrong_arity_line(self):
        text = "hypergraphs 1 vertices 6 uniformity 3\nedges 1\n0 1\n"
        with pytest.raises(InstanceFormatError, match="expected 3"):
            parse_instance(text)


class TestRoundTrip:
    def test_graph_family(self):
        rng = random.Random(1)
        for trial in range(15):
            n = rng.randint(0, 12)
            ell = rng.randint(1, 3)
            cap = n * (n - 1) // 2
            fam = random_family(n, [rng.randint(0, cap) for _ in range(ell)], trial)
            assert parse_instance(serialize_instance(fam)) == fam

    def test_hypergraph_family(self):
        rng = random.Random(2)
        for trial in range(10):
            n = rng.randint(4, 10)
            r = rng.choice([2, 3, 4])
            cap = min(12, math.comb(n, r))
            hf = random_hyperfamily(n, r, [rng.randint(0, cap)], trial)
            assert parse_instance(serialize_instance(hf)) == hf

    def test_lf_terminated(self):
        fam = random_family(4, [2], 0)
        text = serialize_instance(fam)
        assert text.endswith("\n") and "\r" not in text


class TestGenerators:
    def test_disjoint_cycles_is_k5(self):
        fam = generate("disjoint-cycles", n=5)
        assert fam.ell == 2 and fam.m == (5, 5)
        union = set(fam.graphs[0]) | set(fam.graphs[1])
        assert union == set(all_pairs(5))
        assert not set(fam.graphs[0]) & set(fam.graphs[1])

    def test_disjoint_cycles_larger_odd(self):
        fam = generate("disjoint-cycles", n=9)
        assert fam.m == (9, 9)
        assert not set(fam.graphs[0]) & set(fam.graphs[1])
        assert fam.max_degree == (2, 2)

    def test_disjoint_cycles_rejects_even(self):
        with pytest.raises(ValueError, match="odd"):
            generate("disjoint-cycles", n=6)

    def test_star(self):
        fam = generate("star", n=11)
        assert fam.m == (10,)
        assert fam.max_degree == (10,)

    def test_gnm_deterministic(self):
        a = serialize_instance(generate("gnm", n=20, m=50, ell=2, seed=7))
        b = serialize_instance(generate("gnm", n=20, m=50, ell=2, seed=7))
        assert a == b
        c = serialize_instance(generate("gnm", n=20, m=50, ell=2, seed=8))
        assert a != c

    def test_gnm_edge_count_and_validity(self):
        fam = generate("gnm", n=10, m=30, ell=3, seed=1)
        assert fam.m == (30, 30, 30)

    def test_gnm_over_dense_rejected(self):
        with pytest.raises(ValueError, match=r"n\(n-1\)/2"):
            generate("gnm", n=5, m=11)

    def test_bounded_degree(self):
        fam = generate("bounded-degree", n=50, degree=4, ell=2, seed=3)
        assert fam.m == (100, 100)
        assert fam.max_degree == (4, 4)
        assert all(d == 4 for deg in fam.degrees for d in deg)

    def test_bounded_degree_needs_even(self):
        with pytest.raises(ValueError, match="even"):
            generate("bounded-degree", n=20, degree=3)

    def test_runiform(self):
        hf = generate("runiform", n=12, m=20, r=3, ell=2, seed=4)
        assert hf.m == (20, 20)
        assert all(len(e) == 3 for h in hf.hypergraphs for e in h)
        again = generate("runiform", n=12, m=20, r=3, ell=2, seed=4)
        assert hf == again

    def test_runiform_too_many_edges(self):
        with pytest.raises(ValueError, match="exceeds"):
            generate("runiform", n=5, m=11, r=3)

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown generator"):
            generate("mystery", n=5)


@settings(max_examples=30)
@given(st.integers(min_value=0, max_value=9), st.integers(min_value=1, max_value=3),
       st.randoms(use_true_random=False))
def test_round_trip_property(n, ell, rnd):
    cap = n * (n - 1) // 2
    fam = random_family(n, [rnd.randint(0, cap) for _ in range(ell)], rnd.randint(0, 10 ** 6))
    assert parse_instance(serialize_instance(fam)) == fam
