import numpy as np
import pytest

from mdskit.exceptions import InvariantViolation, ParseError
from mdskit.graphs import (
    DistanceMatrix,
    Graph,
    apsp,
    clique_path_integer_layout,
    davis_southern_women,
    format_edge_list,
    gen_clique_path,
    gen_sbm,
    gen_watts_strogatz,
    parse_distance_csv,
    parse_edge_list,
)


def floyd_warshall_oracle(g: Graph) -> np.ndarray:
    # independent recomputation for apsp equivalence checks
    big = 10**9
    d = np.full((g.n, g.n), big, dtype=np.int64)
    np.fill_diagonal(d, 0)
    for u, v in g.edges:
        d[u, v] = d[v, u] = 1
    for k in range(g.n):
        d = np.minimum(d, d[:, k, None] + d[None, k, :])
    return d


class TestParseEdgeList:
    def test_basic(self):
        g = parse_edge_list("0 1\n1 2")
        assert g.n == 3
        assert g.edges == {(0, 1), (1, 2)}

    def test_dedup_both_orientations(self):
        g = parse_edge_list("0 1\n1 0\n0 1")
        assert g.n == 2
        assert g.edges == {(0, 1)}

    def test_self_loop_rejected_with_line(self):
        with pytest.raises(ParseError, match="self-loop at line 1"):
            parse_edge_list("0 0")

    def test_header_comments_blank_lines(self):
        g = parse_edge_list("# a graph\nn 5\n\n0 1  # tail comment\n3 4\n")
        assert g.n == 5
        assert g.edges == {(0, 1), (3, 4)}

    def test_malformed_token_names_line(self):
        with pytest.raises(ParseError, match="line 2"):
            parse_edge_list("0 1\n1 x")

    def test_negative_index_rejected(self):
        with pytest.raises(ParseError, match="negative"):
            parse_edge_list("-1 2")

    def test_roundtrip(self):
        g = gen_clique_path(3, 3)
        assert parse_edge_list(format_edge_list(g)).edges == g.edges


class TestApsp:
    def test_triangle(self):
        g = parse_edge_list("0 1\n1 2\n0 2")
        d = apsp(g)
        assert d.diameter == 1
        off = d.d[~np.eye(3, dtype=bool)]
        assert np.all(off == 1)

    def test_path(self):
        d = apsp(parse_edge_list("0 1\n1 2"))
        assert d[0, 2] == 2
        assert d.diameter == 2

    def test_disconnected_names_vertices(self):
        g = Graph.from_edges(4, [(0, 1), (2, 3)])
        with pytest.raises(InvariantViolation, match="disconnected"):
            apsp(g)

    def test_matches_floyd_warshall_on_random_graphs(self):
        rng = np.random.default_rng(7)
        for trial in range(20):
            n = int(rng.integers(2, 64))
            p = 0.3 + 0.4 * rng.random()
            edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
            edges += [(i, i + 1) for i in range(n - 1)]  # force connectivity
            g = Graph.from_edges(n, edges)
            d = apsp(g)
            oracle = floyd_warshall_oracle(g)
            assert np.array_equal(d.d, oracle)
            assert d.diameter == oracle.max()

    def test_triangle_inequality_and_symmetry_on_generated(self):
        for seed in range(5):
            g = gen_watts_strogatz(30, 4, 0.3, seed)
            d = apsp(g)
            assert np.array_equal(d.d, d.d.T)
            d.check_triangle()


class TestWattsStrogatz:
    def test_edge_count_preserved(self):
        g = gen_watts_strogatz(50, 4, 0.3, seed=0)
        assert g.n == 50
        assert g.num_edges == 100  # n*k/2, rewiring is collision-free

    def test_beta_zero_is_ring_lattice(self):
        g = gen_watts_strogatz(6, 2, 0.0, seed=7)
        assert g.edges == {(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)}

    def test_deterministic(self):
        a = gen_watts_strogatz(50, 4, 0.3, seed=0)
        b = gen_watts_strogatz(50, 4, 0.3, seed=0)
        assert a.edges == b.edges

    def test_parameter_errors(self):
        with pytest.raises(ValueError, match="even"):
            gen_watts_strogatz(10, 3, 0.3, seed=0)
        with pytest.raises(ValueError, match="smaller than n"):
            gen_watts_strogatz(4, 4, 0.3, seed=0)


class TestSbm:
    def test_reference_sizes(self):
        probs = [[0.09, 0.03, 0.02], [0.03, 0.15, 0.04], [0.02, 0.04, 0.10]]
        g = gen_sbm([35, 35, 50], probs, seed=0)
        assert g.n == 120
        assert g.labels == tuple([0] * 35 + [1] * 35 + [2] * 50)

    def test_probability_one_block_is_clique(self):
        g = gen_sbm([3], [[1.0]], seed=0)
        assert g.edges == {(0, 1), (0, 2), (1, 2)}

    def test_probability_zero_blocks_empty(self):
        g = gen_sbm([2, 2], [[0.0, 0.0], [0.0, 0.0]], seed=0)
        assert g.num_edges == 0

    def test_asymmetric_probs_rejected(self):
        with pytest.raises(ValueError, match="symmetric"):
            gen_sbm([2, 2], [[0.5, 0.1], [0.2, 0.5]], seed=0)

    def test_deterministic(self):
        probs = [[0.2, 0.1], [0.1, 0.2]]
        assert gen_sbm([10, 10], probs, 3).edges == gen_sbm([10, 10], probs, 3).edges


class TestCliquePath:
    def test_counts(self):
        g = gen_clique_path(2, 4)
        assert g.n == 8
        assert g.num_edges == 2 * 6 + 16  # 28

    def test_single_clique(self):
        g = gen_clique_path(1, 5)
        assert g.num_edges == 10
        assert apsp(g).diameter == 1

    def test_extreme_clique_distance(self):
        g = gen_clique_path(3, 2)
        d = apsp(g)
        assert d[0, 5] == 2  # two bipartite hops
        assert d.diameter == 2

    def test_integer_layout_shape(self):
        x = clique_path_integer_layout(2, 4)
        assert x.shape == (8, 1)
        assert list(x[:, 0]) == [0, 0, 0, 0, 1, 1, 1, 1]


class TestDistanceMatrix:
    def test_rejects_asymmetric(self):
        with pytest.raises(InvariantViolation, match="asymmetric"):
            DistanceMatrix([[0, 1], [2, 0]])

    def test_rejects_sub_unit_distances(self):
        with pytest.raises(InvariantViolation, match="rescale"):
            DistanceMatrix([[0, 0.5], [0.5, 0]])

    def test_rescale(self):
        d = DistanceMatrix([[0, 2], [2, 0]]).rescaled_to_unit_min()
        assert d.min_distance == 1.0

    def test_triangle_violation_named(self):
        d = DistanceMatrix([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
        with pytest.raises(InvariantViolation, match="triangle"):
            d.check_triangle()

    def test_csv_roundtrip(self):
        text = "0,1,2\n1,0,1\n2,1,0\n"
        d = parse_distance_csv(text)
        assert d.diameter == 2

    def test_csv_rejects_ragged(self):
        with pytest.raises(ParseError, match="square"):
            parse_distance_csv("0,1\n1,0,3\n")


def test_davis_fixture():
    g = davis_southern_women()
    assert g.n == 32
    assert g.num_edges == 89
    assert g.labels == tuple([0] * 18 + [1] * 14)
    d = apsp(g)
    assert d.diameter == 4
    # bipartite: all edges join a woman (0-17) to an event (18-31)
    assert all(u < 18 <= v for u, v in g.edges)
