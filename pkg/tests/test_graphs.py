import random

import pytest

from cyclefactor.errors import (
    AsymmetricEdge,
    BadParameters,
    DegreeMismatch,
    DuplicateEdge,
    FormatMismatch,
    IndexOutOfRange,
    ParseError,
)
from cyclefactor.graphs import (
    CycleFactor,
    RegularDigraph,
    UndirectedRegularGraph,
    double_undirected,
    gen_family,
    gen_random_regular_digraph,
    graph_to_text,
    parse_graph,
    read_graph,
    to_bipartite,
    validate_digraph,
    validate_undirected,
    write_graph,
)


def complete_loops(n):
    return gen_family("complete_loops", n, n)


class TestValidateDigraph:
    def test_single_loop_is_valid(self):
        g = RegularDigraph(1, 1, ((0,),))
        assert validate_digraph(g).ok

    def test_in_degree_mismatch(self):
        g = RegularDigraph(2, 1, ((1,), (1,)))
        v = validate_digraph(g)
        assert not v.ok
        assert isinstance(v.error, DegreeMismatch)
        assert v.error.kind == "in"

    def test_complete_with_loops_valid(self):
        assert validate_digraph(complete_loops(3)).ok

    def test_duplicate_edge(self):
        g = RegularDigraph(2, 2, ((0, 0), (0, 1)))
        v = validate_digraph(g)
        assert isinstance(v.error, DuplicateEdge)

    def test_index_out_of_range(self):
        g = RegularDigraph(2, 1, ((5,), (0,)))
        v = validate_digraph(g)
        assert isinstance(v.error, IndexOutOfRange)

    def test_out_degree_mismatch(self):
        g = RegularDigraph(2, 2, ((0,), (0, 1)))
        v = validate_digraph(g)
        assert isinstance(v.error, DegreeMismatch)

    def test_transpose_also_valid(self):
        for seed in range(20):
            g = gen_random_regular_digraph(7, 3, seed)
            t = g.transpose()
            assert t.n == g.n and t.d == g.d
            assert validate_digraph(t).ok


class TestValidateUndirected:
    def test_cycle_valid(self):
        assert validate_undirected(gen_family("cycle", 6, 2)).ok

    def test_asymmetric_rejected(self):
        g = UndirectedRegularGraph(3, 1, ((1,), (2,), (0,)))
        v = validate_undirected(g)
        assert isinstance(v.error, (AsymmetricEdge, DegreeMismatch))

    def test_loop_rejected(self):
        g = UndirectedRegularGraph(2, 1, ((0,), (1,)))
        assert not validate_undirected(g).ok


class TestToBipartite:
    def test_single_loop_gives_k11(self):
        h = to_bipartite(RegularDigraph(1, 1, ((0,),)))
        assert h.adj == ((0,),)

    def test_complete_loops_gives_k33(self):
        h = to_bipartite(complete_loops(3))
        assert h.num_edges() == 9
        assert all(row == (0, 1, 2) for row in h.adj)

    def test_directed_3cycle_gives_matching(self):
        g = RegularDigraph(3, 1, ((1,), (2,), (0,)))
        h = to_bipartite(g)
        assert h.adj == ((1,), (2,), (0,))
        assert h.num_edges() == g.n * g.d

    def test_in_adj_is_transpose(self):
        g = gen_random_regular_digraph(6, 2, 3)
        h = to_bipartite(g)
        rev = h.in_adj()
        assert all(u in rev[v] for u, row in enumerate(h.adj) for v in row)


class TestDoubleUndirected:
    def test_c4(self):
        g = double_undirected(gen_family("cycle", 4, 2))
        assert sum(len(r) for r in g.out_adj) == 8
        assert validate_digraph(g).ok

    def test_k4(self):
        g = double_undirected(gen_family("clique_union", 4, 3))
        assert sum(len(r) for r in g.out_adj) == 12

    def test_two_triangles(self):
        g = double_undirected(gen_family("clique_union", 6, 2))
        assert sum(len(r) for r in g.out_adj) == 12

    def test_no_loops_and_reverses_present(self):
        g = double_undirected(gen_family("cycle", 5, 2))
        for u, row in enumerate(g.out_adj):
            assert u not in row
            for v in row:
                assert g.has_edge(v, u)


class TestRandomGenerator:
    def test_d_equals_n_is_complete_with_loops(self):
        g = gen_random_regular_digraph(4, 4, 99)
        assert g == complete_loops(4)

    def test_small_instance_valid(self):
        g = gen_random_regular_digraph(6, 2, 1)
        assert validate_digraph(g).ok

    def test_d1_is_single_permutation(self):
        g = gen_random_regular_digraph(4, 1, 7)
        assert all(len(row) == 1 for row in g.out_adj)
        assert validate_digraph(g).ok

    def test_deterministic(self):
        assert gen_random_regular_digraph(8, 3, 5) == gen_random_regular_digraph(8, 3, 5)

    def test_always_valid_over_many_seeds(self):
        rng = random.Random(0)
        for seed in range(1000):
            n = rng.randint(1, 50)
            d = rng.randint(1, min(n, 6))
            g = gen_random_regular_digraph(n, d, seed)
            assert validate_digraph(g).ok, (n, d, seed)

    def test_no_loops_flag(self):
        g = gen_random_regular_digraph(8, 2, 3, allow_loops=False)
        assert all(i not in row for i, row in enumerate(g.out_adj))

    def test_no_digons_flag(self):
        g = gen_random_regular_digraph(9, 2, 4, allow_loops=False, allow_digons=False)
        for u, row in enumerate(g.out_adj):
            for v in row:
                assert not (u != v and g.has_edge(v, u))

    def test_bad_parameters(self):
        with pytest.raises(BadParameters):
            gen_random_regular_digraph(3, 4, 0)


class TestFamilies:
    def test_complete_loops_k5(self):
        g = gen_family("complete_loops", 5, 5)
        assert isinstance(g, RegularDigraph)
        assert all(row == (0, 1, 2, 3, 4) for row in g.out_adj)

    def test_complete_loops_blocks(self):
        g = gen_family("complete_loops", 6, 3)
        assert g.out_adj[0] == (0, 1, 2) and g.out_adj[5] == (3, 4, 5)
        assert validate_digraph(g).ok

    def test_clique_union_two_k4(self):
        g = gen_family("clique_union", 8, 3)
        assert validate_undirected(g).ok
        assert g.adj[0] == (1, 2, 3) and g.adj[4] == (5, 6, 7)
        assert not g.is_connected()

    def test_cycle_c6(self):
        g = gen_family("cycle", 6, 2)
        assert g.adj[0] == (1, 5)
        assert g.is_connected()

    def test_complete_bipartite_like(self):
        g = gen_family("complete_bipartite_like", 8, 2)
        assert validate_undirected(g).ok
        assert g.adj[0] == (2, 3)

    @pytest.mark.parametrize(
        "kind,n,d",
        [("complete_loops", 5, 3), ("clique_union", 7, 3), ("cycle", 6, 3),
         ("complete_bipartite_like", 6, 2), ("nope", 4, 2)],
    )
    def test_bad_parameters(self, kind, n, d):
        with pytest.raises(BadParameters):
            gen_family(kind, n, d)


class TestIo:
    def test_round_trip_digraph(self, tmp_path):
        g = complete_loops(3)
        path = tmp_path / "g.digraph"
        write_graph(g, path)
        assert read_graph(path) == g

    def test_round_trip_undirected(self, tmp_path):
        g = gen_family("cycle", 7, 2)
        path = tmp_path / "g.graph"
        write_graph(g, path)
        assert read_graph(path) == g

    def test_header_matches(self):
        assert graph_to_text(complete_loops(3)).startswith("digraph 3 3\n")

    def test_wrong_neighbour_count(self):
        with pytest.raises(ParseError):
            parse_graph("digraph 3 2\n0 1 2\n0 1\n0 1\n")

    def test_comments_ignored(self):
        g = parse_graph("# a comment\ndigraph 1 1\n# another\n0\n")
        assert g == RegularDigraph(1, 1, ((0,),))

    def test_missing_lines(self):
        with pytest.raises(ParseError):
            parse_graph("digraph 3 1\n1\n2\n")

    def test_bad_header(self):
        with pytest.raises(ParseError):
            parse_graph("multigraph 2 1\n1\n0\n")

    def test_asymmetric_undirected_rejected(self):
        with pytest.raises(FormatMismatch):
            parse_graph("graph 3 1\n1\n2\n0\n")

    def test_invalid_digraph_rejected(self):
        with pytest.raises(FormatMismatch):
            parse_graph("digraph 2 1\n1\n1\n")


class TestCycleFactor:
    def test_loop_counts_as_1_cycle(self):
        cf = CycleFactor.from_sigma((0, 2, 1))
        assert cf.cycles == ((0,), (1, 2))
        assert cf.num_cycles == 2

    def test_not_a_permutation(self):
        with pytest.raises(BadParameters):
            CycleFactor.from_sigma((0, 0, 1))

    def test_is_factor_of(self):
        g = complete_loops(3)
        assert CycleFactor.from_sigma((1, 2, 0)).is_factor_of(g)
        g1 = RegularDigraph(3, 1, ((1,), (2,), (0,)))
        assert not CycleFactor.from_sigma((2, 0, 1)).is_factor_of(g1)
