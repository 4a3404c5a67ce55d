from __future__ import annotations

import json
import math

import numpy as np
import pytest

from dwmwis import (
    FamilySpec,
    Graph,
    GraphFormatError,
    WeightedGraph,
    brute_force_mwis,
    chimera,
    chimera_coords,
    chimera_index,
    generate_family,
    instance_to_json,
    parse_graph,
    parse_instance,
)
from conftest import TREE_EDGES, TREE_WEIGHTS
from oracles import bipartite_by_enumeration, grid_weights, random_graph, reference_mwis


class TestGraphType:
    def test_rejects_self_loop(self):
        with pytest.raises(ValueError, match="self-loop"):
            Graph(n=3, edges=frozenset({(1, 1)}))

    def test_rejects_out_of_range_endpoint(self):
        with pytest.raises(ValueError, match="out of range"):
            Graph(n=3, edges=frozenset({(0, 3)}))

    def test_from_edges_normalises(self):
        g = Graph.from_edges(3, [(2, 0), (0, 2), (1, 2)])
        assert g.edges == frozenset({(0, 2), (1, 2)})

    def test_independence_check(self, tree_graph):
        assert tree_graph.is_independent({2, 4})
        assert not tree_graph.is_independent({1, 2})


class TestWeightedGraph:
    def test_weight_length_mismatch(self, tree_graph):
        with pytest.raises(ValueError, match="expected 5 weights"):
            WeightedGraph(tree_graph, (1.0, 2.0))

    def test_nonpositive_weight_rejected(self, tree_graph):
        with pytest.raises(ValueError, match="positive"):
            WeightedGraph(tree_graph, (1.0, 2.0, 0.0, 1.0, 1.0))


class TestFamilies:
    def test_cycle4_edges(self):
        g = generate_family(FamilySpec("Cycle", (4,)))
        assert g.n == 4
        assert g.edges == frozenset({(0, 1), (1, 2), (2, 3), (0, 3)})

    def test_complete5_edge_count(self):
        g = generate_family(FamilySpec("Complete", (5,)))
        assert g.num_edges == 10

    def test_complete_bipartite_4_4(self):
        g = generate_family(FamilySpec("CompleteBipartite", (4, 4)))
        assert g.n == 8
        assert g.num_edges == 16
        assert bipartite_by_enumeration(g)

    def test_cycle_too_small_rejected(self):
        with pytest.raises(ValueError, match="n >= 3"):
            FamilySpec("Cycle", (2,))

    def test_unknown_family_rejected(self):
        with pytest.raises(ValueError, match="unknown family"):
            FamilySpec("Moebius", (4,))

    @pytest.mark.parametrize(
        "family,params,n,e",
        [
            ("Cycle", (7,), 7, 7),
            ("Star", (9,), 10, 9),  # centre plus nine leaves
            ("Complete", (6,), 6, 15),
            ("CompleteBipartite", (3, 5), 8, 15),
            ("Grid", (3, 4), 12, 17),
            ("Hypercube", (4,), 16, 32),
            ("Petersen", (), 10, 15),
        ],
    )
    def test_counts_match_closed_forms(self, family, params, n, e):
        g = generate_family(FamilySpec(family, params))
        assert (g.n, g.num_edges) == (n, e)

    def test_petersen_is_cubic(self):
        g = generate_family(FamilySpec("Petersen", ()))
        assert set(g.degrees()) == {3}

    def test_closed_form_counts_across_parameter_sweep(self):
        for n in range(3, 20):
            assert generate_family(FamilySpec("Cycle", (n,))).num_edges == n
        for n in range(1, 20):
            star = generate_family(FamilySpec("Star", (n,)))
            assert (star.n, star.num_edges) == (n + 1, n)
            assert generate_family(FamilySpec("Complete", (n,))).num_edges == n * (n - 1) // 2
        for a in range(1, 7):
            for b in range(1, 7):
                assert generate_family(FamilySpec("CompleteBipartite", (a, b))).num_edges == a * b
        for r in range(1, 6):
            for c in range(1, 6):
                grid = generate_family(FamilySpec("Grid", (r, c)))
                assert (grid.n, grid.num_edges) == (r * c, r * (c - 1) + c * (r - 1))
        for d in range(1, 7):
            cube = generate_family(FamilySpec("Hypercube", (d,)))
            assert (cube.n, cube.num_edges) == (2**d, d * 2 ** (d - 1))


class TestChimera:
    def test_k1_is_k44(self, chip1):
        assert chip1.n == 8
        assert chip1.num_edges == 16
        assert all(chip1.has_edge(a, 4 + b) for a in range(4) for b in range(4))

    def test_k2_counts_by_construction(self, chip2):
        # four blocks of 16 internal edges plus four inter-block bundles of 4
        assert chip2.n == 32
        assert chip2.num_edges == 4 * 16 + 4 * 4

    def test_k3_degree_census(self):
        degrees = chimera(3).degrees()
        assert set(degrees) == {5, 6}
        centre_block = [chimera_index(3, 1, 1, side, unit) for side in (0, 1) for unit in range(4)]
        assert all(degrees[q] == 6 for q in centre_block)

    def test_vertex_count_formula(self):
        for k in (1, 2, 3, 4):
            assert chimera(k).n == 8 * k * k

    def test_every_block_induces_k44(self):
        k = 3
        g = chimera(k)
        for row in range(k):
            for col in range(k):
                left = [chimera_index(k, row, col, 0, u) for u in range(4)]
                right = [chimera_index(k, row, col, 1, u) for u in range(4)]
                assert all(g.has_edge(a, b) for a in left for b in right)
                assert not any(g.has_edge(a, b) for a in left for b in left)
                assert not any(g.has_edge(a, b) for a in right for b in right)

    def test_index_roundtrip(self):
        k = 4
        for q in range(8 * k * k):
            assert chimera_index(k, *chimera_coords(k, q)) == q

    def test_invalid_k(self):
        with pytest.raises(ValueError):
            chimera(0)


class TestInstanceFormat:
    def test_parse_worked_example(self):
        text = json.dumps({"n": 5, "edges": TREE_EDGES, "weights": list(TREE_WEIGHTS)})
        weighted = parse_graph(text)
        assert weighted.n == 5
        assert weighted.graph.edges == frozenset(TREE_EDGES)
        assert weighted.weights == TREE_WEIGHTS

    def test_empty_vertex_set_rejected(self):
        with pytest.raises(GraphFormatError, match="nonempty"):
            parse_graph(json.dumps({"n": 0, "edges": [], "weights": []}))

    def test_zero_weight_rejected(self):
        text = json.dumps({"n": 2, "edges": [[0, 1]], "weights": [1.0, 0.0]})
        with pytest.raises(GraphFormatError, match=r"weights\[1\]"):
            parse_graph(text)

    def test_out_of_range_edge_names_field(self):
        text = json.dumps({"n": 2, "edges": [[0, 5]], "weights": [1.0, 1.0]})
        with pytest.raises(GraphFormatError, match=r"edges\[0\]"):
            parse_graph(text)

    def test_duplicate_edge_rejected(self):
        text = json.dumps({"n": 3, "edges": [[0, 1], [1, 0]], "weights": [1, 1, 1]})
        with pytest.raises(GraphFormatError, match="duplicate"):
            parse_graph(text)

    def test_malformed_json_rejected(self):
        with pytest.raises(GraphFormatError, match="invalid JSON"):
            parse_graph("{not json")

    def test_roundtrip_with_assignments(self, tree_weighted):
        assignments = [(0.5, 0.25, 1.0, 0.75, 0.125), (1.0, 1.0, 1.0, 1.0, 1.0)]
        text = instance_to_json(tree_weighted, assignments)
        weighted, parsed = parse_instance(text)
        assert weighted == tree_weighted
        assert parsed == [tuple(a) for a in assignments]


class TestBruteForce:
    def test_worked_example(self, tree_weighted):
        best, weight = brute_force_mwis(tree_weighted)
        assert best == frozenset({2, 4})
        assert weight == 9.0

    def test_single_vertex(self):
        weighted = WeightedGraph(Graph.from_edges(1, []), (5.0,))
        assert brute_force_mwis(weighted) == (frozenset({0}), 5.0)

    def test_triangle_picks_heaviest(self):
        g = generate_family(FamilySpec("Complete", (3,)))
        weighted = WeightedGraph(g, (1.0, 2.0, 3.0))
        assert brute_force_mwis(weighted) == (frozenset({2}), 3.0)

    def test_guard_rejects_large_graphs(self):
        g = Graph.from_edges(27, [])
        with pytest.raises(ValueError, match="n <= 26"):
            brute_force_mwis(WeightedGraph(g, (1.0,) * 27))

    def test_lexicographic_tie_break(self):
        # equal-weight endpoints of one edge: the smaller characteristic
        # vector excludes vertex 0
        weighted = WeightedGraph(Graph.from_edges(2, [(0, 1)]), (1.0, 1.0))
        best, weight = brute_force_mwis(weighted)
        assert best == frozenset({1})
        assert weight == 1.0

    @pytest.mark.parametrize("trial", range(12))
    def test_matches_recursive_reference(self, trial):
        rng = np.random.default_rng(400 + trial)
        g = random_graph(int(rng.integers(2, 13)), float(rng.uniform(0.1, 0.6)), rng)
        weighted = WeightedGraph(g, grid_weights(g.n, rng))
        mine = brute_force_mwis(weighted)
        ref = reference_mwis(weighted)
        assert mine[1] == ref[1]
        assert g.is_independent(mine[0])
        assert math.fsum(weighted.weights[v] for v in sorted(mine[0])) == mine[1]
