from __future__ import annotations

import pytest

from dwmwis import Embedding, Graph, WeightedGraph, chimera

# five-vertex tree used as the worked example throughout: vertex 2 is the hub,
# the optimum is {2, 4} with weight 9 beating the larger set {0, 1, 3} at 8
TREE_EDGES = [(0, 2), (1, 2), (2, 3), (3, 4)]
TREE_WEIGHTS = (2.0, 3.0, 8.0, 3.0, 1.0)

# its direct placement into the first bipartite block of a Chimera chip
TREE_CHAINS = ((0,), (1,), (4,), (2,), (7,))


@pytest.fixture(scope="session")
def tree_graph() -> Graph:
    return Graph.from_edges(5, TREE_EDGES)


@pytest.fixture(scope="session")
def tree_weighted(tree_graph) -> WeightedGraph:
    return WeightedGraph(tree_graph, TREE_WEIGHTS)


@pytest.fixture(scope="session")
def chip1() -> Graph:
    return chimera(1)


@pytest.fixture(scope="session")
def chip2() -> Graph:
    return chimera(2)


@pytest.fixture(scope="session")
def tree_embedding(chip1) -> Embedding:
    return Embedding(chains=TREE_CHAINS, physical=chip1)
