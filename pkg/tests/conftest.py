import pytest

from chrisimos.graphs import Graph
from chrisimos.ledger import generate_committee

FIXTURES = __file__.rsplit("/", 1)[0] + "/fixtures"


@pytest.fixture(scope="session")
def star4() -> Graph:
    return Graph.from_edges(4, [(1, 2), (1, 3), (1, 4)])


@pytest.fixture(scope="session")
def path4() -> Graph:
    return Graph.from_edges(4, [(1, 2), (2, 3), (3, 4)])


@pytest.fixture(scope="session")
def k4() -> Graph:
    return Graph.from_edges(4, [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)])


@pytest.fixture(scope="session")
def cycle4() -> Graph:
    return Graph.from_edges(4, [(1, 2), (2, 3), (3, 4), (1, 4)])


@pytest.fixture(scope="session")
def committee():
    return generate_committee(4, 3, seed=42)


def random_graph(rng, n, p) -> Graph:
    """Plain seeded G(n, p) without the min-degree retry; test-local oracle
    input, independent of the package generators."""
    edges = [
        (u, v)
        for u in range(1, n + 1)
        for v in range(u + 1, n + 1)
        if rng.random() < p
    ]
    return Graph.from_edges(n, edges)


def dominates_oracle(g: Graph, vertices) -> bool:
    """Set-based domination check, independent of the kernel path."""
    covered = set(vertices)
    for v in vertices:
        covered.update(g.adjacency[v])
    return covered >= set(range(1, g.n + 1))
