import itertools

import pytest

from hypertile.constructions import fano_plane
from hypertile.core import Hypergraph


def blocks_graph(block_sizes, k):
    """Disjoint complete k-graphs on consecutive vertex blocks."""
    edges, start = [], 0
    for s in block_sizes:
        edges += itertools.combinations(range(start, start + s), k)
        start += s
    return Hypergraph(start, k, edges)


@pytest.fixture
def fano():
    return fano_plane()


@pytest.fixture
def two_blocks():
    return blocks_graph([6, 6], 3)


@pytest.fixture
def cherry():
    # the two edges 123 and 124 of the 1-based examples, shifted to 0-based
    return Hypergraph(5, 3, [(0, 1, 2), (0, 1, 3)])
