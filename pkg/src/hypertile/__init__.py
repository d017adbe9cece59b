"""Desk-scale toolkit for perfect tilings of k-uniform hypergraphs."""

__version__ = "0.1.0"

from .core import Embedding, Hypergraph, Pattern, parse_pattern, read_hypergraph, write_hypergraph
from .factor import (
    Tiling,
    TPartition,
    almost_factor_local_search,
    exact_factor,
    greedy_disjoint_cover,
    largest_clique_in,
    verify_tiling,
)
from .parameters import beta, beta_ltl, d_param, l0, threshold_table, weight_w

__all__ = [
    "Embedding", "Hypergraph", "Pattern", "parse_pattern", "read_hypergraph", "write_hypergraph",
    "Tiling", "TPartition", "almost_factor_local_search", "exact_factor", "greedy_disjoint_cover",
    "largest_clique_in", "verify_tiling",
    "beta", "beta_ltl", "d_param", "l0", "threshold_table", "weight_w",
]
