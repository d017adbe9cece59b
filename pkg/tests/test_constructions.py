import itertools
import json
import math
from fractions import Fraction

import pytest

from hypertile.constructions import (
    ORACLE,
    certify_parity,
    certify_space_barrier,
    fano_plane,
    largest_remainder,
    multipartite_graph_extremal,
    parity_construction,
    parity_parts,
    pikhurko_construction,
    pikhurko_sizes,
    random_dense_hypergraph,
    random_hypergraph,
    space_barrier,
)
from hypertile.core import Hypergraph, Pattern, enumerate_embeddings, format_hypergraph
from hypertile.design import independence_number
from hypertile.errors import DivisibilityError, PreconditionError


def brute_min_codegree(H):
    edges = set(H.edges)
    return min(sum(1 for v in range(H.n) if v not in R and tuple(sorted(R + (v,))) in edges)
               for R in itertools.combinations(range(H.n), H.k - 1))


def test_largest_remainder():
    assert largest_remainder(10, [1, 1, 1]) == [4, 3, 3]
    assert largest_remainder(11, [1, 1, 1]) == [4, 4, 3]
    assert largest_remainder(7, [Fraction(1, 2), Fraction(1, 2)]) == [4, 3]
    for total in range(30):
        assert sum(largest_remainder(total, [3, 1, 2, 2])) == total


@pytest.mark.parametrize("n", range(4, 30))
def test_parity_parts_differ_mod_2(n):
    sizes = parity_parts(n)
    assert sum(sizes) == n and sizes[0] % 2 != sizes[1] % 2
    assert max(sizes) - min(sizes) <= 2


def test_parity_n10_example():
    H, cert = parity_construction(4, 10)
    assert [len(p) for p in cert.parts] == [4, 3, 3]
    assert cert.factor_free is True and cert.factor_verdict == ORACLE
    assert cert.checks["all_copies_odd_in_every_part"] is True
    assert cert.claimed_min_codegree == math.ceil(Fraction(20, 3)) - 1
    assert cert.measured_min_codegree == H.min_l_degree(3)


def test_parity_n9_measured_matches_double_scan():
    H, cert = parity_construction(4, 9)
    assert cert.measured_min_codegree == brute_min_codegree(H)
    assert cert.divisibility["divides_n"] is False


@pytest.mark.parametrize("n", range(5, 15))
def test_parity_copies_all_odd(n):
    H, cert = parity_construction(4, n)
    masks = [sum(1 << v for v in p) for p in cert.parts]
    for e in enumerate_embeddings(H, Pattern.complete_graph(5, 4)):
        assert all(bin(e.mask & m).count("1") % 2 == 1 for m in masks)


def test_parity_odd_k_makes_no_claim():
    H, cert = parity_construction(3, 8)
    assert cert.claimed_min_codegree is None and cert.meets_claim is None
    assert cert.notes


def test_parity_errors():
    with pytest.raises(PreconditionError):
        parity_construction(4, 3)
    with pytest.raises(PreconditionError):
        parity_construction(2, 6)


@pytest.mark.parametrize("k,t,n,w", [(3, 4, 8, 3), (3, 4, 12, 5)])
def test_space_barrier_examples(k, t, n, w):
    H, cert = space_barrier(k, t, n)
    assert cert.checks["W_size"] == w
    assert cert.measured_min_codegree == w == cert.claimed_min_codegree
    assert cert.factor_free is True and cert.factor_verdict == ORACLE
    assert cert.checks["counting_argument"] is True


@pytest.mark.parametrize("k,t,n", [(3, 4, 8), (3, 4, 12), (4, 5, 10), (3, 5, 10)])
def test_space_barrier_structure(k, t, n):
    H, cert = space_barrier(k, t, n)
    W = set(cert.parts[0])
    assert all(set(e) & W for e in H.edges)
    for emb in enumerate_embeddings(H, Pattern.complete_graph(t, k)):
        assert len(emb.vertices & W) >= t - k + 1
    assert cert.checks["min_copy_vertices_in_W"] >= t - k + 1
    assert cert.measured_min_codegree == brute_min_codegree(H)


def test_space_barrier_errors():
    with pytest.raises(PreconditionError):
        space_barrier(3, 3, 9)
    with pytest.raises(DivisibilityError):
        space_barrier(3, 4, 10)
    with pytest.raises(PreconditionError):
        space_barrier(2, 4, 8)


def test_pikhurko_fano():
    F = fano_plane()
    alpha = independence_number(F)
    assert alpha.exact and alpha.size == 4
    t = alpha.size + 2
    Hc, cert = pikhurko_construction(t, 2 * t, 1, F)
    assert cert.checks["H0_max_codegree_ok"] and cert.checks["H0_alpha"] == 4
    assert cert.checks["a0_odd"] and cert.checks["rules_exclusive"]
    assert cert.checks["all_copies_even_in_A0"] is True
    assert cert.factor_free is True and cert.factor_verdict == ORACLE
    assert cert.measured_min_codegree == Hc.min_l_degree(2)
    A0 = cert.parts[0]
    A0m = sum(1 << v for v in A0)
    for emb in enumerate_embeddings(Hc, Pattern.complete_graph(t, 3)):
        assert bin(emb.mask & A0m).count("1") % 2 == 0


def test_pikhurko_sizes_nearly_equal():
    for n in range(10, 40):
        for lam in (1, 2):
            sizes = pikhurko_sizes(n, lam, 7)
            assert sum(sizes) == n and sizes[0] % 2 == 1
            rest = sizes[1:]
            assert max(rest) - min(rest) <= 1


def test_pikhurko_single_edge():
    H0 = Hypergraph(3, 3, [(0, 1, 2)])
    Hc, cert = pikhurko_construction(4, 8, 1, H0)
    assert cert.checks["H0_alpha"] == 2
    assert cert.checks["rules_exclusive"]
    assert cert.measured_min_codegree == brute_min_codegree(Hc)


def test_pikhurko_rejects_book():
    H0 = Hypergraph(4, 3, [(0, 1, 2), (0, 1, 3)])
    with pytest.raises(PreconditionError, match=r"\{0, 1\}"):
        pikhurko_construction(6, 12, 1, H0)


def test_pikhurko_rejects_large_independent_set():
    H0 = Hypergraph(5, 3, [(0, 1, 2)])
    with pytest.raises(PreconditionError, match="independent set"):
        pikhurko_construction(4, 8, 1, H0)


def test_multipartite_examples():
    H, cert = multipartite_graph_extremal(3, 9)
    assert [len(p) for p in cert.parts] == [2, 3, 4]
    assert cert.measured_min_codegree == 5 and cert.factor_free is True
    H, cert = multipartite_graph_extremal(2, 4)
    assert [len(p) for p in cert.parts] == [1, 3] and cert.factor_free is True
    H, cert = multipartite_graph_extremal(3, 9, balanced=True)
    assert cert.factor_free is False


def test_multipartite_errors():
    with pytest.raises(DivisibilityError):
        multipartite_graph_extremal(3, 10)
    with pytest.raises(PreconditionError):
        multipartite_graph_extremal(1, 4)


def test_tampering_changes_certificate():
    H, cert = space_barrier(3, 4, 8)
    W = cert.parts[0]
    e = next(iter(H.edges))
    H2 = Hypergraph(H.n, H.k, [f for f in H.edges if f != e])
    cert2 = certify_space_barrier(H2, 4, W)
    assert cert2.to_json() != cert.to_json()
    assert cert2.measured_min_codegree == brute_min_codegree(H2)

    H, cert = parity_construction(4, 10)
    outside = next(c for c in itertools.combinations(range(10), 4) if not H.has_edge(c))
    H3 = Hypergraph(10, 4, list(H.edges) + [outside])
    cert3 = certify_parity(H3, cert.parts)
    assert cert3.to_json() != cert.to_json()
    assert cert3.checks["all_copies_odd_in_every_part"] is not True or cert3.checks["copies"] != cert.checks["copies"]


@pytest.mark.parametrize("build", [
    lambda: parity_construction(4, 10),
    lambda: space_barrier(3, 4, 12),
    lambda: pikhurko_construction(4, 8, 1, Hypergraph(3, 3, [(0, 1, 2)])),
    lambda: multipartite_graph_extremal(3, 9),
])
def test_byte_identical(build):
    H1, c1 = build()
    H2, c2 = build()
    assert format_hypergraph(H1) == format_hypergraph(H2)
    assert json.dumps(c1.to_json(), sort_keys=True, default=str) == json.dumps(c2.to_json(), sort_keys=True, default=str)


@pytest.mark.parametrize("seed", range(5))
def test_random_dense_hypergraph(seed):
    H = random_dense_hypergraph(10, 3, 7, seed)
    assert H.min_l_degree(2) >= 7
    assert H.edges == random_dense_hypergraph(10, 3, 7, seed).edges
    with pytest.raises(PreconditionError):
        random_dense_hypergraph(10, 3, 9, seed)


def test_random_hypergraph_deterministic():
    assert random_hypergraph(9, 3, 0.4, 3).edges == random_hypergraph(9, 3, 0.4, 3).edges
    assert len(random_hypergraph(9, 3, 0.0, 3).edges) == 0
    assert len(random_hypergraph(9, 3, 1.0, 3).edges) == 84
