import itertools
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypertile.core import (
    Hypergraph,
    Pattern,
    enumerate_embeddings,
    format_hypergraph,
    parse_hypergraph,
    parse_pattern,
    read_hypergraph,
    write_hypergraph,
)
from hypertile.errors import (
    ArityError,
    DuplicateEdgeError,
    EdgeArityError,
    MalformedHeaderError,
    PreconditionError,
    VertexRangeError,
)


@st.composite
def hypergraphs(draw, max_n=9):
    k = draw(st.integers(2, 4))
    n = draw(st.integers(k, max_n))
    all_sets = list(itertools.combinations(range(n), k))
    chosen = draw(st.lists(st.sampled_from(all_sets), unique=True, max_size=len(all_sets)))
    return Hypergraph(n, k, chosen)


def test_degree_of_set_examples(cherry):
    assert Hypergraph.complete(5, 3).degree_of_set({0, 1}) == 3
    assert cherry.degree_of_set({0, 1}) == 2
    assert cherry.degree_of_set({2, 3}) == 0


def test_degree_arity_errors(cherry):
    with pytest.raises(ArityError):
        cherry.degree_of_set(set())
    with pytest.raises(ArityError):
        cherry.degree_of_set({0, 1, 2})


def test_min_max_degree():
    assert Hypergraph.complete(6, 3).min_l_degree(2) == 4
    assert Hypergraph.empty(6, 3).min_l_degree(2) == 0
    assert Hypergraph.complete(7, 3).max_l_degree(2) == 5
    with pytest.raises(ArityError):
        Hypergraph.complete(6, 3).min_l_degree(3)


def test_max_degree_examples(cherry, fano):
    assert cherry.max_l_degree(2) == 2
    assert fano.max_l_degree(2) == 1
    assert fano.min_l_degree(2) == 1


def test_neighborhood(cherry):
    assert cherry.neighborhood({0, 1}) == {frozenset({2}), frozenset({3})}
    K4 = Hypergraph.complete(4, 3)
    assert K4.neighborhood({0}) == {frozenset(p) for p in itertools.combinations([1, 2, 3], 2)}
    assert Hypergraph.empty(5, 3).neighborhood({0, 1}) == frozenset()


def test_link_set():
    H = Hypergraph.complete(5, 3)
    assert H.link_set({1}) == frozenset({0, 2, 3, 4})
    K4 = Hypergraph.complete(4, 3)
    assert K4.link_set({0, 1, 2}) == frozenset({3})
    assert H.link_set({0, 1, 2}) == frozenset({3, 4})


def test_enumerate_embedding_counts(cherry):
    assert len(list(enumerate_embeddings(Hypergraph.complete(5, 3), Pattern.complete_graph(4, 3)))) == 5
    books = list(enumerate_embeddings(cherry, Pattern.book(1)))
    assert len(books) == 1
    assert books[0].vertices == frozenset({0, 1, 2, 3})
    bip = list(enumerate_embeddings(Hypergraph.complete(4, 2), Pattern.complete_partite((2, 2))))
    assert len(bip) == 3


def test_enumerate_embeddings_are_valid_and_distinct():
    H = Hypergraph.complete(6, 3)
    F = Pattern.complete_partite((1, 1, 2))
    embs = list(enumerate_embeddings(H, F))
    keys = set()
    for e in embs:
        assert all(H.has_edge(x) for x in e.host_edges())
        keys.add((e.mask, frozenset(frozenset(x) for x in e.host_edges())))
    assert len(keys) == len(embs)
    # a K_3^3(1,1,2) copy is a 4-set with a chosen pair of petals: 15 * 6 / ... brute force
    brute = set()
    for S in itertools.combinations(range(6), 4):
        for petals in itertools.combinations(S, 2):
            spine = tuple(v for v in S if v not in petals)
            brute.add(frozenset(frozenset(spine + (p,)) for p in petals))
    assert len(embs) == len(brute)


def test_anchor_respected():
    H = Hypergraph.complete(6, 3)
    F = Pattern.complete_graph(3, 3)
    embs = list(enumerate_embeddings(H, F, anchor={0: 4}))
    assert len(embs) == comb(5, 2)
    assert all(e.image[0] == 4 for e in embs)
    with pytest.raises(ArityError):
        list(enumerate_embeddings(H, F, anchor={0: 9}))


def test_induced_and_complement():
    K5 = Hypergraph.complete(5, 3)
    sub = K5.induced({0, 2, 3, 4})
    assert sub == Hypergraph.complete(4, 3)
    assert sub.labels == (0, 2, 3, 4)
    comp = Hypergraph.empty(5, 3).complement()
    assert comp.num_edges == 10


def test_invalid_edges():
    with pytest.raises(ArityError):
        Hypergraph(4, 3, [(0, 1)])
    with pytest.raises(ArityError):
        Hypergraph(4, 3, [(0, 1, 4)])
    with pytest.raises(PreconditionError):
        Hypergraph(4, 3, [(0, 1, 2), (2, 1, 0)])


def test_parse_examples():
    H = parse_hypergraph("4 3\n1 2 3\n")
    assert (H.n, H.k, H.edges) == (4, 3, ((0, 1, 2),))
    assert parse_hypergraph("# comment\n3 2\n\n1 2\n").edges == ((0, 1),)


@pytest.mark.parametrize("text, err", [
    ("4\n1 2 3\n", MalformedHeaderError),
    ("a b\n", MalformedHeaderError),
    ("", MalformedHeaderError),
    ("4 3\n1 2\n", EdgeArityError),
    ("4 3\n1 2 3\n3 2 1\n", DuplicateEdgeError),
    ("4 3\n1 2 5\n", VertexRangeError),
])
def test_parse_errors(text, err):
    with pytest.raises(err):
        parse_hypergraph(text)


def test_file_round_trip(tmp_path):
    H = Hypergraph.complete(5, 3)
    path = tmp_path / "k5.hg"
    write_hypergraph(H, path)
    assert read_hypergraph(path) == H
    assert path.read_text().splitlines()[:2] == ["5 3", "1 2 3"]


def test_parse_pattern():
    assert parse_pattern("K:4:3").graph == Hypergraph.complete(4, 3)
    assert parse_pattern("KP:3:1,1,2").graph.num_edges == 2
    assert parse_pattern("B:2").order == 5
    with pytest.raises(PreconditionError):
        parse_pattern("Q:1")
    with pytest.raises(PreconditionError):
        parse_pattern("KP:3:1,1")


@settings(max_examples=150, deadline=None)
@given(hypergraphs())
def test_handshake_and_averages(H):
    for l in range(1, H.k):
        counts = [H.degree_of_set(T) for T in itertools.combinations(range(H.n), l)]
        assert sum(counts) == comb(H.k, l) * H.num_edges
        assert min(counts) == H.min_l_degree(l) and max(counts) == H.max_l_degree(l)


@settings(max_examples=150, deadline=None)
@given(hypergraphs())
def test_link_matches_neighborhood(H):
    for S in itertools.combinations(range(H.n), H.k - 1):
        link = H.link_set(S)
        nb = H.neighborhood(S)
        assert link == frozenset(v for s in nb for v in s)


@settings(max_examples=100, deadline=None)
@given(hypergraphs(), st.randoms(use_true_random=False))
def test_isomorphism_invariance(H, rnd):
    perm = list(range(H.n))
    rnd.shuffle(perm)
    G = H.relabel(perm)
    assert sorted(H.degree_counts(H.k - 1).values()) == sorted(G.degree_counts(H.k - 1).values())
    for S in itertools.combinations(range(H.n), H.k - 1):
        image = {perm[v] for v in S}
        assert G.link_set(image) == frozenset(perm[v] for v in H.link_set(S))
    edge = Pattern.complete_graph(H.k, H.k)
    assert len(list(enumerate_embeddings(H, edge))) == H.num_edges == len(list(enumerate_embeddings(G, edge)))


@settings(max_examples=100, deadline=None)
@given(hypergraphs())
def test_complement_properties(H):
    assert H.complement().complement() == H
    assert H.num_edges + H.complement().num_edges == comb(H.n, H.k)
    assert parse_hypergraph(format_hypergraph(H)) == H
