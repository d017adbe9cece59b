"""k-uniform hypergraphs, tiling patterns and copy enumeration.

Vertices are dense integers ``0..n-1``. Vertex sets are plain ``frozenset``
objects at the API boundary; internally the intersection-heavy routines work
on integer bitmasks.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .errors import (
    ArityError,
    DuplicateEdgeError,
    EdgeArityError,
    MalformedHeaderError,
    PreconditionError,
    VertexRangeError,
)

VertexSet = frozenset


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def bits(mask: int) -> Iterator[int]:
    """Set bit positions of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def binom(a: int, b: int) -> int:
    """Binomial coefficient that is 0 outside ``0 <= b <= a``."""
    if b < 0 or a < b:
        return 0
    return math.comb(a, b)


class Hypergraph:
    """Immutable k-uniform hypergraph on vertices ``0..n-1``.

    ``labels`` optionally records, for an induced subgraph, the host vertex
    behind each local vertex. It takes no part in equality.
    """

    __slots__ = ("_n", "_k", "_edges", "_masks", "_nbr", "labels")

    def __init__(self, n: int, k: int, edges: Iterable[Iterable[int]] = (),
                 labels: tuple[int, ...] | None = None):
        if k < 1:
            raise PreconditionError(f"uniformity must be positive, got {k}")
        if n < 0:
            raise PreconditionError(f"vertex count must be non-negative, got {n}")
        seen: set[tuple[int, ...]] = set()
        for e in edges:
            edge = tuple(sorted(e))
            if len(edge) != k or len(set(edge)) != k:
                raise ArityError(f"edge {edge} is not a set of {k} distinct vertices")
            if edge[0] < 0 or edge[-1] >= n:
                raise ArityError(f"edge {edge} has a vertex outside 0..{n - 1}")
            if edge in seen:
                raise PreconditionError(f"duplicate edge {edge}")
            seen.add(edge)
        self._n = n
        self._k = k
        self._edges = tuple(sorted(seen))
        self._masks = frozenset(mask_of(e) for e in self._edges)
        self._nbr: dict[int, int] | None = None
        self.labels = labels

    # construction helpers

    @classmethod
    def complete(cls, n: int, k: int) -> Hypergraph:
        return cls(n, k, itertools.combinations(range(n), k))

    @classmethod
    def empty(cls, n: int, k: int) -> Hypergraph:
        return cls(n, k)

    @property
    def n(self) -> int:
        return self._n

    @property
    def k(self) -> int:
        return self._k

    @property
    def edges(self) -> tuple[tuple[int, ...], ...]:
        """Edges as sorted tuples, in sorted order."""
        return self._edges

    @property
    def edge_masks(self) -> frozenset[int]:
        return self._masks

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(range(self._n))

    def __eq__(self, other):
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (self._n, self._k, self._edges) == (other._n, other._k, other._edges)

    def __hash__(self):
        return hash((self._n, self._k, self._edges))

    def __repr__(self):
        return f"Hypergraph(n={self._n}, k={self._k}, edges={self.num_edges})"

    def has_edge(self, vertices: Iterable[int]) -> bool:
        return mask_of(vertices) in self._masks

    def has_edge_mask(self, mask: int) -> bool:
        return mask in self._masks

    # degree machinery

    def _check_set(self, T: Iterable[int]) -> tuple[int, ...]:
        tt = tuple(sorted(set(T)))
        if tt and (tt[0] < 0 or tt[-1] >= self._n):
            raise ArityError(f"vertex set {tt} leaves 0..{self._n - 1}")
        return tt

    def _check_arity(self, size: int) -> None:
        if not 1 <= size <= self._k - 1:
            raise ArityError(f"set size {size} outside [1, {self._k - 1}]")

    def codegree_mask(self, R: int) -> int:
        """Vertex mask completing the (k-1)-set mask ``R`` to an edge."""
        if self._nbr is None:
            nbr: dict[int, int] = {}
            for e in self._masks:
                for v in bits(e):
                    r = e ^ (1 << v)
                    nbr[r] = nbr.get(r, 0) | (1 << v)
            self._nbr = nbr
        return self._nbr.get(R, 0)

    def degree_of_set(self, T: Iterable[int]) -> int:
        tt = self._check_set(T)
        self._check_arity(len(tt))
        tm = mask_of(tt)
        if len(tt) == self._k - 1:
            return popcount(self.codegree_mask(tm))
        return sum(1 for e in self._masks if e & tm == tm)

    def degree_counts(self, l: int) -> Counter:
        """Degree of every l-set with positive degree, keyed by vertex mask."""
        self._check_arity(l)
        counts: Counter = Counter()
        for e in self._edges:
            for sub in itertools.combinations(e, l):
                counts[mask_of(sub)] += 1
        return counts

    def min_l_degree(self, l: int) -> int:
        counts = self.degree_counts(l)
        if len(counts) < binom(self._n, l):
            return 0
        return min(counts.values())

    def max_l_degree(self, l: int) -> int:
        counts = self.degree_counts(l)
        return max(counts.values(), default=0)

    def neighborhood(self, T: Iterable[int]) -> frozenset[frozenset[int]]:
        tt = self._check_set(T)
        self._check_arity(len(tt))
        tm = mask_of(tt)
        return frozenset(frozenset(bits(e & ~tm)) for e in self._masks if e & tm == tm)

    def link_mask(self, S: int) -> int:
        """Bitmask form of :meth:`link_set`."""
        full = (1 << self._n) - 1
        members = list(bits(S))
        if len(members) < self._k - 1:
            return full & ~S
        out = full & ~S
        for R in itertools.combinations(members, self._k - 1):
            out &= self.codegree_mask(mask_of(R))
            if not out:
                break
        return out

    def link_set(self, S: Iterable[int]) -> frozenset[int]:
        """Vertices outside S extending every (k-1)-subset of S to an edge.

        Sets smaller than k-1 impose no constraint, so everything outside S
        qualifies.
        """
        ss = self._check_set(S)
        if not ss:
            raise ArityError("link of the empty set is undefined")
        return frozenset(bits(self.link_mask(mask_of(ss))))

    def is_clique(self, vertices: Iterable[int]) -> bool:
        """Every k-subset is an edge; sets of size < k qualify vacuously."""
        vs = sorted(vertices)
        return all(mask_of(c) in self._masks for c in itertools.combinations(vs, self._k))

    # derived graphs

    def induced(self, U: Iterable[int]) -> Hypergraph:
        uu = self._check_set(U)
        local = {v: i for i, v in enumerate(uu)}
        um = mask_of(uu)
        edges = [tuple(local[v] for v in e) for e in self._edges if mask_of(e) & ~um == 0]
        return Hypergraph(len(uu), self._k, edges, labels=uu)

    def complement(self) -> Hypergraph:
        present = set(self._edges)
        return Hypergraph(
            self._n, self._k,
            (c for c in itertools.combinations(range(self._n), self._k) if c not in present),
        )

    def relabel(self, perm: Mapping[int, int] | list[int]) -> Hypergraph:
        """Image of the hypergraph under the vertex bijection ``perm``."""
        return Hypergraph(self._n, self._k, (tuple(perm[v] for v in e) for e in self._edges))

    def add_edges(self, extra: Iterable[Iterable[int]]) -> Hypergraph:
        new = {tuple(sorted(e)) for e in extra} - set(self._edges)
        return Hypergraph(self._n, self._k, list(self._edges) + sorted(new))


# patterns


@dataclass(frozen=True)
class Pattern:
    """The k-graph F being tiled.

    ``kind`` is ``"complete"``, ``"partite"``, ``"book"`` or ``"explicit"``;
    named kinds carry their parameters in ``params``.
    """

    graph: Hypergraph
    kind: str = "explicit"
    params: tuple = ()

    def __post_init__(self):
        if self.graph.n < self.graph.k:
            raise PreconditionError("a pattern needs at least k vertices")

    @property
    def order(self) -> int:
        return self.graph.n

    @property
    def k(self) -> int:
        return self.graph.k

    @property
    def is_complete(self) -> bool:
        return self.graph.num_edges == binom(self.graph.n, self.graph.k)

    @property
    def spec(self) -> str:
        if self.kind == "complete":
            t, k = self.params
            return f"K:{t}:{k}"
        if self.kind == "partite":
            return f"KP:{self.k}:" + ",".join(map(str, self.params))
        if self.kind == "book":
            return f"B:{self.params[0]}"
        return "explicit"

    @classmethod
    def complete_graph(cls, t: int, k: int) -> Pattern:
        if t < k:
            raise PreconditionError(f"K_{t}^{k} needs t >= k")
        return cls(Hypergraph.complete(t, k), "complete", (t, k))

    @classmethod
    def complete_partite(cls, sizes: Iterable[int]) -> Pattern:
        sizes = tuple(sizes)
        if len(sizes) < 2 or min(sizes) < 1:
            raise PreconditionError("complete k-partite pattern needs k >= 2 positive parts")
        parts, start = [], 0
        for s in sizes:
            parts.append(range(start, start + s))
            start += s
        return cls(Hypergraph(start, len(sizes), itertools.product(*parts)), "partite", sizes)

    @classmethod
    def book(cls, lam: int) -> Pattern:
        """B_lambda: a pair {0, 1} with lambda+1 petal vertices."""
        if lam < 0:
            raise PreconditionError("book parameter must be non-negative")
        p = cls.complete_partite((1, 1, lam + 1))
        return cls(p.graph, "book", (lam,))

    @classmethod
    def explicit(cls, graph: Hypergraph) -> Pattern:
        return cls(graph, "explicit", ())


def parse_pattern(spec: str) -> Pattern:
    """Parse ``K:t:k``, ``KP:k:m1,...,mk``, ``B:lambda`` or ``F:<file>``."""
    head, _, rest = spec.partition(":")
    try:
        if head == "K":
            t, k = rest.split(":")
            return Pattern.complete_graph(int(t), int(k))
        if head == "KP":
            k, sizes = rest.split(":")
            sizes = tuple(int(s) for s in sizes.split(","))
            if len(sizes) != int(k):
                raise PreconditionError(f"KP:{k} needs {k} part sizes")
            return Pattern.complete_partite(sizes)
        if head == "B":
            return Pattern.book(int(rest))
        if head == "F":
            return Pattern.explicit(read_hypergraph(rest))
    except ValueError as exc:
        if isinstance(exc, PreconditionError):
            raise
        raise PreconditionError(f"bad pattern spec {spec!r}") from None
    raise PreconditionError(f"unknown pattern spec {spec!r}")


@dataclass(frozen=True)
class Embedding:
    """Copy of a pattern: ``image[p]`` is the host vertex of pattern vertex p."""

    pattern: Pattern
    image: tuple[int, ...]

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(self.image)

    @property
    def mask(self) -> int:
        return mask_of(self.image)

    def host_edges(self) -> list[tuple[int, ...]]:
        return [tuple(sorted(self.image[p] for p in e)) for e in self.pattern.graph.edges]


# copy enumeration


def _clique_sets(H: Hypergraph, size: int, fixed: int, avail: int) -> Iterator[int]:
    """Masks of complete sets of ``size`` vertices containing ``fixed``.

    ``fixed`` is a mask of required vertices (already pairwise complete is
    not assumed); remaining vertices come from ``avail`` in increasing order.
    """
    k = H.k
    base = list(bits(fixed))
    if len(base) > size or not H.is_clique(base):
        return
    cand = avail & ~fixed
    if len(base) >= k - 1:
        for R in itertools.combinations(base, k - 1):
            cand &= H.codegree_mask(mask_of(R))
    need = size - len(base)

    def grow(members: list[int], cand: int, need: int, lo: int) -> Iterator[int]:
        if need == 0:
            yield mask_of(members)
            return
        pool = cand & ~((1 << lo) - 1)
        for u in bits(pool):
            if popcount(pool >> u) < need:
                return
            nc = cand & ~((1 << (u + 1)) - 1)
            grown = members + [u]
            if len(grown) >= k - 1:
                for R in itertools.combinations(members, k - 2):
                    nc &= H.codegree_mask(mask_of(R) | (1 << u))
                    if popcount(nc) < need - 1:
                        break
            if popcount(nc) >= need - 1:
                yield from grow(grown, nc, need - 1, u + 1)

    yield from grow(base, cand, need, 0)


def _pattern_order(F: Hypergraph, first: list[int]) -> list[int]:
    order = list(first)
    rest = [p for p in range(F.n) if p not in order]
    adj = {p: set() for p in range(F.n)}
    for e in F.edges:
        for p in e:
            adj[p].update(e)
    while rest:
        placed = set(order)
        rest.sort(key=lambda p: (-len(adj[p] & placed), p))
        order.append(rest.pop(0))
    return order


def _generic_images(H: Hypergraph, F: Hypergraph, fixed: Mapping[int, int],
                    avail: int) -> Iterator[tuple[int, ...]]:
    """All injective edge-preserving maps F -> H respecting ``fixed``."""
    order = _pattern_order(F, sorted(fixed))
    pos = {p: i for i, p in enumerate(order)}
    # pattern edges closed when each ordered vertex is placed
    closing: list[list[tuple[int, ...]]] = [[] for _ in order]
    for e in F.edges:
        last = max(e, key=lambda p: pos[p])
        closing[pos[last]].append(tuple(p for p in e if p != last))
    image = [-1] * F.n

    def place(i: int, used: int) -> Iterator[tuple[int, ...]]:
        if i == len(order):
            yield tuple(image)
            return
        p = order[i]
        if p in fixed:
            cand = (1 << fixed[p]) & ~used
        else:
            cand = avail & ~used
        for rest in closing[i]:
            if not cand:
                break
            cand &= H.codegree_mask(mask_of(image[q] for q in rest))
        for h in bits(cand):
            image[p] = h
            yield from place(i + 1, used | (1 << h))
        image[p] = -1

    yield from place(0, 0)


def enumerate_embeddings(H: Hypergraph, F: Pattern, anchor: Mapping[int, int] | None = None,
                         within: Iterable[int] | None = None) -> Iterator[Embedding]:
    """Yield every copy of F in H once, honouring ``anchor`` constraints.

    Two maps related by a pattern automorphism are the same copy; the first
    one met in the deterministic search order is yielded. ``within``
    restricts the host vertices that may be used.
    """
    if F.k != H.k:
        raise PreconditionError(f"pattern uniformity {F.k} differs from host {H.k}")
    anchor = dict(anchor or {})
    for p, h in anchor.items():
        if not 0 <= p < F.order:
            raise PreconditionError(f"anchor pattern vertex {p} out of range")
        if not 0 <= h < H.n:
            raise ArityError(f"anchor host vertex {h} outside 0..{H.n - 1}")
    if len(set(anchor.values())) != len(anchor):
        return
    if F.order > H.n:
        return
    avail = (1 << H.n) - 1 if within is None else mask_of(within)
    avail |= mask_of(anchor.values())
    if F.is_complete:
        fixed_mask = mask_of(anchor.values())
        for m in _clique_sets(H, F.order, fixed_mask, avail):
            others = iter(v for v in bits(m) if v not in anchor.values())
            img = tuple(anchor[p] if p in anchor else next(others) for p in range(F.order))
            yield Embedding(F, img)
        return
    seen: set[tuple[int, frozenset[int]]] = set()
    for img in _generic_images(H, F.graph, anchor, avail):
        key = (mask_of(img), frozenset(mask_of(img[p] for p in e) for e in F.graph.edges))
        if key in seen:
            continue
        seen.add(key)
        yield Embedding(F, img)


def copies_through(H: Hypergraph, F: Pattern, v: int, avail: int) -> Iterator[Embedding]:
    """Copies of F containing host vertex v, other vertices drawn from ``avail``.

    Distinct yields have distinct vertex sets; for the factor search only the
    covered set matters.
    """
    if F.is_complete:
        for m in _clique_sets(H, F.order, 1 << v, avail):
            yield Embedding(F, tuple(bits(m)))
        return
    seen: set[int] = set()
    for p in range(F.order):
        for img in _generic_images(H, F.graph, {p: v}, avail | (1 << v)):
            m = mask_of(img)
            if m not in seen:
                seen.add(m)
                yield Embedding(F, img)


# text format


def read_hypergraph(path: str | Path) -> Hypergraph:
    return parse_hypergraph(Path(path).read_text())


def parse_hypergraph(text: str) -> Hypergraph:
    """Parse the ``n k`` header plus one 1-based edge per line format."""
    header = None
    edges: list[tuple[int, ...]] = []
    seen: set[tuple[int, ...]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if header is None:
            if len(fields) != 2:
                raise MalformedHeaderError("header must be 'n k'", lineno)
            try:
                n, k = int(fields[0]), int(fields[1])
            except ValueError:
                raise MalformedHeaderError("header values must be integers", lineno) from None
            if n < 0 or k < 1:
                raise MalformedHeaderError("need n >= 0 and k >= 1", lineno)
            header = (n, k)
            continue
        n, k = header
        try:
            vs = [int(f) for f in fields]
        except ValueError:
            raise EdgeArityError("edge entries must be integers", lineno) from None
        if len(vs) != k or len(set(vs)) != k:
            raise EdgeArityError(f"expected {k} distinct vertices, got {len(vs)} entries", lineno)
        if min(vs) < 1 or max(vs) > n:
            raise VertexRangeError(f"vertex ids must lie in 1..{n}", lineno)
        edge = tuple(sorted(v - 1 for v in vs))
        if edge in seen:
            raise DuplicateEdgeError(f"duplicate edge {' '.join(map(str, vs))}", lineno)
        seen.add(edge)
        edges.append(edge)
    if header is None:
        raise MalformedHeaderError("missing 'n k' header")
    return Hypergraph(header[0], header[1], edges)


def format_hypergraph(H: Hypergraph) -> str:
    lines = [f"{H.n} {H.k}"]
    lines.extend(" ".join(str(v + 1) for v in e) for e in H.edges)
    return "\n".join(lines) + "\n"


def write_hypergraph(H: Hypergraph, path: str | Path) -> None:
    Path(path).write_text(format_hypergraph(H))
