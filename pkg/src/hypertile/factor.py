"""Exact F-factor search and the weight-ascent almost-factor local search."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .caps import check_cap, current_caps
from .core import (
    Embedding,
    Hypergraph,
    Pattern,
    bits,
    copies_through,
    enumerate_embeddings,
    mask_of,
    popcount,
)
from .errors import DivisibilityError, PreconditionError
from .matching import hopcroft_karp
from .parameters import weight_table
from .rng import SplitMix64, derive_seeds


@dataclass
class Tiling:
    """Vertex-disjoint copies of a pattern plus the uncovered vertices."""

    host: Hypergraph
    pattern: Pattern
    copies: list[Embedding]
    leftover: frozenset[int]

    @classmethod
    def from_copies(cls, host: Hypergraph, pattern: Pattern, copies: Iterable[Embedding],
                    universe: Iterable[int] | None = None) -> Tiling:
        copies = list(copies)
        covered = set().union(*(c.vertices for c in copies)) if copies else set()
        base = set(range(host.n)) if universe is None else set(universe)
        return cls(host, pattern, copies, frozenset(base - covered))

    @property
    def is_perfect(self) -> bool:
        return not self.leftover

    @property
    def covered(self) -> frozenset[int]:
        return frozenset().union(*(c.vertices for c in self.copies))

    def to_json(self) -> dict:
        return {
            "pattern": self.pattern.spec,
            "copies": [sorted(c.image) for c in self.copies],
            "leftover": sorted(self.leftover),
        }


@dataclass(frozen=True)
class TilingReport:
    ok: bool
    violation: str | None = None

    def __bool__(self):
        return self.ok


def verify_tiling(T: Tiling, universe: Iterable[int] | None = None) -> TilingReport:
    """Re-check every Tiling invariant against the host from scratch.

    ``universe`` is the vertex set the tiling is meant to partition; it
    defaults to all host vertices.
    """
    H, F = T.host, T.pattern.graph
    base = set(range(H.n)) if universe is None else set(universe)
    used: set[int] = set()
    for idx, copy in enumerate(T.copies):
        img = copy.image
        if len(img) != F.n:
            return TilingReport(False, f"size: copy {idx} has {len(img)} vertices, pattern has {F.n}")
        if len(set(img)) != len(img):
            return TilingReport(False, f"injectivity: copy {idx} repeats a vertex")
        if any(not 0 <= v < H.n for v in img):
            return TilingReport(False, f"range: copy {idx} leaves the host")
        for e in F.edges:
            if not H.has_edge(img[p] for p in e):
                return TilingReport(False, f"edge-preservation: copy {idx} maps {e} to a non-edge")
        if used & set(img):
            return TilingReport(False, f"disjointness: copy {idx} overlaps an earlier copy")
        used |= set(img)
    if not used <= base:
        return TilingReport(False, "universe: copies use vertices outside the tiled set")
    if set(T.leftover) != base - used:
        return TilingReport(False, "leftover: leftover differs from uncovered vertices")
    return TilingReport(True)


# exact search


class FactorOracle:
    """Memoised F-factor verdicts for vertex subsets of a fixed host.

    Verdicts are cached per bitmask and per relabelled induced subgraph; the
    relabelling sorts vertices by degree, so equal keys imply isomorphic
    subgraphs and a cache hit is always sound.
    """

    def __init__(self, H: Hypergraph, F: Pattern):
        if F.k != H.k:
            raise PreconditionError("pattern and host uniformities differ")
        self.H = H
        self.F = F
        self._by_mask: dict[int, bool] = {}
        self._by_shape: dict[tuple, bool] = {}
        self.searches = 0

    def _shape(self, mask: int) -> tuple:
        vs = list(bits(mask))
        inside = [e for e in self.H.edge_masks if e & ~mask == 0]
        deg = dict.fromkeys(vs, 0)
        for e in inside:
            for v in bits(e):
                deg[v] += 1
        order = sorted(vs, key=lambda v: (deg[v], v))
        local = {v: i for i, v in enumerate(order)}
        return (len(vs), tuple(sorted(tuple(sorted(local[v] for v in bits(e))) for e in inside)))

    def has_factor(self, vertices) -> bool:
        mask = vertices if isinstance(vertices, int) else mask_of(vertices)
        hit = self._by_mask.get(mask)
        if hit is not None:
            return hit
        size = popcount(mask)
        if size % self.F.order:
            verdict = False
        elif size == 0:
            verdict = True
        else:
            key = self._shape(mask)
            verdict = self._by_shape.get(key)
            if verdict is None:
                verdict = self.factor(mask) is not None
                self._by_shape[key] = verdict
        self._by_mask[mask] = verdict
        return verdict

    def factor(self, vertices) -> list[Embedding] | None:
        """A perfect F-tiling of the given vertex set, or None."""
        mask = vertices if isinstance(vertices, int) else mask_of(vertices)
        if popcount(mask) % self.F.order:
            return None
        self.searches += 1
        failed: set[int] = set()
        chosen: list[Embedding] = []

        def solve(rest: int) -> bool:
            if not rest:
                return True
            if rest in failed:
                return False
            v = (rest & -rest).bit_length() - 1
            for copy in copies_through(self.H, self.F, v, rest):
                chosen.append(copy)
                if solve(rest & ~copy.mask):
                    return True
                chosen.pop()
            failed.add(rest)
            return False

        if solve(mask):
            self._by_mask[mask] = True
            return list(chosen)
        self._by_mask[mask] = False
        return None


def exact_factor(H: Hypergraph, F: Pattern, cap: int | None = None) -> Tiling | None:
    """A perfect F-tiling of H, or None when none exists.

    Exhaustive backtracking over copies through the least uncovered vertex,
    with failed residual sets memoised.
    """
    if H.n % F.order:
        raise DivisibilityError(f"|F| = {F.order} does not divide n = {H.n}")
    check_cap("oracle_n", H.n, cap)
    copies = FactorOracle(H, F).factor((1 << H.n) - 1)
    if copies is None:
        return None
    return Tiling.from_copies(H, F, copies)


def greedy_disjoint_cover(H: Hypergraph, F: Pattern, targets: Iterable[int],
                          within: Iterable[int] | None = None) -> tuple[Tiling, frozenset[int]]:
    """Greedily pick disjoint copies through each target in ascending order.

    Each target gets its own copy, preferring copies that avoid the other
    targets; a target already swallowed by an earlier fallback copy counts
    as covered. Returns the tiling and the targets left uncovered.
    """
    universe = set(range(H.n)) if within is None else set(within)
    avail = mask_of(universe)
    pending = mask_of(targets)
    copies: list[Embedding] = []
    uncovered = []
    for v in sorted(set(targets)):
        pending &= ~(1 << v)
        if not avail >> v & 1:
            if not any(v in c.vertices for c in copies):
                uncovered.append(v)
            continue
        copy = next(copies_through(H, F, v, avail & ~pending), None)
        if copy is None:
            copy = next(copies_through(H, F, v, avail), None)
        if copy is None:
            uncovered.append(v)
            continue
        copies.append(copy)
        avail &= ~copy.mask
    return Tiling.from_copies(H, F, copies, universe), frozenset(uncovered)


def greedy_maximal_tiling(H: Hypergraph, F: Pattern, within: Iterable[int]) -> Tiling:
    universe = set(within)
    avail = mask_of(universe)
    copies = []
    for emb in enumerate_embeddings(H, F, within=universe):
        if emb.mask & ~avail == 0:
            copies.append(emb)
            avail &= ~emb.mask
    return Tiling.from_copies(H, F, copies, universe)


def largest_clique_in(H: Hypergraph, U: Iterable[int], cap: int | None = None) -> frozenset[int]:
    """Largest subset of U whose k-subsets are all edges.

    Sets of size at most k-1 count as complete. Ties go to the
    lexicographically smallest set.
    """
    uu = sorted(set(U))
    limit = current_caps().clique_set if cap is None else cap
    check_cap("clique_set", len(uu), limit)
    return frozenset(_largest_clique(H, tuple(uu)))


def _largest_clique(H: Hypergraph, uu: tuple[int, ...]) -> tuple[int, ...]:
    k = H.k
    if len(uu) <= k - 1:
        return uu
    for size in range(len(uu), k - 1, -1):
        for combo in itertools.combinations(uu, size):
            if H.is_clique(combo):
                return combo
    return uu[: k - 1]


# local search


@dataclass
class TPartition:
    """Partition of the vertices into t-sets with per-part largest cliques."""

    host: Hypergraph
    t: int
    parts: list[frozenset[int]]
    cliques: list[frozenset[int]]
    _clique_cache: dict = field(default_factory=dict, repr=False)

    @classmethod
    def build(cls, H: Hypergraph, t: int, parts: Iterable[Iterable[int]],
              cache: dict | None = None) -> TPartition:
        cache = {} if cache is None else cache
        parts = [frozenset(p) for p in parts]
        tp = cls(H, t, parts, [], cache)
        tp.cliques = [tp.clique_of(p) for p in parts]
        return tp

    def clique_of(self, part: frozenset[int]) -> frozenset[int]:
        got = self._clique_cache.get(part)
        if got is None:
            got = frozenset(_largest_clique(self.host, tuple(sorted(part))))
            self._clique_cache[part] = got
        return got

    @property
    def weights(self) -> tuple[Fraction, ...]:
        return weight_table(self.t)

    @property
    def total_weight(self) -> Fraction:
        w = self.weights
        return sum((w[len(g)] for g in self.cliques), Fraction(0))

    def full_parts(self) -> list[int]:
        return [i for i, g in enumerate(self.cliques) if len(g) == self.t]

    def check(self) -> None:
        """Raise AssertionError when an invariant fails."""
        seen: set[int] = set()
        for p, g in zip(self.parts, self.cliques):
            assert len(p) == self.t
            assert not seen & p
            seen |= p
            assert g <= p and self.host.is_clique(g)
            assert len(g) == len(_largest_clique(self.host, tuple(sorted(p))))
        assert seen == set(range(self.host.n))


@dataclass
class LocalSearchResult:
    tiling: Tiling
    partition: TPartition
    trace: list[dict]
    seed: int
    restarts: list[dict] = field(default_factory=list)

    def __iter__(self):
        return iter((self.tiling, self.partition, self.trace))


class _Search:
    def __init__(self, H: Hypergraph, t: int, pattern: Pattern, parts, max_moves: int | None):
        self.H = H
        self.t = t
        self.pattern = pattern
        self.w = weight_table(t)
        self.cache: dict = {}
        self.P = TPartition.build(H, t, parts, self.cache)
        self.trace: list[dict] = []
        self.max_moves = max_moves

    def weight_of(self, part: frozenset[int]) -> Fraction:
        return self.w[len(self.P.clique_of(part))]

    def apply(self, kind: str, changes: dict[int, frozenset[int]]) -> None:
        before = self.P.total_weight
        for idx, part in changes.items():
            self.P.parts[idx] = part
            self.P.cliques[idx] = self.P.clique_of(part)
        after = self.P.total_weight
        assert after > before
        self.trace.append({
            "move": kind,
            "parts": sorted(changes),
            "weight_before": str(before),
            "weight_after": str(after),
        })

    def gain(self, changes: dict[int, frozenset[int]]) -> Fraction:
        old = sum((self.w[len(self.P.cliques[i])] for i in changes), Fraction(0))
        new = sum((self.weight_of(p) for p in changes.values()), Fraction(0))
        return new - old

    def scan_order(self) -> list[int]:
        return sorted(range(len(self.P.parts)), key=lambda i: (len(self.P.cliques[i]), i))

    def connection_move(self) -> dict[int, frozenset[int]] | None:
        """t parts with equal clique size i < t and one donor part.

        Donor vertices are matched to the parts whose clique they extend by
        maximum bipartite matching; t-i+1 matched vertices are swapped in.
        """
        P, t, H = self.P, self.t, self.H
        by_size: dict[int, list[int]] = {}
        for idx in self.scan_order():
            by_size.setdefault(len(P.cliques[idx]), []).append(idx)
        for i, members in sorted(by_size.items()):
            if i >= t or len(members) < t:
                continue
            group = members[:t]
            need = t - i + 1
            links = {j: H.link_mask(mask_of(P.cliques[j])) for j in group}
            for donor in range(len(P.parts)):
                if donor in group:
                    continue
                adj = {v: [j for j in group if links[j] >> v & 1] for v in sorted(P.parts[donor])}
                adj = {v: js for v, js in adj.items() if js}
                if len(adj) < need:
                    continue
                matched = hopcroft_karp(adj)
                if len(matched) < need:
                    continue
                pairs = sorted(matched.items(), key=lambda vj: group.index(vj[1]))[:need]
                changes = {}
                donor_part = set(P.parts[donor])
                for v_in, j in pairs:
                    v_out = min(P.parts[j] - P.cliques[j])
                    changes[j] = P.parts[j] - {v_out} | {v_in}
                    donor_part.discard(v_in)
                    donor_part.add(v_out)
                changes[donor] = frozenset(donor_part)
                if self.gain(changes) > 0:
                    return changes
        return None

    def exchange_move(self, width: int) -> dict[int, frozenset[int]] | None:
        P = self.P
        order = self.scan_order()
        for ai, a in enumerate(order):
            if len(P.cliques[a]) == self.t:
                continue
            for b in order[ai + 1:] + order[:ai]:
                if b == a:
                    continue
                pa, pb = P.parts[a], P.parts[b]
                for out_a in itertools.combinations(sorted(pa), width):
                    for out_b in itertools.combinations(sorted(pb), width):
                        na = pa - set(out_a) | set(out_b)
                        nb = pb - set(out_b) | set(out_a)
                        changes = {a: frozenset(na), b: frozenset(nb)}
                        if self.gain(changes) > 0:
                            return changes
        return None

    def run(self) -> None:
        while self.max_moves is None or len(self.trace) < self.max_moves:
            if len(self.P.full_parts()) == len(self.P.parts):
                return
            for kind, finder in (("connection", self.connection_move),
                                 ("swap", lambda: self.exchange_move(1)),
                                 ("pair-exchange", lambda: self.exchange_move(2))):
                changes = finder()
                if changes is not None:
                    self.apply(kind, changes)
                    break
            else:
                return

    def result_tiling(self) -> Tiling:
        copies = [Embedding(self.pattern, tuple(sorted(self.P.parts[i])))
                  for i in self.P.full_parts()]
        return Tiling.from_copies(self.H, self.pattern, copies)


def random_partition(n: int, t: int, seed: int, vertices: Iterable[int] | None = None) -> list[frozenset[int]]:
    order = list(range(n)) if vertices is None else sorted(vertices)
    SplitMix64(seed).shuffle(order)
    return [frozenset(order[i:i + t]) for i in range(0, len(order), t)]


def almost_factor_local_search(H: Hypergraph, t: int, seed: int = 0, restarts: int = 8,
                               max_moves: int | None = None,
                               cap: int | None = None) -> LocalSearchResult:
    """Weight-ascent search for vertex-disjoint K_t^k copies.

    Each restart starts from a seeded random partition into t-sets and
    applies strictly weight-improving moves until none exists. The restart
    with the largest final weight wins; ties go to the earliest restart.
    """
    if t < H.k:
        raise PreconditionError(f"need t >= k, got t={t}, k={H.k}")
    if H.n % t:
        raise DivisibilityError(f"t = {t} does not divide n = {H.n}")
    check_cap("local_search_n", H.n, cap)
    pattern = Pattern.complete_graph(t, H.k)
    best = None
    summary = []
    for r, child in enumerate(derive_seeds(seed, max(1, restarts))):
        s = _Search(H, t, pattern, random_partition(H.n, t, child), max_moves)
        s.run()
        weight = s.P.total_weight
        summary.append({"restart": r, "seed": child, "weight": str(weight),
                        "moves": len(s.trace), "leftover": H.n - t * len(s.P.full_parts())})
        if best is None or weight > best[0]:
            best = (weight, child, s)
        if len(s.P.full_parts()) == len(s.P.parts):
            break
    _, child, s = best
    return LocalSearchResult(s.result_tiling(), s.P, s.trace, child, summary)


def local_search_on(H: Hypergraph, t: int, vertices: Iterable[int], seed: int = 0,
                    restarts: int = 8) -> Tiling:
    """Local search restricted to a vertex subset, reported in host labels."""
    vs = sorted(vertices)
    if not vs:
        return Tiling(H, Pattern.complete_graph(t, H.k), [], frozenset())
    sub = H.induced(vs)
    res = almost_factor_local_search(sub, t, seed=seed, restarts=restarts)
    pattern = Pattern.complete_graph(t, H.k)
    copies = [Embedding(pattern, tuple(vs[v] for v in c.image)) for c in res.tiling.copies]
    return Tiling.from_copies(H, pattern, copies, vs)
