"""Extremal host constructions with recomputed certificates.

Every certificate measures its numbers on the emitted hypergraph. Claimed
values are recorded next to the measured ones, never substituted for them.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .caps import current_caps
from .core import Hypergraph, Pattern, binom, enumerate_embeddings, mask_of
from .design import contains_B_lambda, independence_number
from .errors import DivisibilityError, PreconditionError, ResourceCapError
from .factor import exact_factor
from .rng import SplitMix64

ORACLE = "oracle"
STRUCTURAL = "structural-argument"
UNCHECKED = "unchecked"


@dataclass
class Certificate:
    kind: str
    params: dict
    claimed_min_codegree: int | None
    measured_min_codegree: int
    factor_free: bool | None
    factor_verdict: str
    parts: list[list[int]] = field(default_factory=list)
    divisibility: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def meets_claim(self) -> bool | None:
        if self.claimed_min_codegree is None:
            return None
        return self.measured_min_codegree >= self.claimed_min_codegree

    def to_json(self) -> dict:
        out = asdict(self)
        out["meets_claim"] = self.meets_claim
        return out


def largest_remainder(total: int, weights: Sequence[int | Fraction]) -> list[int]:
    """Split ``total`` proportionally to ``weights``; leftover units go to the
    largest fractional parts, earlier indices first on ties."""
    wsum = sum(Fraction(w) for w in weights)
    quotas = [Fraction(total) * Fraction(w) / wsum for w in weights]
    sizes = [math.floor(q) for q in quotas]
    order = sorted(range(len(weights)), key=lambda i: (-(quotas[i] - sizes[i]), i))
    for i in order[: total - sum(sizes)]:
        sizes[i] += 1
    return sizes


def _blocks(sizes: Sequence[int]) -> list[list[int]]:
    out, start = [], 0
    for s in sizes:
        out.append(list(range(start, start + s)))
        start += s
    return out


def _oracle(H: Hypergraph, pattern: Pattern) -> bool | None:
    """True when a factor exists, None when the oracle is out of reach."""
    if H.n % pattern.order:
        return False
    if H.n > current_caps().oracle_n:
        return None
    try:
        return exact_factor(H, pattern) is not None
    except ResourceCapError:
        return None


def _copies(H: Hypergraph, pattern: Pattern) -> list[frozenset[int]] | None:
    if binom(H.n, pattern.order) > current_caps().enumeration_sets:
        return None
    return [e.vertices for e in enumerate_embeddings(H, pattern)]


def _verdict(exists: bool | None, structural: bool | None) -> tuple[bool | None, str]:
    if exists is not None:
        return (not exists), ORACLE
    if structural:
        return True, STRUCTURAL
    return None, UNCHECKED


# parity


def parity_parts(n: int) -> list[int]:
    """Near-equal sizes of three parts with sizes[0] and sizes[1] of different parity."""
    sizes = largest_remainder(n, [1, 1, 1])
    if sizes[0] % 2 == sizes[1] % 2:
        if sizes[1] % 2 != sizes[2] % 2:
            sizes[1], sizes[2] = sizes[2], sizes[1]
        elif sizes[0] % 2 != sizes[2] % 2:
            sizes[0], sizes[2] = sizes[2], sizes[0]
        else:
            sizes[0] += 1
            sizes[2] -= 1
    return sizes


def parity_construction(k: int, n: int) -> tuple[Hypergraph, Certificate]:
    """k-sets meeting some part in an odd number of vertices."""
    if k < 3:
        raise PreconditionError(f"need k >= 3, got {k}")
    if n < k:
        raise PreconditionError(f"need n >= k, got n={n}, k={k}")
    parts = _blocks(parity_parts(n))
    masks = [mask_of(p) for p in parts]
    edges = [c for c in itertools.combinations(range(n), k)
             if any(bin(mask_of(c) & m).count("1") % 2 for m in masks)]
    H = Hypergraph(n, k, edges)
    return H, certify_parity(H, parts)


def certify_parity(H: Hypergraph, parts: list[list[int]]) -> Certificate:
    k, n = H.k, H.n
    pattern = Pattern.complete_graph(k + 1, k)
    masks = [mask_of(p) for p in parts]
    copies = _copies(H, pattern)
    odd_ok = None
    if copies is not None:
        odd_ok = all(bin(mask_of(c) & m).count("1") % 2 == 1 for c in copies for m in masks)
    divides = n % (k + 1) == 0
    exists = _oracle(H, pattern) if divides else False
    structural = odd_ok and len(parts[0]) % 2 != len(parts[1]) % 2 and k % 2 == 0
    free, verdict = _verdict(exists, structural)
    notes = []
    if k % 2:
        notes.append("odd k: no codegree or factor claim applies")
    return Certificate(
        kind="parity",
        params={"k": k, "n": n},
        claimed_min_codegree=math.ceil(Fraction(2 * n, 3)) - 1 if k % 2 == 0 else None,
        measured_min_codegree=H.min_l_degree(k - 1),
        factor_free=free,
        factor_verdict=verdict,
        parts=parts,
        divisibility={"pattern_order": k + 1, "divides_n": divides},
        checks={"copies": None if copies is None else len(copies),
                "all_copies_odd_in_every_part": odd_ok,
                "first_two_parts_differ_mod_2": len(parts[0]) % 2 != len(parts[1]) % 2},
        notes=notes,
    )


# space barrier


def space_barrier(k: int, t: int, n: int) -> tuple[Hypergraph, Certificate]:
    """All k-sets meeting W, |W| = (t-k+1)n/t - 1."""
    if not 3 <= k < t:
        raise PreconditionError(f"need t > k >= 3, got k={k}, t={t}")
    if n % t:
        raise DivisibilityError(f"t = {t} does not divide n = {n}")
    w = (t - k + 1) * n // t - 1
    if w < 1:
        raise PreconditionError(f"|W| = {w} must be positive")
    W = list(range(w))
    wm = mask_of(W)
    edges = [c for c in itertools.combinations(range(n), k) if mask_of(c) & wm]
    H = Hypergraph(n, k, edges)
    return H, certify_space_barrier(H, t, W)


def certify_space_barrier(H: Hypergraph, t: int, W: list[int]) -> Certificate:
    k, n = H.k, H.n
    wm = mask_of(W)
    pattern = Pattern.complete_graph(t, k)
    claimed = (1 - Fraction(k - 1, t)) * n - k + 2
    copies = _copies(H, pattern)
    min_in_w = None
    if copies is not None and copies:
        min_in_w = min(bin(mask_of(c) & wm).count("1") for c in copies)
    counting = (n // t) * (t - k + 1) > len(W)
    every_edge_meets_w = all(e & wm for e in H.edge_masks)
    structural = every_edge_meets_w and counting
    exists = _oracle(H, pattern) if n % t == 0 else False
    free, verdict = _verdict(exists, structural)
    return Certificate(
        kind="space_barrier",
        params={"k": k, "t": t, "n": n},
        claimed_min_codegree=int(claimed) if claimed.denominator == 1 else math.ceil(claimed),
        measured_min_codegree=H.min_l_degree(k - 1),
        factor_free=free,
        factor_verdict=verdict,
        parts=[list(W), sorted(set(range(n)) - set(W))],
        divisibility={"pattern_order": t, "divides_n": n % t == 0},
        checks={"W_size": len(W), "every_edge_meets_W": every_edge_meets_w,
                "copies": None if copies is None else len(copies),
                "min_copy_vertices_in_W": min_in_w,
                "copy_needs_in_W": t - k + 1,
                "counting_argument": counting},
    )


# Pikhurko-type complement construction


def pikhurko_sizes(n: int, lam: int, l: int) -> list[int]:
    """a_0, ..., a_l with a_0 odd and a_0/lam, a_1, ..., a_l nearly equal."""
    sizes = largest_remainder(n, [lam] + [1] * l)
    if sizes[0] % 2 == 0:
        ideal = Fraction(n * lam, lam + l)
        down, up = sizes[0] - 1, sizes[0] + 1
        a0 = down if abs(down - ideal) <= abs(up - ideal) and down >= 1 else up
        sizes = [a0] + largest_remainder(n - a0, [1] * l)
    return sizes


def pikhurko_construction(t: int, n: int, lam: int, H0: Hypergraph) -> tuple[Hypergraph, Certificate]:
    """Complement of the 3-graph built from H0 by the three part rules.

    The rules are: (a) inside A_0, (b) two vertices in one A_i and one in
    A_0, (c) one vertex in each of A_i, A_j, A_h for an edge ijh of H0.
    """
    if H0.k != 3:
        raise PreconditionError("H0 must be a 3-graph")
    if n % t:
        raise DivisibilityError(f"t = {t} does not divide n = {n}")
    book = contains_B_lambda(H0, lam)
    if book:
        raise PreconditionError(
            f"H0 has pair {set(book.pair)} in {lam + 1} or more edges, so its max codegree exceeds {lam}")
    alpha = independence_number(H0)
    if not alpha.exact:
        raise PreconditionError("independence number of H0 could not be computed exactly")
    if alpha.size >= t - 1:
        raise PreconditionError(
            f"H0 has independent set {sorted(alpha.witness)} of size {alpha.size} >= t-1 = {t - 1}")
    l = H0.n
    sizes = pikhurko_sizes(n, lam, l)
    if min(sizes) < 1:
        raise PreconditionError(f"n = {n} too small for {l + 1} nonempty parts")
    parts = _blocks(sizes)
    part_of = [0] * n
    for idx, p in enumerate(parts):
        for v in p:
            part_of[v] = idx
    edges = [c for c in itertools.combinations(range(n), 3) if _pikhurko_rules(c, part_of, H0)]
    H = Hypergraph(n, 3, edges)
    Hc = H.complement()
    return Hc, certify_pikhurko(Hc, t, lam, parts, H0, alpha.size)


def _pikhurko_rules(c, part_of, H0: Hypergraph) -> list[str]:
    p = sorted(part_of[v] for v in c)
    hits = []
    if p == [0, 0, 0]:
        hits.append("a")
    if p[0] == 0 and p[1] == p[2] and p[1] > 0:
        hits.append("b")
    if p[0] > 0 and len(set(p)) == 3 and H0.has_edge(i - 1 for i in p):
        hits.append("c")
    return hits


def certify_pikhurko(Hc: Hypergraph, t: int, lam: int, parts: list[list[int]],
                     H0: Hypergraph, alpha: int) -> Certificate:
    n = Hc.n
    pattern = Pattern.complete_graph(t, 3)
    part_of = [0] * n
    for idx, p in enumerate(parts):
        for v in p:
            part_of[v] = idx
    H = Hc.complement()
    rule_counts = [len(_pikhurko_rules(e, part_of, H0)) for e in H.edges]
    exclusive = all(c == 1 for c in rule_counts)
    a0m = mask_of(parts[0])
    copies = _copies(Hc, pattern)
    even_ok = None
    if copies is not None:
        even_ok = all(bin(mask_of(c) & a0m).count("1") % 2 == 0 for c in copies)
    a0_odd = len(parts[0]) % 2 == 1
    exists = _oracle(Hc, pattern)
    free, verdict = _verdict(exists, bool(even_ok) and a0_odd)
    others = sorted((len(p) for p in parts[1:]), reverse=True)
    estimate = max(len(parts[0]), sum(others[:lam]))
    return Certificate(
        kind="pikhurko",
        params={"t": t, "n": n, "lambda": lam, "l": H0.n},
        claimed_min_codegree=n - 2 - estimate,
        measured_min_codegree=Hc.min_l_degree(2),
        factor_free=free,
        factor_verdict=verdict,
        parts=parts,
        divisibility={"pattern_order": t, "divides_n": n % t == 0},
        checks={"a0_odd": a0_odd, "rules_exclusive": exclusive,
                "edges_outside_rules": sum(1 for c in rule_counts if c == 0),
                "H0_alpha": alpha, "H0_max_codegree_ok": not contains_B_lambda(H0, lam),
                "copies": None if copies is None else len(copies),
                "all_copies_even_in_A0": even_ok},
        notes=["claimed bound is n - 2 - max(a0, sum of the lambda largest a_i)",
               "part sizes by largest remainder on weights (lambda, 1, ..., 1), then a0 forced odd"],
    )


# complete multipartite graph


def multipartite_sizes(t: int, n: int, balanced: bool = False) -> list[int]:
    q = n // t
    if balanced:
        return [q] * t
    return [q - 1] + [q] * (t - 2) + [q + 1]


def multipartite_graph_extremal(t: int, n: int, balanced: bool = False) -> tuple[Hypergraph, Certificate]:
    """Complete t-partite graph with classes n/t-1, n/t, ..., n/t, n/t+1."""
    if t < 2:
        raise PreconditionError(f"need t >= 2, got {t}")
    if n % t:
        raise DivisibilityError(f"t = {t} does not divide n = {n}")
    sizes = multipartite_sizes(t, n, balanced)
    parts = _blocks(sizes)
    part_of = {v: i for i, p in enumerate(parts) for v in p}
    edges = [(u, v) for u, v in itertools.combinations(range(n), 2) if part_of[u] != part_of[v]]
    H = Hypergraph(n, 2, edges)
    return H, certify_multipartite(H, t, parts)


def certify_multipartite(H: Hypergraph, t: int, parts: list[list[int]]) -> Certificate:
    n = H.n
    exists = _oracle(H, Pattern.complete_graph(t, 2))
    free, verdict = _verdict(exists, min(len(p) for p in parts) < n // t)
    return Certificate(
        kind="multipartite_graph",
        params={"t": t, "n": n, "balanced": len({len(p) for p in parts}) == 1},
        claimed_min_codegree=None,
        measured_min_codegree=H.min_l_degree(1),
        factor_free=free,
        factor_verdict=verdict,
        parts=parts,
        divisibility={"pattern_order": t, "divides_n": n % t == 0},
        checks={"part_sizes": [len(p) for p in parts],
                "reference_degree": Fraction((t - 1) * n, t) - 1},
    )


# random dense hosts


def fano_plane() -> Hypergraph:
    lines = [(0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5)]
    return Hypergraph(7, 3, lines)


def random_dense_hypergraph(n: int, k: int, min_codegree: int, seed: int) -> Hypergraph:
    """Start from K_n^k and delete edges in seeded random order while every
    (k-1)-set keeps codegree at least ``min_codegree``."""
    if min_codegree > n - k + 1:
        raise PreconditionError(f"codegree {min_codegree} exceeds n-k+1 = {n - k + 1}")
    order = list(itertools.combinations(range(n), k))
    SplitMix64(seed).shuffle(order)
    deg = {R: n - k + 1 for R in itertools.combinations(range(n), k - 1)}
    kept = set(order)
    for e in order:
        subs = list(itertools.combinations(e, k - 1))
        if all(deg[R] > min_codegree for R in subs):
            kept.discard(e)
            for R in subs:
                deg[R] -= 1
    return Hypergraph(n, k, kept)


def random_hypergraph(n: int, k: int, p: float, seed: int) -> Hypergraph:
    rng = SplitMix64(seed)
    return Hypergraph(n, k, [c for c in itertools.combinations(range(n), k) if rng.random() < p])
