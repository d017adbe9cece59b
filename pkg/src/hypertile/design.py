"""Random-greedy partial designs, design checks, B_lambda detection and
exact independence numbers."""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

import mpmath

from .caps import check_cap, current_caps
from .core import Hypergraph, binom, bits, mask_of, popcount
from .errors import ArityError, PreconditionError
from .rng import SplitMix64


@dataclass
class DesignState:
    n: int
    k: int
    t: int
    lam: int
    blocks: list[tuple[int, ...]] = field(default_factory=list)
    multiplicity: Counter = field(default_factory=Counter)
    seed: int | None = None
    maximal: bool | None = None

    def fits(self, block: tuple[int, ...]) -> bool:
        return all(self.multiplicity[T] < self.lam for T in itertools.combinations(block, self.t))

    def add(self, block: Iterable[int]) -> None:
        block = tuple(sorted(block))
        if not self.fits(block):
            raise PreconditionError(f"block {block} would exceed multiplicity {self.lam}")
        self.blocks.append(block)
        for T in itertools.combinations(block, self.t):
            self.multiplicity[T] += 1

    def hypergraph(self) -> Hypergraph:
        return Hypergraph(self.n, self.k, set(self.blocks))

    def to_json(self) -> dict:
        return {"t": self.t, "lambda": self.lam, "seed": self.seed,
                "blocks": [list(b) for b in self.blocks], "maximal": self.maximal}


def _check_design_params(n: int, k: int, t: int, lam: int) -> None:
    if not 1 <= t < k <= n:
        raise PreconditionError(f"need 1 <= t < k <= n, got n={n}, k={k}, t={t}")
    if lam < 1:
        raise PreconditionError("lambda must be positive")


def random_greedy_design(n: int, k: int, t: int, lam: int, seed: int,
                         cap: int | None = None) -> DesignState:
    """Scan all k-sets in a seeded random order, keeping each one that fits.

    The result is maximal: every rejected k-set met a t-set already at
    multiplicity lambda when it was scanned, and multiplicities only grow.
    """
    _check_design_params(n, k, t, lam)
    check_cap("design_ksets", binom(n, k), cap)
    order = list(itertools.combinations(range(n), k))
    SplitMix64(seed).shuffle(order)
    state = DesignState(n, k, t, lam, seed=seed)
    for block in order:
        if state.fits(block):
            state.add(block)
    state.maximal = True
    return state


def is_maximal(state: DesignState) -> bool:
    """Exhaustive: no k-set outside the design can still be added."""
    present = set(state.blocks)
    return not any(state.fits(b) for b in itertools.combinations(range(state.n), state.k)
                   if b not in present)


@dataclass(frozen=True)
class DesignVerdict:
    ok: bool
    tset: tuple[int, ...] | None = None
    multiplicity: int = 0

    def __bool__(self):
        return self.ok


def is_partial_design(blocks: Iterable[Iterable[int]], n: int, k: int, t: int, lam: int) -> DesignVerdict:
    """Check that every t-set lies in at most lambda blocks.

    A failure reports the first violating t-set in lexicographic order.
    """
    counts: Counter = Counter()
    for b in blocks:
        b = tuple(sorted(b))
        if len(b) != k or len(set(b)) != k or any(not 0 <= v < n for v in b):
            raise ArityError(f"malformed block {b}")
        for T in itertools.combinations(b, t):
            counts[T] += 1
    bad = sorted(T for T, c in counts.items() if c > lam)
    if bad:
        return DesignVerdict(False, bad[0], counts[bad[0]])
    return DesignVerdict(True)


@dataclass(frozen=True)
class BookVerdict:
    contains: bool
    pair: tuple[int, int] | None = None
    petals: tuple[int, ...] = ()

    def __bool__(self):
        return self.contains


def contains_B_lambda(H: Hypergraph, lam: int) -> BookVerdict:
    """B_lambda is present iff some pair has codegree at least lambda + 1."""
    if H.k != 3:
        raise ArityError("book detection needs a 3-graph")
    for pair in itertools.combinations(range(H.n), 2):
        link = H.codegree_mask(mask_of(pair))
        if popcount(link) >= lam + 1:
            return BookVerdict(True, pair, tuple(bits(link))[: lam + 1])
    return BookVerdict(False)


def max_codegree_pair(H: Hypergraph) -> tuple[int, tuple[int, ...] | None]:
    """Largest (k-1)-degree and the first set attaining it."""
    best, arg = -1, None
    for T in itertools.combinations(range(H.n), H.k - 1):
        d = popcount(H.codegree_mask(mask_of(T)))
        if d > best:
            best, arg = d, T
    return max(best, 0), arg


@dataclass(frozen=True)
class IndependenceResult:
    size: int
    witness: frozenset[int]
    exact: bool


def _is_independent(H: Hypergraph, S: Iterable[int]) -> bool:
    m = mask_of(S)
    return not any(e & ~m == 0 for e in H.edge_masks)


def independence_number(H: Hypergraph, cap: int | None = None) -> IndependenceResult:
    """Largest vertex set containing no edge.

    Exact branch and bound up to the cap; above it a greedy set is returned
    as a lower bound with ``exact=False``.
    """
    limit = current_caps().independence_n if cap is None else cap
    deg = [0] * H.n
    blockers: list[list[int]] = [[] for _ in range(H.n)]
    for e in H.edge_masks:
        for v in bits(e):
            deg[v] += 1
            blockers[v].append(e & ~(1 << v))
    order = sorted(range(H.n), key=lambda v: (-deg[v], v))

    def addable(v: int, chosen: int) -> bool:
        return not any(r & ~chosen == 0 for r in blockers[v])

    if H.n > limit:
        chosen = 0
        for v in sorted(range(H.n), key=lambda v: (deg[v], v)):
            if addable(v, chosen):
                chosen |= 1 << v
        return IndependenceResult(popcount(chosen), frozenset(bits(chosen)), False)

    k = H.k

    def bound(cands: list[int]) -> int:
        # greedy cover of the candidates by cliques; a clique holds at most k-1
        groups: list[list[int]] = []
        for v in cands:
            for g in groups:
                if H.is_clique(g + [v]):
                    g.append(v)
                    break
            else:
                groups.append([v])
        return sum(min(len(g), k - 1) for g in groups)

    best = [0, 0]

    def search(chosen: int, size: int, cands: list[int]) -> None:
        if size > best[0]:
            best[0], best[1] = size, chosen
        if not cands or size + len(cands) <= best[0]:
            return
        if size + bound(cands) <= best[0]:
            return
        v, rest = cands[0], cands[1:]
        grown = chosen | 1 << v
        search(grown, size + 1, [u for u in rest if addable(u, grown)])
        search(chosen, size, rest)

    search(0, 0, order)
    return IndependenceResult(best[0], frozenset(bits(best[1])), True)


def falling_factorial(a: int, b: int) -> int:
    out = 1
    for j in range(b):
        out *= a - j
    return out


def design_order_formula(t: int, k: int, lam: int, x: int, dps: int = 50) -> int:
    """ceil((8 (k)_t C(k-1,t) C(k,t) lam x^(k-1) / ln(lam x))^(1/(k-t))).

    Evaluated with mpmath at two working precisions; the precision is raised
    until both give the same ceiling.
    """
    if not 1 <= t < k:
        raise PreconditionError(f"need k > t >= 1, got k={k}, t={t}")
    if lam * x < 2:
        raise PreconditionError(f"need lambda*x >= 2 so that the log is positive, got {lam * x}")
    num = 8 * falling_factorial(k, t) * binom(k - 1, t) * binom(k, t) * lam * x ** (k - 1)

    def evaluate(prec: int) -> int:
        with mpmath.workdps(prec):
            val = (mpmath.mpf(num) / mpmath.log(mpmath.mpf(lam * x))) ** (mpmath.mpf(1) / (k - t))
            return int(mpmath.ceil(val))

    lo, hi = dps, dps + 30
    while True:
        a, b = evaluate(lo), evaluate(hi)
        if a == b:
            return a
        lo, hi = hi, hi + 60
