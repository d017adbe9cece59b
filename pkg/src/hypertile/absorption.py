"""Closeness witnesses, absorbing sets and families, and the four-step
absorbing pipeline."""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

from .caps import check_cap, current_caps
from .core import (
    Embedding,
    Hypergraph,
    Pattern,
    binom,
    bits,
    copies_through,
    enumerate_embeddings,
    mask_of,
    popcount,
)
from .errors import (
    AssignmentError,
    DivisibilityError,
    HypertileError,
    InfeasibleError,
    OverlapError,
    PreconditionError,
)
from .factor import (
    FactorOracle,
    Tiling,
    greedy_disjoint_cover,
    greedy_maximal_tiling,
    local_search_on,
    verify_tiling,
)
from .rng import SplitMix64


def _fset(mask: int) -> frozenset[int]:
    return frozenset(bits(mask))


class ClosenessContext:
    """Shared state for closeness queries on one host and pattern.

    Vertex sets of size j*|F| that span an F-factor are exactly the unions
    of j pairwise disjoint copies of F, so they are built level by level
    from the copy list. The factor oracle is kept for independent checks.
    """

    def __init__(self, H: Hypergraph, F: Pattern):
        if F.k != H.k:
            raise PreconditionError("pattern and host uniformities differ")
        self.H = H
        self.F = F
        self.oracle = FactorOracle(H, F)
        self._levels: list[frozenset[int]] = []
        self._through: dict[tuple[int, int], frozenset[int]] = {}

    @property
    def t(self) -> int:
        return self.F.order

    def factor_sets(self, j: int) -> frozenset[int]:
        """Masks of all j*|F|-sets spanning an F-factor."""
        if not self._levels:
            check_cap("enumeration_sets", binom(self.H.n, self.t))
            copies = frozenset(e.mask for e in enumerate_embeddings(self.H, self.F))
            self._levels.append(copies)
        while len(self._levels) < j:
            check_cap("enumeration_sets", binom(self.H.n, self.t * (len(self._levels) + 1)))
            base, prev = self._levels[0], self._levels[-1]
            nxt = {a | c for a in prev for c in base if not a & c}
            self._levels.append(frozenset(nxt))
        return self._levels[j - 1]

    def through(self, v: int, i: int) -> frozenset[int]:
        """Masks S of size i*t-1 with S + v spanning an F-factor."""
        key = (v, i)
        if key not in self._through:
            bit = 1 << v
            self._through[key] = frozenset(m ^ bit for m in self.factor_sets(i) if m & bit)
        return self._through[key]


def _context(H: Hypergraph, F: Pattern, ctx: ClosenessContext | None) -> ClosenessContext:
    if ctx is None:
        return ClosenessContext(H, F)
    if ctx.H is not H or ctx.F != F:
        raise PreconditionError("context was built for a different host or pattern")
    return ctx


def _check_pair(H: Hypergraph, F: Pattern, x: int, y: int, i: int) -> None:
    if x == y:
        raise PreconditionError("closeness needs two distinct vertices")
    if not (0 <= x < H.n and 0 <= y < H.n):
        raise PreconditionError("vertex out of range")
    if i < 1:
        raise PreconditionError("level i must be at least 1")
    if i * F.order - 1 > H.n - 2:
        raise PreconditionError(f"i*t-1 = {i * F.order - 1} exceeds n-2 = {H.n - 2}")


def closeness_count(H: Hypergraph, F: Pattern, x: int, y: int, i: int,
                    ctx: ClosenessContext | None = None, method: str = "sets") -> int:
    """Number of (it-1)-sets S avoiding x, y with both S+x and S+y spanning
    an F-factor.

    ``method="sets"`` intersects the per-vertex factor sets; ``"oracle"``
    enumerates every candidate S and asks the factor oracle.
    """
    _check_pair(H, F, x, y, i)
    check_cap("oracle_n", H.n)
    ctx = _context(H, F, ctx)
    if method == "oracle":
        return sum(1 for _ in _witness_sets_oracle(ctx, x, y, i))
    if method != "sets":
        raise PreconditionError(f"unknown method {method!r}")
    avoid = 1 << x | 1 << y
    return sum(1 for S in ctx.through(x, i) & ctx.through(y, i) if not S & avoid)


def _witness_sets_oracle(ctx: ClosenessContext, x: int, y: int, i: int) -> Iterator[int]:
    rest = [v for v in range(ctx.H.n) if v not in (x, y)]
    for S in itertools.combinations(rest, i * ctx.t - 1):
        m = mask_of(S)
        if ctx.oracle.has_factor(m | 1 << x) and ctx.oracle.has_factor(m | 1 << y):
            yield m


@dataclass(frozen=True)
class ClosenessWitness:
    x: int
    y: int
    i: int
    S: frozenset[int]

    def verify(self, H: Hypergraph, F: Pattern, oracle: FactorOracle | None = None) -> bool:
        if len(self.S) != self.i * F.order - 1 or {self.x, self.y} & self.S or self.x == self.y:
            return False
        oracle = oracle or FactorOracle(H, F)
        return oracle.has_factor(self.S | {self.x}) and oracle.has_factor(self.S | {self.y})


def closeness_witnesses(H: Hypergraph, F: Pattern, x: int, y: int, i: int,
                        ctx: ClosenessContext | None = None) -> Iterator[ClosenessWitness]:
    """All witnesses for the pair, in ascending order of their S masks."""
    _check_pair(H, F, x, y, i)
    ctx = _context(H, F, ctx)
    avoid = 1 << x | 1 << y
    for S in sorted(ctx.through(x, i) & ctx.through(y, i)):
        if not S & avoid:
            yield ClosenessWitness(x, y, i, _fset(S))


def compose_witnesses(w1: ClosenessWitness, w2: ClosenessWitness, H: Hypergraph | None = None,
                      F: Pattern | None = None) -> ClosenessWitness:
    """Join witnesses for (x, z) and (y, z) into one for (x, y).

    The new set is S_x + S_y + z. When a host and pattern are given the
    result is re-verified against the factor oracle.
    """
    if w1.y != w2.y:
        raise PreconditionError("witnesses must share their second vertex z")
    x, y, z = w1.x, w2.x, w1.y
    if len({x, y, z}) != 3:
        raise OverlapError("x, y and z must be distinct")
    if w1.S & w2.S:
        raise OverlapError(f"witness sets share {sorted(w1.S & w2.S)}")
    for name, S in (("first", w1.S), ("second", w2.S)):
        if S & {x, y, z}:
            raise OverlapError(f"{name} witness set meets {{x, y, z}}")
    out = ClosenessWitness(x, y, w1.i + w2.i, w1.S | w2.S | {z})
    if H is not None and F is not None and not out.verify(H, F):
        raise HypertileError("composed witness failed verification")
    return out


# closeness graph


@dataclass
class ClosenessGraph:
    n: int
    i: int
    tau: int
    adjacency: list[int]
    counts: dict[tuple[int, int], int]

    def neighbours(self, v: int) -> frozenset[int]:
        return _fset(self.adjacency[v])

    def degree(self, v: int) -> int:
        return popcount(self.adjacency[v])

    @property
    def min_pair_count(self) -> int:
        return min(self.counts.values(), default=0)

    @property
    def max_pair_count(self) -> int:
        return max(self.counts.values(), default=0)

    @property
    def min_degree(self) -> int:
        return min((self.degree(v) for v in range(self.n)), default=0)

    def components(self) -> list[frozenset[int]]:
        seen, out = 0, []
        for v in range(self.n):
            if seen >> v & 1:
                continue
            comp, frontier = 1 << v, 1 << v
            while frontier:
                u = (frontier & -frontier).bit_length() - 1
                frontier &= frontier - 1
                new = self.adjacency[u] & ~comp
                comp |= new
                frontier |= new
            seen |= comp
            out.append(_fset(comp))
        return out

    def diameter(self) -> int | None:
        """Largest shortest-path distance, None when disconnected."""
        if self.n <= 1:
            return 0
        worst = 0
        full = (1 << self.n) - 1
        for v in range(self.n):
            reached, frontier, d = 1 << v, 1 << v, 0
            while reached != full:
                nxt = 0
                for u in bits(frontier):
                    nxt |= self.adjacency[u]
                nxt &= ~reached
                if not nxt:
                    return None
                reached |= nxt
                frontier = nxt
                d += 1
            worst = max(worst, d)
        return worst

    def to_json(self) -> dict:
        part = closed_partition(self)
        return {"n": self.n, "i": self.i, "tau": self.tau,
                "edges": [[x, y] for (x, y), c in sorted(self.counts.items()) if c >= self.tau],
                "classes": [sorted(c) for c in part.classes], "all_cliques": part.all_cliques,
                "min_pair_count": self.min_pair_count, "max_pair_count": self.max_pair_count,
                "min_degree": self.min_degree}


def tau_from_fraction(n: int, t: int, i: int, frac: Fraction) -> int:
    """ceil(frac * C(n-2, it-1)), at least 1."""
    return max(1, math.ceil(Fraction(frac) * binom(n - 2, i * t - 1)))


def closeness_graph(H: Hypergraph, F: Pattern, i: int, tau: int,
                    ctx: ClosenessContext | None = None) -> ClosenessGraph:
    if tau < 1:
        raise PreconditionError("tau must be at least 1")
    ctx = _context(H, F, ctx)
    adj = [0] * H.n
    counts = {}
    for x, y in itertools.combinations(range(H.n), 2):
        c = closeness_count(H, F, x, y, i, ctx)
        counts[(x, y)] = c
        if c >= tau:
            adj[x] |= 1 << y
            adj[y] |= 1 << x
    return ClosenessGraph(H.n, i, tau, adj, counts)


@dataclass(frozen=True)
class ClosedPartition:
    classes: list[frozenset[int]]
    all_cliques: bool


def closed_partition(G: ClosenessGraph) -> ClosedPartition:
    """Components of the closeness graph, flagged when one is not a clique."""
    comps = G.components()
    cliques = all((G.adjacency[v] | 1 << v) & mask_of(c) == mask_of(c) for c in comps for v in c)
    return ClosedPartition(comps, cliques)


def good_triples(H: Hypergraph, t: int, X: Iterable[int], Y: Iterable[int]) -> int:
    """Count (x, y, T) with x in X, y in Y, T a (t-1)-set avoiding both and
    x + T, y + T both complete."""
    X, Y = sorted(set(X)), sorted(set(Y))
    total = 0
    for T in itertools.combinations(range(H.n), t - 1):
        if not H.is_clique(T):
            continue
        tm = mask_of(T)
        ext = _fset(H.link_mask(tm)) if t - 1 >= H.k - 1 else frozenset(range(H.n)) - set(T)
        ext = {v for v in ext if H.is_clique(T + (v,))}
        total += sum(1 for x in X for y in Y if x != y and x in ext and y in ext)
    return total


# absorbing sets


def absorber_size(t: int, i: int) -> int:
    return (t - 1) * i * t


@dataclass(frozen=True)
class AbsorbingSet:
    T: frozenset[int]
    A: frozenset[int]


def absorbing_sets_for(H: Hypergraph, F: Pattern, T: Iterable[int], i: int = 1,
                       oracle: FactorOracle | None = None) -> Iterator[AbsorbingSet]:
    """Every m-set A disjoint from T with H[A] and H[A + T] spanning F-factors."""
    T = frozenset(T)
    t = F.order
    if len(T) != t:
        raise PreconditionError(f"target set must have {t} vertices")
    m = absorber_size(t, i)
    if m > H.n - t:
        raise PreconditionError(f"m = {m} exceeds n - t = {H.n - t}")
    check_cap("oracle_n", H.n)
    check_cap("enumeration_sets", binom(H.n - t, m))
    oracle = oracle or FactorOracle(H, F)
    tm = mask_of(T)
    rest = [v for v in range(H.n) if v not in T]
    for A in itertools.combinations(rest, m):
        am = mask_of(A)
        if oracle.has_factor(am) and oracle.has_factor(am | tm):
            yield AbsorbingSet(T, frozenset(A))


def constructive_absorber(H: Hypergraph, F: Pattern, T: Iterable[int], i: int, avail: int,
                          ctx: ClosenessContext) -> frozenset[int] | None:
    """Absorber built from one copy through the first target vertex plus
    closeness witnesses pairing the copy's other vertices with the rest of T.

    The copy {v_1, u_2, ..., u_t} covers v_1 inside A + T, each witness S_j
    covers v_j inside A + T and u_j inside A.
    """
    T = sorted(T)
    tm = mask_of(T)
    avail &= ~tm
    v1, others = T[0], T[1:]
    for copy in copies_through(H, F, v1, avail | 1 << v1):
        us = sorted(copy.vertices - {v1})
        if len(us) != len(others):
            continue
        used = copy.mask & ~(1 << v1)
        got = _pick_witnesses(ctx, list(zip(us, others)), i, avail & ~used)
        if got is not None:
            return _fset(used | got)
    return None


def _pick_witnesses(ctx: ClosenessContext, pairs: list[tuple[int, int]], i: int, avail: int) -> int | None:
    if not pairs:
        return 0
    (u, v), rest = pairs[0], pairs[1:]
    for S in sorted(ctx.through(u, i) & ctx.through(v, i)):
        if S & ~avail or S & (1 << u | 1 << v):
            continue
        tail = _pick_witnesses(ctx, rest, i, avail & ~S)
        if tail is not None:
            return S | tail
    return None


@dataclass
class AbsorbingFamily:
    host: Hypergraph
    pattern: Pattern
    i: int
    members: list[frozenset[int]]
    unabsorbed: list[frozenset[int]] = field(default_factory=list)
    oracle: FactorOracle | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.oracle is None:
            self.oracle = FactorOracle(self.host, self.pattern)

    @property
    def t(self) -> int:
        return self.pattern.order

    @property
    def m(self) -> int:
        return absorber_size(self.t, self.i)

    @property
    def U(self) -> frozenset[int]:
        return frozenset().union(*self.members) if self.members else frozenset()

    def absorbs(self, idx: int, T: Iterable[int]) -> bool:
        return self.oracle.has_factor(mask_of(self.members[idx]) | mask_of(T))

    def usable(self, T: Iterable[int]) -> list[int]:
        T = frozenset(T)
        if T & self.U:
            return []
        return [j for j in range(len(self.members)) if self.absorbs(j, T)]

    def check(self) -> None:
        """Raise HypertileError when a family invariant fails."""
        seen: set[int] = set()
        for j, A in enumerate(self.members):
            if len(A) != self.m:
                raise HypertileError(f"member {j} has size {len(A)}, expected {self.m}")
            if seen & A:
                raise HypertileError(f"member {j} overlaps an earlier member")
            seen |= A
            if not self.oracle.has_factor(mask_of(A)):
                raise HypertileError(f"member {j} spans no F-factor")
            rest = [v for v in range(self.host.n) if v not in A]
            if not any(self.absorbs(j, T) for T in itertools.combinations(rest, self.t)):
                raise HypertileError(f"member {j} absorbs no t-set")

    def to_json(self) -> dict:
        return {"U": sorted(self.U), "members": [sorted(A) for A in self.members],
                "t": self.t, "i": self.i}


def build_absorbing_family(H: Hypergraph, F: Pattern, i: int = 1, capacity_target: int = 1,
                           seed: int = 0, mode: str = "greedy", budget: int | None = None,
                           samples: int | None = None, strict: bool = True,
                           ctx: ClosenessContext | None = None) -> AbsorbingFamily:
    """Pairwise disjoint absorbing sets.

    greedy: scan the t-sets of the vertices not yet used in lexicographic
    order; while one has fewer than ``capacity_target`` absorbers in the
    family and the vertex budget allows, add an absorber for it found among
    unused vertices. t-sets with no absorber left are recorded in
    ``unabsorbed``; with ``strict`` this raises InfeasibleError.

    randomized: draw ``samples`` uniform m-sets with a seeded generator,
    drop every set meeting another sampled set and every set that absorbs
    nothing, and keep the rest.
    """
    ctx = _context(H, F, ctx)
    t = F.order
    m = absorber_size(t, i)
    if H.n % t:
        raise DivisibilityError(f"|F| = {t} does not divide n = {H.n}")
    if m > H.n - t:
        raise InfeasibleError(f"absorbers of size {m} do not fit beside a {t}-set in {H.n} vertices")
    check_cap("oracle_n", H.n)
    budget = H.n - t if budget is None else budget
    oracle = ctx.oracle
    if mode == "randomized":
        fam = _randomized_family(H, F, i, seed, samples, oracle)
        if strict and not fam.members:
            raise InfeasibleError("no sampled m-set survived pruning")
        fam.check()
        return fam
    if mode != "greedy":
        raise PreconditionError(f"unknown mode {mode!r}")

    members: list[frozenset[int]] = []
    used = 0
    stuck: list[frozenset[int]] = []
    full = (1 << H.n) - 1
    fam = AbsorbingFamily(H, F, i, members, stuck, oracle)
    progress = True
    while progress:
        progress = False
        rest = [v for v in range(H.n) if not used >> v & 1]
        for T in itertools.combinations(rest, t):
            Tf = frozenset(T)
            if Tf in stuck:
                continue
            have = sum(1 for j in range(len(members)) if fam.absorbs(j, T))
            if have >= capacity_target:
                continue
            if popcount(used) + m > budget:
                stuck.append(Tf)
                continue
            A = _find_absorber(H, F, T, i, full & ~used, ctx)
            if A is None:
                stuck.append(Tf)
                continue
            members.append(A)
            used |= mask_of(A)
            progress = True
            break
    remaining = frozenset(v for v in range(H.n) if not used >> v & 1)
    fam.unabsorbed = [T for T in stuck if T <= remaining]
    if strict and (fam.unabsorbed or not members):
        sample = sorted(fam.unabsorbed[0]) if fam.unabsorbed else None
        raise InfeasibleError(
            f"{len(fam.unabsorbed)} t-sets lack {capacity_target} absorbers"
            + (f", first {sample}" if sample else ", no absorber exists"))
    fam.check()
    return fam


def _find_absorber(H: Hypergraph, F: Pattern, T, i: int, avail: int,
                   ctx: ClosenessContext) -> frozenset[int] | None:
    A = constructive_absorber(H, F, T, i, avail, ctx)
    if A is not None:
        return A
    tm = mask_of(T)
    pool = [v for v in bits(avail & ~tm)]
    m = absorber_size(F.order, i)
    if binom(len(pool), m) > current_caps().enumeration_sets:
        return None
    for cand in itertools.combinations(pool, m):
        am = mask_of(cand)
        if ctx.oracle.has_factor(am) and ctx.oracle.has_factor(am | tm):
            return frozenset(cand)
    return None


def _randomized_family(H: Hypergraph, F: Pattern, i: int, seed: int, samples: int | None,
                       oracle: FactorOracle) -> AbsorbingFamily:
    t = F.order
    m = absorber_size(t, i)
    rng = SplitMix64(seed)
    count = samples if samples is not None else max(1, H.n // m)
    drawn = [frozenset(rng.sample(range(H.n), m)) for _ in range(count)]
    drawn = list(dict.fromkeys(drawn))
    kept = [A for A in drawn if not any(B is not A and A & B for B in drawn)]
    fam = AbsorbingFamily(H, F, i, [], [], oracle)
    for A in kept:
        if not oracle.has_factor(mask_of(A)):
            continue
        rest = [v for v in range(H.n) if v not in A]
        if any(oracle.has_factor(mask_of(A) | mask_of(T)) for T in itertools.combinations(rest, t)):
            fam.members.append(A)
    return fam


def absorb(family: AbsorbingFamily, W: Iterable[int]) -> Tiling:
    """Perfect F-tiling of U + W.

    W is split into t-sets, each absorbed by its own member; members left
    over are tiled on their own.
    """
    W = frozenset(W)
    t = family.t
    if W & family.U:
        raise PreconditionError("W meets the family's vertex set")
    if len(W) % t:
        raise DivisibilityError(f"|W| = {len(W)} is not a multiple of t = {t}")
    assignment: list[tuple[frozenset[int], int]] = []
    stuck: list[frozenset[int] | None] = [None]

    def solve(rest: frozenset[int], free: frozenset[int]) -> bool:
        if not rest:
            return True
        w = min(rest)
        for others in itertools.combinations(sorted(rest - {w}), t - 1):
            T = frozenset((w,) + others)
            for j in sorted(free):
                if family.absorbs(j, T):
                    assignment.append((T, j))
                    if solve(rest - T, free - {j}):
                        return True
                    assignment.pop()
            if stuck[0] is None:
                stuck[0] = T
        return False

    if not solve(W, frozenset(range(len(family.members)))):
        T = stuck[0] or frozenset(sorted(W)[:t])
        raise AssignmentError(f"no distinct absorber left for t-set {sorted(T)}", stuck=sorted(T))
    copies: list[Embedding] = []
    absorbed = {j: T for T, j in assignment}
    for j, A in enumerate(family.members):
        target = mask_of(A) | mask_of(absorbed.get(j, ()))
        part = family.oracle.factor(target)
        if part is None:
            raise HypertileError(f"member {j} lost its factor")
        copies.extend(part)
    universe = family.U | W
    tiling = Tiling.from_copies(family.host, family.pattern, copies, universe)
    return tiling


# alpha-good pairs


def alpha_good_pair(H: Hypergraph, x: int, y: int, alpha: Fraction | float) -> tuple[bool, int]:
    """(is the pair alpha-good, number of alpha-good (k-1)-sets for it)."""
    alpha = Fraction(alpha).limit_denominator(10 ** 9) if isinstance(alpha, float) else Fraction(alpha)
    if not 0 < alpha <= 1:
        raise PreconditionError("alpha must lie in (0, 1]")
    need_deg = math.ceil(alpha * H.n)
    k = H.k
    pair = 1 << x | 1 << y
    count = 0
    for S in itertools.combinations([v for v in range(H.n) if v not in (x, y)], k - 1):
        link = H.codegree_mask(mask_of(S))
        if link & pair == pair and popcount(link) >= need_deg:
            count += 1
    return count >= math.ceil(alpha * binom(H.n, k - 1)), count


def bad_pair_counts(H: Hypergraph, alpha: Fraction | float) -> list[int]:
    bad = [0] * H.n
    for x, y in itertools.combinations(range(H.n), 2):
        if not alpha_good_pair(H, x, y, alpha)[0]:
            bad[x] += 1
            bad[y] += 1
    return bad


# pipeline


@dataclass
class PipelineConfig:
    i: int = 1
    max_i: int = 2
    step1: str = "alpha-good"
    alpha: Fraction = Fraction(1, 10)
    bad_fraction: Fraction = Fraction(1, 4)
    capacity_target: int = 1
    family_mode: str = "greedy"
    budget_fraction: Fraction = Fraction(1, 2)
    seed: int = 0
    restarts: int = 8
    closeness_tau: int = 1

    def to_json(self) -> dict:
        return {k: (str(v) if isinstance(v, Fraction) else v) for k, v in self.__dict__.items()}


@dataclass
class StepReport:
    step: str
    status: str
    seconds: float
    details: dict = field(default_factory=dict)


@dataclass
class PipelineResult:
    tiling: Tiling | None
    steps: list[StepReport]
    i: int

    @property
    def ok(self) -> bool:
        return self.tiling is not None

    @property
    def failed_step(self) -> str | None:
        for s in self.steps:
            if s.status == "failed":
                return s.step
        return None

    def to_json(self) -> dict:
        return {"ok": self.ok, "failed_step": self.failed_step, "i": self.i,
                "steps": [s.__dict__ for s in self.steps],
                "tiling": self.tiling.to_json() if self.tiling else None}


def _step1(H: Hypergraph, F: Pattern, cfg: PipelineConfig) -> tuple[Tiling, frozenset[int], dict]:
    if cfg.step1 == "noop":
        return Tiling(H, F, [], frozenset(range(H.n))), frozenset(), {"flagged": []}
    if cfg.step1 != "alpha-good":
        raise PreconditionError(f"unknown step-1 strategy {cfg.step1!r}")
    bad = bad_pair_counts(H, cfg.alpha)
    limit = cfg.bad_fraction * H.n
    flagged = [v for v in range(H.n) if bad[v] >= limit]
    tiling, uncovered = greedy_disjoint_cover(H, F, flagged)
    return tiling, uncovered, {"flagged": flagged, "copies": len(tiling.copies)}


def run_absorption_pipeline(H: Hypergraph, F: Pattern,
                            config: PipelineConfig | None = None) -> PipelineResult:
    """Remove copies through poorly connected vertices, set aside an
    absorbing family, tile most of the rest, then absorb the leftover."""
    cfg = config or PipelineConfig()
    t = F.order
    if H.n % t:
        raise DivisibilityError(f"|F| = {t} does not divide n = {H.n}")
    check_cap("oracle_n", H.n)
    steps: list[StepReport] = []

    def fail(name: str, started: float, i: int, **details) -> PipelineResult:
        steps.append(StepReport(name, "failed", time.perf_counter() - started, details))
        return PipelineResult(None, steps, i)

    start = time.perf_counter()
    t1, uncovered, info = _step1(H, F, cfg)
    if uncovered:
        return fail("remove", start, cfg.i, uncovered=sorted(uncovered), **info)
    steps.append(StepReport("remove", "ok", time.perf_counter() - start, info))

    start = time.perf_counter()
    rest = sorted(set(range(H.n)) - t1.covered)
    sub = H.induced(rest)
    i = cfg.i
    diag: dict = {}
    ctx = ClosenessContext(sub, F)
    if sub.n >= t + 1:
        G = closeness_graph(sub, F, 1, cfg.closeness_tau, ctx)
        diam = G.diameter()
        diag = {"closeness_components": len(G.components()), "closeness_diameter": diam,
                "min_closeness_degree": G.min_degree}
        if diam is not None and diam > i:
            i = min(diam, cfg.max_i)
    budget = int(cfg.budget_fraction * sub.n)
    try:
        fam = build_absorbing_family(sub, F, i, cfg.capacity_target, cfg.seed, cfg.family_mode,
                                     budget=budget, strict=False, ctx=ctx)
    except InfeasibleError as exc:
        return fail("absorbers", start, i, reason=str(exc), **diag)
    if not fam.members:
        return fail("absorbers", start, i, reason="no absorbing set found", **diag)
    steps.append(StepReport("absorbers", "ok", time.perf_counter() - start,
                            {"members": len(fam.members), "U_size": len(fam.U),
                             "unabsorbed": len(fam.unabsorbed), **diag}))

    start = time.perf_counter()
    remainder = sorted(set(range(sub.n)) - fam.U)
    if F.is_complete:
        t3 = local_search_on(sub, t, remainder, seed=cfg.seed, restarts=cfg.restarts)
    else:
        t3 = greedy_maximal_tiling(sub, F, remainder)
    steps.append(StepReport("almost-tiling", "ok", time.perf_counter() - start,
                            {"copies": len(t3.copies), "leftover": sorted(t3.leftover)}))

    start = time.perf_counter()
    try:
        t2 = absorb(fam, t3.leftover)
    except (AssignmentError, DivisibilityError) as exc:
        return fail("absorb", start, i, reason=str(exc),
                    stuck=getattr(exc, "stuck", None), leftover=len(t3.leftover))
    steps.append(StepReport("absorb", "ok", time.perf_counter() - start,
                            {"absorbed": len(t3.leftover) // t}))

    labels = rest
    copies = list(t1.copies)
    for c in t2.copies + t3.copies:
        copies.append(Embedding(F, tuple(labels[v] for v in c.image)))
    start = time.perf_counter()
    tiling = Tiling.from_copies(H, F, copies)
    report = verify_tiling(tiling)
    if not report.ok or tiling.leftover:
        return fail("verify", start, i, reason=report.violation or "leftover not empty")
    steps.append(StepReport("verify", "ok", time.perf_counter() - start, {"copies": len(copies)}))
    return PipelineResult(tiling, steps, i)
