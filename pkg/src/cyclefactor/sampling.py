"""Random cycle-factor generation.

Two backends: an exactly-uniform sequential sampler driven by extension
counts (feasible up to n = 20), and a lazy near-perfect-matching Markov
chain on the auxiliary bipartite graph for larger instances. On top of
both sits the min-of-k selection that keeps the best of several
independent draws.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_left
from collections import deque
from dataclasses import dataclass, field

from .errors import BadParameters, NoPerfectMatchingFound, SizeLimitExceeded, StepBudgetExhausted
from .graphs import BipartiteGraph, CycleFactor, RegularDigraph, require_valid, to_bipartite

__all__ = [
    "EXACT_MAX_N",
    "SamplerConfig",
    "derive_seed",
    "hopcroft_karp",
    "ExactFactorSampler",
    "MCMCFactorSampler",
    "sample_exact",
    "sample_mcmc",
    "min_cycle_factor",
    "MinFactorResult",
]

EXACT_MAX_N = 20
_MASK64 = (1 << 64) - 1


def derive_seed(seed: int, index: int) -> int:
    """Split a 64-bit seed into per-sample streams (splitmix64 finalizer)."""
    x = (seed + (index + 1) * 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


@dataclass
class SamplerConfig:
    """Knobs for the samplers; ``auto`` picks exact when n <= 20."""

    backend: str = "auto"  # exact | mcmc | auto
    mcmc_steps: int | None = None  # default 50 * n^2 * d
    num_samples: int | None = None  # default max(10, ceil(4 * log2 n))
    seed: int = 0
    tv_target: float | None = None  # advisory only, recorded in reports

    def resolve_backend(self, n: int) -> str:
        if self.backend == "auto":
            return "exact" if n <= EXACT_MAX_N else "mcmc"
        if self.backend not in ("exact", "mcmc"):
            raise BadParameters(f"unknown backend {self.backend!r}")
        return self.backend

    def resolve_steps(self, g: RegularDigraph) -> int:
        if self.mcmc_steps is not None:
            if self.mcmc_steps < 1:
                raise BadParameters("mcmc_steps must be positive")
            return self.mcmc_steps
        return 50 * g.n * g.n * g.d

    def resolve_num_samples(self, n: int) -> int:
        if self.num_samples is not None:
            if self.num_samples < 1:
                raise BadParameters("num_samples must be positive")
            return self.num_samples
        return max(10, math.ceil(4 * math.log2(max(n, 2))))


def hopcroft_karp(bip: BipartiteGraph) -> list[int]:
    """Maximum matching of a bipartite graph; returns V-partner per U vertex
    (-1 for unmatched). Deterministic: vertices scanned in index order."""
    n = bip.n
    adj = bip.adj
    match_u = [-1] * n
    match_v = [-1] * n
    INF = n + 1

    def bfs() -> bool:
        dist = [INF] * n
        queue = deque()
        for u in range(n):
            if match_u[u] == -1:
                dist[u] = 0
                queue.append(u)
        found = False
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                w = match_v[v]
                if w == -1:
                    found = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        bfs.dist = dist
        return found

    def dfs(u: int) -> bool:
        for v in adj[u]:
            w = match_v[v]
            if w == -1 or (bfs.dist[w] == bfs.dist[u] + 1 and dfs(w)):
                match_u[u] = v
                match_v[v] = u
                return True
        bfs.dist[u] = n + 1
        return False

    while bfs():
        for u in range(n):
            if match_u[u] == -1:
                dfs(u)
    return match_u


class ExactFactorSampler:
    """Exactly uniform cycle-factor sampler.

    Extension counts N(i, used) = number of ways to complete a partial
    assignment of vertices 0..i-1 are memoized once; each draw walks the
    count tree with a single uniform integer, which realises the
    count-ratio (permanent-ratio) sequential scheme exactly.
    """

    def __init__(self, g: RegularDigraph):
        require_valid(g)
        if g.n > EXACT_MAX_N:
            raise SizeLimitExceeded(
                f"exact sampler limited to n <= {EXACT_MAX_N}, got {g.n}"
            )
        self.graph = g
        self._counts: dict[tuple[int, int], int] = {}
        self.total = self._count(0, 0)
        if self.total == 0:
            raise NoPerfectMatchingFound(
                "no cycle-factor exists; input cannot be a valid regular digraph"
            )

    def _count(self, i: int, used: int) -> int:
        if i == self.graph.n:
            return 1
        key = (i, used)
        cached = self._counts.get(key)
        if cached is not None:
            return cached
        total = 0
        for v in self.graph.out_adj[i]:
            bit = 1 << v
            if not used & bit:
                total += self._count(i + 1, used | bit)
        self._counts[key] = total
        return total

    def sample(self, rng: random.Random) -> CycleFactor:
        r = rng.randrange(self.total)
        sigma = []
        used = 0
        for i in range(self.graph.n):
            for v in self.graph.out_adj[i]:
                bit = 1 << v
                if used & bit:
                    continue
                c = self._count(i + 1, used | bit)
                if r < c:
                    sigma.append(v)
                    used |= bit
                    break
                r -= c
            else:
                raise AssertionError("count tree inconsistent")
        return CycleFactor.from_sigma(sigma)


class MCMCFactorSampler:
    """Lazy near-perfect matching chain on the auxiliary bipartite graph.

    States are perfect matchings or matchings missing exactly one vertex on
    each side. From a perfect state a uniformly random matched edge is
    removed; from a 2-hole state an edge incident to a hole is added or
    rotated, uniformly among such edges. Every step is lazy with
    probability 1/2. Each draw restarts from a deterministic maximum
    matching, runs the configured burn-in, and returns the first perfect
    state at or after it.
    """

    def __init__(self, g: RegularDigraph, steps: int):
        require_valid(g)
        if steps < 1:
            raise BadParameters("step budget must be positive")
        self.graph = g
        self.steps = steps
        bip = to_bipartite(g)
        self._adj = bip.adj
        self._in_adj = bip.in_adj()
        self._out_sets = [set(row) for row in bip.adj]
        self._init_match = hopcroft_karp(bip)
        if -1 in self._init_match:
            raise NoPerfectMatchingFound(
                "maximum matching is not perfect; input violates regularity"
            )

    def sample(self, rng: random.Random) -> CycleFactor:
        n = self.graph.n
        adj = self._adj
        in_adj = self._in_adj
        match_u = list(self._init_match)
        match_v = [-1] * n
        for u, v in enumerate(match_u):
            match_v[v] = u
        hole_u = -1  # -1 means perfect
        hole_v = -1
        budget = self.steps
        limit = budget + 100 * budget
        rnd = rng.random
        rr = rng.randrange
        step = 0
        while step < limit:
            step += 1
            if step > budget and hole_u == -1:
                return CycleFactor.from_sigma(match_u)
            if rnd() < 0.5:
                continue
            if hole_u == -1:
                u = rr(n)
                v = match_u[u]
                match_u[u] = -1
                match_v[v] = -1
                hole_u, hole_v = u, v
            else:
                out_row = adj[hole_u]
                in_row = in_adj[hole_v]
                # The add edge (hole_u, hole_v) would appear in both rows;
                # count it once so every legal move has equal weight.
                overlap = hole_v in self._out_sets[hole_u]
                k = rr(len(out_row) + len(in_row) - overlap)
                if k < len(out_row):
                    v = out_row[k]
                    if v == hole_v:
                        match_u[hole_u] = v
                        match_v[v] = hole_u
                        hole_u = hole_v = -1
                    else:
                        u2 = match_v[v]
                        match_v[v] = hole_u
                        match_u[hole_u] = v
                        match_u[u2] = -1
                        hole_u = u2
                else:
                    k2 = k - len(out_row)
                    if overlap:
                        idx = bisect_left(in_row, hole_u)
                        if k2 >= idx:
                            k2 += 1
                    u2 = in_row[k2]
                    v2 = match_u[u2]
                    match_u[u2] = hole_v
                    match_v[hole_v] = u2
                    match_v[v2] = -1
                    hole_v = v2
        raise StepBudgetExhausted(
            f"no perfect state within {limit} steps (budget {budget})"
        )


def sample_exact(g: RegularDigraph, seed: int) -> CycleFactor:
    """One exactly-uniform cycle-factor; deterministic given seed."""
    return ExactFactorSampler(g).sample(random.Random(seed))


def sample_mcmc(g: RegularDigraph, cfg: SamplerConfig | None = None) -> CycleFactor:
    """One near-uniform cycle-factor from the matching chain."""
    cfg = cfg or SamplerConfig()
    sampler = MCMCFactorSampler(g, cfg.resolve_steps(g))
    return sampler.sample(random.Random(cfg.seed))


@dataclass(frozen=True)
class MinFactorResult:
    """Best of k independent draws, with every draw's cycle count."""

    factor: CycleFactor
    cycle_counts: tuple[int, ...]
    backend: str
    seed: int

    @property
    def best_count(self) -> int:
        return self.factor.num_cycles


def _make_sampler(g: RegularDigraph, cfg: SamplerConfig, backend: str):
    if backend == "exact":
        return ExactFactorSampler(g)
    return MCMCFactorSampler(g, cfg.resolve_steps(g))


def min_cycle_factor(g: RegularDigraph, cfg: SamplerConfig | None = None) -> MinFactorResult:
    """Draw k independent cycle-factors and keep the one with fewest cycles.

    Per-draw seeds are derived from (cfg.seed, draw index), so the result
    is independent of evaluation order; ties break to the first draw that
    attains the minimum.
    """
    cfg = cfg or SamplerConfig()
    require_valid(g)
    backend = cfg.resolve_backend(g.n)
    sampler = _make_sampler(g, cfg, backend)
    k = cfg.resolve_num_samples(g.n)
    best: CycleFactor | None = None
    counts = []
    for i in range(k):
        cf = sampler.sample(random.Random(derive_seed(cfg.seed, i)))
        counts.append(cf.num_cycles)
        if best is None or cf.num_cycles < best.num_cycles:
            best = cf
    return MinFactorResult(best, tuple(counts), backend, cfg.seed)
