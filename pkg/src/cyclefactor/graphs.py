"""Graph data types, validation, generators, and the on-disk text format.

All graphs use 0-based vertex indices and store adjacency lists sorted,
so structural equality of the dataclasses is canonical graph equality.
Directed graphs may contain loops and digons but never parallel edges;
undirected graphs are always simple.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    AsymmetricEdge,
    BadParameters,
    DegreeMismatch,
    DuplicateEdge,
    FormatMismatch,
    GraphError,
    IndexOutOfRange,
    LoopNotAllowed,
    ParseError,
    RetryLimitExceeded,
)

__all__ = [
    "RegularDigraph",
    "UndirectedRegularGraph",
    "BipartiteGraph",
    "CycleFactor",
    "Verdict",
    "validate_digraph",
    "validate_undirected",
    "require_valid",
    "to_bipartite",
    "double_undirected",
    "gen_random_regular_digraph",
    "gen_family",
    "read_graph",
    "write_graph",
    "graph_to_text",
]

_RETRY_LIMIT = 10_000


@dataclass(frozen=True)
class RegularDigraph:
    """A d-regular directed graph on n vertices.

    Every vertex has out-degree and in-degree exactly d. Loops and digons
    are permitted; parallel edges are not. ``out_adj[i]`` is the sorted
    tuple of out-neighbours of vertex ``i``.
    """

    n: int
    d: int
    out_adj: tuple[tuple[int, ...], ...]

    @classmethod
    def from_lists(cls, n: int, d: int, out_adj) -> "RegularDigraph":
        return cls(n, d, tuple(tuple(sorted(row)) for row in out_adj))

    def has_edge(self, u: int, v: int) -> bool:
        import bisect

        row = self.out_adj[u]
        k = bisect.bisect_left(row, v)
        return k < len(row) and row[k] == v

    def transpose(self) -> "RegularDigraph":
        rev: list[list[int]] = [[] for _ in range(self.n)]
        for u, row in enumerate(self.out_adj):
            for v in row:
                rev[v].append(u)
        return RegularDigraph.from_lists(self.n, self.d, rev)


@dataclass(frozen=True)
class UndirectedRegularGraph:
    """A simple d-regular undirected graph; ``adj[i]`` sorted neighbours."""

    n: int
    d: int
    adj: tuple[tuple[int, ...], ...]

    @classmethod
    def from_lists(cls, n: int, d: int, adj) -> "UndirectedRegularGraph":
        return cls(n, d, tuple(tuple(sorted(row)) for row in adj))

    @classmethod
    def from_edges(cls, n: int, d: int, edges) -> "UndirectedRegularGraph":
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
        return cls.from_lists(n, d, adj)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = [False] * self.n
        stack = [0]
        seen[0] = True
        count = 1
        while stack:
            u = stack.pop()
            for v in self.adj[u]:
                if not seen[v]:
                    seen[v] = True
                    count += 1
                    stack.append(v)
        return count == self.n


@dataclass(frozen=True)
class BipartiteGraph:
    """A d-regular bipartite graph on two sides of size n.

    ``adj[u]`` lists the V-side neighbours of U-side vertex ``u``.
    """

    n: int
    d: int
    adj: tuple[tuple[int, ...], ...]

    def in_adj(self) -> tuple[tuple[int, ...], ...]:
        """V-side adjacency: ``in_adj()[v]`` lists U-side neighbours of v."""
        rev: list[list[int]] = [[] for _ in range(self.n)]
        for u, row in enumerate(self.adj):
            for v in row:
                rev[v].append(u)
        return tuple(tuple(sorted(r)) for r in rev)

    def num_edges(self) -> int:
        return sum(len(row) for row in self.adj)


@dataclass(frozen=True)
class CycleFactor:
    """A cycle-factor: a permutation sigma whose arcs all lie in the graph.

    ``cycles`` is the cycle decomposition of sigma; loops count as
    1-cycles. Each cycle starts at its smallest vertex and cycles are
    sorted by that vertex, so equal factors compare equal.
    """

    sigma: tuple[int, ...]
    cycles: tuple[tuple[int, ...], ...]

    @classmethod
    def from_sigma(cls, sigma) -> "CycleFactor":
        sigma = tuple(sigma)
        n = len(sigma)
        if sorted(sigma) != list(range(n)):
            raise BadParameters("sigma is not a permutation")
        seen = [False] * n
        cycles = []
        for start in range(n):
            if seen[start]:
                continue
            cyc = []
            v = start
            while not seen[v]:
                seen[v] = True
                cyc.append(v)
                v = sigma[v]
            cycles.append(tuple(cyc))
        return cls(sigma, tuple(cycles))

    @property
    def num_cycles(self) -> int:
        return len(self.cycles)

    def is_factor_of(self, g: RegularDigraph) -> bool:
        return len(self.sigma) == g.n and all(
            g.has_edge(i, v) for i, v in enumerate(self.sigma)
        )


@dataclass(frozen=True)
class Verdict:
    """Outcome of a validation check; carries the first violation found."""

    ok: bool
    reason: str = ""
    error: Exception | None = None

    def __bool__(self) -> bool:
        return self.ok


def _verdict(err: GraphError) -> Verdict:
    return Verdict(False, str(err), err)


def validate_digraph(g: RegularDigraph) -> Verdict:
    """Check all RegularDigraph invariants; report the first violation."""
    if not (1 <= g.d <= g.n):
        return _verdict(BadParameters(f"need 1 <= d <= n, got d={g.d}, n={g.n}"))
    if len(g.out_adj) != g.n:
        return _verdict(BadParameters("adjacency row count != n"))
    in_deg = [0] * g.n
    for u, row in enumerate(g.out_adj):
        if len(row) != g.d:
            return _verdict(DegreeMismatch(u, len(row), g.d, kind="out"))
        prev = -1
        for v in row:
            if not 0 <= v < g.n:
                return _verdict(IndexOutOfRange(v, g.n))
            if v == prev:
                return _verdict(DuplicateEdge(u, v))
            prev = v
            in_deg[v] += 1
    for v, deg in enumerate(in_deg):
        if deg != g.d:
            return _verdict(DegreeMismatch(v, deg, g.d, kind="in"))
    return Verdict(True)


def validate_undirected(g: UndirectedRegularGraph) -> Verdict:
    """Check all UndirectedRegularGraph invariants (simple, regular, symmetric)."""
    if not (1 <= g.d <= g.n):
        return _verdict(BadParameters(f"need 1 <= d <= n, got d={g.d}, n={g.n}"))
    if len(g.adj) != g.n:
        return _verdict(BadParameters("adjacency row count != n"))
    neigh_sets = []
    for u, row in enumerate(g.adj):
        if len(row) != g.d:
            return _verdict(DegreeMismatch(u, len(row), g.d, kind="degree"))
        prev = -1
        for v in row:
            if not 0 <= v < g.n:
                return _verdict(IndexOutOfRange(v, g.n))
            if v == u:
                return _verdict(LoopNotAllowed(u))
            if v == prev:
                return _verdict(DuplicateEdge(u, v))
            prev = v
        neigh_sets.append(set(row))
    for u in range(g.n):
        for v in g.adj[u]:
            if u not in neigh_sets[v]:
                return _verdict(AsymmetricEdge(u, v))
    return Verdict(True)


def require_valid(g) -> None:
    """Raise the first invariant violation of g, if any."""
    if isinstance(g, RegularDigraph):
        v = validate_digraph(g)
    elif isinstance(g, UndirectedRegularGraph):
        v = validate_undirected(g)
    else:
        raise BadParameters(f"unsupported graph type {type(g).__name__}")
    if not v.ok:
        raise v.error


def to_bipartite(g: RegularDigraph) -> BipartiteGraph:
    """Build the auxiliary bipartite graph whose perfect matchings are the
    cycle-factors of g: U-side vertex u connects to V-side vertex v exactly
    when (u, v) is an arc of g."""
    require_valid(g)
    return BipartiteGraph(g.n, g.d, g.out_adj)


def double_undirected(g: UndirectedRegularGraph) -> RegularDigraph:
    """Direct every edge of g in both directions. The result is d-regular
    and loop-free; every arc's reverse is present."""
    require_valid(g)
    return RegularDigraph(g.n, g.d, g.adj)


def _permutation_digraph(perms: list[list[int]], n: int) -> RegularDigraph:
    out = [sorted(p[i] for p in perms) for i in range(n)]
    return RegularDigraph(n, len(perms), tuple(tuple(row) for row in out))


def _latin_square_digraph(n: int, d: int, rng: random.Random) -> RegularDigraph:
    # Columns of a randomly relabelled cyclic Latin square: d permutations
    # that pairwise disagree everywhere, by distinct offsets.
    p = list(range(n))
    q = list(range(n))
    rng.shuffle(p)
    rng.shuffle(q)
    offsets = rng.sample(range(n), d)
    perms = [[p[(q[i] + c) % n] for i in range(n)] for c in offsets]
    return _permutation_digraph(perms, n)


def gen_random_regular_digraph(
    n: int,
    d: int,
    seed: int,
    allow_loops: bool = True,
    allow_digons: bool = True,
) -> RegularDigraph:
    """Random d-regular digraph as a union of d random permutations.

    Whole d-tuples of permutations are rejection-sampled until no two
    permutations agree at any index (so no parallel edges), which makes the
    output exactly uniform over pairwise-disagreeing tuples. With
    ``allow_loops=False`` fixed points are also rejected; with
    ``allow_digons=False`` directed 2-cycles are rejected. Deterministic
    given seed. Tuple acceptance decays like exp(-d(d-1)/2), so attempts
    are batched through numpy and, once the retry budget is spent, the
    unconstrained case falls back to a random Latin-square construction.
    """
    import numpy as np

    if not 1 <= d <= n:
        raise BadParameters(f"need 1 <= d <= n, got d={d}, n={n}")
    rng = np.random.Generator(np.random.PCG64(seed))
    identity = np.arange(n)
    tried = 0
    while tried < _RETRY_LIMIT:
        batch = min(256, _RETRY_LIMIT - tried)
        tried += batch
        perms = np.argsort(rng.random((batch, d, n)), axis=2)
        ok = np.ones(batch, dtype=bool)
        if not allow_loops:
            ok &= ~(perms == identity).any(axis=(1, 2))
        for a in range(d):
            for b in range(a + 1, d):
                ok &= ~(perms[:, a, :] == perms[:, b, :]).any(axis=1)
        if not allow_digons:
            invs = np.argsort(perms, axis=2)
            for a in range(d):
                for b in range(d):
                    hits = (perms[:, a, :] == invs[:, b, :]) & (perms[:, a, :] != identity)
                    ok &= ~hits.any(axis=1)
        idx = np.flatnonzero(ok)
        if idx.size:
            chosen = perms[idx[0]]
            return _permutation_digraph([list(map(int, p)) for p in chosen], n)
    if allow_loops and allow_digons:
        return _latin_square_digraph(n, d, random.Random(seed))
    raise RetryLimitExceeded(
        f"could not sample (n={n}, d={d}) with the requested loop/digon constraints"
    )


def gen_family(kind: str, n: int, d: int):
    """Named extremal test families.

    complete_loops (directed): disjoint union of n/d complete digraphs on d
    vertices, each with a loop at every vertex. clique_union (undirected):
    n/(d+1) disjoint cliques on d+1 vertices. cycle (undirected): C_n,
    requires d=2. complete_bipartite_like (undirected): disjoint union of
    n/(2d) copies of K_{d,d}.
    """
    if kind == "complete_loops":
        if d < 1 or n % d != 0:
            raise BadParameters(f"complete_loops needs d | n, got n={n}, d={d}")
        out = []
        for i in range(n):
            base = (i // d) * d
            out.append(tuple(range(base, base + d)))
        return RegularDigraph(n, d, tuple(out))
    if kind == "clique_union":
        if n % (d + 1) != 0:
            raise BadParameters(f"clique_union needs (d+1) | n, got n={n}, d={d}")
        adj = []
        for i in range(n):
            base = (i // (d + 1)) * (d + 1)
            adj.append(tuple(v for v in range(base, base + d + 1) if v != i))
        return UndirectedRegularGraph(n, d, tuple(adj))
    if kind == "cycle":
        if d != 2 or n < 3:
            raise BadParameters(f"cycle needs d=2 and n >= 3, got n={n}, d={d}")
        adj = [tuple(sorted(((i - 1) % n, (i + 1) % n))) for i in range(n)]
        return UndirectedRegularGraph(n, 2, tuple(adj))
    if kind == "complete_bipartite_like":
        if d < 1 or n % (2 * d) != 0:
            raise BadParameters(
                f"complete_bipartite_like needs 2d | n, got n={n}, d={d}"
            )
        adj = []
        for i in range(n):
            block = i // (2 * d)
            base = block * 2 * d
            side = (i - base) // d
            other = base + (1 - side) * d
            adj.append(tuple(range(other, other + d)))
        return UndirectedRegularGraph(n, d, tuple(adj))
    raise BadParameters(f"unknown family kind {kind!r}")


def graph_to_text(g) -> str:
    """Serialize a graph to the canonical text format."""
    if isinstance(g, RegularDigraph):
        header = f"digraph {g.n} {g.d}"
        rows = g.out_adj
    elif isinstance(g, UndirectedRegularGraph):
        header = f"graph {g.n} {g.d}"
        rows = g.adj
    else:
        raise BadParameters(f"unsupported graph type {type(g).__name__}")
    lines = [header]
    lines.extend(" ".join(str(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def write_graph(g, path) -> None:
    Path(path).write_text(graph_to_text(g), encoding="utf-8")


def parse_graph(text: str):
    """Parse the text format; strict about counts, duplicates, and symmetry."""
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        lines.append((lineno, stripped))
    if not lines:
        raise ParseError(1, "empty file")
    head_no, head = lines[0]
    parts = head.split()
    if len(parts) != 3 or parts[0] not in ("digraph", "graph"):
        raise ParseError(head_no, f"bad header {head!r}")
    try:
        n, d = int(parts[1]), int(parts[2])
    except ValueError:
        raise ParseError(head_no, f"non-integer header fields in {head!r}") from None
    if len(lines) - 1 != n:
        raise ParseError(head_no, f"expected {n} adjacency lines, found {len(lines) - 1}")
    rows = []
    for lineno, line in lines[1:]:
        try:
            row = [int(tok) for tok in line.split()]
        except ValueError:
            raise ParseError(lineno, f"non-integer vertex in {line!r}") from None
        if len(row) != d:
            raise ParseError(lineno, f"expected {d} neighbours, found {len(row)}")
        rows.append(row)
    if parts[0] == "digraph":
        g = RegularDigraph.from_lists(n, d, rows)
        v = validate_digraph(g)
    else:
        g = UndirectedRegularGraph.from_lists(n, d, rows)
        v = validate_undirected(g)
    if not v.ok:
        raise FormatMismatch(v.reason)
    return g


def read_graph(path):
    return parse_graph(Path(path).read_text(encoding="utf-8"))
