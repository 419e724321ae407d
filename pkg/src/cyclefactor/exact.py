"""Exact counting and expectation machinery.

Permanent of the 0/1 biadjacency matrix (Ryser, Gray-code order, exact big
integers), exhaustive cycle-factor enumeration, exact expected cycle count
as a rational, the matching-count bound audits, and the entropy-loss ledger.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import SizeLimitExceeded
from .graphs import BipartiteGraph, CycleFactor, RegularDigraph, require_valid, to_bipartite

__all__ = [
    "PERMANENT_MAX_N",
    "ENUMERATION_MAX_COUNT",
    "BoundCheck",
    "OracleReport",
    "permanent",
    "enumerate_cycle_factors",
    "iter_factor_sigmas",
    "exact_expected_cycles",
    "audit_bounds",
    "entropy_loss",
    "build_report",
]

PERMANENT_MAX_N = 24
ENUMERATION_MAX_COUNT = 10**6


@dataclass(frozen=True)
class BoundCheck:
    """One audited inequality: lhs <= rhs (or >=), with its verdict."""

    name: str
    lhs: float
    rhs: float
    holds: bool


@dataclass(frozen=True)
class OracleReport:
    """Exact quantities for one instance, plus the bound-audit verdicts."""

    n: int
    d: int
    matching_count: int
    expected_cycles: Fraction
    entropy_loss: float
    bound_audit: tuple[BoundCheck, ...]

    @property
    def all_bounds_hold(self) -> bool:
        return all(b.holds for b in self.bound_audit)

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "d": self.d,
                "matching_count": str(self.matching_count),
                "expected_cycles": {
                    "numerator": str(self.expected_cycles.numerator),
                    "denominator": str(self.expected_cycles.denominator),
                    "decimal": f"{float(self.expected_cycles):.15g}",
                },
                "entropy_loss_bits": self.entropy_loss,
                "bound_audit": [
                    {"name": b.name, "lhs": b.lhs, "rhs": b.rhs, "holds": b.holds}
                    for b in self.bound_audit
                ],
            },
            sort_keys=True,
        )


def permanent(bip: BipartiteGraph) -> int:
    """Exact permanent of the 0/1 biadjacency matrix of ``bip``.

    Counts perfect matchings. Ryser inclusion-exclusion over column subsets
    in Gray-code order; exact in arbitrary-precision integers. Cost is
    about 2^n * n, so n is capped at PERMANENT_MAX_N.
    """
    n = bip.n
    if n > PERMANENT_MAX_N:
        raise SizeLimitExceeded(f"permanent limited to n <= {PERMANENT_MAX_N}, got {n}")
    # col_rows[j] = rows adjacent to column j
    col_rows: list[list[int]] = [[] for _ in range(n)]
    for u, row in enumerate(bip.adj):
        for v in row:
            col_rows[v].append(u)
    row_sums = [0] * n
    zero_rows = n
    total = 0
    sign = -1 if n % 2 else 1
    gray = 0
    for k in range(1, 1 << n):
        j = (k & -k).bit_length() - 1
        if gray & (1 << j):
            delta = -1
            gray ^= 1 << j
        else:
            delta = 1
            gray ^= 1 << j
        for i in col_rows[j]:
            old = row_sums[i]
            row_sums[i] = old + delta
            if old == 0:
                zero_rows -= 1
            elif old + delta == 0:
                zero_rows += 1
        if zero_rows:
            continue
        prod = 1
        for s in row_sums:
            prod *= s
        total += prod if gray.bit_count() % 2 == 0 else -prod
    return sign * total


def iter_factor_sigmas(g: RegularDigraph):
    """Yield every permutation sigma with all arcs (i, sigma[i]) in g.

    Recursive matching extension with sorted branching; duplicates are
    impossible by construction. No feasibility guard; callers wanting one
    should check the permanent first.
    """
    n = g.n
    sigma = [0] * n
    out_adj = g.out_adj
    used = 0

    def extend(i: int):
        nonlocal used
        if i == n:
            yield tuple(sigma)
            return
        for v in out_adj[i]:
            bit = 1 << v
            if used & bit:
                continue
            used |= bit
            sigma[i] = v
            yield from extend(i + 1)
            used ^= bit

    yield from extend(0)


def _guard_enumeration(g: RegularDigraph) -> int:
    require_valid(g)
    count = permanent(to_bipartite(g))
    if count > ENUMERATION_MAX_COUNT:
        raise SizeLimitExceeded(
            f"instance has {count} cycle-factors, enumeration capped at {ENUMERATION_MAX_COUNT}"
        )
    return count


def enumerate_cycle_factors(g: RegularDigraph) -> list[CycleFactor]:
    """All cycle-factors of g, complete and duplicate-free."""
    expected = _guard_enumeration(g)
    factors = [CycleFactor.from_sigma(s) for s in iter_factor_sigmas(g)]
    assert len(factors) == expected
    return factors


def _cycle_count(sigma: tuple[int, ...]) -> int:
    n = len(sigma)
    seen = bytearray(n)
    count = 0
    for start in range(n):
        if seen[start]:
            continue
        count += 1
        v = start
        while not seen[v]:
            seen[v] = 1
            v = sigma[v]
    return count


def factor_census(g: RegularDigraph) -> tuple[int, int]:
    """(number of cycle-factors, total cycle count over all of them)."""
    _guard_enumeration(g)
    count = 0
    cycle_sum = 0
    for sigma in iter_factor_sigmas(g):
        count += 1
        cycle_sum += _cycle_count(sigma)
    return count, cycle_sum


def exact_expected_cycles(g: RegularDigraph) -> Fraction:
    """Expected cycle count of a uniformly random cycle-factor, exact."""
    count, cycle_sum = factor_census(g)
    return Fraction(cycle_sum, count)


def entropy_loss(g: RegularDigraph, matching_count: int | None = None) -> float:
    """Gap (in bits) between (n/d)*log2(d!) and log2(#cycle-factors)."""
    require_valid(g)
    if matching_count is None:
        matching_count = permanent(to_bipartite(g))
    if g.n % g.d == 0:
        # Single-log form so the tight case (count == (d!)^(n/d)) cancels
        # to exactly 0.0 instead of a rounding residue.
        cap = math.factorial(g.d) ** (g.n // g.d)
        return math.log2(cap) - math.log2(matching_count)
    return g.n / g.d * math.log2(math.factorial(g.d)) - math.log2(matching_count)


def audit_bounds(
    g: RegularDigraph,
    matching_count: int | None = None,
    expected_cycles: Fraction | None = None,
) -> tuple[BoundCheck, ...]:
    """Audit the matching-count sandwich and the expected-cycle bound.

    (a) count^d <= (d!)^n and (b) count * n^n >= n! * d^n are checked with
    exact integer arithmetic; (c) log2(count) >= n*log2(d/e) and (d)
    E[cycles] <= 4*(n/d)*(log2 d + 1) in floats. Cached inputs may be
    passed to avoid recomputation.
    """
    require_valid(g)
    n, d = g.n, g.d
    if matching_count is None:
        matching_count = permanent(to_bipartite(g))
    if expected_cycles is None:
        expected_cycles = exact_expected_cycles(g)
    log2_count = math.log2(matching_count)
    checks = [
        BoundCheck(
            "matching_upper_factorial",
            d * log2_count,
            n * math.log2(math.factorial(d)),
            matching_count**d <= math.factorial(d) ** n,
        ),
        BoundCheck(
            "matching_lower_factorial",
            log2_count,
            math.log2(math.factorial(n)) + n * math.log2(d) - n * math.log2(n),
            matching_count * n**n >= math.factorial(n) * d**n,
        ),
        BoundCheck(
            "matching_lower_exponential",
            log2_count,
            n * (math.log2(d) - math.log2(math.e)),
            log2_count >= n * (math.log2(d) - math.log2(math.e)) - 1e-9,
        ),
        BoundCheck(
            "expected_cycles_upper",
            float(expected_cycles),
            4.0 * n / d * (math.log2(d) + 1.0),
            float(expected_cycles) <= 4.0 * n / d * (math.log2(d) + 1.0),
        ),
    ]
    return tuple(checks)


def build_report(g: RegularDigraph) -> OracleReport:
    """Full exact report: counts, expectation, entropy loss, bound audit."""
    require_valid(g)
    count, cycle_sum = factor_census(g)
    expected = Fraction(cycle_sum, count)
    return OracleReport(
        n=g.n,
        d=g.d,
        matching_count=count,
        expected_cycles=expected,
        entropy_loss=entropy_loss(g, count),
        bound_audit=audit_bounds(g, count, expected),
    )
