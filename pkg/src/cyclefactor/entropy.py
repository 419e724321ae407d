"""Entropy primitives and the checkable entropy lemmas.

Shannon and binary entropy (bits), the two-variable chain rule, the
skew bound relating entropy loss to the largest point probability, and
the exhaustive reveal audit: going through the vertices in every possible
order, the number of still-available out-neighbours of a vertex is
distributed exactly uniformly on {1, ..., d}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

from .errors import InvalidDistribution, OutOfRange, SizeLimitExceeded
from .exact import ENUMERATION_MAX_COUNT, entropy_loss, iter_factor_sigmas, permanent
from .graphs import RegularDigraph, require_valid, to_bipartite

__all__ = [
    "REVEAL_MAX_N",
    "SUM_TOLERANCE",
    "SkewCheck",
    "ChainRuleCheck",
    "RevealAuditReport",
    "shannon_entropy",
    "binary_entropy",
    "check_skew_lemma",
    "chain_rule_check",
    "reveal_audit",
]

REVEAL_MAX_N = 6
SUM_TOLERANCE = 1e-12
_SLACK = 1e-9


def _validate(probs) -> tuple[float, ...]:
    probs = tuple(float(p) for p in probs)
    if not probs:
        raise InvalidDistribution("empty distribution")
    if any(p < 0 for p in probs):
        raise InvalidDistribution("negative probability")
    total = sum(probs)
    if abs(total - 1.0) > SUM_TOLERANCE:
        raise InvalidDistribution(f"probabilities sum to {total}, not 1")
    return probs


def shannon_entropy(probs) -> float:
    """Base-2 entropy of a finite distribution; zero entries contribute 0."""
    probs = _validate(probs)
    return -sum(p * math.log2(p) for p in probs if p > 0.0)


def binary_entropy(p: float) -> float:
    """Entropy of a Bernoulli(p) variable, in bits."""
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"p must lie in [0, 1], got {p}")
    return shannon_entropy((p, 1.0 - p))


@dataclass(frozen=True)
class SkewCheck:
    """max_p <= 2/s + ell, where ell = log2(s) - H(X)."""

    max_p: float
    ell: float
    bound: float
    holds: bool


def check_skew_lemma(probs) -> SkewCheck:
    """Check the entropy-skew bound for one distribution.

    With support size s and entropy deficit ell = log2(s) - H(X), no point
    probability may exceed 2/s + ell (up to float slack).
    """
    probs = _validate(probs)
    s = len(probs)
    ell = math.log2(s) - shannon_entropy(probs)
    max_p = max(probs)
    bound = 2.0 / s + ell
    return SkewCheck(max_p, ell, bound, max_p <= bound + _SLACK)


@dataclass(frozen=True)
class ChainRuleCheck:
    """H(X, Y) against H(X) + H(Y | X) for a two-variable joint law."""

    joint_entropy: float
    marginal_entropy: float
    conditional_entropy: float
    gap: float
    holds: bool


def chain_rule_check(joint) -> ChainRuleCheck:
    """Verify the chain rule on a joint probability matrix.

    ``joint[x][y]`` is P(X=x, Y=y); both decompositions must agree to
    within 1e-9.
    """
    rows = [tuple(float(p) for p in row) for row in joint]
    if not rows or any(len(row) != len(rows[0]) for row in rows):
        raise InvalidDistribution("joint matrix must be rectangular and non-empty")
    flat = [p for row in rows for p in row]
    _validate(flat)
    h_joint = -sum(p * math.log2(p) for p in flat if p > 0.0)
    row_sums = [sum(row) for row in rows]
    h_x = -sum(p * math.log2(p) for p in row_sums if p > 0.0)
    h_y_given_x = 0.0
    for px, row in zip(row_sums, rows):
        if px <= 0.0:
            continue
        h_y_given_x += px * -sum(
            (p / px) * math.log2(p / px) for p in row if p > 0.0
        )
    gap = abs(h_joint - h_x - h_y_given_x)
    return ChainRuleCheck(h_joint, h_x, h_y_given_x, gap, gap <= _SLACK)


@dataclass(frozen=True)
class RevealAuditReport:
    """Exhaustive audit of the reveal process over all vertex orders.

    For every vertex i and factor sigma', the count of out-neighbours of i
    still unused when i comes up is tallied over all n! reveal orders; the
    tally must be exactly n!/d for every value in {1, ..., d}. The
    order-averaged entropy deficit aggregates to the instance's total
    entropy loss.
    """

    n: int
    d: int
    uniform: bool
    tally_failures: tuple[str, ...]
    aggregated_loss: float
    direct_loss: float

    @property
    def loss_gap(self) -> float:
        return abs(self.aggregated_loss - self.direct_loss)


def reveal_audit(g: RegularDigraph) -> RevealAuditReport:
    """Run the exhaustive reveal audit on a small digraph (n <= 6)."""
    require_valid(g)
    n, d = g.n, g.d
    if n > REVEAL_MAX_N:
        raise SizeLimitExceeded(f"reveal audit limited to n <= {REVEAL_MAX_N}, got {n}")
    count = permanent(to_bipartite(g))
    if count > ENUMERATION_MAX_COUNT:
        raise SizeLimitExceeded("too many cycle-factors to audit")
    factors = list(iter_factor_sigmas(g))
    out_masks = [sum(1 << v for v in row) for row in g.out_adj]
    n_fact = math.factorial(n)

    # tallies[fi][i][s - 1] over all reveal orders
    tallies = [[[0] * d for _ in range(n)] for _ in factors]
    ell_total = 0.0
    cond_cache: dict[tuple[int, tuple[int, ...], int], float] = {}

    def conditional_entropy(i: int, prefix: tuple[int, ...], sigma_p) -> float:
        # Entropy of sigma(i) given sigma agrees with sigma_p on prefix.
        pinned = tuple(sigma_p[v] for v in prefix)
        key = (i, prefix, pinned)
        cached = cond_cache.get(key)
        if cached is not None:
            return cached
        tally: dict[int, int] = {}
        total = 0
        for sig in factors:
            if all(sig[v] == pv for v, pv in zip(prefix, pinned)):
                tally[sig[i]] = tally.get(sig[i], 0) + 1
                total += 1
        h = -sum(
            (c / total) * math.log2(c / total) for c in tally.values()
        )
        cond_cache[key] = h
        return h

    for tau in permutations(range(n)):
        prefix_sorted: list[tuple[int, ...]] = []
        acc: list[int] = []
        for i in tau:
            prefix_sorted.append(tuple(sorted(acc)))
            acc.append(i)
        for fi, sig in enumerate(factors):
            img = 0
            for pos, i in enumerate(tau):
                s = (out_masks[i] & ~img).bit_count()
                tallies[fi][i][s - 1] += 1
                h = conditional_entropy(i, prefix_sorted[pos], sig)
                ell_total += math.log2(s) - h
                img |= 1 << sig[i]

    expected = n_fact // d
    failures = []
    for fi in range(len(factors)):
        for i in range(n):
            if any(t != expected for t in tallies[fi][i]):
                failures.append(
                    f"vertex {i}, factor {fi}: tally {tallies[fi][i]} != {expected} each"
                )
    aggregated = ell_total / (n_fact * len(factors))
    return RevealAuditReport(
        n=n,
        d=d,
        uniform=not failures,
        tally_failures=tuple(failures),
        aggregated_loss=aggregated,
        direct_loss=entropy_loss(g, count),
    )
