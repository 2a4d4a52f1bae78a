"""Classical simultaneous-message-passing baselines and cost accounting.

Two kinds of results live here.  First, an exhaustive search over every
deterministic SMP strategy on small alphabets (Alice's message map, Bob's
message map, and the referee's decision table), which certifies floors
like "no bit-plus-trit strategy averages below 2/9".  Shared randomness
cannot beat that floor: a shared coin just mixes deterministic strategies,
and the average error of a mixture is the mixture of average errors.
Second, closed-form calculators for the known communication lower bounds
and for the quantum side's qubit accounting, including the break-even
input length where the quantum protocol undercuts the classical bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import kernels
from .ecc import justesen_nu
from .errors import DomainError, ResourceLimitError
from .protocol import Verdict, repetitions_needed

SEARCH_GUARD = 10**8


@dataclass(frozen=True)
class Strategy:
    """One deterministic SMP strategy, fully tabulated."""

    alice_map: tuple[int, ...]
    bob_map: tuple[int, ...]
    referee: tuple[tuple[Verdict, ...], ...]  # [alice_msg][bob_msg]

    def decide(self, x: int, y: int) -> Verdict:
        return self.referee[self.alice_map[x]][self.bob_map[y]]

    def misclassified_pairs(self) -> int:
        q = len(self.alice_map)
        errors = 0
        for x in range(q):
            for y in range(q):
                truth = Verdict.EQUAL if x == y else Verdict.NOT_EQUAL
                if self.decide(x, y) is not truth:
                    errors += 1
        return errors


@dataclass(frozen=True)
class SmpSearchResult:
    """Exact optimum over all deterministic strategies."""

    q: int
    alice_msgs: int
    bob_msgs: int
    average_error: Fraction
    misclassified_pairs: int
    worst_case_error: int  # 0 iff a perfect strategy exists, else 1
    strategies_searched: int
    witness: Strategy


def strategy_space_size(q: int, alice_msgs: int, bob_msgs: int) -> int:
    return (alice_msgs**q) * (bob_msgs**q) * (1 << (alice_msgs * bob_msgs))


def _decode_map(index: int, base: int, q: int) -> tuple[int, ...]:
    out = []
    v = index
    for _ in range(q):
        out.append(v % base)
        v //= base
    return tuple(out)


def _decode_referee(mask: int, alice_msgs: int,
                    bob_msgs: int) -> tuple[tuple[Verdict, ...], ...]:
    table = []
    for i in range(alice_msgs):
        row = []
        for j in range(bob_msgs):
            bit = (mask >> (i * bob_msgs + j)) & 1
            row.append(Verdict.EQUAL if bit else Verdict.NOT_EQUAL)
        table.append(tuple(row))
    return tuple(table)


def brute_force_smp(q: int, alice_msgs: int, bob_msgs: int) -> SmpSearchResult:
    """Minimum average error over every deterministic SMP strategy.

    The error of a strategy is the fraction of the q^2 uniform input pairs
    it misclassifies, so the result is the exact rational
    (misclassified pairs) / q^2.  The witness is re-scored independently
    of the search kernel before being returned.
    """
    if q < 1 or alice_msgs < 1 or bob_msgs < 1:
        raise DomainError("alphabet and message counts must be >= 1")
    space = strategy_space_size(q, alice_msgs, bob_msgs)
    if space > SEARCH_GUARD:
        raise ResourceLimitError(
            f"{space} strategies exceed the enumerability guard "
            f"({SEARCH_GUARD})"
        )
    best, ai, bi, mask = kernels.smp_exhaustive_search(q, alice_msgs,
                                                       bob_msgs)
    witness = Strategy(_decode_map(ai, alice_msgs, q),
                       _decode_map(bi, bob_msgs, q),
                       _decode_referee(mask, alice_msgs, bob_msgs))
    rescored = witness.misclassified_pairs()
    if rescored != best:
        raise AssertionError(
            f"witness re-score {rescored} != search minimum {best}"
        )
    return SmpSearchResult(
        q=q, alice_msgs=alice_msgs, bob_msgs=bob_msgs,
        average_error=Fraction(best, q * q),
        misclassified_pairs=best,
        worst_case_error=0 if best == 0 else 1,
        strategies_searched=space,
        witness=witness,
    )


def shared_randomness_floor(q: int, alice_msgs: int,
                            bob_msgs: int) -> Fraction:
    """Minimum average error even with shared randomness.

    A shared random string selects a deterministic strategy, and averaging
    is linear, so no mixture beats the deterministic minimum.
    """
    return brute_force_smp(q, alice_msgs, bob_msgs).average_error


@dataclass(frozen=True)
class BoundReport:
    """Communication lower bounds for equality on n-bit inputs."""

    n: int
    ab_lower: float            # product of message lengths a*b
    max_lower: float           # max(a, b)
    shared_bit_lower: float    # per-party bits given one shared random bit
    quantum_cost_per_party: float | None = None
    breakeven: bool | None = None


def smp_equality_lower_bounds(n: int) -> BoundReport:
    """Known floors for private-coin SMP equality with error below 1%.

    Message lengths a (Alice) and b (Bob) must satisfy a*b >= n/400, hence
    max(a, b) >= sqrt(n)/20; one shared random bit can save at most a
    factor 2, leaving sqrt(n)/40 per party.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    root = math.sqrt(n)
    return BoundReport(n=n, ab_lower=n / 400.0, max_lower=root / 20.0,
                       shared_bit_lower=root / 40.0)


@dataclass(frozen=True)
class QuantumCost:
    """Qubit accounting for the split-photon protocol with m modes."""

    per_party_per_run: float   # log2(m): each party's channel has m paths
    per_party_total: float     # k runs
    channel_total: float       # joint 2m-dim space per run: 1 + log2(m)


def quantum_cost(m: int, k: int) -> QuantumCost:
    if m < 1 or k < 1:
        raise DomainError("m and k must be >= 1")
    per_run = math.log2(m)
    return QuantumCost(per_run, k * per_run, 1.0 + math.log2(m))


def quantum_cost_rate_half(n: int, k: int) -> QuantumCost:
    """Cost with a rate-1/2 code (m = 2n), so log2(m) = 1 + log2(n)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return quantum_cost(2 * n, k)


def holevo_classical_cap(m: int) -> float:
    """Classical bits extractable from the 2m-dimensional photon state."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    return 1.0 + math.log2(m)


def _quantum_beats_classical(n: int, k: int) -> bool:
    # total quantum qubits per party vs the shared-bit classical floor
    return k * (1.0 + math.log2(n)) <= math.sqrt(n) / 40.0


def breakeven_n(epsilon: float, mu: float = 2.0) -> int:
    """Smallest input length where the quantum protocol undercuts the
    classical shared-bit floor.

    Uses the rate-1/mu distance nu = justesen_nu(mu), the matching
    repetition count k, and searches for the first n with
    k (1 + log2 n) <= sqrt(n)/40 by doubling then integer bisection.
    The crossing is checked on both sides before returning.
    """
    nu = justesen_nu(mu)
    k = repetitions_needed(nu, epsilon)
    hi = 1
    while not _quantum_beats_classical(hi, k):
        hi *= 2
        if hi > 1 << 200:
            raise DomainError(
                "no break-even found below 2^200; parameters out of range"
            )
    lo = max(1, hi // 2)
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if _quantum_beats_classical(mid, k):
            hi = mid
        else:
            lo = mid
    if not _quantum_beats_classical(hi, k):
        raise AssertionError("bisection lost the crossing")
    if hi > 1 and _quantum_beats_classical(hi - 1, k):
        raise AssertionError("bisection overshot the crossing")
    return hi


def full_bound_report(n: int, epsilon: float, mu: float = 2.0) -> BoundReport:
    """Lower bounds plus the quantum side's total cost and break-even flag."""
    base = smp_equality_lower_bounds(n)
    nu = justesen_nu(mu)
    k = repetitions_needed(nu, epsilon)
    cost = k * (1.0 + math.log2(n))
    return BoundReport(n=n, ab_lower=base.ab_lower, max_lower=base.max_lower,
                       shared_bit_lower=base.shared_bit_lower,
                       quantum_cost_per_party=cost,
                       breakeven=cost <= base.shared_bit_lower)
