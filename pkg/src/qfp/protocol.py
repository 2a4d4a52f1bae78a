"""End-to-end equality fingerprinting on the split single photon.

Alice and Bob encode their inputs as phase flips on the modes of the
shared photon (angle pi times each codeword bit); the referee recombines
the branches and watches the two output ports.  Equal inputs can never
light the N port, so the referee answers NotEqual exactly when some run
clicks N, and the only possible error is missing an unequal pair.  With
codeword distance t out of m, an unequal pair clicks N with probability
d_H/m >= t/m per run, and k independent runs push the miss probability
below (1 - t/m)^k.

Small-alphabet variants (one symbol, one mode pair, phase 2*pi*x/q) are
included; they are the q-ary analogues of the same interferometer.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .ecc import Code, as_bits, bits_to_hex, encode
from .errors import DimensionError, DomainError
from .modes import (ModeLabel, ModeState, Stage, apply_phases,
                    port_probabilities, prepare_split, recombine)


class Verdict(enum.Enum):
    EQUAL = "Equal"
    NOT_EQUAL = "NotEqual"


@dataclass(frozen=True)
class ProtocolParams:
    """Input length, code, repetition count and target error."""

    n: int
    code: Code
    k: int
    epsilon: float

    def __post_init__(self):
        if self.n != self.code.n:
            raise DimensionError(
                f"n = {self.n} does not match code.n = {self.code.n}"
            )
        if self.k < 1:
            raise DomainError(f"repetition count must be >= 1, got {self.k}")
        if not 0.0 < self.epsilon < 0.5:
            raise DomainError(
                f"epsilon must lie in (0, 1/2), got {self.epsilon!r}"
            )

    @classmethod
    def for_error_target(cls, code: Code, epsilon: float) -> "ProtocolParams":
        """Pick k so the miss probability bound reaches ``epsilon``."""
        k = repetitions_needed(code.t / code.m, epsilon)
        return cls(code.n, code, k, epsilon)


@dataclass(frozen=True)
class RunResult:
    """Outcome of one sampled k-run protocol."""

    verdict: Verdict
    pn_exact: float
    clicks: tuple[ModeLabel, ...]
    seed: int

    @property
    def n_clicks_not_equal(self) -> int:
        return sum(1 for c in self.clicks if c.side == "N")


@dataclass(frozen=True, eq=False)
class BatchResult:
    """Outcome of many independently seeded sampled protocols."""

    pn_exact: float
    k: int
    master_seed: int
    trial_seeds: np.ndarray
    n_clicks: np.ndarray

    @property
    def trials(self) -> int:
        return int(self.n_clicks.shape[0])

    @property
    def n_not_equal(self) -> int:
        return int(np.count_nonzero(self.n_clicks))

    @property
    def not_equal_fraction(self) -> float:
        return self.n_not_equal / self.trials

    def verdicts(self) -> list[Verdict]:
        return [Verdict.NOT_EQUAL if c else Verdict.EQUAL
                for c in self.n_clicks]


def build_branch_state(code: Code, x, y) -> ModeState:
    """Split photon with both codewords imprinted as pi-phase flips."""
    ex = encode(code, x)
    ey = encode(code, y)
    state = prepare_split(code.m)
    state = apply_phases(state, "A", np.pi * ex)
    state = apply_phases(state, "B", np.pi * ey)
    return state


def run_exact(code: Code, x, y) -> float:
    """Exact N-port probability for one run: equals d_H(e(x), e(y)) / m."""
    final = recombine(build_branch_state(code, x, y))
    return port_probabilities(final).p_not_equal


def _port_distribution(code: Code, x, y) -> tuple[np.ndarray, float]:
    final = recombine(build_branch_state(code, x, y))
    stats = port_probabilities(final)
    probs = np.fromiter((p for _, p in stats.per_mode), dtype=np.float64,
                        count=2 * code.m)
    return probs, stats.p_not_equal


def _label_for_index(m: int, idx: int) -> ModeLabel:
    side = "E" if idx < m else "N"
    return ModeLabel(Stage.PORT, side, idx % m + 1)


def run_sampled(params: ProtocolParams, x, y, seed: int) -> RunResult:
    """Sample one k-run protocol; NotEqual iff any run clicks port N.

    Reproducible: the k port outcomes are drawn by inverse CDF over the 2m
    per-mode probabilities from the splitmix64 substream at ``seed``
    (recorded in the result for replay).
    """
    probs, pn = _port_distribution(params.code, x, y)
    idx = kernels.sample_indices(probs, params.k, seed)
    clicks = tuple(_label_for_index(params.code.m, int(i)) for i in idx)
    verdict = (Verdict.NOT_EQUAL if any(c.side == "N" for c in clicks)
               else Verdict.EQUAL)
    return RunResult(verdict, pn, clicks, int(seed) & (2**64 - 1))


def run_batch(params: ProtocolParams, x, y, master_seed: int,
              trials: int) -> BatchResult:
    """Sample ``trials`` independent protocols from one master seed.

    Trial i uses the substream seeded with ``trial_seeds[i]``;
    ``run_sampled`` with that seed reproduces the trial exactly.
    """
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    probs, pn = _port_distribution(params.code, x, y)
    counts = kernels.click_counts(probs, params.k, trials, master_seed)
    seeds = kernels.derive_stream_seeds(master_seed, trials)
    return BatchResult(pn, params.k, int(master_seed) & (2**64 - 1),
                       seeds, counts)


def repetitions_needed(nu: float, epsilon: float) -> int:
    """Smallest k with (1 - nu)^k <= epsilon.

    Computed as ceil(ln eps / ln(1 - nu)) and then checked against the
    defining inequality at k and k - 1, which kills floating-point
    boundary artifacts (the log ratio may land a hair on the wrong side).
    """
    if not 0.0 < nu < 1.0:
        raise DomainError(f"nu must lie in (0, 1), got {nu!r}")
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    base = 1.0 - nu
    k = max(1, math.ceil(math.log(epsilon) / math.log(base)))
    while base**k > epsilon:
        k += 1
    while k > 1 and base ** (k - 1) <= epsilon:
        k -= 1
    return k


def amplified_error_bound(nu: float, k: int) -> float:
    """Worst-case probability of a false Equal after k runs: (1 - nu)^k."""
    if not 0.0 < nu < 1.0:
        raise DomainError(f"nu must lie in (0, 1), got {nu!r}")
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    return (1.0 - nu) ** k


# --- small-alphabet phase protocols ----------------------------------------

def _check_symbol(q: int, value: int, name: str) -> None:
    if not 0 <= value < q:
        raise DomainError(f"{name} = {value} outside 0..{q - 1}")


def phase_protocol_pn(q: int, x: int, y: int) -> float:
    """N-port probability for single-symbol inputs encoded as phases.

    One internal mode; Alice applies phase 2*pi*x/q and Bob 2*pi*y/q.
    Runs the actual interferometer pipeline; the closed form is
    sin^2(pi (x - y) / q) and the two agree to machine precision.
    """
    if q < 2:
        raise DomainError(f"alphabet size q must be >= 2, got {q}")
    _check_symbol(q, x, "x")
    _check_symbol(q, y, "y")
    state = prepare_split(1)
    state = apply_phases(state, "A", [2.0 * np.pi * x / q])
    state = apply_phases(state, "B", [2.0 * np.pi * y / q])
    return port_probabilities(recombine(state)).p_not_equal


def phase_protocol_pn_closed_form(q: int, x: int, y: int) -> float:
    """sin^2(pi (x - y) / q), the analytic value of the pipeline above."""
    if q < 2:
        raise DomainError(f"alphabet size q must be >= 2, got {q}")
    _check_symbol(q, x, "x")
    _check_symbol(q, y, "y")
    return math.sin(math.pi * (x - y) / q) ** 2


def phase_protocol_average_error(q: int) -> float:
    """Referee error averaged over uniform (x, y) pairs.

    The referee answers with the port label, so equal pairs never err and
    an unequal pair errs with probability 1 - pN: the average is
    (1/q^2) sum_{x != y} (1 - pN(x, y)).
    """
    if q < 2:
        raise DomainError(f"alphabet size q must be >= 2, got {q}")
    total = 0.0
    for x in range(q):
        for y in range(q):
            if x != y:
                total += 1.0 - phase_protocol_pn(q, x, y)
    return total / (q * q)


# --- report rows ------------------------------------------------------------

RUN_CSV_FIELDS = ("n", "m", "t", "k", "x_hex", "y_hex", "pN_exact",
                  "verdict", "n_clicks_N", "seed")


def exact_report_row(code: Code, x, y) -> dict:
    """Single CSV/JSON row for an exact (non-sampled) evaluation."""
    pn = run_exact(code, x, y)
    verdict = Verdict.EQUAL if pn == 0.0 else Verdict.NOT_EQUAL
    return {
        "n": code.n, "m": code.m, "t": code.t, "k": None,
        "x_hex": bits_to_hex(x), "y_hex": bits_to_hex(y),
        "pN_exact": pn, "verdict": verdict.value,
        "n_clicks_N": None, "seed": None,
    }


def batch_report_rows(params: ProtocolParams, x, y,
                      batch: BatchResult) -> list[dict]:
    """One CSV/JSON row per sampled trial, replayable from its seed."""
    xh, yh = bits_to_hex(x), bits_to_hex(y)
    rows = []
    for i in range(batch.trials):
        clicks_n = int(batch.n_clicks[i])
        rows.append({
            "n": params.code.n, "m": params.code.m, "t": params.code.t,
            "k": params.k, "x_hex": xh, "y_hex": yh,
            "pN_exact": batch.pn_exact,
            "verdict": (Verdict.NOT_EQUAL if clicks_n else Verdict.EQUAL).value,
            "n_clicks_N": clicks_n, "seed": int(batch.trial_seeds[i]),
        })
    return rows
