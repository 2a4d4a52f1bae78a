"""Seeded numeric kernels with a numba fast path and a pure-numpy fallback.

Every randomized routine in this package draws from splitmix64 streams so
that results are reproducible bit for bit across platforms and across the
two execution backends (see :mod:`qfp.backend`).  All real-valued decision
thresholds (cumulative distributions, survival probabilities) are
precomputed once in numpy and handed to the kernels, which then perform
only comparisons and integer arithmetic; this is what makes the numba and
numpy paths exactly interchangeable.

Stream contract
---------------
Output ``i`` (1-based) of the stream seeded with ``s`` is
``finalize(s + i * GOLDEN)`` where ``finalize`` is the standard splitmix64
mix (xorshift 30, multiply, xorshift 27, multiply, xorshift 31) and
``GOLDEN = 0x9E3779B97F4A7C15``.  Uniform deviates take the top 53 bits:
``u = (output >> 11) * 2**-53``, so ``u`` lies in ``[0, 1)``.

Batch routines give trial ``i`` (0-based) a private substream whose seed is
output ``i + 1`` of a master stream.  A single trial is therefore
replayable from its recorded substream seed alone, and trials may run in
any order or in parallel without sharing state.
"""

from __future__ import annotations

import numpy as np

from . import backend
from .backend import njit

_MASK64 = (1 << 64) - 1
_GOLDEN_INT = 0x9E3779B97F4A7C15
_MIX1_INT = 0xBF58476D1CE4E5B9
_MIX2_INT = 0x94D049BB133111EB
_TO_U01 = 2.0**-53

_GOLDEN = np.uint64(_GOLDEN_INT)
_MIX1 = np.uint64(_MIX1_INT)
_MIX2 = np.uint64(_MIX2_INT)
_SH30 = np.uint64(30)
_SH27 = np.uint64(27)
_SH31 = np.uint64(31)
_SH11 = np.uint64(11)

# popcount bit-twiddling masks
_PC1 = np.uint64(0x5555555555555555)
_PC2 = np.uint64(0x3333333333333333)
_PC4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_PCM = np.uint64(0x0101010101010101)
_S1 = np.uint64(1)
_S2 = np.uint64(2)
_S4 = np.uint64(4)
_S56 = np.uint64(56)


# ---------------------------------------------------------------------------
# splitmix64 streams
# ---------------------------------------------------------------------------

def splitmix64_next(state: int) -> tuple[int, int]:
    """One splitmix64 step on plain Python ints (reference implementation)."""
    state = (state + _GOLDEN_INT) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * _MIX1_INT) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2_INT) & _MASK64
    return state, z ^ (z >> 31)


def splitmix64_stream(seed: int, count: int) -> np.ndarray:
    """Outputs 1..count of the splitmix64 stream seeded with ``seed``."""
    s0 = np.uint64(int(seed) & _MASK64)
    steps = np.arange(1, count + 1, dtype=np.uint64)
    s = s0 + steps * _GOLDEN
    z = (s ^ (s >> _SH30)) * _MIX1
    z = (z ^ (z >> _SH27)) * _MIX2
    return z ^ (z >> _SH31)


def derive_stream_seeds(master_seed: int, trials: int) -> np.ndarray:
    """Substream seed for each trial: output ``i + 1`` of the master stream."""
    return splitmix64_stream(master_seed, trials)


def uniforms_from_seed(seed: int, count: int) -> np.ndarray:
    """``count`` uniform deviates in [0, 1) from the stream at ``seed``."""
    return (splitmix64_stream(seed, count) >> _SH11) * _TO_U01


def _advance_u01(states: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # one vectorized stream step for every state, returning uniforms
    states = states + _GOLDEN
    z = (states ^ (states >> _SH30)) * _MIX1
    z = (z ^ (z >> _SH27)) * _MIX2
    z = z ^ (z >> _SH31)
    return states, (z >> _SH11) * _TO_U01


@njit(cache=True)
def _sm_next_nb(state):
    state = state + _GOLDEN
    z = (state ^ (state >> _SH30)) * _MIX1
    z = (z ^ (z >> _SH27)) * _MIX2
    return state, z ^ (z >> _SH31)


@njit(cache=True)
def _bisect_right_nb(arr, v):
    # first index with arr[index] > v (arr sorted ascending)
    lo = 0
    hi = arr.shape[0]
    while lo < hi:
        mid = (lo + hi) // 2
        if v < arr[mid]:
            hi = mid
        else:
            lo = mid + 1
    return lo


# ---------------------------------------------------------------------------
# port-outcome sampling
# ---------------------------------------------------------------------------

def _prepare_distribution(probs: np.ndarray) -> tuple[np.ndarray, int]:
    probs = np.ascontiguousarray(probs, dtype=np.float64)
    if probs.ndim != 1 or probs.shape[0] == 0:
        raise ValueError("probability vector must be non-empty and 1-d")
    positive = np.flatnonzero(probs > 0.0)
    if positive.size == 0:
        raise ValueError("probability vector has no mass")
    return np.cumsum(probs), int(positive[-1])


@njit(cache=True)
def _click_counts_nb(cum, m, k, seeds, last_pos):
    size = cum.shape[0]
    counts = np.zeros(seeds.shape[0], dtype=np.int64)
    for t in range(seeds.shape[0]):
        state = seeds[t]
        c = 0
        for _ in range(k):
            state, z = _sm_next_nb(state)
            u = (z >> _SH11) * _TO_U01
            idx = _bisect_right_nb(cum, u)
            if idx >= size:
                idx = last_pos
            if idx >= m:
                c += 1
        counts[t] = c
    return counts


def _click_counts_np(cum, m, k, seeds, last_pos):
    size = cum.shape[0]
    states = seeds.copy()
    counts = np.zeros(seeds.shape[0], dtype=np.int64)
    for _ in range(k):
        states, u = _advance_u01(states)
        idx = np.searchsorted(cum, u, side="right")
        idx = np.where(idx >= size, last_pos, idx)
        counts += idx >= m
    return counts


def click_counts(probs: np.ndarray, k: int, trials: int,
                 master_seed: int) -> np.ndarray:
    """Per-trial count of outcomes landing in the upper half of ``probs``.

    ``probs`` holds the 2m per-mode probabilities ordered as all equal-port
    modes followed by all not-equal-port modes; an outcome index >= m is an
    N click.  Each trial draws ``k`` independent outcomes by inverse CDF.
    Outcomes with exactly zero probability are structurally unreachable
    (searching for the first cumulative value above ``u`` can never land on
    a zero-mass slot), which keeps one-sided error exact.
    """
    probs = np.asarray(probs, dtype=np.float64)
    if probs.ndim == 1 and probs.shape[0] % 2:
        raise ValueError("per-mode vector must hold 2m port probabilities")
    cum, last_pos = _prepare_distribution(probs)
    m = probs.shape[0] // 2
    seeds = derive_stream_seeds(master_seed, trials)
    if backend.active() == "numba":
        return _click_counts_nb(cum, m, int(k), seeds, last_pos)
    return _click_counts_np(cum, m, int(k), seeds, last_pos)


def sample_indices(probs: np.ndarray, k: int, seed: int) -> np.ndarray:
    """Draw ``k`` outcome indices from one substream (single-trial replay).

    Bit-identical to trial ``i`` of :func:`click_counts` when ``seed`` is
    that trial's substream seed.
    """
    cum, last_pos = _prepare_distribution(probs)
    u = uniforms_from_seed(seed, k)
    idx = np.searchsorted(cum, u, side="right")
    return np.where(idx >= cum.shape[0], last_pos, idx).astype(np.int64)


# ---------------------------------------------------------------------------
# noisy-apparatus Monte Carlo
# ---------------------------------------------------------------------------

def binomial_cdf(n: int, p: float) -> np.ndarray:
    """CDF table P(X <= j) for j = 0..n, Binomial(n, p), built in float64.

    Both backends sample dark-count totals by bisecting this shared table,
    so their draws agree exactly.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if not 0.0 <= p < 1.0:
        raise ValueError("p must lie in [0, 1)")
    pmf = np.empty(n + 1, dtype=np.float64)
    q = 1.0 - p
    pmf[0] = q**n
    for j in range(n):
        pmf[j + 1] = pmf[j] * ((n - j) / (j + 1.0)) * (p / q)
    return np.cumsum(pmf)


@njit(cache=True)
def _noise_verdicts_nb(photon_cdf, p_survive, p_click_n, dark_cdf, k, seeds):
    out = np.zeros(seeds.shape[0], dtype=np.uint8)
    dmax = dark_cdf.shape[0] - 1
    for t in range(seeds.shape[0]):
        state = seeds[t]
        survived = 0
        any_n = False
        for _ in range(k):
            # fixed draw order per run keeps both backends in lockstep
            state, z = _sm_next_nb(state)
            u_photon = (z >> _SH11) * _TO_U01
            state, z = _sm_next_nb(state)
            u_survive = (z >> _SH11) * _TO_U01
            state, z = _sm_next_nb(state)
            u_port = (z >> _SH11) * _TO_U01
            state, z = _sm_next_nb(state)
            u_dark_e = (z >> _SH11) * _TO_U01
            state, z = _sm_next_nb(state)
            u_dark_n = (z >> _SH11) * _TO_U01
            if u_photon >= photon_cdf[1]:
                continue  # multi-photon pulse: dropped, not interfered
            n_e = _bisect_right_nb(dark_cdf, u_dark_e)
            if n_e > dmax:
                n_e = dmax
            n_n = _bisect_right_nb(dark_cdf, u_dark_n)
            if n_n > dmax:
                n_n = dmax
            signal = u_photon >= photon_cdf[0] and u_survive < p_survive
            signal_n = signal and u_port < p_click_n
            tot_e = n_e + (1 if (signal and not signal_n) else 0)
            tot_n = n_n + (1 if signal_n else 0)
            if tot_e + tot_n == 1:
                survived += 1
                if tot_n == 1:
                    any_n = True
        if survived == 0:
            out[t] = 2
        elif any_n:
            out[t] = 1
    return out


def _noise_verdicts_np(photon_cdf, p_survive, p_click_n, dark_cdf, k, seeds):
    states = seeds.copy()
    trials = seeds.shape[0]
    survived = np.zeros(trials, dtype=np.int64)
    any_n = np.zeros(trials, dtype=np.bool_)
    dmax = dark_cdf.shape[0] - 1
    for _ in range(k):
        states, u_photon = _advance_u01(states)
        states, u_survive = _advance_u01(states)
        states, u_port = _advance_u01(states)
        states, u_dark_e = _advance_u01(states)
        states, u_dark_n = _advance_u01(states)
        multi = u_photon >= photon_cdf[1]
        n_e = np.minimum(np.searchsorted(dark_cdf, u_dark_e, side="right"),
                         dmax)
        n_n = np.minimum(np.searchsorted(dark_cdf, u_dark_n, side="right"),
                         dmax)
        signal = (u_photon >= photon_cdf[0]) & (u_survive < p_survive) & ~multi
        signal_n = signal & (u_port < p_click_n)
        tot_e = n_e + (signal & ~signal_n)
        tot_n = n_n + signal_n
        valid = ~multi & (tot_e + tot_n == 1)
        survived += valid
        any_n |= valid & (tot_n == 1)
    return np.where(survived == 0, 2, np.where(any_n, 1, 0)).astype(np.uint8)


def noise_verdicts(p_zero: float, p_one: float, p_survive: float,
                   p_click_n: float, dark_prob: float, dark_slots: int,
                   k: int, trials: int, master_seed: int) -> np.ndarray:
    """Simulate ``trials`` noisy k-run protocols; verdict codes per trial.

    Per run: the source emits 0 / 1 / >=2 photons with probabilities
    (p_zero, p_one, rest); a single photon reaches a detector with
    probability ``p_survive`` and lands on the N detector with probability
    ``p_click_n``; each detector additionally fires on dark counts,
    Binomial(dark_slots, dark_prob).  A run with exactly one detection is
    kept and labeled by its detector; anything else (no detection,
    several detections, or a multi-photon pulse) is dropped.  Verdict per
    trial: 0 = Equal (kept runs, none N), 1 = NotEqual (some kept run N),
    2 = abort (no run kept).
    """
    photon_cdf = np.array([p_zero, p_zero + p_one], dtype=np.float64)
    dark_cdf = binomial_cdf(int(dark_slots), float(dark_prob))
    seeds = derive_stream_seeds(master_seed, trials)
    if backend.active() == "numba":
        return _noise_verdicts_nb(photon_cdf, float(p_survive),
                                  float(p_click_n), dark_cdf, int(k), seeds)
    return _noise_verdicts_np(photon_cdf, float(p_survive),
                              float(p_click_n), dark_cdf, int(k), seeds)


# ---------------------------------------------------------------------------
# GF(2) minimum nonzero codeword weight
# ---------------------------------------------------------------------------

@njit(cache=True)
def _popcount64_nb(x):
    x = x - ((x >> _S1) & _PC1)
    x = (x & _PC2) + ((x >> _S2) & _PC2)
    x = (x + (x >> _S4)) & _PC4
    return np.int64((x * _PCM) >> _S56)


@njit(cache=True)
def _min_weight_nb(rows):
    # Gray-code walk over all nonzero messages: each step XORs one
    # generator row into the running codeword.
    n, words = rows.shape
    cw = np.zeros(words, dtype=np.uint64)
    best = np.int64(64) * words + 1
    total = 1 << n
    for c in range(1, total):
        b = 0
        cc = c
        while cc & 1 == 0:
            cc >>= 1
            b += 1
        w = np.int64(0)
        for j in range(words):
            cw[j] ^= rows[b, j]
            w += _popcount64_nb(cw[j])
        if w < best:
            best = w
    return best


def _pack_rows(generator: np.ndarray) -> np.ndarray:
    n, m = generator.shape
    words = (m + 63) // 64
    padded = np.zeros((n, words * 64), dtype=np.uint8)
    padded[:, :m] = generator
    packed = np.packbits(padded, axis=1, bitorder="little")
    return packed.view("<u8").reshape(n, words)


def _min_weight_np(generator: np.ndarray) -> int:
    n, m = generator.shape
    total = 1 << n
    block = max(1, (1 << 24) // max(m, 1))
    shifts = np.arange(n, dtype=np.uint32)
    best = m + 1
    for start in range(1, total, block):
        stop = min(start + block, total)
        msgs = np.arange(start, stop, dtype=np.uint32)
        bits = ((msgs[:, None] >> shifts) & 1).astype(np.uint8)
        weights = ((bits @ generator) & 1).sum(axis=1)
        best = min(best, int(weights.min()))
    return best


def min_nonzero_weight(generator: np.ndarray) -> int:
    """Minimum Hamming weight over all 2^n - 1 nonzero messages."""
    g = np.ascontiguousarray(generator, dtype=np.uint8)
    if g.ndim != 2:
        raise ValueError("generator must be a 2-d bit matrix")
    n = g.shape[0]
    if n > 24:
        raise ValueError("exhaustive weight scan capped at n = 24 messages")
    if backend.active() == "numba":
        return int(_min_weight_nb(_pack_rows(g)))
    return _min_weight_np(g)


# ---------------------------------------------------------------------------
# exhaustive simultaneous-message-passing strategy search
# ---------------------------------------------------------------------------
#
# Strategy encoding (shared by both backends and by qfp.classical):
#   alice map index ai: digit x in base a  -> message alice sends on input x
#   bob map index bi:   digit y in base b  -> message bob sends on input y
#   referee mask:       bit (i*b + j) set  -> referee answers Equal when
#                       alice sent message i and bob sent message j
# Scan order is ai-major, then bi, then mask ascending; the first strategy
# achieving the minimum is returned, so both backends agree on the witness.

@njit(cache=True)
def _smp_search_nb(q, a, b):
    n_alice = a**q
    n_bob = b**q
    cells = a * b
    n_masks = 1 << cells
    alice_map = np.empty(q, dtype=np.int64)
    bob_map = np.empty(q, dtype=np.int64)
    n_eq = np.empty(cells, dtype=np.int64)
    n_neq = np.empty(cells, dtype=np.int64)
    best = q * q + 1
    best_ai = -1
    best_bi = -1
    best_mask = -1
    for ai in range(n_alice):
        v = ai
        for x in range(q):
            alice_map[x] = v % a
            v //= a
        for bi in range(n_bob):
            v = bi
            for y in range(q):
                bob_map[y] = v % b
                v //= b
            for c in range(cells):
                n_eq[c] = 0
                n_neq[c] = 0
            for x in range(q):
                for y in range(q):
                    cell = alice_map[x] * b + bob_map[y]
                    if x == y:
                        n_eq[cell] += 1
                    else:
                        n_neq[cell] += 1
            for mask in range(n_masks):
                err = 0
                for c in range(cells):
                    if (mask >> c) & 1:
                        err += n_neq[c]  # answered Equal on unequal pairs
                    else:
                        err += n_eq[c]
                if err < best:
                    best = err
                    best_ai = ai
                    best_bi = bi
                    best_mask = mask
    return best, best_ai, best_bi, best_mask


def _smp_search_np(q, a, b):
    cells = a * b
    n_masks = 1 << cells
    mask_block = min(n_masks, 1 << 16)
    shifts = np.arange(cells, dtype=np.int64)
    best = q * q + 1
    best_ai = best_bi = best_mask = -1
    digits_a = np.arange(a**q, dtype=np.int64)
    digits_b = np.arange(b**q, dtype=np.int64)
    for ai in digits_a:
        alice_map = (ai // a ** np.arange(q, dtype=np.int64)) % a
        for bi in digits_b:
            bob_map = (bi // b ** np.arange(q, dtype=np.int64)) % b
            cell = alice_map[:, None] * b + bob_map[None, :]
            eq_cells = np.diagonal(cell)
            n_eq = np.bincount(eq_cells, minlength=cells)
            n_all = np.bincount(cell.ravel(), minlength=cells)
            n_neq = n_all - n_eq
            for start in range(0, n_masks, mask_block):
                masks = np.arange(start, min(start + mask_block, n_masks),
                                  dtype=np.int64)
                bits = (masks[:, None] >> shifts) & 1
                err = bits @ n_neq + (1 - bits) @ n_eq
                local = int(err.min())
                if local < best:
                    best = local
                    best_ai = int(ai)
                    best_bi = int(bi)
                    best_mask = start + int(err.argmin())
    return best, best_ai, best_bi, best_mask


def smp_exhaustive_search(q: int, alice_msgs: int,
                          bob_msgs: int) -> tuple[int, int, int, int]:
    """Scan every deterministic (alice, bob, referee) strategy triple.

    Returns ``(min_misclassified_pairs, alice_index, bob_index,
    referee_mask)`` under the encoding documented above.  Every referee
    table is evaluated; the per-cell pair counts only factor the error sum.
    """
    if alice_msgs * bob_msgs > 62:
        raise ValueError("referee table exceeds the 64-bit mask encoding")
    if backend.active() == "numba":
        best, ai, bi, mask = _smp_search_nb(q, alice_msgs, bob_msgs)
        return int(best), int(ai), int(bi), int(mask)
    return _smp_search_np(q, alice_msgs, bob_msgs)
