"""MAJORITY from a Hadamard list decoder, by way of IsBal.

IsBal_t(x) = 1 iff |x| = t/2, promised |x| <= t/2. A list decoder with
short lists gives IsBal: hardwire a message m that the decoder rarely
recovers from uniform noise, corrupt H(m) with N_x (each coordinate a uniform
entry of x) and answer 0 iff m is in the list. MAJORITY then follows by
zeroing prefixes of x and OR-ing IsBal votes.

Vote thresholds use exact counting where an approximate-majority circuit
would sit in a constant-depth realization.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .decoder import codeword, list_decode
from .noise import RngStream, sample_nx

IsBalOracle = Callable[[np.ndarray, RngStream], int]


class NoHardMessageError(ValueError):
    """No candidate message is provably hard enough; parameters too small."""


@dataclass(frozen=True)
class IsBalInstance:
    x: tuple[int, ...]

    def __post_init__(self):
        if not self.x or len(self.x) % 2:
            raise ValueError("t must be even and positive")

    @property
    def t(self) -> int:
        return len(self.x)

    @property
    def on_promise(self) -> bool:
        return sum(self.x) <= self.t // 2

    @property
    def answer(self) -> int:
        return int(sum(self.x) == self.t // 2)


@dataclass(frozen=True)
class HardMessage:
    m: int
    rate: float
    stderr: float
    k: int


def default_list_cap(k: int) -> int:
    """Lists of at most 2^k / 4 messages, the size the hard-message averaging needs."""
    return max(1, (1 << k) // 4)


def _effective_eps(eps: float, k: int) -> float:
    return min(0.5, max(eps, 1 / math.sqrt(1 << k)))


def recovery_rate(m: int, k: int, trials: int, rng: RngStream, eps: float = 1 / 8,
                  C: float = 3.0, max_list: int | None = None) -> tuple[float, float]:
    """Monte-Carlo Pr[m in L(H(m) + N_{1/2})] and its standard error."""
    n = 1 << k
    eps = _effective_eps(eps, k)
    word = codeword(m, k)
    noise = rng.integers(0, 2, size=(trials, n))
    hits = sum(m in list_decode(word ^ z, eps, C, rng, max_list) for z in noise)
    rate = hits / trials
    return rate, math.sqrt(rate * (1 - rate) / trials)


def find_hard_message(k: int, trials_per_candidate: int, candidates: int, rng: RngStream,
                      eps: float = 1 / 8, C: float = 3.0,
                      max_list: int | None = None) -> HardMessage:
    """Best of `candidates` uniformly drawn messages by estimated recovery rate.

    Raises NoHardMessageError unless the best estimate is at most
    1/4 + 2 * stderr.
    """
    if candidates < 1:
        raise ValueError("candidates must be at least 1")
    if trials_per_candidate < 1:
        raise ValueError("trials_per_candidate must be at least 1")
    pool = rng.child(0).integers(0, 1 << k, size=candidates)
    best = None
    for i, m in enumerate(pool.tolist()):
        rate, se = recovery_rate(m, k, trials_per_candidate, rng.child(1, i), eps, C, max_list)
        if best is None or rate < best.rate:
            best = HardMessage(m, rate, se, k)
    if best.rate > 0.25 + 2 * best.stderr:
        raise NoHardMessageError(
            f"best recovery estimate {best.rate:.3f} exceeds 1/4 + 2 stderr")
    return best


def isbal_via_list_decoder(x, m: HardMessage | int, k: int, eps: float, rng: RngStream,
                           C: float = 3.0, max_list: int | None = None) -> int:
    """0 iff m is recovered from H(m) + N_x."""
    x = np.asarray(x, dtype=np.int64).reshape(-1)
    t = x.shape[0]
    if t > 1 / (2 * eps) + 1e-12:
        raise ValueError("need t <= 1/(2 eps)")
    msg = m.m if isinstance(m, HardMessage) else int(m)
    word = codeword(msg, k) ^ sample_nx(x, 1 << k, rng)
    found = msg in list_decode(word, _effective_eps(eps, k), C, rng, max_list)
    return 0 if found else 1


class ListDecoderIsBal:
    """isbal_via_list_decoder with its parameters bound; callable as (x, rng)."""

    def __init__(self, m: HardMessage | int, k: int, eps: float, C: float = 3.0,
                 max_list: int | None = None):
        self.m, self.k, self.eps, self.C, self.max_list = m, k, eps, C, max_list

    def __call__(self, x, rng: RngStream) -> int:
        return isbal_via_list_decoder(x, self.m, self.k, self.eps, rng, self.C, self.max_list)


def zero_prefix(x, i: int) -> np.ndarray:
    out = np.array(x, dtype=np.int64, copy=True).reshape(-1)
    out[:i] = 0
    return out


def boosted_vote(isbal: IsBalOracle, x, r: int, rng: RngStream) -> int:
    """Strict-majority vote over r independent oracle calls."""
    ones = sum(isbal(x, rng.child(j)) for j in range(r))
    return int(2 * ones > r)


def majority_via_isbal(x, isbal: IsBalOracle, r: int, rng: RngStream) -> int:
    """OR over i in 0..t of the boosted IsBal vote on x with its first i bits zeroed."""
    x = np.asarray(x, dtype=np.int64).reshape(-1)
    t = x.shape[0]
    if t == 0 or t % 2:
        raise ValueError("t must be even and positive")
    if r < 1:
        raise ValueError("r must be at least 1")
    votes = [boosted_vote(isbal, zero_prefix(x, i), r, rng.child(i)) for i in range(t + 1)]
    return int(any(votes))


def majority(x) -> int:
    """MAJ_t(x) = [|x| >= t/2]."""
    x = np.asarray(x).reshape(-1)
    return int(2 * int(x.sum()) >= x.shape[0])


def promise_inputs(t: int) -> list[tuple[int, ...]]:
    return [x for x in itertools.product((0, 1), repeat=t) if 2 * sum(x) <= t]


def derandomize_by_seed_search(isbal: Callable[[np.ndarray, int], int], t: int,
                               seeds: int) -> int | None:
    """First seed s < seeds with isbal(x, s) correct on every promise input, else None."""
    if t > 8 or t % 2 or t < 2:
        raise ValueError("t must be even and at most 8")
    cases = [(np.array(x), int(2 * sum(x) == t)) for x in promise_inputs(t)]
    for s in range(seeds):
        if all(isbal(x, s) == want for x, want in cases):
            return s
    return None


def seeded_boosted_oracle(isbal: IsBalOracle, r: int, master_seed: int):
    """Fix all randomness by a seed: the same stream is reused for every input."""
    def oracle(x, s: int) -> int:
        return boosted_vote(isbal, x, r, RngStream(master_seed, (s,)))
    return oracle


def nx_error_rate(weight: int, t: int) -> Fraction:
    """Per-coordinate Pr[N_x = 1] for |x| = weight."""
    return Fraction(weight, t)


def coupling_holds(t: int) -> bool:
    """For every |x| < t/2, Pr[N_x = 1] <= 1/2 - 2 delta with delta = 1/(2t)."""
    delta = Fraction(1, 2 * t)
    return all(nx_error_rate(w, t) <= Fraction(1, 2) - 2 * delta
               for w in range((t + 1) // 2))
