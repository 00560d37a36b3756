"""The Hadamard-game decoder.

The game state stays inside span{|y>^{(x)n} : y in F_2^k}, so it is carried
as n = 2^k amplitudes. After the players' phase flips, Hadamards and the XOR
of their answers, the outcome z has probability |<alpha, chi_z>|^2 / n where
chi_z(y) = (-1)^{<y,z>}; all n of these come from one Walsh-Hadamard transform.

Messages are integers in [0, n) with bit j holding x_j, matching the
coordinate indexing of ``codes.HadamardCode``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .codes import HadamardCode, encode
from .noise import RngStream
from .qsim import CPARITY, DISCARD, H, MEASURE, Circuit, run
from .shallow import emit_conditional_phase_flip, emit_ghz

NORM_TOL = 1e-10


def _bits_of(x: int, k: int) -> np.ndarray:
    return (x >> np.arange(k)) & 1


def message_index(x, k: int) -> int:
    """Accept an integer message or a length-k bit vector."""
    if isinstance(x, (int, np.integer)):
        if not 0 <= int(x) < 1 << k:
            raise ValueError("message out of range")
        return int(x)
    bits = np.asarray(x, dtype=np.int64).reshape(-1)
    if bits.shape[0] != k:
        raise ValueError(f"message must have {k} bits")
    return int(bits @ (1 << np.arange(k)))


def _received(c, k: int | None = None) -> np.ndarray:
    c = np.asarray(c, dtype=np.int64).reshape(-1) & 1
    n = c.shape[0]
    if n < 2 or n & (n - 1):
        raise ValueError("received word length must be a power of two >= 2")
    if k is not None and n != 1 << k:
        raise ValueError(f"received word must have length {1 << k}")
    return c


def codeword(x, k: int) -> np.ndarray:
    return encode(HadamardCode(k), _bits_of(message_index(x, k), k))


@dataclass
class StructuredGameState:
    k: int
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if a.shape[0] != 1 << self.k:
            raise ValueError(f"need {1 << self.k} amplitudes")
        if abs(np.vdot(a, a).real - 1.0) > NORM_TOL:
            raise ValueError("amplitudes are not normalized")
        self.amplitudes = a

    @property
    def n(self) -> int:
        return 1 << self.k

    @classmethod
    def uniform(cls, k: int) -> StructuredGameState:
        n = 1 << k
        return cls(k, np.full(n, 1 / math.sqrt(n), dtype=np.complex128))


def apply_phases(state: StructuredGameState, c) -> StructuredGameState:
    c = _received(c, state.k)
    return StructuredGameState(state.k, state.amplitudes * (1 - 2 * c))


def fwht(a) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform: out[z] = sum_y a[y] (-1)^{popcount(y & z)}."""
    out = np.array(a, copy=True)
    n = out.shape[0]
    if n & (n - 1):
        raise ValueError("length must be a power of two")
    h = 1
    while h < n:
        v = out.reshape(-1, 2, h)
        lo = v[:, 0, :].copy()
        v[:, 0, :] += v[:, 1, :]
        v[:, 1, :] = lo - v[:, 1, :]
        h *= 2
    return out


def outcome_distribution(state: StructuredGameState) -> np.ndarray:
    spectrum = fwht(state.amplitudes)
    return np.abs(spectrum) ** 2 / state.n


def distribution_for_word(c) -> np.ndarray:
    c = _received(c)
    k = c.shape[0].bit_length() - 1
    return outcome_distribution(apply_phases(StructuredGameState.uniform(k), c))


def success_probability(c, x) -> float:
    """(1 - 2 d(c, H(x)) / n)^2."""
    c = _received(c)
    n = c.shape[0]
    k = n.bit_length() - 1
    d = int(np.count_nonzero(c != codeword(x, k)))
    return (1 - 2 * d / n) ** 2


def sample_outcomes(c, count: int, rng: RngStream) -> np.ndarray:
    """`count` independent game outcomes for received word c."""
    cdf = np.cumsum(distribution_for_word(c))
    u = rng.random(count) * cdf[-1]
    return np.minimum(np.searchsorted(cdf, u, side="right"), cdf.shape[0] - 1)


def decode_once(c, rng: RngStream) -> int:
    return int(sample_outcomes(c, 1, rng)[0])


def list_size(eps: float, C: float = 3.0) -> int:
    """ceil(C eps^-2 ln(1/eps))."""
    return math.ceil(C * eps ** -2 * math.log(1 / eps))


def dedup(samples) -> list[int]:
    seen: dict[int, None] = {}
    for s in samples:
        seen.setdefault(int(s), None)
    return list(seen)


def list_decode(c, eps: float, C: float = 3.0, rng: RngStream | None = None,
                max_list: int | None = None) -> list[int]:
    """Distinct outcomes of ceil(C eps^-2 ln(1/eps)) independent games, first occurrence order.

    `max_list` truncates the deduplicated list; None keeps all of it.
    """
    c = _received(c)
    n = c.shape[0]
    # n = 2 has an empty range otherwise
    if not min(1 / math.sqrt(n), 0.5) - 1e-12 <= eps <= 0.5:
        raise ValueError("eps must lie in [1/sqrt(n), 1/2]")
    if rng is None:
        raise ValueError("list_decode needs an RngStream")
    out = dedup(sample_outcomes(c, list_size(eps, C), rng))
    return out if max_list is None else out[:max_list]


def build_full_gate_pipeline(k: int, c) -> Circuit:
    """Gate-level game: shared state, phase flips, Hadamards, measurement, XOR.

    Player y owns qubits ``p{y}.q{j}``; the shared state factorizes into k
    GHZ states over bit position j. The answer lands in classical bits z0..z{k-1}.
    Players act one after another (barriers) so ancillas are never live together.
    """
    if k != 2:
        raise ValueError("the gate-level pipeline is built for k = 2 only")
    c = _received(c, k)
    n = 1 << k
    reg = [[f"p{y}.q{j}" for j in range(k)] for y in range(n)]
    circ = Circuit()
    for j in range(k):
        emit_ghz(circ, [reg[y][j] for y in range(n)], f"share{j}")
    for y in range(n):
        circ.barrier()
        emit_conditional_phase_flip(circ, reg[y], _bits_of(y, k).tolist(), int(c[y]),
                                    f"p{y}.flip")
    circ.barrier()
    for y in range(n):
        for j in range(k):
            q = reg[y][j]
            circ.append(H(q))
            circ.append(MEASURE(q, f"p{y}.b{j}"))
            circ.append(DISCARD(q))
    for j in range(k):
        circ.append(CPARITY([f"p{y}.b{j}" for y in range(n)], f"z{j}"))
    return circ


def run_pipeline_shots(circ: Circuit, k: int, shots: int, rng: RngStream) -> np.ndarray:
    """Outcome counts over `shots` runs of the gate-level pipeline."""
    counts = np.zeros(1 << k, dtype=np.int64)
    for s in range(shots):
        st = run(circ, rng=rng.child(s))
        counts[sum(st.cbits[f"z{j}"] << j for j in range(k))] += 1
    return counts
