"""Random processes: seeded streams, the symmetric channel, index sets, N_x."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gf import check_modulus

_U64 = 1 << 64


class RngStream:
    """Counter-based random stream identified by (seed, stream path).

    Backed by Philox keyed through a SeedSequence, so equal (seed, path)
    pairs give equal sequences and distinct paths give independent streams.
    """

    def __init__(self, seed: int, stream: int | tuple[int, ...] = 0):
        path = (stream,) if isinstance(stream, (int, np.integer)) else tuple(stream)
        for v in (seed, *path):
            if not 0 <= int(v) < _U64:
                raise ValueError("seed and stream ids must be 64-bit unsigned")
        self.seed = int(seed)
        self.path = tuple(int(v) for v in path)
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.path)
        self.gen = np.random.Generator(np.random.Philox(ss))

    def child(self, *ids: int) -> RngStream:
        return RngStream(self.seed, self.path + tuple(ids))

    def random(self, size=None):
        return self.gen.random(size)

    def integers(self, low, high=None, size=None):
        return self.gen.integers(low, high, size=size)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, path={self.path})"


@dataclass(frozen=True)
class SymmetricChannel:
    """Each coordinate kept w.p. rho, else replaced by a uniform field element."""

    rho: float
    p: int
    n: int

    def __post_init__(self):
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [0, 1]")
        check_modulus(self.p)
        if self.n < 0:
            raise ValueError("n must be non-negative")

    @property
    def zero_prob(self) -> float:
        return self.rho + (1.0 - self.rho) / self.p

    @property
    def nonzero_prob(self) -> float:
        return (1.0 - self.rho) / self.p


def _noise_from_uniform(u: np.ndarray, rho: float, p: int) -> np.ndarray:
    # one uniform per coordinate: below rho keeps 0, the rest is rescaled to a symbol
    if rho >= 1.0:
        return np.zeros(u.shape, dtype=np.int64)
    sym = np.floor((u - rho) / (1.0 - rho) * p).astype(np.int64)
    return np.where(u < rho, 0, np.minimum(sym, p - 1))


def sample_noise(ch: SymmetricChannel, rng: RngStream) -> np.ndarray:
    """One draw of Z ~ N_rho(0) in F_p^n."""
    return _noise_from_uniform(rng.random(ch.n), ch.rho, ch.p)


def sample_noise_many(ch: SymmetricChannel, rng: RngStream, count: int) -> np.ndarray:
    return _noise_from_uniform(rng.random((count, ch.n)), ch.rho, ch.p)


def sample_index_set(sigma: float, n: int, rng: RngStream) -> np.ndarray:
    """Each index of range(n) kept independently with probability sigma."""
    if not 0.0 <= sigma <= 1.0:
        raise ValueError("sigma must lie in [0, 1]")
    return np.flatnonzero(rng.random(n) < sigma)


def corrupt_adversarial(y, positions, values) -> np.ndarray:
    """Copy of y with y[positions[i]] = values[i] (0-based positions)."""
    out = np.array(y, dtype=np.int64, copy=True).reshape(-1)
    pos = np.asarray(list(positions), dtype=np.int64).reshape(-1)
    vals = np.asarray(values, dtype=np.int64).reshape(-1)
    if pos.shape != vals.shape:
        raise ValueError("positions and values differ in length")
    if pos.size and (pos.min() < 0 or pos.max() >= out.shape[0]):
        raise IndexError("position out of range")
    out[pos] = vals
    return out


def sample_nx(x, n: int, rng: RngStream) -> np.ndarray:
    """Length-n vector whose coordinates are i.i.d. uniform entries of x."""
    x = np.asarray(x, dtype=np.int64).reshape(-1)
    if x.shape[0] == 0:
        raise ValueError("x must be non-empty")
    return x[rng.integers(0, x.shape[0], size=n)]
