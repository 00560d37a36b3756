"""Dense linear algebra over a prime field F_p.

Values are stored as int64 numpy arrays reduced into [0, p); the modulus
lives on the container. Containers are immutable after construction.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

MAX_MODULUS = 1 << 16


class EnumerationLimitError(ValueError):
    """Raised when a brute-force enumeration would exceed its budget."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def check_modulus(p: int) -> int:
    p = int(p)
    if p > MAX_MODULUS or not is_prime(p):
        raise ValueError(f"modulus must be a prime <= 2^16, got {p}")
    return p


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=np.int64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FpVector:
    p: int
    entries: np.ndarray

    def __post_init__(self):
        check_modulus(self.p)
        a = np.asarray(self.entries, dtype=np.int64).reshape(-1)
        object.__setattr__(self, "entries", _frozen(a % self.p))

    def __len__(self) -> int:
        return self.entries.shape[0]

    def __iter__(self):
        return iter(self.entries.tolist())

    def __getitem__(self, i):
        return self.entries[i]

    def __eq__(self, other) -> bool:
        return (isinstance(other, FpVector) and self.p == other.p
                and np.array_equal(self.entries, other.entries))

    def __hash__(self) -> int:
        return hash((self.p, tuple(self.entries.tolist())))

    def __repr__(self) -> str:
        return f"FpVector(p={self.p}, {self.entries.tolist()})"


@dataclass(frozen=True, eq=False)
class FpMatrix:
    """k x n matrix over F_p, row-major."""

    p: int
    entries: np.ndarray

    def __post_init__(self):
        check_modulus(self.p)
        a = np.asarray(self.entries, dtype=np.int64)
        if a.ndim != 2:
            raise ValueError("matrix entries must be two-dimensional")
        object.__setattr__(self, "entries", _frozen(a % self.p))

    @classmethod
    def zeros(cls, p: int, rows: int, cols: int) -> FpMatrix:
        return cls(p, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, p: int, size: int) -> FpMatrix:
        return cls(p, np.eye(size, dtype=np.int64))

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def transpose(self) -> FpMatrix:
        return FpMatrix(self.p, self.entries.T)

    def apply(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=np.int64)
        if y.shape[-1] != self.cols:
            raise ValueError("dimension mismatch")
        return (y @ self.entries.T) % self.p

    def __eq__(self, other) -> bool:
        return (isinstance(other, FpMatrix) and self.p == other.p
                and np.array_equal(self.entries, other.entries))

    def __hash__(self) -> int:
        return hash((self.p, self.entries.shape, self.entries.tobytes()))

    def __repr__(self) -> str:
        return f"FpMatrix(p={self.p}, {self.entries.tolist()})"


def row_reduce(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of `a` over F_p and its pivot columns.

    Pivot rule: columns scanned left to right, and within a column the first
    nonzero row at or below the current pivot row is taken.
    """
    a = np.array(a, dtype=np.int64, copy=True) % p
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        a[r] = (a[r] * pow(int(a[r, c]), -1, p)) % p
        factors = a[:, c].copy()
        factors[r] = 0
        a = (a - np.outer(factors, a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rank_array(a: np.ndarray, p: int) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return len(row_reduce(a, p)[1])


def rank(m: FpMatrix) -> int:
    return rank_array(m.entries, m.p)


def restrict_columns(m: FpMatrix, cols: Iterable[int]) -> FpMatrix:
    """Submatrix on the given (0-based) columns, in ascending order."""
    idx = sorted({int(c) for c in cols})
    if idx and (idx[0] < 0 or idx[-1] >= m.cols):
        raise IndexError(f"column index out of range for {m.cols} columns")
    return FpMatrix(m.p, m.entries[:, idx].reshape(m.rows, len(idx)))


def _as_entries(v, p: int) -> np.ndarray:
    if isinstance(v, FpVector):
        if v.p != p:
            raise ValueError("modulus mismatch")
        return v.entries
    return np.asarray(v, dtype=np.int64).reshape(-1) % p


def in_affine_image(m: FpMatrix, v, w) -> bool:
    """True iff some y satisfies m y + v = w."""
    v = _as_entries(v, m.p)
    w = _as_entries(w, m.p)
    if v.shape[0] != m.rows or w.shape[0] != m.rows:
        raise ValueError("dimension mismatch")
    rhs = (w - v) % m.p
    aug = np.concatenate([m.entries, rhs[:, None]], axis=1)
    return rank_array(m.entries, m.p) == rank_array(aug, m.p)


def all_vectors(p: int, n: int) -> np.ndarray:
    """Every vector of F_p^n as rows; row i has digit j of i (base p) at column j."""
    count = p ** n
    idx = np.arange(count, dtype=np.int64)
    out = np.empty((count, n), dtype=np.int64)
    for j in range(n):
        out[:, j] = idx % p
        idx = idx // p
    return out


def index_of(x, p: int) -> int:
    """Inverse of all_vectors: little-endian base-p value of x."""
    return int(sum(int(v) * p ** j for j, v in enumerate(x)))
