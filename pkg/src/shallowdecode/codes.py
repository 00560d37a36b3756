"""Codes E: F_p^k -> F_p^n, the Hadamard code, and brute-force list oracles.

Messages are indexed little-endian: message i has x_j equal to digit j of i
in base p. For the Hadamard code, codeword coordinate y (0..n-1) holds
<x, bits(y)> mod 2, where bit j of the integer y is paired with x_j.
"""
from __future__ import annotations

import json
from typing import Callable

import numpy as np

from .gf import EnumerationLimitError, all_vectors, check_modulus

TABLE_LIMIT = 1 << 20


class Code:
    """A total encoder F_p^k -> F_p^n, table-backed or rule-backed."""

    def __init__(self, p: int, k: int, n: int,
                 table: np.ndarray | None = None,
                 rule: Callable[[np.ndarray], np.ndarray] | None = None):
        self.p = check_modulus(p)
        self.k = int(k)
        self.n = int(n)
        if (table is None) == (rule is None):
            raise ValueError("give exactly one of table or rule")
        self._rule = rule
        self._table = None
        if table is not None:
            t = np.asarray(table, dtype=np.int64) % self.p
            if t.shape != (self.p ** self.k, self.n):
                raise ValueError(f"table must have shape {(self.p ** self.k, self.n)}")
            t.setflags(write=False)
            self._table = t

    @classmethod
    def identity(cls, p: int, n: int) -> Code:
        return cls(p, n, n, rule=lambda xs: xs % p)

    @classmethod
    def random(cls, p: int, k: int, n: int, rng) -> Code:
        gen = getattr(rng, "gen", rng)
        return cls(p, k, n, table=gen.integers(0, p, size=(p ** k, n)))

    @classmethod
    def from_json(cls, doc) -> Code:
        if isinstance(doc, str):
            doc = json.loads(doc)
        return cls(doc["p"], doc["k"], doc["n"], table=np.array(doc["codewords"]))

    def to_json(self) -> dict:
        return {"p": self.p, "k": self.k, "n": self.n,
                "codewords": self.table().tolist()}

    def encode_many(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        if xs.ndim != 2 or xs.shape[1] != self.k:
            raise ValueError(f"messages must have length {self.k}")
        if self._table is not None:
            idx = (xs % self.p) @ (self.p ** np.arange(self.k, dtype=np.int64))
            return self._table[idx]
        return np.asarray(self._rule(xs % self.p), dtype=np.int64) % self.p

    def table(self) -> np.ndarray:
        if self._table is not None:
            return self._table
        if self.p ** self.k > TABLE_LIMIT:
            raise EnumerationLimitError("p^k exceeds 2^20")
        return self.encode_many(all_vectors(self.p, self.k))


class HadamardCode(Code):
    """H(x)[y] = <x, y> over F_2 for y in F_2^k, n = 2^k."""

    def __init__(self, k: int):
        if k < 1:
            raise ValueError("k must be positive")
        n = 1 << k
        ys = np.arange(n, dtype=np.int64)
        self.ybits = ((ys[None, :] >> np.arange(k)[:, None]) & 1).astype(np.int64)
        super().__init__(2, k, n, rule=lambda xs: (xs @ self.ybits) & 1)


def encode(code: Code, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64).reshape(-1)
    if x.shape[0] != code.k:
        raise ValueError(f"message must have length {code.k}")
    return code.encode_many(x[None, :])[0]


def hamming_distance(a, b) -> int:
    a = np.asarray(a).reshape(-1)
    b = np.asarray(b).reshape(-1)
    if a.shape != b.shape:
        raise ValueError("length mismatch")
    return int(np.count_nonzero(a != b))


def brute_force_list(code: Code, y, radius: int) -> set[tuple[int, ...]]:
    """All messages whose codeword lies within `radius` of y."""
    y = np.asarray(y, dtype=np.int64).reshape(-1)
    if y.shape[0] != code.n:
        raise ValueError(f"word must have length {code.n}")
    if code.p ** code.k > TABLE_LIMIT:
        raise EnumerationLimitError("p^k exceeds 2^20")
    msgs = all_vectors(code.p, code.k)
    dist = np.count_nonzero(code.table() != y[None, :], axis=1)
    return {tuple(m) for m in msgs[dist <= radius].tolist()}
