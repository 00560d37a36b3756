"""Multilinear forms over F_p: tensors of maps, bias, analytic and partition rank."""
from __future__ import annotations

import itertools
import math

import numpy as np

from .gf import EnumerationLimitError, all_vectors, check_modulus
from .polymap import Poly, PolyMap

BIAS_LIMIT = 1 << 24
ENTRY_LIMIT = 1 << 24
PRANK_ENTRY_LIMIT = 1 << 12
PRANK_SINGLE_LIMIT = 1 << 20
PRANK_PAIR_LIMIT = 1 << 26
IMAG_TOL = 1e-10


class Tensor:
    """Dense r-tensor T: F_p^{d_1} x ... x F_p^{d_r} -> F_p, r >= 2."""

    __slots__ = ("p", "entries")

    def __init__(self, p: int, entries):
        self.p = check_modulus(p)
        a = np.array(entries, dtype=np.int64, copy=True) % self.p
        if a.ndim < 2:
            raise ValueError("a tensor needs at least two axes")
        a.setflags(write=False)
        self.entries = a

    @property
    def axes(self) -> tuple[int, ...]:
        return self.entries.shape

    @property
    def order(self) -> int:
        return self.entries.ndim

    def __call__(self, *vectors) -> int:
        if len(vectors) != self.order:
            raise ValueError(f"expected {self.order} arguments")
        a = self.entries
        for v in vectors:
            v = np.asarray(v, dtype=np.int64).reshape(-1)
            a = np.tensordot(v, a, axes=(0, 0)) % self.p
        return int(a)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Tensor) and self.p == other.p
                and np.array_equal(self.entries, other.entries))

    def __repr__(self) -> str:
        return f"Tensor(p={self.p}, axes={self.axes})"


def derivative_at_zero(phi: PolyMap, ys) -> np.ndarray:
    """Delta_{y_1} ... Delta_{y_d} phi(0) by inclusion-exclusion over subsets."""
    p = phi.p
    ys = [np.asarray(y, dtype=np.int64).reshape(-1) for y in ys]
    d = len(ys)
    pts, signs = [], []
    for r in range(d + 1):
        for sub in itertools.combinations(range(d), r):
            pts.append(sum((ys[i] for i in sub), np.zeros(phi.n, dtype=np.int64)) % p)
            signs.append(-1 if (d - r) % 2 else 1)
    vals = phi.eval_batch(np.array(pts).reshape(len(pts), phi.n))
    return (np.array(signs) @ vals) % p


def derivative_form(phi: PolyMap, ys, v) -> int:
    """<v, Delta_{y_1} ... Delta_{y_d} phi(0)>, evaluated directly from phi."""
    v = np.asarray(v, dtype=np.int64).reshape(-1)
    return int(v @ derivative_at_zero(phi, ys) % phi.p)


def tensor_from_polymap(phi: PolyMap) -> Tensor:
    """The (d+1)-tensor with axes (n, ..., n, k), d = deg(phi)."""
    d, n, k, p = phi.degree, phi.n, phi.k, phi.p
    if d < 1:
        raise ValueError("map must have degree at least 1")
    if n ** d * k * 2 ** d > ENTRY_LIMIT:
        raise EnumerationLimitError("n^d * k * 2^d exceeds 2^24")
    subsets = [sub for r in range(d + 1) for sub in itertools.combinations(range(d), r)]
    signs = np.array([-1 if (d - len(s)) % 2 else 1 for s in subsets])
    tuples = list(itertools.product(range(n), repeat=d))
    pts = np.zeros((len(tuples), len(subsets), n), dtype=np.int64)
    for t, idx in enumerate(tuples):
        for s, sub in enumerate(subsets):
            for i in sub:
                pts[t, s, idx[i]] += 1
    vals = phi.eval_batch(pts.reshape(-1, n) % p).reshape(len(tuples), len(subsets), k)
    entries = np.einsum("s,tsk->tk", signs, vals) % p
    return Tensor(p, entries.reshape((n,) * d + (k,)))


def _bias_complex(t: Tensor) -> complex:
    p = t.p
    if math.prod(p ** a for a in t.axes) > BIAS_LIMIT:
        raise EnumerationLimitError("input space exceeds 2^24")
    # contract every axis but the last against all of its inputs
    a = t.entries
    for dim in t.axes[:-1]:
        a = np.tensordot(all_vectors(p, dim), a, axes=(1, 0)) % p
        a = np.moveaxis(a, 0, -2) if a.ndim > 2 else a
    forms = a.reshape(-1, t.axes[-1])
    # E_{x_r} omega^{<a, x_r>} factorizes over the coordinates of x_r
    roots = np.exp(2j * np.pi * np.arange(p) / p)
    per_coord = np.array([roots[(c * np.arange(p)) % p].mean() for c in range(p)])
    return complex(np.prod(per_coord[forms], axis=1).mean())


def tensor_bias(t: Tensor) -> float:
    """E omega^{T(x_1, ..., x_r)} over uniform inputs."""
    b = _bias_complex(t)
    if abs(b.imag) > IMAG_TOL:
        raise ArithmeticError(f"bias has imaginary part {b.imag:.3e}")
    return float(b.real)


def tensor_arank(t: Tensor) -> float:
    b = tensor_bias(t)
    return max(0.0, -math.log(b, t.p))


def _bipartitions(r: int):
    """Nonempty strict subsets containing axis 0 (complements are the same split)."""
    rest = list(range(1, r))
    for size in range(0, r - 1):
        for extra in itertools.combinations(rest, size):
            yield (0,) + extra


def _rank_one_tensors(t: Tensor) -> np.ndarray:
    p, axes, r = t.p, t.axes, t.order
    blocks = []
    for left in _bipartitions(r):
        right = tuple(i for i in range(r) if i not in left)
        dl = math.prod(axes[i] for i in left)
        dr = math.prod(axes[i] for i in right)
        if p ** dl * p ** dr > PRANK_SINGLE_LIMIT:
            raise EnumerationLimitError("too many partition-rank-1 candidates")
        a = all_vectors(p, dl)
        b = all_vectors(p, dr)
        outer = (a[:, None, :, None] * b[None, :, None, :]) % p
        outer = outer.reshape((-1,) + tuple(axes[i] for i in left + right))
        perm = [0] + [1 + (left + right).index(i) for i in range(r)]
        blocks.append(np.transpose(outer, perm).reshape(outer.shape[0], -1))
    return np.concatenate(blocks, axis=0)


def prank_upper(t: Tensor, limit: int = 3) -> int | None:
    """Least m <= limit writing t as a sum of m partition-rank-1 tensors, else None."""
    if limit > 3:
        raise ValueError("limit must be at most 3")
    size = t.entries.size
    if size > PRANK_ENTRY_LIMIT or size * math.log2(t.p) > 62:
        raise EnumerationLimitError("tensor too large for exhaustive partition-rank search")
    p = t.p
    weights = p ** np.arange(size, dtype=np.int64)
    target = t.entries.reshape(-1)
    if not target.any():
        return 0
    cands = _rank_one_tensors(t)
    codes, first = np.unique(cands @ weights, return_index=True)
    cands = cands[first]

    def members(rows: np.ndarray) -> np.ndarray:
        c = (rows % p) @ weights
        pos = np.minimum(np.searchsorted(codes, c), codes.size - 1)
        return codes[pos] == c

    if limit >= 1 and members(target[None, :])[0]:
        return 1
    if limit >= 2 and members(target[None, :] - cands).any():
        return 2
    if limit >= 3:
        if cands.shape[0] ** 2 > PRANK_PAIR_LIMIT:
            raise EnumerationLimitError("pair search exceeds budget")
        for row in cands:
            if members(target[None, :] - row[None, :] - cands).any():
                return 3
    return None


def integration_residual(phi: PolyMap) -> PolyMap:
    """phi(y) - (1/d!) T(y, ..., y, .) with T the tensor of phi."""
    d, p = phi.degree, phi.p
    if p <= d:
        raise ValueError("integration formula needs p > deg(phi)")
    t = tensor_from_polymap(phi)
    inv = pow(math.factorial(d) % p, -1, p)
    comps = []
    for j, comp in enumerate(phi.components):
        diag: dict[tuple[int, ...], int] = {}
        for idx in itertools.product(range(phi.n), repeat=d):
            c = int(t.entries[idx + (j,)])
            if c:
                m = tuple(sorted(idx))
                diag[m] = diag.get(m, 0) + c
        comps.append(comp - Poly(p, phi.n, diag).scale(inv))
    return PolyMap(comps)


def integration_residual_degree(phi: PolyMap) -> int:
    """Degree of the integration residual (0 when it vanishes)."""
    return integration_residual(phi).degree
