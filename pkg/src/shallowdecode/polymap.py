"""Polynomial maps F_p^n -> F_p^k in sparse monomial form.

A monomial is a sorted tuple of variable indices with repetition, so
x0^2 x3 is (0, 0, 3). Per-variable exponents stay below p, which makes the
stored degree equal to the degree of the function. Terms are kept in
graded-lexicographic order.
"""
from __future__ import annotations

import itertools
import json
import math
from collections import Counter
from typing import Iterable, Mapping

import numpy as np

from .codes import Code
from .gf import (EnumerationLimitError, FpMatrix, all_vectors, check_modulus,
                 rank_array, restrict_columns)
from .noise import RngStream, SymmetricChannel, sample_index_set, sample_noise_many

Monomial = tuple[int, ...]

BIAS_LIMIT = 1 << 24
ARANK_LIMIT = 1 << 24
EXACT_SUCCESS_LIMIT = 1 << 26
_BATCH_CELLS = 1 << 22


def _mono_key(m: Monomial):
    return (len(m), m)


class Poly:
    """Polynomial over F_p in n variables; immutable."""

    __slots__ = ("p", "n", "terms", "_compiled")

    def __init__(self, p: int, n: int, terms: Mapping[Iterable[int], int] | None = None):
        self.p = check_modulus(p)
        self.n = int(n)
        acc: dict[Monomial, int] = {}
        for mono, coef in (terms or {}).items():
            m = tuple(sorted(int(v) for v in mono))
            if m and (m[0] < 0 or m[-1] >= self.n):
                raise ValueError(f"variable index out of range in {m}")
            if m and max(Counter(m).values()) >= self.p:
                raise ValueError(f"exponent must stay below p in {m}")
            acc[m] = (acc.get(m, 0) + int(coef)) % self.p
        self.terms = {m: acc[m] for m in sorted(acc, key=_mono_key) if acc[m]}
        self._compiled = None

    @classmethod
    def zero(cls, p: int, n: int) -> Poly:
        return cls(p, n)

    @classmethod
    def constant(cls, p: int, n: int, c: int) -> Poly:
        return cls(p, n, {(): c})

    @classmethod
    def variable(cls, p: int, n: int, i: int) -> Poly:
        return cls(p, n, {(i,): 1})

    @property
    def degree(self) -> int:
        """Largest monomial degree; 0 for constants including the zero polynomial."""
        return max((len(m) for m in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: Poly):
        if (self.p, self.n) != (other.p, other.n):
            raise ValueError("polynomials live over different (p, n)")

    def __add__(self, other: Poly) -> Poly:
        self._check(other)
        acc = dict(self.terms)
        for m, c in other.terms.items():
            acc[m] = acc.get(m, 0) + c
        return Poly(self.p, self.n, acc)

    def __neg__(self) -> Poly:
        return Poly(self.p, self.n, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: Poly) -> Poly:
        return self + (-other)

    def scale(self, a: int) -> Poly:
        return Poly(self.p, self.n, {m: a * c for m, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        return (isinstance(other, Poly) and (self.p, self.n) == (other.p, other.n)
                and self.terms == other.terms)

    def __hash__(self) -> int:
        return hash((self.p, self.n, tuple(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.terms.items():
            mono = "*".join(f"x{v}" for v in m) or "1"
            parts.append(mono if c == 1 and m else f"{c}*{mono}")
        return " + ".join(parts)

    def _compile(self):
        if self._compiled is None:
            by_deg: dict[int, list] = {}
            for m, c in self.terms.items():
                by_deg.setdefault(len(m), []).append((m, c))
            self._compiled = [
                (d, np.array([m for m, _ in items], dtype=np.int64).reshape(len(items), d),
                 np.array([c for _, c in items], dtype=np.int64))
                for d, items in sorted(by_deg.items())
            ]
        return self._compiled

    def eval_batch(self, xs) -> np.ndarray:
        """Values at each row of xs (shape (N, n))."""
        xs = np.asarray(xs)
        if xs.ndim != 2 or xs.shape[1] != self.n:
            raise ValueError(f"points must have {self.n} coordinates")
        p = self.p
        out = np.zeros(xs.shape[0], dtype=np.int64)
        for d, idx, coef in self._compile():
            if d == 0:
                out += int(coef.sum())
                continue
            step = max(1, _BATCH_CELLS // max(1, idx.shape[0] * d))
            for s in range(0, xs.shape[0], step):
                block = xs[s:s + step].astype(np.int64)
                vals = block[:, idx[:, 0]]
                for j in range(1, d):
                    vals = (vals * block[:, idx[:, j]]) % p
                out[s:s + step] += (vals % p) @ coef
        return out % p

    def evaluate(self, x) -> int:
        x = np.asarray(x, dtype=np.int64).reshape(1, -1)
        return int(self.eval_batch(x)[0])

    def exps(self, m: Monomial) -> list[int]:
        e = [0] * self.n
        for v in m:
            e[v] += 1
        return e


class PolyMap:
    """A k-tuple of polynomials sharing (p, n)."""

    __slots__ = ("components",)

    def __init__(self, components: Iterable[Poly]):
        comps = tuple(components)
        if not comps:
            raise ValueError("a map needs at least one component")
        p, n = comps[0].p, comps[0].n
        if any((c.p, c.n) != (p, n) for c in comps):
            raise ValueError("components must share (p, n)")
        self.components = comps

    @property
    def p(self) -> int:
        return self.components[0].p

    @property
    def n(self) -> int:
        return self.components[0].n

    @property
    def k(self) -> int:
        return len(self.components)

    @property
    def degree(self) -> int:
        return max(c.degree for c in self.components)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    @classmethod
    def affine(cls, u: FpMatrix, v=None) -> PolyMap:
        """x -> U x + v."""
        k, n = u.shape
        v = np.zeros(k, dtype=np.int64) if v is None else np.asarray(v, dtype=np.int64)
        comps = []
        for i in range(k):
            terms = {(j,): int(u.entries[i, j]) for j in range(n)}
            terms[()] = int(v[i])
            comps.append(Poly(u.p, n, terms))
        return cls(comps)

    @classmethod
    def identity(cls, p: int, n: int) -> PolyMap:
        return cls(Poly.variable(p, n, i) for i in range(n))

    @classmethod
    def constant(cls, p: int, n: int, values) -> PolyMap:
        return cls(Poly.constant(p, n, int(c)) for c in values)

    def __add__(self, other: PolyMap) -> PolyMap:
        if self.k != other.k:
            raise ValueError("maps have different output lengths")
        return PolyMap(a + b for a, b in zip(self.components, other.components))

    def __neg__(self) -> PolyMap:
        return PolyMap(-c for c in self.components)

    def __sub__(self, other: PolyMap) -> PolyMap:
        return self + (-other)

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyMap) and self.components == other.components

    def __hash__(self) -> int:
        return hash(self.components)

    def __repr__(self) -> str:
        return f"PolyMap(p={self.p}, n={self.n}, [{'; '.join(map(repr, self.components))}])"

    def eval_batch(self, xs) -> np.ndarray:
        xs = np.asarray(xs)
        return np.stack([c.eval_batch(xs) for c in self.components], axis=1)

    def to_json(self) -> dict:
        return {
            "p": self.p, "n": self.n, "k": self.k,
            "components": [[{"exps": c.exps(m), "coef": coef} for m, coef in c.terms.items()]
                           for c in self.components],
        }

    @classmethod
    def from_json(cls, doc) -> PolyMap:
        if isinstance(doc, str):
            doc = json.loads(doc)
        p, n = doc["p"], doc["n"]
        comps = []
        for terms in doc["components"]:
            acc = {}
            for t in terms:
                if len(t["exps"]) != n:
                    raise ValueError("exponent vector length differs from n")
                mono = tuple(v for v, e in enumerate(t["exps"]) for _ in range(e))
                acc[mono] = acc.get(mono, 0) + t["coef"]
            comps.append(Poly(p, n, acc))
        if len(comps) != doc["k"]:
            raise ValueError("component count differs from k")
        return cls(comps)


def evaluate(phi: PolyMap, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64).reshape(-1)
    if x.shape[0] != phi.n:
        raise ValueError(f"input must have length {phi.n}")
    return phi.eval_batch(x[None, :])[0]


def _shift_poly(f: Poly, h: np.ndarray) -> Poly:
    """f(x + h) expanded symbolically."""
    p = f.p
    acc: dict[Monomial, int] = {}
    for mono, coef in f.terms.items():
        factors = []
        for v, e in sorted(Counter(mono).items()):
            hv = int(h[v])
            factors.append([((v,) * j, math.comb(e, j) * pow(hv, e - j, p) % p)
                            for j in range(e + 1)])
        for choice in itertools.product(*factors):
            c = coef
            m: tuple[int, ...] = ()
            for part, w in choice:
                c = c * w % p
                m += part
            if c:
                acc[m] = (acc.get(m, 0) + c) % p
    return Poly(p, f.n, acc)


def derivative(phi: PolyMap, h) -> PolyMap:
    """Delta_h phi(x) = phi(x + h) - phi(x)."""
    h = np.asarray(h, dtype=np.int64).reshape(-1) % phi.p
    if h.shape[0] != phi.n:
        raise ValueError(f"direction must have length {phi.n}")
    return PolyMap(_shift_poly(c, h) - c for c in phi.components)


def restrict(phi: PolyMap, keep: Iterable[int]) -> PolyMap:
    """Map on the variables in `keep` (renumbered in ascending order); others set to 0."""
    idx = sorted({int(i) for i in keep})
    if idx and (idx[0] < 0 or idx[-1] >= phi.n):
        raise IndexError("index out of range")
    new = {old: j for j, old in enumerate(idx)}
    comps = []
    for c in phi.components:
        terms = {tuple(new[v] for v in m): coef for m, coef in c.terms.items()
                 if all(v in new for v in m)}
        comps.append(Poly(phi.p, len(idx), terms))
    return PolyMap(comps)


def _roots(p: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(p) / p)


def bias(f: Poly) -> float:
    """|E_x omega^f(x)| over all of F_p^n."""
    total = f.p ** f.n
    if total > BIAS_LIMIT:
        raise EnumerationLimitError("p^n exceeds 2^24")
    counts = np.bincount(f.eval_batch(all_vectors(f.p, f.n)), minlength=f.p)
    return float(abs(counts @ _roots(f.p)) / total)


def monomials_below(p: int, n: int, d: int) -> list[Monomial]:
    """All monomials of degree < d with per-variable exponent < p."""
    out = []
    for deg in range(max(d, 0)):
        for m in itertools.combinations_with_replacement(range(n), deg):
            if not m or max(Counter(m).values()) < p:
                out.append(m)
    return out


def _monomial_values(pts: np.ndarray, monos: list[Monomial], p: int) -> np.ndarray:
    out = np.ones((pts.shape[0], len(monos)), dtype=np.int64)
    for j, m in enumerate(monos):
        for v in m:
            out[:, j] = out[:, j] * pts[:, v] % p
    return out


def best_agreement(phi: PolyMap, d: int) -> tuple[int, int]:
    """(max over deg psi < d of #{x : phi(x) = psi(x)}, p^n)."""
    p, n, k = phi.p, phi.n, phi.k
    monos = monomials_below(p, n, d)
    m = len(monos)
    if p ** (k * m) > ARANK_LIMIT or p ** n > ARANK_LIMIT:
        raise EnumerationLimitError("space of lower-degree maps exceeds 2^24")
    pts = all_vectors(p, n)
    npts = pts.shape[0]
    vals = phi.eval_batch(pts)
    psi = all_vectors(p, m) @ _monomial_values(pts, monos, p).T % p  # (p^m, N)
    eq = [(psi == vals[:, j][None, :]) for j in range(k)]
    if k == 1:
        return int(eq[0].sum(axis=1).max()), npts
    # agreement on all components; the last one folded in by a matrix product
    prefix = eq[0]
    for j in range(1, k - 1):
        prefix = (prefix[:, None, :] & eq[j][None, :, :]).reshape(-1, npts)
    last = eq[-1].astype(np.int32).T
    best = 0
    step = max(1, (1 << 22) // max(1, last.shape[1]))
    for s in range(0, prefix.shape[0], step):
        best = max(best, int((prefix[s:s + step].astype(np.int32) @ last).max()))
    return best, npts


def arank_bruteforce(phi: PolyMap, d: int) -> float:
    """-log_p max_{deg psi < d} Pr_x[phi(x) = psi(x)], by full enumeration."""
    if d < 1:
        raise ValueError("d must be at least 1")
    best, total = best_agreement(phi, d)
    if best == total:
        return 0.0
    return float(math.log(total / best, phi.p))


def random_polymap(p: int, n: int, k: int, d: int, rng: RngStream) -> PolyMap:
    """i.i.d. uniform coefficients on every monomial of degree <= d."""
    monos = monomials_below(p, n, d + 1)
    coefs = rng.integers(0, p, size=(k, len(monos)))
    return PolyMap(Poly(p, n, dict(zip(monos, row.tolist()))) for row in coefs)


def random_sparse_polymap(p: int, n: int, k: int, d: int, terms: int,
                          rng: RngStream) -> PolyMap:
    """Uniform affine part plus `terms` random degree-d monomials per component.

    Degree-d monomials use distinct variables; their coefficients are uniform
    over F_p.
    """
    if d > n:
        raise ValueError("need at least d variables")
    comps = []
    for _ in range(k):
        acc: dict[Monomial, int] = {(): int(rng.integers(0, p))}
        for v, c in enumerate(rng.integers(0, p, size=n).tolist()):
            acc[(v,)] = c
        for _ in range(terms):
            mono = tuple(sorted(rng.gen.choice(n, size=d, replace=False).tolist()))
            acc[mono] = (acc.get(mono, 0) + int(rng.integers(0, p))) % p
        comps.append(Poly(p, n, acc))
    return PolyMap(comps)


def degree1_restriction_bound(u: FpMatrix, rho: float, samples: int,
                              rng: RngStream) -> tuple[float, float]:
    """Monte-Carlo E_{I ~ [n]_{1-rho}} p^(-rank U_I) with its standard error."""
    if samples < 1:
        raise ValueError("samples must be positive")
    vals = np.empty(samples)
    for s in range(samples):
        cols = sample_index_set(1.0 - rho, u.cols, rng)
        vals[s] = float(u.p) ** -rank_array(u.entries[:, cols], u.p)
    err = float(vals.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return float(vals.mean()), err


def degree1_restriction_exact(u: FpMatrix, rho: float) -> float:
    """E_{I ~ [n]_{1-rho}} p^(-rank U_I) summed over all 2^n index sets."""
    n = u.cols
    if n > 20:
        raise EnumerationLimitError("2^n exceeds 2^20")
    total = 0.0
    for r in range(n + 1):
        for cols in itertools.combinations(range(n), r):
            w = (1.0 - rho) ** r * rho ** (n - r)
            if w:
                total += w * float(u.p) ** -rank_array(restrict_columns(u, cols).entries, u.p)
    return total


def chernoff_restriction_bound(r: int, rho: float, p: int) -> float:
    """e^{-(1-rho) r/8} + p^{-(1-rho) r/2}, the closed bound for rank-r matrices."""
    return math.exp(-(1.0 - rho) * r / 8.0) + float(p) ** (-(1.0 - rho) * r / 2.0)


def _check_compatible(phi: PolyMap, code: Code):
    if phi.p != code.p or phi.n != code.n or phi.k != code.k:
        raise ValueError("map and code disagree on (p, n, k)")


def success_probability_exact(phi: PolyMap, code: Code, rho: float) -> float:
    """Pr_{x, Z ~ N_rho(0)}[phi(E(x) + Z) = x] by double enumeration."""
    _check_compatible(phi, code)
    p, n, k = phi.p, phi.n, phi.k
    if p ** k * p ** n > EXACT_SUCCESS_LIMIT:
        raise EnumerationLimitError("p^k * p^n exceeds 2^26")
    ch = SymmetricChannel(rho, p, n)
    zs = all_vectors(p, n)
    zeros = np.count_nonzero(zs == 0, axis=1)
    weights = ch.zero_prob ** zeros * ch.nonzero_prob ** (n - zeros)
    msgs = all_vectors(p, k)
    words = code.encode_many(msgs)
    total = 0.0
    step = max(1, (1 << 20) // max(1, zs.shape[0]))
    for s in range(0, msgs.shape[0], step):
        xs, cs = msgs[s:s + step], words[s:s + step]
        ys = (cs[:, None, :] + zs[None, :, :]) % p
        out = phi.eval_batch(ys.reshape(-1, n)).reshape(xs.shape[0], zs.shape[0], k)
        hit = np.all(out == xs[:, None, :], axis=2)
        total += float((hit * weights[None, :]).sum())
    return total / p ** k


def success_probability_mc(phi: PolyMap, code: Code, rho: float, trials: int,
                           rng: RngStream, batch: int = 1000) -> tuple[float, float]:
    """Monte-Carlo estimate of the decoding success probability and its stderr."""
    _check_compatible(phi, code)
    if trials < 1:
        raise ValueError("trials must be positive")
    ch = SymmetricChannel(rho, phi.p, phi.n)
    hits = 0
    for s in range(0, trials, batch):
        m = min(batch, trials - s)
        xs = rng.integers(0, phi.p, size=(m, phi.k))
        ys = (code.encode_many(xs) + sample_noise_many(ch, rng, m)) % phi.p
        hits += int(np.all(phi.eval_batch(ys) == xs, axis=1).sum())
    est = hits / trials
    return est, math.sqrt(est * (1.0 - est) / trials)


def random_restriction_fraction(phi: PolyMap, d: int, sigma: float, samples: int,
                                rng: RngStream, ratio: float = 0.01) -> float:
    """Fraction of I ~ [n]_sigma with arank_d(phi_I) >= ratio * arank_d(phi)."""
    base = arank_bruteforce(phi, d)
    good = 0
    for _ in range(samples):
        keep = sample_index_set(sigma, phi.n, rng)
        if arank_bruteforce(restrict(phi, keep), d) >= ratio * base:
            good += 1
    return good / samples
