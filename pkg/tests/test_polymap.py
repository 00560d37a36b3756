import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shallowdecode import polymap as pm
from shallowdecode.codes import Code, HadamardCode
from shallowdecode.gf import EnumerationLimitError, FpMatrix, all_vectors, rank
from shallowdecode.noise import RngStream
from shallowdecode.polymap import Poly, PolyMap


def xy(p=2):
    return PolyMap([Poly(p, 2, {(0, 1): 1})])


def test_monomials_are_canonical():
    f = Poly(3, 3, {(2, 0): 1, (0, 2): 1, (1,): 3})
    assert f.terms == {(0, 2): 2}
    assert f.degree == 2
    assert Poly.zero(5, 2).degree == 0
    with pytest.raises(ValueError):
        Poly(2, 2, {(0, 0): 1})            # x0^2 with p = 2
    with pytest.raises(ValueError):
        Poly(3, 2, {(2,): 1})


def test_evaluation_by_hand():
    f = Poly(5, 2, {(0, 0): 2, (1,): 3, (): 1})   # 2 x0^2 + 3 x1 + 1
    assert f.evaluate([2, 4]) == (2 * 4 + 12 + 1) % 5
    pts = all_vectors(5, 2)
    direct = (2 * pts[:, 0] ** 2 + 3 * pts[:, 1] + 1) % 5
    assert np.array_equal(f.eval_batch(pts), direct)


def test_affine_map_matches_matrix(rng):
    u = FpMatrix(3, rng.integers(0, 3, size=(2, 4)))
    v = rng.integers(0, 3, size=2)
    phi = PolyMap.affine(u, v)
    pts = all_vectors(3, 4)
    assert np.array_equal(phi.eval_batch(pts), (u.apply(pts) + v) % 3)
    assert phi.degree == 1


def test_json_round_trip(rng):
    phi = pm.random_polymap(3, 3, 2, 2, rng)
    assert PolyMap.from_json(json.dumps(phi.to_json())) == phi
    doc = phi.to_json()
    doc["k"] = 5
    with pytest.raises(ValueError):
        PolyMap.from_json(doc)


def test_restriction_renumbers_kept_variables():
    phi = PolyMap([Poly(2, 4, {(0, 3): 1, (1,): 1, (2,): 1})])
    r = pm.restrict(phi, [3, 1])
    assert r.n == 2
    assert r.components[0].terms == {(0,): 1}      # x1 -> y0, x3 -> y1; x0 x3 vanishes
    pts = all_vectors(2, 2)
    full = np.zeros((4, 4), dtype=np.int64)
    full[:, [1, 3]] = pts
    assert np.array_equal(r.eval_batch(pts), phi.eval_batch(full))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(1, 3), st.integers(1, 2), st.integers(0, 3),
       st.integers(0, 2 ** 32 - 1))
def test_derivative_is_difference_and_lowers_degree(p, n, k, d, seed):
    rng = RngStream(seed)
    phi = pm.random_polymap(p, n, k, d, rng)
    h = rng.integers(0, p, size=n)
    dphi = pm.derivative(phi, h)
    pts = all_vectors(p, n)
    assert np.array_equal(dphi.eval_batch(pts),
                          (phi.eval_batch((pts + h) % p) - phi.eval_batch(pts)) % p)
    if phi.degree >= 1:
        assert dphi.degree < phi.degree


def test_bias_examples():
    assert pm.bias(Poly(2, 2, {(0, 1): 1})) == pytest.approx(0.5)
    assert pm.bias(Poly(3, 2, {(0,): 1})) == pytest.approx(0.0, abs=1e-12)
    assert pm.bias(Poly.constant(7, 3, 4)) == pytest.approx(1.0)


def test_arank_examples():
    assert pm.arank_bruteforce(PolyMap.identity(2, 2), 1) == pytest.approx(2.0)
    assert pm.arank_bruteforce(xy(), 2) == pytest.approx(-math.log2(3 / 4))
    assert pm.arank_bruteforce(PolyMap.affine(FpMatrix(2, [[1, 1]])), 2) == 0.0


def test_arank_of_affine_map_is_matrix_rank(rng):
    for _ in range(20):
        u = FpMatrix(3, rng.integers(0, 3, size=(2, 3)))
        phi = PolyMap.affine(u, rng.integers(0, 3, size=2))
        assert pm.arank_bruteforce(phi, 1) == pytest.approx(rank(u))


def test_arank_enumeration_limit():
    big = pm.random_polymap(3, 6, 2, 2, RngStream(1))
    with pytest.raises(EnumerationLimitError):
        pm.arank_bruteforce(big, 3)


def _agreement_by_enumeration(phi, d):
    # independent oracle: enumerate psi coefficient vectors and compare pointwise
    p, n = phi.p, phi.n
    monos = pm.monomials_below(p, n, d)
    pts = all_vectors(p, n)
    vals = phi.eval_batch(pts)
    best = 0
    for coefs in itertools.product(range(p), repeat=len(monos) * phi.k):
        comps = [Poly(p, n, dict(zip(monos, coefs[j * len(monos):(j + 1) * len(monos)])))
                 for j in range(phi.k)]
        psi = PolyMap(comps)
        best = max(best, int(np.all(psi.eval_batch(pts) == vals, axis=1).sum()))
    return best


@pytest.mark.parametrize("seed", range(6))
def test_best_agreement_matches_naive_enumeration(seed):
    rng = RngStream(seed, 9)
    phi = pm.random_polymap(2, 3, 2, 2, rng)
    assert pm.best_agreement(phi, 2)[0] == _agreement_by_enumeration(phi, 2)


def test_degree1_restriction_closed_form(rng):
    u = FpMatrix.identity(2, 4)
    assert pm.degree1_restriction_exact(u, 0.5) == pytest.approx(0.75 ** 4)
    est, se = pm.degree1_restriction_bound(u, 0.5, 4000, rng)
    assert abs(est - 0.75 ** 4) <= 4 * se
    assert pm.degree1_restriction_bound(u, 1.0, 10, rng)[0] == 1.0
    assert pm.degree1_restriction_bound(u, 0.0, 10, rng)[0] == pytest.approx(2.0 ** -4)


@pytest.mark.parametrize("rho", [0.0, 0.3, 1.0])
def test_success_probability_identity_closed_form(rho, rng):
    p, n = 3, 3
    phi, code = PolyMap.identity(p, n), Code.identity(p, n)
    want = (rho + (1 - rho) / p) ** n
    assert pm.success_probability_exact(phi, code, rho) == pytest.approx(want)
    est, se = pm.success_probability_mc(phi, code, rho, 20000, rng)
    assert abs(est - want) <= 4 * se + 1e-12


def test_constant_map_hits_one_message(rng):
    phi = PolyMap.constant(2, 8, [1, 0, 1])
    code = Code.random(2, 3, 8, rng)
    assert pm.success_probability_exact(phi, code, 0.4) == pytest.approx(1 / 8)
    big = PolyMap.constant(2, 256, [0] * 8)
    est, se = pm.success_probability_mc(big, HadamardCode(8), 0.5, 20000, rng)
    assert abs(est - 2 ** -8) <= 4 * max(se, 1 / 20000)


def test_noiseless_perfect_decoder(rng):
    assert pm.success_probability_mc(PolyMap.identity(2, 5), Code.identity(2, 5), 1.0,
                                     500, rng)[0] == 1.0


def test_chernoff_bound_dominates_exact_expectation(rng):
    for _ in range(30):
        n = int(rng.integers(3, 9))
        u = FpMatrix(2, rng.integers(0, 2, size=(int(rng.integers(1, n + 1)), n)))
        for rho in (0.25, 0.5, 0.75):
            assert (pm.degree1_restriction_exact(u, rho)
                    <= pm.chernoff_restriction_bound(rank(u), rho, 2) + 1e-12)


def test_random_restriction_sanity():
    # weak check: most half-restrictions keep some rank of a random quadratic map
    hits = []
    for s in range(3):
        rng = RngStream(s, 77)
        phi = pm.random_polymap(2, 8, 1, 2, rng)
        hits.append(pm.random_restriction_fraction(phi, 2, 0.5, 40, rng))
    assert np.mean(hits) > 0.5
