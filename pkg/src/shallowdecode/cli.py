"""Batch experiment runner: ``shallowdecode <command> [flags]``.

Every command emits one record (JSON by default, CSV rows with --format csv)
and exits 0 when all of its checks pass, 1 when one fails, 2 on bad usage.
Records carry no timestamps, so equal (command, params, seed) give equal bytes.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
from typing import Callable

import numpy as np

from . import __version__
from . import decoder as dec
from . import majority as maj
from . import polymap as pm
from . import shallow
from . import tensor as tn
from .codes import Code, HadamardCode, brute_force_list
from .gf import EnumerationLimitError, FpMatrix, rank
from .noise import RngStream
from .qsim import Circuit, QuantumState, run, statevector_distance

SCHEMA_VERSION = 1
AMP_TOL = 1e-10
RANK_SLACK = 1e-9

COMMAND_IDS = {name: i for i, name in enumerate([
    "decode", "list-decode", "xcheck", "ghz-check", "fanout-check", "phase-and-check",
    "classical-sweep", "rank-props", "tensor-props", "majority", "resources"])}


class UsageError(Exception):
    pass


def _plain(v):
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.ndarray):
        return _plain(v.tolist())
    return v


def _record(command: str, params: dict, seed: int, rows: list[dict], summary: dict,
            passed: bool) -> dict:
    return _plain({"schema_version": SCHEMA_VERSION, "version": __version__,
                   "command": command, "params": params, "seed": seed,
                   "rows": rows, "summary": summary, "passed": bool(passed)})


def _ints(text: str) -> list[int]:
    try:
        return [int(s) for s in str(text).split(",") if s.strip()]
    except ValueError as e:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from e


def _floats(text: str) -> list[float]:
    try:
        return [float(s) for s in str(text).split(",") if s.strip()]
    except ValueError as e:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from e


def _root(args, command: str) -> RngStream:
    return RngStream(args.seed, (COMMAND_IDS[command],))


def _binom_se(prob: float, shots: int) -> float:
    return math.sqrt(max(prob * (1 - prob), 0.0) / shots)


# -- decoder commands ------------------------------------------------------


def cmd_decode(args) -> dict:
    """Adversarial corruptions of exactly floor((1/2 - eps) n) coordinates."""
    ks, epss = _ints(args.k or "8"), _floats(args.eps or "0.1")
    shots, instances = args.trials or 10000, args.instances or 1
    root = _root(args, "decode")
    rows, summary, passed = [], {}, True
    for k in ks:
        n = 1 << k
        for ei, eps in enumerate(epss):
            if not 0 < eps <= 0.5:
                raise UsageError("eps must lie in (0, 1/2]")
            flips = math.floor((0.5 - eps) * n)
            hits_total, exp_total, var_total, outside = 0, 0.0, 0.0, 0
            for i in range(instances):
                rng = root.child(k, ei, i)
                x = int(rng.integers(0, n))
                c = dec.codeword(x, k)
                pos = rng.gen.choice(n, size=flips, replace=False)
                c[pos] ^= 1
                exact = dec.success_probability(c, x)
                wht = float(dec.distribution_for_word(c)[x])
                hits = int(np.count_nonzero(dec.sample_outcomes(c, shots, rng) == x))
                emp = hits / shots
                se = _binom_se(exact, shots)
                z = (emp - exact) / se if se else 0.0
                outside += abs(z) > 3
                hits_total += hits
                exp_total += exact * shots
                var_total += exact * (1 - exact) * shots
                ok = exact >= 4 * eps ** 2 - 1e-12 and abs(wht - exact) <= AMP_TOL
                passed &= ok
                rows.append({"k": k, "eps": eps, "instance": i, "message": x,
                             "corruption": f"flip-{flips}", "success_prob_exact": exact,
                             "bound": 4 * eps ** 2, "empirical": emp, "z": z,
                             "shots": shots, "seed": args.seed, "exact_ok": ok})
            pooled_z = (hits_total - exp_total) / math.sqrt(var_total) if var_total else 0.0
            pooled_ok = abs(pooled_z) <= 3
            passed &= pooled_ok
            summary[f"k={k},eps={eps}"] = {
                "instances": instances, "pooled_z": pooled_z, "pooled_within_3sigma": pooled_ok,
                "instances_outside_3sigma": outside,
                "expected_outside_3sigma": instances * 0.0027}
    params = {"k": ks, "eps": epss, "trials": shots, "instances": instances}
    return _record("decode", params, args.seed, rows, summary, passed)


def _majority_word(msgs, k):
    words = np.array([dec.codeword(m, k) for m in msgs])
    return (2 * words.sum(axis=0) > len(msgs)).astype(np.int64)


def cmd_list_decode(args) -> dict:
    """Fixed received words, repeated list decoding, per-qualifying-message recall."""
    k = _ints(args.k or "8")[0]
    eps = _floats(args.eps or "0.1")[0]
    C, trials = args.c_const, args.trials or 200
    n = 1 << k
    root = _root(args, "list-decode")
    radius = math.floor((0.5 - eps) * n)
    cap = dec.list_size(eps, C)
    gen_rng = root.child(0)
    x = int(gen_rng.integers(0, n))
    noisy = dec.codeword(x, k)
    noisy[gen_rng.gen.choice(n, size=radius, replace=False)] ^= 1
    words = {
        f"codeword-{radius}-flips": noisy,
        "majority-of-3": _majority_word(gen_rng.gen.choice(n, 3, replace=False).tolist(), k),
        "majority-of-5": _majority_word(gen_rng.gen.choice(n, 5, replace=False).tolist(), k),
    }
    code = HadamardCode(k)
    rows, passed, longest = [], True, 0
    for wi, (name, y) in enumerate(words.items()):
        qualifying = sorted(dec.message_index(m, k) for m in brute_force_list(code, y, radius))
        seen = dict.fromkeys(qualifying, 0)
        for t in range(trials):
            lst = dec.list_decode(y, eps, C, root.child(1, wi, t))
            longest = max(longest, len(lst))
            passed &= len(lst) <= cap
            for m in set(lst) & seen.keys():
                seen[m] += 1
        for m in qualifying:
            freq = seen[m] / trials
            ok = freq >= 1 - eps
            passed &= ok
            rows.append({"word": name, "message": m,
                         "distance": int(np.count_nonzero(y != dec.codeword(m, k))),
                         "frequency": freq, "ok": ok})
        passed &= bool(qualifying)
    summary = {"radius": radius, "list_bound": cap, "longest_list": longest,
               "qualifying_pairs": len(rows)}
    params = {"k": k, "eps": eps, "c_const": C, "trials": trials}
    return _record("list-decode", params, args.seed, rows, summary, passed)


def _xcheck_formula(args) -> dict:
    ks = _ints(args.k or "4,6,8,10")
    trials = args.trials or 1000
    root = _root(args, "xcheck")
    rows, passed = [], True
    for k in ks:
        n = 1 << k
        rng = root.child(k)
        worst, total = 0.0, 0.0
        for _ in range(trials):
            x = int(rng.integers(0, n))
            c = dec.codeword(x, k) ^ (rng.random(n) < rng.random()).astype(np.int64)
            dist = dec.distribution_for_word(c)
            worst = max(worst, abs(dist[x] - dec.success_probability(c, x)))
            total = max(total, abs(dist.sum() - 1))
        ok = worst <= AMP_TOL and total <= AMP_TOL
        passed &= ok
        rows.append({"k": k, "pairs": trials, "max_abs_diff": worst,
                     "max_normalization_error": total, "ok": ok})
    return _record("xcheck", {"level": "formula", "k": ks, "trials": trials},
                   args.seed, rows, {}, passed)


def _pipeline_words() -> dict[str, np.ndarray]:
    k = 2
    words = {"H(3)": dec.codeword(3, k), "H(0)": dec.codeword(0, k)}
    for x, pos in ((1, 0), (2, 3), (3, 1)):
        w = dec.codeword(x, k)
        w[pos] ^= 1
        words[f"H({x})+e{pos}"] = w
    return words


def shared_state_gap() -> float:
    """Distance between the factorized GHZ preparation and sum_y |y>^{(x)4} / 2 at k = 2."""
    k, n = 2, 4
    reg = [[f"p{y}.q{j}" for j in range(k)] for y in range(n)]
    circ = Circuit()
    for j in range(k):
        shallow.emit_ghz(circ, [reg[y][j] for y in range(n)], f"share{j}")
    st = run(circ, rng=RngStream(0))
    order = [q for player in reg for q in player]
    ideal = np.zeros(1 << len(order), dtype=complex)
    for y in range(n):
        bits = [(y >> j) & 1 for _ in range(n) for j in range(k)]
        ideal[int("".join(map(str, bits)), 2)] = 0.5
    return float(np.linalg.norm(st.vector(order) - ideal))


def _xcheck_gates(args) -> dict:
    shots = args.shots or args.trials or 10000
    root = _root(args, "xcheck")
    rows, passed = [], True
    gap = shared_state_gap()
    passed &= gap <= AMP_TOL
    peak = 0
    for wi, (name, c) in enumerate(_pipeline_words().items()):
        circ = dec.build_full_gate_pipeline(2, c)
        peak = max(peak, circ.peak_width)
        counts = dec.run_pipeline_shots(circ, 2, shots, root.child(wi))
        oracle = dec.distribution_for_word(c)
        tv = 0.5 * float(np.abs(counts / shots - oracle).sum())
        ok = tv <= 0.03 and circ.peak_width <= 18
        passed &= ok
        rows.append({"word": name, "bits": c.tolist(), "shots": shots,
                     "empirical": (counts / shots).tolist(), "oracle": oracle.tolist(),
                     "tv": tv, "depth": circ.depth, "size": circ.size,
                     "peak_width": circ.peak_width, "ok": ok})
    summary = {"peak_width": peak, "shared_state_gap": gap}
    return _record("xcheck", {"level": "gates", "shots": shots}, args.seed, rows,
                   summary, passed)


def cmd_xcheck(args) -> dict:
    return _xcheck_gates(args) if args.level == "gates" else _xcheck_formula(args)


# -- circuit checks --------------------------------------------------------


def _ghz_vector(n: int) -> np.ndarray:
    v = np.zeros(1 << n, dtype=complex)
    v[0] = v[-1] = 1 / math.sqrt(2)
    return v


def cmd_ghz_check(args) -> dict:
    nmax = max(_ints(args.n or "8"))
    branches = args.trials or 100
    root = _root(args, "ghz-check")
    rows, passed = [], True
    for n in range(2, nmax + 1):
        rep = shallow.build_ghz(n)
        ideal = QuantumState.from_vector(rep.outputs, _ghz_vector(n))
        worst, leaks = 0.0, 0
        for b in range(branches):
            st = run(rep.circuit, rng=root.child(n, b))
            leaks += sorted(st.labels) != sorted(rep.outputs)
            if not leaks:
                worst = max(worst, statevector_distance(st, ideal))
        ok = worst <= AMP_TOL and not leaks
        passed &= ok
        rows.append({"case": "random-branches", "n": n, "branches": branches,
                     "max_distance": worst, "depth": rep.depth, "size": rep.size, "ok": ok})
    # the worked example: both parities 1 before correction
    rep = shallow.build_ghz(3)
    stop = next(i for i, g in enumerate(rep.circuit.gates) if g.kind == "CPARITY")
    forced = {"ghz.m0": 1, "ghz.m1": 1}
    pre = run(rep.circuit, forced=forced, stop=stop)
    want = np.zeros(8, dtype=complex)
    want[0b010] = want[0b101] = 1 / math.sqrt(2)
    pre_gap = float(np.linalg.norm(pre.vector(list(rep.outputs)) - want))
    post = run(rep.circuit, forced=forced)
    post_gap = statevector_distance(post, QuantumState.from_vector(rep.outputs, _ghz_vector(3)))
    ok = pre_gap <= AMP_TOL and post_gap <= AMP_TOL
    passed &= ok
    rows.append({"case": "d1=d2=1", "n": 3, "pre_correction_gap": pre_gap,
                 "final_gap": post_gap, "ok": ok})
    bell = shallow.build_ghz(2)
    for outcome in (0, 1):
        st = run(bell.circuit, forced={"ghz.m0": outcome})
        gap = statevector_distance(st, QuantumState.from_vector(bell.outputs, _ghz_vector(2)))
        passed &= gap <= AMP_TOL
        rows.append({"case": f"bell-branch-{outcome}", "n": 2, "final_gap": gap,
                     "ok": gap <= AMP_TOL})
    depths = {r["depth"] for r in rows if "depth" in r}
    passed &= len(depths) == 1
    summary = {"depths": sorted(depths), "constant_depth": len(depths) == 1}
    return _record("ghz-check", {"n": nmax, "trials": branches}, args.seed, rows,
                   summary, passed)


def _random_state(dim: int, rng: RngStream) -> np.ndarray:
    v = rng.gen.normal(size=dim) + 1j * rng.gen.normal(size=dim)
    return v / np.linalg.norm(v)


def _ideal_fanout(vec: np.ndarray, nt: int) -> np.ndarray:
    # control is the most significant bit; targets follow
    idx = np.arange(vec.shape[0])
    ctrl = idx >> nt
    out = np.zeros_like(vec)
    out[idx ^ (ctrl * ((1 << nt) - 1))] = vec
    return out


def cmd_fanout_check(args) -> dict:
    nmax = max(_ints(args.n or "6"))
    trials = args.trials or 50
    root = _root(args, "fanout-check")
    rows, passed = [], True
    depths = set()
    for nt in range(1, nmax + 1):
        rep = shallow.build_fanout(nt)
        depths.add(rep.depth)
        labels = list(rep.inputs)
        worst = 0.0
        for b in range(trials):
            rng = root.child(nt, b)
            vec = _random_state(1 << (nt + 1), rng)
            st = run(rep.circuit, QuantumState.from_vector(labels, vec), rng=rng)
            worst = max(worst, float(np.linalg.norm(st.vector(labels) - _ideal_fanout(vec, nt))))
        # control |+>, targets a fixed basis string
        rng = root.child(nt, trials)
        xbits = rng.integers(0, 2, size=nt).tolist()
        xi = int("".join(map(str, xbits)), 2)
        plus = np.zeros(1 << (nt + 1), dtype=complex)
        plus[xi] = plus[(1 << nt) | (xi ^ ((1 << nt) - 1))] = 1 / math.sqrt(2)
        start = np.zeros_like(plus)
        start[xi] = start[(1 << nt) | xi] = 1 / math.sqrt(2)
        st = run(rep.circuit, QuantumState.from_vector(labels, start), rng=rng)
        plus_gap = float(np.linalg.norm(st.vector(labels) - plus))
        ok = worst <= AMP_TOL and plus_gap <= AMP_TOL
        passed &= ok
        rows.append({"case": "fanout", "n_targets": nt, "trials": trials,
                     "max_distance": worst, "plus_case_gap": plus_gap, "depth": rep.depth,
                     "size": rep.size, "peak_width": rep.peak_width, "ok": ok})
    for n in range(1, 6):
        rep = shallow.build_quantum_parity(n)
        bad = 0
        for bits in itertools.product((0, 1), repeat=n + 1):
            st = run(rep.circuit, QuantumState.basis(rep.inputs, bits), rng=root.child(100, n))
            want = list(bits[:-1]) + [bits[-1] ^ (sum(bits[:-1]) & 1)]
            ideal = QuantumState.basis(rep.inputs, want)
            bad += statevector_distance(st, ideal) > AMP_TOL
        passed &= bad == 0
        rows.append({"case": "parity", "n_inputs": n, "basis_states": 1 << (n + 1),
                     "mismatches": bad, "depth": rep.depth, "ok": bad == 0})
    passed &= len(depths) == 1
    return _record("fanout-check", {"n": nmax, "trials": trials}, args.seed, rows,
                   {"fanout_depths": sorted(depths)}, passed)


def _mcz_target(bits, y=None) -> np.ndarray:
    k = len(bits)
    v = np.zeros(1 << k, dtype=complex)
    hit = all(bits) if y is None else list(bits) == list(y)
    v[int("".join(map(str, bits)), 2)] = -1 if hit else 1
    return v


def cmd_phase_and_check(args) -> dict:
    kmax = max(_ints(args.k or "5"))
    root = _root(args, "phase-and-check")
    rows, passed = [], True
    sizes = {}
    for k in range(1, kmax + 1):
        rep = shallow.build_phase_and(k)
        sizes[k] = rep
        worst, leaks = 0.0, 0
        for bits in itertools.product((0, 1), repeat=k):
            st = run(rep.circuit, QuantumState.basis(rep.inputs, bits), rng=root.child(k))
            leaks += sorted(st.labels) != sorted(rep.inputs)
            worst = max(worst, float(np.linalg.norm(st.vector(list(rep.inputs))
                                                    - _mcz_target(bits))))
        ok = worst <= AMP_TOL and not leaks
        passed &= ok
        rows.append({"case": "phase-and", "k": k, "basis_states": 1 << k,
                     "max_distance": worst, "depth": rep.depth, "size": rep.size,
                     "peak_width": rep.peak_width, "size_over_k2k": rep.constant, "ok": ok})
    c_fit = max(r.constant for r in sizes.values())
    fit_ok = all(r.size <= c_fit * k * 2 ** k + 1e-9 for k, r in sizes.items())
    depth_ok = kmax < 2 or sizes[2].depth == sizes[kmax].depth
    passed &= fit_ok and depth_ok
    for k in range(1, min(kmax, 4) + 1):
        rep = shallow.build_and_into_target(k)
        bad = 0
        for bits in itertools.product((0, 1), repeat=k + 1):
            st = run(rep.circuit, QuantumState.basis(rep.inputs, bits), rng=root.child(50, k))
            want = list(bits[:-1]) + [bits[-1] ^ int(all(bits[:-1]))]
            bad += statevector_distance(st, QuantumState.basis(rep.inputs, want)) > AMP_TOL
        passed &= bad == 0
        rows.append({"case": "and-into-target", "k": k, "mismatches": bad,
                     "depth": rep.depth, "size": rep.size, "ok": bad == 0})
    for k in range(1, min(kmax, 3) + 1):
        rng = root.child(60, k)
        y = rng.integers(0, 2, size=k).tolist()
        for c_y in (0, 1):
            rep = shallow.build_conditional_phase_flip(k, y, c_y)
            vec = _random_state(1 << k, rng)
            st = run(rep.circuit, QuantumState.from_vector(rep.inputs, vec), rng=rng)
            want = vec.copy()
            if c_y:
                want[int("".join(map(str, y)), 2)] *= -1
            gap = float(np.linalg.norm(st.vector(list(rep.inputs)) - want))
            passed &= gap <= AMP_TOL
            rows.append({"case": "conditional-phase-flip", "k": k, "y": y, "c_y": c_y,
                         "gap": gap, "size": rep.size, "ok": gap <= AMP_TOL})
    identity_ok = all(shallow.subset_parity_identity(z) == int(all(z))
                      for k in range(1, 9) for z in itertools.product((0, 1), repeat=k))
    passed &= identity_ok
    summary = {"c_fit": c_fit, "size_fit_ok": fit_ok, "constant_depth": depth_ok,
               "subset_parity_identity_k_le_8": identity_ok,
               "bound": f"size <= {c_fit:.4f} * k * 2^k"}
    return _record("phase-and-check", {"k": kmax}, args.seed, rows, summary, passed)


def cmd_resources(args) -> dict:
    builder = args.builder or "phase-and"
    if builder not in shallow.BUILDERS:
        raise UsageError(f"unknown builder {builder!r}; pick from {sorted(shallow.BUILDERS)}")
    uses_k = builder in ("phase-and", "and-into-target")
    top = max(_ints((args.k if uses_k else args.n) or ("5" if uses_k else "8")))
    lo = 1 if uses_k else (2 if builder == "ghz" else 1)
    reports = [shallow.BUILDERS[builder](s) for s in range(lo, top + 1)]
    c_fit = max(r.constant for r in reports)
    rows = [dict(r.to_json(), fits=r.size <= c_fit * r.scale + 1e-9) for r in reports]
    grown = [r for r in reports if (r.params.get("k", 2) >= 2 and r.params.get("n", 2) >= 2)]
    depths = sorted({r.depth for r in grown})
    passed = all(row["fits"] for row in rows) and len(depths) <= 1
    summary = {"builder": builder, "c_fit": c_fit, "bound": reports[-1].bound,
               "depths": depths, "top": reports[-1].to_json()}
    return _record("resources", {"builder": builder, "max": top}, args.seed, rows,
                   summary, passed)


# -- classical bounds ------------------------------------------------------


def _sweep_degree1(args) -> dict:
    rhos = _floats(args.rho or "0.25,0.5,0.75")
    instances, samples = args.instances or 20, args.trials or 2000
    root = _root(args, "classical-sweep")
    rows, passed = [], True
    for ri, rho in enumerate(rhos):
        for i in range(instances):
            rng = root.child(1, ri, i)
            n = int(rng.integers(4, 11))
            k = int(rng.integers(1, min(n, 5) + 1))
            u = FpMatrix(2, rng.integers(0, 2, size=(k, n)))
            phi = pm.PolyMap.affine(u, rng.integers(0, 2, size=k))
            code = Code.random(2, k, n, rng)
            exact = pm.success_probability_exact(phi, code, rho)
            est, se = pm.degree1_restriction_bound(u, rho, samples, rng)
            e_exact = pm.degree1_restriction_exact(u, rho)
            r = rank(u)
            closed = pm.chernoff_restriction_bound(r, rho, 2)
            ok_mc = exact <= est + 4 * se + 1e-12
            ok_exact = exact <= e_exact + 1e-12
            ok_chernoff = e_exact <= closed + 1e-12
            ok = ok_mc and ok_exact and ok_chernoff
            passed &= ok
            rows.append({"rho": rho, "instance": i, "n": n, "k": k, "rank": r,
                         "success_exact": exact, "restriction_mc": est,
                         "restriction_stderr": se, "restriction_exact": e_exact,
                         "closed_bound": closed, "ok": ok})
    params = {"d": 1, "rho": rhos, "instances": instances, "trials": samples}
    return _record("classical-sweep", params, args.seed, rows, {}, passed)


def _sweep_degree2(args) -> dict:
    ks = _ints(args.k or "4,8,12")
    rho = _floats(args.rho or "0.5")[0]
    trials = args.trials or 10000
    root = _root(args, "classical-sweep")
    rows = []
    for k in ks:
        rng = root.child(2, k)
        n = 1 << k
        phi = pm.random_sparse_polymap(2, n, k, 2, n, rng)
        est, se = pm.success_probability_mc(phi, HadamardCode(k), rho, trials, rng)
        rows.append({"k": k, "n": n, "terms": n, "success_mc": est, "stderr": se,
                     "uniform_guess": 2.0 ** -k})
    trend_ok = all(b["success_mc"] <= a["success_mc"] + 2 * math.hypot(a["stderr"], b["stderr"])
                   for a, b in zip(rows, rows[1:]))
    cap_ok = all(r["success_mc"] <= 1.0 for r in rows)
    summary = {"non_increasing_within_2sigma": trend_ok, "at_most_one": cap_ok}
    params = {"d": 2, "k": ks, "rho": rho, "trials": trials}
    return _record("classical-sweep", params, args.seed, rows, summary, trend_ok and cap_ok)


def cmd_classical_sweep(args) -> dict:
    if args.d == 1:
        return _sweep_degree1(args)
    if args.d == 2:
        return _sweep_degree2(args)
    raise UsageError("classical-sweep supports --d 1 or --d 2")


def _random_subset(n: int, rng: RngStream) -> list[int]:
    return np.flatnonzero(rng.integers(0, 2, size=n)).tolist()


def cmd_rank_props(args) -> dict:
    instances = args.instances or 500
    primes = _ints(args.p or "2,3")
    root = _root(args, "rank-props")
    counts = dict.fromkeys(["symmetry", "subadditivity", "monotonicity", "lipschitz",
                            "derivative_degree"], 0)
    worst = dict.fromkeys(counts, -math.inf)
    nontrivial = 0
    for i in range(instances):
        rng = root.child(i)
        p = primes[int(rng.integers(0, len(primes)))]
        n, k, d = int(rng.integers(1, 4)), int(rng.integers(1, 3)), int(rng.integers(1, 3))
        # the properties are stated for maps of degree at most d
        phi = pm.random_polymap(p, n, k, int(rng.integers(1, d + 1)), rng)
        gamma = pm.random_polymap(p, n, k, int(rng.integers(1, d + 1)), rng)
        a = pm.arank_bruteforce(phi, d)
        nontrivial += a > 0
        checks = {
            "symmetry": abs(pm.arank_bruteforce(-phi, d) - a),
            "subadditivity": pm.arank_bruteforce(phi + gamma, d) - a
            - pm.arank_bruteforce(gamma, d),
        }
        keep_i = _random_subset(n, rng)
        rest = [v for v in range(n) if v not in keep_i]
        keep_j = [v for v in rest if rng.integers(0, 2)]
        a_i = pm.arank_bruteforce(pm.restrict(phi, keep_i), d)
        checks["monotonicity"] = a_i - a
        checks["lipschitz"] = (pm.arank_bruteforce(pm.restrict(phi, keep_i + keep_j), d)
                               - a_i - len(keep_j))
        for name, gap in checks.items():
            worst[name] = max(worst[name], gap)
            counts[name] += gap > RANK_SLACK
        if phi.degree >= 1:
            h = rng.integers(0, p, size=n)
            counts["derivative_degree"] += pm.derivative(phi, h).degree >= phi.degree
    rows = [{"property": name, "violations": counts[name],
             "worst_gap": worst[name] if math.isfinite(worst[name]) else None}
            for name in counts]
    passed = not any(counts.values())
    params = {"instances": instances, "p": primes}
    summary = {"total_violations": sum(counts.values()), "positive_rank_instances": nontrivial}
    return _record("rank-props", params, args.seed, rows, summary, passed)


def _prank(t: tn.Tensor) -> int | None:
    for limit in (3, 2, 1):
        try:
            return tn.prank_upper(t, limit)
        except EnumerationLimitError:
            continue
    return None


def cmd_tensor_props(args) -> dict:
    instances = args.instances or 200
    primes = _ints(args.p or "2,3")
    root = _root(args, "tensor-props")
    counts = dict.fromkeys(["multilinearity", "slot_symmetry", "matches_derivative",
                            "arank_le_prank", "integration_residual"], 0)
    prank_checked, residual_checked = 0, 0
    for i in range(instances):
        rng = root.child(i)
        p = primes[int(rng.integers(0, len(primes)))]
        n, k, d = int(rng.integers(1, 4)), int(rng.integers(1, 3)), int(rng.integers(1, 3))
        phi = pm.random_polymap(p, n, k, d, rng)
        if phi.degree < 1:
            continue
        t = tn.tensor_from_polymap(phi)
        dd = phi.degree
        ys = [rng.integers(0, p, size=n) for _ in range(dd)]
        v = rng.integers(0, p, size=k)
        val = t(*ys, v)
        counts["matches_derivative"] += val != tn.derivative_form(phi, ys, v)
        slot = int(rng.integers(0, dd))
        a, b = (int(s) for s in rng.integers(0, p, size=2))
        other = rng.integers(0, p, size=n)
        mixed = list(ys)
        mixed[slot] = (a * ys[slot] + b * other) % p
        swapped = list(ys)
        swapped[slot] = other
        lin = (a * val + b * t(*swapped, v)) % p
        counts["multilinearity"] += t(*mixed, v) != lin
        perm = rng.gen.permutation(dd).tolist()
        counts["slot_symmetry"] += t(*[ys[j] for j in perm], v) != val
        pr = _prank(t)
        if pr is not None:
            prank_checked += 1
            counts["arank_le_prank"] += tn.tensor_arank(t) > pr + RANK_SLACK
        if p == 3 and dd == 2:
            residual_checked += 1
            counts["integration_residual"] += tn.integration_residual_degree(phi) > dd - 1
    rows = [{"property": name, "violations": c} for name, c in counts.items()]
    summary = {"prank_checked": prank_checked, "residual_checked": residual_checked}
    passed = not any(counts.values()) and prank_checked > 0 and residual_checked > 0
    return _record("tensor-props", {"instances": instances, "p": primes}, args.seed, rows,
                   summary, passed)


# -- majority --------------------------------------------------------------


def cmd_majority(args) -> dict:
    t, k = args.t or 4, _ints(args.k or "8")[0]
    eps = _floats(args.eps or "0.125")[0]
    r, runs = args.reps or 25, args.trials or 200
    cap = args.list_cap if args.list_cap is not None else maj.default_list_cap(k)
    cap = None if cap <= 0 else cap
    root = _root(args, "majority")
    rows, passed = [], True
    try:
        hard = maj.find_hard_message(k, args.hard_trials, args.candidates, root.child(0),
                                     eps, args.c_const, cap)
    except maj.NoHardMessageError as e:
        return _record("majority", {"t": t, "k": k}, args.seed, [], {"error": str(e)}, False)
    hard_ok = hard.rate <= 0.25 + 2 * hard.stderr
    oracle = maj.ListDecoderIsBal(hard, k, eps, args.c_const, cap)
    for xi, x in enumerate(itertools.product((0, 1), repeat=t)):
        want = maj.majority(x)
        good = sum(maj.majority_via_isbal(np.array(x), oracle, r, root.child(1, xi, h)) == want
                   for h in range(runs))
        ok = good / runs >= 0.75
        passed &= ok
        rows.append({"x": list(x), "majority": want, "success": good / runs, "runs": runs,
                     "ok": ok})
    summary = {"hard_message": hard.m, "recovery_estimate": hard.rate,
               "recovery_stderr": hard.stderr, "hard_ok": hard_ok,
               "list_cap": cap, "coupling_holds": maj.coupling_holds(t)}
    if args.seeds:
        seeded = maj.seeded_boosted_oracle(oracle, r, args.seed)
        summary["derandomized_seed"] = maj.derandomize_by_seed_search(seeded, t, args.seeds)
    passed &= hard_ok and summary["coupling_holds"]
    params = {"t": t, "k": k, "eps": eps, "reps": r, "trials": runs,
              "candidates": args.candidates, "hard_trials": args.hard_trials,
              "c_const": args.c_const, "list_cap": cap, "seeds": args.seeds}
    return _record("majority", params, args.seed, rows, summary, passed)


# -- acceptance ------------------------------------------------------------

FULL = {
    1: ["xcheck", "--level", "formula", "--k", "4,6,8,10", "--trials", "1000"],
    2: ["decode", "--k", "8", "--eps", "0.05,0.1,0.25", "--instances", "100",
        "--trials", "10000"],
    3: ["list-decode", "--k", "8", "--eps", "0.1", "--c-const", "3", "--trials", "200"],
    4: ["xcheck", "--level", "gates", "--shots", "10000"],
    5: [["ghz-check", "--n", "8", "--trials", "100"], ["fanout-check", "--n", "6",
        "--trials", "50"], ["phase-and-check", "--k", "5"]],
    6: ["classical-sweep", "--d", "1", "--rho", "0.25,0.5,0.75", "--instances", "20",
        "--trials", "2000"],
    7: ["rank-props", "--instances", "500", "--p", "2,3"],
    8: ["tensor-props", "--instances", "300", "--p", "2,3"],
    9: ["classical-sweep", "--d", "2", "--k", "4,8,12", "--rho", "0.5", "--trials", "10000"],
    10: ["majority", "--t", "4", "--k", "8", "--eps", "0.125", "--reps", "25",
         "--trials", "200"],
}


def cmd_acceptance(args) -> dict:
    crit = args.criterion
    if crit not in FULL:
        raise UsageError(f"criterion must be one of {sorted(FULL)}")
    entry = FULL[crit]
    invocations = entry if isinstance(entry[0], list) else [entry]
    parts = []
    for argv in invocations:
        sub = build_parser().parse_args(list(argv) + ["--seed", str(args.seed)])
        parts.append(sub.func(sub))
    rows = [{"command": p["command"], "params": p["params"], "passed": p["passed"],
             "summary": p["summary"], "rows": p["rows"]} for p in parts]
    passed = all(p["passed"] for p in parts)
    return _record("acceptance", {"criterion": crit}, args.seed, rows, {}, passed)


# -- plumbing --------------------------------------------------------------


def _emit(record: dict, fmt: str, out) -> None:
    if fmt == "csv":
        rows = record["rows"]
        keys = list(dict.fromkeys(key for row in rows for key in row))
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({key: json.dumps(v) if isinstance(v, (list, dict)) else v
                             for key, v in row.items()})
        text = buf.getvalue()
    else:
        text = json.dumps(record, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


COMMANDS: dict[str, tuple[Callable, str]] = {
    "decode": (cmd_decode, "single-shot decoding under adversarial corruption"),
    "list-decode": (cmd_list_decode, "list decoding recall on fixed received words"),
    "xcheck": (cmd_xcheck, "closed form vs transform, or gate-level vs structured"),
    "ghz-check": (cmd_ghz_check, "GHZ builder on random measurement branches"),
    "fanout-check": (cmd_fanout_check, "fan-out and parity builders against ideal actions"),
    "phase-and-check": (cmd_phase_and_check, "phase-AND and friends against MCZ oracles"),
    "classical-sweep": (cmd_classical_sweep, "classical polynomial-map decoding bounds"),
    "rank-props": (cmd_rank_props, "analytic-rank properties by brute force"),
    "tensor-props": (cmd_tensor_props, "tensor multilinearity, symmetry and rank checks"),
    "majority": (cmd_majority, "MAJORITY from the list decoder via IsBal"),
    "resources": (cmd_resources, "depth, size and width certification for one builder"),
    "acceptance": (cmd_acceptance, "run one acceptance criterion by number"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None)
    common.add_argument("--k", default=None, help="integer or comma list")
    common.add_argument("--n", default=None, help="size parameter for non-k builders")
    common.add_argument("--eps", default=None, help="number or comma list")
    common.add_argument("--rho", default=None, help="number or comma list")
    common.add_argument("--p", default=None, help="prime or comma list")
    common.add_argument("--d", type=int, default=1)
    common.add_argument("--t", type=int, default=None)
    common.add_argument("--trials", type=int, default=None)
    common.add_argument("--shots", type=int, default=None)
    common.add_argument("--instances", type=int, default=None)
    common.add_argument("--reps", type=int, default=None)
    common.add_argument("--c-const", type=float, default=3.0)
    common.add_argument("--list-cap", type=int, default=None,
                        help="majority: list length cap, 0 for none (default 2^k/4)")
    common.add_argument("--candidates", type=int, default=64)
    common.add_argument("--hard-trials", type=int, default=200)
    common.add_argument("--seeds", type=int, default=0)
    common.add_argument("--builder", default=None, choices=sorted(shallow.BUILDERS))
    common.add_argument("--level", choices=("formula", "gates"), default="formula")
    common.add_argument("--criterion", type=int, default=None)

    parser = argparse.ArgumentParser(prog="shallowdecode", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)
    for name, (func, help_text) in COMMANDS.items():
        sp = subs.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(func=func)
    return parser


def run_command(argv: list[str] | None = None) -> tuple[int, dict | None]:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        record = args.func(args)
    except UsageError as e:
        parser.error(str(e))
    _emit(record, args.format, args.out)
    return (0 if record["passed"] else 1), record


def main(argv: list[str] | None = None) -> int:
    try:
        code, _ = run_command(argv)
    except (ValueError, EnumerationLimitError) as e:
        print(f"shallowdecode: error: {e}", file=sys.stderr)
        return 2
    return code


if __name__ == "__main__":
    sys.exit(main())
