import itertools
import math

import numpy as np
import pytest

from shallowdecode import shallow
from shallowdecode.noise import RngStream
from shallowdecode.qsim import QuantumState, run, statevector_distance

TOL = 1e-10


def ghz(n):
    v = np.zeros(1 << n, dtype=complex)
    v[0] = v[-1] = 1 / math.sqrt(2)
    return v


def index(bits):
    return int("".join(map(str, bits)), 2)


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_ghz_on_random_branches(n):
    rep = shallow.build_ghz(n)
    ideal = QuantumState.from_vector(rep.outputs, ghz(n))
    for b in range(30):
        st = run(rep.circuit, rng=RngStream(n, b))
        assert statevector_distance(st, ideal) <= TOL
        assert st.max_live <= rep.peak_width


def test_ghz_both_parities_one_before_correction():
    rep = shallow.build_ghz(3)
    stop = next(i for i, g in enumerate(rep.circuit.gates) if g.kind == "CPARITY")
    forced = {"ghz.m0": 1, "ghz.m1": 1}
    pre = run(rep.circuit, forced=forced, stop=stop).vector(list(rep.outputs))
    want = np.zeros(8, dtype=complex)
    want[0b010] = want[0b101] = 1 / math.sqrt(2)
    assert np.allclose(pre, want, atol=TOL)
    flips = [g.inner.qubits for g in rep.circuit.gates if g.kind == "CC"]
    assert flips == [("q1",), ("q2",)]
    post = run(rep.circuit, forced=forced)
    assert post.cbits["ghz.s0"] == 1 and post.cbits["ghz.s1"] == 0
    assert np.allclose(post.vector(list(rep.outputs)), ghz(3), atol=TOL)


@pytest.mark.parametrize("outcome", [0, 1])
def test_bell_state_on_both_branches(outcome):
    rep = shallow.build_ghz(2)
    st = run(rep.circuit, forced={"ghz.m0": outcome})
    assert np.allclose(st.vector(list(rep.outputs)), ghz(2), atol=TOL)


def ideal_fanout(vec, nt):
    idx = np.arange(vec.shape[0])
    out = np.zeros_like(vec)
    out[idx ^ ((idx >> nt) * ((1 << nt) - 1))] = vec
    return out


@pytest.mark.parametrize("nt", range(1, 7))
def test_fanout_matches_ideal_operator(nt):
    rep = shallow.build_fanout(nt)
    labels = list(rep.inputs)
    for b in range(10):
        rng = RngStream(nt, b)
        vec = rng.gen.normal(size=1 << (nt + 1)) + 1j * rng.gen.normal(size=1 << (nt + 1))
        vec /= np.linalg.norm(vec)
        st = run(rep.circuit, QuantumState.from_vector(labels, vec), rng=rng)
        assert sorted(st.labels) == sorted(labels)
        assert np.allclose(st.vector(labels), ideal_fanout(vec, nt), atol=TOL)


def test_fanout_classical_and_plus_control():
    rep = shallow.build_fanout(2)
    st = run(rep.circuit, QuantumState.basis(rep.inputs, [1, 0, 0]), rng=RngStream(1))
    assert st.vector(list(rep.inputs))[0b111] == pytest.approx(1)
    start = np.zeros(8, dtype=complex)
    start[0b001] = start[0b101] = 1 / math.sqrt(2)       # |+>|01>
    st = run(rep.circuit, QuantumState.from_vector(rep.inputs, start), rng=RngStream(2))
    want = np.zeros(8, dtype=complex)
    want[0b001] = want[0b110] = 1 / math.sqrt(2)
    assert np.allclose(st.vector(list(rep.inputs)), want, atol=TOL)


@pytest.mark.parametrize("n", [1, 2, 4, 5])
def test_parity_truth_table(n):
    rep = shallow.build_quantum_parity(n)
    for bits in itertools.product((0, 1), repeat=n + 1):
        st = run(rep.circuit, QuantumState.basis(rep.inputs, bits), rng=RngStream(n))
        want = list(bits[:-1]) + [bits[-1] ^ (sum(bits[:-1]) % 2)]
        assert statevector_distance(st, QuantumState.basis(rep.inputs, want)) <= TOL


@pytest.mark.parametrize("k", range(1, 6))
def test_phase_and_matches_mcz_with_global_phase(k):
    rep = shallow.build_phase_and(k)
    for bits in itertools.product((0, 1), repeat=k):
        st = run(rep.circuit, QuantumState.basis(rep.inputs, bits), rng=RngStream(k))
        want = np.zeros(1 << k, dtype=complex)
        want[index(bits)] = -1 if all(bits) else 1
        assert np.allclose(st.vector(list(rep.inputs)), want, atol=TOL)


def test_phase_and_on_superposition():
    rep = shallow.build_phase_and(3)
    rng = RngStream(3, 3)
    vec = rng.gen.normal(size=8) + 1j * rng.gen.normal(size=8)
    vec /= np.linalg.norm(vec)
    st = run(rep.circuit, QuantumState.from_vector(rep.inputs, vec), rng=rng)
    want = vec.copy()
    want[7] *= -1
    assert np.allclose(st.vector(list(rep.inputs)), want, atol=TOL)


@pytest.mark.parametrize("k", range(1, 5))
def test_and_into_target_truth_table(k):
    rep = shallow.build_and_into_target(k)
    for bits in itertools.product((0, 1), repeat=k + 1):
        st = run(rep.circuit, QuantumState.basis(rep.inputs, bits), rng=RngStream(k))
        want = list(bits[:-1]) + [bits[-1] ^ int(all(bits[:-1]))]
        assert statevector_distance(st, QuantumState.basis(rep.inputs, want)) <= TOL


def test_conditional_phase_flip():
    rep = shallow.build_conditional_phase_flip(2, [1, 0], 1)
    for bits in itertools.product((0, 1), repeat=2):
        st = run(rep.circuit, QuantumState.basis(rep.inputs, bits), rng=RngStream(0))
        sign = -1 if list(bits) == [1, 0] else 1
        assert st.vector(list(rep.inputs))[index(bits)] == pytest.approx(sign)
    idle = shallow.build_conditional_phase_flip(3, [0, 1, 1], 0)
    assert idle.size == 0


def test_conditional_phase_flip_equals_ancilla_variant():
    # X-conjugated phase-AND vs AND into |-> ancilla: same action on the inputs
    k, y = 2, [0, 1]
    phase = shallow.build_conditional_phase_flip(k, y, 1)
    from shallowdecode.qsim import Circuit, H, X
    anc = Circuit(["z0", "z1", "tgt"])
    anc.append(X("tgt"))
    anc.append(H("tgt"))
    for q, b in zip(["z0", "z1"], y):
        if not b:
            anc.append(X(q))
    shallow.emit_and_into_target(anc, ["z0", "z1"], "tgt", "and")
    for q, b in zip(["z0", "z1"], y):
        if not b:
            anc.append(X(q))
    anc.append(H("tgt"))
    anc.append(X("tgt"))
    rng = RngStream(9)
    vec = rng.gen.normal(size=4) + 1j * rng.gen.normal(size=4)
    vec /= np.linalg.norm(vec)
    a = run(phase.circuit, QuantumState.from_vector(["z0", "z1"], vec), rng=rng)
    b = run(anc, QuantumState.from_vector(["z0", "z1", "tgt"], np.kron(vec, [1, 0])), rng=rng)
    assert np.allclose(b.vector(["z0", "z1", "tgt"]), np.kron(a.vector(["z0", "z1"]), [1, 0]),
                       atol=TOL)


def test_depth_is_constant_in_size():
    assert shallow.build_ghz(2).depth == shallow.build_ghz(40).depth
    assert shallow.build_fanout(1).depth == shallow.build_fanout(30).depth
    assert shallow.build_quantum_parity(1).depth == shallow.build_quantum_parity(30).depth
    assert shallow.build_phase_and(2).depth == shallow.build_phase_and(6).depth
    assert shallow.build_and_into_target(1).depth == shallow.build_and_into_target(5).depth


def test_size_fit_constant():
    reps = [shallow.build_phase_and(k) for k in range(1, 7)]
    c = max(r.constant for r in reps)
    assert all(r.size <= c * r.scale for r in reps)
    assert c < 30
    # sizes grow like k 2^k: the ratio settles instead of growing
    assert reps[-1].constant - reps[-2].constant < 1.0


def test_no_live_ancillas_in_structure():
    for rep in (shallow.build_fanout(4), shallow.build_phase_and(4),
                shallow.build_and_into_target(3)):
        live_at_end = rep.circuit.live_counts()[-1]
        assert live_at_end == len(rep.outputs)


@pytest.mark.parametrize("k", range(1, 9))
def test_subset_parity_identity(k):
    for z in itertools.product((0, 1), repeat=k):
        assert shallow.subset_parity_identity(z) == int(all(z))


def test_builder_ranges():
    for bad in (lambda: shallow.build_ghz(1), lambda: shallow.build_fanout(0),
                lambda: shallow.build_phase_and(7), lambda: shallow.build_and_into_target(6),
                lambda: shallow.build_conditional_phase_flip(2, [1], 1)):
        with pytest.raises(ValueError):
            bad()


def test_report_json():
    doc = shallow.build_phase_and(3).to_json(with_circuit=True)
    assert doc["bound"] == "size <= c*k*2^k"
    assert sum(len(layer) for layer in doc["circuit"]["layers"]) >= doc["size"]
