import cmath
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shallowdecode.noise import RngStream
from shallowdecode.qsim import (CC, CNOT, CPARITY, CZ, DISCARD, GLOBALPHASE, MCZ, MEASURE, ZROT,
                                Circuit, Gate, H, QuantumState, X, Z, apply, run,
                                statevector_distance)

S = 1 / math.sqrt(2)


def test_bell_pair_vector():
    c = Circuit(["a", "b"])
    c.extend([H("a"), CNOT("a", "b")])
    st_ = run(c)
    assert np.allclose(st_.vector(["a", "b"]), [S, 0, 0, S])


def test_zrot_convention_and_global_phase():
    st_ = QuantumState.from_vector(["q"], [S, S])
    apply(st_, ZROT("q", 0.3))
    apply(st_, GLOBALPHASE(0.1))
    want = np.array([S * cmath.exp(0.4j), S * cmath.exp(-0.2j)])
    assert np.allclose(st_.vector(), want, atol=1e-14)


def test_mcz_flips_only_all_ones():
    vec = np.full(8, 1 / math.sqrt(8), dtype=complex)
    st_ = apply(QuantumState.from_vector(["a", "b", "c"], vec), MCZ("a", "b", "c"))
    want = vec.copy()
    want[7] *= -1
    assert np.allclose(st_.vector(["a", "b", "c"]), want)


def test_vector_ordering_puts_first_label_high():
    st_ = QuantumState.basis(["a", "b"], [1, 0])
    assert st_.vector(["a", "b"]).tolist() == [0, 0, 1, 0]
    assert st_.vector(["b", "a"]).tolist() == [0, 1, 0, 0]


def test_measurement_statistics(rng):
    ones = 0
    for s in range(2000):
        st_ = run(Circuit(), QuantumState.from_vector(["q"], [math.sqrt(0.3), math.sqrt(0.7)]))
        apply(st_, MEASURE("q", "m"), rng.child(s))
        ones += st_.cbits["m"]
    assert abs(ones / 2000 - 0.7) < 4 * math.sqrt(0.21 / 2000)


def test_forced_measurement_and_zero_probability_branch():
    st_ = QuantumState.from_vector(["q"], [S, S])
    apply(st_, MEASURE("q", "m"), forced={"m": 1})
    assert st_.cbits["m"] == 1 and np.allclose(st_.vector(), [0, 1])
    with pytest.raises(ValueError):
        apply(QuantumState.basis(["q"], [0]), MEASURE("q", "m"), forced={"m": 1})


def test_discard_requires_a_definite_qubit():
    st_ = QuantumState.from_vector(["a", "b"], [S, 0, 0, S])
    with pytest.raises(ValueError):
        apply(st_, DISCARD("a"))
    st_ = QuantumState.basis(["a", "b"], [1, 0])
    apply(st_, DISCARD("a"))
    assert st_.labels == ["b"]
    with pytest.raises(ValueError):
        apply(st_, X("a"))


def test_classical_control_and_parity():
    c = Circuit()
    c.extend([X("a"), MEASURE("a", "m0"), MEASURE("b", "m1"), CPARITY(["m0", "m1"], "s"),
              CC("s", X("t"))])
    st_ = run(c, rng=RngStream(0))
    assert st_.cbits == {"m0": 1, "m1": 0, "s": 1}
    assert st_.vector(["a", "b", "t"]).tolist()[0b101] == 1


def test_layers_follow_dependencies():
    c = Circuit(["a", "b", "c"])
    assert c.append(H("a")) == 0
    assert c.append(H("b")) == 0
    assert c.append(CNOT("a", "b")) == 1
    assert c.append(MEASURE("b", "m")) == 2
    assert c.append(CC("m", X("c"))) == 3       # reads m after it is written
    assert c.append(CPARITY(["m"], "s")) == 3   # shared read of m is fine
    assert c.append(MEASURE("a", "m")) == 4     # rewriting m waits for its readers
    assert c.depth == 5 and c.size == 7


def test_barrier_sets_a_floor():
    c = Circuit(["a", "b"])
    c.append(H("a"))
    c.append(H("a"))
    c.barrier()
    assert c.append(H("b")) == 2


def test_explicit_layer_must_respect_dependencies():
    c = Circuit(["a"])
    c.append(H("a"))
    with pytest.raises(ValueError):
        c.append(X("a"), layer=0)
    assert c.append(X("a"), layer=4) == 4


def test_size_excludes_discard_and_width_counts_live_qubits():
    c = Circuit(["a"])
    c.extend([H("b"), CNOT("b", "a"), MEASURE("b", "m"), DISCARD("b"), H("e"), DISCARD("e")])
    assert c.size == 4
    # ASAP puts H(e) in layer 0, alongside a and b
    assert c.peak_width == 3
    c.barrier()
    c.extend([H("f"), DISCARD("f")])
    assert c.peak_width == 3


def test_circuit_json_round_trip():
    c = Circuit(["a"])
    c.extend([H("a"), ZROT("a", 0.25), MEASURE("a", "m"), CC("m", Z("b")), CZ("a", "b")])
    back = Circuit.from_json(json.dumps(c.to_json()))
    assert back.gates == c.gates and back.layer_of == c.layer_of


def test_unknown_gate_rejected():
    with pytest.raises(ValueError):
        Gate("T", ("a",))
    with pytest.raises(ValueError):
        CNOT("a", "a")


unitary_gate = st.sampled_from(["H", "X", "Z", "CNOT", "CZ", "ZROT"])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(unitary_gate, st.integers(0, 2), st.integers(0, 2),
                          st.floats(-3, 3)), max_size=25))
def test_unitary_circuits_match_dense_matrices(ops):
    labels = ["a", "b", "c"]
    c = Circuit(labels)
    dense = np.zeros(8, dtype=complex)
    dense[0] = 1
    eye = np.eye(2)
    hm = np.array([[1, 1], [1, -1]]) * S
    xm = np.array([[0, 1], [1, 0]])
    zm = np.diag([1, -1])

    def one(m, q):
        mats = [m if i == q else eye for i in range(3)]
        return np.kron(np.kron(mats[0], mats[1]), mats[2])

    for kind, q, r, theta in ops:
        if kind in ("CNOT", "CZ") and q == r:
            continue
        if kind == "H":
            c.append(H(labels[q])); u = one(hm, q)
        elif kind == "X":
            c.append(X(labels[q])); u = one(xm, q)
        elif kind == "Z":
            c.append(Z(labels[q])); u = one(zm, q)
        elif kind == "ZROT":
            c.append(ZROT(labels[q], theta))
            u = one(np.diag([cmath.exp(1j * theta), cmath.exp(-1j * theta)]), q)
        else:
            idx = np.arange(8)
            bq, br = (idx >> (2 - q)) & 1, (idx >> (2 - r)) & 1
            if kind == "CNOT":
                u = np.zeros((8, 8))
                u[idx ^ (bq << (2 - r)), idx] = 1
                c.append(CNOT(labels[q], labels[r]))
            else:
                u = np.diag(np.where(bq & br, -1, 1))
                c.append(CZ(labels[q], labels[r]))
        dense = u @ dense
    st_ = run(c)
    assert np.allclose(st_.vector(labels), dense, atol=1e-10)


def test_statevector_distance_aligns_labels():
    a = QuantumState.basis(["x", "y"], [1, 0])
    b = QuantumState.basis(["y", "x"], [0, 1])
    assert statevector_distance(a, b) == pytest.approx(0.0)
    c = QuantumState.basis(["x", "y"], [1, 0])
    c.phase = -1
    assert statevector_distance(a, c) == pytest.approx(2.0)
