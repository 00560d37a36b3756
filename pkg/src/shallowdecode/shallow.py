"""Constant-depth circuit builders: GHZ, fan-out, parity, phase-AND and friends.

Each ``emit_*`` function appends gates to an existing circuit, naming its
ancillas and classical bits under ``tag``. Each ``build_*`` function wraps
one emitter in a fresh circuit and reports its resources.

Emission order matters only for simulation cost: layers are assigned ASAP,
so the structural depth does not depend on it.

OR-reduction hook: an OR of k bits can be obtained from a routine that
prepares a state on ceil(log2(k+1)) qubits encoding the input weight; that
routine is not built here, and callers needing OR should pass an emitter
with the signature of ``emit_phase_and``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .qsim import (CC, CNOT, CPARITY, DISCARD, GLOBALPHASE, MEASURE, ZROT, Circuit,
                   H, X, Z)

MAX_PHASE_AND_K = 6


@dataclass
class BuilderReport:
    name: str
    params: dict
    circuit: Circuit
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    bound: str
    scale: int
    depth: int = field(init=False)
    size: int = field(init=False)
    peak_width: int = field(init=False)

    def __post_init__(self):
        self.depth = self.circuit.depth
        self.size = self.circuit.size
        self.peak_width = self.circuit.peak_width

    @property
    def constant(self) -> float:
        """size / scale, the constant certified for the declared bound."""
        return self.size / self.scale if self.scale else 0.0

    def to_json(self, with_circuit: bool = False) -> dict:
        d = {"name": self.name, "params": self.params, "depth": self.depth,
             "size": self.size, "peak_width": self.peak_width, "bound": self.bound,
             "constant": self.constant, "inputs": list(self.inputs),
             "outputs": list(self.outputs)}
        if with_circuit:
            d["circuit"] = self.circuit.to_json()
        return d


def emit_ghz(circ: Circuit, data: list[str], tag: str) -> None:
    """Turn fresh qubits `data` (all |0>) into a GHZ state.

    Ancilla i measures the parity of data i and i+1; data i+1 is flipped when
    the prefix parity of the outcomes up to i is 1.
    """
    n = len(data)
    if n < 2:
        raise ValueError("GHZ needs at least two qubits")
    anc = [f"{tag}.a{i}" for i in range(n - 1)]
    bits = [f"{tag}.m{i}" for i in range(n - 1)]
    circ.append(H(data[0]))
    for i in range(n - 1):
        # data i+1 first so each data qubit's two CNOTs land in consecutive layers
        circ.append(H(data[i + 1]))
        circ.append(CNOT(data[i + 1], anc[i]))
        circ.append(CNOT(data[i], anc[i]))
        circ.append(MEASURE(anc[i], bits[i]))
        circ.append(DISCARD(anc[i]))
    for i in range(n - 1):
        s = f"{tag}.s{i}"
        circ.append(CPARITY(bits[:i + 1], s))
        circ.append(CC(s, X(data[i + 1])))


def _fanout_core(circ: Circuit, control: str, targets: list[str], ghz: list[str],
                 tag: str) -> None:
    d0 = f"{tag}.d0"
    circ.append(CNOT(control, ghz[0]))
    circ.append(MEASURE(ghz[0], d0))
    circ.append(DISCARD(ghz[0]))
    outs = []
    for j, t in enumerate(targets, start=1):
        circ.append(CC(d0, X(ghz[j])))
        circ.append(CNOT(ghz[j], t))
        circ.append(H(ghz[j]))
        b = f"{tag}.d{j}"
        outs.append(b)
        circ.append(MEASURE(ghz[j], b))
        circ.append(DISCARD(ghz[j]))
    zbit = f"{tag}.z"
    circ.append(CPARITY(outs, zbit))
    circ.append(CC(zbit, Z(control)))


def emit_fanout(circ: Circuit, control: str, targets: list[str], tag: str) -> None:
    """targets[i] ^= control for all i, consuming a fresh GHZ_{n+1} resource."""
    if not targets:
        raise ValueError("fan-out needs at least one target")
    ghz = [f"{tag}.g{j}" for j in range(len(targets) + 1)]
    emit_ghz(circ, ghz, f"{tag}.ghz")
    _fanout_core(circ, control, targets, ghz, tag)


def emit_parity(circ: Circuit, inputs: list[str], target: str, tag: str) -> None:
    """target ^= XOR(inputs): fan-out from target, conjugated by Hadamards."""
    if not inputs:
        raise ValueError("parity needs at least one input")
    ghz = [f"{tag}.g{j}" for j in range(len(inputs) + 1)]
    emit_ghz(circ, ghz, f"{tag}.ghz")
    wires = list(inputs) + [target]
    for q in wires:
        circ.append(H(q))
    _fanout_core(circ, target, list(inputs), ghz, tag)
    for q in wires:
        circ.append(H(q))


def subset_angle(size: int, k: int) -> float:
    return math.pi * (-1) ** size / 2 ** k


def subset_parity_identity(z) -> int:
    """2^-k * sum_S (-1)^|S| (-1)^(XOR of z over S), over all S including the empty set."""
    k = len(z)
    total = 0
    for r in range(k + 1):
        for sub in itertools.combinations(range(k), r):
            total += (-1) ** r * (-1) ** (sum(z[i] for i in sub) & 1)
    if total % 2 ** k:
        raise ArithmeticError("subset sum not divisible by 2^k")
    return total // 2 ** k


def emit_phase_and(circ: Circuit, inputs: list[str], tag: str) -> None:
    """Multiply the state by (-1)^{AND(inputs)} exactly, global phase included.

    Singleton subsets rotate the input itself. Each larger subset S gets its
    own copies of the inputs (made by fan-out), an ancilla holding their
    parity, and a rotation by pi (-1)^|S| / 2^k; the empty set contributes a
    global phase of pi / 2^k. Stages are separated by barriers so that the
    ancillas of different stages are never live together.
    """
    k = len(inputs)
    if k < 1:
        raise ValueError("phase-AND needs at least one input")
    big = [s for r in range(2, k + 1) for s in itertools.combinations(range(k), r)]
    circ.append(GLOBALPHASE(math.pi / 2 ** k))
    for q in inputs:
        circ.append(ZROT(q, subset_angle(1, k)))
    if not big:
        return

    def name(s):
        return "".join(map(str, s))

    holder = {(i, s): f"{tag}.c{i}_{name(s)}" for s in big for i in s}
    copies = {i: [holder[(i, s)] for s in big if i in s] for i in range(k)}
    parity = {s: f"{tag}.p{name(s)}" for s in big}

    for i in range(k):
        emit_fanout(circ, inputs[i], copies[i], f"{tag}.cp{i}")
    circ.barrier()
    for s in big:
        emit_parity(circ, [holder[(i, s)] for i in s], parity[s], f"{tag}.pa{name(s)}")
        circ.append(ZROT(parity[s], subset_angle(len(s), k)))
    circ.barrier()
    for s in big:
        emit_parity(circ, [holder[(i, s)] for i in s], parity[s], f"{tag}.pu{name(s)}")
        circ.append(DISCARD(parity[s]))
    circ.barrier()
    for i in range(k):
        emit_fanout(circ, inputs[i], copies[i], f"{tag}.uc{i}")
        for c in copies[i]:
            circ.append(DISCARD(c))


def emit_and_into_target(circ: Circuit, inputs: list[str], target: str, tag: str) -> None:
    """target ^= AND(inputs), as H(target) . phase-AND(inputs + target) . H(target)."""
    circ.append(H(target))
    emit_phase_and(circ, list(inputs) + [target], tag)
    circ.append(H(target))


def emit_conditional_phase_flip(circ: Circuit, inputs: list[str], y, c_y: int,
                                tag: str) -> None:
    """Phase (-1)^{c_y} on basis state |y>, identity elsewhere."""
    if len(y) != len(inputs):
        raise ValueError("y must have one bit per input")
    if not c_y:
        return
    flips = [q for q, b in zip(inputs, y) if not b]
    for q in flips:
        circ.append(X(q))
    emit_phase_and(circ, list(inputs), tag)
    for q in flips:
        circ.append(X(q))


def build_ghz(n: int) -> BuilderReport:
    if n < 2:
        raise ValueError("n must be at least 2")
    circ = Circuit()
    data = [f"q{i}" for i in range(n)]
    emit_ghz(circ, data, "ghz")
    return BuilderReport("ghz", {"n": n}, circ, (), tuple(data), "size <= c*n", n)


def build_fanout(n_targets: int) -> BuilderReport:
    if n_targets < 1:
        raise ValueError("n_targets must be at least 1")
    targets = [f"t{i}" for i in range(n_targets)]
    circ = Circuit(["ctrl"] + targets)
    emit_fanout(circ, "ctrl", targets, "fo")
    io = ("ctrl", *targets)
    return BuilderReport("fanout", {"n_targets": n_targets}, circ, io, io,
                         "size <= c*n", n_targets)


def build_quantum_parity(n_inputs: int) -> BuilderReport:
    if n_inputs < 1:
        raise ValueError("n_inputs must be at least 1")
    xs = [f"x{i}" for i in range(n_inputs)]
    circ = Circuit(xs + ["tgt"])
    emit_parity(circ, xs, "tgt", "par")
    io = (*xs, "tgt")
    return BuilderReport("parity", {"n_inputs": n_inputs}, circ, io, io,
                         "size <= c*n", n_inputs)


def build_phase_and(k: int) -> BuilderReport:
    if not 1 <= k <= MAX_PHASE_AND_K:
        raise ValueError(f"k must lie in [1, {MAX_PHASE_AND_K}]")
    zs = [f"z{i}" for i in range(k)]
    circ = Circuit(zs)
    emit_phase_and(circ, zs, "pand")
    return BuilderReport("phase-and", {"k": k}, circ, tuple(zs), tuple(zs),
                         "size <= c*k*2^k", k * 2 ** k)


def build_and_into_target(k: int) -> BuilderReport:
    if not 1 <= k <= 5:
        raise ValueError("k must lie in [1, 5]")
    zs = [f"z{i}" for i in range(k)]
    circ = Circuit(zs + ["tgt"])
    emit_and_into_target(circ, zs, "tgt", "and")
    io = (*zs, "tgt")
    return BuilderReport("and-into-target", {"k": k}, circ, io, io,
                         "size <= c*(k+1)*2^(k+1)", (k + 1) * 2 ** (k + 1))


def build_conditional_phase_flip(k: int, y, c_y: int) -> BuilderReport:
    y = [int(b) for b in y]
    if len(y) != k or not 1 <= k <= 5:
        raise ValueError("need 1 <= k <= 5 and |y| = k")
    zs = [f"z{i}" for i in range(k)]
    circ = Circuit(zs)
    emit_conditional_phase_flip(circ, zs, y, c_y, "cpf")
    return BuilderReport("conditional-phase-flip", {"k": k, "y": y, "c_y": int(c_y)},
                         circ, tuple(zs), tuple(zs), "size <= c*k*2^k", k * 2 ** k)


BUILDERS = {
    "ghz": build_ghz,
    "fanout": build_fanout,
    "parity": build_quantum_parity,
    "phase-and": build_phase_and,
    "and-into-target": build_and_into_target,
}
