"""Statevector simulator with mid-circuit measurement and classical control.

The state is stored sparsely: a dict from basis index to amplitude, where
bit i of the index is the value of qubit ``labels[i]``. A global phase is
tracked separately so phase-exact comparisons are possible.

Qubits are allocated in |0> the first time a gate references an unseen
label; a DISCARDed label is dead and may not be referenced again.

Circuits record gates in program order and place each one in the earliest
layer after everything it depends on (shared qubits, or a classical bit
written by one and read or written by the other). Execution follows program
order, which is one linearization of the layer order.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .noise import RngStream

PRUNE = 1e-13
DISCARD_TOL = 1e-10
_S = 1.0 / math.sqrt(2.0)

KINDS = ("H", "X", "Z", "CNOT", "CZ", "ZROT", "GLOBALPHASE", "MCZ",
         "MEASURE", "DISCARD", "CPARITY", "CC")


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[str, ...] = ()
    theta: float = 0.0
    inputs: tuple[str, ...] = ()     # classical bits read
    output: str | None = None        # classical bit written
    inner: Gate | None = None        # gate run when inputs[0] == 1 (CC)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown gate kind {self.kind}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError("repeated qubit operand")

    def all_qubits(self) -> tuple[str, ...]:
        return self.qubits + (self.inner.all_qubits() if self.inner else ())

    def reads(self) -> tuple[str, ...]:
        return self.inputs + (self.inner.reads() if self.inner else ())

    def writes(self) -> tuple[str, ...]:
        own = (self.output,) if self.output is not None else ()
        return own + (self.inner.writes() if self.inner else ())

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.qubits:
            d["qubits"] = list(self.qubits)
        if self.kind in ("ZROT", "GLOBALPHASE"):
            d["theta"] = self.theta
        if self.inputs:
            d["inputs"] = list(self.inputs)
        if self.output is not None:
            d["output"] = self.output
        if self.inner is not None:
            d["inner"] = self.inner.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> Gate:
        return cls(d["kind"], tuple(d.get("qubits", ())), float(d.get("theta", 0.0)),
                   tuple(d.get("inputs", ())), d.get("output"),
                   cls.from_dict(d["inner"]) if "inner" in d else None)


def H(q): return Gate("H", (q,))
def X(q): return Gate("X", (q,))
def Z(q): return Gate("Z", (q,))
def CNOT(c, t): return Gate("CNOT", (c, t))
def CZ(a, b): return Gate("CZ", (a, b))
def ZROT(q, theta): return Gate("ZROT", (q,), theta=float(theta))
def GLOBALPHASE(theta): return Gate("GLOBALPHASE", theta=float(theta))
def MCZ(*qs): return Gate("MCZ", tuple(qs))
def MEASURE(q, bit): return Gate("MEASURE", (q,), output=bit)
def DISCARD(q): return Gate("DISCARD", (q,))
def CPARITY(inputs, out): return Gate("CPARITY", inputs=tuple(inputs), output=out)
def CC(bit, inner): return Gate("CC", inputs=(bit,), inner=inner)


class Circuit:
    """Gates in program order, each assigned to an ASAP layer."""

    def __init__(self, inputs: Iterable[str] = ()):
        self.inputs = tuple(inputs)
        self.gates: list[Gate] = []
        self.layer_of: list[int] = []
        self._q_last: dict[str, int] = {}
        self._w_last: dict[str, int] = {}
        self._r_last: dict[str, int] = {}
        self._floor = 0

    def _earliest(self, g: Gate) -> int:
        lo = self._floor
        for q in g.all_qubits():
            lo = max(lo, self._q_last.get(q, -1) + 1)
        for b in g.reads():
            lo = max(lo, self._w_last.get(b, -1) + 1)
        for b in g.writes():
            lo = max(lo, self._w_last.get(b, -1) + 1, self._r_last.get(b, -1) + 1)
        return lo

    def append(self, g: Gate, layer: int | None = None) -> int:
        lo = self._earliest(g)
        if layer is None:
            layer = lo
        elif layer < lo:
            raise ValueError(f"gate {g.kind} cannot sit in layer {layer} (earliest {lo})")
        for q in g.all_qubits():
            self._q_last[q] = layer
        for b in g.reads():
            self._r_last[b] = max(self._r_last.get(b, -1), layer)
        for b in g.writes():
            self._w_last[b] = layer
        self.gates.append(g)
        self.layer_of.append(layer)
        return layer

    def extend(self, gates: Iterable[Gate]) -> None:
        for g in gates:
            self.append(g)

    def barrier(self) -> None:
        """Later gates start strictly after every layer used so far."""
        self._floor = self.depth

    @property
    def depth(self) -> int:
        return max(self.layer_of, default=-1) + 1

    @property
    def size(self) -> int:
        return sum(1 for g in self.gates if g.kind != "DISCARD")

    @property
    def layers(self) -> list[list[Gate]]:
        out: list[list[Gate]] = [[] for _ in range(self.depth)]
        for g, layer in zip(self.gates, self.layer_of):
            out[layer].append(g)
        return out

    def live_counts(self) -> list[int]:
        """Live qubits in each layer (a qubit is live from allocation through its DISCARD)."""
        depth = self.depth
        start = {q: 0 for q in self.inputs}
        end: dict[str, int] = {}
        for g, layer in zip(self.gates, self.layer_of):
            for q in g.all_qubits():
                start.setdefault(q, layer)
            if g.kind == "DISCARD":
                end[g.qubits[0]] = layer
        counts = [0] * max(depth, 1)
        for q, s in start.items():
            for layer in range(s, end.get(q, depth - 1) + 1):
                counts[layer] += 1
        return counts

    @property
    def peak_width(self) -> int:
        return max(self.live_counts() + [len(self.inputs)])

    def resources(self) -> dict:
        return {"depth": self.depth, "size": self.size, "peak_width": self.peak_width}

    def to_json(self) -> dict:
        layers: list[list[dict]] = [[] for _ in range(self.depth)]
        for seq, (g, layer) in enumerate(zip(self.gates, self.layer_of)):
            layers[layer].append(dict(g.to_dict(), seq=seq))
        return {"inputs": list(self.inputs), "layers": layers}

    @classmethod
    def from_json(cls, doc) -> Circuit:
        if isinstance(doc, str):
            doc = json.loads(doc)
        placed = [(rec["seq"], layer, Gate.from_dict(rec))
                  for layer, recs in enumerate(doc["layers"]) for rec in recs]
        circ = cls(doc.get("inputs", ()))
        for _, layer, g in sorted(placed, key=lambda t: t[0]):
            circ.append(g, layer)
        return circ


@dataclass
class QuantumState:
    labels: list[str]
    amps: dict[int, complex]
    phase: complex = 1.0 + 0j
    cbits: dict[str, int] = field(default_factory=dict)
    dead: set[str] = field(default_factory=set)
    max_live: int = 0

    def __post_init__(self):
        self.max_live = max(self.max_live, len(self.labels))

    @classmethod
    def empty(cls) -> QuantumState:
        return cls([], {0: 1.0 + 0j})

    @classmethod
    def basis(cls, labels: Iterable[str], bits: Iterable[int]) -> QuantumState:
        labels = list(labels)
        bits = list(bits)
        if len(bits) != len(labels):
            raise ValueError("one bit per label")
        key = sum(int(b) << i for i, b in enumerate(bits))
        return cls(labels, {key: 1.0 + 0j})

    @classmethod
    def from_vector(cls, labels: Iterable[str], vec) -> QuantumState:
        """Dense vector with labels[0] as the most significant bit."""
        labels = list(labels)
        m = len(labels)
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        if vec.shape[0] != 1 << m:
            raise ValueError("vector length must be 2^len(labels)")
        amps = {}
        for idx in np.flatnonzero(np.abs(vec) > PRUNE).tolist():
            key = sum(((idx >> (m - 1 - i)) & 1) << i for i in range(m))
            amps[key] = complex(vec[idx])
        return cls(labels, amps)

    def copy(self) -> QuantumState:
        return QuantumState(list(self.labels), dict(self.amps), self.phase,
                            dict(self.cbits), set(self.dead), self.max_live)

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amps.values()))

    def vector(self, order: Iterable[str] | None = None) -> np.ndarray:
        """Dense vector including the global phase; order[0] is the most significant bit."""
        order = list(self.labels if order is None else order)
        if sorted(order) != sorted(self.labels):
            raise ValueError("order must list exactly the live labels")
        m = len(order)
        shift = [m - 1 - order.index(lab) for lab in self.labels]
        out = np.zeros(1 << m, dtype=complex)
        for key, a in self.amps.items():
            idx = 0
            for i, s in enumerate(shift):
                if (key >> i) & 1:
                    idx |= 1 << s
            out[idx] += a
        return self.phase * out

    def bit_of(self, label: str) -> int:
        """Position of a live qubit, allocating it in |0> if never seen."""
        try:
            return self.labels.index(label)
        except ValueError:
            if label in self.dead:
                raise ValueError(f"qubit {label} was discarded") from None
            self.labels.append(label)
            self.max_live = max(self.max_live, len(self.labels))
            return len(self.labels) - 1


def _h(amps: dict[int, complex], m: int) -> dict[int, complex]:
    out: dict[int, complex] = {}
    for k, a in amps.items():
        b = a * _S
        k0 = k & ~m
        out[k0] = out.get(k0, 0j) + b
        out[k0 | m] = out.get(k0 | m, 0j) + (-b if k & m else b)
    return {k: a for k, a in out.items() if abs(a) > PRUNE}


def _measure(state: QuantumState, m: int, rng: RngStream | None, forced: int | None) -> int:
    total = 0.0
    p1 = 0.0
    for k, a in state.amps.items():
        w = a.real * a.real + a.imag * a.imag
        total += w
        if k & m:
            p1 += w
    p1 /= total
    if forced is None:
        if rng is None:
            raise ValueError("measurement needs an rng")
        outcome = 1 if rng.random() < p1 else 0
    else:
        outcome = int(forced)
    keep = p1 if outcome else 1.0 - p1
    if keep <= 1e-12:
        raise ValueError("forced outcome has zero probability")
    scale = 1.0 / math.sqrt(keep * total)
    want = m if outcome else 0
    state.amps = {k: a * scale for k, a in state.amps.items() if (k & m) == want}
    return outcome


def _discard(state: QuantumState, label: str) -> None:
    i = state.bit_of(label)
    m = 1 << i
    w1 = sum(abs(a) ** 2 for k, a in state.amps.items() if k & m)
    w0 = sum(abs(a) ** 2 for k, a in state.amps.items() if not k & m)
    value, off = (1, w0) if w1 > w0 else (0, w1)
    if off > DISCARD_TOL * (w0 + w1):
        raise ValueError(f"qubit {label} is entangled or in superposition; cannot discard")
    low = m - 1
    want = m if value else 0
    scale = 1.0 / math.sqrt(w1 if value else w0)
    state.amps = {(k & low) | ((k >> (i + 1)) << i): a * scale
                  for k, a in state.amps.items() if (k & m) == want}
    state.labels.pop(i)
    state.dead.add(label)


def apply(state: QuantumState, gate: Gate, rng: RngStream | None = None,
          forced: Mapping[str, int] | None = None) -> QuantumState:
    """Apply one gate in place and return the state.

    `forced` maps classical bit labels to predetermined measurement outcomes.
    """
    kind = gate.kind
    if kind == "CC":
        bit = gate.inputs[0]
        if bit not in state.cbits:
            raise KeyError(f"classical bit {bit} not set")
        if state.cbits[bit]:
            apply(state, gate.inner, rng, forced)
        return state
    if kind == "CPARITY":
        missing = [b for b in gate.inputs if b not in state.cbits]
        if missing:
            raise KeyError(f"classical bits not set: {missing}")
        state.cbits[gate.output] = sum(state.cbits[b] for b in gate.inputs) & 1
        return state
    if kind == "GLOBALPHASE":
        state.phase *= cmath.exp(1j * gate.theta)
        return state
    if kind == "DISCARD":
        _discard(state, gate.qubits[0])
        return state

    masks = [1 << state.bit_of(q) for q in gate.qubits]
    amps = state.amps
    if kind == "H":
        state.amps = _h(amps, masks[0])
    elif kind == "X":
        m = masks[0]
        state.amps = {k ^ m: a for k, a in amps.items()}
    elif kind == "Z":
        m = masks[0]
        state.amps = {k: (-a if k & m else a) for k, a in amps.items()}
    elif kind == "CNOT":
        mc, mt = masks
        state.amps = {(k ^ mt if k & mc else k): a for k, a in amps.items()}
    elif kind in ("CZ", "MCZ"):
        m = sum(masks)
        state.amps = {k: (-a if k & m == m else a) for k, a in amps.items()}
    elif kind == "ZROT":
        m = masks[0]
        e0 = cmath.exp(1j * gate.theta)
        e1 = e0.conjugate()
        state.amps = {k: a * (e1 if k & m else e0) for k, a in amps.items()}
    elif kind == "MEASURE":
        f = None if forced is None else forced.get(gate.output)
        state.cbits[gate.output] = _measure(state, masks[0], rng, f)
    return state


def run(circuit: Circuit, initial: QuantumState | None = None,
        rng: RngStream | None = None,
        forced: Mapping[str, int] | None = None,
        stop: int | None = None) -> QuantumState:
    """Execute `circuit` (its first `stop` gates, if given) on a copy of `initial`."""
    state = QuantumState.empty() if initial is None else initial.copy()
    for q in circuit.inputs:
        state.bit_of(q)
    gates = circuit.gates if stop is None else circuit.gates[:stop]
    for g in gates:
        apply(state, g, rng, forced)
    return state


def statevector_distance(a: QuantumState, b: QuantumState) -> float:
    """l2 distance between phase-included vectors over the same live labels."""
    if sorted(a.labels) != sorted(b.labels):
        raise ValueError("states have different live labels")
    pos = [b.labels.index(lab) for lab in a.labels]
    remapped: dict[int, complex] = {}
    for key, amp in b.amps.items():
        new = 0
        for i, s in enumerate(pos):
            if (key >> s) & 1:
                new |= 1 << i
        remapped[new] = remapped.get(new, 0j) + amp
    total = 0.0
    for key in set(a.amps) | set(remapped):
        diff = a.phase * a.amps.get(key, 0j) - b.phase * remapped.get(key, 0j)
        total += abs(diff) ** 2
    return math.sqrt(total)
