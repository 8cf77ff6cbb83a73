"""Qubit-level reversible circuits for the verifier's modular arithmetic.

The multiplier mod 7 is a three-qubit network of classically enabled gate
groups: which groups fire for a given multiplier b is decided by four
boolean enable signals computed from the bits of b.  A network of plain
wire swaps and NOTs can only realise maps of the form x -> pi(x) xor m,
which is affine over GF(2)^3, and x -> 3x mod 7 is not affine - so the
swap groups are dressed controlled-swap networks found by exhaustive
search (scripts/synthesize_networks.py) and verified here against the
brute-force product oracle.

Gate vocabulary (GateRecord.kind):

- ``NOT``    one operand
- ``CNOT``   (*controls, target); one control is a plain CNOT, two is a
             Toffoli, three a triply controlled NOT
- ``SWAP``   two distinct operands
- ``CPHASE`` two operands plus an angle
- ``ROT``    one operand; only the Hadamard ("H") is used

Gates may carry a ``classical_condition`` naming a boolean runtime signal;
the gate acts only when the signal is true.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

PERMUTATION_KINDS = ("NOT", "CNOT", "SWAP")
PHASE_KINDS = ("CPHASE", "ROT")

# CNOT-equivalent gate costs.  NOT/CNOT/CPHASE are unit cost, a SWAP is
# three CNOTs, single-qubit rotations count half a CNOT (summed per layer
# and rounded up).  Multi-controlled NOTs are priced by their standard
# decompositions: a Toffoli as six CNOTs, a triply controlled NOT as two
# Toffolis through a workspace line.
GATE_COST = {
    ("NOT", 1): 1.0,
    ("CNOT", 2): 1.0,
    ("CNOT", 3): 6.0,   # Toffoli
    ("CNOT", 4): 12.0,  # CCC-NOT via two Toffolis and a workspace line
    ("SWAP", 2): 3.0,
    ("CPHASE", 2): 1.0,
    ("ROT", 1): 0.5,
}

# Depth contribution of one gate, in unit-time one/two-qubit layers, again
# from the standard decompositions: a Toffoli takes six CNOT layers; a
# triply controlled NOT is a simplified (relative-phase) Toffoli pair
# around a full Toffoli through a workspace line.  Swaps take no quantum
# time: they are wire relabelings tracked in software, the same convention
# that drops the Fourier circuit's final bit reversal.
GATE_DEPTH = {
    ("NOT", 1): 1,
    ("CNOT", 2): 1,
    ("CNOT", 3): 6,
    ("CNOT", 4): 13,
    ("SWAP", 2): 0,
    ("CPHASE", 2): 1,
    ("ROT", 1): 1,
}

# Workspace lines consumed by a gate's decomposition, beyond its operands.
GATE_WORKSPACE = {
    ("CNOT", 4): 1,
}


class CircuitError(Exception):
    pass


@dataclass(frozen=True)
class GateRecord:
    kind: str
    operands: tuple[int, ...]
    classical_condition: str | None = None
    angle: float | None = None

    def __post_init__(self):
        if self.kind == "NOT" and len(self.operands) != 1:
            raise CircuitError("NOT takes exactly one operand")
        if self.kind == "SWAP" and (
            len(self.operands) != 2 or self.operands[0] == self.operands[1]
        ):
            raise CircuitError("SWAP takes two distinct operands")
        if self.kind == "CNOT" and len(self.operands) < 2:
            raise CircuitError("CNOT takes at least one control and a target")
        if len(set(self.operands)) != len(self.operands):
            raise CircuitError("gate operands must be distinct")


@dataclass
class QubitCircuit:
    num_qubits: int
    gates: list[GateRecord] = field(default_factory=list)
    classical_controls: list[str] = field(default_factory=list)
    signal_defaults: dict[str, bool] = field(default_factory=dict)

    def add(self, kind, operands, condition=None, angle=None):
        ops = tuple(int(q) for q in operands)
        for q in ops:
            if not (0 <= q < self.num_qubits):
                raise CircuitError(f"qubit {q} out of range for {self.num_qubits}-qubit circuit")
        if condition is not None and condition not in self.classical_controls:
            self.classical_controls.append(condition)
        self.gates.append(GateRecord(kind, ops, condition, angle))

    def is_permutation_only(self) -> bool:
        return all(g.kind in PERMUTATION_KINDS for g in self.gates)

    def to_netlist(self) -> str:
        """One gate per line: ``KIND q1[,q2...][ @signal]``; deterministic."""
        lines = []
        for g in self.gates:
            line = f"{g.kind} {','.join(str(q) for q in g.operands)}"
            if g.angle is not None:
                line += f" angle={g.angle:.12g}"
            if g.classical_condition:
                line += f" @{g.classical_condition}"
            lines.append(line)
        return "\n".join(lines)


@dataclass(frozen=True)
class CostMetrics:
    depth: int
    width: int
    cnot_cost: int


def enable_signals(b: int) -> tuple[bool, bool, bool, bool]:
    """Boolean enables (en_swap1, en_swap2, en_swap3, en_not) for 0 < b < 7.

    Sums of products over the bits (b2, b1, b0) of the multiplier.
    """
    if not (0 < b < 7):
        raise CircuitError(f"multiplier {b} outside 1..6")
    b2, b1, b0 = (b >> 2) & 1, (b >> 1) & 1, b & 1
    nb2, nb1, nb0 = 1 - b2, 1 - b1, 1 - b0
    en_swap1 = bool(nb2 & b1 & nb0 | nb2 & b1 & b0 | b2 & nb1 & nb0 | b2 & nb1 & b0)
    en_swap2 = bool(nb2 & b1 & nb0 | b2 & nb1 & b0)
    en_swap3 = bool(nb2 & b1 & b0 | b2 & nb1 & nb0)
    en_not = bool(nb2 & b1 & nb0 | b2 & nb1 & nb0 | b2 & b1 & nb0)
    return en_swap1, en_swap2, en_swap3, en_not


# Gate groups of the multiplier network, one per enable signal, applied in
# slot order.  Found by breadth-first synthesis; each controlled swap is
# stored decomposed (CNOT, Toffoli, CNOT).  With the slot-1 swap named S,
# the groups satisfy  slot2 o S = x5,  slot3 o S = x3,  slot_not = x6
# as permutations of 0..7 fixing 0 and 7, which with the enable table
# yields b*x mod 7 for every multiplier.
_MULT7_SLOTS = [
    ("en_swap1", [("SWAP", (0, 1))]),
    (
        "en_swap2",
        [
            ("NOT", (0,)),
            ("CNOT", (2, 1)),
            ("CNOT", (2, 0)),  # controlled swap of (0, 2) on qubit 1
            ("CNOT", (1, 0, 2)),
            ("CNOT", (2, 0)),
            ("NOT", (0,)),
            ("CNOT", (0, 1)),
        ],
    ),
    (
        "en_swap3",
        [
            ("NOT", (1,)),
            ("CNOT", (2, 0)),
            ("CNOT", (2, 1)),  # controlled swap of (1, 2) on qubit 0
            ("CNOT", (0, 1, 2)),
            ("CNOT", (2, 1)),
            ("NOT", (1,)),
            ("CNOT", (1, 0)),
        ],
    ),
    (
        "en_not",
        [
            ("NOT", (0,)),
            ("NOT", (1,)),
            ("CNOT", (2, 0)),
            ("CNOT", (2, 1)),  # controlled swap of (1, 2) on qubit 0
            ("CNOT", (0, 1, 2)),
            ("CNOT", (2, 1)),
            ("CNOT", (2, 0)),
            ("NOT", (2,)),
        ],
    ),
]

_ENABLE_NAMES = ("en_swap1", "en_swap2", "en_swap3", "en_not")


def build_mult7(b: int, offset: int = 0, circuit: QubitCircuit | None = None) -> QubitCircuit:
    """In-place multiplier: |x> -> |b*x mod 7> on three qubits.

    Input 7 (binary 111) is outside the residue alphabet; the network maps
    it to itself, completing a permutation of all eight basis states.  The
    enable signals for the given b are recorded in the circuit's signal
    defaults so simulation without explicit signals uses them.
    """
    if not (0 < b < 7):
        raise CircuitError(f"multiplier {b} outside 1..6")
    own = circuit is None
    if own:
        circuit = QubitCircuit(3)
    for name, gates in _MULT7_SLOTS:
        for kind, ops in gates:
            circuit.add(kind, tuple(q + offset for q in ops), condition=name)
    if own:
        circuit.signal_defaults = dict(zip(_ENABLE_NAMES, enable_signals(b)))
    return circuit


# Cyclic adders x -> x + c mod 7 fixing 7, from the same synthesis run.
_PLUS_NETWORKS = {
    1: [("CNOT", (1, 2, 0)), ("CNOT", (0, 1, 2)), ("CNOT", (0, 1)), ("NOT", (0,))],
    2: [
        ("CNOT", (1, 2, 0)),
        ("CNOT", (1, 0)),  # controlled swap of (0, 1) on qubit 2
        ("CNOT", (2, 0, 1)),
        ("CNOT", (1, 0)),
        ("CNOT", (1, 2)),
        ("NOT", (1,)),
    ],
    4: [
        ("CNOT", (0, 2, 1)),
        ("CNOT", (2, 1)),  # controlled swap of (1, 2) on qubit 0
        ("CNOT", (0, 1, 2)),
        ("CNOT", (2, 1)),
        ("CNOT", (2, 0)),
        ("NOT", (2,)),
    ],
}


def _add_controlled_plus(circuit, control, targets, c):
    """x -> x + c mod 7 on the target triple, controlled by one qubit."""
    for kind, ops in _PLUS_NETWORKS[c]:
        mapped = tuple(targets[q] for q in ops)
        if kind == "NOT":
            circuit.add("CNOT", (control,) + mapped)
        else:  # CNOT gains one control
            circuit.add("CNOT", (control,) + mapped)


def build_modadd7() -> QubitCircuit:
    """|v>|w> -> |v>|v + w mod 7> on qubits (v0,v1,v2,w0,w1,w2) plus one
    workspace line (qubit 6) used by the triply controlled NOTs and
    returned clean.

    Adds 1, 2 and 4 mod 7 into w, each controlled by the matching bit of
    v.  Both registers hold residues; the all-ones pattern is fixed.
    """
    c = QubitCircuit(7)
    w = (3, 4, 5)
    for bit, const in ((0, 1), (1, 2), (2, 4)):
        _add_controlled_plus(c, bit, w, const)
    return c


def build_cx_b(b: int) -> QubitCircuit:
    """|V>|W> -> |V>|V + b*W mod 7> on qubits (V: 0-2, W: 3-5) plus the
    adder workspace line.

    Composed as the in-place multiplier on W followed by the modular
    addition of V into W; the multiplier needs no workspace, so there is
    nothing left to uncompute.
    """
    if not (0 < b < 7):
        raise CircuitError(f"multiplier {b} outside 1..6")
    c = QubitCircuit(7)
    build_mult7(b, offset=3, circuit=c)
    add = build_modadd7()
    c.gates.extend(add.gates)
    c.signal_defaults = dict(zip(_ENABLE_NAMES, enable_signals(b)))
    return c


def build_baseline_modmul(b: int) -> QubitCircuit:
    """Generic in-place multiplier mod 7 in the shift-and-add style.

    Computes b*x into a 3-qubit accumulator by conditionally adding the
    shifted multiples b, 2b, 4b (each reduced mod 7), swaps the
    accumulator into the data register, then uncomputes the old value by
    subtracting b^-1 times the product.  Functionally equal to
    build_mult7 on residues but pays for the out-of-place pass and its
    uncomputation.
    """
    if not (0 < b < 7):
        raise CircuitError(f"multiplier {b} outside 1..6")
    c = QubitCircuit(7)
    x = (0, 1, 2)
    acc = (3, 4, 5)
    binv = pow(b, -1, 7)

    def add_const_multiple(control, targets, value):
        # decompose value into the synthesized cyclic adders
        value %= 7
        for part in _const_parts(value):
            _add_controlled_plus(c, control, targets, part)

    # acc := b * x
    for k in range(3):
        add_const_multiple(x[k], acc, (b << k) % 7)
    for i, j in zip(x, acc):
        c.add("SWAP", (i, j))
    # acc now holds the old x; uncompute it from the product: for each
    # product bit, subtract binv * 2^k (subtraction as the additive
    # complement mod 7).
    for k in range(3):
        add_const_multiple(x[k], acc, (-(binv << k)) % 7)
    return c


def _const_parts(value):
    parts = []
    for p in (4, 2, 1):
        while value >= p:
            parts.append(p)
            value -= p
    return parts


def build_qft3() -> QubitCircuit:
    """Binary three-qubit Fourier circuit: Hadamards and controlled
    phases; the final bit reversal is a relabeling, not gates."""
    c = QubitCircuit(3)
    c.add("ROT", (0,), angle=None)
    c.add("CPHASE", (1, 0), angle=math.pi / 2)
    c.add("ROT", (1,), angle=None)
    c.add("CPHASE", (2, 0), angle=math.pi / 4)
    c.add("CPHASE", (2, 1), angle=math.pi / 2)
    c.add("ROT", (2,), angle=None)
    return c


def simulate_permutation(circuit: QubitCircuit, value: int, signals: dict | None = None) -> int:
    """Exact basis action of a permutation-only circuit on one input."""
    if not circuit.is_permutation_only():
        raise CircuitError("circuit contains phase gates; use simulate_statevector")
    if circuit.num_qubits > 24:
        raise CircuitError("permutation simulation limited to 24 qubits")
    if not (0 <= value < (1 << circuit.num_qubits)):
        raise CircuitError("input outside basis range")
    if signals is None:
        signals = getattr(circuit, "signal_defaults", {})
    x = value
    for g in circuit.gates:
        if g.classical_condition is not None and not signals.get(g.classical_condition, False):
            continue
        if g.kind == "NOT":
            x ^= 1 << g.operands[0]
        elif g.kind == "CNOT":
            *controls, target = g.operands
            if all((x >> c) & 1 for c in controls):
                x ^= 1 << target
        elif g.kind == "SWAP":
            a, b = g.operands
            if ((x >> a) & 1) != ((x >> b) & 1):
                x ^= (1 << a) | (1 << b)
    return x


def simulate_statevector(
    circuit: QubitCircuit, value: int, signals: dict | None = None
) -> np.ndarray:
    """Dense statevector simulation, for circuits with phase gates."""
    n = circuit.num_qubits
    if n > 12:
        raise CircuitError("statevector simulation limited to 12 qubits")
    if signals is None:
        signals = getattr(circuit, "signal_defaults", {})
    dim = 1 << n
    state = np.zeros(dim, dtype=complex)
    state[value] = 1.0
    idx = np.arange(dim)
    h = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    for g in circuit.gates:
        if g.classical_condition is not None and not signals.get(g.classical_condition, False):
            continue
        if g.kind in PERMUTATION_KINDS:
            perm = np.zeros(dim, dtype=np.int64)
            for x in range(dim):
                yx = x
                if g.kind == "NOT":
                    yx = x ^ (1 << g.operands[0])
                elif g.kind == "CNOT":
                    *controls, target = g.operands
                    if all((x >> c) & 1 for c in controls):
                        yx = x ^ (1 << target)
                else:
                    a, b = g.operands
                    if ((x >> a) & 1) != ((x >> b) & 1):
                        yx = x ^ ((1 << a) | (1 << b))
                perm[yx] = x
            state = state[perm]
        elif g.kind == "CPHASE":
            a, b = g.operands
            mask = (((idx >> a) & 1) & ((idx >> b) & 1)).astype(bool)
            state = state.copy()
            state[mask] *= np.exp(1j * g.angle)
        elif g.kind == "ROT":
            (t,) = g.operands
            state = state.reshape(-1)
            lo = idx[((idx >> t) & 1) == 0]
            hi = lo | (1 << t)
            new = state.copy()
            new[lo] = h[0, 0] * state[lo] + h[0, 1] * state[hi]
            new[hi] = h[1, 0] * state[lo] + h[1, 1] * state[hi]
            state = new
    return state


def simulate_circuit(circuit: QubitCircuit, value: int, signals: dict | None = None):
    """Basis index for permutation circuits, dense statevector otherwise."""
    if circuit.is_permutation_only():
        return simulate_permutation(circuit, value, signals)
    return simulate_statevector(circuit, value, signals)


def layering(circuit: QubitCircuit) -> list[list[GateRecord]]:
    """Greedy layers: gates touching disjoint qubits share a layer."""
    layers: list[list[GateRecord]] = []
    busy_until: dict[int, int] = {}
    for g in circuit.gates:
        start = max((busy_until.get(q, 0) for q in g.operands), default=0)
        while len(layers) <= start:
            layers.append([])
        layers[start].append(g)
        for q in g.operands:
            busy_until[q] = start + 1
    return layers


def metrics(circuit: QubitCircuit, signals: dict | None = None) -> CostMetrics:
    """Depth, width and CNOT-equivalent cost under the shipped tables.

    Depth sums per-layer durations, a layer lasting as long as its deepest
    gate's standard 1-2 qubit decomposition.  When ``signals`` is given,
    classically disabled gates are excluded; by default all gates count
    (the hardware must fit the worst case).  Width adds workspace lines
    required by gate decompositions beyond the circuit's own wires.
    """
    counted = []
    for g in circuit.gates:
        if signals is not None and g.classical_condition is not None:
            if not signals.get(g.classical_condition, False):
                continue
        counted.append(g)
    sub = QubitCircuit(circuit.num_qubits, counted)
    layers = layering(sub)
    depth = 0
    cost = 0.0
    workspace = 0
    for layer in layers:
        if not layer:
            continue
        depth += max(GATE_DEPTH[(g.kind, len(g.operands))] for g in layer)
        layer_cost = 0.0
        rot_cost = 0.0
        for g in layer:
            key = (g.kind, len(g.operands))
            if g.kind == "ROT":
                rot_cost += GATE_COST[key]
            else:
                layer_cost += GATE_COST[key]
            workspace = max(workspace, GATE_WORKSPACE.get(key, 0))
        cost += layer_cost + math.ceil(rot_cost)
    if counted and depth < 1:
        depth = 1  # a nonempty circuit takes at least one time step
    return CostMetrics(depth=int(depth), width=circuit.num_qubits + workspace, cnot_cost=int(math.ceil(cost)))
