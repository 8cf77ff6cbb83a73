"""Quantum-aided Byzantine agreement: simulation and resource analysis.

Subpackages and modules:

- ``qudit_sim``: sparse state-vector engine for registers of prime-dimension
  qudits ("qupits"), with interleaved measurement to keep sparsity bounded.
- ``arith_circuits``: qubit-level reversible circuits (multiplier mod 7,
  modular adder, QFT) with depth/width/cost metering.
- ``vqss``: share-and-verify phases of verifiable quantum secret sharing,
  driving the sparse backend.
- ``consensus``: the classical agreement state machine, the common-coin
  subprotocol, gradecast, and adversary strategies.
- ``netsim``: synchronous network fabric with Bell-pair accounting.
- ``resources``: analytic resource estimates (qubits, depth, KQ, traffic).
- ``cli``: experiment runner.
"""

__version__ = "0.1.0"
