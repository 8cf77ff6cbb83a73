"""Dealer state preparation, two-level encoding, and distribution plans.

The dealer prepares a (k+1) x (k+1) grid of N-qupit registers: position
(0,0) carries the encoded coin state, the rest of row 0 carries uniform
sums over all encoded values, and every other register carries the encoded
zero.  Component i of each register goes to player i, who re-encodes it
into N qupits and forwards component j to player j; afterwards every node
holds one qupit per (origin, register) pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import qudit_sim as qs
from ..packed import PackedState
from .code import RSCode


def encode(code: RSCode, state: qs.SparseState) -> qs.SparseState:
    """Encode a single qudit into an N-qudit register.

    Each logical basis state |a> maps to the uniform superposition over
    the code's evaluation tuples for a; superpositions extend linearly.
    """
    if state.num_qupits != 1:
        raise qs.UsageError("encode expects a single-qupit state")
    if state.dim != code.prime:
        raise qs.ConfigError("state dimension must match the code's field")
    reps = code.codewords_per_value
    state.check_budget(state.num_terms() * reps)
    scale = 1.0 / math.sqrt(reps)
    terms: dict[tuple[int, ...], complex] = {}
    for (a,), amp in state.terms.items():
        for row in code.codeword_matrix(a):
            terms[tuple(int(x) for x in row)] = amp * scale
    return qs.SparseState(code.length, code.prime, terms, state.term_budget)


def expand_qupit(state: qs.SparseState, index: int, code: RSCode) -> qs.SparseState:
    """Re-encode one qudit of a register in place, growing it into N qudits.

    The qudit at ``index`` is replaced by the code's N-qudit encoding of
    its value; used by players on each received share.
    """
    if state.dim != code.prime:
        raise qs.ConfigError("state dimension must match the code's field")
    reps = code.codewords_per_value
    state.check_budget(state.num_terms() * reps)
    scale = 1.0 / math.sqrt(reps)
    terms: dict[tuple[int, ...], complex] = {}
    for basis, amp in state.terms.items():
        head, tail = basis[:index], basis[index + 1 :]
        for row in code.codeword_matrix(basis[index]):
            terms[head + tuple(int(x) for x in row) + tail] = amp * scale
    return qs.SparseState(state.num_qupits + code.length - 1, state.dim, terms, state.term_budget)


@dataclass
class RegisterGrid:
    """The dealer's (k+1) x (k+1) registers, as explicit sparse states."""

    owner: int
    k: int
    registers: dict[tuple[int, int], qs.SparseState]

    def register(self, row: int, col: int) -> qs.SparseState:
        return self.registers[(row, col)]

    def total_qupits(self) -> int:
        return sum(s.num_qupits for s in self.registers.values())


def register_kind(row: int, col: int) -> str:
    if row == 0 and col == 0:
        return "data"
    if row == 0:
        return "uniform"
    return "zero"


def prepare_dealer_grid(n_nodes: int, code: RSCode, k: int, dealer: int = 0,
                        term_budget: int = qs.DEFAULT_TERM_BUDGET,
                        encoded_zero: bool = True) -> RegisterGrid:
    """First-level register grid, before any distribution.

    ``encoded_zero=False`` prepares the literal all-zero product state in
    the zero registers instead of the encoded zero, for ablation; honest
    verification only passes exactly with the encoded form.
    """
    if n_nodes >= code.prime:
        raise qs.ConfigError("node count must be below the qudit dimension")
    if k < 0:
        raise qs.ConfigError("security parameter must be nonnegative")
    P = code.prime
    registers = {}
    for row in range(k + 1):
        for col in range(k + 1):
            kind = register_kind(row, col)
            if kind == "data":
                logical = qs.uniform_superposition(n_nodes, P, term_budget)
                registers[(row, col)] = encode(code, logical)
            elif kind == "uniform":
                amp = 1.0 / math.sqrt(P)
                logical = qs.SparseState(1, P, {(a,): amp for a in range(P)}, term_budget)
                registers[(row, col)] = encode(code, logical)
            elif encoded_zero:
                registers[(row, col)] = encode(code, qs.make_basis_state(1, [0], P, term_budget))
            else:
                registers[(row, col)] = qs.make_basis_state(
                    code.length, [0] * code.length, P, term_budget
                )
    return RegisterGrid(owner=dealer, k=k, registers=registers)


def distribution_plan_round1(n_nodes: int, k: int, dealer: int) -> list[tuple]:
    """(register row, register col, component i, from dealer, to node i).

    The dealer keeps its own components; every other component is one
    teleported qupit.
    """
    plan = []
    for row in range(k + 1):
        for col in range(k + 1):
            for i in range(n_nodes):
                plan.append((row, col, i, dealer, i))
    return plan


def distribution_plan_round2(n_nodes: int, k: int) -> list[tuple]:
    """(register row, register col, origin i, component j, from i, to j)."""
    plan = []
    for row in range(k + 1):
        for col in range(k + 1):
            for i in range(n_nodes):
                for j in range(n_nodes):
                    plan.append((row, col, i, j, i, j))
    return plan


@dataclass
class ShareTable:
    """Who holds which qupit after both distribution rounds.

    ``slots[node]`` maps (origin, register row, register col) to the flat
    qupit index inside that register's tree state.
    """

    n_nodes: int
    k: int
    slots: dict[int, dict[tuple[int, int, int], int]] = field(default_factory=dict)

    @classmethod
    def build(cls, n_nodes: int, k: int) -> "ShareTable":
        table = cls(n_nodes, k)
        for node in range(n_nodes):
            mine = {}
            for row in range(k + 1):
                for col in range(k + 1):
                    for origin in range(n_nodes):
                        mine[(origin, row, col)] = origin * n_nodes + node
            table.slots[node] = mine
        return table

    def qupits_per_node(self) -> int:
        return len(next(iter(self.slots.values())))


def build_register_tree(
    kind: str,
    n_nodes: int,
    code: RSCode,
    term_budget: int = qs.DEFAULT_TERM_BUDGET,
    level1_rows: np.ndarray | None = None,
) -> PackedState:
    """Fully shared register as a packed N^2-qupit state.

    Both encoding levels are applied: level-1 codewords (by register kind,
    or explicit ``level1_rows`` for tampered dealers) and the per-player
    re-encoding of every component.  Qupit (origin i, holder j) sits at
    flat index i*N + j.
    """
    P, N, t = code.prime, n_nodes, code.degree
    if level1_rows is None:
        if kind == "data":
            l1 = np.concatenate([code.codeword_matrix(a) for a in range(N)])
        elif kind == "uniform":
            l1 = code.all_codewords()
        elif kind == "zero":
            l1 = code.codeword_matrix(0)
        else:
            raise ValueError(f"unknown register kind {kind!r}")
    else:
        l1 = np.asarray(level1_rows, dtype=np.uint8).reshape(-1, N)
    reps = code.codewords_per_value
    total = len(l1) * reps**N
    if total > term_budget:
        raise qs.BudgetError(f"{total} terms would exceed the budget of {term_budget}")
    grids = np.indices((reps,) * N).reshape(N, -1).T  # (reps^N, N)
    blocks = []
    for l1row in l1:
        block = np.empty((reps**N, N * N), dtype=np.uint8)
        for i in range(N):
            block[:, i * N : (i + 1) * N] = code.codeword_matrix(int(l1row[i]))[grids[:, i]]
        blocks.append(block)
    digits = np.concatenate(blocks)
    amps = np.full(len(digits), 1.0 / math.sqrt(len(digits)), dtype=complex)
    return PackedState(digits, amps, P, term_budget)


def apply_round1_noise(tree: PackedState, code: RSCode, component: int, a: int, b: int) -> None:
    """Pauli X^a Z^b hitting level-1 component i in transit, expressed on
    the fully re-encoded tree.

    The shift acts as +a on every qupit of origin i's block (the encoding
    of v+a is the encoding of v translated by the constant codeword of a);
    the phase w^(b*v_i) factors through Lagrange interpolation into
    per-qupit phases w^(b*lambda_j*digit).
    """
    P, N = code.prime, code.length
    base = component * N
    if a % P:
        cols = slice(base, base + N)
        tree.digits = tree.digits.copy()
        tree.digits[:, cols] = (tree.digits[:, cols].astype(np.int64) + a) % P
    if b % P:
        omega = np.exp(2j * np.pi / P)
        for j, pj in enumerate(code.points):
            lam = 1
            for m, pm in enumerate(code.points):
                if m != j:
                    lam = lam * pm % P * pow(pm - pj, -1, P) % P
            exponent = (b * lam) % P
            if exponent:
                tree.amps = tree.amps * omega ** (
                    exponent * tree.digits[:, base + j].astype(np.int64)
                )
