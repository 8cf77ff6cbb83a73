"""Sparse state-vector engine for registers of prime-dimension qudits.

Every gate the sharing/verification protocol needs except the single-qudit
Fourier transform is a permutation of computational basis states, so a state
is stored as a map from basis tuples to complex amplitudes.  The Fourier
transform multiplies the number of stored terms by at most the qudit
dimension; measurements shrink it again.  A hard ``term_budget`` turns
uncontrolled growth into a loud error instead of silent truncation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

# Amplitudes below this magnitude are dropped after renormalisation.
PRUNE_TOL = 1e-12

# Normalisation must hold to this tolerance after every operation.
NORM_TOL = 1e-9

DEFAULT_TERM_BUDGET = 10_000_000


class QuditSimError(Exception):
    """Base class for simulator errors."""


class DomainError(QuditSimError):
    """A value lies outside the qudit alphabet."""


class ConfigError(QuditSimError):
    """Inconsistent construction parameters."""


class UsageError(QuditSimError):
    """An operation was applied in a way that is never meaningful."""


class BudgetError(QuditSimError):
    """The sparse representation would exceed its term budget."""


@dataclass
class SparseState:
    """Sparse amplitude map over ``num_qupits`` qudits of dimension ``dim``.

    ``terms`` maps basis tuples (entries in ``0..dim-1``) to amplitudes.
    The state is kept normalised; operations renormalise and prune tiny
    amplitudes before returning.
    """

    num_qupits: int
    dim: int
    terms: dict[tuple[int, ...], complex] = field(default_factory=dict)
    term_budget: int = DEFAULT_TERM_BUDGET

    def norm_sq(self) -> float:
        return sum(abs(a) ** 2 for a in self.terms.values())

    def num_terms(self) -> int:
        return len(self.terms)

    def copy(self) -> "SparseState":
        return SparseState(self.num_qupits, self.dim, dict(self.terms), self.term_budget)

    def check_budget(self, projected_terms: int) -> None:
        if projected_terms > self.term_budget:
            raise BudgetError(
                f"{projected_terms} terms would exceed the budget of {self.term_budget}"
            )

    def renormalize(self) -> None:
        n = math.sqrt(self.norm_sq())
        if n == 0.0:
            raise QuditSimError("state collapsed to zero norm")
        inv = 1.0 / n
        pruned = {}
        for basis, amp in self.terms.items():
            amp *= inv
            if abs(amp) > PRUNE_TOL:
                pruned[basis] = amp
        self.terms = pruned

    def amplitude(self, basis: tuple[int, ...]) -> complex:
        return self.terms.get(basis, 0.0 + 0.0j)

    def fidelity(self, other: "SparseState") -> float:
        """|<self|other>|^2, for states over identical registers."""
        if (self.num_qupits, self.dim) != (other.num_qupits, other.dim):
            raise UsageError("fidelity requires states over identical registers")
        small, big = (self.terms, other.terms) if len(self.terms) < len(other.terms) else (other.terms, self.terms)
        ip = sum(amp.conjugate() * big.get(basis, 0.0) for basis, amp in small.items())
        return abs(ip) ** 2


@dataclass(frozen=True)
class QupitRef:
    """Handle to one qudit inside a SparseState."""

    state: SparseState
    index: int

    def __post_init__(self):
        if not (0 <= self.index < self.state.num_qupits):
            raise UsageError(
                f"qupit index {self.index} out of range for {self.state.num_qupits}-qupit state"
            )


def _index_of(state: SparseState, target) -> int:
    if isinstance(target, QupitRef):
        if target.state is not state:
            raise UsageError("QupitRef does not belong to this state")
        return target.index
    idx = int(target)
    if not (0 <= idx < state.num_qupits):
        raise UsageError(f"qupit index {idx} out of range")
    return idx


def make_basis_state(
    n: int,
    values: list[int] | tuple[int, ...],
    dim: int,
    term_budget: int = DEFAULT_TERM_BUDGET,
) -> SparseState:
    """Product basis state |values[0] ... values[n-1]>."""
    if len(values) != n:
        raise ConfigError(f"expected {n} values, got {len(values)}")
    for v in values:
        if not (0 <= v < dim):
            raise DomainError(f"basis value {v} outside 0..{dim - 1}")
    return SparseState(n, dim, {tuple(int(v) for v in values): 1.0 + 0.0j}, term_budget)


def uniform_superposition(
    num_values: int, dim: int, term_budget: int = DEFAULT_TERM_BUDGET
) -> SparseState:
    """Single-qudit state (|0> + ... + |num_values-1>)/sqrt(num_values).

    The source of shared randomness for the common coin: the number of
    superposed values is the node count, which must stay below the qudit
    dimension.
    """
    if num_values >= dim:
        raise ConfigError(f"need num_values < dim, got {num_values} >= {dim}")
    if num_values < 1:
        raise ConfigError("num_values must be positive")
    amp = 1.0 / math.sqrt(num_values)
    return SparseState(1, dim, {(v,): amp for v in range(num_values)}, term_budget)


def apply_add_const(state: SparseState, target, c: int) -> SparseState:
    """Basis permutation |v> -> |v + c mod dim> on the target qudit."""
    idx = _index_of(state, target)
    if not (0 <= c < state.dim):
        raise DomainError(f"constant {c} outside 0..{state.dim - 1}")
    if c == 0:
        return state
    P = state.dim
    new_terms = {}
    for basis, amp in state.terms.items():
        b = list(basis)
        b[idx] = (b[idx] + c) % P
        new_terms[tuple(b)] = amp
    state.terms = new_terms
    return state


def apply_cx_b(state: SparseState, control, target, b: int) -> SparseState:
    """Joint basis permutation |V>|W> -> |V>|V + b*W mod dim>.

    ``b = 0`` is rejected: the map W -> V + 0*W is not a bijection in W,
    so the gate would not be reversible.  Challenge values are always
    drawn from 1..dim-1.
    """
    ci = _index_of(state, control)
    ti = _index_of(state, target)
    if ci == ti:
        raise UsageError("control and target must be distinct qupits")
    if not (0 < b < state.dim):
        raise DomainError(f"multiplier {b} outside 1..{state.dim - 1}")
    P = state.dim
    new_terms = {}
    for basis, amp in state.terms.items():
        nb = list(basis)
        nb[ti] = (basis[ci] + b * basis[ti]) % P
        new_terms[tuple(nb)] = amp
    state.terms = new_terms
    return state


def apply_cx_b_inverse(state: SparseState, control, target, b: int) -> SparseState:
    """Inverse of apply_cx_b: |V>|W> -> |V>|(W - V) * b^-1 mod dim>."""
    ci = _index_of(state, control)
    ti = _index_of(state, target)
    if ci == ti:
        raise UsageError("control and target must be distinct qupits")
    if not (0 < b < state.dim):
        raise DomainError(f"multiplier {b} outside 1..{state.dim - 1}")
    P = state.dim
    binv = pow(b, -1, P)
    new_terms = {}
    for basis, amp in state.terms.items():
        nb = list(basis)
        nb[ti] = ((basis[ti] - basis[ci]) * binv) % P
        new_terms[tuple(nb)] = amp
    state.terms = new_terms
    return state


def apply_pauli(state: SparseState, target, a: int, b: int) -> SparseState:
    """Generalized Pauli X^a Z^b on one qudit: |v> -> w^(b*v) |v + a mod dim>."""
    idx = _index_of(state, target)
    P = state.dim
    a %= P
    b %= P
    if a == 0 and b == 0:
        return state
    omega = cmath.exp(2j * cmath.pi / P)
    new_terms = {}
    for basis, amp in state.terms.items():
        if b:
            amp = amp * omega ** (b * basis[idx])
        nb = list(basis)
        nb[idx] = (nb[idx] + a) % P
        new_terms[tuple(nb)] = amp
    state.terms = new_terms
    return state


def apply_fourier(state: SparseState, target, inverse: bool = False) -> SparseState:
    """|a> -> (1/sqrt(dim)) sum_b w^(ab) |b>, conjugated for the inverse.

    Term count may grow by a factor of up to ``dim``; the budget is
    enforced before expansion.
    """
    idx = _index_of(state, target)
    P = state.dim
    state.check_budget(len(state.terms) * P)
    sign = -1.0 if inverse else 1.0
    omega_pows = [cmath.exp(sign * 2j * cmath.pi * k / P) for k in range(P)]
    inv_sqrt = 1.0 / math.sqrt(P)
    new_terms: dict[tuple[int, ...], complex] = {}
    for basis, amp in state.terms.items():
        a = basis[idx]
        pre = list(basis)
        for out in range(P):
            pre[idx] = out
            key = tuple(pre)
            new_terms[key] = new_terms.get(key, 0.0) + amp * omega_pows[(a * out) % P] * inv_sqrt
    state.terms = new_terms
    state.renormalize()
    return state


def measure(state: SparseState, target, rng: np.random.Generator) -> tuple[int, SparseState]:
    """Sample one qudit in the computational basis and collapse.

    Outcome follows the Born rule; the post-measurement state is
    renormalised.  The generator is the only source of randomness.
    """
    idx = _index_of(state, target)
    P = state.dim
    probs = [0.0] * P
    for basis, amp in state.terms.items():
        probs[basis[idx]] += abs(amp) ** 2
    total = sum(probs)
    outcome = int(rng.choice(P, p=[p / total for p in probs]))
    state.terms = {b: a for b, a in state.terms.items() if b[idx] == outcome}
    state.renormalize()
    return outcome, state


def born_sample(state: SparseState, rng: np.random.Generator) -> tuple[int, ...]:
    """Sample a full basis tuple from |amplitude|^2 without collapsing."""
    keys = list(state.terms.keys())
    weights = np.array([abs(state.terms[k]) ** 2 for k in keys])
    weights /= weights.sum()
    return keys[int(rng.choice(len(keys), p=weights))]


def tensor(a: SparseState, b: SparseState) -> SparseState:
    """Composite state a (x) b; term count is the product of term counts."""
    if a.dim != b.dim:
        raise ConfigError(f"cannot tensor states of dimension {a.dim} and {b.dim}")
    budget = min(a.term_budget, b.term_budget)
    projected = len(a.terms) * len(b.terms)
    if projected > budget:
        raise BudgetError(f"{projected} terms would exceed the budget of {budget}")
    terms = {}
    for ka, va in a.terms.items():
        for kb, vb in b.terms.items():
            terms[ka + kb] = va * vb
    return SparseState(a.num_qupits + b.num_qupits, a.dim, terms, budget)


def dump_state(state: SparseState) -> str:
    """Text dump: one line per term, ``basis TAB re TAB im``, sorted.

    Basis tuples are comma-separated digits in lexicographic order so
    dumps are diffable.
    """
    lines = []
    for basis in sorted(state.terms.keys()):
        amp = state.terms[basis]
        lines.append(f"{','.join(str(d) for d in basis)}\t{amp.real:.12g}\t{amp.imag:.12g}")
    return "\n".join(lines)
