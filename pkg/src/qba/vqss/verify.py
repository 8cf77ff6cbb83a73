"""Exact-backend execution of the share-and-verify protocol.

One run covers a single dealer: the register trees are built fully shared
(both encoding levels), transit noise is folded in per teleported qupit,
the verifier schedule is executed with the fused couple-and-measure
primitives, and the gradecast outcome vectors are checked for codeword
consistency.

Consistency predicate, evaluated on the common gradecast view:

- computational-basis targets: per origin, the holders' outcomes must
  decode to a codeword within the reporter tolerance; the decoded values
  across origins must themselves decode, else the dealer is flagged.
  Discrepancy positions accumulate as suspects.
- Fourier-basis targets: per origin, the outcome vector must satisfy the
  power-sum constraints that transformed encodings obey identically; the
  per-origin digit sums must satisfy them across origins, else the dealer
  is flagged.
- the dealer is also flagged when more than t distinct origins drew
  suspicion, which is how an unencoded share pattern is caught even when
  each individual vector stays decodable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import qudit_sim as qs
from ..packed import PackedState, couple_measure, fourier_couple_chain
from .code import RSCode
from .schedule import ChallengeSet, VerifierSchedule, build_verifier_schedule
from .sharing import (
    apply_round1_noise,
    build_register_tree,
    distribution_plan_round1,
    distribution_plan_round2,
    register_kind,
)


@dataclass
class VerificationResult:
    flagged: set[int] = field(default_factory=set)
    suspects: set[int] = field(default_factory=set)
    stage1_outcomes: dict = field(default_factory=dict)
    fourier_outcomes: dict = field(default_factory=dict)
    values: np.ndarray | None = None
    trace: list[str] = field(default_factory=list)

    @property
    def any_flag(self) -> bool:
        return bool(self.flagged or self.suspects)


class ShareVerifyRun:
    """Sharing, verification and final measurement for one dealer.

    ``network`` (optional) supplies teleport noise and traffic accounting;
    ``dealer_garbage`` makes the dealer distribute unencoded random basis
    qupits instead of proper encodings.  ``share_tamper`` is a hook called
    with (trees, code) after sharing, for scripted share substitution.
    """

    def __init__(
        self,
        n_nodes: int,
        code: RSCode,
        k: int,
        dealer: int,
        rng: np.random.Generator,
        term_budget: int = qs.DEFAULT_TERM_BUDGET,
        network=None,
        dealer_garbage: bool = False,
        share_tamper=None,
        strict_column_range: bool = False,
        reporter_tolerance: int | None = None,
        encoded_zero: bool = True,
        trace: bool = False,
    ):
        self.n = n_nodes
        self.code = code
        self.k = k
        self.dealer = dealer
        self.rng = rng
        self.term_budget = term_budget
        self.network = network
        self.dealer_garbage = dealer_garbage
        self.share_tamper = share_tamper
        self.strict_column_range = strict_column_range
        self.tolerance = code.degree if reporter_tolerance is None else reporter_tolerance
        self.encoded_zero = encoded_zero
        self.trace_enabled = trace
        self.trees: dict[tuple[int, int], PackedState] = {}

    # -- sharing ---------------------------------------------------------

    def run_sharing(self) -> None:
        N, k, code = self.n, self.k, self.code
        for row in range(k + 1):
            for col in range(k + 1):
                if self.dealer_garbage:
                    level1 = self.rng.integers(0, code.prime, size=N).astype(np.uint8)
                    tree = build_register_tree(
                        "zero", N, code, self.term_budget, level1_rows=level1
                    )
                elif not self.encoded_zero and register_kind(row, col) == "zero":
                    level1 = np.zeros(N, dtype=np.uint8)
                    tree = build_register_tree(
                        "zero", N, code, self.term_budget, level1_rows=level1
                    )
                else:
                    tree = build_register_tree(
                        register_kind(row, col), N, code, self.term_budget
                    )
                self.trees[(row, col)] = tree
        if self.network is not None:
            for row, col, i, src, dst in distribution_plan_round1(N, k, self.dealer):
                if src == dst:
                    continue
                for a, b in self.network.teleport_qupit(src, dst, phase="sharing-dealer"):
                    apply_round1_noise(self.trees[(row, col)], code, i, a, b)
            for row, col, i, j, src, dst in distribution_plan_round2(N, k):
                if src == dst:
                    continue
                for a, b in self.network.teleport_qupit(src, dst, phase="sharing-players"):
                    self.trees[(row, col)].apply_pauli(i * N + j, a, b)
        if self.share_tamper is not None:
            self.share_tamper(self.trees, code)

    # -- verification ----------------------------------------------------

    def run_verification(self, challenges: ChallengeSet | None = None) -> VerificationResult:
        if not self.trees:
            self.run_sharing()
        if challenges is None:
            challenges = ChallengeSet.draw(self.k, self.code.prime, self.rng)
        schedule = build_verifier_schedule(self.k, challenges, self.strict_column_range)
        result = VerificationResult()
        self._execute(schedule, challenges, result)
        self._check_consistency(result)
        self.schedule = schedule
        return result

    def _execute(self, schedule, challenges, result: VerificationResult) -> None:
        # Couplings in schedule order.  Couplings that share a control
        # commute with each other and with the target measurements, so the
        # fused execution yields the same joint distribution as the staged
        # circuit; the Fourier segment runs once all of them are done.
        outcome_store: dict[tuple[int, int], np.ndarray] = {}
        for s, stage in enumerate(schedule.stages):
            for op in stage:
                if op.kind == "cx" and not op.fourier_basis:
                    w, _ = couple_measure(
                        self.trees[op.register],
                        self.trees[op.target],
                        op.challenge,
                        self.rng,
                        work_budget=self.term_budget,
                    )
                    outcome_store[op.target] = w
                    self._trace(result, s, op.kind, op.register, op.target)
        self._run_fourier_segment(challenges, outcome_store, result)
        for s, stage in enumerate(schedule.stages):
            for op in stage:
                if op.kind == "measure":
                    w = outcome_store[op.register]
                    store = (
                        result.fourier_outcomes if op.fourier_basis else result.stage1_outcomes
                    )
                    store[op.register] = w
                    self._trace(result, s, "measure", op.register, None, w)

    def _run_fourier_segment(self, challenges, outcome_store, result) -> None:
        k = self.k
        if k == 0:
            # transform and its inverse on the kept register: net identity
            return
        coupled = [(n, 0) for n in range(k + 1)]
        multipliers = list(challenges.b_prime_values[:k])
        if self.strict_column_range:
            coupled = coupled[:-1]
            multipliers = multipliers[: k - 1]
        if len(coupled) >= 2:
            trees = [self.trees[r] for r in coupled]
            ws, _ = fourier_couple_chain(trees, multipliers, self.rng, self.term_budget)
            for reg, w in zip(coupled[1:], ws):
                outcome_store[reg] = w
            self._trace(result, "fourier", "fourier-chain", coupled[0], coupled[-1])
        # registers transformed and measured without any coupling
        for reg in [(n, 0) for n in range(1, k + 1)]:
            if reg not in outcome_store:
                w, _ = self.trees[reg].fourier_born_sample(self.rng)
                outcome_store[reg] = w
                self._trace(result, "fourier", "fourier-measure", reg, None)

    def _trace(self, result, stage, kind, reg, target, outcome=None) -> None:
        if not self.trace_enabled:
            return
        ops = f"{reg[0]}{reg[1]}" + (f"-{target[0]}{target[1]}" if target else "")
        tail = "" if outcome is None else ",".join(str(int(x)) for x in outcome)
        result.trace.append(f"{stage}\tall\t{kind}\t{ops}\t{tail}")

    # -- consistency -----------------------------------------------------

    def _origin_vector(self, w: np.ndarray, origin: int) -> np.ndarray:
        return w[origin * self.n : (origin + 1) * self.n]

    def _check_consistency(self, result: VerificationResult) -> None:
        code, N = self.code, self.n
        suspect_origins: set[int] = set()
        for reg, w in sorted(result.stage1_outcomes.items()):
            decoded: list[int | None] = []
            for i in range(N):
                dec = code.decode(self._origin_vector(w, i), max_errors=self.tolerance)
                if dec is None:
                    result.flagged.add(i)
                    decoded.append(None)
                else:
                    value, bad = dec
                    decoded.append(value)
                    result.suspects.update(bad)
            positions = [i for i, v in enumerate(decoded) if v is not None]
            vec = [decoded[i] for i in positions]
            dealer_dec = code.decode(vec, max_errors=self.tolerance, positions=positions)
            if dealer_dec is None:
                result.flagged.add(self.dealer)
            else:
                _, bad = dealer_dec
                suspect_origins.update(bad)
        for reg, w in sorted(result.fourier_outcomes.items()):
            sums = []
            for i in range(N):
                vec = self._origin_vector(w, i)
                if not code.moments_ok(vec):
                    result.flagged.add(i)
                sums.append(int(np.sum(vec.astype(np.int64)) % code.prime))
            if not code.moments_ok(sums):
                result.flagged.add(self.dealer)
        hard_origins = {i for i in result.flagged if i != self.dealer}
        if len(suspect_origins | hard_origins) > code.degree:
            result.flagged.add(self.dealer)
        result.suspects.update(suspect_origins)

    # -- final measurement -------------------------------------------------

    def final_measure(self, result: VerificationResult) -> np.ndarray:
        """Measure every kept qupit; Values[i, j] is origin i's share at
        holder j."""
        kept = self.trees[(0, 0)]
        row = kept.born_sample(self.rng)
        values = np.asarray(row, dtype=np.int64).reshape(self.n, self.n)
        result.values = values
        if self.trace_enabled:
            flat = ",".join(str(int(x)) for x in row)
            result.trace.append(f"final\tall\tmeasure\t00\t{flat}")
        return values


def schedule_challenge(schedule: VerifierSchedule, n: int) -> int:
    """Challenge multiplier of the column coupling (n,0) -> (n+1,0)."""
    for stage in schedule.stages:
        for op in stage:
            if op.kind == "cx" and op.fourier_basis and op.register == (n, 0):
                return op.challenge
    raise ValueError(f"no column coupling found for row {n}")


def run_share_and_verify(
    n_nodes: int,
    code: RSCode,
    k: int,
    dealer: int,
    rng: np.random.Generator,
    **kwargs,
) -> tuple[VerificationResult, np.ndarray]:
    """Convenience wrapper: sharing, verification, final measurement."""
    run = ShareVerifyRun(n_nodes, code, k, dealer, rng, **kwargs)
    run.run_sharing()
    result = run.run_verification()
    values = run.final_measure(result)
    return result, values
