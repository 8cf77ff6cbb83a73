"""Verifier operator schedule with pipelined resource caps.

Per (holder, origin) lane the verifier applies, in dependency order:

1. couplings: register (n, 0) controls register (n, m+1) under challenge
   b_{m+1}, for every row n and challenge round m;
2. a Fourier transform on each column-0 register;
3. couplings down the transformed column, (n, 0) into (n+1, 0) under
   challenge b'_{n+1};
4. the inverse transform on register (0, 0), which is kept;
5. measurement of everything except (0, 0).

Operators are packed greedily into stages under the hardware cap of two
coupling blocks and one Fourier-class block per lane and stage.  For the
reference parameters (k = 2) the packing takes exactly 7 stages.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

CX_CAP_PER_STAGE = 2
QFT_CAP_PER_STAGE = 1


class ScheduleError(Exception):
    pass


@dataclass(frozen=True)
class ChallengeSet:
    """Common challenge values, one per coupling round, all nonzero."""

    b_values: tuple[int, ...]  # index m+1 -> challenge, for row couplings
    b_prime_values: tuple[int, ...]  # index n+1 -> challenge, column couplings
    prime: int

    def __post_init__(self):
        for v in self.b_values + self.b_prime_values:
            if not (0 < v < self.prime):
                raise ScheduleError(f"challenge {v} outside 1..{self.prime - 1}")

    @classmethod
    def draw(cls, k: int, prime: int, rng: np.random.Generator) -> "ChallengeSet":
        return cls(
            b_values=tuple(int(rng.integers(1, prime)) for _ in range(k)),
            b_prime_values=tuple(int(rng.integers(1, prime)) for _ in range(k)),
            prime=prime,
        )


@dataclass(frozen=True)
class VerifierOp:
    kind: str  # "cx" | "qft" | "invqft" | "measure"
    register: tuple[int, int]  # acted-on register (control for cx)
    target: tuple[int, int] | None = None  # cx target register
    challenge: int | None = None  # challenge value for cx
    fourier_basis: bool = False  # cx on transformed registers / measure basis

    def registers(self) -> tuple[tuple[int, int], ...]:
        return (self.register,) if self.target is None else (self.register, self.target)


@dataclass
class VerifierSchedule:
    k: int
    stages: list[list[VerifierOp]] = field(default_factory=list)

    @property
    def stage_count(self) -> int:
        return len(self.stages)

    def quantum_ops(self) -> list[VerifierOp]:
        return [op for stage in self.stages for op in stage if op.kind != "measure"]

    def measured_registers(self) -> set[tuple[int, int]]:
        return {
            op.register for stage in self.stages for op in stage if op.kind == "measure"
        }

    def validate(self) -> None:
        """Caps, dependency order, and retention of register (0, 0)."""
        done_stage: dict[int, dict[tuple[int, int], int]] = {}
        last_use: dict[tuple[int, int], int] = {}
        measured: set[tuple[int, int]] = set()
        for s, stage in enumerate(self.stages):
            n_cx = sum(1 for op in stage if op.kind == "cx")
            n_qft = sum(1 for op in stage if op.kind in ("qft", "invqft"))
            if n_cx > CX_CAP_PER_STAGE:
                raise ScheduleError(f"stage {s}: {n_cx} coupling blocks exceed the cap")
            if n_qft > QFT_CAP_PER_STAGE:
                raise ScheduleError(f"stage {s}: {n_qft} Fourier blocks exceed the cap")
            touched = []
            for op in stage:
                for reg in op.registers():
                    if reg in measured:
                        raise ScheduleError(f"stage {s}: {op.kind} on measured register {reg}")
                    if last_use.get(reg, -1) >= s:
                        raise ScheduleError(f"stage {s}: register {reg} used twice in one stage")
                    touched.append(reg)
                if op.kind == "measure":
                    measured.add(op.register)
            for reg in touched:
                last_use[reg] = s
        if (0, 0) in measured:
            raise ScheduleError("the kept register (0, 0) must never be measured")


def verifier_op_list(k: int, challenges: ChallengeSet) -> list[VerifierOp]:
    """The (k+1)(k+2) verifier operators in canonical program order."""
    if len(challenges.b_values) < k or len(challenges.b_prime_values) < k:
        raise ScheduleError(f"need {k} row and {k} column challenges")
    ops = []
    for m in range(k):
        for n in range(k + 1):
            ops.append(
                VerifierOp("cx", (n, 0), (n, m + 1), challenge=challenges.b_values[m])
            )
    for n in range(k + 1):
        ops.append(VerifierOp("qft", (n, 0)))
    for n in range(k):
        ops.append(
            VerifierOp(
                "cx",
                (n, 0),
                (n + 1, 0),
                challenge=challenges.b_prime_values[n],
                fourier_basis=True,
            )
        )
    ops.append(VerifierOp("invqft", (0, 0)))
    return ops


def build_verifier_schedule(
    k: int, challenges: ChallengeSet, strict_column_range: bool = False
) -> VerifierSchedule:
    """Greedy stage packing of the verifier operators under the caps.

    Measurements are interleaved as early as dependencies allow: a
    register is measured in the first stage after its last operator.
    ``strict_column_range`` reproduces the narrower printed column-coupling
    range (n up to k-2), which leaves register (k, 0) uncoupled; the
    default couples the whole column.
    """
    ops = verifier_op_list(k, challenges)
    if strict_column_range:
        ops = [
            op
            for op in ops
            if not (op.kind == "cx" and op.fourier_basis and op.register == (k - 1, 0))
        ]

    # dependency: the previous op (program order) touching a shared register
    deps: list[list[int]] = []
    last_on_reg: dict[tuple[int, int], int] = {}
    for idx, op in enumerate(ops):
        deps.append([last_on_reg[r] for r in op.registers() if r in last_on_reg])
        for r in op.registers():
            last_on_reg[r] = idx

    finished: dict[int, int] = {}  # op index -> stage
    stages: list[list[VerifierOp]] = []
    pending = list(range(len(ops)))
    while pending:
        stage_idx = len(stages)
        stage: list[VerifierOp] = []
        used_regs: set[tuple[int, int]] = set()
        n_cx = n_qft = 0
        for idx in list(pending):
            op = ops[idx]
            if any(d not in finished or finished[d] >= stage_idx for d in deps[idx]):
                continue
            if any(r in used_regs for r in op.registers()):
                continue
            if op.kind == "cx":
                if n_cx >= CX_CAP_PER_STAGE:
                    continue
                n_cx += 1
            else:
                if n_qft >= QFT_CAP_PER_STAGE:
                    continue
                n_qft += 1
            stage.append(op)
            used_regs.update(op.registers())
            finished[idx] = stage_idx
            pending.remove(idx)
        if not stage and pending:
            raise ScheduleError("scheduler made no progress")
        stages.append(stage)

    # interleave measurements: a register is measured in the stage after
    # its last operator; registers in the transformed column stay in the
    # Fourier basis.
    last_stage: dict[tuple[int, int], int] = {}
    fourier_regs = {(n, 0) for n in range(1, k + 1)}
    for s, stage in enumerate(stages):
        for op in stage:
            for r in op.registers():
                last_stage[r] = s
    for reg, s in sorted(last_stage.items()):
        if reg == (0, 0):
            continue
        measure = VerifierOp("measure", reg, fourier_basis=reg in fourier_regs)
        while len(stages) <= s + 1:
            stages.append([])
        stages[s + 1].append(measure)
    if strict_column_range and k >= 1:
        # the uncoupled register is still transformed and measured
        reg = (k, 0)
        if reg not in last_stage:
            stages[-1].append(VerifierOp("measure", reg, fourier_basis=True))

    schedule = VerifierSchedule(k=k, stages=stages)
    schedule.validate()
    return schedule
