"""Share-and-verify phases of verifiable quantum secret sharing.

The dealer encodes a coin state with a polynomial evaluation code, players
re-encode their components with the same code, every node couples its
shares with challenge registers, and all but one register per origin are
measured and cross-checked over gradecast; the surviving register feeds
the common coin.
"""

from .code import RSCode
from .sharing import (
    RegisterGrid,
    ShareTable,
    build_register_tree,
    distribution_plan_round1,
    distribution_plan_round2,
    encode,
    expand_qupit,
    prepare_dealer_grid,
)
from .schedule import ChallengeSet, VerifierOp, VerifierSchedule, build_verifier_schedule
from .verify import ShareVerifyRun, VerificationResult

__all__ = [
    "RSCode",
    "RegisterGrid",
    "ShareTable",
    "ChallengeSet",
    "VerifierOp",
    "VerifierSchedule",
    "ShareVerifyRun",
    "VerificationResult",
    "build_register_tree",
    "build_verifier_schedule",
    "distribution_plan_round1",
    "distribution_plan_round2",
    "encode",
    "expand_qupit",
    "prepare_dealer_grid",
]
