"""
Finite-window replay of the non-dualizability construction.
"""

from scripts.witness.claims import (
    ALTERNATE_INDICES,
    DEFAULT_INDICES,
    DEFAULT_SAMPLE_BUDGET,
    check_unique_large_block,
    claim_congruence,
    replay_claim1,
    replay_claim2,
)
from scripts.witness.instance import (
    DEFAULT_WINDOW,
    MIN_WINDOW,
    MissingBlockerError,
    WitnessInstance,
    alpha_vector,
    build_instance,
    check_g_not_in_c,
    recover_g,
    window_restriction,
)
from scripts.witness.records import (
    FAIL,
    FAIL_OUTSIDE,
    PASS,
    SKIPPED,
    CheckResult,
    TranscriptStep,
    WitnessReport,
)

__all__ = [
    "ALTERNATE_INDICES",
    "DEFAULT_INDICES",
    "DEFAULT_SAMPLE_BUDGET",
    "DEFAULT_WINDOW",
    "FAIL",
    "FAIL_OUTSIDE",
    "MIN_WINDOW",
    "PASS",
    "SKIPPED",
    "CheckResult",
    "MissingBlockerError",
    "TranscriptStep",
    "WitnessInstance",
    "WitnessReport",
    "alpha_vector",
    "build_instance",
    "check_g_not_in_c",
    "check_unique_large_block",
    "claim_congruence",
    "recover_g",
    "replay_claim1",
    "replay_claim2",
    "window_restriction",
]
