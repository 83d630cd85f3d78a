"""
Cube terms, blockers and the ≺ relation.
"""

from scripts.cubeterm.analysis import (
    BlockerWitness,
    cross_relation,
    has_cube_term,
    minimal_no_cube_subuniverse,
    pick_blocker_witness,
)
from scripts.cubeterm.blockers import NonIdempotentError, find_blockers_basic, verify_blocker
from scripts.cubeterm.identities import find_cube_term_witness, verify_cube_identities
from scripts.cubeterm.levels import idempotent_term_algebra
from scripts.cubeterm.prec import Holds, UnknownUpTo, prec_at_length, prec_bounded
from scripts.cubeterm.records import (
    BLOCKER_CANDIDATE,
    BLOCKER_CERTIFIED,
    BUDGET_EXHAUSTED,
    HAS_CUBE_TERM,
    BlockerPair,
    CubeAnalysis,
    CubePattern,
    canonical_patterns,
    full_cube_pattern,
    nu_pattern,
)

__all__ = [
    "BLOCKER_CANDIDATE",
    "BLOCKER_CERTIFIED",
    "BUDGET_EXHAUSTED",
    "HAS_CUBE_TERM",
    "BlockerPair",
    "BlockerWitness",
    "CubeAnalysis",
    "CubePattern",
    "Holds",
    "NonIdempotentError",
    "UnknownUpTo",
    "canonical_patterns",
    "cross_relation",
    "find_blockers_basic",
    "find_cube_term_witness",
    "full_cube_pattern",
    "has_cube_term",
    "idempotent_term_algebra",
    "minimal_no_cube_subuniverse",
    "nu_pattern",
    "pick_blocker_witness",
    "prec_at_length",
    "prec_bounded",
    "verify_blocker",
    "verify_cube_identities",
]
