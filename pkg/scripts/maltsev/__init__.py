"""
Maltsev conditions decided through free-algebra evaluation vectors.
"""

from scripts.maltsev.free import (
    ABSENT,
    FOUND,
    INCONCLUSIVE,
    EvaluationVector,
    FreeRestriction,
    all_assignments,
    free_restriction_closure,
    verify_term_identities,
)
from scripts.maltsev.omit15 import (
    Omit15Chain,
    Omit15Result,
    find_omit15_chain,
    verify_omit15_chain,
)
from scripts.maltsev.sections import Section, decide_omit15, proper_sections
from scripts.maltsev.wnu import DEFAULT_WNU_ARITIES, WnuResult, find_wnu, verify_wnu

__all__ = [
    "ABSENT",
    "DEFAULT_WNU_ARITIES",
    "FOUND",
    "INCONCLUSIVE",
    "EvaluationVector",
    "FreeRestriction",
    "Omit15Chain",
    "Omit15Result",
    "Section",
    "WnuResult",
    "all_assignments",
    "decide_omit15",
    "find_omit15_chain",
    "find_wnu",
    "free_restriction_closure",
    "proper_sections",
    "verify_omit15_chain",
    "verify_term_identities",
    "verify_wnu",
]
