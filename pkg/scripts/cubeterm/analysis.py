"""
The has-cube-term pipeline and the blocker data handed to the witness layer.

Idempotent presentations are decided exactly: a blocker scan over the basic
operations, and a pattern search for the witness when there is no blocker.

Other presentations go through level-m approximations (all idempotent m-ary
term operations as basic operations) for m = 1..m_max.  A level without
blockers proves a cube term.  Blockers that survive every level are tested
against the original algebra with k-ary cross relations

    X_k = { x ∈ B^k : some x_i ∈ D }

which must be closed under idempotent terms for every k when (D, B) blocks
the idempotent reduct.  A candidate that passes up to k_max is reported as
evidence only.

Soundness ledger
----------------
HasCubeTerm       proof (the witness is re-evaluated over A²)
BlockerCertified  proof (idempotent presentation, exhaustive table scan)
BlockerCandidate  evidence only
BudgetExhausted   no claim
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

from scripts.cubeterm.blockers import find_blockers_basic, verify_blocker
from scripts.cubeterm.identities import find_cube_term_witness
from scripts.cubeterm.levels import idempotent_term_algebra
from scripts.cubeterm.prec import Holds, PrecResult, prec_bounded
from scripts.cubeterm.records import (
    BLOCKER_CANDIDATE,
    BLOCKER_CERTIFIED,
    BUDGET_EXHAUSTED,
    HAS_CUBE_TERM,
    BlockerPair,
    CubeAnalysis,
    canonical_patterns,
)
from scripts.kernel.algebra import FiniteAlgebra, induced_algebra, is_idempotent_presentation
from scripts.kernel.closure import InconsistencyError, Limits, ResourceLimitError, idempotent_image_closure
from scripts.kernel.subuniverses import (
    DEFAULT_SUBUNIVERSE_BOUND,
    enumerate_idempotent_subuniverses,
    is_idempotent_subuniverse,
    subset_key,
)
from scripts.kernel.tuples import encode_tuple

logger = logging.getLogger(__name__)


DEFAULT_M_MAX = 3
DEFAULT_K_MAX = 4
DEFAULT_D_MAX = 3
DEFAULT_PROBE_LENGTH = 3


# -----------------------------------------------------------------------------
# WITNESS EXTRACTION
# -----------------------------------------------------------------------------

def _extract_witness(
    alg: FiniteAlgebra,
    analysis: CubeAnalysis,
    d_max: int,
    limits: Limits,
) -> CubeAnalysis:
    for pattern in canonical_patterns(d_max):
        try:
            term = find_cube_term_witness(alg, pattern, limits=limits)
        except ResourceLimitError as exc:
            analysis.notes.append(f"pattern {pattern.label}: {exc.what} reached {exc.count:,}")
            continue
        if term is not None:
            analysis.status = HAS_CUBE_TERM
            analysis.witness_pattern = pattern
            analysis.witness_term = term
            return analysis

    analysis.status = BUDGET_EXHAUSTED
    analysis.notes.append(
        f"no blocker, so a cube term exists, but none was extracted with d <= {d_max}"
    )
    return analysis


# -----------------------------------------------------------------------------
# CROSS CHECKS
# -----------------------------------------------------------------------------

def cross_relation(blocker: BlockerPair, k: int) -> list[tuple[int, ...]]:
    """X_k = { x ∈ B^k : some x_i ∈ D }, in lexicographic order."""
    D = set(blocker.D)
    return [x for x in itertools.product(blocker.B, repeat=k) if any(v in D for v in x)]


def cross_relation_closed(
    alg: FiniteAlgebra,
    blocker: BlockerPair,
    k: int,
    *,
    limits: Limits = Limits(),
) -> bool:
    relation = cross_relation(blocker, k)
    allowed = {encode_tuple(x, alg.size) for x in relation}
    closure = idempotent_image_closure(alg, k, relation, limits=limits)
    return all(code in allowed for code in closure.members)


def _survives_cross_checks(
    alg: FiniteAlgebra,
    blocker: BlockerPair,
    k_max: int,
    limits: Limits,
) -> int:
    """
    Largest k ≤ k_max up to which every cross relation is closed; 0 when even
    the subuniverse check fails.
    """
    for subset in (blocker.D, blocker.B):
        if not is_idempotent_subuniverse(alg, subset, limits=limits):
            return 0
    for k in range(1, k_max + 1):
        if not cross_relation_closed(alg, blocker, k, limits=limits):
            logger.debug("candidate D=%s B=%s fails the %d-ary cross check", blocker.D, blocker.B, k)
            return k - 1
    return k_max


# -----------------------------------------------------------------------------
# PIPELINE
# -----------------------------------------------------------------------------

def has_cube_term(
    alg: FiniteAlgebra,
    *,
    m_max: int = DEFAULT_M_MAX,
    k_max: int = DEFAULT_K_MAX,
    d_max: int = DEFAULT_D_MAX,
    limits: Limits = Limits(),
    subuniverse_bound: int = DEFAULT_SUBUNIVERSE_BOUND,
) -> CubeAnalysis:
    """
    Decide (idempotent presentations) or bound (otherwise) whether ``alg``
    has a cube term.  Resource limits end in BudgetExhausted with whatever
    was learned so far in ``notes``.
    """
    if is_idempotent_presentation(alg):
        analysis = CubeAnalysis(status=BUDGET_EXHAUSTED, level=alg.max_arity, basis=alg)
        try:
            found = find_blockers_basic(alg, bound=subuniverse_bound, limits=limits)
        except ResourceLimitError as exc:
            analysis.notes.append(str(exc).splitlines()[0])
            return analysis

        analysis.blockers_found = len(found)
        if found:
            analysis.status = BLOCKER_CERTIFIED
            analysis.blocker = found[0]
            return analysis
        return _extract_witness(alg, analysis, d_max, limits)

    analysis = CubeAnalysis(status=BUDGET_EXHAUSTED)
    blockers: list[BlockerPair] = []
    for m in range(1, m_max + 1):
        try:
            basis = idempotent_term_algebra(alg, m, limits=limits)
            blockers = find_blockers_basic(basis, bound=subuniverse_bound, limits=limits)
        except ResourceLimitError as exc:
            analysis.notes.append(f"level {m}: {str(exc).splitlines()[0]}")
            return analysis

        analysis.level = m
        analysis.basis = basis
        analysis.blockers_found = len(blockers)
        logger.info("%s level %d: %d idempotent operation(s), %d blocker(s)",
                    alg.name, m, len(basis.operations), len(blockers))
        if not blockers:
            return _extract_witness(alg, analysis, d_max, limits)

    for candidate in blockers:
        try:
            depth = _survives_cross_checks(alg, candidate, k_max, limits)
        except ResourceLimitError as exc:
            analysis.notes.append(f"cross check of D={list(candidate.D)} B={list(candidate.B)}: "
                                  f"{str(exc).splitlines()[0]}")
            return analysis
        analysis.cross_check_depth = max(analysis.cross_check_depth, depth)
        if depth == k_max:
            analysis.status = BLOCKER_CANDIDATE
            analysis.blocker = candidate
            analysis.notes.append(f"candidate survives cross checks up to k = {k_max}; evidence only")
            return analysis

    analysis.notes.append(f"every level-{m_max} blocker failed a cross check")
    return analysis


# -----------------------------------------------------------------------------
# BLOCKER SELECTION FOR THE WITNESS CONSTRUCTION
# -----------------------------------------------------------------------------

def _blocker_basis(alg: FiniteAlgebra, analysis: CubeAnalysis) -> FiniteAlgebra:
    if analysis.status not in (BLOCKER_CERTIFIED, BLOCKER_CANDIDATE):
        raise ValueError(
            f"Analysis status is {analysis.status}; a blocker is needed "
            f"({BLOCKER_CERTIFIED} or {BLOCKER_CANDIDATE})."
        )
    if analysis.basis is not None:
        return analysis.basis
    return alg


def _lift(blocker: BlockerPair, subset: Sequence[int]) -> BlockerPair:
    return BlockerPair(
        D=tuple(subset[i] for i in blocker.D),
        B=tuple(subset[i] for i in blocker.B),
        absorbing=dict(blocker.absorbing),
    )


def minimal_no_cube_subuniverse(
    alg: FiniteAlgebra,
    analysis: CubeAnalysis,
    *,
    limits: Limits = Limits(),
    subuniverse_bound: int = DEFAULT_SUBUNIVERSE_BOUND,
) -> tuple[int, ...]:
    """
    The least idempotent subuniverse (by size, then elements) whose induced
    algebra has a blocker.
    """
    basis = _blocker_basis(alg, analysis)
    for subset in enumerate_idempotent_subuniverses(alg, bound=subuniverse_bound, limits=limits):
        if len(subset) < 2:
            continue
        induced = induced_algebra(basis, subset)
        if find_blockers_basic(induced, bound=subuniverse_bound, limits=limits):
            return subset
    raise InconsistencyError(f"{alg.name}: no subuniverse carries a blocker, not even the whole universe.")


@dataclass(frozen=True)
class BlockerWitness:
    """
    (D, B, a, b) with a ∈ B∖D and b ∈ D.  a ⊀ b is implied by the blocker;
    ``probe`` is the bounded search that was run as a sanity check.
    """

    blocker: BlockerPair
    a: int
    b: int
    probe: PrecResult

    @property
    def D(self) -> tuple[int, ...]:
        return self.blocker.D

    @property
    def B(self) -> tuple[int, ...]:
        return self.blocker.B

    def to_dict(self) -> dict:
        return {
            "D": list(self.D),
            "B": list(self.B),
            "a": self.a,
            "b": self.b,
            "probe": self.probe.to_dict(),
        }


def pick_blocker_witness(
    alg: FiniteAlgebra,
    b_min: Sequence[int],
    *,
    analysis: Optional[CubeAnalysis] = None,
    probe_length: int = DEFAULT_PROBE_LENGTH,
    limits: Limits = Limits(),
    subuniverse_bound: int = DEFAULT_SUBUNIVERSE_BOUND,
) -> BlockerWitness:
    """
    Least blocker (D, B) of the algebra induced on ``b_min`` with B = b_min,
    then the least a ∈ B∖D and the least b ∈ D.

    Raises
    ------
    InconsistencyError
        No such blocker exists, or the ≺ probe found a witness for a ≺ b.
    """
    subset = tuple(sorted(set(int(v) for v in b_min)))
    if analysis is not None:
        basis = _blocker_basis(alg, analysis)
    elif is_idempotent_presentation(alg):
        basis = alg
    else:
        raise ValueError("Blocker selection on a non-idempotent presentation needs the analysis basis.")

    induced = induced_algebra(basis, subset)
    full = tuple(range(len(subset)))
    blockers = [
        blocker
        for blocker in find_blockers_basic(induced, bound=subuniverse_bound, limits=limits)
        if blocker.B == full
    ]
    if not blockers:
        raise InconsistencyError(f"{alg.name}: no blocker with B = {list(subset)}.")

    chosen = _lift(min(blockers, key=lambda p: subset_key(p.D)), subset)
    if basis is alg and not verify_blocker(alg, chosen, limits=limits):
        raise InconsistencyError(f"{alg.name}: selected blocker does not re-verify.")
    a = min(set(chosen.B) - set(chosen.D))
    b = min(chosen.D)

    probe = prec_bounded(alg, a, b, probe_length, limits=limits)
    if isinstance(probe, Holds):
        raise InconsistencyError(
            f"{alg.name}: found a witness for {a} ≺ {b} although ({list(chosen.D)}, {list(chosen.B)}) "
            f"blocks it."
        )
    logger.debug("%s: blocker D=%s B=%s with a=%d b=%d", alg.name, chosen.D, chosen.B, a, b)
    return BlockerWitness(blocker=chosen, a=a, b=b, probe=probe)
