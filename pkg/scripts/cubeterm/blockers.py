"""
Cube-term blockers of idempotent algebras.

A pair D ⊊ B of subuniverses is a blocker when every term operation f has a
coordinate i with f(B, ..., D at i, ..., B) ⊆ D.  The operations with such a
coordinate form a clone: projections have one, and if f absorbs at i and the
term plugged into position i absorbs at j, the composite absorbs at that j.
So checking the basic operations decides the condition for every term.

For a finite idempotent algebra a blocker exists exactly when there is no
cube term, which makes ``find_blockers_basic`` an exact decision procedure on
idempotent presentations.
"""

from __future__ import annotations

import logging
from typing import Optional, Sequence

import numpy as np

from scripts.cubeterm.records import BlockerPair
from scripts.kernel.algebra import FiniteAlgebra, Operation, is_idempotent_operation
from scripts.kernel.closure import Limits
from scripts.kernel.subuniverses import (
    DEFAULT_SUBUNIVERSE_BOUND,
    enumerate_idempotent_subuniverses,
    idempotent_closure_of_set,
)

logger = logging.getLogger(__name__)


class NonIdempotentError(ValueError):
    """
    The blocker scan was asked to run on an algebra with a non-idempotent
    basic operation.
    """

    def __init__(self, algebra: str, operations: Sequence[str]) -> None:
        super().__init__(
            f"Algebra {algebra!r} has non-idempotent basic operation(s): {', '.join(operations)}.\n"
            f"The basic-operation blocker scan is exact only for idempotent presentations.\n"
            f"Use has_cube_term, which works through idempotent term approximations."
        )
        self.algebra = algebra
        self.operations = tuple(operations)


def absorbing_coordinate(op: Operation, D: Sequence[int], B: Sequence[int]) -> Optional[int]:
    """
    Least coordinate i with op(B, ..., D at i, ..., B) ⊆ D, or None.
    """
    d_index = np.asarray(D, dtype=np.intp)
    b_index = np.asarray(B, dtype=np.intp)
    for i in range(op.arity):
        axes = [b_index] * op.arity
        axes[i] = d_index
        image = op.table[np.ix_(*axes)]
        if np.isin(image, d_index).all():
            return i
    return None


def _absorbing_map(alg: FiniteAlgebra, D: Sequence[int], B: Sequence[int]) -> Optional[dict[str, int]]:
    absorbing: dict[str, int] = {}
    for op in alg.operations:
        i = absorbing_coordinate(op, D, B)
        if i is None:
            return None
        absorbing[op.name] = i
    return absorbing


def find_blockers_basic(
    alg: FiniteAlgebra,
    *,
    bound: int = DEFAULT_SUBUNIVERSE_BOUND,
    limits: Limits = Limits(),
) -> list[BlockerPair]:
    """
    Every blocker (D, B) of an idempotent algebra, ascending by
    (|B|, B, |D|, D).

    D ranges over the subuniverses contained in B, which are exactly the
    subuniverses of the algebra induced on B.

    Raises
    ------
    NonIdempotentError
        Some basic operation is not idempotent.
    """
    bad = [op.name for op in alg.operations if not is_idempotent_operation(alg, op)]
    if bad:
        raise NonIdempotentError(alg.name, bad)

    subuniverses = enumerate_idempotent_subuniverses(alg, bound=bound, limits=limits)

    found: list[BlockerPair] = []
    for B in subuniverses:
        if len(B) < 2:
            continue
        members = set(B)
        for D in subuniverses:
            if len(D) >= len(B) or not members.issuperset(D):
                continue
            absorbing = _absorbing_map(alg, D, B)
            if absorbing is not None:
                found.append(BlockerPair(D=D, B=B, absorbing=absorbing))

    found.sort(key=BlockerPair.sort_key)
    logger.debug("%s: %d subuniverse(s), %d blocker(s)", alg.name, len(subuniverses), len(found))
    return found


def verify_blocker(alg: FiniteAlgebra, blocker: BlockerPair, *, limits: Limits = Limits()) -> bool:
    """
    Independent re-check of a blocker certificate by exhaustive table scans.

    Checks ∅ ≠ D ⊊ B, that D and B are idempotent subuniverses, that every
    basic operation has a recorded coordinate and that each recorded
    coordinate absorbs.
    """
    D, B = tuple(blocker.D), tuple(blocker.B)
    if not D or not set(D) < set(B):
        return False
    for subset in (D, B):
        if idempotent_closure_of_set(alg, subset, limits=limits) != tuple(sorted(subset)):
            return False

    d_index = np.asarray(D, dtype=np.intp)
    b_index = np.asarray(B, dtype=np.intp)
    for op in alg.operations:
        i = blocker.absorbing.get(op.name)
        if i is None or not 0 <= i < op.arity:
            return False
        axes = [b_index] * op.arity
        axes[i] = d_index
        if not np.isin(op.table[np.ix_(*axes)], d_index).all():
            return False
    return True
