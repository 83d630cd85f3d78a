"""
Cube-term witnesses.

For a pattern with d rows over A, the evaluation power has d·|A|² coordinates
indexed by (row r, pair (x, y)), row-major with the pairs in lexicographic
order.  The generator for column c holds y at (r, (x, y)) when c has a 1 in
row r and x otherwise.  A term sends the generators to the all-x vector
exactly when it satisfies every identity of the pattern.

The coordinates with x = y hold a in every generator, so a term reaching the
all-x vector is automatically idempotent.  The plain closure therefore finds
the same terms as the idempotent image closure, without the tag.
"""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from scripts.cubeterm.records import CubePattern
from scripts.kernel.algebra import FiniteAlgebra
from scripts.kernel.closure import InconsistencyError, Limits, sg_power
from scripts.kernel.terms import Term, check_term, evaluate_term, term_arity
from scripts.kernel.tuples import encode_tuple

logger = logging.getLogger(__name__)


def _pair_grid(size: int) -> tuple[np.ndarray, np.ndarray]:
    xs, ys = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    return xs.reshape(-1), ys.reshape(-1)


def pattern_generators(size: int, pattern: CubePattern) -> tuple[np.ndarray, np.ndarray]:
    """
    Return (generators, target): one row per column of the pattern and the
    all-x row, both of length d·size².
    """
    xs, ys = _pair_grid(size)
    rows = []
    for column in pattern.columns:
        rows.append(np.concatenate([ys if column[r] else xs for r in range(pattern.dimension)]))
    target = np.tile(xs, pattern.dimension)
    return np.asarray(rows, dtype=np.int64), target.astype(np.int64)


def find_cube_term_witness(
    alg: FiniteAlgebra,
    pattern: CubePattern,
    *,
    limits: Limits = Limits(),
) -> Optional[Term]:
    """
    A term satisfying every identity of ``pattern``, or None.

    ``Var(j)`` stands for column j.  The returned term has been re-checked
    against the identities.
    """
    generators, target = pattern_generators(alg.size, pattern)
    k = generators.shape[1]
    target_code = encode_tuple(target.tolist(), alg.size)

    closure = sg_power(alg, k, generators, limits=limits, record_parents=True, targets=[target_code])
    if target_code not in closure:
        logger.debug("%s: no witness for pattern %s (%d elements)", alg.name, pattern.label, len(closure))
        return None

    term = closure.term_for(target_code)
    if not verify_cube_identities(alg, pattern, term):
        raise InconsistencyError(f"Witness for pattern {pattern.label} fails its identities.")
    return term


def verify_cube_identities(alg: FiniteAlgebra, pattern: CubePattern, term: Term) -> bool:
    """
    Check t(u_1, ..., u_n) = x for every pattern row and every (x, y) ∈ A².
    """
    check_term(alg, term)
    if term_arity(term) > pattern.arity:
        return False
    xs, ys = _pair_grid(alg.size)
    for r in range(pattern.dimension):
        args = [ys if column[r] else xs for column in pattern.columns]
        if not np.array_equal(evaluate_term(alg, term, args), xs):
            return False
    return True
