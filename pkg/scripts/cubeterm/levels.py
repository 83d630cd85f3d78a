"""
Level-m idempotent approximations.

The m-ary term operations of A are the closure of the m projections inside
A^(|A|^m): a vector there is the table of an m-ary operation, listed over
all argument tuples in lexicographic order.  Keeping the tables whose
diagonal entries (a, ..., a) map to a gives every idempotent m-ary term
operation.  Lower arities are covered by dummy variables, so the algebra
built from these tables has the same blockers as the reduct to idempotent
terms of arity ≤ m.
"""

from __future__ import annotations

import logging

import numpy as np

from scripts.kernel.algebra import FiniteAlgebra, Operation
from scripts.kernel.closure import Limits, sg_power

logger = logging.getLogger(__name__)


def projection_tables(size: int, m: int) -> np.ndarray:
    """(m, size**m) array; row i is the table of the i-th m-ary projection."""
    grids = np.meshgrid(*([np.arange(size)] * m), indexing="ij")
    return np.stack([g.reshape(-1) for g in grids]).astype(np.int64)


def diagonal_positions(size: int, m: int) -> np.ndarray:
    """Flat table positions of the arguments (a, ..., a)."""
    step = sum(size ** p for p in range(m))
    return np.arange(size, dtype=np.int64) * step


def idempotent_term_algebra(
    alg: FiniteAlgebra,
    m: int,
    *,
    limits: Limits = Limits(),
) -> FiniteAlgebra:
    """
    The algebra on A whose basic operations are all idempotent m-ary term
    operations of ``alg``, named ``t{m}_{i}`` in ascending table-code order.

    Raises
    ------
    ResourceLimitError
        The term-operation closure outgrew ``limits``.
    """
    if m < 1:
        raise ValueError(f"Level must be at least 1, got {m}.")
    size = alg.size
    closure = sg_power(alg, size ** m, projection_tables(size, m), limits=limits)
    _, tables = closure.sorted_rows()

    diagonal = diagonal_positions(size, m)
    keep = np.all(tables[:, diagonal] == np.arange(size), axis=1)
    idempotent = tables[keep]
    logger.debug(
        "%s level %d: %d term operation(s), %d idempotent",
        alg.name, m, len(tables), len(idempotent),
    )

    ops = []
    for i, flat in enumerate(idempotent):
        table = np.array(flat, dtype=np.int64).reshape((size,) * m)
        table.setflags(write=False)
        ops.append(Operation(name=f"t{m}_{i}", arity=m, table=table))
    return FiniteAlgebra(size=size, operations=tuple(ops), name=f"{alg.name}@level{m}")
