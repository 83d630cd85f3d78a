"""
Free-algebra evaluation vectors.

A term t in n variables is determined, as an element of the free algebra of
V(A), by its values on all |A|^n assignments.  For deciding a particular
family of identities fewer assignments suffice: an identity s ≈ t whose
instances are the substitutions of a fixed shape holds in V(A) exactly when
s and t agree on every assignment of that shape.  A *point schema* lists
those assignments and ``free_restriction_closure`` computes the term
operations restricted to them.

The closure of the n projection vectors under the basic operations (applied
pointwise) is exactly the set of restricted term operations, and its parent
records give a term for each vector.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from scripts.kernel.algebra import FiniteAlgebra
from scripts.kernel.closure import Closure, Limits, sg_power
from scripts.kernel.terms import Term, evaluate_term
from scripts.kernel.tuples import encode_tuple

logger = logging.getLogger(__name__)


FOUND = "found"
ABSENT = "absent"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class EvaluationVector:
    """A term operation restricted to a point schema."""

    points: tuple[tuple[int, ...], ...]
    values: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.points) != len(self.values):
            raise ValueError(
                f"Vector has {len(self.values)} value(s) for {len(self.points)} point(s)."
            )


class FreeRestriction:
    """
    Result of ``free_restriction_closure``: the schema, the closure in
    A^len(points) and helpers to move between vectors and terms.
    """

    def __init__(self, alg: FiniteAlgebra, n_vars: int, points: np.ndarray, closure: Closure) -> None:
        self.algebra = alg
        self.n_vars = n_vars
        self.points = points
        self.closure = closure

    def __len__(self) -> int:
        return len(self.closure)

    @property
    def complete(self) -> bool:
        return self.closure.complete

    @property
    def rows(self) -> np.ndarray:
        return self.closure.rows

    def projection_index(self, var: int) -> int:
        """Discovery index of the vector of ``Var(var)``."""
        code = encode_tuple(self.points[:, var].tolist(), self.algebra.size)
        return self.closure.index_of(code)

    def vector(self, index: int) -> EvaluationVector:
        return EvaluationVector(
            points=tuple(tuple(int(v) for v in p) for p in self.points),
            values=tuple(int(v) for v in self.rows[index]),
        )

    def term(self, index: int) -> Term:
        return self.closure.term_for(self.closure.codes[index])

    def idempotent_mask(self) -> np.ndarray:
        """
        Vectors that return a at every diagonal point (a, ..., a) present in
        the schema.
        """
        diagonal = np.all(self.points == self.points[:, :1], axis=1)
        if not diagonal.any():
            return np.ones(len(self.closure), dtype=bool)
        return np.all(self.rows[:, diagonal] == self.points[diagonal, 0], axis=1)


def all_assignments(size: int, n_vars: int) -> np.ndarray:
    """Every assignment of n_vars variables, lexicographic, as an (size**n, n) array."""
    return np.asarray(list(itertools.product(range(size), repeat=n_vars)), dtype=np.int64).reshape(-1, n_vars)


def free_restriction_closure(
    alg: FiniteAlgebra,
    n_vars: int,
    points: Sequence[Sequence[int]] | np.ndarray,
    *,
    limits: Limits = Limits(),
    stop_when: Optional[Callable[[FreeRestriction], bool]] = None,
) -> FreeRestriction:
    """
    Close the projection vectors of ``n_vars`` variables, restricted to
    ``points``, under the basic operations.

    ``stop_when`` sees the vectors found after each closure round and may end
    the closure early (the result then has ``complete`` False).

    Raises
    ------
    ResourceLimitError
        The closure outgrew ``limits``.  ``partial`` holds the closure found
        so far.
    """
    schema = np.asarray(points, dtype=np.int64).reshape(-1, n_vars)
    if schema.size and (schema.min() < 0 or schema.max() >= alg.size):
        raise ValueError(f"Point schema has values outside the universe [0, {alg.size}).")

    hook: Optional[Callable[[Closure], bool]] = None
    if stop_when is not None:
        def wrapped(snapshot: Closure) -> bool:
            return stop_when(FreeRestriction(alg, n_vars, schema, snapshot))

        hook = wrapped

    projections = schema.T.copy()
    closure = sg_power(alg, len(schema), projections, limits=limits, record_parents=True, stop_when=hook)
    logger.debug(
        "%s: free restriction on %d variable(s), %d point(s): %d vector(s)",
        alg.name, n_vars, len(schema), len(closure),
    )
    return FreeRestriction(alg, n_vars, schema, closure)


def verify_term_identities(
    alg: FiniteAlgebra,
    term_s: Term,
    term_t: Term,
    schema: Sequence[Sequence[int]] | np.ndarray,
) -> bool:
    """
    True iff s and t agree on every assignment in ``schema``.  With
    ``all_assignments`` as the schema this decides s ≈ t in V(A).
    """
    points = np.asarray(schema, dtype=np.int64)
    if points.ndim != 2:
        raise ValueError("Schema must be a list of assignments.")
    args = [points[:, j] for j in range(points.shape[1])]
    return bool(np.array_equal(evaluate_term(alg, term_s, args), evaluate_term(alg, term_t, args)))
