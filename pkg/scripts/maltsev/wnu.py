"""
Weak near-unanimity terms.

An n-ary WNU term is idempotent and satisfies

    t(y, x, ..., x) ≈ t(x, y, x, ..., x) ≈ ... ≈ t(x, ..., x, y).

The schema is every one-y assignment (y at position j, x elsewhere) for
x ≠ y, plus the diagonals.  A vector that is idempotent on the diagonals and
constant across j for each pair (x, y) is the restriction of a WNU term, and
since the schema holds every instance of the identities, the absence of such
a vector proves V(A) has no n-ary WNU term.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from scripts.kernel.algebra import FiniteAlgebra
from scripts.kernel.closure import InconsistencyError, Limits, ResourceLimitError
from scripts.kernel.terms import Term, evaluate_term, render_term
from scripts.maltsev.free import (
    ABSENT,
    FOUND,
    INCONCLUSIVE,
    free_restriction_closure,
)

logger = logging.getLogger(__name__)


DEFAULT_WNU_ARITIES = (2, 3, 4)


@dataclass
class WnuResult:
    arity: int
    status: str
    term: Optional[Term] = None
    closure_size: int = 0
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "arity": self.arity,
            "status": self.status,
            "term": render_term(self.term) if self.term is not None else None,
            "closure_size": self.closure_size,
            "notes": list(self.notes),
        }


def wnu_points(size: int, n: int) -> np.ndarray:
    """
    One-y assignments grouped by (x, y) with positions j = 0..n-1 inside each
    group, followed by the diagonals.
    """
    points = []
    for x in range(size):
        for y in range(size):
            if x == y:
                continue
            for j in range(n):
                point = [x] * n
                point[j] = y
                points.append(point)
    for a in range(size):
        points.append([a] * n)
    return np.asarray(points, dtype=np.int64).reshape(-1, n)


def _wnu_mask(rows: np.ndarray, size: int, n: int) -> np.ndarray:
    groups = size * (size - 1)
    one_y = rows[:, : groups * n].reshape(len(rows), groups, n)
    uniform = np.all(one_y == one_y[:, :, :1], axis=(1, 2))
    diagonal = np.all(rows[:, groups * n: groups * n + size] == np.arange(size), axis=1)
    return uniform & diagonal


def verify_wnu(alg: FiniteAlgebra, term: Term, n: int) -> bool:
    """
    Re-check idempotence and the WNU identities over every (x, y) ∈ A².
    """
    universe = np.arange(alg.size)
    if not np.array_equal(evaluate_term(alg, term, [universe] * n), universe):
        return False
    xs, ys = np.meshgrid(universe, universe, indexing="ij")
    xs, ys = xs.reshape(-1), ys.reshape(-1)
    values = [
        evaluate_term(alg, term, [ys if i == j else xs for i in range(n)])
        for j in range(n)
    ]
    return all(np.array_equal(values[0], v) for v in values[1:])


def find_wnu(
    alg: FiniteAlgebra,
    n: int,
    *,
    limits: Limits = Limits(),
    extra_points: Sequence[Sequence[int]] = (),
) -> WnuResult:
    """
    Search the free restriction for an n-ary WNU term.

    ``extra_points`` are appended to the schema; they refine the closure but
    play no part in the test.
    """
    if n < 2:
        raise ValueError(f"WNU arity must be at least 2, got {n}.")

    points = wnu_points(alg.size, n)
    if len(extra_points):
        points = np.concatenate([points, np.asarray(extra_points, dtype=np.int64).reshape(-1, n)])

    try:
        free = free_restriction_closure(alg, n, points, limits=limits)
    except ResourceLimitError as exc:
        return WnuResult(arity=n, status=INCONCLUSIVE, notes=[str(exc).splitlines()[0]])

    hits = np.flatnonzero(_wnu_mask(free.rows, alg.size, n))
    if hits.size == 0:
        logger.debug("%s: no %d-ary WNU among %d vector(s)", alg.name, n, len(free))
        return WnuResult(arity=n, status=ABSENT, closure_size=len(free))

    term = free.term(int(hits[0]))
    if not verify_wnu(alg, term, n):
        raise InconsistencyError(f"{alg.name}: {n}-ary WNU candidate {render_term(term)} fails re-verification.")
    return WnuResult(arity=n, status=FOUND, term=term, closure_size=len(free))
