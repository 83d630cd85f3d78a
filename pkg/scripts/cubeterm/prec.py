"""
Bounded certificates for the relation a ≺ b.

a ≺ b holds when some idempotent term t and some length L admit columns
u_1, ..., u_n in {a, b}^L, each containing at least one b, with
t(u_1, ..., u_n) = (a, ..., a).  Equivalently the constant tuple a^L lies in
the idempotent image closure of {a, b}^L minus a^L.

A witness at length L lifts to every longer length: duplicate the last row of
every column.  The duplicated columns still contain a b and the term still
returns a in every row.  So ``prec_bounded`` only ever needs the first
success, and failure up to L_max says nothing about longer lengths.  The
relation a ⊀ b is never concluded here; it comes from blocker structure.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Optional, Union

from scripts.kernel.algebra import FiniteAlgebra
from scripts.kernel.closure import Limits, idempotent_image_closure
from scripts.kernel.terms import Term, render_term
from scripts.kernel.tuples import encode_tuple

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Holds:
    """a ≺ b, certified by ``term`` applied to ``columns`` at length ``length``."""

    term: Term
    length: int
    columns: tuple[tuple[int, ...], ...]

    def to_dict(self) -> dict:
        return {
            "result": "holds",
            "length": self.length,
            "term": render_term(self.term),
            "columns": [list(c) for c in self.columns],
        }


@dataclass(frozen=True)
class UnknownUpTo:
    """No witness at any length up to ``max_length``.  Not a refutation."""

    max_length: int

    def to_dict(self) -> dict:
        return {"result": "unknown", "max_length": self.max_length}


PrecResult = Union[Holds, UnknownUpTo]


def prec_columns(a: int, b: int, length: int) -> list[tuple[int, ...]]:
    """
    The columns {a, b}^length other than a^length, in lexicographic order of
    their 0/1 pattern (0 for a, 1 for b).  ``Var(i)`` in a witness term is
    column i.
    """
    return [
        tuple(b if bit else a for bit in bits)
        for bits in itertools.product((0, 1), repeat=length)
        if any(bits)
    ]


def _check_pair(alg: FiniteAlgebra, a: int, b: int) -> None:
    for value in (a, b):
        if not 0 <= value < alg.size:
            raise ValueError(f"Element {value} is outside the universe [0, {alg.size}).")
    if a == b:
        raise ValueError("The relation a ≺ b is only defined for a ≠ b.")


def prec_at_length(
    alg: FiniteAlgebra,
    a: int,
    b: int,
    length: int,
    *,
    limits: Limits = Limits(),
) -> Optional[Term]:
    """
    Look for a witness of a ≺ b at one row length.

    Returns
    -------
    Term or None
        A term over ``prec_columns(a, b, length)`` evaluating to a^length, or
        None when no idempotent term does so at this length.
    """
    _check_pair(alg, a, b)
    if length < 1:
        raise ValueError(f"Row length must be at least 1, got {length}.")

    columns = prec_columns(a, b, length)
    target = encode_tuple((a,) * length, alg.size)
    closure = idempotent_image_closure(
        alg,
        length,
        columns,
        limits=limits,
        record_parents=True,
        targets=[target],
    )
    if target not in closure:
        logger.debug("no witness for %d ≺ %d at length %d (%d elements)", a, b, length, len(closure))
        return None
    return closure.term_for(target)


def prec_bounded(
    alg: FiniteAlgebra,
    a: int,
    b: int,
    max_length: int,
    *,
    limits: Limits = Limits(),
) -> PrecResult:
    """
    Try lengths 1..max_length and return the first witness found.
    """
    _check_pair(alg, a, b)
    for length in range(1, max_length + 1):
        term = prec_at_length(alg, a, b, length, limits=limits)
        if term is not None:
            return Holds(term=term, length=length, columns=tuple(prec_columns(a, b, length)))
    return UnknownUpTo(max_length)
