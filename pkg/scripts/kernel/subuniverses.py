"""
Subuniverses of the idempotent reduct.

A set S is a subuniverse of the idempotent reduct when every idempotent term
operation maps S^n into S.  It is enough to close the list of the elements of
S (one variable per element) under idempotent terms: any other tuple from S^n
is obtained by identifying variables, and identifying variables of an
idempotent term gives another idempotent term.
"""

from __future__ import annotations

import itertools
from typing import Sequence

from scripts.kernel.algebra import FiniteAlgebra, is_idempotent_presentation
from scripts.kernel.closure import Limits, ResourceLimitError, idempotent_image_closure, sg_power


# Exhaustive subset scans stop at this universe size unless told otherwise.
DEFAULT_SUBUNIVERSE_BOUND = 8


def subset_key(subset: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Canonical tie-break: size first, then the sorted elements."""
    elements = tuple(sorted(subset))
    return len(elements), elements


def idempotent_closure_of_set(
    alg: FiniteAlgebra,
    subset: Sequence[int],
    *,
    limits: Limits = Limits(),
) -> tuple[int, ...]:
    """
    The least idempotent subuniverse containing ``subset``.

    When every basic operation is idempotent so is every term, and the plain
    closure in A^1 already gives the answer.
    """
    generators = [(int(s),) for s in sorted(set(subset))]
    if is_idempotent_presentation(alg):
        return tuple(sg_power(alg, 1, generators, limits=limits).members.codes())
    closure = idempotent_image_closure(alg, 1, generators, limits=limits)
    return tuple(closure.members.codes())


def is_idempotent_subuniverse(
    alg: FiniteAlgebra,
    subset: Sequence[int],
    *,
    limits: Limits = Limits(),
) -> bool:
    """
    True iff ``subset`` is closed under every idempotent term operation.
    """
    elements = tuple(sorted(set(int(s) for s in subset)))
    if not elements:
        raise ValueError("Subuniverse test needs a nonempty subset.")
    return idempotent_closure_of_set(alg, elements, limits=limits) == elements


def enumerate_idempotent_subuniverses(
    alg: FiniteAlgebra,
    *,
    bound: int = DEFAULT_SUBUNIVERSE_BOUND,
    limits: Limits = Limits(),
) -> list[tuple[int, ...]]:
    """
    All nonempty idempotent subuniverses, ascending by size then elements.

    Raises
    ------
    ResourceLimitError
        The universe is larger than ``bound`` (the scan visits 2**size subsets).
    """
    if alg.size > bound:
        raise ResourceLimitError("subuniverse scan", bound, alg.size)

    found: list[tuple[int, ...]] = []
    for size in range(1, alg.size + 1):
        for subset in itertools.combinations(range(alg.size), size):
            if idempotent_closure_of_set(alg, subset, limits=limits) == subset:
                found.append(subset)
    return sorted(found, key=subset_key)
