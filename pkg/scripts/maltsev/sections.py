"""
Proper sections of an algebra and the chain decision that tries them first.

A section is a subalgebra on a proper subuniverse with at least two elements
or the quotient by a congruence other than the identity and the full
relation.  Both generate subvarieties of V(A), so a chain of A is a chain of
every section and a section without a chain settles absence for A.

Sections are tried smallest first, the subalgebra named by ``first`` (the
blocker's B in practice) ahead of the rest, subalgebras before quotients of
the same size.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from scripts.congruence.carrier import CarrierAlgebra
from scripts.congruence.generation import DEFAULT_CONGRUENCE_CAP, all_congruences
from scripts.congruence.partition import Partition
from scripts.kernel.algebra import FiniteAlgebra, induced_algebra, is_idempotent_presentation, quotient_algebra
from scripts.kernel.closure import Limits, ResourceLimitError
from scripts.kernel.subuniverses import DEFAULT_SUBUNIVERSE_BOUND, enumerate_idempotent_subuniverses
from scripts.maltsev.free import ABSENT
from scripts.maltsev.omit15 import Omit15Result, find_omit15_chain

logger = logging.getLogger(__name__)


SUBALGEBRA = "subalgebra"
QUOTIENT = "quotient"


@dataclass(frozen=True)
class Section:
    kind: str
    label: str
    algebra: FiniteAlgebra


def subset_label(subset: Sequence[int]) -> str:
    return "{" + ",".join(str(e) for e in sorted(subset)) + "}"


def partition_label(p: Partition) -> str:
    return "|".join("".join(str(e) for e in block) for block in p.blocks)


def algebra_congruences(
    alg: FiniteAlgebra,
    *,
    limits: Limits = Limits(),
    cap: int = DEFAULT_CONGRUENCE_CAP,
) -> list[Partition]:
    """Every congruence of ``alg`` itself, identity first."""
    carrier = CarrierAlgebra(alg, np.arange(alg.size, dtype=np.int64).reshape(-1, 1), limits=limits)
    return all_congruences(carrier, cap=cap)


def proper_sections(
    alg: FiniteAlgebra,
    *,
    first: Sequence[int] = (),
    limits: Limits = Limits(),
    subuniverse_bound: int = DEFAULT_SUBUNIVERSE_BOUND,
    congruence_cap: int = DEFAULT_CONGRUENCE_CAP,
) -> list[Section]:
    """
    Subalgebras (idempotent presentations only) and quotients, in search
    order.

    Raises
    ------
    ResourceLimitError
        The subuniverse scan or the congruence enumeration outgrew its cap.
    """
    sections: list[Section] = []
    if is_idempotent_presentation(alg):
        for subset in enumerate_idempotent_subuniverses(alg, bound=subuniverse_bound, limits=limits):
            if 2 <= len(subset) < alg.size:
                sections.append(Section(SUBALGEBRA, subset_label(subset), induced_algebra(alg, subset)))

    for theta in algebra_congruences(alg, limits=limits, cap=congruence_cap):
        if 2 <= theta.index < alg.size:
            labels = [0] * alg.size
            for number, block in enumerate(theta.blocks):
                for element in block:
                    labels[element] = number
            sections.append(Section(QUOTIENT, partition_label(theta), quotient_algebra(alg, labels)))

    leading = subset_label(first) if first else None
    return sorted(
        sections,
        key=lambda s: (
            not (s.kind == SUBALGEBRA and s.label == leading),
            s.algebra.size,
            s.kind != SUBALGEBRA,
        ),
    )


def decide_omit15(
    alg: FiniteAlgebra,
    *,
    first: Sequence[int] = (),
    limits: Limits = Limits(),
    subuniverse_bound: int = DEFAULT_SUBUNIVERSE_BOUND,
    congruence_cap: int = DEFAULT_CONGRUENCE_CAP,
    first_found: bool = False,
) -> Omit15Result:
    """
    ``find_omit15_chain`` on ``alg``, after looking for a proper section
    without a chain.  Absence found on a section names it in ``notes``.
    """
    try:
        sections = proper_sections(
            alg,
            first=first,
            limits=limits,
            subuniverse_bound=subuniverse_bound,
            congruence_cap=congruence_cap,
        )
    except ResourceLimitError as exc:
        logger.debug("%s: no section screen (%s)", alg.name, str(exc).splitlines()[0])
        sections = []

    for section in sections:
        result = find_omit15_chain(section.algebra, limits=limits, first_found=True)
        if result.status == ABSENT:
            logger.debug("%s: no chain on %s %s", alg.name, section.kind, section.label)
            return Omit15Result(
                status=ABSENT,
                closure_size=result.closure_size,
                notes=[f"no chain on the {section.kind} {section.label}"],
            )

    return find_omit15_chain(alg, limits=limits, first_found=first_found)
