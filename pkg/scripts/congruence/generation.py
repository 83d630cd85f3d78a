"""
Congruence generation on carrier algebras.

Cg(P) is the least equivalence containing P and closed under the basic
translations x ↦ f(c_1, ..., x at i, ..., c_r).  Every unary polynomial is a
composite of basic translations, so this equals the least congruence
containing P.

The worklist holds the edges that caused a union-find merge (plus the
generating pairs).  These edges span every class, and if the images of each
spanning edge under every basic translation are related, so are the images
of any two related elements: map the connecting path edge by edge.
"""

from __future__ import annotations

import logging
from collections import deque
from typing import Iterable, Optional

import numpy as np

from scripts.congruence.carrier import CarrierAlgebra, projection_values
from scripts.congruence.partition import Partition, UnionFind
from scripts.kernel.closure import ResourceLimitError

logger = logging.getLogger(__name__)


DEFAULT_CONGRUENCE_CAP = 60
DEFAULT_MAX_CONGRUENCES = 10_000


def generated_congruence(carrier: CarrierAlgebra, pairs: Iterable[tuple[int, int]]) -> Partition:
    """
    The least congruence of ``carrier`` relating every pair of element
    indices in ``pairs``.
    """
    n = carrier.size
    uf = UnionFind(n)
    queue: deque[tuple[int, int]] = deque()
    for x, y in pairs:
        if not (0 <= x < n and 0 <= y < n):
            raise ValueError(f"Pair ({x}, {y}) references an element outside 0..{n - 1}.")
        if uf.union(x, y):
            queue.append((x, y))

    operations = [
        (op_index, op.arity)
        for op_index, op in enumerate(carrier.algebra.operations)
        if op.arity > 0
    ]
    while queue and uf.classes > 1:
        x, y = queue.popleft()
        for op_index, arity in operations:
            for coordinate in range(arity):
                left = carrier.translation_images(op_index, coordinate, x)
                right = carrier.translation_images(op_index, coordinate, y)
                differ = np.flatnonzero(left != right)
                for position in differ.tolist():
                    a, b = int(left[position]), int(right[position])
                    if uf.union(a, b):
                        queue.append((a, b))

    logger.debug("generated congruence on %d element(s): %d block(s)", n, uf.classes)
    return Partition.from_union_find(uf)


def kernel_of_projection(carrier: CarrierAlgebra, coordinate: int) -> Partition:
    """Elements related when they agree at ``coordinate``."""
    values = projection_values(carrier, coordinate)
    return Partition.from_labels(range(carrier.size), values.tolist())


def congruence_join(carrier: CarrierAlgebra, p: Partition, q: Partition) -> Partition:
    """
    p ∨ q.  The transitive closure of two congruences is already compatible,
    so this equals generated_congruence on the spanning pairs of both without
    walking the translations again.
    """
    uf = UnionFind(carrier.size)
    for x, y in p.spanning_pairs() + q.spanning_pairs():
        uf.union(x, y)
    return Partition.from_union_find(uf)


def is_compatible(carrier: CarrierAlgebra, p: Partition) -> bool:
    """
    True iff every basic operation maps related arguments to related
    results, checked one coordinate at a time against the first member of
    each block.
    """
    if len(p) != carrier.size:
        raise ValueError(f"Partition covers {len(p)} element(s), carrier has {carrier.size}.")
    labels = np.empty(carrier.size, dtype=np.intp)
    for number, block in enumerate(p.blocks):
        labels[list(block)] = number

    for op_index, op in enumerate(carrier.algebra.operations):
        for coordinate in range(op.arity):
            for block in p.blocks:
                reference = labels[carrier.translation_images(op_index, coordinate, block[0])]
                for other in block[1:]:
                    image = labels[carrier.translation_images(op_index, coordinate, other)]
                    if not np.array_equal(reference, image):
                        return False
    return True


def all_congruences(
    carrier: CarrierAlgebra,
    *,
    cap: int = DEFAULT_CONGRUENCE_CAP,
    max_congruences: int = DEFAULT_MAX_CONGRUENCES,
) -> list[Partition]:
    """
    Every congruence, as joins of principal congruences.  Sorted by
    descending index (identity first), then by blocks.

    Raises
    ------
    ResourceLimitError
        The carrier has more than ``cap`` elements, or more than
        ``max_congruences`` congruences turned up.
    """
    n = carrier.size
    if n > cap:
        raise ResourceLimitError("congruence enumeration carrier", cap, n)

    identity = Partition.identity(range(n))
    principal: list[Partition] = []
    seen: set[Partition] = {identity}

    def record(p: Partition) -> bool:
        if p in seen:
            return False
        seen.add(p)
        if len(seen) > max_congruences:
            raise ResourceLimitError("congruence enumeration", max_congruences, len(seen))
        return True

    for x in range(n):
        for y in range(x + 1, n):
            p = generated_congruence(carrier, [(x, y)])
            if p not in principal:
                principal.append(p)
            record(p)

    frontier: list[Partition] = list(principal)
    while frontier:
        fresh: list[Partition] = []
        for p in frontier:
            for q in principal:
                if q.refines(p):
                    continue
                joined = congruence_join(carrier, p, q)
                if record(joined):
                    fresh.append(joined)
        frontier = fresh

    result = sorted(seen, key=lambda p: (-p.index, p.blocks))
    logger.debug("carrier of %d element(s): %d congruence(s)", n, len(result))
    return result


def sample_congruences(
    carrier: CarrierAlgebra,
    budget: int,
    rng: np.random.Generator,
    *,
    pairs_per_sample: Optional[int] = None,
) -> list[Partition]:
    """
    ``budget`` congruences generated from random pairs of distinct elements
    (one pair each unless ``pairs_per_sample`` says otherwise).
    """
    n = carrier.size
    if n < 2:
        return [Partition.identity(range(n))]
    count = pairs_per_sample or 1
    sampled = []
    for _ in range(budget):
        pairs = []
        for _ in range(count):
            x, y = rng.choice(n, size=2, replace=False)
            pairs.append((int(x), int(y)))
        sampled.append(generated_congruence(carrier, pairs))
    return sampled
