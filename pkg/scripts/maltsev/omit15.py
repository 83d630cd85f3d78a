"""
Chains of 4-ary terms characterising the omission of types 1 and 5.

V(A) omits both types exactly when there are idempotent terms
f_0, ..., f_{2m+1} in variables (x, y, u, v) with

    f_0 ≈ x                                   f_{2m+1} ≈ v
    f_i(x,y,y,y) ≈ f_{i+1}(x,y,y,y)           i even
    f_i(x,x,y,y) ≈ f_{i+1}(x,x,y,y)           i odd
    f_i(x,y,x,y) ≈ f_{i+1}(x,y,x,y)           i odd

Search
------
The schema holds (x,y,y,y), (x,x,y,y) and (x,y,x,y) for every (x, y) ∈ A²,
followed by the diagonals.  Restricted to it, two idempotent vectors are
"even-linked" when they agree on the (x,y,y,y) block and "odd-linked" when
they agree on the other two blocks.  A chain is a walk from π_x to π_v that
alternates even and odd links, starting with an even one and ending after an
odd one.  Breadth-first search over (vector, parity of index) finds a
shortest walk, hence the least m among chains in the closure.

The endpoints are the projections themselves, not merely vectors equal to
them on the schema.  Equality on the schema is equality of the substituted
identities over all of A², which is exactly what the conditions ask for.
The closure is the full free restriction, so a failed search proves the
chain does not exist.  Every vector of a partial closure is still a term
operation, so a walk found before a resource cap is a genuine chain; only
absence needs the complete closure.

Sections
--------
The chain identities pass to subalgebras and quotients.  ``decide_omit15``
first searches the proper sections of the algebra, which are small, and
reports absence as soon as one of them has no chain.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from scripts.kernel.algebra import FiniteAlgebra
from scripts.kernel.closure import InconsistencyError, Limits, ResourceLimitError
from scripts.kernel.terms import Term, Var, evaluate_term, render_term
from scripts.maltsev.free import ABSENT, FOUND, INCONCLUSIVE, FreeRestriction, free_restriction_closure

logger = logging.getLogger(__name__)


CHAIN_VARIABLES = ("x", "y", "u", "v")


@dataclass(frozen=True)
class Omit15Chain:
    m: int
    terms: tuple[Term, ...]

    def rendered(self) -> list[str]:
        return [render_term(t, CHAIN_VARIABLES) for t in self.terms]


@dataclass
class Omit15Result:
    status: str
    chain: Optional[Omit15Chain] = None
    closure_size: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def present(self) -> bool:
        return self.status == FOUND

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "m": self.chain.m if self.chain else None,
            "terms": self.chain.rendered() if self.chain else None,
            "closure_size": self.closure_size,
            "notes": list(self.notes),
        }


# -----------------------------------------------------------------------------
# SCHEMA
# -----------------------------------------------------------------------------

def _pairs(size: int) -> tuple[np.ndarray, np.ndarray]:
    xs, ys = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    return xs.reshape(-1), ys.reshape(-1)


def shape_points(size: int, shape: str) -> np.ndarray:
    """
    Instances of a substitution shape such as ``"xyyy"`` over every
    (x, y) ∈ A², as an (size², 4) array.
    """
    xs, ys = _pairs(size)
    columns = [xs if letter == "x" else ys for letter in shape]
    return np.stack(columns, axis=1).astype(np.int64)


def chain_points(size: int) -> np.ndarray:
    diagonals = np.repeat(np.arange(size, dtype=np.int64)[:, None], 4, axis=1)
    return np.concatenate([
        shape_points(size, "xyyy"),
        shape_points(size, "xxyy"),
        shape_points(size, "xyxy"),
        diagonals,
    ])


# -----------------------------------------------------------------------------
# VERIFICATION
# -----------------------------------------------------------------------------

def verify_omit15_chain(alg: FiniteAlgebra, chain: Omit15Chain) -> bool:
    """
    Re-check every condition of the chain by direct evaluation over A².
    """
    terms = chain.terms
    if len(terms) != 2 * chain.m + 2:
        return False
    if terms[0] != Var(0) or terms[-1] != Var(3):
        return False

    universe = np.arange(alg.size)
    for term in terms:
        if not np.array_equal(evaluate_term(alg, term, [universe] * 4), universe):
            return False

    def agree(s: Term, t: Term, shape: str) -> bool:
        points = shape_points(alg.size, shape)
        args = [points[:, j] for j in range(4)]
        return bool(np.array_equal(evaluate_term(alg, s, args), evaluate_term(alg, t, args)))

    for i in range(len(terms) - 1):
        shapes = ("xyyy",) if i % 2 == 0 else ("xxyy", "xyxy")
        if not all(agree(terms[i], terms[i + 1], shape) for shape in shapes):
            return False
    return True


# -----------------------------------------------------------------------------
# SEARCH
# -----------------------------------------------------------------------------

def _classes(keys: list[bytes], members: Sequence[int]) -> dict[bytes, list[int]]:
    classes: dict[bytes, list[int]] = {}
    for index in members:
        classes.setdefault(keys[index], []).append(index)
    return classes


def _shortest_walk(free: FreeRestriction) -> Optional[list[int]]:
    """Vector indices of a shortest π_x ... π_v walk, or None."""
    size = free.algebra.size
    rows = free.rows
    block = size * size
    even_keys = [row.tobytes() for row in np.ascontiguousarray(rows[:, :block])]
    odd_keys = [row.tobytes() for row in np.ascontiguousarray(rows[:, block: 3 * block])]
    idempotent = np.flatnonzero(free.idempotent_mask()).tolist()
    even_classes = _classes(even_keys, idempotent)
    odd_classes = _classes(odd_keys, idempotent)

    start = free.projection_index(0)
    goal = free.projection_index(3)

    # state = (vector index, parity of its position in the chain)
    parent: dict[tuple[int, int], Optional[tuple[int, int]]] = {(start, 0): None}
    expanded: set[tuple[bytes, int]] = set()
    queue = deque([(start, 0)])
    found: Optional[tuple[int, int]] = None

    while queue and found is None:
        index, parity = queue.popleft()
        key = even_keys[index] if parity == 0 else odd_keys[index]
        if (key, parity) in expanded:
            continue
        expanded.add((key, parity))
        neighbours = even_classes[key] if parity == 0 else odd_classes[key]
        for nxt in neighbours:
            state = (nxt, 1 - parity)
            if state in parent:
                continue
            parent[state] = (index, parity)
            if state == (goal, 1):
                found = state
                break
            queue.append(state)

    if found is None:
        return None
    path = []
    state: Optional[tuple[int, int]] = found
    while state is not None:
        path.append(state[0])
        state = parent[state]
    path.reverse()
    return path


def _chain_result(alg: FiniteAlgebra, free: FreeRestriction, path: list[int], notes: list[str]) -> Omit15Result:
    terms = [Var(0)] + [free.term(i) for i in path[1:-1]] + [Var(3)]
    chain = Omit15Chain(m=(len(terms) - 2) // 2, terms=tuple(terms))
    if not verify_omit15_chain(alg, chain):
        raise InconsistencyError(f"{alg.name}: chain {chain.rendered()} fails re-verification.")
    return Omit15Result(status=FOUND, chain=chain, closure_size=len(free), notes=notes)


def find_omit15_chain(
    alg: FiniteAlgebra,
    *,
    limits: Limits = Limits(),
    extra_points: Sequence[Sequence[int]] = (),
    first_found: bool = False,
) -> Omit15Result:
    """
    Shortest chain in the free restriction, proven absence, or
    ``inconclusive`` when the closure hit a resource limit.

    A closure stopped by a limit is still searched: a chain among the
    vectors found so far is a chain.  ``first_found`` searches after every
    closure round and stops at the first round that holds a chain, so m is
    least among the vectors of that round rather than of the whole closure.
    """
    size = alg.size
    points = chain_points(size)
    if len(extra_points):
        points = np.concatenate([points, np.asarray(extra_points, dtype=np.int64).reshape(-1, 4)])

    walks: dict[str, list[int]] = {}

    def chain_so_far(snapshot: FreeRestriction) -> bool:
        path = _shortest_walk(snapshot)
        if path is not None:
            walks["path"] = path
        return path is not None

    try:
        free = free_restriction_closure(
            alg, 4, points, limits=limits, stop_when=chain_so_far if first_found else None,
        )
    except ResourceLimitError as exc:
        note = str(exc).splitlines()[0]
        if exc.partial is None:
            return Omit15Result(status=INCONCLUSIVE, notes=[note])
        partial = FreeRestriction(alg, 4, points, exc.partial)
        path = _shortest_walk(partial)
        if path is None:
            return Omit15Result(status=INCONCLUSIVE, closure_size=len(partial), notes=[note])
        logger.debug("%s: chain among %d vector(s) of a capped closure", alg.name, len(partial))
        return _chain_result(alg, partial, path, [f"found before the cap: {note}"])

    if "path" in walks:
        return _chain_result(alg, free, walks["path"], [f"stopped after {len(free):,} vector(s)"])

    path = _shortest_walk(free)
    if path is None:
        logger.debug("%s: no chain among %d vector(s)", alg.name, len(free))
        return Omit15Result(status=ABSENT, closure_size=len(free))
    return _chain_result(alg, free, path, [])
