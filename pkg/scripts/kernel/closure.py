"""
Subpower closure engines.

``sg_power`` computes Sg(G) inside A^k: the least set containing the
generators and closed under every basic operation applied coordinatewise.

Worklist scheme
---------------
Elements are numbered in discovery order.  Each round has a frontier
[start, end); an operation of arity r is applied only to argument tuples with
at least one frontier member.  The tuples are split by the position p of the
first frontier member:

    positions < p   range over settled elements [0, start)
    position  p     ranges over the frontier    [start, end)
    positions > p   range over everything        [0, end)

so every tuple is evaluated exactly once over the whole run.  Operations are
visited in algebra order and tuples in lexicographic order, which fixes the
discovery order, the parent records and hence the reconstructed terms.

``idempotent_image_closure`` runs the same engine in A^(k+|A|) with the
identity tag (0, 1, ..., |A|-1) appended to every generator.  A term t sends
the tag to (t(a, ..., a))_a, which equals the identity tag exactly when t is
idempotent, so filtering on the tag keeps { t(G) : t idempotent }.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional, Sequence

import numpy as np

from scripts.kernel.algebra import FiniteAlgebra
from scripts.kernel.terms import Apply, Term, Var, evaluate_term
from scripts.kernel.tuples import (
    DENSE_CODE_CAP,
    TupleSet,
    decode_codes,
    encode_rows,
    encode_tuple,
)

logger = logging.getLogger(__name__)


# Argument tuples evaluated per numpy batch.
BATCH_TUPLES = 1 << 15


# -----------------------------------------------------------------------------
# LIMITS AND ERRORS
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class Limits:
    """
    Resource caps shared by every closure engine.

    max_closure:
        Largest number of elements a single closure may hold.

    max_work:
        Largest number of coordinate evaluations (argument tuples times k)
        a single closure may spend.

    dense_code_cap:
        Code spaces up to this size use a dense bitset.
    """

    max_closure: int = 200_000
    max_work: int = 400_000_000
    dense_code_cap: int = DENSE_CODE_CAP


class ResourceLimitError(RuntimeError):
    """
    A closure or enumeration outgrew its configured cap.

    ``partial`` is set by ``sg_power`` to the elements found before the cap
    (a ``Closure`` with ``complete=False``); it is None for other engines.
    """

    def __init__(self, what: str, limit: int, count: int) -> None:
        super().__init__(
            f"{what} exceeded its cap: reached {count:,} with limit {limit:,}.\n"
            f"Raise the limit (profile budget or CUBEWRIGHT_MAX_CLOSURE) to go further."
        )
        self.what = what
        self.limit = limit
        self.count = count
        self.partial: Optional["Closure"] = None


class InconsistencyError(RuntimeError):
    """
    A certificate failed its own re-check.  This indicates a bug, not a
    property of the input algebra.
    """


# -----------------------------------------------------------------------------
# CLOSURE RESULT
# -----------------------------------------------------------------------------

class Closure:
    """
    Result of ``sg_power``.

    ``rows[i]`` is element i in discovery order and ``parents[i]`` is either
    None (a generator) or ``(op_index, argument_indices)``.  ``complete`` is
    False when expansion stopped early because every requested target was
    reached.
    """

    def __init__(
        self,
        algebra: FiniteAlgebra,
        k: int,
        generator_rows: np.ndarray,
        rows: np.ndarray,
        members: TupleSet,
        codes: Sequence[int],
        parents: Optional[list[Optional[tuple[int, tuple[int, ...]]]]],
        origin_var: dict[int, int],
        complete: bool,
        work: int,
    ) -> None:
        self.algebra = algebra
        self.k = k
        self.generator_rows = generator_rows
        self.rows = rows
        self.members = members
        self.codes = list(int(c) for c in codes)
        self.parents = parents
        self.origin_var = origin_var
        self.complete = complete
        self.work = work
        self._index: Optional[dict[int, int]] = None

    def __len__(self) -> int:
        return len(self.codes)

    def __contains__(self, code: object) -> bool:
        return code in self.members

    def index_of(self, code: int) -> int:
        if self._index is None:
            self._index = {c: i for i, c in enumerate(self.codes)}
        try:
            return self._index[int(code)]
        except KeyError:
            raise KeyError(f"Element code {code} is not in the closure.") from None

    def term_for(self, code: int) -> Term:
        """
        Return a term over the generators (``Var(i)`` is the i-th generator as
        given) that evaluates coordinatewise to the element ``code``.

        The term is re-evaluated before it is returned.
        """
        if self.parents is None:
            raise ValueError("This closure was computed without parent records.")
        target = self.index_of(code)
        ops = self.algebra.operations
        memo: dict[int, Term] = {}

        def build(index: int) -> Term:
            if index in memo:
                return memo[index]
            parent = self.parents[index]
            if parent is None:
                node: Term = Var(self.origin_var[index])
            else:
                op_index, args = parent
                node = Apply(ops[op_index].name, tuple(build(a) for a in args))
            memo[index] = node
            return node

        # Depth is bounded by the number of closure rounds.
        term = build(target)

        generator_args = [self.generator_rows[i] for i in range(len(self.generator_rows))]
        value = evaluate_term(self.algebra, term, generator_args)
        if not np.array_equal(value, self.rows[target]):
            raise InconsistencyError(
                f"Reconstructed term does not evaluate to element {code}: "
                f"got {value.tolist()}, expected {self.rows[target].tolist()}."
            )
        return term

    def sorted_rows(self) -> tuple[list[int], np.ndarray]:
        """Elements in ascending code order, as (codes, rows)."""
        order = sorted(range(len(self.codes)), key=self.codes.__getitem__)
        return [self.codes[i] for i in order], self.rows[order]


# -----------------------------------------------------------------------------
# ENGINE
# -----------------------------------------------------------------------------

def _as_rows(generators: object, size: int, k: int) -> np.ndarray:
    """
    Accept a TupleSet, a (count, k) array, a sequence of tuples or a sequence
    of codes and return a (count, k) int64 array in the given order.
    """
    if isinstance(generators, TupleSet):
        if generators.k != k:
            raise ValueError(f"Generators live in A^{generators.k}, not A^{k}.")
        return decode_codes(generators.codes(), size, k)

    if isinstance(generators, np.ndarray):
        rows = np.asarray(generators, dtype=np.int64)
        if rows.ndim == 1 and rows.size == 0:
            return rows.reshape(0, k)
        if rows.ndim != 2 or rows.shape[1] != k:
            raise ValueError(f"Generator array must have shape (count, {k}).")
        return rows

    items = list(generators)  # type: ignore[arg-type]
    if not items:
        return np.zeros((0, k), dtype=np.int64)
    if isinstance(items[0], (int, np.integer)):
        return decode_codes(items, size, k)
    rows = np.asarray(items, dtype=np.int64).reshape(len(items), k)
    return rows


def _argument_blocks(ranges: Sequence[tuple[int, int]], batch: int) -> Iterator[np.ndarray]:
    """
    Yield (n, r) arrays of element indices covering the product of ``ranges``
    in lexicographic order.
    """
    if not ranges:
        yield np.zeros((1, 0), dtype=np.intp)
        return

    rest = math.prod(hi - lo for lo, hi in ranges[1:])
    lo, hi = ranges[0]

    if rest <= batch:
        width = max(1, batch // max(rest, 1))
        tail = [np.arange(l, h, dtype=np.intp) for l, h in ranges[1:]]
        for start in range(lo, hi, width):
            axes = [np.arange(start, min(start + width, hi), dtype=np.intp), *tail]
            grids = np.meshgrid(*axes, indexing="ij")
            yield np.stack([g.reshape(-1) for g in grids], axis=1)
    else:
        for first in range(lo, hi):
            for block in _argument_blocks(ranges[1:], batch):
                yield np.column_stack([np.full(len(block), first, dtype=np.intp), block])


def sg_power(
    alg: FiniteAlgebra,
    k: int,
    generators: object,
    *,
    limits: Limits = Limits(),
    record_parents: bool = False,
    targets: Optional[Iterable[int]] = None,
    stop_when: Optional[Callable[[Closure], bool]] = None,
) -> Closure:
    """
    Close ``generators`` inside A^k under the basic operations of ``alg``.

    Parameters
    ----------
    generators:
        TupleSet, (count, k) array, tuples or codes.  Order matters only for
        the variable numbering of reconstructed terms.

    record_parents:
        Keep one derivation per element so ``Closure.term_for`` works.

    targets:
        Optional codes; expansion stops as soon as all are members.  The
        result is then marked ``complete=False``.

    stop_when:
        Called with the elements found so far after every round that added
        something; a true return stops expansion (``complete=False``).  The
        snapshot shares storage with the running closure and is only valid
        during the call unless expansion stops.

    Raises
    ------
    ResourceLimitError
        The closure grew past ``limits.max_closure`` elements or spent more
        than ``limits.max_work`` coordinate evaluations.  The elements found
        so far are attached as ``partial``.
    """
    size = alg.size
    generator_rows = _as_rows(generators, size, k)
    members = TupleSet(size, k, dense_cap=limits.dense_code_cap)
    wanted = set(int(t) for t in targets) if targets is not None else None

    chunks: list[np.ndarray] = []
    codes: list[int] = []
    parents: Optional[list[Optional[tuple[int, tuple[int, ...]]]]] = [] if record_parents else None
    origin_var: dict[int, int] = {}
    work = 0

    def admit(values: np.ndarray, op_index: Optional[int] = None, block: Optional[np.ndarray] = None) -> int:
        batch_codes = encode_rows(values, size)
        keep = members.add_codes(batch_codes)
        if keep.size == 0:
            return 0
        chunks.append(values[keep])
        codes.extend(int(batch_codes[i]) for i in keep)
        if parents is not None:
            if op_index is None:
                for position in keep:
                    origin_var[len(parents)] = int(position)
                    parents.append(None)
            elif block is None:
                parents.extend((op_index, ()) for _ in keep)
            else:
                parents.extend((op_index, tuple(int(a) for a in block[i])) for i in keep)
        if len(codes) > limits.max_closure:
            raise ResourceLimitError(f"closure in A^{k}", limits.max_closure, len(codes))
        return int(keep.size)

    def reached() -> bool:
        return wanted is not None and all(t in members for t in wanted)

    def finish(complete: bool) -> Closure:
        rows = np.concatenate(chunks) if chunks else np.zeros((0, k), dtype=np.int64)
        logger.debug(
            "closure in A^%d of %d generator(s): %d element(s), work %d, complete=%s",
            k, len(generator_rows), len(codes), work, complete,
        )
        if not origin_var:
            origin_var.update({i: i for i in range(len(generator_rows))})
        return Closure(
            algebra=alg,
            k=k,
            generator_rows=generator_rows,
            rows=rows,
            members=members,
            codes=codes,
            parents=parents,
            origin_var=origin_var,
            complete=complete,
            work=work,
        )

    try:
        if len(generator_rows):
            admit(generator_rows)

        for op_index, op in enumerate(alg.operations):
            if op.arity == 0:
                constant = np.full((1, k), int(op.table), dtype=np.int64)
                admit(constant, op_index)

        if reached():
            return finish(complete=False)

        start = 0
        while True:
            end = len(codes)
            if start >= end:
                break
            if stop_when is not None and stop_when(finish(complete=False)):
                return finish(complete=False)
            rows = np.concatenate(chunks) if len(chunks) > 1 else chunks[0]
            chunks[:] = [rows]

            for op_index, op in enumerate(alg.operations):
                r = op.arity
                if r == 0:
                    continue
                for p in range(r):
                    ranges = [(0, start)] * p + [(start, end)] + [(0, end)] * (r - 1 - p)
                    total = math.prod(hi - lo for lo, hi in ranges)
                    if total == 0:
                        continue
                    work += total * k
                    if work > limits.max_work:
                        raise ResourceLimitError(f"closure work in A^{k}", limits.max_work, work)

                    for block in _argument_blocks(ranges, BATCH_TUPLES):
                        values = op.table[tuple(rows[block[:, j]] for j in range(r))]
                        if admit(values, op_index, block) and reached():
                            return finish(complete=False)
            start = end
    except ResourceLimitError as exc:
        exc.partial = finish(complete=False)
        raise

    return finish(complete=True)


# -----------------------------------------------------------------------------
# IDEMPOTENT IMAGE CLOSURE
# -----------------------------------------------------------------------------

class ImageClosure:
    """
    { t(g_1, ..., g_n) : t idempotent } for generators g_i in A^k, together
    with the tagged closure it was read from.
    """

    def __init__(self, tagged: Closure, k: int, *, dense_cap: int = DENSE_CODE_CAP) -> None:
        size = tagged.algebra.size
        self.tagged = tagged
        self.k = k
        self.size = size
        self.tag_code = encode_tuple(range(size), size)
        self.tag_weight = size ** size

        rows = tagged.rows
        if len(rows):
            identity = np.all(rows[:, k:] == np.arange(size), axis=1)
            prefixes = rows[identity, :k]
        else:
            prefixes = np.zeros((0, k), dtype=np.int64)
        self.members = TupleSet(size, k, dense_cap=dense_cap)
        if len(prefixes):
            self.members.add_codes(encode_rows(prefixes, size))

    @property
    def complete(self) -> bool:
        return self.tagged.complete

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, code: object) -> bool:
        return code in self.members

    def tagged_code(self, code: int) -> int:
        return int(code) * self.tag_weight + self.tag_code

    def term_for(self, code: int) -> Term:
        """An idempotent term sending the generators to ``code``."""
        if code not in self.members:
            raise KeyError(f"Element code {code} is not in the idempotent image closure.")
        return self.tagged.term_for(self.tagged_code(code))


def idempotent_image_closure(
    alg: FiniteAlgebra,
    k: int,
    generators: object,
    *,
    limits: Limits = Limits(),
    record_parents: bool = False,
    targets: Optional[Iterable[int]] = None,
) -> ImageClosure:
    """
    Close ``generators`` in A^k under all idempotent term operations of ``alg``.

    Implemented as Sg in A^(k+|A|) of the generators tagged with
    (0, 1, ..., |A|-1), keeping the k-prefixes of elements whose tag is still
    the identity.
    """
    size = alg.size
    rows = _as_rows(generators, size, k)
    tag = np.broadcast_to(np.arange(size, dtype=np.int64), (len(rows), size))
    tagged_rows = np.concatenate([rows, tag], axis=1)

    tag_code = encode_tuple(range(size), size)
    tagged_targets = None
    if targets is not None:
        tagged_targets = [int(t) * size ** size + tag_code for t in targets]

    tagged = sg_power(
        alg,
        k + size,
        tagged_rows,
        limits=limits,
        record_parents=record_parents,
        targets=tagged_targets,
    )
    return ImageClosure(tagged, k, dense_cap=limits.dense_code_cap)
