"""
Subpowers materialised as algebras in their own right.

A ``CarrierAlgebra`` is an explicit list of tuples of A^k, sorted by code,
with the basic operations of A acting coordinatewise.  Element i is the i-th
tuple; every operation result is resolved back to an element index.
"""

from __future__ import annotations

import logging
from typing import Optional, Sequence

import numpy as np

from scripts.kernel.algebra import FiniteAlgebra
from scripts.kernel.closure import BATCH_TUPLES, Closure, Limits, ResourceLimitError
from scripts.kernel.tuples import ElementCode, encode_rows

logger = logging.getLogger(__name__)


# Operation tables up to this many entries are materialised.
TABLE_CAP = 1 << 22


class CarrierError(ValueError):
    """
    The given tuples do not form a subuniverse of A^k.
    """


class CarrierAlgebra:
    """
    Parameters
    ----------
    alg:
        The ambient algebra.

    rows:
        (n, k) array of distinct tuples.  They are re-sorted by code.

    verify:
        Check that every operation maps the carrier into itself.  Done by
        table materialisation where the tables fit ``TABLE_CAP``.
    """

    def __init__(
        self,
        alg: FiniteAlgebra,
        rows: np.ndarray,
        *,
        verify: bool = True,
        limits: Limits = Limits(),
    ) -> None:
        rows = np.asarray(rows, dtype=np.int64)
        if rows.ndim != 2:
            raise CarrierError("Carrier rows must be a 2-d array of tuples.")
        self.algebra = alg
        self.k = rows.shape[1]
        self.limits = limits

        codes = encode_rows(rows, alg.size)
        order = sorted(range(len(rows)), key=lambda i: int(codes[i]))
        self.rows = rows[order]
        self.codes: list[int] = [int(codes[i]) for i in order]
        if not self.codes:
            raise CarrierError("Carrier is empty.")
        if len(set(self.codes)) != len(self.codes):
            raise CarrierError("Carrier rows contain duplicates.")
        self._code_array = np.asarray(self.codes, dtype=np.int64) if isinstance(codes, np.ndarray) else None
        self._index = {c: i for i, c in enumerate(self.codes)}
        self._tables: dict[int, Optional[np.ndarray]] = {}

        if verify:
            for op_index in range(len(alg.operations)):
                self.table(op_index)

    @classmethod
    def from_closure(cls, closure: Closure, *, limits: Limits = Limits()) -> "CarrierAlgebra":
        if not closure.complete:
            raise CarrierError("Closure stopped early; it is not a subuniverse.")
        _, rows = closure.sorted_rows()
        return cls(closure.algebra, rows, verify=True, limits=limits)

    # -- elements -------------------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.codes)

    def __len__(self) -> int:
        return len(self.codes)

    def element(self, index: int) -> ElementCode:
        return ElementCode(self.k, self.codes[index])

    def __contains__(self, values: object) -> bool:
        row = np.asarray(values, dtype=np.int64).reshape(1, self.k)
        return int(encode_rows(row, self.algebra.size)[0]) in self._index

    def index_of(self, values: Sequence[int]) -> int:
        code = int(encode_rows(np.asarray([values], dtype=np.int64), self.algebra.size)[0])
        try:
            return self._index[code]
        except KeyError:
            raise KeyError(f"Tuple {tuple(values)} is not in the carrier.") from None

    def resolve(self, rows: np.ndarray) -> np.ndarray:
        """Element indices of the given tuples; CarrierError if one is missing."""
        codes = encode_rows(rows, self.algebra.size)
        if self._code_array is not None and isinstance(codes, np.ndarray):
            positions = np.searchsorted(self._code_array, codes)
            positions = np.minimum(positions, len(self._code_array) - 1)
            found = self._code_array[positions] == codes
            if not found.all():
                bad = rows[int(np.flatnonzero(~found)[0])]
                raise CarrierError(f"Operation result {bad.tolist()} leaves the carrier.")
            return positions.astype(np.intp)
        out = np.empty(len(rows), dtype=np.intp)
        for i, code in enumerate(codes):
            if int(code) not in self._index:
                raise CarrierError(f"Operation result {rows[i].tolist()} leaves the carrier.")
            out[i] = self._index[int(code)]
        return out

    # -- operations -----------------------------------------------------------

    def _apply(self, op_index: int, args: np.ndarray) -> np.ndarray:
        """Apply an operation to (count, r) element-index tuples."""
        op = self.algebra.operations[op_index]
        if op.arity == 0:
            values = np.full((len(args), self.k), int(op.table), dtype=np.int64)
        else:
            values = op.table[tuple(self.rows[args[:, j]] for j in range(op.arity))]
        return self.resolve(values)

    def table(self, op_index: int) -> Optional[np.ndarray]:
        """
        The operation as an (n,)*r array of element indices, or None when it
        would exceed ``TABLE_CAP`` entries.
        """
        if op_index in self._tables:
            return self._tables[op_index]
        op = self.algebra.operations[op_index]
        n = self.size
        entries = n ** op.arity
        table: Optional[np.ndarray] = None
        if entries <= TABLE_CAP:
            flat = np.empty(entries, dtype=np.intp)
            shape = (n,) * op.arity
            for start in range(0, entries, BATCH_TUPLES):
                stop = min(start + BATCH_TUPLES, entries)
                if op.arity:
                    args = np.stack(np.unravel_index(np.arange(start, stop), shape), axis=1)
                else:
                    args = np.zeros((1, 0), dtype=np.intp)
                flat[start:stop] = self._apply(op_index, args)
            table = flat.reshape(shape)
        else:
            logger.debug("carrier of %d elements: table for %s not materialised", n, op.name)
        self._tables[op_index] = table
        return table

    def translation_images(self, op_index: int, coordinate: int, element: int) -> np.ndarray:
        """
        f(c_1, ..., element at ``coordinate``, ..., c_r) for every choice of the
        other arguments, in lexicographic order, as element indices.
        """
        table = self.table(op_index)
        if table is not None:
            return np.take(table, element, axis=coordinate).reshape(-1)

        op = self.algebra.operations[op_index]
        n = self.size
        work = n ** (op.arity - 1) * self.k
        if work > self.limits.max_work:
            raise ResourceLimitError("carrier translation", self.limits.max_work, work)
        grids = np.meshgrid(*([np.arange(n)] * (op.arity - 1)), indexing="ij")
        others = [g.reshape(-1) for g in grids]
        columns = others[:coordinate] + [np.full(n ** (op.arity - 1), element)] + others[coordinate:]
        return self._apply(op_index, np.stack(columns, axis=1))

    def __repr__(self) -> str:
        return f"CarrierAlgebra({self.algebra.name!r}, k={self.k}, size={self.size})"


def projection_values(carrier: CarrierAlgebra, coordinate: int) -> np.ndarray:
    if not 0 <= coordinate < carrier.k:
        raise ValueError(f"Coordinate {coordinate} outside 0..{carrier.k - 1}.")
    return carrier.rows[:, coordinate]
