"""
Radix codes for tuples of A^k and sets of them.

A k-tuple (x1, ..., xk) over {0, ..., size-1} is encoded as the integer
x1 * size**(k-1) + ... + xk, i.e. the same convention as operation tables.
Codes are Python integers, so the encoding is exact for any k; numpy is only
used while the code space fits in a signed 64-bit integer.

``TupleSet`` stores such codes either as a dense bitset (code space at most
``dense_cap``) or as a plain hash set.  Iteration is always in ascending code
order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np


# Dense bitsets stop at 2**26 codes (64 MiB of booleans).
DENSE_CODE_CAP = 1 << 26

# Largest code space that is encoded with vectorised int64 arithmetic.
_INT64_SAFE = 1 << 62


# -----------------------------------------------------------------------------
# ELEMENT CODES
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class ElementCode:
    """
    One element of A^k, identified by its radix code.
    """

    k: int
    code: int

    def decode(self, size: int) -> tuple[int, ...]:
        return decode_tuple(self.code, size, self.k)


def encode_tuple(values: Sequence[int], size: int) -> int:
    code = 0
    for v in values:
        code = code * size + int(v)
    return code


def decode_tuple(code: int, size: int, k: int) -> tuple[int, ...]:
    digits = [0] * k
    for position in range(k - 1, -1, -1):
        code, digits[position] = divmod(code, size)
    return tuple(digits)


def code_space(size: int, k: int) -> int:
    return size ** k


def encode_rows(rows: np.ndarray, size: int) -> list[int] | np.ndarray:
    """
    Encode every row of a ``(count, k)`` array.

    Returns an int64 array while the code space fits; otherwise a list of
    Python integers.
    """
    count, k = rows.shape
    if code_space(size, k) <= _INT64_SAFE:
        weights = size ** np.arange(k - 1, -1, -1, dtype=np.int64)
        return rows.astype(np.int64, copy=False) @ weights
    return [encode_tuple(row, size) for row in rows.tolist()]


def decode_codes(codes: Iterable[int], size: int, k: int) -> np.ndarray:
    codes = list(codes)
    rows = np.zeros((len(codes), k), dtype=np.int64)
    for i, code in enumerate(codes):
        rows[i] = decode_tuple(int(code), size, k)
    return rows


# -----------------------------------------------------------------------------
# TUPLE SETS
# -----------------------------------------------------------------------------

class TupleSet:
    """
    A set of elements of A^k held as codes.

    Dense mode uses a boolean array indexed by code; sparse mode a Python set.
    The mode is fixed at construction from ``size**k`` and ``dense_cap``.
    """

    def __init__(self, size: int, k: int, *, dense_cap: int = DENSE_CODE_CAP) -> None:
        self.size = size
        self.k = k
        self.space = code_space(size, k)
        self.dense = self.space <= dense_cap
        self._bits = np.zeros(self.space, dtype=bool) if self.dense else None
        self._members: set[int] = set()
        self._count = 0

    @classmethod
    def from_tuples(
        cls,
        size: int,
        k: int,
        tuples: Iterable[Sequence[int]],
        *,
        dense_cap: int = DENSE_CODE_CAP,
    ) -> "TupleSet":
        result = cls(size, k, dense_cap=dense_cap)
        result.add_codes([encode_tuple(t, size) for t in tuples])
        return result

    @classmethod
    def from_codes(
        cls,
        size: int,
        k: int,
        codes: Iterable[int],
        *,
        dense_cap: int = DENSE_CODE_CAP,
    ) -> "TupleSet":
        result = cls(size, k, dense_cap=dense_cap)
        result.add_codes(list(codes))
        return result

    def add_codes(self, codes: Sequence[int] | np.ndarray) -> np.ndarray:
        """
        Add a batch of codes.

        Returns the positions (into ``codes``) of the codes that were new, in
        batch order; repeated codes inside the batch count once, at their
        first position.
        """
        if len(codes) == 0:
            return np.zeros(0, dtype=np.int64)

        if self.dense:
            batch = np.asarray(codes, dtype=np.int64)
            if batch.min() < 0 or batch.max() >= self.space:
                raise ValueError(f"code outside [0, {self.space}) for k={self.k}")
            unique, first = np.unique(batch, return_index=True)
            fresh = ~self._bits[unique]
            keep = np.sort(first[fresh])
            self._bits[batch[keep]] = True
            self._count += int(keep.size)
            return keep

        keep: list[int] = []
        for position, code in enumerate(codes):
            code = int(code)
            if code not in self._members:
                if not 0 <= code < self.space:
                    raise ValueError(f"code outside [0, {self.space}) for k={self.k}")
                self._members.add(code)
                keep.append(position)
        self._count += len(keep)
        return np.asarray(keep, dtype=np.int64)

    def __contains__(self, code: object) -> bool:
        if not isinstance(code, (int, np.integer)):
            return False
        code = int(code)
        if not 0 <= code < self.space:
            return False
        if self.dense:
            return bool(self._bits[code])
        return code in self._members

    def __len__(self) -> int:
        return self._count

    def __iter__(self) -> Iterator[int]:
        return iter(self.codes())

    def codes(self) -> list[int]:
        """Members in ascending code order."""
        if self.dense:
            return [int(c) for c in np.flatnonzero(self._bits)]
        return sorted(self._members)

    def tuples(self) -> list[tuple[int, ...]]:
        return [decode_tuple(c, self.size, self.k) for c in self.codes()]

    def issubset(self, other: "TupleSet") -> bool:
        return all(code in other for code in self.codes())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TupleSet):
            return NotImplemented
        return (self.size, self.k) == (other.size, other.k) and self.codes() == other.codes()

    def __repr__(self) -> str:
        mode = "dense" if self.dense else "sparse"
        return f"TupleSet(size={self.size}, k={self.k}, n={len(self)}, {mode})"
