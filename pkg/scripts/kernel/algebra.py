"""
Finite algebras given by operation tables.

An algebra file is a small JSON document:

    {"name": "semilattice",
     "size": 2,
     "operations": [{"name": "meet", "arity": 2, "table": [0, 0, 0, 1]}]}

Tables are flat and row-major.  The leftmost argument is the most significant
digit in radix ``size``, so the entry for (x1, ..., xk) sits at

    x1 * size**(k-1) + x2 * size**(k-2) + ... + xk

Every other module works on the validated ``FiniteAlgebra`` returned by
``parse_algebra``.  Tables are kept as read-only numpy arrays already reshaped
to ``(size,) * arity`` so that coordinatewise evaluation is a single fancy
index.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Sequence

import numpy as np


# -----------------------------------------------------------------------------
# ERROR TYPES
# -----------------------------------------------------------------------------

class AlgebraFormatError(ValueError):
    """
    Raised when an algebra document is malformed or violates a table invariant.

    ``location`` names the offending part of the document, for example
    ``operations[1].table[5]`` or ``line 3, column 7``.
    """

    def __init__(self, message: str, location: str = "document") -> None:
        super().__init__(f"{location}: {message}")
        self.location = location


# -----------------------------------------------------------------------------
# DATA OBJECTS
# -----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Operation:
    """
    One basic operation.

    ``table`` is the ``(size,) * arity`` array of results; arity 0 is a
    zero-dimensional array holding the constant.
    """

    name: str
    arity: int
    table: np.ndarray

    def flat_table(self) -> list[int]:
        """Return the row-major table as plain integers."""
        return [int(v) for v in self.table.reshape(-1)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Operation):
            return NotImplemented
        return (
            self.name == other.name
            and self.arity == other.arity
            and np.array_equal(self.table, other.table)
        )

    def __hash__(self) -> int:
        return hash((self.name, self.arity, self.table.tobytes()))


@dataclass(frozen=True, eq=False)
class FiniteAlgebra:
    """
    A finite algebra on the universe {0, ..., size-1}.
    """

    size: int
    operations: tuple[Operation, ...]
    name: str = "algebra"
    _by_name: dict[str, Operation] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.size < 1:
            raise AlgebraFormatError("size must be a positive integer", "size")

        by_name: dict[str, Operation] = {}
        for index, op in enumerate(self.operations):
            if op.name in by_name:
                raise AlgebraFormatError(
                    f"duplicate operation name {op.name!r}",
                    f"operations[{index}].name",
                )
            expected_shape = (self.size,) * op.arity
            if op.table.shape != expected_shape:
                raise AlgebraFormatError(
                    f"table shape {op.table.shape} does not match {expected_shape}",
                    f"operations[{index}].table",
                )
            by_name[op.name] = op

        self._by_name.update(by_name)

    def operation(self, name: str) -> Operation:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(
                f"Operation {name!r} not in algebra {self.name!r}.\n"
                f"Available operations: {', '.join(self._by_name) or '(none)'}"
            ) from None

    @property
    def max_arity(self) -> int:
        return max((op.arity for op in self.operations), default=0)

    def to_document(self) -> dict[str, Any]:
        """Return the JSON-ready document for this algebra."""
        return {
            "name": self.name,
            "size": self.size,
            "operations": [
                {"name": op.name, "arity": op.arity, "table": op.flat_table()}
                for op in self.operations
            ],
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteAlgebra):
            return NotImplemented
        return self.size == other.size and self.operations == other.operations

    def __hash__(self) -> int:
        return hash((self.size, self.operations))


# -----------------------------------------------------------------------------
# CONSTRUCTION HELPERS
# -----------------------------------------------------------------------------

def make_operation(name: str, arity: int, table: Sequence[int], size: int) -> Operation:
    """
    Build a read-only ``Operation`` from a flat row-major table.

    Raises ``AlgebraFormatError`` on a length mismatch or an out-of-range entry.
    """
    expected = size ** arity
    if len(table) != expected:
        raise AlgebraFormatError(
            f"table has {len(table)} entries, expected size**arity = {expected}",
            f"operation {name!r}",
        )

    array = np.asarray(table, dtype=np.int64)
    bad = np.flatnonzero((array < 0) | (array >= size))
    if bad.size:
        position = int(bad[0])
        raise AlgebraFormatError(
            f"entry {int(array[position])} is outside the universe [0, {size})",
            f"operation {name!r} table[{position}]",
        )

    array = array.reshape((size,) * arity)
    array.setflags(write=False)
    return Operation(name=name, arity=arity, table=array)


def make_algebra(
    size: int,
    operations: Iterable[tuple[str, int, Sequence[int]]],
    name: str = "algebra",
) -> FiniteAlgebra:
    """
    Convenience constructor from ``(name, arity, flat_table)`` triples.
    """
    ops = tuple(make_operation(op_name, arity, table, size) for op_name, arity, table in operations)
    return FiniteAlgebra(size=size, operations=ops, name=name)


# -----------------------------------------------------------------------------
# PARSING
# -----------------------------------------------------------------------------

def _require_int(value: Any, location: str, *, minimum: int) -> int:
    # bool is an int subclass; reject it explicitly
    if isinstance(value, bool) or not isinstance(value, int):
        raise AlgebraFormatError(f"expected an integer, got {value!r}", location)
    if value < minimum:
        raise AlgebraFormatError(f"must be >= {minimum}, got {value}", location)
    return value


def parse_algebra(text: str, *, source: Optional[str] = None) -> FiniteAlgebra:
    """
    Parse and validate an algebra document.

    Parameters
    ----------
    text:
        UTF-8 JSON text in the algebra file format.

    source:
        Optional file name used as the default algebra name and in messages.

    Returns
    -------
    FiniteAlgebra
        A validated algebra.

    Raises
    ------
    AlgebraFormatError
        Malformed JSON, table length mismatch, out-of-range entry or a
        duplicate operation name.  The error's ``location`` says where.
    """
    prefix = f"{source}: " if source else ""

    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AlgebraFormatError(
            f"{prefix}invalid JSON ({exc.msg})",
            f"line {exc.lineno}, column {exc.colno}",
        ) from exc

    if not isinstance(data, dict):
        raise AlgebraFormatError(f"{prefix}top level must be a JSON object", "document")

    size = _require_int(data.get("size"), "size", minimum=1)

    name = data.get("name", source or "algebra")
    if not isinstance(name, str):
        raise AlgebraFormatError(f"{prefix}name must be a string", "name")

    raw_ops = data.get("operations", [])
    if not isinstance(raw_ops, list):
        raise AlgebraFormatError(f"{prefix}operations must be a list", "operations")

    seen: set[str] = set()
    ops: list[Operation] = []

    for index, raw in enumerate(raw_ops):
        where = f"operations[{index}]"
        if not isinstance(raw, dict):
            raise AlgebraFormatError(f"{prefix}operation must be an object", where)

        op_name = raw.get("name")
        if not isinstance(op_name, str) or not op_name:
            raise AlgebraFormatError(f"{prefix}operation name must be a non-empty string", f"{where}.name")
        if op_name in seen:
            raise AlgebraFormatError(f"{prefix}duplicate operation name {op_name!r}", f"{where}.name")
        seen.add(op_name)

        arity = _require_int(raw.get("arity"), f"{where}.arity", minimum=0)

        table = raw.get("table")
        if not isinstance(table, list):
            raise AlgebraFormatError(f"{prefix}table must be a list of integers", f"{where}.table")

        expected = size ** arity
        if len(table) != expected:
            raise AlgebraFormatError(
                f"{prefix}table has {len(table)} entries, expected size**arity = {expected}",
                f"{where}.table",
            )

        for position, entry in enumerate(table):
            if isinstance(entry, bool) or not isinstance(entry, int):
                raise AlgebraFormatError(f"{prefix}entry {entry!r} is not an integer", f"{where}.table[{position}]")
            if not 0 <= entry < size:
                raise AlgebraFormatError(
                    f"{prefix}entry {entry} is outside the universe [0, {size})",
                    f"{where}.table[{position}]",
                )

        ops.append(make_operation(op_name, arity, table, size))

    return FiniteAlgebra(size=size, operations=tuple(ops), name=name)


def dump_algebra(alg: FiniteAlgebra) -> str:
    """
    Serialise an algebra to its canonical JSON text (stable byte output).
    """
    return json.dumps(alg.to_document(), indent=2, sort_keys=True) + "\n"


# -----------------------------------------------------------------------------
# IDEMPOTENCE
# -----------------------------------------------------------------------------

def is_idempotent_operation(alg: FiniteAlgebra, op: Operation) -> bool:
    """
    True iff op(a, ..., a) = a for every element a.

    A constant (arity 0) is idempotent only on a one-element universe.
    """
    universe = np.arange(alg.size)
    diagonal = op.table[(universe,) * op.arity] if op.arity else np.full(alg.size, int(op.table))
    return bool(np.array_equal(diagonal, universe))


def is_idempotent_presentation(alg: FiniteAlgebra) -> bool:
    return all(is_idempotent_operation(alg, op) for op in alg.operations)


def idempotent_basic_reduct(alg: FiniteAlgebra) -> FiniteAlgebra:
    """
    Keep only the idempotent basic operations.

    This is not the full idempotent reduct: idempotent terms built from
    non-idempotent basic operations are reached through
    ``idempotent_image_closure`` and the level-m approximations instead.
    """
    kept = tuple(op for op in alg.operations if is_idempotent_operation(alg, op))
    if len(kept) == len(alg.operations):
        return alg
    return FiniteAlgebra(size=alg.size, operations=kept, name=f"{alg.name}-idempotent")


def induced_algebra(alg: FiniteAlgebra, subset: Sequence[int], name: Optional[str] = None) -> FiniteAlgebra:
    """
    Relabel the subalgebra on a closed ``subset`` to the universe {0, ..., |subset|-1}.

    Element ``subset[i]`` becomes ``i``.  Raises ``ValueError`` if some
    operation leaves the subset.
    """
    elements = np.asarray(sorted(set(int(s) for s in subset)), dtype=np.int64)
    relabel = np.full(alg.size, -1, dtype=np.int64)
    relabel[elements] = np.arange(len(elements))

    ops = []
    for op in alg.operations:
        restricted = op.table[np.ix_(*([elements] * op.arity))] if op.arity else op.table
        mapped = relabel[restricted]
        if np.any(mapped < 0):
            raise ValueError(
                f"Operation {op.name!r} does not preserve the subset {elements.tolist()}."
            )
        mapped = np.array(mapped, dtype=np.int64)
        mapped.setflags(write=False)
        ops.append(Operation(name=op.name, arity=op.arity, table=mapped))

    label = name or f"{alg.name}|{{{','.join(str(e) for e in elements.tolist())}}}"
    return FiniteAlgebra(size=len(elements), operations=tuple(ops), name=label)


def quotient_algebra(alg: FiniteAlgebra, labels: Sequence[int], name: Optional[str] = None) -> FiniteAlgebra:
    """
    The quotient by the partition whose block of element e is ``labels[e]``.

    Blocks are renumbered 0, 1, ... in order of their least element.  Raises
    ``ValueError`` if the partition is not a congruence.
    """
    raw = np.asarray(labels, dtype=np.int64)
    if raw.shape != (alg.size,):
        raise ValueError(f"Need one label per element, got {raw.shape[0] if raw.ndim else 0} for {alg.size}.")
    _, first, inverse = np.unique(raw, return_index=True, return_inverse=True)
    order = np.argsort(np.argsort(first))
    block = order[inverse]
    representatives = np.sort(first)

    ops = []
    for op in alg.operations:
        if op.arity == 0:
            table = np.array(block[int(op.table)], dtype=np.int64)
        else:
            table = np.array(block[op.table[np.ix_(*([representatives] * op.arity))]], dtype=np.int64)
            lifted = table[np.ix_(*([block] * op.arity))]
            if not np.array_equal(lifted, block[op.table]):
                raise ValueError(f"Operation {op.name!r} does not respect the partition {raw.tolist()}.")
        table.setflags(write=False)
        ops.append(Operation(name=op.name, arity=op.arity, table=table))

    label = name or f"{alg.name}/{''.join(str(b) for b in block.tolist())}"
    return FiniteAlgebra(size=len(representatives), operations=tuple(ops), name=label)
