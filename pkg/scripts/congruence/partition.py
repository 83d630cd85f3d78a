"""
Partitions of carrier elements and the union-find used to build them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence


class UnionFind:
    """Union by rank with path halving over the indices 0..n-1."""

    def __init__(self, n: int) -> None:
        self.parent = list(range(n))
        self.rank = [0] * n
        self.classes = n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, x: int, y: int) -> bool:
        """Merge the classes of x and y; False if they were already one."""
        x, y = self.find(x), self.find(y)
        if x == y:
            return False
        if self.rank[x] < self.rank[y]:
            x, y = y, x
        elif self.rank[x] == self.rank[y]:
            self.rank[x] += 1
        self.parent[y] = x
        self.classes -= 1
        return True

    def labels(self) -> list[int]:
        return [self.find(x) for x in range(len(self.parent))]


@dataclass(frozen=True)
class Partition:
    """
    An equivalence relation on ``elements`` given by its blocks.

    Blocks are sorted tuples, ordered by their least element, so two equal
    relations have equal ``blocks``.
    """

    elements: tuple[int, ...]
    blocks: tuple[tuple[int, ...], ...]
    _block_of: dict[int, int] = field(default_factory=dict, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        for number, block in enumerate(self.blocks):
            for element in block:
                self._block_of[element] = number
        if sorted(self._block_of) != list(self.elements):
            raise ValueError("Partition blocks do not cover its elements exactly once.")

    # -- constructors ---------------------------------------------------------

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]]) -> "Partition":
        canonical = sorted((tuple(sorted(set(b))) for b in blocks if b), key=lambda b: b[0])
        elements = tuple(sorted(e for b in canonical for e in b))
        return cls(elements=elements, blocks=tuple(canonical))

    @classmethod
    def from_labels(cls, elements: Sequence[int], labels: Sequence[object]) -> "Partition":
        groups: dict[object, list[int]] = {}
        for element, label in zip(elements, labels):
            groups.setdefault(label, []).append(int(element))
        return cls.from_blocks(groups.values())

    @classmethod
    def from_union_find(cls, uf: UnionFind) -> "Partition":
        return cls.from_labels(range(len(uf.parent)), uf.labels())

    @classmethod
    def identity(cls, elements: Iterable[int]) -> "Partition":
        return cls.from_blocks([e] for e in elements)

    @classmethod
    def full(cls, elements: Iterable[int]) -> "Partition":
        return cls.from_blocks([list(elements)])

    # -- queries --------------------------------------------------------------

    @property
    def index(self) -> int:
        """Number of blocks."""
        return len(self.blocks)

    def block_of(self, element: int) -> tuple[int, ...]:
        return self.blocks[self._block_of[element]]

    def related(self, x: int, y: int) -> bool:
        return self._block_of[x] == self._block_of[y]

    def spanning_pairs(self) -> list[tuple[int, int]]:
        """(first, other) for every non-first member of every block."""
        return [(block[0], other) for block in self.blocks for other in block[1:]]

    def refines(self, other: "Partition") -> bool:
        return all(other.related(x, y) for x, y in self.spanning_pairs())

    def to_list(self) -> list[list[int]]:
        return [list(b) for b in self.blocks]

    def __len__(self) -> int:
        return len(self.elements)


def restrict(p: Partition, subset: Iterable[int]) -> Partition:
    """The partition induced on ``subset`` (a set of elements of ``p``)."""
    members = sorted(set(int(s) for s in subset))
    return Partition.from_labels(members, [p._block_of[m] for m in members])


def block_profile(p: Partition, threshold: int = 1) -> tuple[int, list[tuple[int, ...]]]:
    """Count and list the blocks with more than ``threshold`` elements."""
    large = [b for b in p.blocks if len(b) > threshold]
    return len(large), large
